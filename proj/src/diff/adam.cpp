#include "wavefield/diff/adam.hpp"

#include <cmath>

#include "wavefield/errors.hpp"

namespace wf::diff {

void validate(const AdamOptions& o) {
  if (!(o.learning_rate > 0.0) || !(o.epsilon > 0.0)) {
    throw DomainError("Adam: learning rate and epsilon must be positive");
  }
  if (!(o.beta1 > 0.0 && o.beta1 < 1.0) || !(o.beta2 > 0.0 && o.beta2 < 1.0)) {
    throw DomainError("Adam: beta1 and beta2 must lie in (0, 1)");
  }
}

void adam_update(std::span<double> param, std::span<const double> grad, std::span<double> first_moment,
                 std::span<double> second_moment, std::int64_t step, const AdamOptions& o,
                 const std::string& name) {
  if (grad.size() != param.size() || first_moment.size() != param.size() ||
      second_moment.size() != param.size()) {
    throw DimensionError("Adam: state of parameter '" + name + "' does not match its size");
  }
  if (step < 1) throw ContractError("Adam: step index starts at 1");
  for (double g : grad) {
    if (std::isnan(g)) throw NumericalError("Adam: NaN gradient in parameter '" + name + "'");
  }
  const double correction1 = 1.0 - std::pow(o.beta1, static_cast<double>(step));
  const double correction2 = 1.0 - std::pow(o.beta2, static_cast<double>(step));
  for (std::size_t i = 0; i < param.size(); ++i) {
    first_moment[i] = o.beta1 * first_moment[i] + (1.0 - o.beta1) * grad[i];
    second_moment[i] = o.beta2 * second_moment[i] + (1.0 - o.beta2) * grad[i] * grad[i];
    const double m_hat = first_moment[i] / correction1;
    const double v_hat = second_moment[i] / correction2;
    param[i] -= o.learning_rate * m_hat / (std::sqrt(v_hat) + o.epsilon);
  }
}

Adam::Adam(std::vector<NamedParameter> params, AdamOptions options)
    : params_(std::move(params)), options_(options) {
  validate(options_);
  for (const auto& p : params_) {
    if (!p.tensor.defined() || !p.tensor.is_leaf() || !p.tensor.requires_grad()) {
      throw ContractError("Adam: parameter '" + p.name + "' is not a trainable leaf");
    }
    first_.emplace_back(p.tensor.numel(), 0.0);
    second_.emplace_back(p.tensor.numel(), 0.0);
  }
}

void Adam::step() {
  for (const auto& p : params_) {
    for (double g : p.tensor.grad()) {
      if (std::isnan(g)) throw NumericalError("Adam: NaN gradient in parameter '" + p.name + "'");
    }
  }
  ++step_;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto& tensor = params_[i].tensor;
    adam_update(tensor.mutable_values(), tensor.grad(), first_[i], second_[i], step_, options_,
                params_[i].name);
  }
}

void Adam::zero_grad() {
  for (auto& p : params_) p.tensor.zero_grad();
}

}  // namespace wf::diff
