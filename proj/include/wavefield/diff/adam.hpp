#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wavefield/diff/tensor.hpp"

namespace wf::diff {

struct AdamOptions {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

void validate(const AdamOptions& options);

struct NamedParameter {
  std::string name;
  Tensor tensor;
};

/// One bias-corrected Adam update of `param` in place. `step` is the 1-based
/// index of this update. Throws NumericalError naming `name` on a NaN gradient.
void adam_update(std::span<double> param, std::span<const double> grad, std::span<double> first_moment,
                 std::span<double> second_moment, std::int64_t step, const AdamOptions& options,
                 const std::string& name);

class Adam {
 public:
  Adam(std::vector<NamedParameter> params, AdamOptions options);

  /// Applies one update from the gradients currently held by the parameters.
  void step();
  void zero_grad();

  std::int64_t steps() const { return step_; }
  const AdamOptions& options() const { return options_; }
  const std::vector<NamedParameter>& parameters() const { return params_; }
  std::span<const double> first_moment(std::size_t i) const { return first_[i]; }
  std::span<const double> second_moment(std::size_t i) const { return second_[i]; }

 private:
  std::vector<NamedParameter> params_;
  AdamOptions options_;
  std::vector<std::vector<double>> first_;
  std::vector<std::vector<double>> second_;
  std::int64_t step_ = 0;
};

}  // namespace wf::diff
