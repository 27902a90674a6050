#include "wavefield/fields/siren.hpp"

#include <cmath>
#include <random>

#include "wavefield/diff/ops.hpp"
#include "wavefield/errors.hpp"

namespace wf::fields {

diff::Tensor SirenLayer::pre_activation(const diff::Tensor& x) const { return diff::linear(x, weight, bias); }

diff::Tensor SirenLayer::forward(const diff::Tensor& x) const {
  return sinusoidal ? diff::sine_layer(x, weight, bias, omega) : pre_activation(x);
}

SirenNet::SirenNet(std::vector<SirenLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw ContractError("SirenNet: empty layer list");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    if (l.weight.rank() != 2 || l.bias.numel() != l.out_dim()) {
      throw DimensionError("SirenNet: layer " + std::to_string(i) + " has inconsistent weight/bias");
    }
    if (!(l.omega > 0.0)) throw DomainError("SirenNet: omega must be positive");
    if (i > 0 && layers_[i - 1].out_dim() != l.in_dim()) {
      throw DimensionError("SirenNet: layer " + std::to_string(i) + " expects " + std::to_string(l.in_dim()) +
                           " inputs but previous layer emits " + std::to_string(layers_[i - 1].out_dim()));
    }
    const bool last = i + 1 == layers_.size();
    if (l.sinusoidal == last) {
      throw ContractError("SirenNet: only the final layer may be (and must be) linear");
    }
  }
}

diff::Tensor SirenNet::forward(const diff::Tensor& coords) const {
  if (coords.rank() != 2 || coords.dim(1) != input_dim()) {
    throw DimensionError("SirenNet: coordinates " + diff::shape_string(coords.shape()) + " for a " +
                         std::to_string(input_dim()) + "-input network");
  }
  diff::Tensor x = coords;
  for (const auto& layer : layers_) x = layer.forward(x);
  return x;
}

std::vector<diff::NamedParameter> SirenNet::parameters(const std::string& prefix) const {
  std::vector<diff::NamedParameter> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    out.push_back({prefix + "_l" + std::to_string(i) + "_weight", layers_[i].weight});
    out.push_back({prefix + "_l" + std::to_string(i) + "_bias", layers_[i].bias});
  }
  return out;
}

SirenNet SirenNet::clone() const {
  auto copy_leaf = [](const diff::Tensor& t) {
    return diff::Tensor::from(t.shape(), {t.values().begin(), t.values().end()}, t.requires_grad());
  };
  std::vector<SirenLayer> layers;
  for (const auto& l : layers_) layers.push_back({copy_leaf(l.weight), copy_leaf(l.bias), l.omega, l.sinusoidal});
  return SirenNet(std::move(layers));
}

double siren_init_bound(std::size_t index, std::size_t fan_in, double omega) {
  const double n = static_cast<double>(fan_in);
  return index == 0 ? 1.0 / n : std::sqrt(6.0 / n) / omega;
}

SirenNet siren_init(std::uint64_t seed, std::span<const std::size_t> dims, double omega) {
  if (dims.size() < 2) throw ContractError("siren_init: need at least input and output dimensions");
  if (!(omega > 0.0)) throw DomainError("siren_init: omega must be positive");
  for (auto d : dims) {
    if (d == 0) throw DomainError("siren_init: zero-width layer");
  }
  std::mt19937_64 rng(seed);
  std::vector<SirenLayer> layers;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    const std::size_t in = dims[i], out = dims[i + 1];
    const double bound = siren_init_bound(i, in, omega);
    std::uniform_real_distribution<double> dist(-bound, bound);
    std::vector<double> w(out * in), b(out);
    for (auto& v : w) v = dist(rng);
    for (auto& v : b) v = dist(rng);
    layers.push_back({diff::Tensor::from({out, in}, std::move(w), true),
                      diff::Tensor::from({out}, std::move(b), true), omega, i + 2 < dims.size()});
  }
  return SirenNet(std::move(layers));
}

}  // namespace wf::fields
