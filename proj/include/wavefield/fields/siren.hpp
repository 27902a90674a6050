#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wavefield/diff/adam.hpp"
#include "wavefield/diff/tensor.hpp"

namespace wf::fields {

/// Dense layer; sinusoidal layers compute sin(omega * (W x + b)).
struct SirenLayer {
  diff::Tensor weight;  // [out, in]
  diff::Tensor bias;    // [out]
  double omega = 30.0;
  bool sinusoidal = true;

  std::size_t in_dim() const { return weight.dim(1); }
  std::size_t out_dim() const { return weight.dim(0); }
  diff::Tensor pre_activation(const diff::Tensor& x) const;
  diff::Tensor forward(const diff::Tensor& x) const;
};

/// Stack of sinusoidal layers ending in a linear head.
///
/// Layers are held by tensor handle, so copies of a SirenNet share weights;
/// use clone() for an independent copy.
class SirenNet {
 public:
  SirenNet() = default;
  explicit SirenNet(std::vector<SirenLayer> layers);

  diff::Tensor forward(const diff::Tensor& coords) const;

  std::size_t input_dim() const { return layers_.front().in_dim(); }
  std::size_t output_dim() const { return layers_.back().out_dim(); }
  const std::vector<SirenLayer>& layers() const { return layers_; }
  std::vector<SirenLayer>& layers() { return layers_; }

  std::vector<diff::NamedParameter> parameters(const std::string& prefix) const;
  SirenNet clone() const;

 private:
  std::vector<SirenLayer> layers_;
};

/// Initialization bound for the weights of layer `index` with `fan_in` inputs:
/// 1/fan_in for the first layer, sqrt(6/fan_in)/omega afterwards.
double siren_init_bound(std::size_t index, std::size_t fan_in, double omega);

/// dims = {input, hidden..., output}; every layer but the last is sinusoidal.
/// Weights and biases are uniform in (-bound, bound), deterministic in `seed`.
SirenNet siren_init(std::uint64_t seed, std::span<const std::size_t> dims, double omega);

}  // namespace wf::fields
