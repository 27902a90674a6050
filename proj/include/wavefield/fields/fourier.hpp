#pragma once

#include <cstdint>
#include <vector>

#include "wavefield/diff/tensor.hpp"

namespace wf::fields {

/// Random Fourier features of 2-D coordinates: [sin(2*pi*B x) | cos(2*pi*B x)]
/// with a fixed frequency matrix B[m,2] drawn from N(0, bandwidth^2).
class FourierEncoding {
 public:
  FourierEncoding(std::uint64_t seed, std::size_t frequencies, double bandwidth);
  /// Takes an explicit row-major B[m,2].
  FourierEncoding(std::vector<double> frequency_matrix, double bandwidth);

  /// coords[n,2] -> [n,2m]; differentiable with respect to coords only.
  diff::Tensor encode(const diff::Tensor& coords) const;

  std::size_t frequencies() const { return matrix_.size() / 2; }
  std::size_t output_dim() const { return matrix_.size(); }
  double bandwidth() const { return bandwidth_; }
  const std::vector<double>& matrix() const { return matrix_; }

 private:
  std::vector<double> matrix_;
  double bandwidth_;
};

}  // namespace wf::fields
