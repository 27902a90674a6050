#include "wavefield/fields/fourier.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "wavefield/errors.hpp"
#include "../diff/kernels.hpp"

namespace wf::fields {

FourierEncoding::FourierEncoding(std::uint64_t seed, std::size_t frequencies, double bandwidth)
    : bandwidth_(bandwidth) {
  if (frequencies == 0) throw DomainError("FourierEncoding: need at least one frequency");
  if (!(bandwidth >= 0.0)) throw DomainError("FourierEncoding: bandwidth must be non-negative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  matrix_.resize(2 * frequencies);
  for (auto& v : matrix_) v = bandwidth * dist(rng);
}

FourierEncoding::FourierEncoding(std::vector<double> frequency_matrix, double bandwidth)
    : matrix_(std::move(frequency_matrix)), bandwidth_(bandwidth) {
  if (matrix_.empty() || matrix_.size() % 2 != 0) {
    throw DimensionError("FourierEncoding: frequency matrix must be [m,2] with m > 0");
  }
}

diff::Tensor FourierEncoding::encode(const diff::Tensor& coords) const {
  if (coords.rank() != 2 || coords.dim(1) != 2) {
    throw DimensionError("FourierEncoding: expected [n,2] coordinates, got " +
                         diff::shape_string(coords.shape()));
  }
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const std::size_t n = coords.dim(0), m = frequencies(), width = 2 * m;
  const auto x = coords.values();
  std::vector<double> out(n * width);
  std::vector<double> phase(m);
  for (std::size_t r = 0; r < n; ++r) {
    const double x0 = x[2 * r], x1 = x[2 * r + 1];
    double* row = out.data() + r * width;
    for (std::size_t j = 0; j < m; ++j) phase[j] = two_pi * (matrix_[2 * j] * x0 + matrix_[2 * j + 1] * x1);
    diff::kernels::sin_cos(phase.data(), 1.0, row, row + m, m);
  }
  const auto& b = matrix_;
  return diff::Tensor::make_op(
      "fourier_encode", {n, width}, std::move(out), {coords}, [n, m, width, b](const diff::BackwardContext& ctx) {
        const auto g = ctx.out_grad();
        const auto y = ctx.out_values();
        auto gx = ctx.input_grad(0);
        for (std::size_t r = 0; r < n; ++r) {
          double g0 = 0.0, g1 = 0.0;
          for (std::size_t j = 0; j < m; ++j) {
            // d/dphase of [sin, cos] is [cos, -sin].
            const double dphase = g[r * width + j] * y[r * width + m + j] - g[r * width + m + j] * y[r * width + j];
            g0 += dphase * b[2 * j];
            g1 += dphase * b[2 * j + 1];
          }
          gx[2 * r] += two_pi * g0;
          gx[2 * r + 1] += two_pi * g1;
        }
      });
}

}  // namespace wf::fields
