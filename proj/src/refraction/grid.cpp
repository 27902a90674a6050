#include "wavefield/grid.hpp"

#include <cmath>

#include "wavefield/errors.hpp"

namespace wf {

double normalized_coordinate(std::size_t i, std::size_t n) {
  if (n <= 1) return 0.0;
  // Upper half mirrors the lower half so the axis is exactly symmetric.
  if (2 * i > n - 1) return -normalized_coordinate(n - 1 - i, n);
  return -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
}

std::vector<double> normalized_times(std::size_t frames) {
  if (frames == 0) throw DomainError("normalized_times: no frames");
  std::vector<double> t(frames);
  for (std::size_t i = 0; i < frames; ++i) t[i] = normalized_coordinate(i, frames);
  return t;
}

Grid::Grid(std::size_t width, std::size_t height) : width_(width), height_(height) {
  if (width == 0 || height == 0) throw DomainError("Grid: empty grid");
  xs_.resize(width);
  ys_.resize(height);
  for (std::size_t c = 0; c < width; ++c) xs_[c] = normalized_coordinate(c, width);
  for (std::size_t r = 0; r < height; ++r) ys_[r] = normalized_coordinate(r, height);
}

diff::Tensor Grid::coords() const {
  std::vector<double> v;
  v.reserve(2 * size());
  for (std::size_t r = 0; r < height_; ++r) {
    for (std::size_t c = 0; c < width_; ++c) {
      v.push_back(xs_[c]);
      v.push_back(ys_[r]);
    }
  }
  return diff::Tensor::from({size(), 2}, std::move(v));
}

diff::Tensor Grid::space_time_coords(const std::vector<double>& times) const {
  if (times.empty()) throw DomainError("Grid: no time samples");
  std::vector<double> v;
  v.reserve(3 * size() * times.size());
  for (double t : times) {
    for (std::size_t r = 0; r < height_; ++r) {
      for (std::size_t c = 0; c < width_; ++c) {
        v.push_back(xs_[c]);
        v.push_back(ys_[r]);
        v.push_back(t);
      }
    }
  }
  return diff::Tensor::from({size() * times.size(), 3}, std::move(v));
}

RefractionConstants::RefractionConstants(double index) : index_(index) {
  if (!(index > 1.0) || !std::isfinite(index)) {
    throw DomainError("refraction index must be a finite value > 1");
  }
}

}  // namespace wf
