#pragma once

#include <cstddef>
#include <vector>

#include "wavefield/diff/tensor.hpp"

namespace wf {

/// Pixel-centre coordinates in [-1,1]^2, endpoint inclusive:
/// x1 = -1 + 2*col/(W-1) across columns, x2 = -1 + 2*row/(H-1) down rows.
/// One pixel spans 2/(W-1) normalized units.
class Grid {
 public:
  Grid(std::size_t width, std::size_t height);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return width_ * height_; }
  double x1(std::size_t col) const { return xs_[col]; }
  double x2(std::size_t row) const { return ys_[row]; }

  /// [W*H, 2] pixel coordinates (x1, x2), row-major over pixels.
  diff::Tensor coords() const;
  /// [T*W*H, 3] rows (x1, x2, t), frame-major.
  diff::Tensor space_time_coords(const std::vector<double>& times) const;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<double> xs_;
  std::vector<double> ys_;
};

/// Axis sample i of n on [-1,1], endpoint inclusive; 0 when n == 1.
double normalized_coordinate(std::size_t i, std::size_t n);

/// t_i = -1 + 2i/(T-1), or {0} for a single frame.
std::vector<double> normalized_times(std::size_t frames);

/// Relative refraction index n (> 1) and the first-order factor c = 1 - 1/n.
class RefractionConstants {
 public:
  explicit RefractionConstants(double index = 1.33);
  double index() const { return index_; }
  double factor() const { return 1.0 - 1.0 / index_; }

 private:
  double index_;
};

}  // namespace wf
