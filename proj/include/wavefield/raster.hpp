#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wf {

/// Row-major, channel-interleaved image of doubles.
struct Raster {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 0;
  std::vector<double> data;

  Raster() = default;
  Raster(std::size_t w, std::size_t h, std::size_t c, double fill = 0.0)
      : width(w), height(h), channels(c), data(w * h * c, fill) {}

  std::size_t pixel_count() const { return width * height; }
  std::size_t index(std::size_t row, std::size_t col, std::size_t ch = 0) const {
    return (row * width + col) * channels + ch;
  }
  double& at(std::size_t row, std::size_t col, std::size_t ch = 0) { return data[index(row, col, ch)]; }
  double at(std::size_t row, std::size_t col, std::size_t ch = 0) const {
    return data[index(row, col, ch)];
  }
  bool same_shape(const Raster& o) const {
    return width == o.width && height == o.height && channels == o.channels;
  }

  friend bool operator==(const Raster&, const Raster&) = default;
};

}  // namespace wf
