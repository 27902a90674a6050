#pragma once

#include <cstdint>
#include <optional>

#include "wavefield/fields/fourier.hpp"
#include "wavefield/fields/siren.hpp"

namespace wf::fields {

struct ImageFieldOptions {
  std::size_t hidden = 256;
  double omega = 30.0;
  bool fourier = true;
  std::size_t fourier_frequencies = 128;
  double fourier_bandwidth = 8.0;
};

/// Static RGB image I(x1, x2) in [0,1]^3: Fourier features, three sinusoidal
/// hidden layers, a linear head and a sigmoid. With fourier = false the
/// encoding is replaced by an extra sinusoidal layer of the same width.
class ImageField {
 public:
  static ImageField create(std::uint64_t seed, const ImageFieldOptions& options);
  ImageField(std::optional<FourierEncoding> encoding, SirenNet net);

  /// coords[n,2] -> colors[n,3]
  diff::Tensor eval(const diff::Tensor& coords) const;

  const std::optional<FourierEncoding>& encoding() const { return encoding_; }
  const SirenNet& net() const { return net_; }
  SirenNet& net() { return net_; }
  ImageField clone() const { return ImageField(encoding_, net_.clone()); }

 private:
  std::optional<FourierEncoding> encoding_;
  SirenNet net_;
};

}  // namespace wf::fields
