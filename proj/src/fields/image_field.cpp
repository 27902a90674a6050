#include "wavefield/fields/image_field.hpp"

#include <random>
#include <vector>

#include "wavefield/diff/ops.hpp"
#include "wavefield/errors.hpp"

namespace wf::fields {

ImageField ImageField::create(std::uint64_t seed, const ImageFieldOptions& options) {
  std::mt19937_64 seeder(seed);
  const std::uint64_t encoding_seed = seeder();
  const std::uint64_t net_seed = seeder();
  const std::size_t features = 2 * options.fourier_frequencies;
  const std::size_t h = options.hidden;
  if (options.fourier) {
    FourierEncoding enc(encoding_seed, options.fourier_frequencies, options.fourier_bandwidth);
    const std::vector<std::size_t> dims{features, h, h, h, 3};
    return ImageField(std::move(enc), siren_init(net_seed, dims, options.omega));
  }
  const std::vector<std::size_t> dims{2, features, h, h, h, 3};
  return ImageField(std::nullopt, siren_init(net_seed, dims, options.omega));
}

ImageField::ImageField(std::optional<FourierEncoding> encoding, SirenNet net)
    : encoding_(std::move(encoding)), net_(std::move(net)) {
  const std::size_t expected_in = encoding_ ? encoding_->output_dim() : 2;
  if (net_.input_dim() != expected_in || net_.output_dim() != 3) {
    throw DimensionError("ImageField: network must map " + std::to_string(expected_in) +
                         " features to RGB");
  }
}

diff::Tensor ImageField::eval(const diff::Tensor& coords) const {
  if (coords.rank() != 2 || coords.dim(1) != 2) {
    throw DimensionError("ImageField: expected [n,2] coordinates, got " + diff::shape_string(coords.shape()));
  }
  const diff::Tensor features = encoding_ ? encoding_->encode(coords) : coords;
  return diff::sigmoid(net_.forward(features));
}

}  // namespace wf::fields
