#pragma once

#include <vector>

#include "wavefield/diff/tensor.hpp"
#include "wavefield/fields/height_field.hpp"
#include "wavefield/fields/image_field.hpp"
#include "wavefield/grid.hpp"
#include "wavefield/raster.hpp"

// First-order refraction through a wavy surface:
//   d(x, t) = (1 - 1/n) * h0 * grad h(x, t)
//   I_t(x)  = I(x + d(x, t))
// with h0 the mean of h over the pixel grid and all frame times.
namespace wf::refraction {

/// Mean of the height field over every (pixel, time) pair; carries gradients
/// back to the field weights.
diff::Tensor mean_height(const fields::HeightField& field, const Grid& grid, const std::vector<double>& times);

/// Distortion of one frame at time t, [W*H, 2]. `h0` is a scalar tensor,
/// normally the output of mean_height on the same field.
diff::Tensor distortion(const fields::HeightField& field, const Grid& grid, double t, const diff::Tensor& h0,
                        const RefractionConstants& constants);

struct SequenceDistortion {
  diff::Tensor mean_height;  // scalar h0
  diff::Tensor heights;      // [T*W*H, 1], frame-major
  diff::Tensor distortion;   // [T*W*H, 2], frame-major
};

/// h0 and all frame distortions from a single batched pass over the field.
SequenceDistortion sequence_distortion(const fields::HeightField& field, const Grid& grid,
                                       const std::vector<double>& times, const RefractionConstants& constants);

/// Image field sampled at x_reg + d. `d` holds k whole frames ([k*W*H, 2]).
diff::Tensor render_distorted(const fields::ImageField& field, const Grid& grid, const diff::Tensor& d);

/// Image field on the regular grid: the restored image, [W*H, 3].
diff::Tensor render_clean(const fields::ImageField& field, const Grid& grid);

/// Differentiable bilinear lookup into an image tensor [W*H, C] at normalized
/// coordinates [n, 2]; gradients flow to both the image and the coordinates.
diff::Tensor warp(const diff::Tensor& image, const Grid& grid, const diff::Tensor& coords);

/// Copies rows [frame*W*H, (frame+1)*W*H) of a [k*W*H, C] tensor into a raster.
Raster to_raster(const diff::Tensor& values, const Grid& grid, std::size_t frame = 0);

}  // namespace wf::refraction
