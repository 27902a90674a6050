#include "wavefield/refraction.hpp"

#include "wavefield/diff/ops.hpp"
#include "wavefield/errors.hpp"
#include "wavefield/wavesim.hpp"

namespace wf::refraction {

using diff::Tensor;

Tensor mean_height(const fields::HeightField& field, const Grid& grid, const std::vector<double>& times) {
  return diff::reduce_mean(field.eval(grid.space_time_coords(times)));
}

Tensor distortion(const fields::HeightField& field, const Grid& grid, double t, const Tensor& h0,
                  const RefractionConstants& constants) {
  if (h0.numel() != 1) throw DimensionError("distortion: h0 must be a scalar");
  const Tensor gradient = field.spatial_gradient(grid.space_time_coords({t}));
  return diff::scale(diff::mul(gradient, h0), constants.factor());
}

SequenceDistortion sequence_distortion(const fields::HeightField& field, const Grid& grid,
                                       const std::vector<double>& times, const RefractionConstants& constants) {
  const auto eval = field.eval_with_gradient(grid.space_time_coords(times));
  SequenceDistortion out;
  out.heights = eval.height;
  out.mean_height = diff::reduce_mean(eval.height);
  out.distortion = diff::scale(diff::mul(eval.gradient, out.mean_height), constants.factor());
  return out;
}

Tensor render_distorted(const fields::ImageField& field, const Grid& grid, const Tensor& d) {
  if (d.rank() != 2 || d.dim(1) != 2 || d.dim(0) == 0 || d.dim(0) % grid.size() != 0) {
    throw DimensionError("render_distorted: distortion " + diff::shape_string(d.shape()) +
                         " is not a whole number of frames on a " + std::to_string(grid.size()) + "-pixel grid");
  }
  const std::size_t frames = d.dim(0) / grid.size();
  const Tensor base = frames == 1 ? grid.coords() : diff::repeat_rows(grid.coords(), frames);
  return field.eval(diff::add(base, d));
}

Tensor render_clean(const fields::ImageField& field, const Grid& grid) { return field.eval(grid.coords()); }

Tensor warp(const Tensor& image, const Grid& grid, const Tensor& coords) {
  if (image.rank() != 2 || image.dim(0) != grid.size()) {
    throw DimensionError("warp: image " + diff::shape_string(image.shape()) + " does not cover the grid");
  }
  if (coords.rank() != 2 || coords.dim(1) != 2) {
    throw DimensionError("warp: coordinates must be [n,2], got " + diff::shape_string(coords.shape()));
  }
  const std::size_t w = grid.width(), h = grid.height(), ch = image.dim(1), n = coords.dim(0);
  const auto xy = coords.values();
  std::vector<wavesim::BilinearFootprint> taps(n);
  for (std::size_t i = 0; i < n; ++i) taps[i] = wavesim::bilinear_footprint(w, h, xy[2 * i], xy[2 * i + 1]);

  Raster raster(w, h, ch);
  raster.data.assign(image.values().begin(), image.values().end());
  std::vector<double> out = wavesim::bilinear_sample(raster, xy);

  return Tensor::make_op(
      "warp", {n, ch}, std::move(out), {image, coords}, [taps = std::move(taps), w, ch](const diff::BackwardContext& ctx) {
        const auto g = ctx.out_grad();
        const auto img = ctx.input_values(0);
        auto g_img = ctx.input_grad(0);
        auto g_xy = ctx.input_grad(1);
        auto px = [w, ch](std::size_t row, std::size_t col, std::size_t c) { return (row * w + col) * ch + c; };
        for (std::size_t i = 0; i < taps.size(); ++i) {
          const auto& f = taps[i];
          for (std::size_t c = 0; c < ch; ++c) {
            const double gi = g[i * ch + c];
            const double p00 = img[px(f.row0, f.col0, c)], p01 = img[px(f.row0, f.col1, c)];
            const double p10 = img[px(f.row1, f.col0, c)], p11 = img[px(f.row1, f.col1, c)];
            if (!g_img.empty()) {
              g_img[px(f.row0, f.col0, c)] += gi * (1.0 - f.fy) * (1.0 - f.fx);
              g_img[px(f.row0, f.col1, c)] += gi * (1.0 - f.fy) * f.fx;
              g_img[px(f.row1, f.col0, c)] += gi * f.fy * (1.0 - f.fx);
              g_img[px(f.row1, f.col1, c)] += gi * f.fy * f.fx;
            }
            if (!g_xy.empty()) {
              const double d_fx = (1.0 - f.fy) * (p01 - p00) + f.fy * (p11 - p10);
              const double d_fy = (1.0 - f.fx) * (p10 - p00) + f.fx * (p11 - p01);
              g_xy[2 * i] += gi * d_fx * f.dfx_dx1;
              g_xy[2 * i + 1] += gi * d_fy * f.dfy_dx2;
            }
          }
        }
      });
}

Raster to_raster(const Tensor& values, const Grid& grid, std::size_t frame) {
  if (values.rank() != 2 || values.dim(0) < (frame + 1) * grid.size()) {
    throw DimensionError("to_raster: tensor " + diff::shape_string(values.shape()) + " has no frame " +
                         std::to_string(frame));
  }
  const std::size_t ch = values.dim(1), count = grid.size() * ch;
  Raster r(grid.width(), grid.height(), ch);
  const auto v = values.values();
  std::copy(v.begin() + static_cast<std::ptrdiff_t>(frame * count),
            v.begin() + static_cast<std::ptrdiff_t>((frame + 1) * count), r.data.begin());
  return r;
}

}  // namespace wf::refraction
