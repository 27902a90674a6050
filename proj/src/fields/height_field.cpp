#include "wavefield/fields/height_field.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <utility>
#include <vector>

#include "wavefield/diff/ops.hpp"
#include "wavefield/errors.hpp"
#include "../diff/kernels.hpp"

namespace wf::fields {

HeightField HeightField::create(std::uint64_t seed, const HeightFieldOptions& options) {
  const std::array<std::size_t, 4> dims{3, options.hidden, options.hidden, 1};
  return HeightField(siren_init(seed, dims, options.omega), options.offset, options.scale);
}

HeightField::HeightField(SirenNet net, double offset, double scale)
    : net_(std::move(net)), offset_(offset), scale_(scale) {
  if (net_.input_dim() != 3 || net_.output_dim() != 1) {
    throw DimensionError("HeightField: network must map (x1, x2, t) to a scalar");
  }
}

diff::Tensor HeightField::eval(const diff::Tensor& coords) const { return evaluate(coords, false).height; }

diff::Tensor HeightField::spatial_gradient(const diff::Tensor& coords) const {
  return evaluate(coords, true).gradient;
}

HeightField::Evaluation HeightField::eval_with_gradient(const diff::Tensor& coords) const {
  return evaluate(coords, true);
}

namespace {

// Height and spatial gradient of a sine-activated MLP in one node.
//
// Forward, per sinusoidal layer with input a and input tangents u_k (k = x1, x2):
//   z = a W^T + b,  a' = sin(w z),  s = w cos(w z),  v_k = u_k W^T,  u'_k = s * v_k
// where u_k of the first layer is the unit vector e_k, so v_k = W[:, k].
// The linear head gives out = a W^T + b and g_k = u_k W^T.
// Output rows are (offset + scale * out, scale * g_1, scale * g_2).
//
// Tangent blocks are stacked as [2n, width]: rows [0, n) for x1, [n, 2n) for x2.
struct LayerCache {
  std::vector<double> activation;  // a'  [n, width]
  std::vector<double> slope;       // s   [n, width]
  std::vector<double> tangent;     // v   [2n, width]
};

std::vector<double> slope_times_tangent(const LayerCache& c, std::size_t n, std::size_t width) {
  std::vector<double> u(2 * n * width);
  const std::size_t block = n * width;
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t i = 0; i < block; ++i) u[k * block + i] = c.slope[i] * c.tangent[k * block + i];
  return u;
}

diff::Tensor fused_height(const SirenNet& net, const diff::Tensor& coords, double offset, double scale) {
  using diff::kernels::accumulate_grad_input;
  using diff::kernels::accumulate_grad_weight;
  using diff::kernels::accumulate_column_sums;
  using diff::kernels::dense_forward;

  const auto& layers = net.layers();
  const std::size_t n = coords.dim(0), depth = layers.size();
  auto caches = std::make_shared<std::vector<LayerCache>>(depth - 1);

  std::vector<double> head_out(n);
  std::vector<double> head_grad(2 * n);
  {
    const double* a = coords.values().data();
    std::vector<double> u;  // tangent input of the current layer, empty for the first
    for (std::size_t l = 0; l + 1 < depth; ++l) {
      const auto& layer = layers[l];
      const std::size_t in = layer.in_dim(), width = layer.out_dim();
      const auto w = layer.weight.values();
      auto& c = (*caches)[l];
      c.activation.resize(n * width);
      c.slope.resize(n * width);
      c.tangent.resize(2 * n * width);
      dense_forward(a, w.data(), layer.bias.values().data(), c.activation.data(), n, in, width);
      diff::kernels::sin_cos(c.activation.data(), layer.omega, c.activation.data(), c.slope.data(), n * width);
      for (double& v : c.slope) v *= layer.omega;
      if (l == 0) {
        for (std::size_t k = 0; k < 2; ++k)
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < width; ++j) c.tangent[(k * n + i) * width + j] = w[j * in + k];
      } else {
        dense_forward(u.data(), w.data(), nullptr, c.tangent.data(), 2 * n, in, width);
      }
      u = slope_times_tangent(c, n, width);
      a = c.activation.data();
    }
    const auto& head = layers.back();
    const auto w = head.weight.values();
    dense_forward(a, w.data(), head.bias.values().data(), head_out.data(), n, head.in_dim(), 1);
    if (depth == 1) {
      for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t i = 0; i < n; ++i) head_grad[k * n + i] = w[k];
    } else {
      dense_forward(u.data(), w.data(), nullptr, head_grad.data(), 2 * n, head.in_dim(), 1);
    }
  }

  std::vector<double> out(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    out[3 * i] = offset + scale * head_out[i];
    out[3 * i + 1] = scale * head_grad[i];
    out[3 * i + 2] = scale * head_grad[n + i];
  }

  std::vector<diff::Tensor> inputs{coords};
  std::vector<double> omegas;
  for (const auto& layer : layers) {
    inputs.push_back(layer.weight);
    inputs.push_back(layer.bias);
    omegas.push_back(layer.omega);
  }
  return diff::Tensor::make_op(
      "height_field", {n, 3}, std::move(out), std::move(inputs),
      [caches, omegas, n, depth, scale](const diff::BackwardContext& ctx) {
        const auto gy = ctx.out_grad();
        auto weight_of = [&](std::size_t l) { return ctx.input_values(1 + 2 * l); };
        auto dims_of = [&](std::size_t l) {
          const std::size_t in = l == 0 ? 3 : (*caches)[l - 1].slope.size() / n;
          return std::pair{in, weight_of(l).size() / in};
        };

        // Seeds for the head.
        std::vector<double> g_out(n), g_grad(2 * n);
        for (std::size_t i = 0; i < n; ++i) {
          g_out[i] = scale * gy[3 * i];
          g_grad[i] = scale * gy[3 * i + 1];
          g_grad[n + i] = scale * gy[3 * i + 2];
        }

        const std::size_t head = depth - 1;
        const auto [head_in, head_width] = dims_of(head);
        (void)head_width;
        const double* head_a = head == 0 ? ctx.input_values(0).data() : (*caches)[head - 1].activation.data();
        std::vector<double> head_u;
        if (head > 0) head_u = slope_times_tangent((*caches)[head - 1], n, head_in);
        if (auto gw = ctx.input_grad(1 + 2 * head); !gw.empty()) {
          accumulate_grad_weight(g_out.data(), head_a, gw.data(), n, head_in, 1);
          if (head > 0) {
            accumulate_grad_weight(g_grad.data(), head_u.data(), gw.data(), 2 * n, head_in, 1);
          } else {
            for (std::size_t k = 0; k < 2; ++k)
              for (std::size_t i = 0; i < n; ++i) gw[k] += g_grad[k * n + i];
          }
        }
        if (auto gb = ctx.input_grad(2 + 2 * head); !gb.empty()) accumulate_column_sums(g_out.data(), gb.data(), n, 1);
        if (head == 0) return;

        // Gradients flowing into the head's inputs a and u.
        std::vector<double> g_a(n * head_in, 0.0), g_u(2 * n * head_in, 0.0);
        accumulate_grad_input(g_out.data(), weight_of(head).data(), g_a.data(), n, head_in, 1);
        accumulate_grad_input(g_grad.data(), weight_of(head).data(), g_u.data(), 2 * n, head_in, 1);

        for (std::size_t l = head; l-- > 0;) {
          const auto& c = (*caches)[l];
          const auto [in, width] = dims_of(l);
          const double omega = omegas[l];
          const std::size_t block = n * width;
          std::vector<double> g_z(block), g_v(2 * block);
          for (std::size_t i = 0; i < block; ++i) {
            const double g_s = g_u[i] * c.tangent[i] + g_u[block + i] * c.tangent[block + i];
            g_v[i] = g_u[i] * c.slope[i];
            g_v[block + i] = g_u[block + i] * c.slope[i];
            g_z[i] = g_a[i] * c.slope[i] - g_s * omega * omega * c.activation[i];
          }
          const double* a_in = l == 0 ? ctx.input_values(0).data() : (*caches)[l - 1].activation.data();
          std::vector<double> u_in;
          if (l > 0) u_in = slope_times_tangent((*caches)[l - 1], n, in);
          if (auto gw = ctx.input_grad(1 + 2 * l); !gw.empty()) {
            accumulate_grad_weight(g_z.data(), a_in, gw.data(), n, in, width);
            if (l > 0) {
              accumulate_grad_weight(g_v.data(), u_in.data(), gw.data(), 2 * n, in, width);
            } else {
              // v_k = W[:, k] on every row.
              for (std::size_t k = 0; k < 2; ++k)
                for (std::size_t i = 0; i < n; ++i)
                  for (std::size_t j = 0; j < width; ++j) gw[j * in + k] += g_v[(k * n + i) * width + j];
            }
          }
          if (auto gb = ctx.input_grad(2 + 2 * l); !gb.empty()) accumulate_column_sums(g_z.data(), gb.data(), n, width);
          if (l == 0) break;
          g_a.assign(n * in, 0.0);
          g_u.assign(2 * n * in, 0.0);
          accumulate_grad_input(g_z.data(), weight_of(l).data(), g_a.data(), n, in, width);
          accumulate_grad_input(g_v.data(), weight_of(l).data(), g_u.data(), 2 * n, in, width);
        }
      });
}

}  // namespace

HeightField::Evaluation HeightField::evaluate(const diff::Tensor& coords, bool with_gradient) const {
  using namespace diff;
  if (coords.rank() != 2 || coords.dim(1) != 3) {
    throw DimensionError("HeightField: expected [n,3] coordinates, got " + shape_string(coords.shape()));
  }
  if (coords.requires_grad()) throw ContractError("HeightField: coordinates are not differentiable inputs");
  Evaluation out;
  if (!with_gradient) {
    out.height = add_scalar(diff::scale(net_.forward(coords), scale_), offset_);
    return out;
  }
  const Tensor packed = fused_height(net_, coords, offset_, scale_);
  out.height = column(packed, 0);
  const std::array<Tensor, 2> cols{column(packed, 1), column(packed, 2)};
  out.gradient = concat_cols(cols);
  return out;
}

HeightField::Evaluation height_with_gradient_graph(const HeightField& field, const diff::Tensor& coords) {
  using namespace diff;
  if (coords.rank() != 2 || coords.dim(1) != 3) {
    throw DimensionError("HeightField: expected [n,3] coordinates, got " + shape_string(coords.shape()));
  }
  const std::size_t n = coords.dim(0);
  const auto& layers = field.net().layers();

  // Tangent rows [0,n) carry d/dx1 and rows [n,2n) carry d/dx2.
  Tensor x = coords;
  Tensor tangent;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& layer = layers[i];
    const Tensor pre = layer.pre_activation(x);
    if (!layer.sinusoidal) {
      x = pre;
      if (i == 0) {
        const Tensor ones = Tensor::full({n, 1}, 1.0);
        const std::array<Tensor, 2> parts{mul_rows(ones, column(layer.weight, 0)),
                                          mul_rows(ones, column(layer.weight, 1))};
        tangent = concat_rows(parts);
      } else {
        tangent = linear(tangent, layer.weight);
      }
      break;
    }
    x = sin(pre, layer.omega);
    const Tensor slope = diff::scale(cos(pre, layer.omega), layer.omega);
    if (i == 0) {
      const std::array<Tensor, 2> parts{mul_rows(slope, column(layer.weight, 0)),
                                        mul_rows(slope, column(layer.weight, 1))};
      tangent = concat_rows(parts);
    } else {
      tangent = mul(repeat_rows(slope, 2), linear(tangent, layer.weight));
    }
  }

  HeightField::Evaluation out;
  out.height = add_scalar(diff::scale(x, field.scale()), field.offset());
  const std::array<Tensor, 2> cols{slice_rows(tangent, 0, n), slice_rows(tangent, n, 2 * n)};
  out.gradient = diff::scale(concat_cols(cols), field.scale());
  return out;
}

double HeightField::raw_bound() const {
  const auto& head = net_.layers().back();
  double bound = 0.0;
  for (double w : head.weight.values()) bound += std::abs(w);
  for (double b : head.bias.values()) bound += std::abs(b);
  return bound;
}

}  // namespace wf::fields
