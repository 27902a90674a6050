#include "wavefield/diff/ops.hpp"

#include <cmath>
#include <memory>
#include <numeric>

#include "kernels.hpp"
#include "wavefield/errors.hpp"

namespace wf::diff {

namespace {

void require_rank2(const Tensor& x, const char* op) {
  if (x.rank() != 2) {
    throw DimensionError(std::string(op) + ": expected a matrix, got shape " +
                         shape_string(x.shape()));
  }
}

enum class Broadcast { none, lhs_scalar, rhs_scalar };

Broadcast binary_layout(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() == b.shape()) return Broadcast::none;
  if (a.numel() == 1) return Broadcast::lhs_scalar;
  if (b.numel() == 1) return Broadcast::rhs_scalar;
  throw DimensionError(std::string(op) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                       shape_string(b.shape()));
}

template <typename Fn>
std::vector<double> map_values(std::span<const double> x, Fn fn) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = fn(x[i]);
  return out;
}

// Shared driver for add/sub/mul: forward(a, b) and the two partials.
template <typename Fwd, typename Da, typename Db>
Tensor binary(const char* name, const Tensor& a, const Tensor& b, Fwd fwd, Da da, Db db) {
  const Broadcast layout = binary_layout(a, b, name);
  const Shape shape = layout == Broadcast::lhs_scalar ? b.shape() : a.shape();
  const std::size_t n = shape_numel(shape);
  const auto av = a.values();
  const auto bv = b.values();
  auto ia = [layout](std::size_t i) { return layout == Broadcast::lhs_scalar ? 0 : i; };
  auto ib = [layout](std::size_t i) { return layout == Broadcast::rhs_scalar ? 0 : i; };

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = fwd(av[ia(i)], bv[ib(i)]);

  return Tensor::make_op(name, shape, std::move(out), {a, b},
                         [layout, n, da, db, ia, ib](const BackwardContext& ctx) {
                           const auto g = ctx.out_grad();
                           const auto x = ctx.input_values(0);
                           const auto y = ctx.input_values(1);
                           if (auto ga = ctx.input_grad(0); !ga.empty()) {
                             for (std::size_t i = 0; i < n; ++i)
                               ga[ia(i)] += g[i] * da(x[ia(i)], y[ib(i)]);
                           }
                           if (auto gb = ctx.input_grad(1); !gb.empty()) {
                             for (std::size_t i = 0; i < n; ++i)
                               gb[ib(i)] += g[i] * db(x[ia(i)], y[ib(i)]);
                           }
                         });
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank2(a, "matmul");
  require_rank2(b, "matmul");
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k) {
    throw DimensionError("matmul: inner dimensions differ, " + shape_string(a.shape()) + " x " +
                         shape_string(b.shape()));
  }
  std::vector<double> out(m * n);
  kernels::gemm_rows(a.values().data(), b.values().data(), out.data(), m, k, n);
  return Tensor::make_op("matmul", {m, n}, std::move(out), {a, b},
                         [m, k, n](const BackwardContext& ctx) {
                           const double* g = ctx.out_grad().data();
                           if (auto ga = ctx.input_grad(0); !ga.empty())
                             kernels::accumulate_grad_lhs(g, ctx.input_values(1).data(), ga.data(),
                                                          m, k, n);
                           if (auto gb = ctx.input_grad(1); !gb.empty())
                             kernels::accumulate_grad_rhs(ctx.input_values(0).data(), g, gb.data(),
                                                          m, k, n);
                         });
}

namespace {

struct DenseShape {
  std::size_t m, in, out;
};

DenseShape check_dense(const Tensor& x, const Tensor& weight, const Tensor* bias, const char* op) {
  require_rank2(x, op);
  require_rank2(weight, op);
  const std::size_t m = x.dim(0), in = x.dim(1), out = weight.dim(0);
  if (weight.dim(1) != in) {
    throw DimensionError(std::string(op) + ": input " + shape_string(x.shape()) + " incompatible with weight " +
                         shape_string(weight.shape()));
  }
  if (bias && bias->numel() != out) {
    throw DimensionError(std::string(op) + ": bias " + shape_string(bias->shape()) + " for " +
                         std::to_string(out) + " outputs");
  }
  return {m, in, out};
}

// x W^T + b through the batch-invariant row kernel.
std::vector<double> dense_values(const Tensor& x, const Tensor& weight, const Tensor* bias, DenseShape d) {
  std::vector<double> y(d.m * d.out);
  kernels::dense_forward(x.values().data(), weight.values().data(), bias ? bias->values().data() : nullptr,
                         y.data(), d.m, d.in, d.out);
  return y;
}

// Gradients of y = x W^T + b given dL/dy.
void dense_backward(const BackwardContext& ctx, const double* g, DenseShape d, bool has_bias) {
  if (auto gx = ctx.input_grad(0); !gx.empty())
    kernels::accumulate_grad_input(g, ctx.input_values(1).data(), gx.data(), d.m, d.in, d.out);
  if (auto gw = ctx.input_grad(1); !gw.empty())
    kernels::accumulate_grad_weight(g, ctx.input_values(0).data(), gw.data(), d.m, d.in, d.out);
  if (has_bias) {
    if (auto gb = ctx.input_grad(2); !gb.empty()) kernels::accumulate_column_sums(g, gb.data(), d.m, d.out);
  }
}

Tensor linear_impl(const Tensor& x, const Tensor& weight, const Tensor* bias) {
  const DenseShape d = check_dense(x, weight, bias, "linear");
  std::vector<Tensor> inputs{x, weight};
  if (bias) inputs.push_back(*bias);
  const bool has_bias = bias != nullptr;
  return Tensor::make_op("linear", {d.m, d.out}, dense_values(x, weight, bias, d), std::move(inputs),
                         [d, has_bias](const BackwardContext& ctx) {
                           dense_backward(ctx, ctx.out_grad().data(), d, has_bias);
                         });
}

}  // namespace

Tensor linear(const Tensor& x, const Tensor& weight) { return linear_impl(x, weight, nullptr); }

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  return linear_impl(x, weight, &bias);
}

Tensor sine_layer(const Tensor& x, const Tensor& weight, const Tensor& bias, double frequency) {
  const DenseShape d = check_dense(x, weight, &bias, "sine_layer");
  std::vector<double> y = dense_values(x, weight, &bias, d);
  const bool track = x.requires_grad() || weight.requires_grad() || bias.requires_grad();
  if (!track) {
    kernels::sin_cos(y.data(), frequency, y.data(), nullptr, y.size());
    return Tensor::make_op("sine_layer", {d.m, d.out}, std::move(y), {x, weight, bias}, {});
  }
  auto slope = std::make_shared<std::vector<double>>(y.size());
  kernels::sin_cos(y.data(), frequency, y.data(), slope->data(), y.size());
  for (double& v : *slope) v *= frequency;
  return Tensor::make_op("sine_layer", {d.m, d.out}, std::move(y), {x, weight, bias},
                         [d, slope](const BackwardContext& ctx) {
                           const auto g = ctx.out_grad();
                           std::vector<double> g_pre(g.size());
                           for (std::size_t i = 0; i < g.size(); ++i) g_pre[i] = g[i] * (*slope)[i];
                           dense_backward(ctx, g_pre.data(), d, true);
                         });
}

Tensor add(const Tensor& a, const Tensor& b) {
  return binary(
      "add", a, b, [](double x, double y) { return x + y; }, [](double, double) { return 1.0; },
      [](double, double) { return 1.0; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary(
      "sub", a, b, [](double x, double y) { return x - y; }, [](double, double) { return 1.0; },
      [](double, double) { return -1.0; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary(
      "mul", a, b, [](double x, double y) { return x * y; }, [](double, double y) { return y; },
      [](double x, double) { return x; });
}

Tensor sin(const Tensor& x, double frequency) {
  const auto xv = x.values();
  const std::size_t n = xv.size();
  std::vector<double> out(n);
  if (!x.requires_grad()) {
    kernels::sin_cos(xv.data(), frequency, out.data(), nullptr, n);
    return Tensor::make_op("sin", x.shape(), std::move(out), {x}, {});
  }
  auto slope = std::make_shared<std::vector<double>>(n);
  kernels::sin_cos(xv.data(), frequency, out.data(), slope->data(), n);
  for (double& v : *slope) v *= frequency;
  return Tensor::make_op("sin", x.shape(), std::move(out), {x}, [slope](const BackwardContext& ctx) {
    const auto g = ctx.out_grad();
    auto gx = ctx.input_grad(0);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * (*slope)[i];
  });
}

Tensor cos(const Tensor& x, double frequency) {
  const auto xv = x.values();
  const std::size_t n = xv.size();
  std::vector<double> out(n);
  auto slope = std::make_shared<std::vector<double>>(n);
  kernels::sin_cos(xv.data(), frequency, slope->data(), out.data(), n);
  if (!x.requires_grad()) return Tensor::make_op("cos", x.shape(), std::move(out), {x}, {});
  for (double& v : *slope) v *= -frequency;
  return Tensor::make_op("cos", x.shape(), std::move(out), {x}, [slope](const BackwardContext& ctx) {
    const auto g = ctx.out_grad();
    auto gx = ctx.input_grad(0);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * (*slope)[i];
  });
}

Tensor abs(const Tensor& x) {
  return Tensor::make_op("abs", x.shape(), map_values(x.values(), [](double v) { return std::abs(v); }),
                         {x}, [](const BackwardContext& ctx) {
                           const auto g = ctx.out_grad();
                           const auto xv = ctx.input_values(0);
                           auto gx = ctx.input_grad(0);
                           for (std::size_t i = 0; i < g.size(); ++i) {
                             const double s = xv[i] > 0.0 ? 1.0 : (xv[i] < 0.0 ? -1.0 : 0.0);
                             gx[i] += g[i] * s;
                           }
                         });
}

Tensor scale(const Tensor& x, double factor) {
  return Tensor::make_op("scale", x.shape(), map_values(x.values(), [factor](double v) { return factor * v; }),
                         {x}, [factor](const BackwardContext& ctx) {
                           const auto g = ctx.out_grad();
                           auto gx = ctx.input_grad(0);
                           for (std::size_t i = 0; i < g.size(); ++i) gx[i] += factor * g[i];
                         });
}

Tensor add_scalar(const Tensor& x, double offset) {
  return Tensor::make_op("add_scalar", x.shape(),
                         map_values(x.values(), [offset](double v) { return v + offset; }), {x},
                         [](const BackwardContext& ctx) {
                           const auto g = ctx.out_grad();
                           auto gx = ctx.input_grad(0);
                           for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
                         });
}

Tensor sigmoid(const Tensor& x) {
  return Tensor::make_op("sigmoid", x.shape(),
                         map_values(x.values(), [](double v) { return 1.0 / (1.0 + std::exp(-v)); }),
                         {x}, [](const BackwardContext& ctx) {
                           const auto g = ctx.out_grad();
                           const auto y = ctx.out_values();
                           auto gx = ctx.input_grad(0);
                           for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * y[i] * (1.0 - y[i]);
                         });
}

Tensor reduce_sum(const Tensor& x) {
  const auto xv = x.values();
  const double total = std::accumulate(xv.begin(), xv.end(), 0.0);
  return Tensor::make_op("sum", {}, {total}, {x}, [](const BackwardContext& ctx) {
    const double g = ctx.out_grad()[0];
    for (auto& v : ctx.input_grad(0)) v += g;
  });
}

Tensor reduce_mean(const Tensor& x) {
  if (!x.defined() || x.numel() == 0) throw DomainError("reduce_mean of an empty tensor");
  const auto xv = x.values();
  const double count = static_cast<double>(xv.size());
  const double mean = std::accumulate(xv.begin(), xv.end(), 0.0) / count;
  return Tensor::make_op("mean", {}, {mean}, {x}, [count](const BackwardContext& ctx) {
    const double g = ctx.out_grad()[0] / count;
    for (auto& v : ctx.input_grad(0)) v += g;
  });
}

Tensor mul_rows(const Tensor& x, const Tensor& v) {
  require_rank2(x, "mul_rows");
  const std::size_t rows = x.dim(0), cols = x.dim(1);
  if (v.numel() != cols) {
    throw DimensionError("mul_rows: row factor " + shape_string(v.shape()) + " for matrix " +
                         shape_string(x.shape()));
  }
  const auto xv = x.values();
  const auto vv = v.values();
  std::vector<double> out(xv.size());
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] = xv[r * cols + c] * vv[c];
  return Tensor::make_op("mul_rows", x.shape(), std::move(out), {x, v},
                         [rows, cols](const BackwardContext& ctx) {
                           const auto g = ctx.out_grad();
                           const auto xv = ctx.input_values(0);
                           const auto vv = ctx.input_values(1);
                           if (auto gx = ctx.input_grad(0); !gx.empty()) {
                             for (std::size_t r = 0; r < rows; ++r)
                               for (std::size_t c = 0; c < cols; ++c)
                                 gx[r * cols + c] += g[r * cols + c] * vv[c];
                           }
                           if (auto gv = ctx.input_grad(1); !gv.empty()) {
                             for (std::size_t r = 0; r < rows; ++r)
                               for (std::size_t c = 0; c < cols; ++c)
                                 gv[c] += g[r * cols + c] * xv[r * cols + c];
                           }
                         });
}

Tensor column(const Tensor& x, std::size_t j) {
  require_rank2(x, "column");
  const std::size_t rows = x.dim(0), cols = x.dim(1);
  if (j >= cols) {
    throw DimensionError("column " + std::to_string(j) + " of " + shape_string(x.shape()));
  }
  const auto xv = x.values();
  std::vector<double> out(rows);
  for (std::size_t r = 0; r < rows; ++r) out[r] = xv[r * cols + j];
  return Tensor::make_op("column", {rows, 1}, std::move(out), {x},
                         [rows, cols, j](const BackwardContext& ctx) {
                           const auto g = ctx.out_grad();
                           auto gx = ctx.input_grad(0);
                           for (std::size_t r = 0; r < rows; ++r) gx[r * cols + j] += g[r];
                         });
}

Tensor concat_rows(std::span<const Tensor> parts) {
  if (parts.empty()) throw ContractError("concat_rows: no inputs");
  const std::size_t cols = parts.front().dim(1);
  std::size_t rows = 0;
  std::vector<double> out;
  for (const auto& p : parts) {
    require_rank2(p, "concat_rows");
    if (p.dim(1) != cols) {
      throw DimensionError("concat_rows: column count mismatch " + shape_string(parts.front().shape()) +
                           " vs " + shape_string(p.shape()));
    }
    rows += p.dim(0);
  }
  out.reserve(rows * cols);
  for (const auto& p : parts) out.insert(out.end(), p.values().begin(), p.values().end());
  std::vector<std::size_t> sizes;
  for (const auto& p : parts) sizes.push_back(p.numel());
  return Tensor::make_op("concat_rows", {rows, cols}, std::move(out),
                         std::vector<Tensor>(parts.begin(), parts.end()),
                         [sizes](const BackwardContext& ctx) {
                           const auto g = ctx.out_grad();
                           std::size_t offset = 0;
                           for (std::size_t i = 0; i < sizes.size(); ++i) {
                             if (auto gi = ctx.input_grad(i); !gi.empty())
                               for (std::size_t k = 0; k < sizes[i]; ++k) gi[k] += g[offset + k];
                             offset += sizes[i];
                           }
                         });
}

Tensor concat_cols(std::span<const Tensor> parts) {
  if (parts.empty()) throw ContractError("concat_cols: no inputs");
  const std::size_t rows = parts.front().dim(0);
  std::vector<std::size_t> widths;
  std::size_t cols = 0;
  for (const auto& p : parts) {
    require_rank2(p, "concat_cols");
    if (p.dim(0) != rows) {
      throw DimensionError("concat_cols: row count mismatch " + shape_string(parts.front().shape()) +
                           " vs " + shape_string(p.shape()));
    }
    widths.push_back(p.dim(1));
    cols += p.dim(1);
  }
  std::vector<double> out(rows * cols);
  std::size_t c0 = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto pv = parts[i].values();
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < widths[i]; ++c) out[r * cols + c0 + c] = pv[r * widths[i] + c];
    c0 += widths[i];
  }
  return Tensor::make_op("concat_cols", {rows, cols}, std::move(out),
                         std::vector<Tensor>(parts.begin(), parts.end()),
                         [rows, cols, widths](const BackwardContext& ctx) {
                           const auto g = ctx.out_grad();
                           std::size_t c0 = 0;
                           for (std::size_t i = 0; i < widths.size(); ++i) {
                             if (auto gi = ctx.input_grad(i); !gi.empty())
                               for (std::size_t r = 0; r < rows; ++r)
                                 for (std::size_t c = 0; c < widths[i]; ++c)
                                   gi[r * widths[i] + c] += g[r * cols + c0 + c];
                             c0 += widths[i];
                           }
                         });
}

Tensor slice_rows(const Tensor& x, std::size_t begin, std::size_t end) {
  require_rank2(x, "slice_rows");
  if (begin > end || end > x.dim(0)) {
    throw DimensionError("slice_rows: [" + std::to_string(begin) + ", " + std::to_string(end) +
                         ") out of range for " + shape_string(x.shape()));
  }
  const std::size_t cols = x.dim(1);
  const auto xv = x.values();
  std::vector<double> out(xv.begin() + static_cast<std::ptrdiff_t>(begin * cols),
                          xv.begin() + static_cast<std::ptrdiff_t>(end * cols));
  return Tensor::make_op("slice_rows", {end - begin, cols}, std::move(out), {x},
                         [offset = begin * cols](const BackwardContext& ctx) {
                           const auto g = ctx.out_grad();
                           auto gx = ctx.input_grad(0);
                           for (std::size_t k = 0; k < g.size(); ++k) gx[offset + k] += g[k];
                         });
}

Tensor repeat_rows(const Tensor& x, std::size_t times) {
  require_rank2(x, "repeat_rows");
  if (times == 0) throw DomainError("repeat_rows: zero copies");
  const auto xv = x.values();
  const std::size_t n = xv.size();
  std::vector<double> out;
  out.reserve(n * times);
  for (std::size_t t = 0; t < times; ++t) out.insert(out.end(), xv.begin(), xv.end());
  return Tensor::make_op("repeat_rows", {x.dim(0) * times, x.dim(1)}, std::move(out), {x},
                         [n, times](const BackwardContext& ctx) {
                           const auto g = ctx.out_grad();
                           auto gx = ctx.input_grad(0);
                           for (std::size_t t = 0; t < times; ++t)
                             for (std::size_t k = 0; k < n; ++k) gx[k] += g[t * n + k];
                         });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_numel(shape) != x.numel()) {
    throw DimensionError("reshape " + shape_string(x.shape()) + " to " + shape_string(shape));
  }
  const auto xv = x.values();
  return Tensor::make_op("reshape", std::move(shape), std::vector<double>(xv.begin(), xv.end()), {x},
                         [](const BackwardContext& ctx) {
                           const auto g = ctx.out_grad();
                           auto gx = ctx.input_grad(0);
                           for (std::size_t k = 0; k < g.size(); ++k) gx[k] += g[k];
                         });
}

}  // namespace wf::diff
