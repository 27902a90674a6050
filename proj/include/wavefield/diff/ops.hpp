#pragma once

#include <span>

#include "wavefield/diff/tensor.hpp"

// Differentiable primitives. Binary elementwise ops need equal shapes, or one
// operand with a single element which is broadcast. Nothing else broadcasts.
namespace wf::diff {

// a[m,k] * b[k,n]
Tensor matmul(const Tensor& a, const Tensor& b);
// x[n,in] * w[out,in]^T (+ bias[out]); the dense layer of every field network.
Tensor linear(const Tensor& x, const Tensor& weight);
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias);
/// sin(frequency * (x w^T + bias)) as a single node.
Tensor sine_layer(const Tensor& x, const Tensor& weight, const Tensor& bias, double frequency);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
/// sin(frequency * x)
Tensor sin(const Tensor& x, double frequency = 1.0);
/// cos(frequency * x)
Tensor cos(const Tensor& x, double frequency = 1.0);
Tensor abs(const Tensor& x);
Tensor scale(const Tensor& x, double factor);
Tensor add_scalar(const Tensor& x, double offset);
Tensor sigmoid(const Tensor& x);

Tensor reduce_mean(const Tensor& x);
Tensor reduce_sum(const Tensor& x);

/// Multiplies every row of x[n,w] elementwise by v (w elements, any shape).
Tensor mul_rows(const Tensor& x, const Tensor& v);
/// Column j of x[n,w] as [n,1].
Tensor column(const Tensor& x, std::size_t j);
Tensor concat_rows(std::span<const Tensor> parts);
Tensor concat_cols(std::span<const Tensor> parts);
Tensor slice_rows(const Tensor& x, std::size_t begin, std::size_t end);
/// Stacks `times` copies of x[n,w] vertically.
Tensor repeat_rows(const Tensor& x, std::size_t times);
Tensor reshape(const Tensor& x, Shape shape);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator*(double c, const Tensor& x) { return scale(x, c); }

}  // namespace wf::diff
