#pragma once

#include <cstdint>

#include "wavefield/fields/siren.hpp"

namespace wf::fields {

struct HeightFieldOptions {
  std::size_t hidden = 256;
  double omega = 30.0;
  double offset = 1.0;
  double scale = 0.1;
};

/// Surface height h(x1, x2, t) = offset + scale * net(x1, x2, t).
class HeightField {
 public:
  /// Two sinusoidal hidden layers plus a linear head.
  static HeightField create(std::uint64_t seed, const HeightFieldOptions& options);

  /// Any SirenNet with 3 inputs and 1 output.
  HeightField(SirenNet net, double offset, double scale);

  struct Evaluation {
    diff::Tensor height;    // [n,1]
    diff::Tensor gradient;  // [n,2]: dh/dx1, dh/dx2
  };

  /// coords[n,3] rows are (x1, x2, t).
  diff::Tensor eval(const diff::Tensor& coords) const;

  /// Spatial gradient; tangents are pushed through each layer's Jacobian
  /// (omega * cos(omega * pre) * W) and the result stays differentiable with
  /// respect to the weights. Coordinates must not require grad.
  diff::Tensor spatial_gradient(const diff::Tensor& coords) const;

  /// Height and gradient sharing one forward pass.
  Evaluation eval_with_gradient(const diff::Tensor& coords) const;

  /// Bound M on |net output|: sum of |head weights| plus |head bias|.
  double raw_bound() const;

  const SirenNet& net() const { return net_; }
  SirenNet& net() { return net_; }
  double offset() const { return offset_; }
  double scale() const { return scale_; }
  HeightField clone() const { return HeightField(net_.clone(), offset_, scale_); }

 private:
  Evaluation evaluate(const diff::Tensor& coords, bool with_gradient) const;

  SirenNet net_;
  double offset_;
  double scale_;
};

/// Same values as HeightField::eval_with_gradient, built from elementary
/// graph ops (linear, sin, cos, mul, ...) rather than one fused node. Slower;
/// kept as a cross-check for the fused pass and its reverse pass.
HeightField::Evaluation height_with_gradient_graph(const HeightField& field, const diff::Tensor& coords);

}  // namespace wf::fields
