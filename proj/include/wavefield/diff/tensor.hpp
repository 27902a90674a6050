#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wf::diff {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_string(const Shape& shape);

class Tensor;

/// View handed to an op's reverse function. Input gradient spans are empty
/// for inputs that do not require gradients.
class BackwardContext {
 public:
  virtual ~BackwardContext() = default;
  virtual std::span<const double> out_grad() const = 0;
  virtual std::span<const double> out_values() const = 0;
  virtual std::span<const double> input_values(std::size_t i) const = 0;
  virtual std::span<double> input_grad(std::size_t i) const = 0;
};

using BackwardFn = std::function<void(const BackwardContext&)>;

namespace detail {
struct Node;
}

/// Handle to a node of the define-by-run graph. Copies share the node.
class Tensor {
 public:
  Tensor() = default;

  static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const;

  std::span<const double> values() const;
  /// Mutable storage; only meaningful on leaves (optimizer updates, tests).
  std::span<double> mutable_values();
  double item() const;
  double at(std::size_t flat_index) const { return values()[flat_index]; }

  bool requires_grad() const;
  bool is_leaf() const;
  /// Accumulated gradient, zero-filled if nothing has been accumulated yet.
  std::span<const double> grad() const;
  void zero_grad();

  const std::string& op() const;
  std::vector<Tensor> inputs() const;

  /// True when both handles refer to the same graph node.
  bool same_node(const Tensor& other) const { return node_ == other.node_; }

  /// Registers a new op node. `backward` may be empty when no input requires
  /// gradients; the node is then a constant of the graph.
  static Tensor make_op(std::string op, Shape shape, std::vector<double> values,
                        std::vector<Tensor> inputs, BackwardFn backward);

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}

  std::shared_ptr<detail::Node> node_;

  friend void backward(const Tensor& loss);
};

/// Reverse pass from a scalar. Leaves accumulate gradients across calls; only
/// leaves keep their gradients afterwards.
void backward(const Tensor& loss);

}  // namespace wf::diff
