#include "wavefield/diff/tensor.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

#include "wavefield/errors.hpp"

namespace wf::diff {

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> values;
  std::vector<double> grad;
  bool requires_grad = false;
  std::string op = "leaf";
  std::vector<std::shared_ptr<Node>> inputs;
  BackwardFn backward;

  std::span<double> grad_buffer() {
    if (grad.empty()) grad.assign(values.size(), 0.0);
    return grad;
  }
};

}  // namespace detail

using detail::Node;

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto extent : shape) n *= extent;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Tensor Tensor::from(Shape shape, std::vector<double> values, bool requires_grad) {
  if (shape_numel(shape) != values.size()) {
    throw DimensionError("tensor shape " + shape_string(shape) + " does not hold " +
                         std::to_string(values.size()) + " values");
  }
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->values = std::move(values);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) { return full(std::move(shape), 0.0, requires_grad); }

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  const auto n = shape_numel(shape);
  return from(std::move(shape), std::vector<double>(n, value), requires_grad);
}

Tensor Tensor::scalar(double value, bool requires_grad) { return from({}, {value}, requires_grad); }

const Shape& Tensor::shape() const { return node_->shape; }

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= node_->shape.size()) {
    throw DimensionError("axis " + std::to_string(axis) + " out of range for shape " +
                         shape_string(node_->shape));
  }
  return node_->shape[axis];
}

std::size_t Tensor::numel() const { return node_->values.size(); }

std::span<const double> Tensor::values() const { return node_->values; }

std::span<double> Tensor::mutable_values() { return node_->values; }

double Tensor::item() const {
  if (node_->values.size() != 1) {
    throw ContractError("item() on tensor of shape " + shape_string(node_->shape));
  }
  return node_->values.front();
}

bool Tensor::requires_grad() const { return node_->requires_grad; }

bool Tensor::is_leaf() const { return node_->inputs.empty() && !node_->backward; }

std::span<const double> Tensor::grad() const { return node_->grad_buffer(); }

void Tensor::zero_grad() {
  if (!node_->grad.empty()) std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

const std::string& Tensor::op() const { return node_->op; }

std::vector<Tensor> Tensor::inputs() const {
  std::vector<Tensor> out;
  out.reserve(node_->inputs.size());
  for (const auto& in : node_->inputs) out.push_back(Tensor(in));
  return out;
}

Tensor Tensor::make_op(std::string op, Shape shape, std::vector<double> values,
                       std::vector<Tensor> inputs, BackwardFn backward) {
  if (shape_numel(shape) != values.size()) {
    throw DimensionError(op + ": result shape " + shape_string(shape) + " does not hold " +
                         std::to_string(values.size()) + " values");
  }
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->values = std::move(values);
  node->op = std::move(op);
  const bool any_grad =
      std::any_of(inputs.begin(), inputs.end(), [](const Tensor& t) { return t.requires_grad(); });
  if (any_grad && backward) {
    node->requires_grad = true;
    node->backward = std::move(backward);
    node->inputs.reserve(inputs.size());
    for (auto& in : inputs) node->inputs.push_back(std::move(in.node_));
  }
  return Tensor(std::move(node));
}

namespace {

class NodeContext final : public BackwardContext {
 public:
  explicit NodeContext(Node& node) : node_(node) {}

  std::span<const double> out_grad() const override { return node_.grad; }
  std::span<const double> out_values() const override { return node_.values; }
  std::span<const double> input_values(std::size_t i) const override {
    return node_.inputs.at(i)->values;
  }
  std::span<double> input_grad(std::size_t i) const override {
    auto& in = *node_.inputs.at(i);
    if (!in.requires_grad) return {};
    return in.grad_buffer();
  }

 private:
  Node& node_;
};

// Post-order over nodes that require gradients; iterative to survive deep graphs.
std::vector<Node*> topological_order(Node* root) {
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(root, 0);
  visited.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node* child = node->inputs[next++].get();
      if (child->requires_grad && visited.insert(child).second) stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  return order;
}

}  // namespace

void backward(const Tensor& loss) {
  if (!loss.defined() || loss.numel() != 1) {
    throw ContractError("backward() needs a scalar loss, got shape " +
                        (loss.defined() ? shape_string(loss.shape()) : std::string("<undefined>")));
  }
  Node* root = loss.node_.get();
  if (!root->requires_grad) return;

  auto order = topological_order(root);
  for (Node* node : order) {
    if (node->backward) node->grad.assign(node->values.size(), 0.0);
  }
  root->grad_buffer()[0] += 1.0;

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (!node->backward) continue;
    node->backward(NodeContext(*node));
    node->grad.clear();
    node->grad.shrink_to_fit();
  }
}

}  // namespace wf::diff
