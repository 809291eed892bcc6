#pragma once

// Minimal reverse-mode differentiation over dense f64 arrays. A Tape records
// one forward pass; backward() walks it once in reverse. Tapes are meant to be
// rebuilt for every evaluation and are not thread-safe.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dasdn/tensor.hpp"

namespace dasdn::grad {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& s);

class Tape;

/// Handle to a node on a tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;

  Tape& tape() const { return *tape_; }
  std::size_t id() const noexcept { return id_; }
  bool valid() const noexcept { return tape_ != nullptr; }

  const Shape& shape() const;
  std::size_t size() const;
  std::span<const double> value() const;
  /// Accumulated gradient; all zeros if nothing reached this node.
  std::vector<double> grad() const;
  bool requires_grad() const;
  /// Value of a single-element node.
  double item() const;

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

class Tape {
 public:
  /// Propagates the node's output gradient (grad(self)) into its parents.
  using BackwardFn = std::function<void(Tape& tape, std::size_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var parameter(Shape shape, std::vector<double> value);
  Var constant(Shape shape, std::vector<double> value);
  Var parameter(const Tensor3& t);
  Var constant(const Tensor3& t);
  Var parameter(const Matrix& m);
  Var constant(const Matrix& m);

  /// Adds an op node. It requires grad iff any parent does; the backward
  /// function is dropped otherwise.
  Var record(Shape shape, std::vector<double> value, std::span<const Var> parents,
             BackwardFn backward);

  /// Same value as x, no gradient flows back to x.
  Var stop_gradient(Var x);

  /// Seeds d(loss)/d(loss) = 1 and accumulates gradients into every node that
  /// requires them. Throws std::invalid_argument if loss is not a single element.
  void backward(Var loss);

  std::size_t size() const noexcept { return nodes_.size(); }
  const Shape& shape(std::size_t id) const { return nodes_[id].shape; }
  const std::vector<double>& value(std::size_t id) const { return nodes_[id].value; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  /// Gradient buffer of a node, zero-initialized on first access.
  std::span<double> grad_buffer(std::size_t id);
  std::span<const double> grad(std::size_t id) const { return nodes_[id].grad; }

 private:
  struct Node {
    Shape shape;
    std::vector<double> value;
    std::vector<double> grad;
    bool requires_grad = false;
    BackwardFn backward;
  };

  Var push(Shape shape, std::vector<double> value, bool requires_grad, BackwardFn backward);

  std::vector<Node> nodes_;
};

Tensor3 to_tensor(Var v);

// Elementwise and reduction primitives.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double s);
Var add_scalar(Var a, double s);
Var sum(Var a);
Var tanh(Var a);
Var abs(Var a);

/// t[c, ...] - v[c] for a rank-3 t and length-C v.
Var channel_sub(Var t, Var v);
/// t[c, ...] / v[c]
Var channel_div(Var t, Var v);
/// tanh((t[c, ...] - shift[c]) / scale[c]) as one node.
Var channel_tanh(Var t, Var shift, Var scale);

/// t x_mode a for a rank-3 t and rank-2 a.
Var mode_multiply(Var t, Var a, int mode);

/// 3x3 same-size convolution over the last two axes of z (C, F, T), with
/// weight (C, C, 3, 3) mixing all channels and a per-output-channel bias.
Var conv3x3(Var z, Var weight, Var bias);

/// ||a - b||_F. The gradient at a == b is taken as zero.
Var frobenius_distance(Var a, Var b);

/// -sum_i p_i log p_i with p = softmax(v).
Var softmax_entropy(Var v);

struct Parameter {
  std::string name;
  Shape shape;
  std::vector<double> value;
};

using LossBuilder = std::function<Var(Tape& tape, std::span<const Var> params)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::vector<double> per_parameter;  // max error within each parameter
};

/// Compares backward() against central differences of step `step` for every
/// coordinate: |analytic - numeric| / max(1e-8, |numeric|), maximized.
GradCheckResult finite_diff_check(const LossBuilder& build, std::vector<Parameter> params,
                                  double step = 1e-5);

}  // namespace dasdn::grad
