#pragma once

// Dense 64-bit tensors with tape-based reverse-mode differentiation. Covers
// what the LSTM encoders and the CRF loss need and nothing more: no
// broadcasting, no GPU, no graph rewriting.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "morphotag/rng.hpp"

namespace morphotag::diff {

using Shape = std::vector<std::size_t>;

std::string shape_str(const Shape& shape);

// Row-major values. Rank 0 is a scalar with one value.
struct Tensor {
  Shape shape;
  std::vector<double> data;

  Tensor() : data(1, 0.0) {}
  explicit Tensor(Shape s, double fill = 0.0);
  Tensor(Shape s, std::vector<double> values);

  static Tensor scalar(double v) { return Tensor(Shape{}, std::vector<double>{v}); }
  static Tensor vector(std::vector<double> values);
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rank() const noexcept { return shape.size(); }
  std::size_t size() const noexcept { return data.size(); }
  std::size_t rows() const noexcept { return shape.at(0); }
  std::size_t cols() const noexcept { return shape.size() > 1 ? shape[1] : 1; }

  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }
  double& at(std::size_t r, std::size_t c) { return data[r * shape[1] + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * shape[1] + c]; }
  double item() const;

  bool all_finite() const noexcept;
  void fill(double v);

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

std::size_t element_count(const Shape& shape) noexcept;

struct Parameter {
  std::string id;
  Tensor value;
  Tensor grad;

  Parameter(std::string name, Tensor init) : id(std::move(name)), value(std::move(init)), grad(value.shape) {}
  void zero_grad() { grad.fill(0.0); }
};

// Owns parameters at stable addresses, in registration order.
class ParameterSet {
 public:
  Parameter& add(std::string id, Tensor init);
  Parameter* find(std::string_view id) noexcept;
  const Parameter* find(std::string_view id) const noexcept;
  Parameter& get(std::string_view id);
  const Parameter& get(std::string_view id) const;

  void zero_grad();
  std::size_t size() const noexcept { return params_.size(); }
  std::size_t scalar_count() const noexcept;

  auto begin() noexcept { return params_.begin(); }
  auto end() noexcept { return params_.end(); }
  auto begin() const noexcept { return params_.begin(); }
  auto end() const noexcept { return params_.end(); }

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
};

struct Var {
  std::size_t index = 0;
};

// Records every executed op. backward() walks the records in exact reverse
// order. A tape belongs to one thread.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&)>;

  Var constant(Tensor value);
  // Leaf that reads the parameter in place; its gradient accumulates
  // directly into Parameter::grad.
  Var param(Parameter& p);

  const Tensor& value(Var v) const;
  Tensor& grad(Var v);

  // Appends an op result. `backward` reads grad(result) and accumulates into
  // the grads of its inputs. Throws NonFiniteValue if the value is not finite.
  Var record(Tensor value, BackwardFn backward);

  // Seeds d(loss) = seed and propagates. Loss must be a scalar.
  void backward(Var loss, double seed = 1.0);

  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    Parameter* param = nullptr;
    BackwardFn backward;
  };
  std::vector<Node> nodes_;
};

// Primitive ops. Vectors are rank 1, matrices rank 2.
Var matmul(Tape& t, Var a, Var b);      // [m,k]x[k,n] -> [m,n]; [m,k]x[k] -> [m]
Var add(Tape& t, Var a, Var b);         // same shape
Var mul(Tape& t, Var a, Var b);         // elementwise, same shape
Var sub(Tape& t, Var a, Var b);
Var scale(Tape& t, Var a, double k);
Var tanh(Tape& t, Var a);
Var sigmoid(Tape& t, Var a);
Var concat(Tape& t, std::span<const Var> parts, std::size_t axis = 0);
Var stack(Tape& t, std::span<const Var> rows);  // vectors of equal length -> [n, len]
Var slice(Tape& t, Var a, std::size_t begin, std::size_t end);  // along axis 0
Var row(Tape& t, Parameter& table, std::size_t r);  // embedding lookup, scatters grad
Var pick(Tape& t, Var a, std::size_t i);              // element of a vector -> scalar
Var sum(Tape& t, Var a);
Var log_sum_exp(Tape& t, Var a, std::size_t axis = 0);  // reduces one axis
// Inverted dropout: survivors scaled by 1/(1-rate). Identity (returns `a`)
// when not training or rate == 0.
Var dropout(Tape& t, Var a, double rate, Rng& rng, bool training);

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t coordinates = 0;
};

// Compares tape gradients with central differences (f(θ+ε) - f(θ-ε)) / 2ε on
// every coordinate of `params`. `loss` must build a fresh scalar loss on the
// tape it is given and be deterministic. Relative error per coordinate is
// |a - n| / max(|a|, |n|, 1e-6).
GradCheckResult grad_check(const std::function<Var(Tape&)>& loss, std::span<Parameter* const> params,
                           double epsilon = 1e-5);

}  // namespace morphotag::diff
