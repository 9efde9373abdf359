#include "morphotag/diff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "morphotag/error.hpp"

namespace morphotag::diff {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::ShapeMismatch, what);
}

void accumulate(Tensor& into, const Tensor& from) {
  for (std::size_t i = 0; i < into.size(); ++i) into.data[i] += from.data[i];
}

}  // namespace

std::string shape_str(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

std::size_t element_count(const Shape& shape) noexcept {
  std::size_t n = 1;
  for (auto e : shape) n *= e;
  return n;
}

Tensor::Tensor(Shape s, double fill) : shape(std::move(s)), data(element_count(shape), fill) {}

Tensor::Tensor(Shape s, std::vector<double> values) : shape(std::move(s)), data(std::move(values)) {
  require(data.size() == element_count(shape), "value count " + std::to_string(data.size()) +
                                                    " does not match shape " + shape_str(shape));
}

Tensor Tensor::vector(std::vector<double> values) {
  const auto n = values.size();
  return Tensor(Shape{n}, std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
  return Tensor(Shape{rows, cols}, std::move(values));
}

double Tensor::item() const {
  require(data.size() == 1, "item() on tensor of shape " + shape_str(shape));
  return data[0];
}

bool Tensor::all_finite() const noexcept {
  return std::all_of(data.begin(), data.end(), [](double v) { return std::isfinite(v); });
}

void Tensor::fill(double v) { std::fill(data.begin(), data.end(), v); }

Parameter& ParameterSet::add(std::string id, Tensor init) {
  if (find(id)) throw Error(Errc::ShapeMismatch, "duplicate parameter id '" + id + "'");
  params_.push_back(std::make_unique<Parameter>(std::move(id), std::move(init)));
  return *params_.back();
}

Parameter* ParameterSet::find(std::string_view id) noexcept {
  for (auto& p : params_)
    if (p->id == id) return p.get();
  return nullptr;
}

const Parameter* ParameterSet::find(std::string_view id) const noexcept {
  for (const auto& p : params_)
    if (p->id == id) return p.get();
  return nullptr;
}

Parameter& ParameterSet::get(std::string_view id) {
  auto* p = find(id);
  if (!p) throw Error(Errc::ShapeMismatch, "no parameter '" + std::string(id) + "'");
  return *p;
}

const Parameter& ParameterSet::get(std::string_view id) const {
  const auto* p = find(id);
  if (!p) throw Error(Errc::ShapeMismatch, "no parameter '" + std::string(id) + "'");
  return *p;
}

void ParameterSet::zero_grad() {
  for (auto& p : params_) p->zero_grad();
}

std::size_t ParameterSet::scalar_count() const noexcept {
  std::size_t n = 0;
  for (const auto& p : params_) n += p->value.size();
  return n;
}

Var Tape::constant(Tensor value) { return record(std::move(value), nullptr); }

Var Tape::param(Parameter& p) {
  Node node;
  node.value = Tensor(Shape{0});
  node.grad = Tensor(Shape{0});
  node.param = &p;
  nodes_.push_back(std::move(node));
  return Var{nodes_.size() - 1};
}

const Tensor& Tape::value(Var v) const {
  const auto& node = nodes_.at(v.index);
  return node.param ? node.param->value : node.value;
}

Tensor& Tape::grad(Var v) {
  auto& node = nodes_.at(v.index);
  return node.param ? node.param->grad : node.grad;
}

Var Tape::record(Tensor value, BackwardFn backward) {
  if (!value.all_finite()) throw Error(Errc::NonFiniteValue, "op produced a non-finite value");
  Node node;
  node.grad = Tensor(value.shape);
  node.value = std::move(value);
  node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var{nodes_.size() - 1};
}

void Tape::backward(Var loss, double seed) {
  require(value(loss).size() == 1, "backward() needs a scalar loss");
  grad(loss).data[0] += seed;
  for (std::size_t i = loss.index + 1; i-- > 0;) {
    auto& node = nodes_[i];
    if (node.backward) node.backward(*this);
  }
  for (const auto& node : nodes_) {
    if (node.param && !node.param->grad.all_finite())
      throw Error(Errc::NonFiniteGradient, "gradient of '" + node.param->id + "' is not finite");
  }
}

Var matmul(Tape& t, Var a, Var b) {
  const Tensor& A = t.value(a);
  const Tensor& B = t.value(b);
  require(A.rank() == 2 && (B.rank() == 1 || B.rank() == 2) && A.shape[1] == B.shape[0],
          "matmul " + shape_str(A.shape) + " x " + shape_str(B.shape));
  const std::size_t m = A.shape[0], k = A.shape[1], n = B.rank() == 2 ? B.shape[1] : 1;
  Tensor C(B.rank() == 2 ? Shape{m, n} : Shape{m});
  if (n == 1) {
    // Matrix-vector product: one dot product per row.
    for (std::size_t i = 0; i < m; ++i) {
      const double* arow = &A.data[i * k];
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += arow[p] * B.data[p];
      C.data[i] = acc;
    }
  } else {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = &A.data[i * k];
    double* crow = &C.data[i * n];
    for (std::size_t p = 0; p < k; ++p) {
      const double av = arow[p];
      const double* brow = &B.data[p * n];
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
  }
  return t.record(std::move(C), [a, b, m, k, n, out = Var{t.size()}](Tape& tp) {
    const Tensor& dC = tp.grad(out);
    const Tensor& A = tp.value(a);
    const Tensor& B = tp.value(b);
    Tensor& dA = tp.grad(a);
    if (n == 1) {
      Tensor& dB = tp.grad(b);
      for (std::size_t i = 0; i < m; ++i) {
        const double g = dC.data[i];
        if (g == 0.0) continue;
        const double* arow = &A.data[i * k];
        double* darow = &dA.data[i * k];
        for (std::size_t p = 0; p < k; ++p) {
          darow[p] += g * B.data[p];
          dB.data[p] += g * arow[p];
        }
      }
      return;
    }
    for (std::size_t i = 0; i < m; ++i) {
      const double* dcrow = &dC.data[i * n];
      double* darow = &dA.data[i * k];
      for (std::size_t p = 0; p < k; ++p) {
        const double* brow = &B.data[p * n];
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += dcrow[j] * brow[j];
        darow[p] += acc;
      }
    }
    Tensor& dB = tp.grad(b);
    for (std::size_t i = 0; i < m; ++i) {
      const double* arow = &A.data[i * k];
      const double* dcrow = &dC.data[i * n];
      for (std::size_t p = 0; p < k; ++p) {
        const double av = arow[p];
        double* dbrow = &dB.data[p * n];
        for (std::size_t j = 0; j < n; ++j) dbrow[j] += av * dcrow[j];
      }
    }
  });
}

Var add(Tape& t, Var a, Var b) {
  const Tensor& A = t.value(a);
  const Tensor& B = t.value(b);
  require(A.shape == B.shape, "add " + shape_str(A.shape) + " + " + shape_str(B.shape));
  Tensor C = A;
  for (std::size_t i = 0; i < C.size(); ++i) C.data[i] += B.data[i];
  return t.record(std::move(C), [a, b, out = Var{t.size()}](Tape& tp) {
    accumulate(tp.grad(a), tp.grad(out));
    accumulate(tp.grad(b), tp.grad(out));
  });
}

Var sub(Tape& t, Var a, Var b) {
  const Tensor& A = t.value(a);
  const Tensor& B = t.value(b);
  require(A.shape == B.shape, "sub " + shape_str(A.shape) + " - " + shape_str(B.shape));
  Tensor C = A;
  for (std::size_t i = 0; i < C.size(); ++i) C.data[i] -= B.data[i];
  return t.record(std::move(C), [a, b, out = Var{t.size()}](Tape& tp) {
    accumulate(tp.grad(a), tp.grad(out));
    Tensor& dB = tp.grad(b);
    const Tensor& dC = tp.grad(out);
    for (std::size_t i = 0; i < dB.size(); ++i) dB.data[i] -= dC.data[i];
  });
}

Var mul(Tape& t, Var a, Var b) {
  const Tensor& A = t.value(a);
  const Tensor& B = t.value(b);
  require(A.shape == B.shape, "mul " + shape_str(A.shape) + " * " + shape_str(B.shape));
  Tensor C = A;
  for (std::size_t i = 0; i < C.size(); ++i) C.data[i] *= B.data[i];
  return t.record(std::move(C), [a, b, out = Var{t.size()}](Tape& tp) {
    const Tensor& dC = tp.grad(out);
    const Tensor& A = tp.value(a);
    const Tensor& B = tp.value(b);
    Tensor& dA = tp.grad(a);
    for (std::size_t i = 0; i < dA.size(); ++i) dA.data[i] += dC.data[i] * B.data[i];
    Tensor& dB = tp.grad(b);
    for (std::size_t i = 0; i < dB.size(); ++i) dB.data[i] += dC.data[i] * A.data[i];
  });
}

Var scale(Tape& t, Var a, double k) {
  Tensor C = t.value(a);
  for (auto& v : C.data) v *= k;
  return t.record(std::move(C), [a, k, out = Var{t.size()}](Tape& tp) {
    Tensor& dA = tp.grad(a);
    const Tensor& dC = tp.grad(out);
    for (std::size_t i = 0; i < dA.size(); ++i) dA.data[i] += k * dC.data[i];
  });
}

Var tanh(Tape& t, Var a) {
  Tensor C = t.value(a);
  for (auto& v : C.data) v = std::tanh(v);
  return t.record(std::move(C), [a, out = Var{t.size()}](Tape& tp) {
    const Tensor& y = tp.value(out);
    const Tensor& dy = tp.grad(out);
    Tensor& dA = tp.grad(a);
    for (std::size_t i = 0; i < dA.size(); ++i) dA.data[i] += dy.data[i] * (1.0 - y.data[i] * y.data[i]);
  });
}

Var sigmoid(Tape& t, Var a) {
  Tensor C = t.value(a);
  for (auto& v : C.data) v = v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
  return t.record(std::move(C), [a, out = Var{t.size()}](Tape& tp) {
    const Tensor& y = tp.value(out);
    const Tensor& dy = tp.grad(out);
    Tensor& dA = tp.grad(a);
    for (std::size_t i = 0; i < dA.size(); ++i) dA.data[i] += dy.data[i] * y.data[i] * (1.0 - y.data[i]);
  });
}

Var concat(Tape& t, std::span<const Var> parts, std::size_t axis) {
  require(!parts.empty(), "concat of nothing");
  const Shape& first = t.value(parts[0]).shape;
  require(axis < first.size(), "concat axis out of range");
  // Treat every part as [outer, width_i * inner] blocks.
  std::size_t outer = 1, inner = 1;
  for (std::size_t d = 0; d < axis; ++d) outer *= first[d];
  for (std::size_t d = axis + 1; d < first.size(); ++d) inner *= first[d];
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (auto p : parts) {
    const Shape& s = t.value(p).shape;
    require(s.size() == first.size(), "concat rank mismatch");
    for (std::size_t d = 0; d < s.size(); ++d)
      require(d == axis || s[d] == first[d], "concat " + shape_str(s) + " with " + shape_str(first));
    widths.push_back(s[axis] * inner);
    total += s[axis];
  }
  Shape out_shape = first;
  out_shape[axis] = total;
  Tensor C(out_shape);
  const std::size_t row = total * inner;
  for (std::size_t o = 0; o < outer; ++o) {
    std::size_t off = 0;
    for (std::size_t k = 0; k < parts.size(); ++k) {
      const Tensor& P = t.value(parts[k]);
      std::copy_n(&P.data[o * widths[k]], widths[k], &C.data[o * row + off]);
      off += widths[k];
    }
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return t.record(std::move(C), [inputs = std::move(inputs), widths, outer, row, out = Var{t.size()}](Tape& tp) {
    const Tensor& dC = tp.grad(out);
    for (std::size_t o = 0; o < outer; ++o) {
      std::size_t off = 0;
      for (std::size_t k = 0; k < inputs.size(); ++k) {
        Tensor& dP = tp.grad(inputs[k]);
        for (std::size_t i = 0; i < widths[k]; ++i) dP.data[o * widths[k] + i] += dC.data[o * row + off + i];
        off += widths[k];
      }
    }
  });
}

Var stack(Tape& t, std::span<const Var> rows) {
  require(!rows.empty(), "stack of nothing");
  const std::size_t len = t.value(rows[0]).size();
  for (auto r : rows) require(t.value(r).rank() == 1 && t.value(r).size() == len, "stack needs equal-length vectors");
  Tensor C(Shape{rows.size(), len});
  for (std::size_t i = 0; i < rows.size(); ++i) std::copy_n(t.value(rows[i]).data.data(), len, &C.data[i * len]);
  std::vector<Var> inputs(rows.begin(), rows.end());
  return t.record(std::move(C), [inputs = std::move(inputs), len, out = Var{t.size()}](Tape& tp) {
    const Tensor& dC = tp.grad(out);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      Tensor& dR = tp.grad(inputs[i]);
      for (std::size_t j = 0; j < len; ++j) dR.data[j] += dC.data[i * len + j];
    }
  });
}

Var slice(Tape& t, Var a, std::size_t begin, std::size_t end) {
  const Tensor& A = t.value(a);
  require(A.rank() >= 1 && begin < end && end <= A.shape[0],
          "slice [" + std::to_string(begin) + "," + std::to_string(end) + ") of " + shape_str(A.shape));
  const std::size_t inner = A.size() / A.shape[0];
  Shape s = A.shape;
  s[0] = end - begin;
  Tensor C(s);
  std::copy_n(&A.data[begin * inner], (end - begin) * inner, C.data.data());
  return t.record(std::move(C), [a, off = begin * inner, out = Var{t.size()}](Tape& tp) {
    const Tensor& dC = tp.grad(out);
    Tensor& dA = tp.grad(a);
    for (std::size_t i = 0; i < dC.size(); ++i) dA.data[off + i] += dC.data[i];
  });
}

Var row(Tape& t, Parameter& table, std::size_t r) {
  const Tensor& W = table.value;
  require(W.rank() == 2 && r < W.shape[0], "row " + std::to_string(r) + " of " + shape_str(W.shape));
  const std::size_t n = W.shape[1];
  Tensor C(Shape{n});
  std::copy_n(&W.data[r * n], n, C.data.data());
  return t.record(std::move(C), [&table, r, n, out = Var{t.size()}](Tape& tp) {
    const Tensor& dC = tp.grad(out);
    for (std::size_t j = 0; j < n; ++j) table.grad.data[r * n + j] += dC.data[j];
  });
}

Var pick(Tape& t, Var a, std::size_t i) {
  const Tensor& A = t.value(a);
  require(i < A.size(), "pick index out of range");
  return t.record(Tensor::scalar(A.data[i]),
                  [a, i, out = Var{t.size()}](Tape& tp) { tp.grad(a).data[i] += tp.grad(out).data[0]; });
}

Var sum(Tape& t, Var a) {
  const Tensor& A = t.value(a);
  double s = 0.0;
  for (double v : A.data) s += v;
  return t.record(Tensor::scalar(s), [a, out = Var{t.size()}](Tape& tp) {
    const double g = tp.grad(out).data[0];
    for (auto& v : tp.grad(a).data) v += g;
  });
}

Var log_sum_exp(Tape& t, Var a, std::size_t axis) {
  const Tensor& A = t.value(a);
  require(A.rank() >= 1 && axis < A.rank() && A.shape[axis] > 0, "log_sum_exp axis out of range");
  std::size_t outer = 1, inner = 1;
  for (std::size_t d = 0; d < axis; ++d) outer *= A.shape[d];
  for (std::size_t d = axis + 1; d < A.rank(); ++d) inner *= A.shape[d];
  const std::size_t n = A.shape[axis];
  Shape s;
  for (std::size_t d = 0; d < A.rank(); ++d)
    if (d != axis) s.push_back(A.shape[d]);
  Tensor C(s);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t in = 0; in < inner; ++in) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < n; ++k) mx = std::max(mx, A.data[(o * n + k) * inner + in]);
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += std::exp(A.data[(o * n + k) * inner + in] - mx);
      C.data[o * inner + in] = mx + std::log(acc);
    }
  }
  return t.record(std::move(C), [a, outer, inner, n, out = Var{t.size()}](Tape& tp) {
    const Tensor& A = tp.value(a);
    const Tensor& y = tp.value(out);
    const Tensor& dy = tp.grad(out);
    Tensor& dA = tp.grad(a);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t in = 0; in < inner; ++in)
        for (std::size_t k = 0; k < n; ++k) {
          const std::size_t idx = (o * n + k) * inner + in;
          dA.data[idx] += dy.data[o * inner + in] * std::exp(A.data[idx] - y.data[o * inner + in]);
        }
  });
}

Var dropout(Tape& t, Var a, double rate, Rng& rng, bool training) {
  if (!(rate >= 0.0 && rate < 1.0)) throw Error(Errc::ShapeMismatch, "dropout rate must be in [0, 1)");
  if (!training || rate == 0.0) return a;
  const double keep_scale = 1.0 / (1.0 - rate);
  Tensor mask(t.value(a).shape);
  for (auto& m : mask.data) m = rng.uniform() < rate ? 0.0 : keep_scale;
  Tensor C = t.value(a);
  for (std::size_t i = 0; i < C.size(); ++i) C.data[i] *= mask.data[i];
  return t.record(std::move(C), [a, mask = std::move(mask), out = Var{t.size()}](Tape& tp) {
    const Tensor& dC = tp.grad(out);
    Tensor& dA = tp.grad(a);
    for (std::size_t i = 0; i < dA.size(); ++i) dA.data[i] += dC.data[i] * mask.data[i];
  });
}

GradCheckResult grad_check(const std::function<Var(Tape&)>& loss, std::span<Parameter* const> params,
                           double epsilon) {
  for (auto* p : params) p->zero_grad();
  {
    Tape tape;
    const Var l = loss(tape);
    tape.backward(l);
  }
  std::vector<Tensor> analytic;
  for (auto* p : params) analytic.push_back(p->grad);

  auto eval = [&] {
    Tape tape;
    return tape.value(loss(tape)).item();
  };

  GradCheckResult result;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter& p = *params[k];
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double saved = p.value.data[i];
      p.value.data[i] = saved + epsilon;
      const double up = eval();
      p.value.data[i] = saved - epsilon;
      const double down = eval();
      p.value.data[i] = saved;
      const double numeric = (up - down) / (2.0 * epsilon);
      const double a = analytic[k].data[i];
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-6});
      ++result.coordinates;
      if (rel > result.max_rel_error || result.worst_param.empty()) {
        result.max_rel_error = rel;
        result.worst_param = p.id;
        result.worst_index = i;
        result.analytic = a;
        result.numeric = numeric;
      }
    }
  }
  for (auto* p : params) p->zero_grad();
  return result;
}

}  // namespace morphotag::diff
