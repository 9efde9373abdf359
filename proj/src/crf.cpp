#include "morphotag/crf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "morphotag/corpus.hpp"
#include "morphotag/error.hpp"
#include "morphotag/init.hpp"

namespace morphotag::crf {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double lse(const double* v, std::size_t n) {
  double mx = kNegInf;
  for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, v[i]);
  if (mx == kNegInf) return kNegInf;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::exp(v[i] - mx);
  return mx + std::log(acc);
}

void check_shapes(const diff::Tensor& emissions, const Weights& w) {
  const std::size_t k = w.tags();
  if (emissions.rank() != 2 || emissions.shape[0] == 0 || emissions.shape[1] != k)
    throw Error(Errc::ShapeMismatch, "emissions " + diff::shape_str(emissions.shape) + " for " +
                                         std::to_string(k) + " tags");
  if (w.transitions.shape != diff::Shape{k, k} || w.stop.size() != k)
    throw Error(Errc::ShapeMismatch, "transition weights do not match tag count");
}

// alpha[t*K + j]: log-sum of scores of all prefixes ending in tag j at t.
std::vector<double> forward(const diff::Tensor& e, const Weights& w) {
  const std::size_t L = e.shape[0], K = e.shape[1];
  std::vector<double> alpha(L * K);
  std::vector<double> buf(K);
  for (std::size_t j = 0; j < K; ++j) alpha[j] = w.start[j] + e.at(0, j);
  for (std::size_t t = 1; t < L; ++t) {
    for (std::size_t j = 0; j < K; ++j) {
      for (std::size_t i = 0; i < K; ++i) buf[i] = alpha[(t - 1) * K + i] + w.transitions.at(i, j);
      alpha[t * K + j] = lse(buf.data(), K) + e.at(t, j);
    }
  }
  return alpha;
}

// beta[t*K + i]: log-sum of scores of all suffixes after tag i at t, stop included.
std::vector<double> backward(const diff::Tensor& e, const Weights& w) {
  const std::size_t L = e.shape[0], K = e.shape[1];
  std::vector<double> beta(L * K);
  std::vector<double> buf(K);
  for (std::size_t i = 0; i < K; ++i) beta[(L - 1) * K + i] = w.stop[i];
  for (std::size_t t = L - 1; t-- > 0;) {
    for (std::size_t i = 0; i < K; ++i) {
      for (std::size_t j = 0; j < K; ++j) buf[j] = w.transitions.at(i, j) + e.at(t + 1, j) + beta[(t + 1) * K + j];
      beta[t * K + i] = lse(buf.data(), K);
    }
  }
  return beta;
}

double final_lse(const std::vector<double>& alpha, const Weights& w, std::size_t L) {
  const std::size_t K = w.tags();
  std::vector<double> buf(K);
  for (std::size_t j = 0; j < K; ++j) buf[j] = alpha[(L - 1) * K + j] + w.stop[j];
  return lse(buf.data(), K);
}

}  // namespace

Weights Weights::zeros(std::size_t k) {
  return Weights{diff::Tensor(diff::Shape{k, k}), diff::Tensor(diff::Shape{k}), diff::Tensor(diff::Shape{k})};
}

Mask bio_mask() {
  Mask mask{diff::Tensor(diff::Shape{kLabelCount, kLabelCount}), diff::Tensor(diff::Shape{kLabelCount})};
  for (std::size_t to = 0; to < kLabelCount; ++to) {
    const auto to_label = static_cast<Label>(to);
    if (!is_inside(to_label)) continue;
    mask.start[to] = kNegInf;
    for (std::size_t from = 0; from < kLabelCount; ++from) {
      const auto from_label = static_cast<Label>(from);
      const bool continues = from_label != Label::O && entity_of(from_label) == entity_of(to_label);
      if (!continues) mask.transitions.at(from, to) = kNegInf;
    }
  }
  return mask;
}

Weights apply(const Weights& w, const Mask* mask) {
  if (!mask) return w;
  if (mask->transitions.shape != w.transitions.shape)
    throw Error(Errc::ShapeMismatch, "BIO mask needs " + std::to_string(kLabelCount) + " tags");
  Weights out = w;
  for (std::size_t i = 0; i < out.transitions.size(); ++i) out.transitions.data[i] += mask->transitions.data[i];
  for (std::size_t i = 0; i < out.start.size(); ++i) out.start.data[i] += mask->start.data[i];
  return out;
}

double sequence_score(const diff::Tensor& emissions, const std::vector<std::size_t>& labels, const Weights& w) {
  check_shapes(emissions, w);
  const std::size_t L = emissions.shape[0];
  if (labels.size() != L)
    throw Error(Errc::LengthMismatch, std::to_string(labels.size()) + " labels for " + std::to_string(L) + " tokens");
  for (auto y : labels)
    if (y >= w.tags()) throw Error(Errc::ShapeMismatch, "label index out of range");
  double s = w.start[labels[0]] + w.stop[labels[L - 1]];
  for (std::size_t t = 0; t < L; ++t) s += emissions.at(t, labels[t]);
  for (std::size_t t = 0; t + 1 < L; ++t) s += w.transitions.at(labels[t], labels[t + 1]);
  return s;
}

double log_partition(const diff::Tensor& emissions, const Weights& w) {
  check_shapes(emissions, w);
  return final_lse(forward(emissions, w), w, emissions.shape[0]);
}

double neg_log_likelihood(const diff::Tensor& emissions, const std::vector<std::size_t>& gold, const Weights& w) {
  const double s = sequence_score(emissions, gold, w);
  // log Z >= score(gold) exactly; rounding can leave a few ulps below zero.
  return std::max(0.0, log_partition(emissions, w) - s);
}

Marginals marginals(const diff::Tensor& emissions, const Weights& w) {
  check_shapes(emissions, w);
  const std::size_t L = emissions.shape[0], K = emissions.shape[1];
  const auto alpha = forward(emissions, w);
  const auto beta = backward(emissions, w);
  Marginals m;
  m.log_z = final_lse(alpha, w, L);
  m.unary = diff::Tensor(diff::Shape{L, K});
  for (std::size_t t = 0; t < L; ++t)
    for (std::size_t j = 0; j < K; ++j) m.unary.at(t, j) = std::exp(alpha[t * K + j] + beta[t * K + j] - m.log_z);
  m.pairwise = diff::Tensor(diff::Shape{L > 1 ? L - 1 : 0, K * K});
  for (std::size_t t = 0; t + 1 < L; ++t)
    for (std::size_t i = 0; i < K; ++i)
      for (std::size_t j = 0; j < K; ++j)
        m.pairwise.at(t, i * K + j) = std::exp(alpha[t * K + i] + w.transitions.at(i, j) + emissions.at(t + 1, j) +
                                               beta[(t + 1) * K + j] - m.log_z);
  return m;
}

Decoded viterbi(const diff::Tensor& emissions, const Weights& w) {
  check_shapes(emissions, w);
  const std::size_t L = emissions.shape[0], K = emissions.shape[1];
  std::vector<double> delta(L * K);
  std::vector<std::size_t> back(L * K, 0);
  for (std::size_t j = 0; j < K; ++j) delta[j] = w.start[j] + emissions.at(0, j);
  for (std::size_t t = 1; t < L; ++t) {
    for (std::size_t j = 0; j < K; ++j) {
      std::size_t best = 0;
      double best_score = delta[(t - 1) * K] + w.transitions.at(0, j);
      for (std::size_t i = 1; i < K; ++i) {
        const double s = delta[(t - 1) * K + i] + w.transitions.at(i, j);
        if (s > best_score) {
          best_score = s;
          best = i;
        }
      }
      delta[t * K + j] = best_score + emissions.at(t, j);
      back[t * K + j] = best;
    }
  }
  std::size_t last = 0;
  double best_score = delta[(L - 1) * K] + w.stop[0];
  for (std::size_t j = 1; j < K; ++j) {
    const double s = delta[(L - 1) * K + j] + w.stop[j];
    if (s > best_score) {
      best_score = s;
      last = j;
    }
  }
  Decoded out;
  out.labels.resize(L);
  out.labels[L - 1] = last;
  for (std::size_t t = L - 1; t > 0; --t) out.labels[t - 1] = back[t * K + out.labels[t]];
  out.score = best_score;
  return out;
}

void register_params(diff::ParameterSet& params, std::size_t tags, Rng& rng) {
  params.add(kTransitionsId, glorot_uniform(tags, tags, rng));
  params.add(kStartId, diff::Tensor(diff::Shape{tags}));
  params.add(kStopId, diff::Tensor(diff::Shape{tags}));
}

Weights weights_from(const diff::ParameterSet& params) {
  return Weights{params.get(kTransitionsId).value, params.get(kStartId).value, params.get(kStopId).value};
}

diff::Var nll(diff::Tape& tape, diff::Var emissions, diff::Var transitions, diff::Var start, diff::Var stop,
              const std::vector<std::size_t>& gold, const Mask* mask) {
  const diff::Tensor& e = tape.value(emissions);
  const Weights w = apply(Weights{tape.value(transitions), tape.value(start), tape.value(stop)}, mask);
  const double gold_score = sequence_score(e, gold, w);
  if (!std::isfinite(gold_score))
    throw Error(Errc::NonFiniteValue, "gold sequence uses a masked transition");
  const double loss = std::max(0.0, log_partition(e, w) - gold_score);

  return tape.record(diff::Tensor::scalar(loss), [=, out = diff::Var{tape.size()}](diff::Tape& tp) {
    const double g = tp.grad(out).data[0];
    const diff::Tensor& em = tp.value(emissions);
    const Weights wt = apply(Weights{tp.value(transitions), tp.value(start), tp.value(stop)}, mask);
    const Marginals m = marginals(em, wt);
    const std::size_t L = em.shape[0], K = em.shape[1];

    diff::Tensor& de = tp.grad(emissions);
    for (std::size_t t = 0; t < L; ++t)
      for (std::size_t j = 0; j < K; ++j) de.at(t, j) += g * (m.unary.at(t, j) - (gold[t] == j ? 1.0 : 0.0));

    diff::Tensor& dtrans = tp.grad(transitions);
    for (std::size_t t = 0; t + 1 < L; ++t) {
      for (std::size_t ij = 0; ij < K * K; ++ij) dtrans.data[ij] += g * m.pairwise.at(t, ij);
      dtrans.data[gold[t] * K + gold[t + 1]] -= g;
    }
    diff::Tensor& dstart = tp.grad(start);
    diff::Tensor& dstop = tp.grad(stop);
    for (std::size_t j = 0; j < K; ++j) {
      dstart.data[j] += g * m.unary.at(0, j);
      dstop.data[j] += g * m.unary.at(L - 1, j);
    }
    dstart.data[gold[0]] -= g;
    dstop.data[gold[L - 1]] -= g;
  });
}

}  // namespace morphotag::crf
