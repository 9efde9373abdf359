#pragma once

// Linear-chain CRF with explicit start and stop scores.
//
//   score(y) = start[y0] + sum_t emis[t, y_t] + sum_t trans[y_t, y_t+1] + stop[y_L-1]
//
// Emissions are [L, K] tensors; transitions [K, K] indexed (from, to).

#include <optional>
#include <vector>

#include "morphotag/diff.hpp"

namespace morphotag::crf {

struct Weights {
  diff::Tensor transitions;  // [K, K]
  diff::Tensor start;        // [K]
  diff::Tensor stop;         // [K]

  static Weights zeros(std::size_t k);
  std::size_t tags() const noexcept { return start.size(); }
};

// -inf on transitions that break BIO over the nine labels: start -> I-X and
// Y -> I-X for Y not in {B-X, I-X}. Zero elsewhere.
struct Mask {
  diff::Tensor transitions;
  diff::Tensor start;
};
Mask bio_mask();

// Adds the mask to the weights.
Weights apply(const Weights& w, const Mask* mask);

double sequence_score(const diff::Tensor& emissions, const std::vector<std::size_t>& labels, const Weights& w);
double log_partition(const diff::Tensor& emissions, const Weights& w);
double neg_log_likelihood(const diff::Tensor& emissions, const std::vector<std::size_t>& gold, const Weights& w);

struct Marginals {
  diff::Tensor unary;     // [L, K], p(y_t = k)
  diff::Tensor pairwise;  // [L-1, K*K], p(y_t = i, y_t+1 = j) at i*K + j
  double log_z = 0.0;
};
Marginals marginals(const diff::Tensor& emissions, const Weights& w);

struct Decoded {
  std::vector<std::size_t> labels;
  double score = 0.0;
};
// Exact max-score sequence. Ties go to the lower tag index at every
// backpointer and at the final tag, which makes the result the
// reverse-lexicographically smallest optimal sequence.
Decoded viterbi(const diff::Tensor& emissions, const Weights& w);

// Parameter ids used for the transition scores.
inline constexpr const char* kTransitionsId = "crf.transitions";
inline constexpr const char* kStartId = "crf.start";
inline constexpr const char* kStopId = "crf.stop";

// Registers transitions (Glorot uniform) and zero start/stop vectors.
void register_params(diff::ParameterSet& params, std::size_t tags, Rng& rng);
Weights weights_from(const diff::ParameterSet& params);

// Negative log-likelihood of `gold` as a tape op. Gradients flow to the
// emissions and the three weight inputs.
diff::Var nll(diff::Tape& tape, diff::Var emissions, diff::Var transitions, diff::Var start, diff::Var stop,
              const std::vector<std::size_t>& gold, const Mask* mask = nullptr);

}  // namespace morphotag::crf
