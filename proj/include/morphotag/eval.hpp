#pragma once

// Entity-level exact-match scoring (conlleval span semantics) and the
// token-level confusion matrix.

#include <array>
#include <string>
#include <vector>

#include "morphotag/corpus.hpp"

namespace morphotag {

struct Scores {
  std::size_t gold = 0;
  std::size_t predicted = 0;
  std::size_t correct = 0;

  // Percentages in [0, 100]; 0 when the denominator is 0.
  double precision() const noexcept;
  double recall() const noexcept;
  double f1() const noexcept;
};

// 2PR / (P + R), or 0 when P + R == 0.
double f1_score(double precision, double recall) noexcept;

struct EvalReport {
  Scores overall;
  std::array<Scores, kEntityTypeCount> per_type{};  // indexed by EntityType

  const Scores& of(EntityType t) const noexcept { return per_type[static_cast<std::size_t>(t)]; }
};

using LabelSequences = std::vector<std::vector<Label>>;

EvalReport score(const LabelSequences& gold, const LabelSequences& predicted);
EvalReport score(const Corpus& gold, const LabelSequences& predicted);

// counts[pred][gold]: rows are predictions, columns the true labels.
struct ConfusionMatrix {
  std::array<std::array<std::size_t, kLabelCount>, kLabelCount> counts{};

  std::size_t total() const noexcept;
  std::size_t at(Label predicted, Label gold) const noexcept {
    return counts[static_cast<std::size_t>(predicted)][static_cast<std::size_t>(gold)];
  }
  // Header row and column hold the label names.
  std::string to_csv() const;
};

ConfusionMatrix confusion(const LabelSequences& gold, const LabelSequences& predicted);

// Aligned table: one row per entity type plus the overall row, scores with
// two decimals.
std::string format_report(const EvalReport& report);
// Machine-readable `key=value` lines, keys prefixed with `prefix`.
std::string report_kv(const EvalReport& report, const std::string& prefix = "");

std::string format_percent(double v);

LabelSequences gold_labels(const Corpus& corpus);

}  // namespace morphotag
