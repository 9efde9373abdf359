#include "morphotag/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <tuple>

#include "morphotag/error.hpp"

namespace morphotag {

double Scores::precision() const noexcept {
  return predicted == 0 ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(predicted);
}

double Scores::recall() const noexcept {
  return gold == 0 ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(gold);
}

double Scores::f1() const noexcept { return f1_score(precision(), recall()); }

double f1_score(double precision, double recall) noexcept {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

EvalReport score(const LabelSequences& gold, const LabelSequences& predicted) {
  if (gold.size() != predicted.size())
    throw Error(Errc::LengthMismatch, std::to_string(predicted.size()) + " predicted sentences for " +
                                          std::to_string(gold.size()) + " gold sentences");
  EvalReport report;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].size() != predicted[s].size())
      throw Error(Errc::LengthMismatch, "sentence " + std::to_string(s) + ": " + std::to_string(predicted[s].size()) +
                                            " predicted labels for " + std::to_string(gold[s].size()) + " tokens");
    const auto gold_spans = extract_spans(gold[s]);
    const auto pred_spans = extract_spans(predicted[s]);
    auto key = [](const EntitySpan& e) { return std::tuple(e.start, e.end, e.type); };
    std::set<std::tuple<std::size_t, std::size_t, EntityType>> gold_set;
    for (const auto& e : gold_spans) {
      gold_set.insert(key(e));
      ++report.per_type[static_cast<std::size_t>(e.type)].gold;
    }
    for (const auto& e : pred_spans) {
      auto& t = report.per_type[static_cast<std::size_t>(e.type)];
      ++t.predicted;
      if (gold_set.count(key(e))) ++t.correct;
    }
  }
  for (const auto& t : report.per_type) {
    report.overall.gold += t.gold;
    report.overall.predicted += t.predicted;
    report.overall.correct += t.correct;
  }
  return report;
}

LabelSequences gold_labels(const Corpus& corpus) {
  LabelSequences out;
  out.reserve(corpus.sentences.size());
  for (const auto& s : corpus.sentences) out.push_back(s.labels());
  return out;
}

EvalReport score(const Corpus& gold, const LabelSequences& predicted) { return score(gold_labels(gold), predicted); }

std::size_t ConfusionMatrix::total() const noexcept {
  std::size_t n = 0;
  for (const auto& row : counts)
    for (auto c : row) n += c;
  return n;
}

std::string ConfusionMatrix::to_csv() const {
  std::string out = "predicted\\gold";
  for (std::size_t g = 0; g < kLabelCount; ++g) {
    out += ',';
    out += label_name(static_cast<Label>(g));
  }
  out += '\n';
  for (std::size_t p = 0; p < kLabelCount; ++p) {
    out += label_name(static_cast<Label>(p));
    for (std::size_t g = 0; g < kLabelCount; ++g) out += ',' + std::to_string(counts[p][g]);
    out += '\n';
  }
  return out;
}

ConfusionMatrix confusion(const LabelSequences& gold, const LabelSequences& predicted) {
  if (gold.size() != predicted.size()) throw Error(Errc::LengthMismatch, "sentence counts differ");
  ConfusionMatrix m;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].size() != predicted[s].size())
      throw Error(Errc::LengthMismatch, "sentence " + std::to_string(s) + " lengths differ");
    for (std::size_t i = 0; i < gold[s].size(); ++i)
      ++m.counts[static_cast<std::size_t>(predicted[s][i])][static_cast<std::size_t>(gold[s][i])];
  }
  return m;
}

std::string format_percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string format_report(const EvalReport& report) {
  char line[160];
  std::string out;
  std::snprintf(line, sizeof line, "%-10s %9s %9s %9s %7s %7s %7s\n", "entity", "precision", "recall", "f1", "gold",
                "pred", "correct");
  out += line;
  auto row = [&](std::string_view name, const Scores& s) {
    std::snprintf(line, sizeof line, "%-10.*s %9.2f %9.2f %9.2f %7zu %7zu %7zu\n", static_cast<int>(name.size()),
                  name.data(), s.precision(), s.recall(), s.f1(), s.gold, s.predicted, s.correct);
    out += line;
  };
  for (auto t : kEntityTypes) row(entity_type_name(t), report.of(t));
  row("overall", report.overall);
  return out;
}

std::string report_kv(const EvalReport& report, const std::string& prefix) {
  std::string out;
  auto emit = [&](const std::string& name, const Scores& s) {
    out += prefix + name + ".precision=" + format_percent(s.precision()) + '\n';
    out += prefix + name + ".recall=" + format_percent(s.recall()) + '\n';
    out += prefix + name + ".f1=" + format_percent(s.f1()) + '\n';
    out += prefix + name + ".gold=" + std::to_string(s.gold) + '\n';
    out += prefix + name + ".predicted=" + std::to_string(s.predicted) + '\n';
    out += prefix + name + ".correct=" + std::to_string(s.correct) + '\n';
  };
  emit("overall", report.overall);
  for (auto t : kEntityTypes) emit(std::string(entity_type_name(t)), report.of(t));
  return out;
}

}  // namespace morphotag
