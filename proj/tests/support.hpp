#pragma once

// Shared helpers for the test programs: fixture paths, random CRF
// instances and brute-force enumeration oracles that share no code with
// the library's dynamic programs.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "morphotag/corpus.hpp"
#include "morphotag/crf.hpp"
#include "morphotag/diff.hpp"
#include "morphotag/eval.hpp"
#include "morphotag/rng.hpp"
#include "morphotag/text.hpp"

namespace testing {

inline std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    out.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(MORPHOTAG_FIXTURES) / name; }

struct CrfInstance {
  morphotag::diff::Tensor emissions;  // [L, K]
  morphotag::crf::Weights weights;
};

// Real-valued scores in [-2, 2), or small integers in [-2, 2] when `integer`
// (so that optimal paths tie exactly).
inline CrfInstance random_instance(morphotag::Rng& rng, std::size_t L, std::size_t K, bool integer = false) {
  auto draw = [&] { return integer ? static_cast<double>(rng.below(5)) - 2.0 : rng.uniform(-2.0, 2.0); };
  CrfInstance inst;
  inst.emissions = morphotag::diff::Tensor({L, K});
  for (auto& v : inst.emissions.data) v = draw();
  inst.weights = morphotag::crf::Weights::zeros(K);
  for (auto& v : inst.weights.transitions.data) v = draw();
  for (auto& v : inst.weights.start.data) v = draw();
  for (auto& v : inst.weights.stop.data) v = draw();
  return inst;
}

// Enumerates all K^L label sequences in an order where index 0 varies
// slowest, i.e. lexicographic order.
template <typename F>
void for_each_sequence(std::size_t L, std::size_t K, F&& f) {
  std::vector<std::size_t> y(L, 0);
  while (true) {
    f(y);
    std::size_t i = L;
    while (i > 0) {
      --i;
      if (++y[i] < K) break;
      y[i] = 0;
      if (i == 0) return;
    }
    if (L == 0) return;
  }
}

inline double brute_score(const CrfInstance& inst, const std::vector<std::size_t>& y) {
  const auto& e = inst.emissions;
  const auto& w = inst.weights;
  const std::size_t K = e.cols();
  double s = w.start[y.front()] + w.stop[y.back()];
  for (std::size_t t = 0; t < y.size(); ++t) s += e.data[t * K + y[t]];
  for (std::size_t t = 0; t + 1 < y.size(); ++t) s += w.transitions.data[y[t] * K + y[t + 1]];
  return s;
}

struct BruteForce {
  double log_z = 0.0;
  std::vector<std::size_t> best;
  double best_score = -std::numeric_limits<double>::infinity();
  std::vector<double> unary;  // [L*K] marginals
};

// True when a comes before b reading from the last position backwards.
inline bool reverse_lex_less(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  return std::lexicographical_compare(a.rbegin(), a.rend(), b.rbegin(), b.rend());
}

inline BruteForce brute_force(const CrfInstance& inst) {
  const std::size_t L = inst.emissions.rows(), K = inst.emissions.cols();
  std::vector<std::pair<std::vector<std::size_t>, double>> all;
  for_each_sequence(L, K, [&](const std::vector<std::size_t>& y) { all.emplace_back(y, brute_score(inst, y)); });

  BruteForce out;
  double mx = -std::numeric_limits<double>::infinity();
  for (const auto& [y, s] : all) mx = std::max(mx, s);
  double total = 0.0;
  for (const auto& [y, s] : all) total += std::exp(s - mx);
  out.log_z = mx + std::log(total);

  for (const auto& [y, s] : all) {
    if (s > out.best_score || (s == out.best_score && reverse_lex_less(y, out.best))) {
      out.best_score = s;
      out.best = y;
    }
  }
  out.unary.assign(L * K, 0.0);
  for (const auto& [y, s] : all) {
    const double p = std::exp(s - out.log_z);
    for (std::size_t t = 0; t < L; ++t) out.unary[t * K + y[t]] += p;
  }
  return out;
}

struct ScorerCase {
  std::string name;
  morphotag::LabelSequences gold, predicted;
};

// tests/fixtures/scorer_cases.txt: "### name" headers, `surface gold pred`
// token lines, blank lines between sentences.
inline std::vector<ScorerCase> load_scorer_cases() {
  std::vector<ScorerCase> cases;
  bool fresh = true;
  for (auto line : split_lines(morphotag::text::read_file(fixture("scorer_cases.txt")))) {
    if (line.rfind("### ", 0) == 0) {
      cases.push_back({line.substr(4), {}, {}});
      fresh = true;
    } else if (line.empty() || line[0] == '#') {
      fresh = true;
    } else {
      const auto cols = morphotag::text::split_ws(line);
      auto& c = cases.back();
      if (fresh) {
        c.gold.emplace_back();
        c.predicted.emplace_back();
        fresh = false;
      }
      c.gold.back().push_back(*morphotag::parse_label(cols.at(1)));
      c.predicted.back().push_back(*morphotag::parse_label(cols.at(2)));
    }
  }
  return cases;
}

// Frozen reference output, keyed by case name.
inline std::vector<std::pair<std::string, std::vector<std::string>>> load_scorer_expected() {
  std::vector<std::pair<std::string, std::vector<std::string>>> out;
  for (auto line : split_lines(morphotag::text::read_file(fixture("scorer_expected.txt")))) {
    if (line.rfind("### ", 0) == 0)
      out.push_back({line.substr(4), {}});
    else if (!line.empty())
      out.back().second.push_back(line);
  }
  return out;
}

inline std::string score_line(const std::string& key, const morphotag::Scores& s) {
  using morphotag::format_percent;
  return key + " gold=" + std::to_string(s.gold) + " predicted=" + std::to_string(s.predicted) +
         " correct=" + std::to_string(s.correct) + " precision=" + format_percent(s.precision()) +
         " recall=" + format_percent(s.recall()) + " f1=" + format_percent(s.f1());
}

// The same five lines the reference script wrote for one case.
inline std::vector<std::string> report_lines(const morphotag::EvalReport& r) {
  std::vector<std::string> out{score_line("overall", r.overall)};
  for (auto t : morphotag::kEntityTypes) out.push_back(score_line(std::string(morphotag::entity_type_name(t)), r.of(t)));
  return out;
}

}  // namespace testing
