// Acceptance gates. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. An optional argument runs only the criteria whose
// name contains it.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "morphotag/ablation.hpp"
#include "morphotag/checkpoint.hpp"
#include "morphotag/error.hpp"
#include "morphotag/synthetic.hpp"
#include "morphotag/train.hpp"
#include "support.hpp"

using namespace morphotag;
using namespace morphotag::diff;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome crf_oracle() {
  Rng rng(2024);
  double worst = 0;
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t L = 1 + rng.below(5), K = 1 + rng.below(4);
    // Every fourth instance uses integer scores so that optimal paths tie.
    const auto inst = testing::random_instance(rng, L, K, trial % 4 == 0);
    const auto bf = testing::brute_force(inst);
    worst = std::max(worst, std::abs(crf::log_partition(inst.emissions, inst.weights) - bf.log_z));
    if (crf::viterbi(inst.emissions, inst.weights).labels != bf.best) ++mismatches;
  }
  return {worst <= 1e-8 && mismatches == 0, fmt("max |dlogZ| = %.3g, viterbi mismatches = %zu", worst, mismatches)};
}

Outcome gradient_gate() {
  Corpus c;
  Sentence s;
  s.tokens = {{"Христо", "Npmsi", Label::B_PER, 0}, {"Стоичков", "Hmsi", Label::I_PER, 0},
              {"пристигна", "Vpptf-o3s", Label::O, 0}};
  c.sentences.push_back(s);
  ModelConfig config;
  config.word_dim = 8;
  config.char_hidden = 4;
  config.word_hidden = 6;
  config.char_embed_dim = 5;
  config.scheme.pos = SchemeId::POS3_11;
  config.scheme.morph = true;
  const auto vectors = synthetic::random_vectors({&c}, 8, 5);
  Model model(config, vectors, CharVocabulary::build(c), TagsetMapping::defaults(), std::nullopt, 42);
  auto params = model.trainable();
  const auto r = grad_check([&](Tape& t) { return model.loss(t, s); }, params, 1e-5);
  return {r.max_rel_error <= 1e-4, fmt("max rel error = %.3g at %s[%zu] over %zu coordinates", r.max_rel_error,
                                       r.worst_param.c_str(), r.worst_index, r.coordinates)};
}

Outcome emission_identity() {
  Rng rng(77);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t L = 1 + rng.below(4), K = 1 + rng.below(3);
    const auto inst = testing::random_instance(rng, L, K);
    std::vector<std::size_t> gold(L);
    for (auto& g : gold) g = rng.below(K);
    ParameterSet ps;
    auto& E = ps.add("E", inst.emissions);
    auto& T = ps.add("T", inst.weights.transitions);
    auto& S = ps.add("S", inst.weights.start);
    auto& P = ps.add("P", inst.weights.stop);
    Tape t;
    t.backward(crf::nll(t, t.param(E), t.param(T), t.param(S), t.param(P), gold));
    const auto bf = testing::brute_force(inst);
    for (std::size_t i = 0; i < L; ++i)
      for (std::size_t k = 0; k < K; ++k)
        worst = std::max(worst, std::abs(E.grad.at(i, k) - (bf.unary[i * K + k] - (gold[i] == k ? 1.0 : 0.0))));
  }
  return {worst <= 1e-8, fmt("max deviation = %.3g over 100 instances", worst)};
}

struct OverfitRun {
  TrainResult result;
  std::string log;
};

OverfitRun overfit_run(std::size_t max_epochs) {
  const auto corpus = synthetic::planted_corpus(50, 42);
  const auto vectors = synthetic::random_vectors({&corpus}, 300, 42);
  ModelConfig config;
  config.word_dim = 300;
  Model model(config, vectors, CharVocabulary::build(corpus), TagsetMapping::defaults(), std::nullopt, 42);
  TrainConfig tc;
  tc.max_epochs = max_epochs;
  tc.patience = max_epochs;
  OverfitRun run;
  run.result = train(model, corpus, corpus, tc, [&](const EpochLog& e) { run.log += e.to_kv() + "\n"; });
  return run;
}

Outcome overfit() {
  const auto full = overfit_run(200);
  const bool reached = full.result.best_dev_f1 == 100.0;
  // Same seed, shorter budget: the shared prefix of the trajectory must match.
  const auto again = overfit_run(20);
  const bool same = full.log.compare(0, again.log.size(), again.log) == 0;
  return {reached && same, fmt("train F1 = %.2f first reached at epoch %zu; rerun prefix %s",
                               full.result.best_dev_f1, full.result.best_epoch, same ? "identical" : "differs")};
}

Outcome ablation_effect() {
  const auto train_c = synthetic::tag_decided_corpus(150, 11);
  const auto dev_c = synthetic::tag_decided_corpus(60, 12);
  const auto vectors = synthetic::random_vectors({&train_c, &dev_c}, 50, 13);
  const auto mapping = TagsetMapping::defaults();
  AblationData data{&train_c, &dev_c, nullptr, &vectors, &mapping, nullptr};
  const auto ladder = AblationSpec::component_ladder();
  AblationSpec spec{"words-vs-pos11", AblationSpec::Layout::ComponentLadder, {ladder.cells[0], ladder.cells[4]}};
  ModelConfig base;
  base.word_dim = 50;
  TrainConfig tc;
  tc.max_epochs = 40;
  tc.patience = 40;
  const auto out = run_ablation(spec, data, base, tc);
  if (!out[0].report || !out[1].report) return {false, "cell failed: " + out[0].error + out[1].error};
  const double words = out[0].report->overall.f1(), pos = out[1].report->overall.f1();
  return {pos >= words + 20.0, fmt("dev F1 words-only = %.2f, POS11 = %.2f, gap = %.2f (epochs %zu/%zu)", words, pos,
                                   pos - words, out[0].epochs, out[1].epochs)};
}

Outcome scorer() {
  const auto cases = testing::load_scorer_cases();
  const auto expected = testing::load_scorer_expected();
  std::size_t ok = 0;
  for (std::size_t i = 0; i < cases.size() && i < expected.size(); ++i)
    ok += expected[i].first == cases[i].name &&
          testing::report_lines(score(cases[i].gold, cases[i].predicted)) == expected[i].second;
  return {cases.size() == 12 && expected.size() == 12 && ok == 12, fmt("%zu/%zu cases match", ok, cases.size())};
}

Outcome scheme_invariants() {
  const Partition chain[] = {Partition::POS2, Partition::POS3, Partition::POS4, Partition::POS5, Partition::POS11};
  std::size_t violations = 0;
  // Finer partitions never put two letters together that a coarser one separates.
  for (std::size_t c = 0; c + 1 < std::size(chain); ++c)
    for (char a : kPosLetters)
      for (char b : kPosLetters) {
        const auto pa = *pos_from_letter(a), pb = *pos_from_letter(b);
        if (pos_group(pa, chain[c + 1]) == pos_group(pb, chain[c + 1]) && pos_group(pa, chain[c]) != pos_group(pb, chain[c]))
          ++violations;
      }
  const std::pair<SchemeId, std::size_t> dims[] = {{SchemeId::POS2, 2},  {SchemeId::POS3, 3},     {SchemeId::POS4, 4},
                                                   {SchemeId::POS5, 5},  {SchemeId::POS11, 11},   {SchemeId::POS3_11, 14},
                                                   {SchemeId::POS4_11, 15}};
  std::size_t wrong = 0;
  for (const auto& [id, d] : dims) {
    FeatureScheme s;
    s.pos = id;
    wrong += scheme_dim(s) != d;
    s.morph = true;
    wrong += scheme_dim(s) != d + 11;
    // By construction: the one-hot blocks of an actual vector have that length.
    const auto tag = parse_tag("Npmsi");
    wrong += grammatical_vector(&tag, s, "София").size() != d + 11;
  }
  return {violations == 0 && wrong == 0, fmt("refinement violations = %zu, dim mismatches = %zu", violations, wrong)};
}

Outcome f1_arithmetic() {
  const double f = f1_score(93.31, 91.12);
  return {std::abs(f - 92.20) <= 0.01, fmt("F1(93.31, 91.12) = %.4f", f)};
}

Outcome checkpoint_round_trip() {
  const auto train_c = synthetic::planted_corpus(20, 7);
  const auto dev_c = synthetic::planted_corpus(8, 8);
  const auto vectors = synthetic::random_vectors({&train_c, &dev_c}, 16, 9);
  ModelConfig config;
  config.word_dim = 16;
  config.char_embed_dim = 5;
  config.char_hidden = 6;
  config.word_hidden = 8;
  config.scheme.pos = SchemeId::POS3_11;
  config.scheme.morph = true;
  Model model(config, vectors, CharVocabulary::build(train_c), TagsetMapping::defaults(), std::nullopt, 42);
  TrainConfig tc;
  tc.max_epochs = 3;
  const auto r = train(model, train_c, dev_c, tc);
  const auto path = std::filesystem::temp_directory_path() / "morphotag_acceptance.ckpt";
  save_checkpoint(r.best, path);
  const auto first = text::read_file(path);
  save_checkpoint(load_checkpoint(path), path);
  const bool identical = text::read_file(path) == first;
  std::filesystem::remove(path);

  std::size_t rejected = 0;
  for (const char* name : {"truncated", "flipped_value", "flipped_metadata", "flipped_checksum"}) {
    try {
      load_checkpoint(testing::fixture(std::string("ckpt/") + name + ".ckpt"));
    } catch (const Error& e) {
      rejected += e.code() == Errc::CorruptSection;
    }
  }
  return {identical && rejected == 4,
          fmt("%zu bytes, reserialized %s; %zu/4 corrupted fixtures rejected", first.size(),
              identical ? "identical" : "different", rejected)};
}

Outcome determinism() {
  const auto train_c = synthetic::planted_corpus(30, 5);
  const auto dev_c = synthetic::planted_corpus(10, 6);
  const auto vectors = synthetic::random_vectors({&train_c, &dev_c}, 32, 7);
  auto run = [&] {
    ModelConfig config;
    config.word_dim = 32;
    config.scheme.pos = SchemeId::POS11;
    Model model(config, vectors, CharVocabulary::build(train_c), TagsetMapping::defaults(), std::nullopt, 42);
    TrainConfig tc;
    tc.max_epochs = 5;
    std::string log;
    const auto r = train(model, train_c, dev_c, tc, [&](const EpochLog& e) { log += e.to_kv() + "\n"; });
    return std::pair{log, serialize_checkpoint(snapshot(model, r.best_dev_f1, r.best_epoch))};
  };
  const auto a = run();
  const auto b = run();
  return {a == b, fmt("logs %s, checkpoints %s", a.first == b.first ? "identical" : "differ",
                      a.second == b.second ? "identical" : "differ")};
}

struct Criterion {
  const char* name;
  double budget_s;  // 0 = no time limit
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::string filter = argc > 1 ? argv[1] : "";
  const std::vector<Criterion> criteria = {
      {"crf-oracle", 10, crf_oracle},
      {"gradient-gate", 60, gradient_gate},
      {"emission-gradient-identity", 0, emission_identity},
      {"overfit", 300, overfit},
      {"ablation-effect", 0, ablation_effect},
      {"scorer-compatibility", 0, scorer},
      {"scheme-invariants", 0, scheme_invariants},
      {"f1-arithmetic", 0, f1_arithmetic},
      {"checkpoint-round-trip", 0, checkpoint_round_trip},
      {"determinism", 0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    if (!filter.empty() && std::string(c.name).find(filter) == std::string::npos) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0 && secs >= c.budget_s) {
      o.pass = false;
      o.detail += fmt(" (over the %.0f s budget)", c.budget_s);
    }
    std::printf("%s %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
