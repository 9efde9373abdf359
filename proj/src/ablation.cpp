#include "morphotag/ablation.hpp"

#include <cstdio>
#include <thread>

#include "morphotag/error.hpp"

namespace morphotag {

AblationSpec AblationSpec::scheme_grid() {
  AblationSpec spec;
  spec.name = "table2";
  spec.layout = Layout::SchemeGrid;
  const std::pair<const char*, SchemeId> rows[] = {{"POS-2", SchemeId::POS2},   {"POS-3", SchemeId::POS3},
                                                   {"POS-4", SchemeId::POS4},   {"POS-5", SchemeId::POS5},
                                                   {"POS-11", SchemeId::POS11}, {"POS-3+11", SchemeId::POS3_11},
                                                   {"POS-4+11", SchemeId::POS4_11}};
  for (const auto& [name, id] : rows) {
    spec.cells.push_back({name, "no-morph", id, false, CharMode::Both});
    spec.cells.push_back({name, "morph", id, true, CharMode::Both});
  }
  return spec;
}

AblationSpec AblationSpec::component_ladder() {
  AblationSpec spec;
  spec.name = "table6";
  spec.layout = Layout::ComponentLadder;
  spec.cells = {
      {"(1) LSTM-CRF (words only)", "", SchemeId::None, false, CharMode::None},
      {"(2) fwd-LSTM-char + (1)", "", SchemeId::None, false, CharMode::Forward},
      {"(3) bwd-LSTM-char + (1)", "", SchemeId::None, false, CharMode::Backward},
      {"(4) Bi-LSTM-char + (1)", "", SchemeId::None, false, CharMode::Both},
      {"(5) POS11 + (4)", "", SchemeId::POS11, false, CharMode::Both},
      {"(6) Morph + (5)", "", SchemeId::POS11, true, CharMode::Both},
      {"(7) POS3 + (6)", "", SchemeId::POS3_11, true, CharMode::Both},
  };
  return spec;
}

AblationSpec AblationSpec::by_name(std::string_view name) {
  if (name == "table2") return scheme_grid();
  if (name == "table6") return component_ladder();
  throw Error(Errc::BadConfig, "unknown grid '" + std::string(name) + "' (expected table2 or table6)");
}

namespace {

AblationOutcome run_cell(const AblationCell& cell, const AblationData& data, const ModelConfig& base,
                         const TrainConfig& train_config) {
  AblationOutcome out;
  out.cell = cell;
  try {
    ModelConfig config = base;
    config.scheme.pos = cell.scheme;
    config.scheme.morph = cell.morph;
    config.char_mode = cell.char_mode;
    config.word_dim = data.vectors->dimension();
    out.input_dim = config.input_dim();
    std::optional<Lexicon> lexicon;
    if (config.scheme.lexicon && data.lexicon) lexicon = *data.lexicon;
    Model model(config, *data.vectors, CharVocabulary::build(*data.train), *data.mapping, std::move(lexicon),
                train_config.seed);
    TrainConfig tc = train_config;
    tc.eval_threads = 1;
    const auto result = train(model, *data.train, *data.dev, tc);
    out.epochs = result.epochs.size();
    const Corpus& held_out = data.test ? *data.test : *data.dev;
    out.report = score(held_out, predict_all(model, held_out, 1));
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace

std::vector<AblationOutcome> run_ablation(const AblationSpec& spec, const AblationData& data, const ModelConfig& base,
                                          const TrainConfig& train_config, bool parallel) {
  if (!data.train || !data.dev || !data.vectors || !data.mapping)
    throw Error(Errc::BadConfig, "ablation needs train and dev corpora, vectors and a tagset mapping");
  std::vector<AblationOutcome> outcomes(spec.cells.size());
  if (!parallel) {
    for (std::size_t i = 0; i < spec.cells.size(); ++i) outcomes[i] = run_cell(spec.cells[i], data, base, train_config);
    return outcomes;
  }
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < spec.cells.size(); ++i)
    pool.emplace_back([&, i] { outcomes[i] = run_cell(spec.cells[i], data, base, train_config); });
  for (auto& t : pool) t.join();
  return outcomes;
}

std::string format_ablation(const AblationSpec& spec, const std::vector<AblationOutcome>& outcomes) {
  char line[256];
  std::string out;
  auto f1 = [](const AblationOutcome& o) { return o.report ? format_percent(o.report->overall.f1()) : std::string("ERR"); };
  if (spec.layout == AblationSpec::Layout::SchemeGrid) {
    std::snprintf(line, sizeof line, "%-18s %12s %12s %8s %8s\n", "Model", "NoMorph F1", "Morph F1", "P", "R");
    out += line;
    for (std::size_t i = 0; i + 1 < outcomes.size(); i += 2) {
      const auto& plain = outcomes[i];
      const auto& morph = outcomes[i + 1];
      const std::string p = morph.report ? format_percent(morph.report->overall.precision()) : "ERR";
      const std::string r = morph.report ? format_percent(morph.report->overall.recall()) : "ERR";
      const std::string name = "Model + " + plain.cell.row;
      std::snprintf(line, sizeof line, "%-18s %12s %12s %8s %8s\n", name.c_str(), f1(plain).c_str(),
                    f1(morph).c_str(), p.c_str(), r.c_str());
      out += line;
    }
  } else {
    std::snprintf(line, sizeof line, "%-28s %8s\n", "Model", "F1");
    out += line;
    for (const auto& o : outcomes) {
      std::snprintf(line, sizeof line, "%-28s %8s\n", o.cell.row.c_str(), f1(o).c_str());
      out += line;
    }
  }
  for (const auto& o : outcomes)
    if (!o.error.empty()) out += "error in " + o.cell.row + " " + o.cell.column + ": " + o.error + "\n";
  return out;
}

std::string ablation_kv(const std::vector<AblationOutcome>& outcomes) {
  std::string out;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    const std::string prefix = "cell." + std::to_string(i + 1) + ".";
    out += prefix + "row=" + o.cell.row + "\n";
    if (!o.cell.column.empty()) out += prefix + "column=" + o.cell.column + "\n";
    out += prefix + "input_dim=" + std::to_string(o.input_dim) + "\n";
    if (o.report) {
      out += prefix + "epochs=" + std::to_string(o.epochs) + "\n";
      out += report_kv(*o.report, prefix);
    } else {
      out += prefix + "error=" + o.error + "\n";
    }
  }
  return out;
}

}  // namespace morphotag
