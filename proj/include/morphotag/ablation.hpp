#pragma once

// Experiment grids: the POS-scheme x morphology grid and the component
// ablation ladder. Each cell trains a fresh model with the same seed and
// evaluates it on the held-out split.

#include <optional>
#include <string>
#include <vector>

#include "morphotag/corpus.hpp"
#include "morphotag/embeddings.hpp"
#include "morphotag/eval.hpp"
#include "morphotag/model.hpp"
#include "morphotag/tagset.hpp"
#include "morphotag/train.hpp"

namespace morphotag {

struct AblationCell {
  std::string row;     // row label, e.g. "POS-3+11" or "(5) POS11 + (4)"
  std::string column;  // "no-morph" / "morph" for the scheme grid, "" otherwise
  SchemeId scheme = SchemeId::None;
  bool morph = false;
  CharMode char_mode = CharMode::Both;
};

struct AblationSpec {
  enum class Layout { SchemeGrid, ComponentLadder };

  std::string name;
  Layout layout = Layout::ComponentLadder;
  std::vector<AblationCell> cells;

  // Rows POS-2 ... POS-4+11, columns without / with morphology (14 cells).
  static AblationSpec scheme_grid();
  // (1) words only, (2) fwd char, (3) bwd char, (4) Bi-LSTM char, (5) +POS11,
  // (6) +morph, (7) +POS3.
  static AblationSpec component_ladder();
  static AblationSpec by_name(std::string_view name);  // "table2" or "table6"
};

struct AblationData {
  const Corpus* train = nullptr;
  const Corpus* dev = nullptr;
  const Corpus* test = nullptr;  // evaluated when present, else dev
  const WordVectorTable* vectors = nullptr;
  const TagsetMapping* mapping = nullptr;
  const Lexicon* lexicon = nullptr;
};

struct AblationOutcome {
  AblationCell cell;
  std::size_t input_dim = 0;
  std::optional<EvalReport> report;
  std::size_t epochs = 0;
  std::string error;  // set when the cell failed
};

// `base` supplies every model setting the cells do not override. A failing
// cell records its error and the remaining cells still run.
std::vector<AblationOutcome> run_ablation(const AblationSpec& spec, const AblationData& data, const ModelConfig& base,
                                          const TrainConfig& train_config, bool parallel = false);

std::string format_ablation(const AblationSpec& spec, const std::vector<AblationOutcome>& outcomes);
std::string ablation_kv(const std::vector<AblationOutcome>& outcomes);

}  // namespace morphotag
