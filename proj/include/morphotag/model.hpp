#pragma once

// Bi-LSTM-CRF tagger whose per-token input is
//   word embedding ⊕ character Bi-LSTM embedding ⊕ grammatical vector.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "morphotag/corpus.hpp"
#include "morphotag/crf.hpp"
#include "morphotag/diff.hpp"
#include "morphotag/embeddings.hpp"
#include "morphotag/tagset.hpp"

namespace morphotag {

// Which character LSTM directions feed the word input.
enum class CharMode : std::uint8_t { None, Forward, Backward, Both };

std::string_view char_mode_name(CharMode m) noexcept;
std::optional<CharMode> parse_char_mode(std::string_view s) noexcept;

struct ModelConfig {
  std::size_t word_dim = 300;
  std::size_t char_embed_dim = 25;
  std::size_t char_hidden = 50;  // per direction
  CharMode char_mode = CharMode::Both;
  std::size_t word_hidden = 100;  // per direction
  FeatureScheme scheme;
  double dropout = 0.5;
  std::size_t tags = kLabelCount;
  bool freeze_embeddings = false;
  bool bio_mask = false;

  std::size_t char_output_dim() const noexcept;
  std::size_t input_dim() const;
  void validate() const;  // throws BadConfig

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// LSTM weights for one direction. Gate rows are stacked [input, forget,
// output, candidate], each `hidden` rows; columns are [x ; h_prev].
struct LstmWeights {
  diff::Parameter* w = nullptr;
  diff::Parameter* b = nullptr;
  std::size_t hidden = 0;
};

// Registers an LSTM: Glorot-uniform kernel, zero bias except forget gate = 1.
LstmWeights register_lstm(diff::ParameterSet& params, const std::string& prefix, std::size_t input, std::size_t hidden,
                          Rng& rng);

// Gate activations recorded while running an LSTM (for inspection).
struct LstmTrace {
  std::vector<diff::Var> gates;       // sigmoid outputs
  std::vector<diff::Var> cell_tanh;   // tanh(c_t)
};

// Runs the LSTM over `inputs`, right to left when `reverse`. Returns the
// hidden state for each input position (in input order).
std::vector<diff::Var> run_lstm(diff::Tape& tape, const LstmWeights& lstm, const std::vector<diff::Var>& inputs,
                                bool reverse, LstmTrace* trace = nullptr);

class Model {
 public:
  // Fresh model. `table` seeds the word embedding parameter; `chars` should
  // come from the training split.
  Model(ModelConfig config, const WordVectorTable& table, CharVocabulary chars, TagsetMapping mapping,
        std::optional<Lexicon> lexicon, std::uint64_t seed);

  // Rebuilds a model around existing parameters (checkpoint loading). The
  // parameter set must contain every id a fresh model would register, with
  // matching shapes.
  Model(ModelConfig config, std::vector<std::string> words, CharVocabulary chars, TagsetMapping mapping,
        std::optional<Lexicon> lexicon, diff::ParameterSet params);

  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;
  Model(Model&&) = default;
  Model& operator=(Model&&) = default;

  const ModelConfig& config() const noexcept { return config_; }
  diff::ParameterSet& params() noexcept { return params_; }
  const diff::ParameterSet& params() const noexcept { return params_; }
  const CharVocabulary& chars() const noexcept { return chars_; }
  const std::vector<std::string>& words() const noexcept { return words_->words(); }
  const TagsetMapping& mapping() const noexcept { return mapping_; }
  const std::optional<Lexicon>& lexicon() const noexcept { return lexicon_; }

  // Parameters the optimizer updates (word embeddings excluded when frozen).
  std::vector<diff::Parameter*> trainable();

  diff::Var char_embed(diff::Tape& tape, std::string_view word) const;
  std::vector<diff::Var> encode_inputs(diff::Tape& tape, const Sentence& sentence, bool training, Rng* rng) const;
  std::vector<diff::Var> bilstm_encode(diff::Tape& tape, const std::vector<diff::Var>& inputs) const;
  // [L, tags] unnormalized label scores.
  diff::Var emissions(diff::Tape& tape, const Sentence& sentence, bool training = false, Rng* rng = nullptr) const;
  // CRF negative log-likelihood of the sentence's gold labels.
  diff::Var loss(diff::Tape& tape, const Sentence& sentence, bool training = false, Rng* rng = nullptr) const;

  std::vector<Label> predict(const Sentence& sentence) const;

  crf::Weights crf_weights() const;

 private:
  void bind();

  ModelConfig config_;
  std::unique_ptr<WordVectorTable> words_;  // word -> embedding row lookup
  CharVocabulary chars_;
  TagsetMapping mapping_;
  std::optional<Lexicon> lexicon_;
  diff::ParameterSet params_;
  std::unique_ptr<crf::Mask> mask_;

  diff::Parameter* word_emb_ = nullptr;
  diff::Parameter* char_emb_ = nullptr;
  LstmWeights char_fwd_, char_bwd_, word_fwd_, word_bwd_;
  diff::Parameter* proj_w_ = nullptr;
  diff::Parameter* proj_b_ = nullptr;
  diff::Parameter* trans_ = nullptr;
  diff::Parameter* start_ = nullptr;
  diff::Parameter* stop_ = nullptr;
};

}  // namespace morphotag
