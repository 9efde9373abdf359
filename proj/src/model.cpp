#include "morphotag/model.hpp"

#include "morphotag/error.hpp"
#include "morphotag/init.hpp"

namespace morphotag {

using diff::Tape;
using diff::Tensor;
using diff::Var;

std::string_view char_mode_name(CharMode m) noexcept {
  switch (m) {
    case CharMode::None: return "none";
    case CharMode::Forward: return "forward";
    case CharMode::Backward: return "backward";
    case CharMode::Both: return "both";
  }
  return "?";
}

std::optional<CharMode> parse_char_mode(std::string_view s) noexcept {
  for (auto m : {CharMode::None, CharMode::Forward, CharMode::Backward, CharMode::Both})
    if (char_mode_name(m) == s) return m;
  return std::nullopt;
}

std::size_t ModelConfig::char_output_dim() const noexcept {
  switch (char_mode) {
    case CharMode::None: return 0;
    case CharMode::Forward:
    case CharMode::Backward: return char_hidden;
    case CharMode::Both: return 2 * char_hidden;
  }
  return 0;
}

std::size_t ModelConfig::input_dim() const { return word_dim + char_output_dim() + scheme_dim(scheme); }

void ModelConfig::validate() const {
  auto fail = [](const std::string& why) { return Error(Errc::BadConfig, why); };
  if (word_dim == 0 || word_hidden == 0 || tags == 0) throw fail("model dimensions must be positive");
  if (char_mode != CharMode::None && (char_hidden == 0 || char_embed_dim == 0))
    throw fail("character encoder dimensions must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw fail("dropout rate must be in [0, 1)");
  if (bio_mask && tags != kLabelCount) throw fail("the BIO mask needs the nine BIO labels");
}

LstmWeights register_lstm(diff::ParameterSet& params, const std::string& prefix, std::size_t input, std::size_t hidden,
                          Rng& rng) {
  LstmWeights lstm;
  lstm.hidden = hidden;
  lstm.w = &params.add(prefix + ".W", glorot_uniform(4 * hidden, input + hidden, rng));
  Tensor bias(diff::Shape{4 * hidden});
  for (std::size_t i = hidden; i < 2 * hidden; ++i) bias[i] = 1.0;
  lstm.b = &params.add(prefix + ".b", std::move(bias));
  return lstm;
}

std::vector<Var> run_lstm(Tape& tape, const LstmWeights& lstm, const std::vector<Var>& inputs, bool reverse,
                          LstmTrace* trace) {
  const std::size_t H = lstm.hidden;
  const Var w = tape.param(*lstm.w);
  const Var b = tape.param(*lstm.b);
  Var h = tape.constant(Tensor(diff::Shape{H}));
  Var c = tape.constant(Tensor(diff::Shape{H}));
  std::vector<Var> out(inputs.size());
  for (std::size_t step = 0; step < inputs.size(); ++step) {
    const std::size_t t = reverse ? inputs.size() - 1 - step : step;
    const Var xh[] = {inputs[t], h};
    const Var z = diff::add(tape, diff::matmul(tape, w, diff::concat(tape, xh)), b);
    const Var in_gate = diff::sigmoid(tape, diff::slice(tape, z, 0, H));
    const Var forget_gate = diff::sigmoid(tape, diff::slice(tape, z, H, 2 * H));
    const Var out_gate = diff::sigmoid(tape, diff::slice(tape, z, 2 * H, 3 * H));
    const Var candidate = diff::tanh(tape, diff::slice(tape, z, 3 * H, 4 * H));
    c = diff::add(tape, diff::mul(tape, forget_gate, c), diff::mul(tape, in_gate, candidate));
    const Var c_act = diff::tanh(tape, c);
    h = diff::mul(tape, out_gate, c_act);
    out[t] = h;
    if (trace) {
      trace->gates.insert(trace->gates.end(), {in_gate, forget_gate, out_gate});
      trace->cell_tanh.push_back(c_act);
    }
  }
  return out;
}

Model::Model(ModelConfig config, const WordVectorTable& table, CharVocabulary chars, TagsetMapping mapping,
             std::optional<Lexicon> lexicon, std::uint64_t seed)
    : config_(std::move(config)),
      words_(std::make_unique<WordVectorTable>(WordVectorTable::from_rows(table.words(), table.vectors()))),
      chars_(std::move(chars)),
      mapping_(std::move(mapping)),
      lexicon_(std::move(lexicon)) {
  config_.validate();
  if (table.dimension() != config_.word_dim)
    throw Error(Errc::DimensionMismatch, "word vectors have dimension " + std::to_string(table.dimension()) +
                                             ", model expects " + std::to_string(config_.word_dim));
  Rng rng(seed);
  params_.add("word.embeddings", table.with_unk_row());
  if (config_.char_mode != CharMode::None) {
    params_.add("char.embeddings", glorot_uniform(chars_.size(), config_.char_embed_dim, rng));
    if (config_.char_mode != CharMode::Backward)
      register_lstm(params_, "char.fwd", config_.char_embed_dim, config_.char_hidden, rng);
    if (config_.char_mode != CharMode::Forward)
      register_lstm(params_, "char.bwd", config_.char_embed_dim, config_.char_hidden, rng);
  }
  register_lstm(params_, "word.fwd", config_.input_dim(), config_.word_hidden, rng);
  register_lstm(params_, "word.bwd", config_.input_dim(), config_.word_hidden, rng);
  params_.add("proj.W", glorot_uniform(config_.tags, 2 * config_.word_hidden, rng));
  params_.add("proj.b", Tensor(diff::Shape{config_.tags}));
  crf::register_params(params_, config_.tags, rng);
  bind();
}

Model::Model(ModelConfig config, std::vector<std::string> words, CharVocabulary chars, TagsetMapping mapping,
             std::optional<Lexicon> lexicon, diff::ParameterSet params)
    : config_(std::move(config)),
      chars_(std::move(chars)),
      mapping_(std::move(mapping)),
      lexicon_(std::move(lexicon)),
      params_(std::move(params)) {
  config_.validate();
  const Tensor& emb = params_.get("word.embeddings").value;
  if (emb.rank() != 2 || emb.shape[0] != words.size() + 1 || emb.shape[1] != config_.word_dim)
    throw Error(Errc::ShapeMismatch, "word embedding matrix does not match the vocabulary");
  Tensor rows(diff::Shape{words.size(), config_.word_dim},
              std::vector<double>(emb.data.begin(), emb.data.end() - static_cast<std::ptrdiff_t>(config_.word_dim)));
  words_ = std::make_unique<WordVectorTable>(WordVectorTable::from_rows(std::move(words), std::move(rows)));
  bind();
}

void Model::bind() {
  auto expect = [&](const std::string& id, diff::Shape shape) {
    auto& p = params_.get(id);
    if (p.value.shape != shape)
      throw Error(Errc::ShapeMismatch, "parameter '" + id + "' has shape " + diff::shape_str(p.value.shape) +
                                           ", expected " + diff::shape_str(shape));
    return &p;
  };
  auto lstm = [&](const std::string& prefix, std::size_t input, std::size_t hidden) {
    LstmWeights l;
    l.hidden = hidden;
    l.w = expect(prefix + ".W", {4 * hidden, input + hidden});
    l.b = expect(prefix + ".b", {4 * hidden});
    return l;
  };
  const auto& c = config_;
  word_emb_ = expect("word.embeddings", {words_->size() + 1, c.word_dim});
  if (c.char_mode != CharMode::None) {
    char_emb_ = expect("char.embeddings", {chars_.size(), c.char_embed_dim});
    if (c.char_mode != CharMode::Backward) char_fwd_ = lstm("char.fwd", c.char_embed_dim, c.char_hidden);
    if (c.char_mode != CharMode::Forward) char_bwd_ = lstm("char.bwd", c.char_embed_dim, c.char_hidden);
  }
  word_fwd_ = lstm("word.fwd", c.input_dim(), c.word_hidden);
  word_bwd_ = lstm("word.bwd", c.input_dim(), c.word_hidden);
  proj_w_ = expect("proj.W", {c.tags, 2 * c.word_hidden});
  proj_b_ = expect("proj.b", {c.tags});
  trans_ = expect(crf::kTransitionsId, {c.tags, c.tags});
  start_ = expect(crf::kStartId, {c.tags});
  stop_ = expect(crf::kStopId, {c.tags});
  if (c.bio_mask) mask_ = std::make_unique<crf::Mask>(crf::bio_mask());
}

std::vector<diff::Parameter*> Model::trainable() {
  std::vector<diff::Parameter*> out;
  for (auto& p : params_)
    if (!(config_.freeze_embeddings && p.get() == word_emb_)) out.push_back(p.get());
  return out;
}

Var Model::char_embed(Tape& tape, std::string_view word) const {
  if (config_.char_mode == CharMode::None) throw Error(Errc::BadConfig, "model has no character encoder");
  std::vector<Var> chars;
  for (auto idx : chars_.encode(word)) chars.push_back(diff::row(tape, *char_emb_, idx));
  if (chars.empty()) throw Error(Errc::ShapeMismatch, "empty word");
  std::vector<Var> parts;
  // The left-to-right state after the last character summarizes the suffix;
  // the right-to-left state at the first character summarizes the prefix.
  if (config_.char_mode != CharMode::Backward) parts.push_back(run_lstm(tape, char_fwd_, chars, false).back());
  if (config_.char_mode != CharMode::Forward) parts.push_back(run_lstm(tape, char_bwd_, chars, true).front());
  return parts.size() == 1 ? parts[0] : diff::concat(tape, parts);
}

std::vector<Var> Model::encode_inputs(Tape& tape, const Sentence& sentence, bool training, Rng* rng) const {
  if (sentence.tokens.empty()) throw Error(Errc::ShapeMismatch, "empty sentence");
  if (training && config_.dropout > 0.0 && !rng) throw Error(Errc::BadConfig, "training with dropout needs an rng");
  const std::size_t expected = config_.input_dim();
  std::vector<Var> out;
  out.reserve(sentence.size());
  for (const auto& tok : sentence.tokens) {
    std::vector<Var> parts;
    const std::size_t r = words_->row_of(tok.surface);
    if (config_.freeze_embeddings) {
      const std::size_t d = config_.word_dim;
      const auto& emb = word_emb_->value.data;
      parts.push_back(tape.constant(Tensor(diff::Shape{d}, std::vector<double>(emb.begin() + r * d, emb.begin() + (r + 1) * d))));
    } else {
      parts.push_back(diff::row(tape, *word_emb_, r));
    }
    if (config_.char_mode != CharMode::None) parts.push_back(char_embed(tape, tok.surface));
    if (scheme_dim(config_.scheme) > 0) {
      std::optional<PositionalTag> tag;
      if (config_.scheme.needs_tags()) {
        if (!tok.tag)
          throw Error(Errc::MissingTag, "token '" + tok.surface + "'" +
                                            (tok.line ? " on line " + std::to_string(tok.line) : std::string{}) +
                                            " has no positional tag but the model uses " +
                                            std::string(scheme_name(config_.scheme.pos)) +
                                            (config_.scheme.morph ? "+morph" : ""));
        tag = parse_tag(*tok.tag, mapping_);
      }
      parts.push_back(tape.constant(Tensor::vector(grammatical_vector(
          tag ? &*tag : nullptr, config_.scheme, tok.surface, lexicon_ ? &*lexicon_ : nullptr))));
    }
    Var x = parts.size() == 1 ? parts[0] : diff::concat(tape, parts);
    if (tape.value(x).size() != expected)
      throw Error(Errc::ShapeMismatch, "input vector has length " + std::to_string(tape.value(x).size()) +
                                           ", expected " + std::to_string(expected));
    if (training) x = diff::dropout(tape, x, config_.dropout, *rng, true);
    out.push_back(x);
  }
  return out;
}

std::vector<Var> Model::bilstm_encode(Tape& tape, const std::vector<Var>& inputs) const {
  if (inputs.empty()) throw Error(Errc::ShapeMismatch, "empty input sequence");
  const auto fwd = run_lstm(tape, word_fwd_, inputs, false);
  const auto bwd = run_lstm(tape, word_bwd_, inputs, true);
  std::vector<Var> out(inputs.size());
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    const Var both[] = {fwd[t], bwd[t]};
    out[t] = diff::concat(tape, both);
  }
  return out;
}

Var Model::emissions(Tape& tape, const Sentence& sentence, bool training, Rng* rng) const {
  const auto contextual = bilstm_encode(tape, encode_inputs(tape, sentence, training, rng));
  const Var w = tape.param(*proj_w_);
  const Var b = tape.param(*proj_b_);
  std::vector<Var> rows;
  rows.reserve(contextual.size());
  for (auto h : contextual) rows.push_back(diff::add(tape, diff::matmul(tape, w, h), b));
  return diff::stack(tape, rows);
}

Var Model::loss(Tape& tape, const Sentence& sentence, bool training, Rng* rng) const {
  const auto labels = sentence.labels();
  std::vector<std::size_t> gold;
  gold.reserve(labels.size());
  for (auto l : labels) gold.push_back(static_cast<std::size_t>(l));
  const Var e = emissions(tape, sentence, training, rng);
  return crf::nll(tape, e, tape.param(*trans_), tape.param(*start_), tape.param(*stop_), gold, mask_.get());
}

std::vector<Label> Model::predict(const Sentence& sentence) const {
  Tape tape;
  const Var e = emissions(tape, sentence);
  const auto decoded = crf::viterbi(tape.value(e), crf::apply(crf_weights(), mask_.get()));
  std::vector<Label> out;
  out.reserve(decoded.labels.size());
  for (auto y : decoded.labels) out.push_back(static_cast<Label>(y));
  return out;
}

crf::Weights Model::crf_weights() const { return crf::Weights{trans_->value, start_->value, stop_->value}; }

}  // namespace morphotag
