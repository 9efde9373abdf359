#include <doctest.h>

#include <cmath>

#include "morphotag/error.hpp"
#include "morphotag/model.hpp"
#include "morphotag/synthetic.hpp"

using namespace morphotag;
using namespace morphotag::diff;

namespace {

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::Io;
}

Sentence sample(bool tags) {
  Sentence s;
  const char* words[] = {"Христо", "Стоичков", "пристигна", "в", "София"};
  const char* tagset[] = {"Npmsi", "Hmsi", "Vpptf-o3s", "R", "Npfsi"};
  const Label labels[] = {Label::B_PER, Label::I_PER, Label::O, Label::O, Label::B_LOC};
  for (int i = 0; i < 5; ++i)
    s.tokens.push_back({words[i], tags ? std::optional<std::string>(tagset[i]) : std::nullopt, labels[i], 0});
  return s;
}

Corpus sample_corpus() {
  Corpus c;
  c.sentences.push_back(sample(true));
  return c;
}

ModelConfig small_config() {
  ModelConfig c;
  c.word_dim = 6;
  c.char_embed_dim = 3;
  c.char_hidden = 4;
  c.word_hidden = 5;
  c.scheme.pos = SchemeId::POS3_11;
  c.scheme.morph = true;
  return c;
}

Model make_model(const ModelConfig& config, std::uint64_t seed = 42) {
  const auto corpus = sample_corpus();
  const auto vectors = synthetic::random_vectors({&corpus}, config.word_dim, 3);
  return Model(config, vectors, CharVocabulary::build(corpus), TagsetMapping::defaults(), std::nullopt, seed);
}

std::vector<double> values(const Tape& t, Var v) { return t.value(v).data; }

}  // namespace

TEST_CASE("model config dimensions") {
  ModelConfig c;
  c.scheme.pos = SchemeId::POS3_11;
  c.scheme.morph = true;
  CHECK(c.char_output_dim() == 100);
  CHECK(c.input_dim() == 425);
  c.scheme = FeatureScheme{};
  CHECK(c.input_dim() == 400);
  c.char_mode = CharMode::Forward;
  CHECK(c.input_dim() == 350);
  c.char_mode = CharMode::None;
  CHECK(c.input_dim() == 300);

  ModelConfig bad;
  bad.word_hidden = 0;
  CHECK(code_of([&] { bad.validate(); }) == Errc::BadConfig);
  bad = ModelConfig{};
  bad.dropout = 1.0;
  CHECK(code_of([&] { bad.validate(); }) == Errc::BadConfig);
  CHECK(parse_char_mode("backward") == CharMode::Backward);
  CHECK(char_mode_name(CharMode::Both) == "both");
}

TEST_CASE("LSTM registration") {
  ParameterSet ps;
  Rng rng(1);
  const auto l = register_lstm(ps, "x", 3, 2, rng);
  CHECK(l.w->value.shape == Shape{8, 5});
  CHECK(l.b->value == Tensor::vector({0, 0, 1, 1, 0, 0, 0, 0}));
  const double limit = std::sqrt(6.0 / 13.0);
  for (double v : l.w->value.data) CHECK(std::abs(v) <= limit);
}

TEST_CASE("char_embed") {
  const auto m = make_model(small_config());
  Tape t;
  const auto one = m.char_embed(t, "в");
  CHECK(t.value(one).size() == 8);
  CHECK(values(t, m.char_embed(t, "София")) == values(t, m.char_embed(t, "София")));
  CHECK(values(t, m.char_embed(t, "София")) != values(t, m.char_embed(t, "Христо")));
  // Unseen characters go through the UNK row rather than failing.
  CHECK(t.value(m.char_embed(t, "ыыы")).all_finite());

  // For a one-character word each direction makes exactly one step from a
  // zero state on the same input.
  Tape t2;
  const auto x = diff::row(t2, const_cast<Parameter&>(m.params().get("char.embeddings")), m.chars().index(U'в'));
  LstmWeights fwd{const_cast<Parameter*>(&m.params().get("char.fwd.W")),
                  const_cast<Parameter*>(&m.params().get("char.fwd.b")), 4};
  LstmWeights bwd{const_cast<Parameter*>(&m.params().get("char.bwd.W")),
                  const_cast<Parameter*>(&m.params().get("char.bwd.b")), 4};
  auto expect = values(t2, run_lstm(t2, fwd, {x}, false)[0]);
  const auto b = values(t2, run_lstm(t2, bwd, {x}, true)[0]);
  expect.insert(expect.end(), b.begin(), b.end());
  CHECK(values(t, one) == expect);
}

TEST_CASE("encode_inputs lengths and MissingTag") {
  auto config = small_config();
  const auto m = make_model(config);
  Tape t;
  const auto inputs = m.encode_inputs(t, sample(true), false, nullptr);
  REQUIRE(inputs.size() == 5);
  for (auto v : inputs) CHECK(t.value(v).size() == 6 + 8 + 25);
  CHECK(code_of([&] { m.encode_inputs(t, sample(false), false, nullptr); }) == Errc::MissingTag);

  config.scheme = FeatureScheme{};
  const auto words_only = make_model(config);
  const auto plain = words_only.encode_inputs(t, sample(false), false, nullptr);
  CHECK(t.value(plain[0]).size() == 14);

  // Dropout off makes encoding deterministic; with dropout on, the rng drives it.
  CHECK(values(t, m.encode_inputs(t, sample(true), false, nullptr)[2]) == values(t, inputs[2]));
  Rng r1(5), r2(5);
  CHECK(values(t, m.encode_inputs(t, sample(true), true, &r1)[2]) ==
        values(t, m.encode_inputs(t, sample(true), true, &r2)[2]));
}

TEST_CASE("word dimension must match the vectors") {
  auto config = small_config();
  const auto corpus = sample_corpus();
  const auto vectors = synthetic::random_vectors({&corpus}, 7, 3);
  CHECK(code_of([&] {
          Model(config, vectors, CharVocabulary::build(corpus), TagsetMapping::defaults(), std::nullopt, 1);
        }) == Errc::DimensionMismatch);
}

TEST_CASE("bilstm_encode") {
  auto m = make_model(small_config());
  Rng rng(3);
  std::vector<Tensor> xs;
  for (int i = 0; i < 4; ++i) {
    Tensor x({m.config().input_dim()});
    for (auto& v : x.data) v = rng.uniform(-1, 1);
    xs.push_back(x);
  }
  // Single token: each half is one LSTM step.
  {
    Tape t;
    const auto out = m.bilstm_encode(t, {t.constant(xs[0])});
    CHECK(t.value(out[0]).size() == 10);
  }
  // With tied directions, reversing the sentence swaps the two halves.
  m.params().get("word.bwd.W").value = m.params().get("word.fwd.W").value;
  m.params().get("word.bwd.b").value = m.params().get("word.fwd.b").value;
  Tape t;
  std::vector<Var> in, rev;
  for (const auto& x : xs) in.push_back(t.constant(x));
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) rev.push_back(t.constant(*it));
  const auto a = m.bilstm_encode(t, in);
  const auto b = m.bilstm_encode(t, rev);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& fa = t.value(a[i]).data;
    const auto& fb = t.value(b[3 - i]).data;
    for (std::size_t k = 0; k < 5; ++k) {
      CHECK(fa[k] == fb[5 + k]);
      CHECK(fa[5 + k] == fb[k]);
    }
  }

  // Zero weights give zero outputs.
  for (const char* id : {"word.fwd.W", "word.fwd.b", "word.bwd.W", "word.bwd.b"}) m.params().get(id).value.fill(0.0);
  Tape z;
  for (auto v : m.bilstm_encode(z, {z.constant(xs[0]), z.constant(xs[1])}))
    for (double x : z.value(v).data) CHECK(x == 0.0);
}

TEST_CASE("gate activations stay in range") {
  const auto m = make_model(small_config());
  Rng rng(9);
  Tape t;
  std::vector<Var> in;
  for (int i = 0; i < 6; ++i) {
    Tensor x({m.config().input_dim()});
    for (auto& v : x.data) v = rng.uniform(-3, 3);
    in.push_back(t.constant(x));
  }
  LstmWeights fwd{const_cast<Parameter*>(&m.params().get("word.fwd.W")),
                  const_cast<Parameter*>(&m.params().get("word.fwd.b")), 5};
  LstmTrace trace;
  run_lstm(t, fwd, in, false, &trace);
  CHECK(trace.gates.size() == 3 * 6);  // input, forget, output per step
  CHECK(trace.cell_tanh.size() == 6);
  for (auto g : trace.gates)
    for (double v : t.value(g).data) CHECK((v > 0.0 && v < 1.0));
  for (auto c : trace.cell_tanh)
    for (double v : t.value(c).data) CHECK((v > -1.0 && v < 1.0));
}

TEST_CASE("emissions") {
  auto m = make_model(small_config());
  Tape t;
  const auto e = m.emissions(t, sample(true));
  CHECK(t.value(e).shape == Shape{5, 9});
  CHECK(t.value(e).all_finite());

  m.params().get("proj.W").value.fill(0.0);
  auto& b = m.params().get("proj.b").value;
  for (std::size_t i = 0; i < 9; ++i) b[i] = 0.1 * static_cast<double>(i) - 0.3;
  Tape t2;
  const auto& rows = t2.value(m.emissions(t2, sample(true)));
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t k = 0; k < 9; ++k) CHECK(rows.at(r, k) == b[k]);
  CHECK(m.predict(sample(true)).size() == 5);
}

TEST_CASE("frozen embeddings receive no gradient") {
  auto config = small_config();
  config.freeze_embeddings = true;
  auto m = make_model(config);
  CHECK(m.trainable().size() == m.params().size() - 1);
  Tape t;
  t.backward(m.loss(t, sample(true)));
  CHECK(m.params().get("word.embeddings").grad == Tensor(m.params().get("word.embeddings").value.shape));
  double total = 0;
  for (double g : m.params().get("proj.W").grad.data) total += std::abs(g);
  CHECK(total > 0.0);

  config.freeze_embeddings = false;
  auto tuned = make_model(config);
  CHECK(tuned.trainable().size() == tuned.params().size());
  Tape t2;
  t2.backward(tuned.loss(t2, sample(true)));
  double emb = 0;
  for (double g : tuned.params().get("word.embeddings").grad.data) emb += std::abs(g);
  CHECK(emb > 0.0);
}

TEST_CASE("char mode ablations register only what they use") {
  auto config = small_config();
  config.char_mode = CharMode::None;
  const auto none = make_model(config);
  CHECK(none.params().find("char.embeddings") == nullptr);
  config.char_mode = CharMode::Backward;
  const auto bwd = make_model(config);
  CHECK(bwd.params().find("char.fwd.W") == nullptr);
  CHECK(bwd.params().find("char.bwd.W") != nullptr);
  Tape t;
  CHECK(t.value(bwd.emissions(t, sample(true))).shape == Shape{5, 9});
}

TEST_CASE("end-to-end gradient check") {
  auto config = small_config();
  config.bio_mask = true;
  auto m = make_model(config);
  Sentence s = sample(true);
  s.tokens.resize(3);
  auto params = m.trainable();
  const auto r = grad_check([&](Tape& t) { return m.loss(t, s); }, params);
  INFO("worst ", r.worst_param, "[", r.worst_index, "]");
  CHECK(r.max_rel_error <= 1e-4);
}
