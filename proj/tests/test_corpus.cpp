#include <doctest.h>

#include "morphotag/corpus.hpp"
#include "morphotag/error.hpp"
#include "morphotag/rng.hpp"
#include "morphotag/synthetic.hpp"

using namespace morphotag;

namespace {

constexpr const char* kSample =
    "Христо B-PER\n"
    "Стоичков I-PER\n"
    "пристигна O\n"
    "в O\n"
    "София B-LOC\n"
    "\n";

std::vector<Label> labels(std::initializer_list<const char*> names) {
  std::vector<Label> out;
  for (const char* n : names) out.push_back(*parse_label(n));
  return out;
}

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::Io;
}

std::vector<Label> random_labels(Rng& rng, std::size_t n) {
  std::vector<Label> out(n);
  for (auto& l : out) l = static_cast<Label>(rng.below(kLabelCount));
  return out;
}

}  // namespace

TEST_CASE("label names and indices") {
  CHECK(label_name(Label::B_PER) == "B-PER");
  CHECK(label_name(Label::O) == "O");
  CHECK(static_cast<int>(*parse_label("I-MISC")) == 7);
  CHECK_FALSE(parse_label("X-PER"));
  for (std::size_t i = 0; i < kLabelCount; ++i) {
    const auto l = static_cast<Label>(i);
    CHECK(parse_label(label_name(l)) == l);
  }
  CHECK(is_begin(Label::B_LOC));
  CHECK(is_inside(Label::I_ORG));
  CHECK_FALSE(is_begin(Label::O));
  CHECK(entity_of(Label::I_MISC) == EntityType::MISC);
}

TEST_CASE("parse_conll reads a tagged sentence") {
  const auto c = parse_conll(kSample);
  REQUIRE(c.sentences.size() == 1);
  REQUIRE(c.sentences[0].size() == 5);
  CHECK(c.sentences[0].tokens[0].surface == "Христо");
  CHECK(c.sentences[0].tokens[4].label == Label::B_LOC);
  CHECK(c.sentences[0].tokens[4].line == 5);
  CHECK_FALSE(c.sentences[0].tokens[0].tag);
}

TEST_CASE("parse_conll with tag column, comments, DOCSTART and tabs") {
  const auto c = parse_conll("# comment\n-DOCSTART- -X- O\n\nХристо\tNpmsi\tB-PER\nпристигна Vpitf-o3s O\n\n\nв R O\n");
  REQUIRE(c.sentences.size() == 2);
  CHECK(c.sentences[0].tokens[0].tag == "Npmsi");
  CHECK(c.sentences[1].tokens[0].surface == "в");
  CHECK(c.token_count() == 3);
}

TEST_CASE("parse_conll errors") {
  CHECK(code_of([] { parse_conll("\n\n  \n"); }) == Errc::EmptyFile);
  CHECK(code_of([] { parse_conll(""); }) == Errc::EmptyFile);
  CHECK(code_of([] { parse_conll("word X-PER\n"); }) == Errc::UnknownLabel);
  CHECK(code_of([] { parse_conll("a O\nb Npmsi O\n"); }) == Errc::MixedColumnCount);
  CHECK(code_of([] { parse_conll("a\nb\n"); }) == Errc::MissingLabel);
  CHECK(code_of([] { parse_conll("a b c O\n"); }) == Errc::MixedColumnCount);
  CHECK(code_of([] { parse_conll("\xff\xfe O\n"); }) == Errc::Io);
}

TEST_CASE("unlabeled parsing keeps optional columns") {
  const auto one = parse_conll("Христо\nСтоичков\n", Columns::Unlabeled);
  CHECK_FALSE(one.sentences[0].tokens[0].label);
  CHECK(code_of([&] { one.sentences[0].labels(); }) == Errc::MissingLabel);
  const auto two = parse_conll("Христо Npmsi\n", Columns::Unlabeled);
  CHECK(two.sentences[0].tokens[0].tag == "Npmsi");
  const auto three = parse_conll("Христо Npmsi B-PER\n", Columns::Unlabeled);
  CHECK(three.sentences[0].tokens[0].label == Label::B_PER);
}

TEST_CASE("serialize then parse reproduces the corpus") {
  const auto c = synthetic::planted_corpus(20, 5);
  const auto again = parse_conll(serialize_conll(c));
  REQUIRE(again.sentences.size() == c.sentences.size());
  for (std::size_t s = 0; s < c.sentences.size(); ++s) {
    REQUIRE(again.sentences[s].size() == c.sentences[s].size());
    for (std::size_t i = 0; i < c.sentences[s].size(); ++i) {
      CHECK(again.sentences[s].tokens[i].surface == c.sentences[s].tokens[i].surface);
      CHECK(again.sentences[s].tokens[i].tag == c.sentences[s].tokens[i].tag);
      CHECK(again.sentences[s].tokens[i].label == c.sentences[s].tokens[i].label);
    }
  }
  CHECK(serialize_conll(again) == serialize_conll(c));
}

TEST_CASE("validate_bio") {
  CHECK(validate_bio(labels({"B-PER", "I-PER", "O", "O", "B-LOC"})).empty());
  CHECK(validate_bio(labels({"O", "I-LOC"})) == std::vector<Violation>{{1, ViolationKind::OrphanInside}});
  CHECK(validate_bio(labels({"B-PER", "I-LOC"})) == std::vector<Violation>{{1, ViolationKind::TypeMismatch}});
  CHECK(validate_bio(labels({"I-PER"})) == std::vector<Violation>{{0, ViolationKind::OrphanInside}});
  CHECK(validate_bio(labels({"B-ORG", "I-ORG", "I-ORG", "B-ORG", "I-ORG"})).empty());
  Sentence s;
  s.tokens.push_back({"a", std::nullopt, std::nullopt, 1});
  CHECK(code_of([&] { validate_bio(s); }) == Errc::MissingLabel);
}

TEST_CASE("extract_spans") {
  CHECK(extract_spans(labels({"B-PER", "I-PER", "O", "O", "B-LOC"})) ==
        std::vector<EntitySpan>{{EntityType::PER, 0, 1}, {EntityType::LOC, 4, 4}});
  CHECK(extract_spans(labels({"O", "O", "O"})).empty());
  CHECK(extract_spans(labels({"O", "I-PER", "I-PER"})) == std::vector<EntitySpan>{{EntityType::PER, 1, 2}});
  CHECK(extract_spans(labels({"B-PER", "I-LOC"})) ==
        std::vector<EntitySpan>{{EntityType::PER, 0, 0}, {EntityType::LOC, 1, 1}});
  CHECK(extract_spans(labels({"B-PER", "B-PER"})) ==
        std::vector<EntitySpan>{{EntityType::PER, 0, 0}, {EntityType::PER, 1, 1}});
}

TEST_CASE("spans_to_labels") {
  CHECK(spans_to_labels({{EntityType::PER, 0, 1}, {EntityType::LOC, 4, 4}}, 5) ==
        labels({"B-PER", "I-PER", "O", "O", "B-LOC"}));
  CHECK(spans_to_labels({}, 3) == labels({"O", "O", "O"}));
  CHECK(spans_to_labels({{EntityType::PER, 0, 0}, {EntityType::PER, 1, 1}}, 2) == labels({"B-PER", "B-PER"}));
  CHECK(code_of([] { spans_to_labels({{EntityType::PER, 0, 2}, {EntityType::LOC, 2, 3}}, 5); }) ==
        Errc::OverlappingSpans);
  CHECK(code_of([] { spans_to_labels({{EntityType::PER, 3, 5}}, 5); }) == Errc::SpanOutOfRange);
  CHECK(code_of([] { spans_to_labels({{EntityType::PER, 2, 1}}, 5); }) == Errc::SpanOutOfRange);
}

TEST_CASE("span round trip over random label sequences") {
  Rng rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto seq = random_labels(rng, 1 + rng.below(8));
    const auto spans = extract_spans(seq);
    const auto canonical = spans_to_labels(spans, seq.size());
    CHECK(extract_spans(canonical) == spans);
    CHECK(validate_bio(canonical).empty());
    for (std::size_t i = 1; i < spans.size(); ++i) CHECK(spans[i - 1].end < spans[i].start);
    if (validate_bio(seq).empty()) CHECK(canonical == seq);
  }
}

TEST_CASE("corpus_stats") {
  const auto c = parse_conll(
      "Иван B-PER\nи O\nМария B-PER\n\nв O\nСофия B-LOC\n");
  const auto st = corpus_stats(c);
  CHECK(st.sentences == 2);
  CHECK(st.tokens == 5);
  CHECK(st.count(EntityType::PER) == 2);
  CHECK(st.count(EntityType::LOC) == 1);
  CHECK(st.count(EntityType::ORG) == 0);
  CHECK(st.count(EntityType::MISC) == 0);

  const auto none = corpus_stats(parse_conll("a O\nb O\n"));
  CHECK(none.count(EntityType::PER) + none.count(EntityType::ORG) + none.count(EntityType::LOC) +
            none.count(EntityType::MISC) ==
        0);
  CHECK(code_of([] { corpus_stats(parse_conll("в O\nСофия I-LOC\n")); }) == Errc::BioViolation);

  const auto big = synthetic::planted_corpus(60, 9);
  const auto bs = corpus_stats(big);
  std::array<std::size_t, kEntityTypeCount> counted{};
  for (const auto& s : big.sentences)
    for (const auto& span : extract_spans(s.labels())) ++counted[static_cast<std::size_t>(span.type)];
  CHECK(bs.entities == counted);
  CHECK(bs.tokens >= bs.sentences);
}
