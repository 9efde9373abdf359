#include <doctest.h>

#include "morphotag/embeddings.hpp"
#include "morphotag/error.hpp"
#include "morphotag/synthetic.hpp"
#include "morphotag/text.hpp"
#include "support.hpp"

using namespace morphotag;

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

std::vector<double> vec(std::span<const double> s) { return {s.begin(), s.end()}; }

Corpus corpus_of(std::initializer_list<const char*> words) {
  Corpus c;
  Sentence s;
  for (const char* w : words) s.tokens.push_back({w, std::nullopt, Label::O, 0});
  c.sentences.push_back(s);
  return c;
}

}  // namespace

TEST_CASE("load_vectors") {
  const auto t = WordVectorTable::parse("2 3\nсофия 1 2 3\nВарна 0.5 -1 0\n");
  CHECK(t.size() == 2);
  CHECK(t.dimension() == 3);
  CHECK(vec(t.lookup("Варна")) == std::vector<double>{0.5, -1, 0});
  CHECK(vec(t.unk()) == std::vector<double>{0.75, 0.5, 1.5});

  CHECK(code_of([] { WordVectorTable::parse("2 3\na 1 2 3\nb 1 2\n"); }) == Errc::DimensionMismatch);
  CHECK(code_of([] { WordVectorTable::parse("2 3\na 1 2 3 4\nb 1 2 3\n"); }) == Errc::DimensionMismatch);
  CHECK(code_of([] { WordVectorTable::parse("2 3\na 1 x 3\nb 1 2 3\n"); }) == Errc::DimensionMismatch);
  CHECK(code_of([] { WordVectorTable::parse("3 3\na 1 2 3\nb 1 2 3\n"); }) == Errc::BadHeader);
  CHECK(code_of([] { WordVectorTable::parse("1 3\na 1 2 3\nb 1 2 3\n"); }) == Errc::BadHeader);
  CHECK(code_of([] { WordVectorTable::parse("two 3\n"); }) == Errc::BadHeader);
  CHECK(code_of([] { WordVectorTable::parse(""); }) == Errc::BadHeader);
  CHECK(code_of([] { WordVectorTable::parse("2 2\na 1 2\na 3 4\n"); }) == Errc::DuplicateWord);
}

TEST_CASE("unk is the mean vector") {
  const auto t = WordVectorTable::parse("2 2\nx 1 0\ny 3 2\n");
  CHECK(vec(t.unk()) == std::vector<double>{2, 1});
  CHECK(vec(t.lookup("нищо")) == std::vector<double>{2, 1});
  CHECK(t.row_of("нищо") == t.size());
  const auto m = t.with_unk_row();
  CHECK(m.shape == diff::Shape{3, 2});
  CHECK(m.at(2, 0) == 2);
  CHECK(m.at(1, 1) == 2);
}

TEST_CASE("lookup fallback order") {
  const auto t = WordVectorTable::parse("3 1\nсофия 1\nСофия 2\nвърна 3\n");
  CHECK(t.lookup("София")[0] == 2);  // exact match wins
  CHECK(t.lookup("ВЪРНА")[0] == 3);  // lowercased match
  CHECK(t.lookup("Върна")[0] == 3);
  CHECK(t.lookup("пловдив")[0] == doctest::Approx(2.0));
  CHECK(vec(t.lookup("върна")) == vec(t.lookup("върна")));
}

TEST_CASE("vector text round trip") {
  const auto c = synthetic::planted_corpus(5, 1);
  const auto t = synthetic::random_vectors({&c}, 4, 2);
  const auto again = WordVectorTable::parse(t.to_text());
  CHECK(again.words() == t.words());
  CHECK(again.to_text() == t.to_text());
  CHECK(WordVectorTable::load(testing::fixture("vectors.vec").string()).dimension() == 16);
}

TEST_CASE("char vocabulary") {
  const auto v = CharVocabulary::build(corpus_of({"аб", "ба"}));
  CHECK(v.size() == 3);
  CHECK(v.index(U'а') != CharVocabulary::kUnk);
  CHECK(v.index(U'б') != v.index(U'а'));
  CHECK(v.index(U'ы') == CharVocabulary::kUnk);
  CHECK(v.encode("аыб") == std::vector<std::size_t>{v.index(U'а'), 0, v.index(U'б')});

  // Independent of corpus order.
  const auto w = CharVocabulary::build(corpus_of({"ба", "аб"}));
  CHECK(w.chars() == v.chars());
  CHECK(CharVocabulary::from_chars(v.chars()).encode("баба") == v.encode("баба"));
}
