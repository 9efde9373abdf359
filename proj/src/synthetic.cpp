#include "morphotag/synthetic.hpp"

#include <set>
#include <string>

#include "morphotag/rng.hpp"

namespace morphotag::synthetic {

namespace {

struct Word {
  const char* surface;
  const char* tag;
};

constexpr Word kFirstNames[] = {{"Иван", "Npmsi"},   {"Мария", "Npfsi"}, {"Петър", "Npmsi"}, {"Елена", "Npfsi"},
                                {"Георги", "Npmsi"}, {"Анна", "Npfsi"},  {"Христо", "Npmsi"}, {"Десислава", "Npfsi"}};
constexpr Word kFamilyNames[] = {{"Петров", "Hmsi"},    {"Иванова", "Hfsi"}, {"Стоичков", "Hmsi"},
                                 {"Вълчев", "Hmsi"},    {"Георгиева", "Hfsi"}, {"Димитров", "Hmsi"}};
constexpr Word kPlaces[] = {{"София", "Npfsi"}, {"Пловдив", "Npmsi"}, {"Варна", "Npfsi"},
                            {"Бургас", "Npmsi"}, {"Русе", "Npnsi"},   {"Велико", "Npnsi"}};
constexpr Word kOrgHeads[] = {{"Българската", "Afsd"}, {"Народното", "Ansd"}, {"Софийският", "Amsf"},
                              {"Националната", "Afsd"}};
constexpr Word kOrgTails[] = {{"академия", "Ncfsi"}, {"събрание", "Ncnsi"}, {"университет", "Ncmsi"},
                              {"библиотека", "Ncfsi"}};
constexpr Word kVerbs[] = {{"посети", "Vpptf-o3s"}, {"пристигна", "Vpptf-o3s"}, {"видя", "Vpptf-o3s"},
                           {"говори", "Vpitf-r3s"}, {"замина", "Vpptf-o3s"}, {"покани", "Vpptf-o3s"}};
constexpr Word kPreps[] = {{"в", "R"}, {"на", "R"}, {"от", "R"}, {"към", "R"}};
constexpr Word kCommon[] = {{"среща", "Ncfsi"}, {"града", "Ncmsh"}, {"книга", "Ncfsi"}, {"деня", "Ncmsh"},
                            {"писмо", "Ncnsi"}, {"хората", "Ncmpd"}};
constexpr Word kAdverbs[] = {{"вчера", "Dt"}, {"днес", "Dt"}, {"отново", "Dd"}, {"рано", "Dt"}};
constexpr Word kConj[] = {{"и", "Cp"}, {"но", "Cp"}};
constexpr Word kPronouns[] = {{"той", "Ppe-os3m"}, {"тя", "Ppe-os3f"}, {"те", "Ppe-op3"}};

template <std::size_t N>
const Word& pick(const Word (&words)[N], Rng& rng) {
  return words[rng.below(N)];
}

void push(Sentence& s, const Word& w, Label label) { s.tokens.push_back(Token{w.surface, w.tag, label, 0}); }

void person(Sentence& s, Rng& rng) {
  push(s, pick(kFirstNames, rng), Label::B_PER);
  if (rng.below(2) == 0) push(s, pick(kFamilyNames, rng), Label::I_PER);
}

void place(Sentence& s, Rng& rng) { push(s, pick(kPlaces, rng), Label::B_LOC); }

void organization(Sentence& s, Rng& rng) {
  push(s, pick(kOrgHeads, rng), Label::B_ORG);
  push(s, pick(kOrgTails, rng), Label::I_ORG);
}

}  // namespace

Corpus planted_corpus(std::size_t sentences, std::uint64_t seed) {
  Rng rng(seed);
  Corpus corpus;
  corpus.split_name = "synthetic";
  while (corpus.sentences.size() < sentences) {
    Sentence s;
    switch (rng.below(5)) {
      case 0:  // PER VERB в LOC
        person(s, rng);
        push(s, pick(kVerbs, rng), Label::O);
        push(s, kPreps[0], Label::O);
        place(s, rng);
        break;
      case 1:  // вчера PER VERB ORG
        push(s, pick(kAdverbs, rng), Label::O);
        person(s, rng);
        push(s, pick(kVerbs, rng), Label::O);
        organization(s, rng);
        break;
      case 2:  // ORG VERB PER на среща в LOC
        organization(s, rng);
        push(s, pick(kVerbs, rng), Label::O);
        person(s, rng);
        push(s, kPreps[1], Label::O);
        push(s, pick(kCommon, rng), Label::O);
        push(s, kPreps[0], Label::O);
        place(s, rng);
        break;
      case 3:  // PER и PER VERB от LOC
        person(s, rng);
        push(s, kConj[0], Label::O);
        person(s, rng);
        push(s, pick(kVerbs, rng), Label::O);
        push(s, kPreps[2], Label::O);
        place(s, rng);
        break;
      default:  // той VERB COMMON днес
        push(s, pick(kPronouns, rng), Label::O);
        push(s, pick(kVerbs, rng), Label::O);
        push(s, pick(kCommon, rng), Label::O);
        push(s, pick(kAdverbs, rng), Label::O);
        break;
    }
    corpus.sentences.push_back(std::move(s));
  }
  return corpus;
}

Corpus tag_decided_corpus(std::size_t sentences, std::uint64_t seed) {
  // Invented forms with no lexical cue to their role.
  static constexpr const char* kShared[] = {"Дерка", "Монел", "Тиран", "Бора", "Салва", "Кремен",
                                            "Лозан", "Ведра", "Грам", "Студа", "Пирин", "Мелник"};
  static constexpr Word kFiller[] = {{"днес", "Dt"}, {"и", "Cp"}, {"много", "Md"}, {"ох", "I"},
                                     {"в", "R"},     {"той", "Ppe-os3m"}, {"да", "Tx"}, {"град", "Ncmsi"}};
  Rng rng(seed);
  Corpus corpus;
  corpus.split_name = "synthetic-tag-decided";
  while (corpus.sentences.size() < sentences) {
    Sentence s;
    const std::size_t len = 5 + rng.below(4);
    for (std::size_t i = 0; i < len; ++i) {
      if (rng.below(2) == 0) {
        push(s, pick(kFiller, rng), Label::O);
        continue;
      }
      const char* surface = kShared[rng.below(std::size(kShared))];
      switch (rng.below(4)) {
        case 0: s.tokens.push_back(Token{surface, "Hmsi", Label::B_PER, 0}); break;
        case 1: s.tokens.push_back(Token{surface, "Npfsi", Label::B_LOC, 0}); break;
        case 2: s.tokens.push_back(Token{surface, "Vpitf-r3s", Label::O, 0}); break;
        default: s.tokens.push_back(Token{surface, "Dd", Label::O, 0}); break;
      }
    }
    corpus.sentences.push_back(std::move(s));
  }
  return corpus;
}

WordVectorTable random_vectors(const std::vector<const Corpus*>& corpora, std::size_t dim, std::uint64_t seed) {
  std::set<std::string> surfaces;
  for (const auto* c : corpora)
    for (const auto& s : c->sentences)
      for (const auto& t : s.tokens) surfaces.insert(t.surface);
  Rng rng(seed);
  std::vector<std::string> words(surfaces.begin(), surfaces.end());
  diff::Tensor vectors(diff::Shape{words.size(), dim});
  for (auto& v : vectors.data) v = rng.uniform(-0.5, 0.5);
  return WordVectorTable::from_rows(std::move(words), std::move(vectors));
}

}  // namespace morphotag::synthetic
