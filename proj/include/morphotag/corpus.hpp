#pragma once

// CoNLL-style BIO corpora: parsing, BIO validation, span extraction and
// summary statistics.
//
// File layout: one token per line, whitespace-separated columns
// `surface [tag] label`, blank line between sentences. Lines starting with
// '#' and `-DOCSTART-` lines are skipped.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace morphotag {

enum class EntityType : std::uint8_t { PER, ORG, LOC, MISC };
inline constexpr std::size_t kEntityTypeCount = 4;
inline constexpr std::array<EntityType, kEntityTypeCount> kEntityTypes = {
    EntityType::PER, EntityType::ORG, EntityType::LOC, EntityType::MISC};

// The nine BIO labels. The numeric order is the tag index used by the CRF,
// the emission matrix columns and the confusion matrix.
enum class Label : std::uint8_t { B_PER, I_PER, B_ORG, I_ORG, B_LOC, I_LOC, B_MISC, I_MISC, O };
inline constexpr std::size_t kLabelCount = 9;

std::string_view label_name(Label label) noexcept;
std::optional<Label> parse_label(std::string_view s) noexcept;
std::string_view entity_type_name(EntityType type) noexcept;

inline bool is_begin(Label l) noexcept { return l != Label::O && static_cast<int>(l) % 2 == 0; }
inline bool is_inside(Label l) noexcept { return l != Label::O && static_cast<int>(l) % 2 == 1; }
// Only valid for labels other than O.
inline EntityType entity_of(Label l) noexcept { return static_cast<EntityType>(static_cast<int>(l) / 2); }
inline Label begin_label(EntityType t) noexcept { return static_cast<Label>(static_cast<int>(t) * 2); }
inline Label inside_label(EntityType t) noexcept { return static_cast<Label>(static_cast<int>(t) * 2 + 1); }

struct Token {
  std::string surface;
  std::optional<std::string> tag;
  std::optional<Label> label;
  std::size_t line = 0;  // 1-based source line, 0 when built in memory
};

struct Sentence {
  std::vector<Token> tokens;

  std::size_t size() const noexcept { return tokens.size(); }
  std::vector<Label> labels() const;  // throws MissingLabel
};

struct Corpus {
  std::vector<Sentence> sentences;
  std::string split_name;

  std::size_t token_count() const noexcept;
};

struct EntitySpan {
  EntityType type;
  std::size_t start;  // inclusive
  std::size_t end;    // inclusive

  friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
};

enum class ViolationKind { OrphanInside, TypeMismatch };

struct Violation {
  std::size_t index;
  ViolationKind kind;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct CorpusStats {
  std::size_t sentences = 0;
  std::size_t tokens = 0;
  std::array<std::size_t, kEntityTypeCount> entities{};  // indexed by EntityType

  std::size_t count(EntityType t) const noexcept { return entities[static_cast<std::size_t>(t)]; }
};

// Labeled files have 2 (surface label) or 3 (surface tag label) columns.
// Unlabeled files, used for tagging, have 1 to 3 columns: surface, optional
// tag, optional label that is carried through but not required.
enum class Columns { Labeled, Unlabeled };

Corpus parse_conll(std::string_view text, Columns columns = Columns::Labeled, std::string split_name = {});
std::string serialize_conll(const Corpus& corpus);

std::vector<Violation> validate_bio(const Sentence& sentence);
std::vector<Violation> validate_bio(const std::vector<Label>& labels);

// conlleval chunk semantics: an I-X that does not continue an X chunk opens
// a new X span.
std::vector<EntitySpan> extract_spans(const std::vector<Label>& labels);
std::vector<Label> spans_to_labels(const std::vector<EntitySpan>& spans, std::size_t length);

CorpusStats corpus_stats(const Corpus& corpus);

}  // namespace morphotag
