#pragma once

// Positional morphosyntactic tags and the grammatical vectors derived from
// them: POS-group one-hots, gender/number/definiteness one-hots and the
// optional script and loanword-lexicon bits.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace morphotag {

// Index order of the POS11 one-hot.
enum class Pos : std::uint8_t { N, A, V, H, D, R, P, C, T, M, I };
inline constexpr std::size_t kPosCount = 11;
inline constexpr std::string_view kPosLetters = "NAVHDRPCTMI";

std::optional<Pos> pos_from_letter(char c) noexcept;
char pos_letter(Pos p) noexcept;
// Nouns, adjectives, hybrids and pronouns carry the nominal feature block.
bool has_nominal_features(Pos p) noexcept;

enum class Gender : std::uint8_t { Masculine, Feminine, Neutral };
enum class Number : std::uint8_t { Singular, Plural, OnlyPlural, CountForm };
enum class Definiteness : std::uint8_t { Indefinite, Definite, ShortDefinite, FullDefinite };

inline constexpr std::size_t kGenderDim = 3;
inline constexpr std::size_t kNumberDim = 4;
inline constexpr std::size_t kDefinitenessDim = 4;
inline constexpr std::size_t kMorphDim = kGenderDim + kNumberDim + kDefinitenessDim;

struct PositionalTag {
  Pos pos = Pos::N;
  std::optional<Gender> gender;
  std::optional<Number> number;
  std::optional<Definiteness> definiteness;

  friend bool operator==(const PositionalTag&, const PositionalTag&) = default;
};

// Maps (POS letter, character position, character) to one feature value.
// Text form, one rule per line: `POS:position:char=feature.value`, e.g.
// `N:2:f=gender.feminine`. Positions are 0-based offsets into the tag.
class TagsetMapping {
 public:
  enum class Feature : std::uint8_t { Gender, Number, Definiteness };

  struct Rule {
    Pos pos;
    std::size_t position;
    char32_t character;
    Feature feature;
    std::uint8_t value;
  };

  static TagsetMapping parse(std::string_view text);
  static TagsetMapping load(const std::string& path);
  // The mapping shipped in data/tagset.map.
  static const TagsetMapping& defaults();
  static std::string_view default_text() noexcept;
  // One rule per line in the text format above.
  std::string to_text() const;

  const std::vector<Rule>& rules() const noexcept { return rules_; }

 private:
  std::vector<Rule> rules_;
};

PositionalTag parse_tag(std::string_view raw, const TagsetMapping& mapping = TagsetMapping::defaults());
// Renders the modeled features back through the first matching rule of each
// feature; used to check that parsing is idempotent.
std::string render_tag(const PositionalTag& tag, const TagsetMapping& mapping = TagsetMapping::defaults());

// Partitions of the eleven POS letters. Group order is fixed:
//   POS2  [ANHR, REST]
//   POS3  [ANH, R, REST]
//   POS4  [A, NH, R, REST]
//   POS5  [A, N, H, R, REST]
//   POS11 [N, A, V, H, D, R, P, C, T, M, I]
//   ANH2  [ANH, REST]  (only used by the gloss reading of POS4+11)
enum class Partition : std::uint8_t { POS2, POS3, POS4, POS5, POS11, ANH2 };

std::size_t partition_size(Partition p) noexcept;
std::size_t pos_group(Pos pos, Partition partition) noexcept;

enum class SchemeId : std::uint8_t { None, POS2, POS3, POS4, POS5, POS11, POS3_11, POS4_11 };

// How "POSk+11" is built. Concat appends the POSk one-hot after the POS11
// one-hot. Gloss appends the coarse grouping named by the table legend
// instead ("ANHR" vs. REST for POS3+11, "ANH" vs. REST for POS4+11).
enum class CombinedReading : std::uint8_t { Concat, Gloss };

std::string_view scheme_name(SchemeId id) noexcept;
std::optional<SchemeId> parse_scheme_id(std::string_view s) noexcept;

struct FeatureScheme {
  SchemeId pos = SchemeId::None;
  bool morph = false;
  bool script = false;
  bool lexicon = false;
  CombinedReading reading = CombinedReading::Concat;

  std::vector<Partition> partitions() const;
  bool needs_tags() const noexcept { return pos != SchemeId::None || morph; }

  friend bool operator==(const FeatureScheme&, const FeatureScheme&) = default;
};

std::size_t scheme_dim(const FeatureScheme& scheme);

// Loanword lexicon: one word per line. Membership is case-insensitive.
class Lexicon {
 public:
  Lexicon() = default;
  static Lexicon parse(std::string_view text);
  static Lexicon load(const std::string& path);

  void insert(std::string_view word);
  bool contains(std::string_view word) const;
  std::size_t size() const noexcept { return words_.size(); }
  std::vector<std::string> sorted_words() const;

 private:
  std::unordered_set<std::string> words_;
};

bool script_feature(std::string_view surface);

// Block layout: POS one-hot(s), then gender(3) number(4) definiteness(4)
// when morph is on, then the script bit, then the lexicon bit. Tag may be
// null only when the scheme does not need tags.
std::vector<double> grammatical_vector(const PositionalTag* tag, const FeatureScheme& scheme, std::string_view surface,
                                       const Lexicon* lexicon = nullptr);

}  // namespace morphotag
