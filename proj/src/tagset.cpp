#include "morphotag/tagset.hpp"

#include <algorithm>
#include <charconv>

#include "morphotag/error.hpp"
#include "morphotag/text.hpp"

namespace morphotag {

namespace {

constexpr std::string_view kDefaultMapping =
#include "tagset_default.inc"
    ;

struct FeatureValueName {
  TagsetMapping::Feature feature;
  std::uint8_t value;
  std::string_view name;
};

constexpr std::array<FeatureValueName, 11> kFeatureValues = {{
    {TagsetMapping::Feature::Gender, 0, "gender.masculine"},
    {TagsetMapping::Feature::Gender, 1, "gender.feminine"},
    {TagsetMapping::Feature::Gender, 2, "gender.neutral"},
    {TagsetMapping::Feature::Number, 0, "number.singular"},
    {TagsetMapping::Feature::Number, 1, "number.plural"},
    {TagsetMapping::Feature::Number, 2, "number.only-plural"},
    {TagsetMapping::Feature::Number, 3, "number.count-form"},
    {TagsetMapping::Feature::Definiteness, 0, "definiteness.indefinite"},
    {TagsetMapping::Feature::Definiteness, 1, "definiteness.definite"},
    {TagsetMapping::Feature::Definiteness, 2, "definiteness.short-definite"},
    {TagsetMapping::Feature::Definiteness, 3, "definiteness.full-definite"},
}};

// Group tables indexed by Pos (N A V H D R P C T M I).
constexpr std::array<std::uint8_t, kPosCount> kPos2 = {0, 0, 1, 0, 1, 0, 1, 1, 1, 1, 1};
constexpr std::array<std::uint8_t, kPosCount> kPos3 = {0, 0, 2, 0, 2, 1, 2, 2, 2, 2, 2};
constexpr std::array<std::uint8_t, kPosCount> kPos4 = {1, 0, 3, 1, 3, 2, 3, 3, 3, 3, 3};
constexpr std::array<std::uint8_t, kPosCount> kPos5 = {1, 0, 4, 2, 4, 3, 4, 4, 4, 4, 4};
constexpr std::array<std::uint8_t, kPosCount> kAnh2 = {0, 0, 1, 0, 1, 1, 1, 1, 1, 1, 1};

}  // namespace

std::optional<Pos> pos_from_letter(char c) noexcept {
  const auto i = kPosLetters.find(c);
  if (i == std::string_view::npos) return std::nullopt;
  return static_cast<Pos>(i);
}

char pos_letter(Pos p) noexcept { return kPosLetters[static_cast<std::size_t>(p)]; }

bool has_nominal_features(Pos p) noexcept { return p == Pos::N || p == Pos::A || p == Pos::H || p == Pos::P; }

TagsetMapping TagsetMapping::parse(std::string_view text) {
  TagsetMapping mapping;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = text::trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    auto fail = [&](const std::string& why) {
      return Error(Errc::BadMapping, "line " + std::to_string(line_no) + ": " + why);
    };
    const auto c1 = line.find(':');
    const auto c2 = c1 == std::string_view::npos ? c1 : line.find(':', c1 + 1);
    const auto eq = c2 == std::string_view::npos ? c2 : line.find('=', c2 + 1);
    if (eq == std::string_view::npos) throw fail("expected POS:position:char=feature.value");

    const auto pos_field = line.substr(0, c1);
    if (pos_field.size() != 1 || !pos_from_letter(pos_field[0])) throw fail("unknown POS letter");
    Rule rule{};
    rule.pos = *pos_from_letter(pos_field[0]);
    if (!has_nominal_features(rule.pos)) throw fail("only N, A, H and P carry features");

    const auto index_field = line.substr(c1 + 1, c2 - c1 - 1);
    const auto [ptr, ec] = std::from_chars(index_field.data(), index_field.data() + index_field.size(), rule.position);
    if (ec != std::errc{} || ptr != index_field.data() + index_field.size() || rule.position == 0)
      throw fail("bad position");

    const auto char_field = text::decode_utf8(line.substr(c2 + 1, eq - c2 - 1));
    if (char_field.size() != 1) throw fail("expected a single character");
    rule.character = char_field[0];

    const auto value_field = line.substr(eq + 1);
    const auto it = std::find_if(kFeatureValues.begin(), kFeatureValues.end(),
                                 [&](const auto& fv) { return fv.name == value_field; });
    if (it == kFeatureValues.end()) throw fail("unknown feature value '" + std::string(value_field) + "'");
    rule.feature = it->feature;
    rule.value = it->value;

    for (const auto& other : mapping.rules_)
      if (other.pos == rule.pos && other.position == rule.position && other.character == rule.character)
        throw fail("duplicate rule");
    mapping.rules_.push_back(rule);
  }
  return mapping;
}

TagsetMapping TagsetMapping::load(const std::string& path) { return parse(text::read_file(path)); }

const TagsetMapping& TagsetMapping::defaults() {
  static const TagsetMapping mapping = parse(kDefaultMapping);
  return mapping;
}

std::string_view TagsetMapping::default_text() noexcept { return kDefaultMapping; }

std::string TagsetMapping::to_text() const {
  std::string out;
  for (const auto& rule : rules_) {
    const auto it = std::find_if(kFeatureValues.begin(), kFeatureValues.end(), [&](const auto& fv) {
      return fv.feature == rule.feature && fv.value == rule.value;
    });
    out += pos_letter(rule.pos);
    out += ':' + std::to_string(rule.position) + ':' + text::encode_utf8(rule.character) + '=';
    out += it->name;
    out += '\n';
  }
  return out;
}

PositionalTag parse_tag(std::string_view raw, const TagsetMapping& mapping) {
  if (raw.empty()) throw Error(Errc::UnknownPosLetter, "empty tag");
  const auto pos = pos_from_letter(raw[0]);
  if (!pos) throw Error(Errc::UnknownPosLetter, "tag '" + std::string(raw) + "'");

  PositionalTag tag;
  tag.pos = *pos;
  if (!has_nominal_features(tag.pos)) return tag;

  const auto cps = text::decode_utf8(raw);
  for (const auto& rule : mapping.rules()) {
    if (rule.pos != tag.pos || rule.position >= cps.size() || cps[rule.position] != rule.character) continue;
    switch (rule.feature) {
      case TagsetMapping::Feature::Gender:
        if (!tag.gender) tag.gender = static_cast<Gender>(rule.value);
        break;
      case TagsetMapping::Feature::Number:
        if (!tag.number) tag.number = static_cast<Number>(rule.value);
        break;
      case TagsetMapping::Feature::Definiteness:
        if (!tag.definiteness) tag.definiteness = static_cast<Definiteness>(rule.value);
        break;
    }
  }
  return tag;
}

std::string render_tag(const PositionalTag& tag, const TagsetMapping& mapping) {
  std::u32string out(1, static_cast<char32_t>(pos_letter(tag.pos)));
  auto place = [&](TagsetMapping::Feature feature, std::uint8_t value) {
    for (const auto& rule : mapping.rules()) {
      if (rule.pos != tag.pos || rule.feature != feature || rule.value != value) continue;
      if (out.size() <= rule.position) out.resize(rule.position + 1, U'-');
      out[rule.position] = rule.character;
      return;
    }
  };
  if (tag.gender) place(TagsetMapping::Feature::Gender, static_cast<std::uint8_t>(*tag.gender));
  if (tag.number) place(TagsetMapping::Feature::Number, static_cast<std::uint8_t>(*tag.number));
  if (tag.definiteness) place(TagsetMapping::Feature::Definiteness, static_cast<std::uint8_t>(*tag.definiteness));
  return text::encode_utf8(out);
}

std::size_t partition_size(Partition p) noexcept {
  switch (p) {
    case Partition::POS2: return 2;
    case Partition::POS3: return 3;
    case Partition::POS4: return 4;
    case Partition::POS5: return 5;
    case Partition::POS11: return kPosCount;
    case Partition::ANH2: return 2;
  }
  return 0;
}

std::size_t pos_group(Pos pos, Partition partition) noexcept {
  const auto i = static_cast<std::size_t>(pos);
  switch (partition) {
    case Partition::POS2: return kPos2[i];
    case Partition::POS3: return kPos3[i];
    case Partition::POS4: return kPos4[i];
    case Partition::POS5: return kPos5[i];
    case Partition::POS11: return i;
    case Partition::ANH2: return kAnh2[i];
  }
  return 0;
}

std::string_view scheme_name(SchemeId id) noexcept {
  switch (id) {
    case SchemeId::None: return "none";
    case SchemeId::POS2: return "pos2";
    case SchemeId::POS3: return "pos3";
    case SchemeId::POS4: return "pos4";
    case SchemeId::POS5: return "pos5";
    case SchemeId::POS11: return "pos11";
    case SchemeId::POS3_11: return "pos3+11";
    case SchemeId::POS4_11: return "pos4+11";
  }
  return "?";
}

std::optional<SchemeId> parse_scheme_id(std::string_view s) noexcept {
  for (auto id : {SchemeId::None, SchemeId::POS2, SchemeId::POS3, SchemeId::POS4, SchemeId::POS5, SchemeId::POS11,
                  SchemeId::POS3_11, SchemeId::POS4_11}) {
    if (scheme_name(id) == s) return id;
  }
  return std::nullopt;
}

std::vector<Partition> FeatureScheme::partitions() const {
  const bool gloss = reading == CombinedReading::Gloss;
  switch (pos) {
    case SchemeId::None: return {};
    case SchemeId::POS2: return {Partition::POS2};
    case SchemeId::POS3: return {Partition::POS3};
    case SchemeId::POS4: return {Partition::POS4};
    case SchemeId::POS5: return {Partition::POS5};
    case SchemeId::POS11: return {Partition::POS11};
    case SchemeId::POS3_11: return {Partition::POS11, gloss ? Partition::POS2 : Partition::POS3};
    case SchemeId::POS4_11: return {Partition::POS11, gloss ? Partition::ANH2 : Partition::POS4};
  }
  return {};
}

std::size_t scheme_dim(const FeatureScheme& scheme) {
  std::size_t dim = 0;
  for (auto p : scheme.partitions()) dim += partition_size(p);
  if (scheme.morph) dim += kMorphDim;
  if (scheme.script) dim += 1;
  if (scheme.lexicon) dim += 1;
  return dim;
}

Lexicon Lexicon::parse(std::string_view text) {
  Lexicon lex;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto word = text::trim(text.substr(pos, nl - pos));
    if (!word.empty()) lex.insert(word);
    pos = nl + 1;
  }
  return lex;
}

Lexicon Lexicon::load(const std::string& path) { return parse(text::read_file(path)); }

void Lexicon::insert(std::string_view word) { words_.insert(text::to_lower(word)); }

std::vector<std::string> Lexicon::sorted_words() const {
  std::vector<std::string> out(words_.begin(), words_.end());
  std::sort(out.begin(), out.end());
  return out;
}

bool Lexicon::contains(std::string_view word) const { return words_.count(text::to_lower(word)) > 0; }

bool script_feature(std::string_view surface) {
  const auto cps = text::decode_utf8(surface);
  return std::any_of(cps.begin(), cps.end(), text::is_latin_letter);
}

std::vector<double> grammatical_vector(const PositionalTag* tag, const FeatureScheme& scheme, std::string_view surface,
                                       const Lexicon* lexicon) {
  std::vector<double> out(scheme_dim(scheme), 0.0);
  if (scheme.needs_tags() && !tag) throw Error(Errc::MissingTag, "token '" + std::string(surface) + "' has no tag");

  std::size_t offset = 0;
  for (auto p : scheme.partitions()) {
    out[offset + pos_group(tag->pos, p)] = 1.0;
    offset += partition_size(p);
  }
  if (scheme.morph) {
    if (has_nominal_features(tag->pos)) {
      if (tag->gender) out[offset + static_cast<std::size_t>(*tag->gender)] = 1.0;
      if (tag->number) out[offset + kGenderDim + static_cast<std::size_t>(*tag->number)] = 1.0;
      if (tag->definiteness)
        out[offset + kGenderDim + kNumberDim + static_cast<std::size_t>(*tag->definiteness)] = 1.0;
    }
    offset += kMorphDim;
  }
  if (scheme.script) out[offset++] = script_feature(surface) ? 1.0 : 0.0;
  if (scheme.lexicon) out[offset++] = (lexicon && lexicon->contains(surface)) ? 1.0 : 0.0;
  return out;
}

}  // namespace morphotag
