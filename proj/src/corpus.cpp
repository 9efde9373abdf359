#include "morphotag/corpus.hpp"

#include <algorithm>

#include "morphotag/error.hpp"
#include "morphotag/text.hpp"

namespace morphotag {

namespace {

constexpr std::array<std::string_view, kLabelCount> kLabelNames = {
    "B-PER", "I-PER", "B-ORG", "I-ORG", "B-LOC", "I-LOC", "B-MISC", "I-MISC", "O"};

std::string at_line(std::size_t line) { return "line " + std::to_string(line); }

}  // namespace

std::string_view label_name(Label label) noexcept { return kLabelNames[static_cast<std::size_t>(label)]; }

std::optional<Label> parse_label(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kLabelCount; ++i)
    if (kLabelNames[i] == s) return static_cast<Label>(i);
  return std::nullopt;
}

std::string_view entity_type_name(EntityType type) noexcept {
  switch (type) {
    case EntityType::PER: return "PER";
    case EntityType::ORG: return "ORG";
    case EntityType::LOC: return "LOC";
    case EntityType::MISC: return "MISC";
  }
  return "?";
}

std::vector<Label> Sentence::labels() const {
  std::vector<Label> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!tokens[i].label)
      throw Error(Errc::MissingLabel, "token " + std::to_string(i) + " (" + tokens[i].surface + ") has no label");
    out.push_back(*tokens[i].label);
  }
  return out;
}

std::size_t Corpus::token_count() const noexcept {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

Corpus parse_conll(std::string_view text, Columns columns, std::string split_name) {
  text::decode_utf8(text);  // validates encoding

  Corpus corpus;
  corpus.split_name = std::move(split_name);
  Sentence current;
  std::size_t width = 0;
  std::size_t line_no = 0;

  auto flush = [&] {
    if (!current.tokens.empty()) corpus.sentences.push_back(std::move(current));
    current = Sentence{};
  };

  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    auto cols = text::split_ws(line);
    if (cols.empty()) {
      flush();
      continue;
    }
    if (cols[0].starts_with("#")) continue;
    if (cols[0] == "-DOCSTART-") {
      flush();
      continue;
    }

    if (width == 0) {
      width = cols.size();
      const bool ok = columns == Columns::Labeled ? (width == 2 || width == 3) : (width >= 1 && width <= 3);
      if (!ok) {
        if (columns == Columns::Labeled && width == 1)
          throw Error(Errc::MissingLabel, at_line(line_no) + ": no label column");
        throw Error(Errc::MixedColumnCount, at_line(line_no) + ": unsupported column count " + std::to_string(width));
      }
    } else if (cols.size() != width) {
      throw Error(Errc::MixedColumnCount, at_line(line_no) + ": expected " + std::to_string(width) + " columns, got " +
                                              std::to_string(cols.size()));
    }

    Token tok;
    tok.surface = std::string(cols[0]);
    tok.line = line_no;
    const bool has_label = columns == Columns::Labeled || width == 3;
    const std::size_t tag_cols = width - 1 - (has_label ? 1 : 0);
    if (tag_cols == 1) tok.tag = std::string(cols[1]);
    if (has_label) {
      auto label = parse_label(cols[width - 1]);
      if (!label) throw Error(Errc::UnknownLabel, at_line(line_no) + ": '" + std::string(cols[width - 1]) + "'");
      tok.label = *label;
    }
    current.tokens.push_back(std::move(tok));
    if (nl == text.size()) break;
  }
  flush();

  if (corpus.sentences.empty()) throw Error(Errc::EmptyFile, "no tokens found");
  return corpus;
}

std::string serialize_conll(const Corpus& corpus) {
  std::string out;
  for (const auto& sentence : corpus.sentences) {
    for (const auto& tok : sentence.tokens) {
      out += tok.surface;
      if (tok.tag) {
        out += ' ';
        out += *tok.tag;
      }
      if (tok.label) {
        out += ' ';
        out += label_name(*tok.label);
      }
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

std::vector<Violation> validate_bio(const std::vector<Label>& labels) {
  std::vector<Violation> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!is_inside(labels[i])) continue;
    if (i == 0 || labels[i - 1] == Label::O) {
      out.push_back({i, ViolationKind::OrphanInside});
    } else if (entity_of(labels[i - 1]) != entity_of(labels[i])) {
      out.push_back({i, ViolationKind::TypeMismatch});
    }
  }
  return out;
}

std::vector<Violation> validate_bio(const Sentence& sentence) { return validate_bio(sentence.labels()); }

std::vector<EntitySpan> extract_spans(const std::vector<Label>& labels) {
  std::vector<EntitySpan> spans;
  std::optional<EntitySpan> open;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const Label l = labels[i];
    const bool continues = is_inside(l) && open && open->type == entity_of(l);
    if (continues) {
      open->end = i;
      continue;
    }
    if (open) {
      spans.push_back(*open);
      open.reset();
    }
    if (l != Label::O) open = EntitySpan{entity_of(l), i, i};
  }
  if (open) spans.push_back(*open);
  return spans;
}

std::vector<Label> spans_to_labels(const std::vector<EntitySpan>& spans, std::size_t length) {
  std::vector<EntitySpan> sorted = spans;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
  std::vector<Label> labels(length, Label::O);
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const auto& span = sorted[k];
    if (span.start > span.end || span.end >= length)
      throw Error(Errc::SpanOutOfRange, "span [" + std::to_string(span.start) + "," + std::to_string(span.end) +
                                            "] outside sentence of length " + std::to_string(length));
    if (k > 0 && sorted[k - 1].end >= span.start)
      throw Error(Errc::OverlappingSpans, "spans starting at " + std::to_string(sorted[k - 1].start) + " and " +
                                              std::to_string(span.start) + " overlap");
    labels[span.start] = begin_label(span.type);
    for (std::size_t i = span.start + 1; i <= span.end; ++i) labels[i] = inside_label(span.type);
  }
  return labels;
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  stats.sentences = corpus.sentences.size();
  for (const auto& sentence : corpus.sentences) {
    const auto labels = sentence.labels();
    const auto violations = validate_bio(labels);
    if (!violations.empty()) {
      const auto& tok = sentence.tokens[violations.front().index];
      throw Error(Errc::BioViolation, "invalid BIO sequence at token '" + tok.surface + "'" +
                                          (tok.line ? " (" + at_line(tok.line) + ")" : std::string{}));
    }
    stats.tokens += sentence.size();
    for (const auto& span : extract_spans(labels)) ++stats.entities[static_cast<std::size_t>(span.type)];
  }
  return stats;
}

}  // namespace morphotag
