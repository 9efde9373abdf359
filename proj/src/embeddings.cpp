#include "morphotag/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <set>

#include "morphotag/error.hpp"
#include "morphotag/text.hpp"

namespace morphotag {

namespace {

bool parse_size(std::string_view s, std::size_t& out) {
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

bool parse_double(std::string_view s, double& out) {
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

}  // namespace

WordVectorTable WordVectorTable::parse(std::string_view text) {
  std::size_t pos = 0;
  auto next_line = [&](std::string_view& line) {
    if (pos >= text.size()) return false;
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = nl + 1;
    return true;
  };

  std::string_view line;
  if (!next_line(line)) throw Error(Errc::BadHeader, "empty vector file");
  const auto header = text::split_ws(line);
  std::size_t count = 0, dim = 0;
  if (header.size() != 2 || !parse_size(header[0], count) || !parse_size(header[1], dim) || dim == 0)
    throw Error(Errc::BadHeader, "expected 'count dim', got '" + std::string(line) + "'");

  std::vector<std::string> words;
  std::vector<double> values;
  words.reserve(count);
  values.reserve(count * dim);
  std::size_t line_no = 1;
  while (next_line(line)) {
    ++line_no;
    const auto cols = text::split_ws(line);
    if (cols.empty()) continue;
    if (cols.size() != dim + 1)
      throw Error(Errc::DimensionMismatch, "line " + std::to_string(line_no) + ": " + std::to_string(cols.size() - 1) +
                                               " values, header says " + std::to_string(dim));
    words.emplace_back(cols[0]);
    for (std::size_t k = 1; k <= dim; ++k) {
      double v = 0.0;
      if (!parse_double(cols[k], v))
        throw Error(Errc::DimensionMismatch, "line " + std::to_string(line_no) + ": bad number '" +
                                                 std::string(cols[k]) + "'");
      values.push_back(v);
    }
  }
  if (words.size() != count)
    throw Error(Errc::BadHeader, "header announces " + std::to_string(count) + " vectors, file has " +
                                     std::to_string(words.size()));
  return from_rows(std::move(words), diff::Tensor(diff::Shape{count, dim}, std::move(values)));
}

WordVectorTable WordVectorTable::load(const std::string& path) { return parse(text::read_file(path)); }

WordVectorTable WordVectorTable::from_rows(std::vector<std::string> words, diff::Tensor vectors) {
  if (vectors.rank() != 2 || vectors.shape[0] != words.size() || vectors.shape[1] == 0)
    throw Error(Errc::DimensionMismatch, "vector matrix does not match word list");
  WordVectorTable table;
  table.dim_ = vectors.shape[1];
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (!table.index_.emplace(words[i], i).second) throw Error(Errc::DuplicateWord, "'" + words[i] + "'");
  }
  table.words_ = std::move(words);
  table.vectors_ = std::move(vectors);
  table.unk_.assign(table.dim_, 0.0);
  const std::size_t n = table.words_.size();
  if (n > 0) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < table.dim_; ++j) table.unk_[j] += table.vectors_.at(i, j);
    for (auto& v : table.unk_) v /= static_cast<double>(n);
  }
  return table;
}

std::string WordVectorTable::to_text() const {
  std::string out = std::to_string(words_.size()) + " " + std::to_string(dim_) + "\n";
  char buf[32];
  for (std::size_t i = 0; i < words_.size(); ++i) {
    out += words_[i];
    for (std::size_t j = 0; j < dim_; ++j) {
      std::snprintf(buf, sizeof buf, " %.6f", vectors_.at(i, j));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::size_t WordVectorTable::row_of(std::string_view word) const {
  if (auto it = index_.find(std::string(word)); it != index_.end()) return it->second;
  if (auto it = index_.find(text::to_lower(word)); it != index_.end()) return it->second;
  return words_.size();
}

std::span<const double> WordVectorTable::lookup(std::string_view word) const {
  const std::size_t r = row_of(word);
  if (r == words_.size()) return unk_;
  return {&vectors_.data[r * dim_], dim_};
}

diff::Tensor WordVectorTable::with_unk_row() const {
  diff::Tensor t(diff::Shape{words_.size() + 1, dim_});
  std::copy(vectors_.data.begin(), vectors_.data.end(), t.data.begin());
  std::copy(unk_.begin(), unk_.end(), t.data.begin() + static_cast<std::ptrdiff_t>(words_.size() * dim_));
  return t;
}

CharVocabulary CharVocabulary::build(const Corpus& train) {
  std::set<char32_t> seen;
  for (const auto& sentence : train.sentences)
    for (const auto& tok : sentence.tokens)
      for (char32_t c : text::decode_utf8(tok.surface)) seen.insert(c);
  return from_chars(std::u32string(seen.begin(), seen.end()));
}

CharVocabulary CharVocabulary::from_chars(std::u32string chars) {
  CharVocabulary vocab;
  vocab.chars_ = std::move(chars);
  for (std::size_t i = 0; i < vocab.chars_.size(); ++i) vocab.index_.emplace(vocab.chars_[i], i + 1);
  return vocab;
}

std::size_t CharVocabulary::index(char32_t c) const noexcept {
  auto it = index_.find(c);
  return it == index_.end() ? kUnk : it->second;
}

std::vector<std::size_t> CharVocabulary::encode(std::string_view word) const {
  std::vector<std::size_t> out;
  for (char32_t c : text::decode_utf8(word)) out.push_back(index(c));
  return out;
}

}  // namespace morphotag
