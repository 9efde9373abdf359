#pragma once

// Pre-trained word vectors (fastText .vec text format) and the character
// vocabulary used by the character encoder.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "morphotag/corpus.hpp"
#include "morphotag/diff.hpp"

namespace morphotag {

class WordVectorTable {
 public:
  // Text format: header "count dim", then one "word v1 ... vd" line per entry.
  static WordVectorTable parse(std::string_view text);
  static WordVectorTable load(const std::string& path);
  // Builds a table from parallel word/vector lists; unk is the mean vector.
  static WordVectorTable from_rows(std::vector<std::string> words, diff::Tensor vectors);
  // .vec text with values printed to 6 decimals.
  std::string to_text() const;

  std::size_t dimension() const noexcept { return dim_; }
  std::size_t size() const noexcept { return words_.size(); }
  const std::vector<std::string>& words() const noexcept { return words_; }
  const diff::Tensor& vectors() const noexcept { return vectors_; }
  std::span<const double> unk() const noexcept { return unk_; }

  // Row for `word`: exact match, then lowercased match, else size() (the unk row).
  std::size_t row_of(std::string_view word) const;
  std::span<const double> lookup(std::string_view word) const;

  // [size()+1, dim] matrix whose last row is unk; the initial value of the
  // trainable embedding parameter.
  diff::Tensor with_unk_row() const;

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
  diff::Tensor vectors_;
  std::vector<double> unk_;
};

// Characters seen in the training split, sorted by code point. Index 0 is
// reserved for unseen characters.
class CharVocabulary {
 public:
  static constexpr std::size_t kUnk = 0;

  static CharVocabulary build(const Corpus& train);
  static CharVocabulary from_chars(std::u32string chars);

  std::size_t size() const noexcept { return chars_.size() + 1; }
  std::size_t index(char32_t c) const noexcept;
  std::vector<std::size_t> encode(std::string_view word) const;
  const std::u32string& chars() const noexcept { return chars_; }

 private:
  std::u32string chars_;
  std::unordered_map<char32_t, std::size_t> index_;
};

}  // namespace morphotag
