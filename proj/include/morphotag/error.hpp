#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace morphotag {

// Every failure the toolkit reports carries one of these codes so callers
// (and the CLI) can branch on the kind of error rather than the message.
enum class Errc {
  // corpus
  EmptyFile,
  MixedColumnCount,
  UnknownLabel,
  MissingLabel,
  BioViolation,
  OverlappingSpans,
  SpanOutOfRange,
  // tagset
  UnknownPosLetter,
  BadMapping,
  // diffcore
  ShapeMismatch,
  NonFiniteValue,
  NonFiniteGradient,
  // embeddings
  BadHeader,
  DimensionMismatch,
  DuplicateWord,
  // model / crf / eval
  MissingTag,
  LengthMismatch,
  // train / checkpoint
  DivergedLoss,
  BadMagic,
  VersionUnsupported,
  CorruptSection,
  // cli / io
  BadConfig,
  Io,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace morphotag
