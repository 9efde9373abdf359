#include "morphotag/error.hpp"

namespace morphotag {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::EmptyFile: return "EmptyFile";
    case Errc::MixedColumnCount: return "MixedColumnCount";
    case Errc::UnknownLabel: return "UnknownLabel";
    case Errc::MissingLabel: return "MissingLabel";
    case Errc::BioViolation: return "BioViolation";
    case Errc::OverlappingSpans: return "OverlappingSpans";
    case Errc::SpanOutOfRange: return "SpanOutOfRange";
    case Errc::UnknownPosLetter: return "UnknownPosLetter";
    case Errc::BadMapping: return "BadMapping";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::NonFiniteGradient: return "NonFiniteGradient";
    case Errc::BadHeader: return "BadHeader";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::DuplicateWord: return "DuplicateWord";
    case Errc::MissingTag: return "MissingTag";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::DivergedLoss: return "DivergedLoss";
    case Errc::BadMagic: return "BadMagic";
    case Errc::VersionUnsupported: return "VersionUnsupported";
    case Errc::CorruptSection: return "CorruptSection";
    case Errc::BadConfig: return "BadConfig";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace morphotag
