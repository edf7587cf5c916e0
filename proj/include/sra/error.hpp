#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sra {

enum class Errc {
  EmptyInput,
  TooFewPoints,
  InvalidArgument,
  InvalidInterval,
  DegenerateRange,
  InvalidEdges,
  EdgesDoNotCover,
  DivergentRank,
  RankOutOfRange,
  InconsistentDeadTime,
  NonPositiveScale,
  DegenerateVariance,
  DegenerateDenominator,
  InsufficientData,
  ParseError,
  NonMonotonicTimestamps,
  IoError,
};

constexpr std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::TooFewPoints: return "TooFewPoints";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InvalidInterval: return "InvalidInterval";
    case Errc::DegenerateRange: return "DegenerateRange";
    case Errc::InvalidEdges: return "InvalidEdges";
    case Errc::EdgesDoNotCover: return "EdgesDoNotCover";
    case Errc::DivergentRank: return "DivergentRank";
    case Errc::RankOutOfRange: return "RankOutOfRange";
    case Errc::InconsistentDeadTime: return "InconsistentDeadTime";
    case Errc::NonPositiveScale: return "NonPositiveScale";
    case Errc::DegenerateVariance: return "DegenerateVariance";
    case Errc::DegenerateDenominator: return "DegenerateDenominator";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::ParseError: return "ParseError";
    case Errc::NonMonotonicTimestamps: return "NonMonotonicTimestamps";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

/// Library exception. `position()` carries a 1-based line number for record
/// parsing errors and a 0-based element index for in-memory validation.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message,
        std::optional<std::size_t> position = std::nullopt)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code),
        position_(position) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }
  [[nodiscard]] std::optional<std::size_t> position() const noexcept { return position_; }

 private:
  Errc code_;
  std::optional<std::size_t> position_;
};

}  // namespace sra
