#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace flexplan {

// Every failure the library reports maps to one of these kinds. The CLI
// serializes the kind name into its machine-readable error JSON.
enum class ErrorKind {
  kInfeasibleBurn,
  kMissingCommodity,
  kConfigInvalid,
  kParseError,
  kValidationError,
  kDegenerateSamples,
  kOutOfRange,
  kHorizonExceeded,
  kUnreservedInterface,
  kDanglingDemand,
  kStatusInvalid,
  kZeroRateShortage,
  kTimelineGap,
  kNameCollision,
  kInfeasibleImport,
  kScenarioInfeasible,
  kIoError,
};

std::string_view error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string path = {});

  ErrorKind kind() const { return kind_; }
  // JSON-pointer-ish location of the offending field, empty when not
  // applicable.
  const std::string& path() const { return path_; }

 private:
  ErrorKind kind_;
  std::string path_;
};

}  // namespace flexplan
