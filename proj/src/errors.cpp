#include "flexplan/errors.hpp"

namespace flexplan {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInfeasibleBurn: return "InfeasibleBurn";
    case ErrorKind::kMissingCommodity: return "MissingCommodity";
    case ErrorKind::kConfigInvalid: return "ConfigInvalid";
    case ErrorKind::kParseError: return "ParseError";
    case ErrorKind::kValidationError: return "ValidationError";
    case ErrorKind::kDegenerateSamples: return "DegenerateSamples";
    case ErrorKind::kOutOfRange: return "OutOfRange";
    case ErrorKind::kHorizonExceeded: return "HorizonExceeded";
    case ErrorKind::kUnreservedInterface: return "UnreservedInterface";
    case ErrorKind::kDanglingDemand: return "DanglingDemand";
    case ErrorKind::kStatusInvalid: return "StatusInvalid";
    case ErrorKind::kZeroRateShortage: return "ZeroRateShortage";
    case ErrorKind::kTimelineGap: return "TimelineGap";
    case ErrorKind::kNameCollision: return "NameCollision";
    case ErrorKind::kInfeasibleImport: return "InfeasibleImport";
    case ErrorKind::kScenarioInfeasible: return "ScenarioInfeasible";
    case ErrorKind::kIoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message, std::string path)
    : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message +
                         (path.empty() ? std::string() : " (at " + path + ")")),
      kind_(kind),
      path_(std::move(path)) {}

}  // namespace flexplan
