#include "tightclass/error.hpp"

namespace tightclass {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::BadDimensions: return "BadDimensions";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::InvalidConstant: return "InvalidConstant";
    case ErrorKind::ZeroColumn: return "ZeroColumn";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DegenerateDifference: return "DegenerateDifference";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace tightclass
