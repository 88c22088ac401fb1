#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tightclass {

enum class ErrorKind {
  BadDimensions,
  RankDeficient,
  InvalidConstant,
  ZeroColumn,
  Infeasible,
  DimensionMismatch,
  DegenerateDifference,
  InvalidArgument,
  Parse,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind so that front ends can
/// map it onto an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace tightclass
