#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace otsphere {

enum class ErrorCode {
  DegenerateFrame,
  CapExceeded,
  DegenerateCell,
  InvalidMesh,
  NotPointwise,
  DomainError,
  CellNotFound,
  QuadratureFailure,
  RootBracketFailure,
  RankDeficient,
  PoleProximity,
  FoldDetected,
  NotConverged,
  ParseError,
  ValidationError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto an exit status and a machine-readable error record.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace otsphere
