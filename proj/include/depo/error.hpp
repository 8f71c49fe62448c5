#pragma once

#include <stdexcept>
#include <string>

namespace depo {

enum class ErrorKind {
  NotStrictlyHyperbolic,
  OutsideDomain,
  DegenerateJump,
  ZeroSpeed,
  NoRealSpeed,
  NotRankineHugoniot,
  SingularInterval,
  OutOfRange,
  OutsideValidity,
  CflViolation,
  NonHyperbolicCell,
  NonPhysicalState,
  NoShockFound,
  InconsistentInitialHeight,
  NonConvergent,
  NewtonDiverged,
  FrozenState,
  InvalidArgument,
};

const char* to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (and the CLI
// exit-code mapping) can dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace depo
