#include "depo/error.hpp"

namespace depo {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotStrictlyHyperbolic: return "NotStrictlyHyperbolic";
    case ErrorKind::OutsideDomain: return "OutsideDomain";
    case ErrorKind::DegenerateJump: return "DegenerateJump";
    case ErrorKind::ZeroSpeed: return "ZeroSpeed";
    case ErrorKind::NoRealSpeed: return "NoRealSpeed";
    case ErrorKind::NotRankineHugoniot: return "NotRankineHugoniot";
    case ErrorKind::SingularInterval: return "SingularInterval";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::OutsideValidity: return "OutsideValidity";
    case ErrorKind::CflViolation: return "CflViolation";
    case ErrorKind::NonHyperbolicCell: return "NonHyperbolicCell";
    case ErrorKind::NonPhysicalState: return "NonPhysicalState";
    case ErrorKind::NoShockFound: return "NoShockFound";
    case ErrorKind::InconsistentInitialHeight: return "InconsistentInitialHeight";
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::NewtonDiverged: return "NewtonDiverged";
    case ErrorKind::FrozenState: return "FrozenState";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace depo
