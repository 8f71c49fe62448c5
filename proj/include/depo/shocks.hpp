#pragma once

#include "depo/characteristics.hpp"

namespace depo {

enum class ShockClass { BackShock, FrontShock, Unstable };

const char* to_string(ShockClass c);

struct ShockData {
  PhysState left;
  PhysState right;
  double sigma = 0.0;
  ShockClass classification = ShockClass::Unstable;
};

/// Rankine-Hugoniot residuals r1 = [rho u] - sigma [rho], r2 = [rho] - sigma [u]
/// with [q] = q_right - q_left. Throws DegenerateJump if [rho] or [u] is zero.
struct RhResidual {
  double r1 = 0.0;
  double r2 = 0.0;
};

RhResidual rh_residual(const PhysState& left, const PhysState& right, double sigma);

/// Right state joined to `left` by a discontinuity moving at `sigma`:
/// (sigma^2 - sigma u_left, sigma - rho_left / sigma).
PhysState right_state_from_speed(const PhysState& left, double sigma);

/// Both roots of sigma^2 - sigma u_right - rho_left = 0, larger first. The
/// caller picks the root with vanishing RH residual.
struct ShockSpeeds {
  double plus = 0.0;
  double minus = 0.0;
};

ShockSpeeds shock_speeds(const PhysState& left, const PhysState& right);

struct LaxOptions {
  double rh_tolerance = 1e-8;  // relative
  double margin = 0.0;         // strictness margin on the Lax inequalities
};

/// Lax classification of an RH discontinuity. Equality cases are Unstable.
ShockClass classify_discontinuity(const PhysState& left, const PhysState& right, double sigma,
                                  const LaxOptions& opts = {});

ShockData make_shock(const PhysState& left, double sigma, const LaxOptions& opts = {});

}  // namespace depo
