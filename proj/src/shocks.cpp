#include "depo/shocks.hpp"

#include <algorithm>
#include <cmath>

#include "depo/error.hpp"

namespace depo {

const char* to_string(ShockClass c) {
  switch (c) {
    case ShockClass::BackShock: return "BackShock";
    case ShockClass::FrontShock: return "FrontShock";
    case ShockClass::Unstable: return "Unstable";
  }
  return "Unknown";
}

RhResidual rh_residual(const PhysState& left, const PhysState& right, double sigma) {
  const double jump_rho = right.rho - left.rho;
  const double jump_u = right.u - left.u;
  if (jump_rho == 0.0 || jump_u == 0.0) {
    throw Error(ErrorKind::DegenerateJump, "rh_residual needs [rho] != 0 and [u] != 0");
  }
  const double jump_flux = right.rho * right.u - left.rho * left.u;
  return {jump_flux - sigma * jump_rho, jump_rho - sigma * jump_u};
}

PhysState right_state_from_speed(const PhysState& left, double sigma) {
  if (sigma == 0.0) throw Error(ErrorKind::ZeroSpeed, "sigma = 0");
  return {sigma * sigma - sigma * left.u, sigma - left.rho / sigma};
}

ShockSpeeds shock_speeds(const PhysState& left, const PhysState& right) {
  const double d = right.u * right.u + 4.0 * left.rho;
  if (d < 0.0) throw Error(ErrorKind::NoRealSpeed, "u_right^2 + 4 rho_left < 0");
  const double q = std::sqrt(d);
  return {0.5 * (right.u + q), 0.5 * (right.u - q)};
}

ShockClass classify_discontinuity(const PhysState& left, const PhysState& right, double sigma,
                                  const LaxOptions& opts) {
  const double jump_rho = right.rho - left.rho;
  const double jump_u = right.u - left.u;
  if (jump_rho == 0.0 && jump_u == 0.0) {
    throw Error(ErrorKind::NotRankineHugoniot, "left and right states coincide");
  }
  const double jump_flux = right.rho * right.u - left.rho * left.u;
  const double r1 = jump_flux - sigma * jump_rho;
  const double r2 = jump_rho - sigma * jump_u;
  const double scale = std::max({std::abs(jump_flux), std::abs(sigma * jump_rho),
                                 std::abs(jump_rho), std::abs(sigma * jump_u)});
  if (std::abs(r1) > opts.rh_tolerance * scale || std::abs(r2) > opts.rh_tolerance * scale) {
    throw Error(ErrorKind::NotRankineHugoniot, "states and speed violate the RH conditions");
  }
  // Stationary jumps can only join two vacuum states; they are never Lax shocks.
  if (sigma == 0.0) return ShockClass::Unstable;

  const auto [mu_l, lambda_l] = char_speeds(left);
  const auto [mu_r, lambda_r] = char_speeds(right);
  const double m = opts.margin;
  if (mu_r + m < sigma && sigma + m < std::min(mu_l, lambda_r)) return ShockClass::BackShock;
  if (std::max(lambda_r, mu_l) + m < sigma && sigma + m < lambda_l) return ShockClass::FrontShock;
  return ShockClass::Unstable;
}

ShockData make_shock(const PhysState& left, double sigma, const LaxOptions& opts) {
  ShockData s;
  s.left = left;
  s.right = right_state_from_speed(left, sigma);
  s.sigma = sigma;
  s.classification = classify_discontinuity(s.left, s.right, sigma, opts);
  return s;
}

}  // namespace depo
