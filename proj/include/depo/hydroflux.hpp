#pragma once

#include <cstddef>
#include <vector>

#include "depo/bricklayer.hpp"
#include "depo/characteristics.hpp"
#include "depo/solvers.hpp"

namespace depo {

/// Partition-function evaluator for one parity sector.
class ThermoTable {
 public:
  explicit ThermoTable(int parity = 0, double beta = 1.0, double tol = 1e-12);

  int parity() const { return parity_; }
  double beta() const { return beta_; }
  double tol() const { return tol_; }

  PartitionValues partition(double fugacity, double tilt) const;
  GibbsParams params(double fugacity, double tilt) const;

 private:
  int parity_;
  double beta_;
  double tol_;
};

struct MacroState {
  double rho = 0.0;  // mean occupation per site
  double u = 0.0;    // mean slope per site
};

struct Fugacities {
  double fugacity = 1.0;
  double tilt = 1.0;
  std::size_t iterations = 0;
};

/// rho = lambda d log Z / d lambda, u = theta d log Z / d theta.
MacroState macro_from_fug(double fugacity, double tilt, const ThermoTable& table);

/// Covariance matrix of (n, z) under the Gibbs measure, i.e. the Jacobian of
/// (rho, u) with respect to (log lambda, log theta).
Mat2 covariance(double fugacity, double tilt, const ThermoTable& table);

/// d(rho, u) / d(lambda, theta) = covariance * diag(1 / lambda, 1 / theta).
Mat2 macro_jacobian(double fugacity, double tilt, const ThermoTable& table);

/// Inverts macro_from_fug by damped Newton iteration in (log lambda, log theta),
/// started at (rho, 1 + c u). Requires rho > 0 (OutsideDomain otherwise);
/// throws NewtonDiverged after max_iter iterations.
Fugacities fug_from_macro(const MacroState& ms, const ThermoTable& table, double tol = 1e-12,
                          std::size_t max_iter = 100);

/// (J_rho, J_u) = (lambda (theta - 1/theta), lambda (theta + 1/theta)).
Vec2 macro_flux_fug(double fugacity, double tilt);
Vec2 macro_flux(const MacroState& ms, const ThermoTable& table);

/// Jacobian of the macroscopic flux with respect to (rho, u).
Mat2 macro_flux_jacobian(const MacroState& ms, const ThermoTable& table);

/// 1 / sum_{z = parity (mod 2)} z (z - 1) exp(-beta z^2 / 2).
double low_density_c(double beta, int parity, double tol = 1e-15);

/// Exact first-order coefficients of the inverse map at vanishing density:
/// lambda ~ kappa rho and theta ~ 1 + c_eff u, with
/// kappa = G_s / G_{1-s} and c_eff = G_s / G''_s, where G_p(theta) sums
/// theta^z exp(-beta z^2/2) over z = p (mod 2).
struct LowDensityCoefficients {
  double kappa = 0.0;
  double c_eff = 0.0;
};
LowDensityCoefficients low_density_coefficients(double beta, int parity);

/// Relative deviation of the rescaled fluxes from the target (rho u, rho).
/// Each state (rho, u) is mapped to (alpha^{2/3} rho, alpha^{1/3} u); the
/// fluxes there are normalized by their low-density linearization so that
///   J_rho / (alpha A) -> rho u  and  J_u / (alpha^{2/3} B) -> rho,
/// with A = 2 kappa c_eff and B = 2 kappa.
struct RescaledDeviation {
  double alpha = 1.0;
  double rho_flux = 0.0;  // relative l2 deviation over the states
  double u_flux = 0.0;
  double combined() const { return rho_flux > u_flux ? rho_flux : u_flux; }
};
RescaledDeviation rescaled_flux_limit(const std::vector<MacroState>& states, double alpha,
                                      const ThermoTable& table);

/// The hydrodynamic system d_t rho + d_x J_rho = 0, d_t u + d_x J_u = 0 as a
/// FluxModel for the finite-volume solvers.
FluxModel hydro_model(const ThermoTable& table);

}  // namespace depo
