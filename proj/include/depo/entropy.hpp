#pragma once

#include <functional>
#include <string>
#include <vector>

#include "depo/characteristics.hpp"
#include "depo/field.hpp"

namespace depo {

/// An entropy S with flux F: smooth solutions satisfy dS/dt + dF/dx = 0, i.e.
///   dF/drho = u dS/drho + dS/du,   dF/du = rho dS/drho.
struct EntropyPair {
  std::string name;
  std::function<double(const PhysState&)> S;
  std::function<double(const PhysState&)> F;
  std::function<Vec2(const PhysState&)> grad_S;
  std::function<Vec2(const PhysState&)> grad_F;
  std::function<Mat2(const PhysState&)> hess_S;
  std::function<bool(const PhysState&)> valid;
  /// Set from a sampled Hessian test; advisory, not a proof.
  bool convex = false;
};

/// S = rho log rho + u^2/2, F = u rho (log rho + 1). S and F extend to
/// rho = 0 by continuity; derivatives need rho > 0.
EntropyPair canonical_pair();

/// The conservation laws themselves: (rho, rho u) and (u, rho).
EntropyPair density_pair();
EntropyPair slope_pair();

/// rho S_rr - u S_ru - S_uu from the pair's Hessian. Zero iff S admits a flux.
double entropy_residual(const EntropyPair& pair, const PhysState& p);

/// Same residual for a bare S, using a central-difference Hessian with step h.
double entropy_residual(const std::function<double(const PhysState&)>& S, const PhysState& p,
                        double h = 1e-4);

/// Residuals of the two first-order entropy equations at p:
/// (F_r - u S_r - S_u, F_u - rho S_r).
Vec2 flux_equation_residual(const EntropyPair& pair, const PhysState& p);

/// Increment F(to) - F(from) obtained by integrating the entropy equations
/// along a two-leg axis-parallel path, either u-leg first or rho-leg first.
/// The result depends only on S through its gradient.
double flux_increment(const EntropyPair& pair, const PhysState& from, const PhysState& to,
                      bool u_leg_first, double tol = 1e-12);

/// Minimum (relative) Hessian eigenvalue over a sample of states; callers
/// pass states inside the pair's validity region.
double sampled_min_hessian_eigenvalue(const EntropyPair& pair,
                                      const std::vector<PhysState>& samples);

// ---------------------------------------------------------------------------
// Similarity entropies S = rho^alpha phi(u / sqrt(rho)), where phi solves
//   3 (y^2 - 4/3) phi'' + (5 - 8 alpha) y phi' + 4 alpha (alpha - 1) phi = 0.

inline constexpr double kSimilaritySingularY = 1.1547005383792515;  // 2 / sqrt(3)

struct SimilarityEntropy {
  double alpha = 0.0;
  double y_start = 0.0;  // where the initial data (phi0, dphi0) were imposed
  std::vector<double> y;
  std::vector<double> phi;
  std::vector<double> phi_prime;
  std::vector<double> phi_second;  // from the ODE at each node

  double y_min() const { return y.front(); }
  double y_max() const { return y.back(); }
  bool contains(double yy) const { return yy >= y.front() && yy <= y.back(); }

  /// phi and its first two derivatives from the piecewise quintic Hermite
  /// interpolant. Throws OutOfRange outside [y_min, y_max].
  std::array<double, 3> eval(double yy) const;

  /// ODE residual at every sample: the sampled phi and phi' combined with a
  /// phi'' from a seven-point difference of phi' along a trajectory
  /// re-integrated from y_start (independent of phi_second).
  std::vector<double> ode_residual() const;
};

struct SimilarityOptions {
  double margin = 1e-3;  // exclusion around y = +-2/sqrt(3)
  double rel_tol = 1e-13;
  double abs_tol = 1e-14;
};

/// Integrates the similarity ODE over [y_lo, y_hi] from y = 0 (or the
/// endpoint nearest 0 when the interval lies outside [-2/sqrt3, 2/sqrt3]).
/// Throws SingularInterval when the interval reaches a singular point.
SimilarityEntropy solve_similarity_ode(double alpha, double phi0, double dphi0, double y_lo,
                                       double y_hi, double step,
                                       const SimilarityOptions& opts = {});

/// Entropy pair built from a similarity solution. The flux is recovered by
/// quadrature of F_u = rho S_rho at fixed rho, starting from the curve
/// u = y_start sqrt(rho), with F = 0 at (1, y_start).
EntropyPair similarity_to_pair(const SimilarityEntropy& se);

/// Per-cell discrete entropy production
///   (S(after_i) - S(before_i)) / dt + (F(before_{i+1}) - F(before_{i-1})) / (2 dx).
/// Throws OutsideValidity if a state is outside the pair's region.
std::vector<double> entropy_production(const Field1D& before, const Field1D& after,
                                       const EntropyPair& pair, double dt);

}  // namespace depo
