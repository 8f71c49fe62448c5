#pragma once

#include <array>

namespace depo {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<Vec2, 2>;  // row-major

inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

/// A point (rho, u) of state space: rho is the particle density, u the
/// negative height gradient.
struct PhysState {
  double rho = 0.0;
  double u = 0.0;

  friend bool operator==(const PhysState&, const PhysState&) = default;
};

/// (rho, u) -> (rho, -u); together with x -> -x this maps solutions to solutions.
inline PhysState mirror(const PhysState& p) { return {p.rho, -p.u}; }

enum class DomainClass {
  PhysicalInterior,       // rho > 0
  PhysicalBoundary,       // rho = 0, u != 0
  HyperbolicNonphysical,  // rho < 0, u^2 + 4 rho > 0
  NonHyperbolic,          // u^2 + 4 rho <= 0 (away from the origin)
  UmbilicPoint,           // (0, 0)
};

const char* to_string(DomainClass c);

/// Eigenstructure of the flux Jacobian [[u, rho], [1, 0]].
///
/// Eigenvectors keep the unnormalized convention l = (lambda, rho),
/// r = (lambda, 1)^T, m = (mu, rho), s = (mu, 1)^T.
struct CharData {
  double lambda_plus = 0.0;   // fast speed lambda
  double lambda_minus = 0.0;  // slow speed mu
  Vec2 left_plus{};           // l
  Vec2 left_minus{};          // m
  Vec2 right_plus{};          // r
  Vec2 right_minus{};         // s
};

struct RiemannInvariants {
  double w = 0.0;  // constant along dx/dt = lambda
  double z = 0.0;  // constant along dx/dt = mu
};

struct RiemannGradients {
  Vec2 grad_w{};
  Vec2 grad_z{};
};

struct RiemannHessians {
  Mat2 hess_w{};
  Mat2 hess_z{};
};

struct GenuineNonlinearity {
  double g_lambda = 0.0;  // grad(lambda) . r
  double g_mu = 0.0;      // grad(mu) . s
};

/// u^2 + 4 rho, with values in [-1e-14, 0) clamped to 0.
double discriminant(const PhysState& p);

/// Characteristic speeds (mu, lambda); requires u^2 + 4 rho >= -1e-14.
/// Unlike char_decomposition this accepts the closure of the hyperbolic
/// domain, where the two speeds may coincide.
std::array<double, 2> char_speeds(const PhysState& p);

Mat2 flux_jacobian(const PhysState& p);

CharData char_decomposition(const PhysState& p);

RiemannInvariants riemann_invariants(const PhysState& p);
double riemann_w(const PhysState& p);
double riemann_z(const PhysState& p);

/// Analytic gradients; requires rho > 0.
RiemannGradients riemann_gradients(const PhysState& p);

/// Analytic Hessians; requires rho > 0. Both are positive semidefinite with
/// one vanishing eigenvalue.
RiemannHessians riemann_hessians(const PhysState& p);

DomainClass domain_classify(const PhysState& p);

GenuineNonlinearity genuine_nonlinearity(const PhysState& p);

/// Smallest eigenvalue of a symmetric 2x2 matrix.
double min_eigenvalue(const Mat2& m);

}  // namespace depo
