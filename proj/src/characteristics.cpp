#include "depo/characteristics.hpp"

#include <cmath>
#include <string>

#include "depo/error.hpp"

namespace depo {

namespace {

constexpr double kRadicandClamp = 1e-14;

double clamp_radicand(double v, const char* what) {
  if (v >= 0.0) return v;
  if (v >= -kRadicandClamp) return 0.0;
  throw Error(ErrorKind::OutsideDomain, std::string(what) + " radicand is negative");
}

// Value, gradient and Hessian of a scalar function of (rho, u).
struct Jet {
  double v = 0.0;
  Vec2 g{};
  Mat2 h{};
};

Jet sqrt_disc_jet(const PhysState& p) {
  const double q = std::sqrt(p.u * p.u + 4.0 * p.rho);
  const double q3 = q * q * q;
  Jet j;
  j.v = q;
  j.g = {2.0 / q, p.u / q};
  j.h = {{{-4.0 / q3, -2.0 * p.u / q3}, {-2.0 * p.u / q3, 4.0 * p.rho / q3}}};
  return j;
}

// -sqrt(a) * b for jets a, b.
Jet neg_sqrt_times(const Jet& a, const Jet& b) {
  const double sa = std::sqrt(a.v);
  const double d1 = 0.5 / sa;
  const double d2 = -0.25 / (a.v * sa);
  Jet out;
  out.v = -sa * b.v;
  for (int i = 0; i < 2; ++i) out.g[i] = -(d1 * a.g[i] * b.v + sa * b.g[i]);
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) {
      out.h[i][k] = -(d2 * a.g[i] * a.g[k] * b.v + d1 * a.h[i][k] * b.v + d1 * a.g[i] * b.g[k] +
                      d1 * a.g[k] * b.g[i] + sa * b.h[i][k]);
    }
  }
  return out;
}

// q + cu * u for a jet q.
Jet shift_u(const Jet& q, double cu, const PhysState& p) {
  Jet out = q;
  out.v += cu * p.u;
  out.g[1] += cu;
  return out;
}

void require_interior(const PhysState& p) {
  if (!(p.rho > 0.0)) {
    throw Error(ErrorKind::OutsideDomain, "Riemann invariant derivatives need rho > 0");
  }
}

}  // namespace

const char* to_string(DomainClass c) {
  switch (c) {
    case DomainClass::PhysicalInterior: return "PhysicalInterior";
    case DomainClass::PhysicalBoundary: return "PhysicalBoundary";
    case DomainClass::HyperbolicNonphysical: return "HyperbolicNonphysical";
    case DomainClass::NonHyperbolic: return "NonHyperbolic";
    case DomainClass::UmbilicPoint: return "UmbilicPoint";
  }
  return "Unknown";
}

double discriminant(const PhysState& p) {
  const double d = p.u * p.u + 4.0 * p.rho;
  if (d < 0.0 && d >= -kRadicandClamp) return 0.0;
  return d;
}

std::array<double, 2> char_speeds(const PhysState& p) {
  const double d = discriminant(p);
  if (d < 0.0) throw Error(ErrorKind::NotStrictlyHyperbolic, "u^2 + 4 rho < 0");
  const double q = std::sqrt(d);
  return {0.5 * (p.u - q), 0.5 * (p.u + q)};
}

Mat2 flux_jacobian(const PhysState& p) { return {{{p.u, p.rho}, {1.0, 0.0}}}; }

CharData char_decomposition(const PhysState& p) {
  const double d = discriminant(p);
  if (!(d > 0.0)) throw Error(ErrorKind::NotStrictlyHyperbolic, "u^2 + 4 rho <= 0");
  const double q = std::sqrt(d);
  CharData c;
  c.lambda_plus = 0.5 * (q + p.u);
  c.lambda_minus = -0.5 * (q - p.u);
  c.left_plus = {c.lambda_plus, p.rho};
  c.left_minus = {c.lambda_minus, p.rho};
  c.right_plus = {c.lambda_plus, 1.0};
  c.right_minus = {c.lambda_minus, 1.0};
  return c;
}

double riemann_w(const PhysState& p) {
  const double q = std::sqrt(clamp_radicand(p.u * p.u + 4.0 * p.rho, "u^2 + 4 rho"));
  return -std::sqrt(clamp_radicand(q - p.u, "w")) * (q + 2.0 * p.u);
}

double riemann_z(const PhysState& p) {
  const double q = std::sqrt(clamp_radicand(p.u * p.u + 4.0 * p.rho, "u^2 + 4 rho"));
  return -std::sqrt(clamp_radicand(q + p.u, "z")) * (q - 2.0 * p.u);
}

RiemannInvariants riemann_invariants(const PhysState& p) { return {riemann_w(p), riemann_z(p)}; }

RiemannGradients riemann_gradients(const PhysState& p) {
  require_interior(p);
  const Jet q = sqrt_disc_jet(p);
  const Jet w = neg_sqrt_times(shift_u(q, -1.0, p), shift_u(q, 2.0, p));
  const Jet z = neg_sqrt_times(shift_u(q, 1.0, p), shift_u(q, -2.0, p));
  return {w.g, z.g};
}

RiemannHessians riemann_hessians(const PhysState& p) {
  require_interior(p);
  const Jet q = sqrt_disc_jet(p);
  const Jet w = neg_sqrt_times(shift_u(q, -1.0, p), shift_u(q, 2.0, p));
  const Jet z = neg_sqrt_times(shift_u(q, 1.0, p), shift_u(q, -2.0, p));
  return {w.h, z.h};
}

DomainClass domain_classify(const PhysState& p) {
  if (p.rho == 0.0 && p.u == 0.0) return DomainClass::UmbilicPoint;
  if (p.rho > 0.0) return DomainClass::PhysicalInterior;
  if (p.rho == 0.0) return DomainClass::PhysicalBoundary;
  if (p.u * p.u + 4.0 * p.rho > 0.0) return DomainClass::HyperbolicNonphysical;
  return DomainClass::NonHyperbolic;
}

GenuineNonlinearity genuine_nonlinearity(const PhysState& p) {
  const CharData c = char_decomposition(p);
  const double gap = c.lambda_plus - c.lambda_minus;
  return {2.0 * c.lambda_plus / gap, 2.0 * c.lambda_minus / (-gap)};
}

double min_eigenvalue(const Mat2& m) {
  const double mean = 0.5 * (m[0][0] + m[1][1]);
  const double half_diff = 0.5 * (m[0][0] - m[1][1]);
  const double off = 0.5 * (m[0][1] + m[1][0]);
  return mean - std::hypot(half_diff, off);
}

}  // namespace depo
