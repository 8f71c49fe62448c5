#include "depo/entropy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>

#include "depo/error.hpp"

namespace depo {

namespace {

double s_canonical(const PhysState& p) {
  const double ent = p.rho > 0.0 ? p.rho * std::log(p.rho) : 0.0;
  return ent + 0.5 * p.u * p.u;
}

double f_canonical(const PhysState& p) {
  if (p.rho == 0.0) return 0.0;
  return p.u * p.rho * (std::log(p.rho) + 1.0);
}

void require_valid(const EntropyPair& pair, const PhysState& p) {
  if (pair.valid && !pair.valid(p)) {
    throw Error(ErrorKind::OutsideValidity,
                "state outside the validity region of entropy pair " + pair.name);
  }
}

}  // namespace

EntropyPair canonical_pair() {
  EntropyPair e;
  e.name = "canonical";
  e.S = s_canonical;
  e.F = f_canonical;
  e.grad_S = [](const PhysState& p) { return Vec2{std::log(p.rho) + 1.0, p.u}; };
  e.grad_F = [](const PhysState& p) {
    const double lg = std::log(p.rho);
    return Vec2{p.u * (lg + 2.0), p.rho * (lg + 1.0)};
  };
  e.hess_S = [](const PhysState& p) { return Mat2{{{1.0 / p.rho, 0.0}, {0.0, 1.0}}}; };
  e.valid = [](const PhysState& p) { return p.rho >= 0.0 && std::isfinite(p.u); };
  e.convex = true;
  return e;
}

EntropyPair density_pair() {
  EntropyPair e;
  e.name = "density";
  e.S = [](const PhysState& p) { return p.rho; };
  e.F = [](const PhysState& p) { return p.rho * p.u; };
  e.grad_S = [](const PhysState&) { return Vec2{1.0, 0.0}; };
  e.grad_F = [](const PhysState& p) { return Vec2{p.u, p.rho}; };
  e.hess_S = [](const PhysState&) { return Mat2{}; };
  e.valid = [](const PhysState&) { return true; };
  e.convex = true;
  return e;
}

EntropyPair slope_pair() {
  EntropyPair e;
  e.name = "slope";
  e.S = [](const PhysState& p) { return p.u; };
  e.F = [](const PhysState& p) { return p.rho; };
  e.grad_S = [](const PhysState&) { return Vec2{0.0, 1.0}; };
  e.grad_F = [](const PhysState&) { return Vec2{1.0, 0.0}; };
  e.hess_S = [](const PhysState&) { return Mat2{}; };
  e.valid = [](const PhysState&) { return true; };
  e.convex = true;
  return e;
}

double entropy_residual(const EntropyPair& pair, const PhysState& p) {
  require_valid(pair, p);
  if (!(p.rho > 0.0)) throw Error(ErrorKind::OutsideDomain, "entropy residual needs rho > 0");
  const Mat2 h = pair.hess_S(p);
  return p.rho * h[0][0] - p.u * h[0][1] - h[1][1];
}

double entropy_residual(const std::function<double(const PhysState&)>& S, const PhysState& p,
                        double h) {
  if (!(p.rho > 0.0)) throw Error(ErrorKind::OutsideDomain, "entropy residual needs rho > 0");
  const double hr = std::min(h, 0.5 * p.rho);
  const double s0 = S(p);
  const double s_rr = (S({p.rho + hr, p.u}) - 2.0 * s0 + S({p.rho - hr, p.u})) / (hr * hr);
  const double s_uu = (S({p.rho, p.u + h}) - 2.0 * s0 + S({p.rho, p.u - h})) / (h * h);
  const double s_ru = (S({p.rho + hr, p.u + h}) - S({p.rho + hr, p.u - h}) -
                       S({p.rho - hr, p.u + h}) + S({p.rho - hr, p.u - h})) /
                      (4.0 * hr * h);
  return p.rho * s_rr - p.u * s_ru - s_uu;
}

Vec2 flux_equation_residual(const EntropyPair& pair, const PhysState& p) {
  require_valid(pair, p);
  const Vec2 gs = pair.grad_S(p);
  const Vec2 gf = pair.grad_F(p);
  return {gf[0] - p.u * gs[0] - gs[1], gf[1] - p.rho * gs[0]};
}

double flux_increment(const EntropyPair& pair, const PhysState& from, const PhysState& to,
                      bool u_leg_first, double tol) {
  using boost::math::quadrature::gauss_kronrod;
  auto u_leg = [&](double rho, double u0, double u1) {
    if (u0 == u1) return 0.0;
    auto integrand = [&](double u) { return rho * pair.grad_S({rho, u})[0]; };
    return gauss_kronrod<double, 31>::integrate(integrand, u0, u1, 15, tol);
  };
  auto rho_leg = [&](double u, double r0, double r1) {
    if (r0 == r1) return 0.0;
    auto integrand = [&](double rho) {
      const Vec2 g = pair.grad_S({rho, u});
      return u * g[0] + g[1];
    };
    return gauss_kronrod<double, 31>::integrate(integrand, r0, r1, 15, tol);
  };
  if (u_leg_first) return u_leg(from.rho, from.u, to.u) + rho_leg(to.u, from.rho, to.rho);
  return rho_leg(from.u, from.rho, to.rho) + u_leg(to.rho, from.u, to.u);
}

double sampled_min_hessian_eigenvalue(const EntropyPair& pair,
                                      const std::vector<PhysState>& samples) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& p : samples) {
    const Mat2 h = pair.hess_S(p);
    const double scale = std::max({1.0, std::abs(h[0][0]), std::abs(h[1][1]), std::abs(h[0][1])});
    worst = std::min(worst, min_eigenvalue(h) / scale);
  }
  return worst;
}

// ---------------------------------------------------------------------------

namespace {

double similarity_second(double alpha, double y, double phi, double dphi) {
  return -((5.0 - 8.0 * alpha) * y * dphi + 4.0 * alpha * (alpha - 1.0) * phi) /
         (3.0 * (y * y - 4.0 / 3.0));
}

std::vector<double> outward_grid(double start, double end, double step) {
  // Points strictly beyond `start` towards `end`, last one exactly `end`.
  std::vector<double> pts;
  const double dir = end > start ? 1.0 : -1.0;
  const double len = std::abs(end - start);
  if (len == 0.0) return pts;
  const auto n = static_cast<std::size_t>(std::max(1.0, std::round(len / step)));
  for (std::size_t k = 1; k <= n; ++k) {
    pts.push_back(k == n ? end : start + dir * len * static_cast<double>(k) / static_cast<double>(n));
  }
  return pts;
}

}  // namespace

std::array<double, 3> SimilarityEntropy::eval(double yy) const {
  if (!contains(yy)) throw Error(ErrorKind::OutOfRange, "y outside the similarity interval");
  auto it = std::upper_bound(y.begin(), y.end(), yy);
  std::size_t i = it == y.begin() ? 0 : static_cast<std::size_t>(it - y.begin()) - 1;
  if (i + 1 >= y.size()) i = y.size() - 2;
  const double h = y[i + 1] - y[i];
  const double t = (yy - y[i]) / h;
  const double f0 = phi[i], f1 = phi[i + 1];
  const double d0 = h * phi_prime[i], d1 = h * phi_prime[i + 1];
  const double s0 = h * h * phi_second[i], s1 = h * h * phi_second[i + 1];
  const double c0 = f0, c1 = d0, c2 = 0.5 * s0;
  const double c3 = -10.0 * f0 - 6.0 * d0 - 1.5 * s0 + 0.5 * s1 - 4.0 * d1 + 10.0 * f1;
  const double c4 = 15.0 * f0 + 8.0 * d0 + 1.5 * s0 - s1 + 7.0 * d1 - 15.0 * f1;
  const double c5 = -6.0 * f0 - 3.0 * d0 - 0.5 * s0 + 0.5 * s1 - 3.0 * d1 + 6.0 * f1;
  const double v = c0 + t * (c1 + t * (c2 + t * (c3 + t * (c4 + t * c5))));
  const double dv = c1 + t * (2.0 * c2 + t * (3.0 * c3 + t * (4.0 * c4 + t * 5.0 * c5)));
  const double d2v = 2.0 * c2 + t * (6.0 * c3 + t * (12.0 * c4 + t * 20.0 * c5));
  return {v, dv / h, d2v / (h * h)};
}

std::vector<double> SimilarityEntropy::ode_residual() const {
  using State = std::array<double, 2>;
  namespace odeint = boost::numeric::odeint;
  const double a = alpha;
  auto rhs = [a](const State& x, State& dxdy, double yy) {
    dxdy[0] = x[1];
    dxdy[1] = similarity_second(a, yy, x[0], x[1]);
  };
  auto advance = [&](State& x, double from, double to) {
    if (from == to) return;
    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(1e-15, 1e-14);
    odeint::integrate_adaptive(stepper, rhs, x, from, to, 0.01 * (to - from));
  };
  const auto it = std::find(y.begin(), y.end(), y_start);
  const std::size_t s = static_cast<std::size_t>(it - y.begin());
  const State start{phi[s], phi_prime[s]};

  // Seven-point derivative of phi' along a trajectory re-integrated from
  // y_start, with offsets kept well inside the distance to the singular point.
  static const double w7[7] = {-1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0, 3.0 / 4, -3.0 / 20, 1.0 / 60};
  std::vector<double> res(y.size(), 0.0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double dist = kSimilaritySingularY - std::abs(y[i]);
    const double d = std::min(1e-3, std::abs(dist) / 64.0);
    const double dir = y[i] >= y_start ? 1.0 : -1.0;
    State x = start;
    double at = y_start;
    double dphi[7];
    for (int k = 0; k < 7; ++k) {
      // Walk outward from y_start so the first point reached is the nearest.
      const int off = dir > 0 ? k - 3 : 3 - k;
      const double target = y[i] + off * d;
      advance(x, at, target);
      at = target;
      dphi[dir > 0 ? k : 6 - k] = x[1];
    }
    double d2 = 0.0;
    for (int k = 0; k < 7; ++k) d2 += w7[k] * dphi[k];
    d2 /= d;
    res[i] = 3.0 * (y[i] * y[i] - 4.0 / 3.0) * d2 + (5.0 - 8.0 * alpha) * y[i] * phi_prime[i] +
             4.0 * alpha * (alpha - 1.0) * phi[i];
  }
  return res;
}

SimilarityEntropy solve_similarity_ode(double alpha, double phi0, double dphi0, double y_lo,
                                       double y_hi, double step, const SimilarityOptions& opts) {
  if (!(y_hi > y_lo) || !(step > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "similarity ODE needs y_lo < y_hi and step > 0");
  }
  for (double s : {-kSimilaritySingularY, kSimilaritySingularY}) {
    if (y_hi >= s - opts.margin && y_lo <= s + opts.margin) {
      throw Error(ErrorKind::SingularInterval,
                  "y interval reaches the singular point of the similarity ODE");
    }
  }
  SimilarityEntropy se;
  se.alpha = alpha;
  if (y_lo <= 0.0 && y_hi >= 0.0) {
    se.y_start = 0.0;
  } else {
    se.y_start = std::abs(y_lo) < std::abs(y_hi) ? y_lo : y_hi;
  }

  using State = std::array<double, 2>;
  namespace odeint = boost::numeric::odeint;
  auto rhs = [alpha](const State& x, State& dxdy, double yy) {
    dxdy[0] = x[1];
    dxdy[1] = similarity_second(alpha, yy, x[0], x[1]);
  };

  auto sweep = [&](double end) {
    std::vector<std::array<double, 3>> out;  // y, phi, phi'
    State x{phi0, dphi0};
    double yy = se.y_start;
    for (double target : outward_grid(se.y_start, end, step)) {
      auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(opts.abs_tol,
                                                                             opts.rel_tol);
      const double dy0 = 0.01 * (target - yy);
      odeint::integrate_adaptive(stepper, rhs, x, yy, target, dy0);
      yy = target;
      out.push_back({yy, x[0], x[1]});
    }
    return out;
  };

  const auto below = sweep(y_lo);
  const auto above = sweep(y_hi);
  for (auto it = below.rbegin(); it != below.rend(); ++it) {
    se.y.push_back((*it)[0]);
    se.phi.push_back((*it)[1]);
    se.phi_prime.push_back((*it)[2]);
  }
  se.y.push_back(se.y_start);
  se.phi.push_back(phi0);
  se.phi_prime.push_back(dphi0);
  for (const auto& s : above) {
    se.y.push_back(s[0]);
    se.phi.push_back(s[1]);
    se.phi_prime.push_back(s[2]);
  }
  se.phi_second.resize(se.y.size());
  for (std::size_t i = 0; i < se.y.size(); ++i) {
    se.phi_second[i] = similarity_second(alpha, se.y[i], se.phi[i], se.phi_prime[i]);
  }
  return se;
}

namespace {

// Shared evaluator for a similarity pair: S, its derivatives, and the
// recovered flux F = rho^(alpha+1/2) Psi(y) + B(rho), where Psi' = g and
// g = alpha phi - y phi' / 2 so that F_u = rho S_rho.
struct SimilarityModel {
  SimilarityEntropy se;
  std::vector<double> psi;  // cumulative integral of g from y_start, per node
  double baseline_k = 0.0;

  double g(double yy) const {
    const auto f = se.eval(yy);
    return se.alpha * f[0] - 0.5 * yy * f[1];
  }

  explicit SimilarityModel(SimilarityEntropy s) : se(std::move(s)) {
    // g is piecewise quintic, so three-point Gauss-Legendre is exact per panel.
    static const double nodes[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
    static const double weights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    const std::size_t n = se.y.size();
    std::vector<double> cum(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double a = se.y[i], b = se.y[i + 1];
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) {
        const double yy = 0.5 * (a + b) + 0.5 * (b - a) * nodes[k];
        acc += weights[k] * g(yy);
      }
      cum[i + 1] = cum[i] + 0.5 * (b - a) * acc;
    }
    const auto start = std::lower_bound(se.y.begin(), se.y.end(), se.y_start) - se.y.begin();
    const double offset = cum[static_cast<std::size_t>(start)];
    psi.resize(n);
    for (std::size_t i = 0; i < n; ++i) psi[i] = cum[i] - offset;
    // Along u = y_s sqrt(rho): dF/drho = rho^(alpha-1/2) (3/2 y_s g(y_s) + phi'(y_s)).
    const double ys = se.y_start;
    baseline_k = 1.5 * ys * g(ys) + se.eval(ys)[1];
  }

  double psi_at(double yy) const {
    auto it = std::upper_bound(se.y.begin(), se.y.end(), yy);
    std::size_t i = it == se.y.begin() ? 0 : static_cast<std::size_t>(it - se.y.begin()) - 1;
    if (i + 1 >= se.y.size()) i = se.y.size() - 2;
    static const double nodes[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
    static const double weights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    const double a = se.y[i];
    double acc = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double t = 0.5 * (a + yy) + 0.5 * (yy - a) * nodes[k];
      acc += weights[k] * g(t);
    }
    return psi[i] + 0.5 * (yy - a) * acc;
  }

  double baseline(double rho) const {
    const double e = se.alpha + 0.5;
    if (std::abs(e) < 1e-14) return baseline_k * std::log(rho);
    return baseline_k * (std::pow(rho, e) - 1.0) / e;
  }

  double y_of(const PhysState& p) const {
    if (!(p.rho > 0.0)) throw Error(ErrorKind::OutOfRange, "similarity entropy needs rho > 0");
    return p.u / std::sqrt(p.rho);
  }

  double S(const PhysState& p) const {
    const double yy = y_of(p);
    return std::pow(p.rho, se.alpha) * se.eval(yy)[0];
  }

  double F(const PhysState& p) const {
    const double yy = y_of(p);
    return std::pow(p.rho, se.alpha + 0.5) * psi_at(yy) + baseline(p.rho);
  }

  Vec2 grad_S(const PhysState& p) const {
    const double yy = y_of(p);
    const auto f = se.eval(yy);
    const double ra1 = std::pow(p.rho, se.alpha - 1.0);
    return {ra1 * (se.alpha * f[0] - 0.5 * yy * f[1]), ra1 * std::sqrt(p.rho) * f[1]};
  }

  Vec2 grad_F(const PhysState& p) const {
    const double yy = y_of(p);
    const double gy = g(yy);
    const double rah = std::pow(p.rho, se.alpha - 0.5);
    return {rah * ((se.alpha + 0.5) * psi_at(yy) - 0.5 * yy * gy + baseline_k),
            std::pow(p.rho, se.alpha) * gy};
  }

  Mat2 hess_S(const PhysState& p) const {
    const double yy = y_of(p);
    const auto f = se.eval(yy);
    const double a = se.alpha;
    const double gv = a * f[0] - 0.5 * yy * f[1];
    const double gp = (a - 0.5) * f[1] - 0.5 * yy * f[2];
    const double s_rr = std::pow(p.rho, a - 2.0) * ((a - 1.0) * gv - 0.5 * yy * gp);
    const double s_ru = std::pow(p.rho, a - 1.5) * gp;
    const double s_uu = std::pow(p.rho, a - 1.0) * f[2];
    return {{{s_rr, s_ru}, {s_ru, s_uu}}};
  }

  bool valid(const PhysState& p) const {
    return p.rho > 0.0 && se.contains(p.u / std::sqrt(p.rho));
  }
};

}  // namespace

EntropyPair similarity_to_pair(const SimilarityEntropy& se) {
  if (se.y.size() < 2) throw Error(ErrorKind::InvalidArgument, "similarity entropy is empty");
  auto model = std::make_shared<const SimilarityModel>(se);
  EntropyPair e;
  e.name = "similarity(alpha=" + std::to_string(se.alpha) + ")";
  e.S = [model](const PhysState& p) { return model->S(p); };
  e.F = [model](const PhysState& p) { return model->F(p); };
  e.grad_S = [model](const PhysState& p) { return model->grad_S(p); };
  e.grad_F = [model](const PhysState& p) { return model->grad_F(p); };
  e.hess_S = [model](const PhysState& p) { return model->hess_S(p); };
  e.valid = [model](const PhysState& p) { return model->valid(p); };

  // Convexity flag from a deterministic sample of the validity region.
  std::vector<PhysState> samples;
  samples.reserve(10000);
  for (int i = 0; i < 100; ++i) {
    const double rho = std::exp(std::log(1e-2) + (std::log(1e2) - std::log(1e-2)) * (i + 0.5) / 100.0);
    for (int k = 0; k < 100; ++k) {
      const double yy = se.y_min() + (se.y_max() - se.y_min()) * (k + 0.5) / 100.0;
      samples.push_back({rho, yy * std::sqrt(rho)});
    }
  }
  e.convex = sampled_min_hessian_eigenvalue(e, samples) >= -1e-8;
  return e;
}

std::vector<double> entropy_production(const Field1D& before, const Field1D& after,
                                       const EntropyPair& pair, double dt) {
  if (before.size() != after.size()) {
    throw Error(ErrorKind::InvalidArgument, "entropy production needs fields on one grid");
  }
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "entropy production needs dt > 0");
  const std::size_t n = before.size();
  std::vector<double> s_old(n), s_new(n), f_old(n);
  for (std::size_t i = 0; i < n; ++i) {
    require_valid(pair, before.at(i));
    require_valid(pair, after.at(i));
    s_old[i] = pair.S(before.at(i));
    s_new[i] = pair.S(after.at(i));
    f_old[i] = pair.F(before.at(i));
  }
  const GridSpec& g = before.grid;
  std::vector<double> prod(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double dflux = f_old[g.neighbour(i, +1)] - f_old[g.neighbour(i, -1)];
    prod[i] = (s_new[i] - s_old[i]) / dt + dflux / (2.0 * g.dx);
  }
  return prod;
}

}  // namespace depo
