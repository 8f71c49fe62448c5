#include "depo/hydroflux.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <memory>

#include "depo/error.hpp"

namespace depo {

ThermoTable::ThermoTable(int parity, double beta, double tol)
    : parity_(parity), beta_(beta), tol_(tol) {
  params(1.0, 1.0).validate();
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");
}

GibbsParams ThermoTable::params(double fugacity, double tilt) const {
  return GibbsParams{fugacity, tilt, parity_, beta_};
}

PartitionValues ThermoTable::partition(double fugacity, double tilt) const {
  return partition_function(params(fugacity, tilt), tol_);
}

namespace {

struct Moments {
  MacroState ms;
  Mat2 cov{};
  double log_z = 0.0;
};

Moments moments(double fugacity, double tilt, const ThermoTable& table) {
  const PartitionValues pv = table.partition(fugacity, tilt);
  const double l = fugacity, t = tilt;
  Moments m;
  m.ms.rho = l * pv.Z_l / pv.Z;
  m.ms.u = t * pv.Z_t / pv.Z;
  const double rho = m.ms.rho, u = m.ms.u;
  m.cov[0][0] = rho + l * l * pv.Z_ll / pv.Z - rho * rho;
  m.cov[0][1] = l * t * pv.Z_lt / pv.Z - rho * u;
  m.cov[1][0] = m.cov[0][1];
  m.cov[1][1] = u + t * t * pv.Z_tt / pv.Z - u * u;
  m.log_z = std::log(pv.Z);
  return m;
}

}  // namespace

MacroState macro_from_fug(double fugacity, double tilt, const ThermoTable& table) {
  return moments(fugacity, tilt, table).ms;
}

Mat2 covariance(double fugacity, double tilt, const ThermoTable& table) {
  return moments(fugacity, tilt, table).cov;
}

Mat2 macro_jacobian(double fugacity, double tilt, const ThermoTable& table) {
  Mat2 c = covariance(fugacity, tilt, table);
  for (auto& row : c) {
    row[0] /= fugacity;
    row[1] /= tilt;
  }
  return c;
}

Fugacities fug_from_macro(const MacroState& ms, const ThermoTable& table, double tol,
                          std::size_t max_iter) {
  if (!(ms.rho > 0.0) || !std::isfinite(ms.rho) || !std::isfinite(ms.u)) {
    throw Error(ErrorKind::OutsideDomain, "macro state needs rho > 0");
  }
  const double c = low_density_c(table.beta(), table.parity());
  double a = std::log(ms.rho);
  const double t0 = 1.0 + c * ms.u;
  double b = t0 > 0.0 ? std::log(t0) : c * ms.u;

  // Phi(a, b) = log Z - a rho* - b u* is convex with gradient (rho - rho*, u - u*)
  // and Hessian equal to the covariance matrix.
  auto phi = [&](double aa, double bb, Moments& out) {
    try {
      out = moments(std::exp(aa), std::exp(bb), table);
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
    return out.log_z - aa * ms.rho - bb * ms.u;
  };
  Moments m;
  double f = phi(a, b, m);
  if (!std::isfinite(f)) throw Error(ErrorKind::NewtonDiverged, "initial guess left the domain");

  const double tol_rho = tol * ms.rho;
  const double tol_u = tol * std::max(std::abs(ms.u), ms.rho) + 1e-15;
  for (std::size_t it = 0; it < max_iter; ++it) {
    const double g0 = m.ms.rho - ms.rho, g1 = m.ms.u - ms.u;
    if (std::abs(g0) <= tol_rho && std::abs(g1) <= tol_u) {
      return {std::exp(a), std::exp(b), it};
    }
    const double det = m.cov[0][0] * m.cov[1][1] - m.cov[0][1] * m.cov[1][0];
    if (!(det > 0.0)) {
      throw Error(ErrorKind::NewtonDiverged, "covariance matrix lost positive definiteness");
    }
    const double da = -(m.cov[1][1] * g0 - m.cov[0][1] * g1) / det;
    const double db = -(m.cov[0][0] * g1 - m.cov[1][0] * g0) / det;
    const double slope = g0 * da + g1 * db;
    double step = 1.0;
    Moments trial;
    double ft = phi(a + da, b + db, trial);
    // Near the root, Phi changes below its rounding level; a full step that
    // shrinks the scaled gradient is then accepted on that ground alone.
    auto scaled = [&](const Moments& mm) {
      return std::hypot((mm.ms.rho - ms.rho) / tol_rho, (mm.ms.u - ms.u) / tol_u);
    };
    const bool full_ok = std::isfinite(ft) && scaled(trial) < scaled(m);
    while (!full_ok && !(ft <= f + 1e-4 * step * slope) && step > 1e-12) {
      step *= 0.5;
      ft = phi(a + step * da, b + step * db, trial);
    }
    if (!(step > 1e-12)) {
      throw Error(ErrorKind::NewtonDiverged, "line search failed at rho residual " +
                                                 std::to_string(g0) + ", u residual " +
                                                 std::to_string(g1));
    }
    a += step * da;
    b += step * db;
    f = ft;
    m = trial;
  }
  throw Error(ErrorKind::NewtonDiverged,
              "no convergence after " + std::to_string(max_iter) + " iterations for rho=" +
                  std::to_string(ms.rho) + ", u=" + std::to_string(ms.u));
}

Vec2 macro_flux_fug(double fugacity, double tilt) {
  return {fugacity * (tilt - 1.0 / tilt), fugacity * (tilt + 1.0 / tilt)};
}

Vec2 macro_flux(const MacroState& ms, const ThermoTable& table) {
  const Fugacities fg = fug_from_macro(ms, table);
  return macro_flux_fug(fg.fugacity, fg.tilt);
}

namespace {

Mat2 flux_jacobian_fug(double l, double t, const ThermoTable& table) {
  const Mat2 dj{{{t - 1.0 / t, l * (1.0 + 1.0 / (t * t))}, {t + 1.0 / t, l * (1.0 - 1.0 / (t * t))}}};
  const Mat2 dm = macro_jacobian(l, t, table);
  const double det = dm[0][0] * dm[1][1] - dm[0][1] * dm[1][0];
  const Mat2 inv{{{dm[1][1] / det, -dm[0][1] / det}, {-dm[1][0] / det, dm[0][0] / det}}};
  Mat2 out{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) out[i][j] = dj[i][0] * inv[0][j] + dj[i][1] * inv[1][j];
  }
  return out;
}

}  // namespace

Mat2 macro_flux_jacobian(const MacroState& ms, const ThermoTable& table) {
  const Fugacities fg = fug_from_macro(ms, table);
  return flux_jacobian_fug(fg.fugacity, fg.tilt, table);
}

namespace {

// At vanishing fugacity Z -> G_s, dZ/dlambda -> G_{1-s}, d2Z/dtheta2 -> G''_s.
PartitionValues vacuum_partition(double beta, int parity, double tol) {
  return partition_function(GibbsParams{1e-300, 1.0, parity, beta}, tol);
}

}  // namespace

double low_density_c(double beta, int parity, double tol) {
  return 1.0 / vacuum_partition(beta, parity, tol).Z_tt;
}

LowDensityCoefficients low_density_coefficients(double beta, int parity) {
  const PartitionValues pv = vacuum_partition(beta, parity, 1e-15);
  return {pv.Z / pv.Z_l, pv.Z / pv.Z_tt};
}

RescaledDeviation rescaled_flux_limit(const std::vector<MacroState>& states, double alpha,
                                      const ThermoTable& table) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1]");
  }
  if (states.empty()) throw Error(ErrorKind::InvalidArgument, "no states to evaluate");
  const LowDensityCoefficients k = low_density_coefficients(table.beta(), table.parity());
  const double A = 2.0 * k.kappa * k.c_eff, B = 2.0 * k.kappa;
  const double sr = std::pow(alpha, 2.0 / 3.0), su = std::cbrt(alpha);
  double num0 = 0.0, den0 = 0.0, num1 = 0.0, den1 = 0.0;
  for (const auto& s : states) {
    const Vec2 j = macro_flux(MacroState{sr * s.rho, su * s.u}, table);
    const double j0 = j[0] / (alpha * A), j1 = j[1] / (sr * B);
    num0 += (j0 - s.rho * s.u) * (j0 - s.rho * s.u);
    den0 += s.rho * s.u * s.rho * s.u;
    num1 += (j1 - s.rho) * (j1 - s.rho);
    den1 += s.rho * s.rho;
  }
  RescaledDeviation d;
  d.alpha = alpha;
  d.rho_flux = den0 > 0.0 ? std::sqrt(num0 / den0) : std::sqrt(num0);
  d.u_flux = std::sqrt(num1 / den1);
  return d;
}

namespace {

// Direct-mapped memo of the inverse map; the solvers query the same cell
// states several times per step.
class FugacityCache {
 public:
  explicit FugacityCache(ThermoTable table) : table_(table), slots_(4096) {}

  Fugacities get(const PhysState& p) {
    std::uint64_t hr = 0, hu = 0;
    std::memcpy(&hr, &p.rho, sizeof hr);
    std::memcpy(&hu, &p.u, sizeof hu);
    const std::uint64_t h = (hr * 0x9e3779b97f4a7c15ULL) ^ (hu + 0x632be59bd9b4e019ULL + (hr << 6));
    Slot& s = slots_[(h ^ (h >> 29)) % slots_.size()];
    if (s.used && s.rho == p.rho && s.u == p.u) return s.fg;
    s.fg = fug_from_macro(MacroState{p.rho, p.u}, table_);
    s.rho = p.rho;
    s.u = p.u;
    s.used = true;
    return s.fg;
  }

  const ThermoTable& table() const { return table_; }

 private:
  struct Slot {
    bool used = false;
    double rho = 0.0;
    double u = 0.0;
    Fugacities fg;
  };
  ThermoTable table_;
  std::vector<Slot> slots_;
};

}  // namespace

FluxModel hydro_model(const ThermoTable& table) {
  auto cache = std::make_shared<FugacityCache>(table);
  FluxModel m;
  m.name = "hydrodynamic";
  m.flux = [cache](const PhysState& p) {
    const Fugacities fg = cache->get(p);
    return macro_flux_fug(fg.fugacity, fg.tilt);
  };
  m.speeds = [cache](const PhysState& p) -> std::array<double, 2> {
    const Fugacities fg = cache->get(p);
    const Mat2 a = flux_jacobian_fug(fg.fugacity, fg.tilt, cache->table());
    const double tr = 0.5 * (a[0][0] + a[1][1]);
    const double disc = tr * tr - (a[0][0] * a[1][1] - a[0][1] * a[1][0]);
    const double r = std::sqrt(std::max(disc, 0.0));
    return {tr - r, tr + r};
  };
  m.check_deposition_hyperbolicity = false;
  return m;
}

}  // namespace depo
