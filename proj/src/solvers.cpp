#include "depo/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "depo/error.hpp"

namespace depo {

Vec2 flux(const PhysState& p) { return {p.rho * p.u, p.rho}; }

FluxModel deposition_model() {
  FluxModel m;
  m.name = "deposition";
  m.flux = [](const PhysState& p) { return flux(p); };
  m.speeds = [](const PhysState& p) { return char_speeds(p); };
  m.check_deposition_hyperbolicity = true;
  return m;
}

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::LaxFriedrichs: return "lax_friedrichs";
    case Scheme::HLL: return "hll";
    case Scheme::Viscous: return "viscous";
  }
  return "unknown";
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "lax_friedrichs") return Scheme::LaxFriedrichs;
  if (s == "hll") return Scheme::HLL;
  if (s == "viscous") return Scheme::Viscous;
  throw Error(ErrorKind::InvalidArgument, "unknown scheme '" + s + "'");
}

namespace {

using Faces = std::vector<Vec2>;  // face k sits between cells k-1 and k; n + 1 faces

struct Rhs {
  std::vector<double> rho;
  std::vector<double> u;
};

void check_cells(const Field1D& f, const StepOptions& opts, const FluxModel& model) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double r = f.rho[i], v = f.u[i];
    if (!std::isfinite(r) || !std::isfinite(v)) {
      throw Error(ErrorKind::NonHyperbolicCell, "non-finite state in cell " + std::to_string(i));
    }
    if (model.check_deposition_hyperbolicity && v * v + 4.0 * r < -1e-12) {
      throw Error(ErrorKind::NonHyperbolicCell,
                  "cell " + std::to_string(i) + " left the hyperbolic domain");
    }
    if (opts.enforce_positivity && r < -kPositivityTolerance) {
      throw Error(ErrorKind::NonPhysicalState,
                  "negative density " + std::to_string(r) + " in cell " + std::to_string(i));
    }
  }
}

void check_dt(const Field1D& f, double eps, double dt, double cfl, const FluxModel& model) {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "time step must be positive");
  const double limit = stable_dt(f, eps, cfl, model);
  if (dt > limit * (1.0 + 1e-9)) {
    throw Error(ErrorKind::CflViolation,
                "dt = " + std::to_string(dt) + " exceeds stable limit " + std::to_string(limit));
  }
}

PhysState left_of_face(const Field1D& f, std::size_t k) {
  const std::size_t n = f.size();
  if (k > 0) return f.at(k - 1);
  return f.grid.boundary == Boundary::Periodic ? f.at(n - 1) : f.at(0);
}

PhysState right_of_face(const Field1D& f, std::size_t k) {
  const std::size_t n = f.size();
  if (k < n) return f.at(k);
  return f.grid.boundary == Boundary::Periodic ? f.at(0) : f.at(n - 1);
}

Vec2 hll_flux(const PhysState& a, const PhysState& b, const FluxModel& model) {
  const auto sa = model.speeds(a);
  const auto sb = model.speeds(b);
  const double s_lo = std::min(sa[0], sb[0]);
  const double s_hi = std::max(sa[1], sb[1]);
  const Vec2 fa = model.flux(a);
  const Vec2 fb = model.flux(b);
  if (s_lo >= 0.0) return fa;
  if (s_hi <= 0.0) return fb;
  const double inv = 1.0 / (s_hi - s_lo);
  return {(s_hi * fa[0] - s_lo * fb[0] + s_hi * s_lo * (b.rho - a.rho)) * inv,
          (s_hi * fa[1] - s_lo * fb[1] + s_hi * s_lo * (b.u - a.u)) * inv};
}

Faces face_fluxes(const Field1D& f, Scheme scheme, double dt, const FluxModel& model) {
  const std::size_t n = f.size();
  std::vector<Vec2> cell_flux(n);
  for (std::size_t i = 0; i < n; ++i) cell_flux[i] = model.flux(f.at(i));
  auto cell_flux_at = [&](std::size_t k, bool left) {
    if (left) return k > 0 ? cell_flux[k - 1]
                           : (f.grid.boundary == Boundary::Periodic ? cell_flux[n - 1] : cell_flux[0]);
    return k < n ? cell_flux[k]
                 : (f.grid.boundary == Boundary::Periodic ? cell_flux[0] : cell_flux[n - 1]);
  };
  Faces faces(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const PhysState a = left_of_face(f, k);
    const PhysState b = right_of_face(f, k);
    const Vec2 fa = cell_flux_at(k, true);
    const Vec2 fb = cell_flux_at(k, false);
    switch (scheme) {
      case Scheme::Viscous:
        faces[k] = {0.5 * (fa[0] + fb[0]), 0.5 * (fa[1] + fb[1])};
        break;
      case Scheme::LaxFriedrichs: {
        const double c = 0.5 * f.grid.dx / dt;
        faces[k] = {0.5 * (fa[0] + fb[0]) - c * (b.rho - a.rho),
                    0.5 * (fa[1] + fb[1]) - c * (b.u - a.u)};
        break;
      }
      case Scheme::HLL:
        faces[k] = hll_flux(a, b, model);
        break;
    }
  }
  return faces;
}

Rhs rhs(const Field1D& f, Scheme scheme, double eps, double dt, const FluxModel& model) {
  const std::size_t n = f.size();
  const double dx = f.grid.dx;
  const Faces faces = face_fluxes(f, scheme, dt, model);
  Rhs r{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    r.rho[i] = -(faces[i + 1][0] - faces[i][0]) / dx;
    r.u[i] = -(faces[i + 1][1] - faces[i][1]) / dx;
  }
  if (eps > 0.0) {
    // Diffusive face fluxes eps (v_k - v_{k-1}) / dx keep the update conservative.
    const double c = eps / dx;
    for (std::size_t k = 0; k <= n; ++k) {
      const PhysState a = left_of_face(f, k);
      const PhysState b = right_of_face(f, k);
      const double dr = c * (b.rho - a.rho) / dx;
      const double du = c * (b.u - a.u) / dx;
      if (k < n) {
        r.rho[k] -= dr;
        r.u[k] -= du;
      }
      if (k > 0) {
        r.rho[k - 1] += dr;
        r.u[k - 1] += du;
      }
    }
  }
  return r;
}

Field1D euler_update(const Field1D& f, const Rhs& r, double dt) {
  Field1D out = f;
  for (std::size_t i = 0; i < f.size(); ++i) {
    out.rho[i] += dt * r.rho[i];
    out.u[i] += dt * r.u[i];
  }
  out.time = f.time + dt;
  return out;
}

Field1D ssp_rk2(const Field1D& f, Scheme scheme, double eps, double dt, const FluxModel& model) {
  const Field1D stage = euler_update(f, rhs(f, scheme, eps, dt, model), dt);
  const Field1D second = euler_update(stage, rhs(stage, scheme, eps, dt, model), dt);
  Field1D out = f;
  for (std::size_t i = 0; i < f.size(); ++i) {
    out.rho[i] = 0.5 * (f.rho[i] + second.rho[i]);
    out.u[i] = 0.5 * (f.u[i] + second.u[i]);
  }
  out.time = f.time + dt;
  return out;
}

}  // namespace

double max_char_speed(const Field1D& f, const FluxModel& model) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto sp = model.speeds(f.at(i));
    s = std::max({s, std::abs(sp[0]), std::abs(sp[1])});
  }
  return s;
}

double stable_dt(const Field1D& f, double eps, double cfl, const FluxModel& model) {
  const double dx = f.grid.dx;
  double dt = std::numeric_limits<double>::infinity();
  const double speed = max_char_speed(f, model);
  if (speed > 0.0) dt = cfl * dx / speed;
  if (eps > 0.0) dt = std::min(dt, 0.5 * dx * dx / eps);
  return dt;
}

Field1D step_viscous(const Field1D& f, double eps, double dt, const StepOptions& opts,
                     const FluxModel& model) {
  if (eps < 0.0) throw Error(ErrorKind::InvalidArgument, "viscosity must be non-negative");
  check_cells(f, opts, model);
  check_dt(f, eps, dt, opts.cfl, model);
  Field1D out = ssp_rk2(f, Scheme::Viscous, eps, dt, model);
  check_cells(out, opts, model);
  return out;
}

Field1D step_inviscid(const Field1D& f, Scheme scheme, double dt, const StepOptions& opts,
                      const FluxModel& model) {
  if (scheme == Scheme::Viscous) {
    throw Error(ErrorKind::InvalidArgument, "step_inviscid needs LaxFriedrichs or HLL");
  }
  check_cells(f, opts, model);
  check_dt(f, 0.0, dt, opts.cfl, model);
  Field1D out = scheme == Scheme::LaxFriedrichs
                    ? euler_update(f, rhs(f, scheme, 0.0, dt, model), dt)
                    : ssp_rk2(f, scheme, 0.0, dt, model);
  check_cells(out, opts, model);
  return out;
}

namespace {

PhysState as_physical(const PhysState& p) {
  if (p.rho < 0.0 && p.rho >= -kPositivityTolerance) return {0.0, p.u};
  return p;
}

}  // namespace

Diagnostics diagnose(const Field1D& f) {
  Diagnostics d;
  d.t = f.time;
  d.sup_w = -std::numeric_limits<double>::infinity();
  d.sup_z = -std::numeric_limits<double>::infinity();
  double ent = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const PhysState p = as_physical(f.at(i));
    d.sup_w = std::max(d.sup_w, riemann_w(p));
    d.sup_z = std::max(d.sup_z, riemann_z(p));
    ent += (p.rho > 0.0 ? p.rho * std::log(p.rho) : 0.0) + 0.5 * p.u * p.u;
  }
  d.mass = f.mass();
  d.total_u = f.total_u();
  d.entropy = ent * f.grid.dx;
  return d;
}

std::vector<double> Trajectory::times() const {
  std::vector<double> t;
  t.reserve(fields.size());
  for (const auto& f : fields) t.push_back(f.time);
  return t;
}

Trajectory evolve(const Field1D& f0, const EvolveConfig& cfg, double t_end) {
  if (t_end < f0.time) throw Error(ErrorKind::InvalidArgument, "t_end precedes the initial time");
  if (cfg.snapshot_stride == 0) throw Error(ErrorKind::InvalidArgument, "snapshot stride is zero");
  const double eps = cfg.scheme == Scheme::Viscous ? cfg.viscosity : 0.0;
  const StepOptions opts{cfg.cfl, cfg.enforce_positivity};

  Trajectory traj;
  auto record = [&](const Field1D& f) {
    traj.fields.push_back(f);
    if (cfg.record_diagnostics) traj.diagnostics.push_back(diagnose(f));
  };
  record(f0);

  Field1D f = f0;
  while (f.time < t_end) {
    double dt = cfg.fixed_dt > 0.0 ? cfg.fixed_dt : stable_dt(f, eps, cfg.cfl, cfg.model);
    if (!std::isfinite(dt)) dt = t_end - f.time;  // static vacuum: nothing moves
    bool last = false;
    if (f.time + dt >= t_end) {
      dt = t_end - f.time;
      last = true;
    }
    f = cfg.scheme == Scheme::Viscous ? step_viscous(f, eps, dt, opts, cfg.model)
                                      : step_inviscid(f, cfg.scheme, dt, opts, cfg.model);
    if (last) f.time = t_end;
    ++traj.steps;
    if (last || traj.steps % cfg.snapshot_stride == 0) record(f);
  }
  return traj;
}

ExtremaSeries monitor_extrema(const Trajectory& traj) {
  ExtremaSeries out;
  for (const auto& f : traj.fields) {
    double sw = -std::numeric_limits<double>::infinity();
    double sz = sw;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const PhysState p = as_physical(f.at(i));
      sw = std::max(sw, riemann_w(p));
      sz = std::max(sz, riemann_z(p));
    }
    out.sup_w.push_back(sw);
    out.sup_z.push_back(sz);
  }
  return out;
}

double locate_shock(const Field1D& f, const ShockLocatorOptions& opts) {
  const std::size_t n = f.size();
  double best = 0.0;
  std::size_t istar = 0;
  double scale = 1.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d = std::abs(f.rho[i + 1] - f.rho[i]);
    if (d > best) {
      best = d;
      istar = i;
    }
    scale = std::max(scale, std::abs(f.rho[i]));
  }
  if (best < opts.threshold * scale) {
    throw Error(ErrorKind::NoShockFound, "no density jump above threshold");
  }
  const std::size_t w = opts.window;
  const std::size_t lo = istar >= w ? istar - w : 0;
  const std::size_t hi = std::min(istar + 1 + w, n - 1);
  const double level = 0.5 * (f.rho[lo] + f.rho[hi]);
  double pos = f.grid.node(istar + 1);
  std::size_t best_dist = std::numeric_limits<std::size_t>::max();
  for (std::size_t j = lo; j < hi; ++j) {
    const double a = f.rho[j] - level, b = f.rho[j + 1] - level;
    if (a * b > 0.0 || f.rho[j] == f.rho[j + 1]) continue;
    const std::size_t dist = j > istar ? j - istar : istar - j;
    if (dist < best_dist) {
      best_dist = dist;
      pos = f.grid.center(j) + f.grid.dx * (level - f.rho[j]) / (f.rho[j + 1] - f.rho[j]);
    }
  }
  return pos;
}

double measure_shock_speed(const Trajectory& traj, const ShockLocatorOptions& opts) {
  if (traj.fields.empty()) throw Error(ErrorKind::NoShockFound, "empty trajectory");
  const double t0 = traj.fields.front().time;
  const double t1 = traj.fields.back().time;
  const double t_skip = t0 + opts.skip_fraction * (t1 - t0);
  std::vector<double> ts, xs;
  for (const auto& f : traj.fields) {
    if (f.time < t_skip) continue;
    ts.push_back(f.time);
    xs.push_back(locate_shock(f, opts));
  }
  if (ts.size() < 2) {
    // A single usable snapshot still distinguishes "no shock" from "too short".
    for (const auto& f : traj.fields) locate_shock(f, opts);
    throw Error(ErrorKind::NoShockFound, "fewer than two snapshots to fit a shock speed");
  }
  double mt = 0.0, mx = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    mt += ts[k];
    mx += xs[k];
  }
  mt /= static_cast<double>(ts.size());
  mx /= static_cast<double>(ts.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    sxy += (ts[k] - mt) * (xs[k] - mx);
    sxx += (ts[k] - mt) * (ts[k] - mt);
  }
  if (sxx == 0.0) throw Error(ErrorKind::NoShockFound, "snapshots share one time");
  return sxy / sxx;
}

Trajectory rescale(const Trajectory& traj, double alpha, double nu) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidArgument, "scale factor must be positive");
  const double rho_fac = std::pow(alpha, 2.0 * (1.0 - nu));
  const double u_fac = std::pow(alpha, 1.0 - nu);
  const double x_fac = std::pow(alpha, -nu);
  Trajectory out;
  out.steps = traj.steps;
  for (const auto& f : traj.fields) {
    Field1D g = f;
    g.grid.x_min = f.grid.x_min * x_fac;
    g.grid.dx = f.grid.dx * x_fac;
    g.time = f.time / alpha;
    for (std::size_t i = 0; i < f.size(); ++i) {
      g.rho[i] = rho_fac * f.rho[i];
      g.u[i] = u_fac * f.u[i];
    }
    out.fields.push_back(std::move(g));
    if (!traj.diagnostics.empty()) out.diagnostics.push_back(diagnose(out.fields.back()));
  }
  return out;
}

Field1D resample(const Field1D& f, const GridSpec& target) {
  Field1D out(target, f.time);
  const std::size_t n = f.size();
  const double period = f.grid.x_max() - f.grid.x_min;
  for (std::size_t k = 0; k < target.n_cells; ++k) {
    double s = (target.center(k) - f.grid.x_min) / f.grid.dx - 0.5;  // fractional cell index
    if (f.grid.boundary == Boundary::Periodic) {
      const double x = target.center(k) - f.grid.x_min;
      const double wrapped = x - period * std::floor(x / period);
      s = wrapped / f.grid.dx - 0.5;
    }
    const double fl = std::floor(s);
    const double t = s - fl;
    auto idx = [&](long long i) -> std::size_t {
      const auto nn = static_cast<long long>(n);
      if (f.grid.boundary == Boundary::Periodic) return static_cast<std::size_t>(((i % nn) + nn) % nn);
      return static_cast<std::size_t>(std::clamp(i, 0LL, nn - 1));
    };
    const auto i0 = static_cast<long long>(fl);
    const std::size_t a = idx(i0), b = idx(i0 + 1);
    out.rho[k] = (1.0 - t) * f.rho[a] + t * f.rho[b];
    out.u[k] = (1.0 - t) * f.u[a] + t * f.u[b];
  }
  return out;
}

Vec2 pde_residual(const Trajectory& traj) {
  const auto& fs = traj.fields;
  if (fs.size() < 3) throw Error(ErrorKind::InvalidArgument, "residual needs three snapshots");
  Vec2 acc{0.0, 0.0};
  std::size_t count = 0;
  for (std::size_t k = 1; k + 1 < fs.size(); ++k) {
    const Field1D& f = fs[k];
    const double dt = fs[k + 1].time - fs[k - 1].time;
    const std::size_t n = f.size();
    const bool periodic = f.grid.boundary == Boundary::Periodic;
    const std::size_t first = periodic ? 0 : 1;
    const std::size_t end = periodic ? n : n - 1;
    for (std::size_t i = first; i < end; ++i) {
      const std::size_t l = f.grid.neighbour(i, -1), r = f.grid.neighbour(i, +1);
      const double d_rho = (fs[k + 1].rho[i] - fs[k - 1].rho[i]) / dt;
      const double d_u = (fs[k + 1].u[i] - fs[k - 1].u[i]) / dt;
      const double dj1 = (f.rho[r] * f.u[r] - f.rho[l] * f.u[l]) / (2.0 * f.grid.dx);
      const double dj2 = (f.rho[r] - f.rho[l]) / (2.0 * f.grid.dx);
      acc[0] += std::abs(d_rho + dj1) * f.grid.dx;
      acc[1] += std::abs(d_u + dj2) * f.grid.dx;
    }
    ++count;
  }
  return {acc[0] / static_cast<double>(count), acc[1] / static_cast<double>(count)};
}

HeightField height_from_slope(const Field1D& f, double h_left) {
  HeightField hf{f.grid, std::vector<double>(f.size() + 1), f.time};
  hf.h[0] = h_left;
  for (std::size_t i = 0; i < f.size(); ++i) hf.h[i + 1] = hf.h[i] - f.u[i] * f.grid.dx;
  return hf;
}

double height_consistency(const Field1D& f, const HeightField& h) {
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    worst = std::max(worst, std::abs(f.u[i] + (h.h[i + 1] - h.h[i]) / f.grid.dx));
  }
  return worst;
}

namespace {

std::vector<double> face_density(const Field1D& f) {
  const std::size_t n = f.size();
  std::vector<double> out(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    out[k] = 0.5 * (left_of_face(f, k).rho + right_of_face(f, k).rho);
  }
  return out;
}

}  // namespace

std::vector<HeightField> reconstruct_height(const Trajectory& traj, const HeightField& h0) {
  if (traj.fields.empty()) return {};
  const Field1D& first = traj.fields.front();
  if (h0.h.size() != first.size() + 1) {
    throw Error(ErrorKind::InconsistentInitialHeight, "height field has the wrong node count");
  }
  double max_du = 0.0;
  for (std::size_t i = 0; i + 1 < first.size(); ++i) {
    max_du = std::max(max_du, std::abs(first.u[i + 1] - first.u[i]));
  }
  const double allowed = 1e-9 + first.grid.dx + 2.0 * max_du;
  if (height_consistency(first, h0) > allowed) {
    throw Error(ErrorKind::InconsistentInitialHeight, "initial heights do not match -d_x h = u");
  }
  std::vector<HeightField> out;
  HeightField h = h0;
  h.time = first.time;
  out.push_back(h);
  std::vector<double> prev = face_density(first);
  for (std::size_t k = 1; k < traj.fields.size(); ++k) {
    const Field1D& f = traj.fields[k];
    const std::vector<double> cur = face_density(f);
    const double dt = f.time - h.time;
    for (std::size_t j = 0; j < h.h.size(); ++j) h.h[j] += 0.5 * dt * (prev[j] + cur[j]);
    h.time = f.time;
    out.push_back(h);
    prev = cur;
  }
  return out;
}

Field1D make_field(const GridSpec& g, const std::function<PhysState(double)>& profile) {
  Field1D f(g);
  for (std::size_t i = 0; i < g.n_cells; ++i) f.set(i, profile(g.center(i)));
  return f;
}

Field1D make_riemann(const GridSpec& g, const PhysState& left, const PhysState& right,
                     double x0) {
  return make_field(g, [&](double x) { return x < x0 ? left : right; });
}

double l1_distance(const Field1D& a, const Field1D& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::InvalidArgument, "fields differ in size");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += std::abs(a.rho[i] - b.rho[i]) + std::abs(a.u[i] - b.u[i]);
  }
  return acc * a.grid.dx;
}

}  // namespace depo
