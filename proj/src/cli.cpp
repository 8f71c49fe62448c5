#include "depo/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "depo/bricklayer.hpp"
#include "depo/entropy.hpp"
#include "depo/hydroflux.hpp"
#include "depo/shocks.hpp"
#include "depo/solvers.hpp"

namespace depo::cli {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::CflViolation:
      return kInvalidConfig;
    case ErrorKind::NonConvergent:
    case ErrorKind::NewtonDiverged:
      return kNonConvergence;
    default:
      return kDomainViolation;
  }
}

ConfigReader::ConfigReader(const Json& in, std::string path) : in_(in), path_(std::move(path)) {
  if (!in_.is_object()) {
    throw Error(ErrorKind::InvalidArgument,
                "config" + (path_.empty() ? std::string() : " section " + path_) +
                    " must be a JSON object");
  }
}

bool ConfigReader::has(const std::string& key) const { return in_.contains(key); }

void ConfigReader::fail(const std::string& key, const std::string& why) const {
  throw Error(ErrorKind::InvalidArgument, "config key '" + path_ + key + "': " + why);
}

const Json& ConfigReader::sub(const std::string& key) const {
  static const Json empty = Json::object();
  if (!in_.contains(key)) return empty;
  if (!in_.at(key).is_object()) fail(key, "expected an object");
  return in_.at(key);
}

double ConfigReader::number(const std::string& key, std::optional<double> def) {
  double v;
  if (in_.contains(key)) {
    const Json& j = in_.at(key);
    if (!j.is_number()) fail(key, "expected a number");
    v = j.get<double>();
    if (!std::isfinite(v)) fail(key, "must be finite");
  } else if (def) {
    v = *def;
  } else {
    fail(key, "missing");
  }
  used_.insert(key);
  eff_[key] = v;
  return v;
}

long long ConfigReader::integer(const std::string& key, std::optional<long long> def) {
  long long v;
  if (in_.contains(key)) {
    const Json& j = in_.at(key);
    if (!j.is_number_integer()) fail(key, "expected an integer");
    v = j.get<long long>();
  } else if (def) {
    v = *def;
  } else {
    fail(key, "missing");
  }
  used_.insert(key);
  eff_[key] = v;
  return v;
}

bool ConfigReader::boolean(const std::string& key, std::optional<bool> def) {
  bool v;
  if (in_.contains(key)) {
    const Json& j = in_.at(key);
    if (!j.is_boolean()) fail(key, "expected true or false");
    v = j.get<bool>();
  } else if (def) {
    v = *def;
  } else {
    fail(key, "missing");
  }
  used_.insert(key);
  eff_[key] = v;
  return v;
}

std::string ConfigReader::string(const std::string& key, std::optional<std::string> def) {
  std::string v;
  if (in_.contains(key)) {
    const Json& j = in_.at(key);
    if (!j.is_string()) fail(key, "expected a string");
    v = j.get<std::string>();
  } else if (def) {
    v = *def;
  } else {
    fail(key, "missing");
  }
  used_.insert(key);
  eff_[key] = v;
  return v;
}

std::vector<double> ConfigReader::numbers(const std::string& key,
                                          std::optional<std::vector<double>> def) {
  std::vector<double> v;
  if (in_.contains(key)) {
    const Json& j = in_.at(key);
    if (!j.is_array()) fail(key, "expected an array of numbers");
    for (const auto& e : j) {
      if (!e.is_number()) fail(key, "expected an array of numbers");
      v.push_back(e.get<double>());
      if (!std::isfinite(v.back())) fail(key, "entries must be finite");
    }
  } else if (def) {
    v = *def;
  } else {
    fail(key, "missing");
  }
  used_.insert(key);
  eff_[key] = v;
  return v;
}

PhysState ConfigReader::state(const std::string& key, std::optional<PhysState> def) {
  std::optional<std::vector<double>> d;
  if (def) d = std::vector<double>{def->rho, def->u};
  const std::vector<double> v = numbers(key, d);
  if (v.size() != 2) fail(key, "expected [rho, u]");
  return {v[0], v[1]};
}

void ConfigReader::finish() const {
  for (const auto& [key, value] : in_.items()) {
    if (!used_.count(key)) fail(key, "unknown key");
  }
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

class CsvWriter {
 public:
  CsvWriter(const std::string& dir, const std::string& name, const std::vector<std::string>& header,
            Json& outputs)
      : path_((std::filesystem::path(dir) / name).string()), file_(path_) {
    if (!file_) throw Error(ErrorKind::InvalidArgument, "cannot write " + path_);
    outputs.push_back(name);
    for (std::size_t i = 0; i < header.size(); ++i) file_ << (i ? "," : "") << header[i];
    file_ << '\n';
  }

  // Cells are pre-formatted so integers and blanks stay exact.
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) file_ << (i ? "," : "") << cells[i];
    file_ << '\n';
  }

 private:
  std::string path_;
  std::ofstream file_;
};

std::string fmt(double v) { return format_double(v); }
std::string fmt(long long v) { return std::to_string(v); }

void write_json(const std::string& dir, const std::string& name, const Json& j, Json& outputs) {
  const std::string path = (std::filesystem::path(dir) / name).string();
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  f << j.dump(2) << '\n';
  outputs.push_back(name);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::uint64_t x = seed ^ (stream * 0x9e3779b97f4a7c15ULL) ^ (index * 0xd1b54a32d192ed03ULL);
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Runs job(i) for i in [0, n) on worker threads. Results go to slot i, so
// the merged output follows config order whatever the completion order.
template <class T>
std::vector<T> parallel_map(std::size_t n, const std::function<T(std::size_t)>& job) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shared config sections.

GridSpec read_grid(ConfigReader& r) {
  GridSpec g;
  r.object("grid", [&](ConfigReader& c) {
    const double x_min = c.number("x_min", -1.0);
    const double x_max = c.number("x_max", 1.0);
    const long long cells = c.integer("cells", 400);
    const std::string b = c.string("boundary", "outflow");
    if (b != "outflow" && b != "periodic") c.fail("boundary", "expected outflow or periodic");
    if (cells < 4) c.fail("cells", "need at least 4 cells");
    if (!(x_max > x_min)) c.fail("x_max", "must exceed x_min");
    g = GridSpec::uniform(x_min, x_max, static_cast<std::size_t>(cells),
                          b == "periodic" ? Boundary::Periodic : Boundary::Outflow);
  });
  return g;
}

Field1D read_initial(ConfigReader& r, const GridSpec& g) {
  Field1D f;
  r.object("initial", [&](ConfigReader& c) {
    const std::string kind = c.string("kind");
    if (kind == "constant") {
      const PhysState s = c.state("state");
      f = make_field(g, [&](double) { return s; });
    } else if (kind == "riemann") {
      const PhysState left = c.state("left");
      const double x0 = c.number("x0", 0.0);
      PhysState right;
      if (c.has("sigma")) {
        right = right_state_from_speed(left, c.number("sigma"));
      } else {
        right = c.state("right");
      }
      f = make_riemann(g, left, right, x0);
    } else if (kind == "gaussian") {
      const PhysState base = c.state("base");
      const PhysState amp = c.state("amplitude");
      const double center = c.number("center", 0.0);
      const double width = c.number("width", 0.1);
      if (!(width > 0.0)) c.fail("width", "must be positive");
      f = make_field(g, [&](double x) {
        const double e = std::exp(-0.5 * (x - center) * (x - center) / (width * width));
        return PhysState{base.rho + amp.rho * e, base.u + amp.u * e};
      });
    } else if (kind == "tabulated") {
      const auto xs = c.numbers("x");
      const auto rho = c.numbers("rho");
      const auto u = c.numbers("u");
      if (xs.size() < 2 || rho.size() != xs.size() || u.size() != xs.size()) {
        c.fail("x", "x, rho and u need equal lengths of at least 2");
      }
      if (!std::is_sorted(xs.begin(), xs.end()) ||
          std::adjacent_find(xs.begin(), xs.end()) != xs.end()) {
        c.fail("x", "must be strictly increasing");
      }
      f = make_field(g, [&](double x) {
        if (x <= xs.front()) return PhysState{rho.front(), u.front()};
        if (x >= xs.back()) return PhysState{rho.back(), u.back()};
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const std::size_t k = static_cast<std::size_t>(it - xs.begin());
        const double t = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
        return PhysState{rho[k - 1] + t * (rho[k] - rho[k - 1]), u[k - 1] + t * (u[k] - u[k - 1])};
      });
    } else {
      c.fail("kind", "expected constant, riemann, gaussian or tabulated");
    }
  });
  return f;
}

FluxModel read_model(ConfigReader& r) {
  FluxModel m = deposition_model();
  r.object("model", [&](ConfigReader& c) {
    const std::string kind = c.string("kind", "deposition");
    if (kind == "hydrodynamic") {
      const long long parity = c.integer("parity", 0);
      const double beta = c.number("beta", 1.0);
      if (parity != 0 && parity != 1) c.fail("parity", "expected 0 or 1");
      if (!(beta > 0.0)) c.fail("beta", "must be positive");
      m = hydro_model(ThermoTable(static_cast<int>(parity), beta));
    } else if (kind != "deposition") {
      c.fail("kind", "expected deposition or hydrodynamic");
    }
  });
  return m;
}

double positive(ConfigReader& r, const std::string& key, std::optional<double> def) {
  const double v = r.number(key, def);
  if (!(v > 0.0)) r.fail(key, "must be positive");
  return v;
}

std::vector<std::string> snapshot_row(const Field1D& f, std::size_t i) {
  PhysState p = f.at(i);
  if (p.rho < 0.0 && p.rho >= -kPositivityTolerance) p.rho = 0.0;
  return {fmt(f.time), fmt(f.grid.center(i)), fmt(f.rho[i]), fmt(f.u[i]), fmt(riemann_w(p)),
          fmt(riemann_z(p))};
}

// Final fields of viscous runs at each eps, evaluated in parallel.
std::vector<Field1D> viscous_finals(const Field1D& f0, const std::vector<double>& eps,
                                    double cfl, double t_end, const FluxModel& model) {
  return parallel_map<Field1D>(eps.size(), [&](std::size_t i) {
    EvolveConfig cfg;
    cfg.scheme = Scheme::Viscous;
    cfg.viscosity = eps[i];
    cfg.cfl = cfl;
    cfg.model = model;
    cfg.record_diagnostics = false;
    cfg.snapshot_stride = std::numeric_limits<std::size_t>::max();
    return evolve(f0, cfg, t_end).fields.back();
  });
}

}  // namespace

// ---------------------------------------------------------------------------

Json cmd_riemann(const Json& config, const RunContext& ctx, Json* effective) {
  ConfigReader r(config);
  const PhysState left = r.state("left");
  const bool has_sigma = r.has("sigma");
  const bool has_right = r.has("right");
  if (has_sigma == has_right) r.fail("sigma", "give exactly one of sigma and right");
  const bool run = r.boolean("run", false);
  const long long cells = r.integer("cells", 4000);
  const double t_end = r.number("t_end", 0.8);
  const double x_min = r.number("x_min", -1.0);
  const double x_max = r.number("x_max", 2.0);
  const std::string scheme = r.string("scheme", "hll");
  if (cells < 4) r.fail("cells", "need at least 4 cells");
  if (!(t_end > 0.0)) r.fail("t_end", "must be positive");
  if (!(x_max > x_min)) r.fail("x_max", "must exceed x_min");
  const Scheme sch = scheme_from_string(scheme);
  if (sch == Scheme::Viscous) r.fail("scheme", "expected hll or lax_friedrichs");

  Json summary;
  PhysState right;
  double sigma;
  if (has_sigma) {
    sigma = r.number("sigma");
    r.finish();
    right = right_state_from_speed(left, sigma);
  } else {
    right = r.state("right");
    r.finish();
    const ShockSpeeds sp = shock_speeds(left, right);
    summary["sigma_candidates"] = {sp.plus, sp.minus};
    // Pick the root that also satisfies the first RH relation.
    double best = std::numeric_limits<double>::infinity();
    sigma = sp.plus;
    for (double s : {sp.plus, sp.minus}) {
      const RhResidual res = rh_residual(left, right, s);
      const double m = std::max(std::abs(res.r1), std::abs(res.r2));
      if (m < best) {
        best = m;
        sigma = s;
      }
    }
  }
  if (effective) *effective = r.effective();
  const ShockClass cls = classify_discontinuity(left, right, sigma);
  summary["left"] = {left.rho, left.u};
  summary["right"] = {right.rho, right.u};
  summary["sigma"] = sigma;
  summary["classification"] = to_string(cls);

  std::ostream& out = *ctx.out;
  out << "left: (" << fmt(left.rho) << ", " << fmt(left.u) << ")\n";
  out << "right: (" << fmt(right.rho) << ", " << fmt(right.u) << ")\n";
  if (summary.contains("sigma_candidates")) {
    out << "sigma candidates: " << fmt(summary["sigma_candidates"][0].get<double>()) << ", "
        << fmt(summary["sigma_candidates"][1].get<double>()) << "\n";
  }
  out << "sigma: " << fmt(sigma) << "\n";
  out << "classification: " << to_string(cls) << "\n";

  if (run) {
    const GridSpec g = GridSpec::uniform(x_min, x_max, static_cast<std::size_t>(cells),
                                         Boundary::Outflow);
    const Field1D f0 = make_riemann(g, left, right, 0.0);
    EvolveConfig cfg;
    cfg.scheme = sch;
    const double dt0 = stable_dt(f0, 0.0, cfg.cfl, cfg.model);
    cfg.snapshot_stride = std::max<std::size_t>(1, static_cast<std::size_t>(t_end / dt0 / 50.0));
    const Trajectory traj = evolve(f0, cfg, t_end);
    const double measured = measure_shock_speed(traj);
    summary["measured_speed"] = measured;
    summary["relative_speed_error"] = std::abs(measured - sigma) / std::abs(sigma);
    out << "measured speed: " << fmt(measured) << "\n";
  }
  Json outputs = Json::array();
  write_json(ctx.out_dir, "riemann.json", summary, outputs);
  summary["outputs"] = outputs;
  return summary;
}

Json cmd_evolve(const Json& config, const RunContext& ctx, Json* effective) {
  ConfigReader r(config);
  const GridSpec g = read_grid(r);
  const Field1D f0 = read_initial(r, g);
  const FluxModel model = read_model(r);
  const Scheme scheme = scheme_from_string(r.string("scheme", "hll"));
  const double viscosity = r.number("viscosity", 0.0);
  const double cfl = positive(r, "cfl", 0.45);
  const double t_end = r.number("t_end");
  const long long stride = r.integer("snapshot_stride", 1);
  const double fixed_dt = r.number("fixed_dt", 0.0);
  const bool positivity = r.boolean("enforce_positivity", true);
  const bool measure = r.boolean("measure_shock", false);
  const bool snapshots = r.boolean("write_snapshots", true);
  const std::vector<double> sweep = r.numbers("viscosities", std::vector<double>{});
  r.finish();
  if (effective) *effective = r.effective();
  if (t_end < 0.0) r.fail("t_end", "must be non-negative");
  if (stride < 1) r.fail("snapshot_stride", "must be >= 1");
  if (fixed_dt < 0.0) r.fail("fixed_dt", "must be non-negative");
  if (viscosity < 0.0) r.fail("viscosity", "must be non-negative");
  if (scheme == Scheme::Viscous && !(viscosity > 0.0)) {
    r.fail("viscosity", "viscous scheme needs viscosity > 0");
  }
  for (double e : sweep) {
    if (!(e > 0.0)) r.fail("viscosities", "entries must be positive");
  }

  EvolveConfig cfg;
  cfg.scheme = scheme;
  cfg.viscosity = viscosity;
  cfg.cfl = cfl;
  cfg.snapshot_stride = static_cast<std::size_t>(stride);
  cfg.fixed_dt = fixed_dt;
  cfg.enforce_positivity = positivity;
  cfg.model = model;
  const Trajectory traj = evolve(f0, cfg, t_end);
  const ExtremaSeries ext = monitor_extrema(traj);

  Json outputs = Json::array();
  if (snapshots) {
    CsvWriter csv(ctx.out_dir, "snapshots.csv", {"t", "x", "rho", "u", "w", "z"}, outputs);
    for (const auto& f : traj.fields) {
      for (std::size_t i = 0; i < f.size(); ++i) csv.row(snapshot_row(f, i));
    }
  }
  {
    CsvWriter csv(ctx.out_dir, "diagnostics.csv",
                  {"t", "sup_w", "sup_z", "mass", "total_u", "entropy_integral"}, outputs);
    for (const auto& d : traj.diagnostics) {
      csv.row({fmt(d.t), fmt(d.sup_w), fmt(d.sup_z), fmt(d.mass), fmt(d.total_u), fmt(d.entropy)});
    }
  }
  Json summary;
  summary["steps"] = traj.steps;
  summary["snapshots"] = traj.fields.size();
  summary["final_time"] = traj.fields.back().time;
  double rise_w = 0.0, rise_z = 0.0;
  for (std::size_t k = 0; k < ext.sup_w.size(); ++k) {
    rise_w = std::max(rise_w, ext.sup_w[k] - ext.sup_w.front());
    rise_z = std::max(rise_z, ext.sup_z[k] - ext.sup_z.front());
  }
  summary["max_rise_sup_w"] = rise_w;
  summary["max_rise_sup_z"] = rise_z;
  if (measure) summary["shock_speed"] = measure_shock_speed(traj);

  if (!sweep.empty()) {
    const auto finals = viscous_finals(f0, sweep, cfl, t_end, model);
    CsvWriter csv(ctx.out_dir, "sweep.csv", {"eps", "eps_next", "l1_distance"}, outputs);
    Json dist = Json::array();
    for (std::size_t k = 0; k + 1 < finals.size(); ++k) {
      const double d = l1_distance(finals[k], finals[k + 1]);
      csv.row({fmt(sweep[k]), fmt(sweep[k + 1]), fmt(d)});
      dist.push_back(d);
    }
    summary["sweep_l1"] = dist;
  }
  if (ctx.out) {
    *ctx.out << "steps: " << traj.steps << "\n";
    if (measure) *ctx.out << "shock speed: " << fmt(summary["shock_speed"].get<double>()) << "\n";
  }
  summary["outputs"] = outputs;
  return summary;
}

Json cmd_convergence(const Json& config, const RunContext& ctx, Json* effective) {
  ConfigReader r(config);
  const GridSpec g = read_grid(r);
  const Field1D f0 = read_initial(r, g);
  const FluxModel model = read_model(r);
  const double eps0 = positive(r, "eps0", 0.1);
  const long long levels = r.integer("levels", 4);
  const double cfl = positive(r, "cfl", 0.45);
  const double t_end = positive(r, "t_end", std::nullopt);
  r.finish();
  if (effective) *effective = r.effective();
  if (levels < 2) r.fail("levels", "need at least 2 levels");

  std::vector<double> eps;
  for (long long k = 0; k < levels; ++k) eps.push_back(eps0 / std::pow(2.0, static_cast<double>(k)));
  const auto finals = viscous_finals(f0, eps, cfl, t_end, model);

  Json outputs = Json::array();
  CsvWriter csv(ctx.out_dir, "convergence.csv", {"level", "eps", "l1_to_next"}, outputs);
  Json dist = Json::array();
  bool monotone = true;
  for (std::size_t k = 0; k + 1 < finals.size(); ++k) {
    const double d = l1_distance(finals[k], finals[k + 1]);
    if (k > 0 && !(d < dist.back().get<double>())) monotone = false;
    dist.push_back(d);
    csv.row({fmt(static_cast<long long>(k)), fmt(eps[k]), fmt(d)});
  }
  Json summary;
  summary["l1_successive"] = dist;
  summary["monotone"] = monotone;
  if (ctx.out) *ctx.out << "successive L1 distances strictly decreasing: " << (monotone ? "yes" : "no") << "\n";
  summary["outputs"] = outputs;
  return summary;
}

Json cmd_bricklayer(const Json& config, const RunContext& ctx, Json* effective) {
  ConfigReader r(config);
  const std::string mode = r.string("mode", "simulate");
  const long long L = r.integer("L", 64);
  const double beta = positive(r, "beta", 1.0);
  const double fugacity = positive(r, "fugacity", 0.8);
  const double tilt = positive(r, "tilt", 1.2);
  const long long parity = r.integer("parity", 0);
  const double t_end = r.number("t_end", 10.0);
  if (L < 2) r.fail("L", "need at least 2 sites");
  if (parity != 0 && parity != 1) r.fail("parity", "expected 0 or 1");
  if (t_end < 0.0) r.fail("t_end", "must be non-negative");
  const GibbsParams gp{fugacity, tilt, static_cast<int>(parity), beta};
  const RateFunction rf(beta);
  const auto sites = static_cast<std::size_t>(L);

  Json summary;
  Json outputs = Json::array();
  auto evolved = [&](BrickState st, std::uint64_t seed) {
    if (t_end <= 0.0) return st;
    Rng rng(seed);
    KmcEngine engine(std::move(st), rf);
    engine.run_until(t_end, rng);
    return engine.state();
  };

  if (mode == "stationarity" || mode == "flux") {
    const long long samples = r.integer("samples", 100000);
    if (samples < 2) r.fail("samples", "need at least 2 samples");
    r.finish();
    if (effective) *effective = r.effective();
    const std::size_t rings = (static_cast<std::size_t>(samples) + sites - 1) / sites;
    struct RingRun {
      BrickState st;
      bool conserved = true;
    };
    const auto runs = parallel_map<RingRun>(rings, [&](std::size_t k) {
      const BrickState st0 = sample_gibbs(gp, sites, derive_seed(ctx.seed, 1, k));
      RingRun rr{evolved(st0, derive_seed(ctx.seed, 2, k)), true};
      rr.conserved = rr.st.total_n() == st0.total_n() && rr.st.total_z() == st0.total_z() &&
                     rr.st.parity_intact();
      return rr;
    });
    bool conserved = true;
    std::vector<BrickState> ensemble;
    for (const auto& rr : runs) {
      conserved = conserved && rr.conserved;
      ensemble.push_back(rr.st);
    }
    summary["conserved"] = conserved;
    summary["site_samples"] = rings * sites;

    if (mode == "flux") {
      const FluxEstimate fe = estimate_flux(ensemble, rf);
      CsvWriter csv(ctx.out_dir, "flux.csv",
                    {"lambda", "theta", "beta", "flux_plus", "flux_plus_se", "flux_minus",
                     "flux_minus_se"},
                    outputs);
      csv.row({fmt(fugacity), fmt(tilt), fmt(beta), fmt(fe.plus), fmt(fe.plus_se), fmt(fe.minus),
               fmt(fe.minus_se)});
      summary["flux_plus"] = fe.plus;
      summary["flux_plus_se"] = fe.plus_se;
      summary["flux_minus"] = fe.minus;
      summary["flux_minus_se"] = fe.minus_se;
      summary["expected_plus"] = fugacity * tilt;
      summary["expected_minus"] = fugacity / tilt;
      if (ctx.out) {
        *ctx.out << "<n r(z)> = " << fmt(fe.plus) << " +- " << fmt(fe.plus_se) << "\n";
        *ctx.out << "<n r(-z)> = " << fmt(fe.minus) << " +- " << fmt(fe.minus_se) << "\n";
      }
    } else {
      std::vector<SiteValue> ev, direct;
      for (const auto& st : ensemble) {
        const auto v = site_values(st);
        ev.insert(ev.end(), v.begin(), v.end());
      }
      for (std::size_t k = 0; k < rings; ++k) {
        const auto v = site_values(sample_gibbs(gp, sites, derive_seed(ctx.seed, 3, k)));
        direct.insert(direct.end(), v.begin(), v.end());
      }
      const Histogram he = site_histogram(ev), hd = site_histogram(direct);
      const double tv = total_variation(he, hd);
      summary["tv_direct"] = tv;
      summary["tv_exact"] = total_variation(he, gp);
      std::map<std::pair<long long, long long>, std::array<double, 2>> table;
      for (const auto& [v, m] : he.mass) table[{v.n, v.z}][0] = m;
      for (const auto& [v, m] : hd.mass) table[{v.n, v.z}][1] = m;
      CsvWriter csv(ctx.out_dir, "stationarity.csv", {"n", "z", "evolved", "direct"}, outputs);
      for (const auto& [k, m] : table) csv.row({fmt(k.first), fmt(k.second), fmt(m[0]), fmt(m[1])});
      if (ctx.out) *ctx.out << "total variation distance: " << fmt(tv) << "\n";
    }
  } else if (mode == "simulate") {
    const bool track = r.boolean("track_heights", false);
    BrickState st0;
    r.object("initial", [&](ConfigReader& c) {
      const std::string kind = c.string("kind", "gibbs");
      if (kind == "gibbs") {
        st0 = sample_gibbs(gp, sites, derive_seed(ctx.seed, 1, 0), track);
      } else if (kind == "explicit") {
        const auto n = c.numbers("n");
        const auto z = c.numbers("z");
        if (n.size() != sites || z.size() != sites) c.fail("n", "n and z need L entries");
        std::vector<long long> ni, zi;
        for (double v : n) {
          if (v != std::floor(v) || v < 0.0) c.fail("n", "entries must be non-negative integers");
          ni.push_back(static_cast<long long>(v));
        }
        for (double v : z) {
          if (v != std::floor(v)) c.fail("z", "entries must be integers");
          zi.push_back(static_cast<long long>(v));
        }
        st0 = BrickState(std::move(ni), std::move(zi), track);
      } else {
        c.fail("kind", "expected gibbs or explicit");
      }
    });
    std::vector<double> times = r.numbers("record_times", std::vector<double>{0.0, t_end});
    r.finish();
    if (effective) *effective = r.effective();
    if (st0.total_n() == 0) throw Error(ErrorKind::FrozenState, "empty lattice: no walker can move");
    if (!(t_end > 0.0)) r.fail("t_end", "must be positive");
    ObservableConfig obs;
    obs.record_times = times;
    Rng rng(derive_seed(ctx.seed, 2, 0));
    const SimulationResult res = simulate(st0, rf, t_end, obs, rng);
    CsvWriter csv(ctx.out_dir, "observables.csv", {"t", "site", "n", "z", "h"}, outputs);
    for (const auto& s : res.snapshots) {
      for (std::size_t j = 0; j < s.n.size(); ++j) {
        csv.row({fmt(s.t), fmt(static_cast<long long>(j)), fmt(s.n[j]), fmt(s.z[j]),
                 s.h.empty() ? std::string() : fmt(s.h[j])});
      }
    }
    summary["events"] = res.events;
    summary["growth_rate"] = res.growth_rate;
    summary["conserved"] = res.final_state.total_n() == st0.total_n() &&
                           res.final_state.total_z() == st0.total_z() &&
                           res.final_state.parity_intact() && res.final_state.heights_consistent();
    if (ctx.out) *ctx.out << "events: " << res.events << "\n";
  } else {
    r.fail("mode", "expected simulate, stationarity or flux");
  }
  summary["outputs"] = outputs;
  return summary;
}

Json cmd_hydro_table(const Json& config, const RunContext& ctx, Json* effective) {
  ConfigReader r(config);
  const long long parity = r.integer("parity", 0);
  const double beta = positive(r, "beta", 1.0);
  const auto fug = r.numbers("fugacities", std::vector<double>{0.25, 0.5, 0.8, 1.0, 2.0});
  const auto tilts = r.numbers("tilts", std::vector<double>{0.8, 1.0, 1.2});
  r.finish();
  if (effective) *effective = r.effective();
  if (parity != 0 && parity != 1) r.fail("parity", "expected 0 or 1");
  for (double v : fug) {
    if (!(v > 0.0)) r.fail("fugacities", "entries must be positive");
  }
  for (double v : tilts) {
    if (!(v > 0.0)) r.fail("tilts", "entries must be positive");
  }
  const ThermoTable table(static_cast<int>(parity), beta);
  Json outputs = Json::array();
  CsvWriter csv(ctx.out_dir, "hydro_table.csv", {"lambda", "theta", "rho", "u", "J_rho", "J_u"},
                outputs);
  for (double l : fug) {
    for (double t : tilts) {
      const MacroState ms = macro_from_fug(l, t, table);
      const Vec2 j = macro_flux_fug(l, t);
      csv.row({fmt(l), fmt(t), fmt(ms.rho), fmt(ms.u), fmt(j[0]), fmt(j[1])});
    }
  }
  Json summary;
  summary["rows"] = fug.size() * tilts.size();
  summary["low_density_c"] = low_density_c(beta, static_cast<int>(parity));
  summary["outputs"] = outputs;
  return summary;
}

Json cmd_entropy_scan(const Json& config, const RunContext& ctx, Json* effective) {
  ConfigReader r(config);
  const std::string kind = r.string("pair", "canonical");
  const auto rhos = r.numbers("rho", std::vector<double>{0.25, 0.5, 1.0, 2.0, 4.0});
  const auto us = r.numbers("u", std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0});
  Json outputs = Json::array();
  Json summary;
  EntropyPair pair;
  if (kind == "canonical") {
    pair = canonical_pair();
  } else if (kind == "similarity") {
    SimilarityEntropy se;
    r.object("similarity", [&](ConfigReader& c) {
      const double alpha = c.number("alpha", 0.25);
      const double phi0 = c.number("phi0", 1.0);
      const double dphi0 = c.number("dphi0", 0.0);
      const double y_lo = c.number("y_lo", -1.0);
      const double y_hi = c.number("y_hi", 1.0);
      const double step = c.number("step", 0.01);
      if (!(y_hi > y_lo)) c.fail("y_hi", "must exceed y_lo");
      if (!(step > 0.0)) c.fail("step", "must be positive");
      se = solve_similarity_ode(alpha, phi0, dphi0, y_lo, y_hi, step);
    });
    const auto res = se.ode_residual();
    CsvWriter csv(ctx.out_dir, "similarity.csv", {"y", "phi", "phi_prime", "ode_residual"},
                  outputs);
    double worst = 0.0;
    for (std::size_t i = 0; i < se.y.size(); ++i) {
      csv.row({fmt(se.y[i]), fmt(se.phi[i]), fmt(se.phi_prime[i]), fmt(res[i])});
      worst = std::max(worst, std::abs(res[i]));
    }
    summary["max_ode_residual"] = worst;
    pair = similarity_to_pair(se);
  } else {
    r.fail("pair", "expected canonical or similarity");
  }
  r.finish();
  if (effective) *effective = r.effective();

  CsvWriter csv(ctx.out_dir, "entropy_scan.csv", {"rho", "u", "S", "F", "eq_residual"}, outputs);
  double worst = 0.0;
  std::size_t skipped = 0;
  for (double rho : rhos) {
    for (double u : us) {
      const PhysState p{rho, u};
      if (!pair.valid(p) || !(rho > 0.0)) {
        ++skipped;
        continue;
      }
      const double res = entropy_residual(pair, p);
      worst = std::max(worst, std::abs(res));
      csv.row({fmt(rho), fmt(u), fmt(pair.S(p)), fmt(pair.F(p)), fmt(res)});
    }
  }
  summary["pair"] = pair.name;
  summary["max_eq_residual"] = worst;
  summary["skipped_outside_validity"] = skipped;
  if (ctx.out) *ctx.out << "max eq_residual: " << fmt(worst) << "\n";
  summary["outputs"] = outputs;
  return summary;
}

// ---------------------------------------------------------------------------

namespace {

PhysState parse_pair(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) {
    throw Error(ErrorKind::InvalidArgument, "expected rho,u but got '" + s + "'");
  }
  try {
    std::size_t p1 = 0, p2 = 0;
    const double a = std::stod(s.substr(0, comma), &p1);
    const double b = std::stod(s.substr(comma + 1), &p2);
    if (p1 != comma || p2 != s.size() - comma - 1) throw std::invalid_argument(s);
    return {a, b};
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::InvalidArgument, "expected rho,u but got '" + s + "'");
  }
}

using Command = Json (*)(const Json&, const RunContext&, Json*);

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Deposition-model laboratory: PDE analysis, solvers and bricklayer simulations"};
  app.require_subcommand(1);

  struct Common {
    std::string config;
    std::string out;
    std::uint64_t seed = 1;
    bool seed_given = false;
  };
  std::map<std::string, Common> common;
  std::map<std::string, CLI::App*> subs;
  const std::vector<std::pair<std::string, std::string>> names = {
      {"riemann", "Rankine-Hugoniot completion, Lax classification, optional numerical run"},
      {"evolve", "Finite-volume evolution with monitors and diagnostics"},
      {"bricklayer", "Bricklayer particle simulations"},
      {"hydro-table", "Thermodynamic and flux tables of the hydrodynamic system"},
      {"entropy-scan", "Entropy pair and similarity-entropy residual scans"},
      {"convergence", "Vanishing-viscosity sweep with successive L1 distances"}};
  for (const auto& [name, desc] : names) {
    CLI::App* sc = app.add_subcommand(name, desc);
    Common& c = common[name];
    sc->add_option("--config", c.config, "JSON config file");
    sc->add_option("--out", c.out, std::string("Output directory (default $") + kOutDirEnv + ")");
    sc->add_option("--seed", c.seed, "Random seed");
    subs[name] = sc;
  }
  std::string left, right;
  double sigma = 0.0;
  bool run_flag = false;
  long long cells = 0;
  CLI::App* rs = subs["riemann"];
  rs->add_option("--left", left, "Left state rho,u");
  rs->add_option("--right", right, "Right state rho,u");
  auto* sigma_opt = rs->add_option("--sigma", sigma, "Shock speed");
  rs->add_flag("--run", run_flag, "Also solve the Riemann problem numerically");
  rs->add_option("--cells", cells, "Cells for the numerical run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInvalidConfig;
  }

  std::string name;
  for (const auto& [n, sc] : subs) {
    if (sc->parsed()) name = n;
  }
  const Common& c = common[name];
  const std::map<std::string, Command> commands = {
      {"riemann", &cmd_riemann},         {"evolve", &cmd_evolve},
      {"bricklayer", &cmd_bricklayer},   {"hydro-table", &cmd_hydro_table},
      {"entropy-scan", &cmd_entropy_scan}, {"convergence", &cmd_convergence}};

  try {
    Json config = Json::object();
    if (!c.config.empty()) {
      std::ifstream in(c.config);
      if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read config " + c.config);
      try {
        config = Json::parse(in);
      } catch (const Json::parse_error& e) {
        throw Error(ErrorKind::InvalidArgument, std::string("config is not valid JSON: ") + e.what());
      }
      if (!config.is_object()) throw Error(ErrorKind::InvalidArgument, "config must be an object");
    }
    std::uint64_t seed = c.seed;
    if (!subs[name]->count("--seed") && config.contains("seed")) {
      if (!config["seed"].is_number_unsigned()) {
        throw Error(ErrorKind::InvalidArgument, "config key 'seed': expected a non-negative integer");
      }
      seed = config["seed"].get<std::uint64_t>();
    }
    config.erase("seed");
    if (name == "riemann") {
      if (!left.empty()) config["left"] = {parse_pair(left).rho, parse_pair(left).u};
      if (!right.empty()) config["right"] = {parse_pair(right).rho, parse_pair(right).u};
      if (sigma_opt->count()) config["sigma"] = sigma;
      if (run_flag) config["run"] = true;
      if (cells > 0) config["cells"] = cells;
    }

    std::string dir = c.out;
    if (dir.empty()) {
      const char* env = std::getenv(kOutDirEnv);
      dir = env && *env ? env : "depo_out";
    }
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::InvalidArgument, "cannot create output directory " + dir);

    RunContext ctx{dir, seed, &out};
    Json effective;
    Json summary = commands.at(name)(config, ctx, &effective);
    Json manifest;
    manifest["command"] = name;
    manifest["config"] = effective;
    const std::string canonical = effective.dump();
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(fnv1a(canonical)));
    manifest["config_hash"] = hash;
    manifest["seed"] = seed;
    manifest["summary"] = summary;
    Json outputs = summary.value("outputs", Json::array());
    write_json(dir, "manifest.json", manifest, outputs);
    return kSuccess;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUnexpected;
  }
}

}  // namespace depo::cli
