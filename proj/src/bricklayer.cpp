#include "depo/bricklayer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "depo/error.hpp"

namespace depo {

double rate(long long z, double beta) { return std::exp(beta * (static_cast<double>(z) - 0.5)); }

RateFunction::RateFunction(double beta) : beta_(beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorKind::InvalidArgument, "beta must be positive");
  }
  cache_.resize(2 * kCache + 1);
  for (long long z = -kCache; z <= kCache; ++z) cache_[z + kCache] = rate(z, beta);
}

RateFunction RateFunction::tabulated(const std::vector<double>& values) {
  if (values.size() < 2 || values.size() % 2 != 0) {
    throw Error(ErrorKind::InvalidArgument, "rate table needs an even number (>= 2) of entries");
  }
  const long long k = static_cast<long long>(values.size() / 2);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      throw Error(ErrorKind::InvalidArgument, "rates must be positive and finite");
    }
    if (i > 0 && !(values[i] > values[i - 1])) {
      throw Error(ErrorKind::InvalidArgument, "rates must increase with z");
    }
  }
  // index i holds r(1 - k + i); r(z) r(1 - z) pairs index i with 2k - 1 - i
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::abs(values[i] * values[values.size() - 1 - i] - 1.0) > 1e-12) {
      throw Error(ErrorKind::InvalidArgument, "rates violate r(z) r(1 - z) = 1");
    }
  }
  RateFunction rf(1.0);
  rf.cache_.clear();
  rf.table_ = values;
  rf.k_ = k;
  rf.beta_ = std::log(values[static_cast<std::size_t>(k)]) * 2.0;  // r(1) = e^{beta/2} when exponential
  return rf;
}

double RateFunction::operator()(long long z) const {
  if (!table_.empty()) {
    if (z < 1 - k_ || z > k_) {
      throw Error(ErrorKind::OutOfRange, "slope " + std::to_string(z) + " outside rate table");
    }
    return table_[static_cast<std::size_t>(z - (1 - k_))];
  }
  if (z >= -kCache && z <= kCache) return cache_[static_cast<std::size_t>(z + kCache)];
  return rate(z, beta_);
}

double RateFunction::R(long long z) const {
  if (table_.empty()) {
    const double zz = static_cast<double>(z);
    return std::exp(0.5 * beta_ * zz * zz);
  }
  double out = 1.0;
  for (long long k = 1; k <= std::llabs(z); ++k) out *= (*this)(k);
  return out;
}

double RateFunction::theta_star() const {
  if (table_.empty()) return std::numeric_limits<double>::infinity();
  return table_.back();
}

void GibbsParams::validate() const {
  if (!(fugacity > 0.0) || !std::isfinite(fugacity)) {
    throw Error(ErrorKind::InvalidArgument, "fugacity must be positive");
  }
  if (!(tilt > 0.0) || !std::isfinite(tilt)) {
    throw Error(ErrorKind::InvalidArgument, "tilt must be positive");
  }
  if (parity != 0 && parity != 1) throw Error(ErrorKind::InvalidArgument, "parity must be 0 or 1");
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorKind::InvalidArgument, "beta must be positive");
  }
}

namespace {

// Sums over z = p (mod 2) of theta^z e^{-beta z^2/2} times 1, z / theta and
// z (z - 1) / theta^2.
struct SlopeSums {
  double g0 = 0.0;
  double g1 = 0.0;
  double g2 = 0.0;
  std::size_t terms = 0;
};

long long parity_of(long long v) { return ((v % 2) + 2) % 2; }

SlopeSums slope_sums(double log_theta, double beta, int p, double tol, std::size_t max_terms) {
  const double mode = log_theta / beta;
  long long zc = std::llround(mode);
  if (parity_of(zc) != p) zc += (static_cast<double>(zc) < mode) ? 1 : -1;

  auto weight = [&](long long z) {
    const double zz = static_cast<double>(z);
    return std::exp(zz * log_theta - 0.5 * beta * zz * zz);
  };
  SlopeSums s;
  auto add = [&](long long z) {
    const double w = weight(z);
    const double zz = static_cast<double>(z);
    s.g0 += w;
    s.g1 += zz * w;
    s.g2 += zz * (zz - 1.0) * w;
    ++s.terms;
  };
  add(zc);
  for (int d : {+1, -1}) {
    long long z = zc;
    for (;;) {
      if (s.terms > max_terms) {
        throw Error(ErrorKind::NonConvergent, "slope series did not meet its tail bound");
      }
      z += 2 * d;
      add(z);
      // Past the mode and moving away from 0, every weighted term ratio is
      // decreasing, so the tail is bounded by a geometric series.
      const double zz = static_cast<double>(z);
      if (d * (zz - mode) <= 0.0 || d * z < 2) continue;
      const long long z1 = z + 2 * d, z2 = z + 4 * d;
      const double w1 = weight(z1), w2 = weight(z2);
      double bound = 0.0;
      bool ok = w1 > 0.0 ? w2 < w1 : true;
      for (int k = 0; k < 3 && ok && w1 > 0.0; ++k) {
        auto poly = [k](long long v) {
          const double x = std::abs(static_cast<double>(v));
          return k == 0 ? 1.0 : (k == 1 ? x : x * (x + 1.0));
        };
        const double t1 = poly(z1) * w1, t2 = poly(z2) * w2;
        const double q = t2 / t1;
        if (!(q < 1.0)) {
          ok = false;
          break;
        }
        bound += t1 / (1.0 - q);
      }
      if (ok && bound <= tol * std::max(s.g0, std::numeric_limits<double>::min())) break;
    }
  }
  return s;
}

}  // namespace

PartitionValues partition_function(const GibbsParams& gp, double tol, std::size_t max_terms) {
  gp.validate();
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");
  const double lt = std::log(gp.tilt);
  const SlopeSums same = slope_sums(lt, gp.beta, gp.parity, tol, max_terms);
  const SlopeSums other = slope_sums(lt, gp.beta, 1 - gp.parity, tol, max_terms);
  const double ch = std::cosh(gp.fugacity), sh = std::sinh(gp.fugacity);
  const double it = 1.0 / gp.tilt;
  PartitionValues pv;
  pv.Z = ch * same.g0 + sh * other.g0;
  pv.Z_l = sh * same.g0 + ch * other.g0;
  pv.Z_ll = pv.Z;
  pv.Z_t = (ch * same.g1 + sh * other.g1) * it;
  pv.Z_lt = (sh * same.g1 + ch * other.g1) * it;
  pv.Z_tt = (ch * same.g2 + sh * other.g2) * it * it;
  pv.z_terms = std::max(same.terms, other.terms);
  if (!std::isfinite(pv.Z) || !std::isfinite(pv.Z_tt)) {
    throw Error(ErrorKind::NonConvergent, "partition function overflowed");
  }
  return pv;
}

GibbsSampler::GibbsSampler(const GibbsParams& gp) : gp_(gp) {
  gp.validate();
  const double mode = std::log(gp.tilt) / gp.beta;
  // Weights below e^{-50} relative to the mode are dropped.
  const auto half = static_cast<long long>(std::ceil(std::sqrt(100.0 / gp.beta))) + 2;
  z_lo_ = static_cast<long long>(std::floor(mode)) - half;
  const long long z_hi = static_cast<long long>(std::ceil(mode)) + half;
  std::vector<double> w;
  for (long long z = z_lo_; z <= z_hi; ++z) {
    const double d = static_cast<double>(z) - mode;
    w.push_back(std::exp(-0.5 * gp.beta * d * d));
  }
  poisson_ = std::poisson_distribution<long long>(gp.fugacity);
  slope_ = std::discrete_distribution<long long>(w.begin(), w.end());
}

SiteValue GibbsSampler::operator()(Rng& rng) const {
  for (;;) {
    const long long n = poisson_(rng);
    const long long z = z_lo_ + slope_(rng);
    if (parity_of(n + z) == gp_.parity) return {n, z};
  }
}

BrickState::BrickState(std::vector<long long> n_in, std::vector<long long> z_in,
                       bool track_heights)
    : n(std::move(n_in)), z(std::move(z_in)) {
  if (n.size() != z.size()) throw Error(ErrorKind::InvalidArgument, "n and z differ in length");
  if (n.size() < 2) throw Error(ErrorKind::InvalidArgument, "ring needs at least two sites");
  parity.resize(n.size());
  for (std::size_t j = 0; j < n.size(); ++j) {
    if (n[j] < 0) throw Error(ErrorKind::InvalidArgument, "occupation numbers must be >= 0");
    parity[j] = static_cast<int>(parity_of(n[j] + z[j]));
  }
  if (track_heights) {
    if (total_z() != 0) {
      throw Error(ErrorKind::InvalidArgument, "height tracking on a ring needs sum z = 0");
    }
    h.resize(n.size());
    long long acc = 0;
    for (std::size_t j = 0; j < n.size(); ++j) {
      acc -= z[j];
      h[j] = acc;
    }
  }
}

long long BrickState::total_n() const { return std::accumulate(n.begin(), n.end(), 0LL); }
long long BrickState::total_z() const { return std::accumulate(z.begin(), z.end(), 0LL); }

bool BrickState::parity_intact() const {
  for (std::size_t j = 0; j < n.size(); ++j) {
    if (parity_of(n[j] + z[j]) != parity[j]) return false;
  }
  return true;
}

bool BrickState::heights_consistent() const {
  if (h.empty()) return true;
  const std::size_t L = n.size();
  for (std::size_t j = 0; j < L; ++j) {
    if (z[j] != h[(j + L - 1) % L] - h[j]) return false;
  }
  return true;
}

BrickState sample_gibbs(const GibbsParams& gp, std::size_t L, std::uint64_t seed,
                        bool track_heights) {
  if (L < 2) throw Error(ErrorKind::InvalidArgument, "ring needs at least two sites");
  Rng rng(seed);
  const GibbsSampler draw(gp);
  std::vector<long long> n(L), z(L);
  for (std::size_t j = 0; j < L; ++j) {
    const SiteValue v = draw(rng);
    n[j] = v.n;
    z[j] = v.z;
  }
  if (track_heights) {
    // Shift the slope sum to zero on site 0; an odd shift is paired with one
    // extra walker there so the parity bit is kept.
    const long long total = std::accumulate(z.begin(), z.end(), 0LL);
    z[0] -= total;
    if (total % 2 != 0) n[0] += 1;
  }
  return BrickState(std::move(n), std::move(z), track_heights);
}

BrickState sample_local_gibbs(const std::vector<GibbsParams>& sites, Rng& rng) {
  std::vector<long long> n(sites.size()), z(sites.size());
  for (std::size_t j = 0; j < sites.size(); ++j) {
    const SiteValue v = GibbsSampler(sites[j])(rng);
    n[j] = v.n;
    z[j] = v.z;
  }
  return BrickState(std::move(n), std::move(z), false);
}

void apply_jump(BrickState& st, std::size_t j, Direction d) {
  const std::size_t L = st.size();
  if (st.n[j] < 1) throw Error(ErrorKind::InvalidArgument, "no walker to move");
  if (d == Direction::Right) {
    const std::size_t k = (j + 1) % L;
    st.n[j] -= 1;
    st.z[j] -= 1;
    st.n[k] += 1;
    st.z[k] += 1;
    if (!st.h.empty()) st.h[j] += 1;
  } else {
    const std::size_t k = (j + L - 1) % L;
    st.n[j] -= 1;
    st.z[j] += 1;
    st.n[k] += 1;
    st.z[k] -= 1;
    if (!st.h.empty()) st.h[k] += 1;
  }
}

double site_rate(const BrickState& st, std::size_t j, const RateFunction& rf) {
  if (st.n[j] == 0) return 0.0;
  return static_cast<double>(st.n[j]) * (rf(st.z[j]) + rf(-st.z[j]));
}

namespace {

Direction pick_direction(const BrickState& st, std::size_t j, const RateFunction& rf, Rng& rng) {
  const double right = rf(st.z[j]);
  const double left = rf(-st.z[j]);
  std::uniform_real_distribution<double> unif(0.0, right + left);
  return unif(rng) < right ? Direction::Right : Direction::Left;
}

}  // namespace

KmcEvent kmc_step(BrickState& st, const RateFunction& rf, Rng& rng) {
  std::vector<double> rates(st.size());
  double total = 0.0;
  for (std::size_t j = 0; j < st.size(); ++j) {
    rates[j] = site_rate(st, j, rf);
    total += rates[j];
  }
  if (!(total > 0.0)) throw Error(ErrorKind::FrozenState, "no walker can move");
  KmcEvent ev;
  ev.elapsed = std::exponential_distribution<double>(total)(rng);
  std::uniform_real_distribution<double> unif(0.0, total);
  double target = unif(rng);
  std::size_t j = 0;
  for (; j + 1 < st.size(); ++j) {
    if (target < rates[j]) break;
    target -= rates[j];
  }
  while (rates[j] == 0.0) j = (j + st.size() - 1) % st.size();  // rounding landed past the end
  ev.site = j;
  ev.direction = pick_direction(st, j, rf, rng);
  apply_jump(st, j, ev.direction);
  st.time += ev.elapsed;
  return ev;
}

KmcEngine::KmcEngine(BrickState st, RateFunction rf) : st_(std::move(st)), rf_(std::move(rf)) {
  while (leaves_ < st_.size()) leaves_ *= 2;
  tree_.assign(2 * leaves_, 0.0);
  for (std::size_t j = 0; j < st_.size(); ++j) tree_[leaves_ + j] = site_rate(st_, j, rf_);
  for (std::size_t i = leaves_ - 1; i >= 1; --i) tree_[i] = tree_[2 * i] + tree_[2 * i + 1];
}

void KmcEngine::update(std::size_t j) {
  std::size_t i = leaves_ + j;
  tree_[i] = site_rate(st_, j, rf_);
  for (i /= 2; i >= 1; i /= 2) tree_[i] = tree_[2 * i] + tree_[2 * i + 1];
}

namespace {

std::size_t descend(const std::vector<double>& tree, std::size_t leaves, double target) {
  std::size_t i = 1;
  while (i < leaves) {
    if (target < tree[2 * i] || tree[2 * i + 1] <= 0.0) {
      i = 2 * i;
    } else {
      target -= tree[2 * i];
      i = 2 * i + 1;
    }
  }
  return i - leaves;
}

}  // namespace

KmcEvent KmcEngine::step(Rng& rng) {
  const double total = total_rate();
  if (!(total > 0.0)) throw Error(ErrorKind::FrozenState, "no walker can move");
  KmcEvent ev;
  ev.elapsed = std::exponential_distribution<double>(total)(rng);
  std::uniform_real_distribution<double> unif(0.0, total);
  std::size_t j = descend(tree_, leaves_, unif(rng));
  while (tree_[leaves_ + j] <= 0.0) j = descend(tree_, leaves_, unif(rng));
  ev.site = j;
  ev.direction = pick_direction(st_, j, rf_, rng);
  apply_jump(st_, j, ev.direction);
  const std::size_t L = st_.size();
  update(j);
  update(ev.direction == Direction::Right ? (j + 1) % L : (j + L - 1) % L);
  st_.time += ev.elapsed;
  ++events_;
  return ev;
}

void KmcEngine::run_until(double t_end, Rng& rng,
                          const std::function<void(const BrickState&, double)>& on_hold) {
  while (st_.time < t_end) {
    const double total = total_rate();
    if (!(total > 0.0)) {
      if (on_hold) on_hold(st_, t_end - st_.time);
      st_.time = t_end;
      return;
    }
    // Draw the waiting time first; the event itself only happens if it
    // fits before t_end (memorylessness makes the cut exact).
    const double wait = std::exponential_distribution<double>(total)(rng);
    if (st_.time + wait >= t_end) {
      if (on_hold) on_hold(st_, t_end - st_.time);
      st_.time = t_end;
      return;
    }
    if (on_hold) on_hold(st_, wait);
    std::uniform_real_distribution<double> unif(0.0, total);
    std::size_t j = descend(tree_, leaves_, unif(rng));
    while (tree_[leaves_ + j] <= 0.0) j = descend(tree_, leaves_, unif(rng));
    const Direction d = pick_direction(st_, j, rf_, rng);
    apply_jump(st_, j, d);
    const std::size_t L = st_.size();
    update(j);
    update(d == Direction::Right ? (j + 1) % L : (j + L - 1) % L);
    st_.time += wait;
    ++events_;
  }
}

double generator_n(const BrickState& st, std::size_t j, const RateFunction& rf) {
  const std::size_t L = st.size();
  const std::size_t l = (j + L - 1) % L, r = (j + 1) % L;
  auto nr = [&](std::size_t i, long long zz) { return static_cast<double>(st.n[i]) * rf(zz); };
  return nr(l, st.z[l]) - nr(j, st.z[j]) - nr(j, -st.z[j]) + nr(r, -st.z[r]);
}

double generator_z(const BrickState& st, std::size_t j, const RateFunction& rf) {
  const std::size_t L = st.size();
  const std::size_t l = (j + L - 1) % L, r = (j + 1) % L;
  auto nr = [&](std::size_t i, long long zz) { return static_cast<double>(st.n[i]) * rf(zz); };
  return nr(l, st.z[l]) - nr(j, st.z[j]) + nr(j, -st.z[j]) - nr(r, -st.z[r]);
}

SimulationResult simulate(const BrickState& st0, const RateFunction& rf, double duration,
                          const ObservableConfig& obs, Rng& rng) {
  if (!(duration > 0.0)) throw Error(ErrorKind::InvalidArgument, "duration must be positive");
  if (obs.dynkin_site >= static_cast<long long>(st0.size())) {
    throw Error(ErrorKind::InvalidArgument, "observed site outside the ring");
  }
  std::vector<double> times = obs.record_times;
  std::sort(times.begin(), times.end());
  const double t0 = st0.time, t_end = st0.time + duration;

  SimulationResult res;
  std::size_t next = 0;
  while (next < times.size() && times[next] < t0) ++next;
  KmcEngine engine(st0, rf);
  engine.run_until(t_end, rng, [&](const BrickState& st, double held) {
    const double until = st.time + held;
    while (next < times.size() &&
           (times[next] < until || (until >= t_end && times[next] <= t_end))) {
      res.snapshots.push_back({times[next], st.n, st.z, st.h});
      ++next;
    }
    if (obs.dynkin_site >= 0) {
      res.dynkin_integral += generator_n(st, static_cast<std::size_t>(obs.dynkin_site), rf) * held;
    }
  });
  res.final_state = engine.state();
  res.events = engine.events();
  res.growth_rate =
      static_cast<double>(res.events) / (static_cast<double>(st0.size()) * duration);
  return res;
}

FluxEstimate estimate_flux(const std::vector<BrickState>& ensemble, const RateFunction& rf) {
  FluxEstimate fe;
  double sp = 0.0, sp2 = 0.0, sm = 0.0, sm2 = 0.0;
  for (const auto& st : ensemble) {
    for (std::size_t j = 0; j < st.size(); ++j) {
      const double n = static_cast<double>(st.n[j]);
      const double p = n * rf(st.z[j]);
      const double m = n * rf(-st.z[j]);
      sp += p;
      sp2 += p * p;
      sm += m;
      sm2 += m * m;
      ++fe.samples;
    }
  }
  if (fe.samples < 2) throw Error(ErrorKind::InvalidArgument, "need at least two site samples");
  const double N = static_cast<double>(fe.samples);
  fe.plus = sp / N;
  fe.minus = sm / N;
  fe.plus_se = std::sqrt(std::max(0.0, (sp2 / N - fe.plus * fe.plus) / (N - 1.0)));
  fe.minus_se = std::sqrt(std::max(0.0, (sm2 / N - fe.minus * fe.minus) / (N - 1.0)));
  return fe;
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double log_factorial(long long n) { return std::lgamma(static_cast<double>(n) + 1.0); }

}  // namespace

double two_site_balance_residual(const GibbsParams& gp, Direction d, long long n_max,
                                 long long z_max, std::size_t n_functions, std::uint64_t seed) {
  gp.validate();
  if (n_max < 3 || z_max < 3) throw Error(ErrorKind::InvalidArgument, "ranges too small");
  const RateFunction rf(gp.beta);
  double Zs[2];
  for (int s = 0; s < 2; ++s) {
    GibbsParams g = gp;
    g.parity = s;
    Zs[s] = partition_function(g).Z;
  }
  auto mu = [&](long long n, long long z) {
    const double zz = static_cast<double>(z);
    const double lw = static_cast<double>(n) * std::log(gp.fugacity) - log_factorial(n) +
                      zz * std::log(gp.tilt) - 0.5 * gp.beta * zz * zz;
    return std::exp(lw) / Zs[parity_of(n + z)];
  };
  // Test functions: hashed values in [-1, 1], zero within two steps of the
  // truncation edge so that no contributing term is cut off.
  auto f = [&](std::size_t k, long long a_n, long long a_z, long long b_n, long long b_z) {
    if (a_n > n_max - 2 || b_n > n_max - 2 || std::llabs(a_z) > z_max - 2 ||
        std::llabs(b_z) > z_max - 2 || a_n < 0 || b_n < 0) {
      return 0.0;
    }
    std::uint64_t h = splitmix(seed * 1000003ULL + k);
    for (long long v : {a_n, a_z, b_n, b_z}) h = splitmix(h ^ static_cast<std::uint64_t>(v + 1000));
    return 2.0 * static_cast<double>(h >> 11) * 0x1.0p-53 - 1.0;
  };

  double worst = 0.0;
  for (std::size_t k = 0; k < n_functions; ++k) {
    for (int sa = 0; sa < 2; ++sa) {
      for (int sb = 0; sb < 2; ++sb) {
        // Site a is the walker's origin (j); site b its destination (j + 1 or j - 1).
        double lhs = 0.0, rhs = 0.0;
        for (long long an = 0; an <= n_max; ++an) {
          for (long long az = -z_max; az <= z_max; ++az) {
            if (parity_of(an + az) != sa) continue;
            const double ma = mu(an, az);
            for (long long bn = 0; bn <= n_max; ++bn) {
              for (long long bz = -z_max; bz <= z_max; ++bz) {
                if (parity_of(bn + bz) != sb) continue;
                const double w = ma * mu(bn, bz);
                if (d == Direction::Right) {
                  if (an > 0) lhs += an * rf(az) * w * f(k, an - 1, az - 1, bn + 1, bz + 1);
                  rhs += bn * rf(bz) * w * f(k, an, az, bn, bz);
                } else {
                  if (an > 0) lhs += an * rf(-az) * w * f(k, an - 1, az + 1, bn + 1, bz - 1);
                  rhs += bn * rf(-bz) * w * f(k, an, az, bn, bz);
                }
              }
            }
          }
        }
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
      }
    }
  }
  return worst;
}

Histogram site_histogram(const std::vector<SiteValue>& samples) {
  std::map<std::pair<long long, long long>, std::size_t> counts;
  for (const auto& s : samples) ++counts[{s.n, s.z}];
  Histogram h;
  h.count = samples.size();
  const double N = static_cast<double>(samples.size());
  for (const auto& [key, c] : counts) {
    h.mass.push_back({SiteValue{key.first, key.second}, static_cast<double>(c) / N});
  }
  return h;
}

double total_variation(const Histogram& a, const Histogram& b) {
  std::map<std::pair<long long, long long>, double> diff;
  for (const auto& [v, m] : a.mass) diff[{v.n, v.z}] += m;
  for (const auto& [v, m] : b.mass) diff[{v.n, v.z}] -= m;
  double tv = 0.0;
  for (const auto& [k, m] : diff) tv += std::abs(m);
  return 0.5 * tv;
}

double total_variation(const Histogram& a, const GibbsParams& gp) {
  const double Z = partition_function(gp).Z;
  double tv = 0.0, covered = 0.0;
  for (const auto& [v, m] : a.mass) {
    double p = 0.0;
    if (parity_of(v.n + v.z) == gp.parity) {
      const double zz = static_cast<double>(v.z);
      p = std::exp(static_cast<double>(v.n) * std::log(gp.fugacity) - log_factorial(v.n) +
                   zz * std::log(gp.tilt) - 0.5 * gp.beta * zz * zz) /
          Z;
    }
    covered += p;
    tv += std::abs(m - p);
  }
  return 0.5 * (tv + std::max(0.0, 1.0 - covered));
}

std::vector<SiteValue> site_values(const BrickState& st) {
  std::vector<SiteValue> out(st.size());
  for (std::size_t j = 0; j < st.size(); ++j) out[j] = {st.n[j], st.z[j]};
  return out;
}

}  // namespace depo
