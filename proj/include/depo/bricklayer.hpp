#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace depo {

using Rng = std::mt19937_64;

/// Jump rate r(z) of a walker on a site of slope z, with R(z) = prod_{k=1}^{|z|} r(k).
/// The default family is r(z) = exp(beta (z - 1/2)), for which R(z) = exp(beta z^2 / 2).
class RateFunction {
 public:
  explicit RateFunction(double beta = 1.0);

  /// Tabulated rates on z in [1 - K, K] (values.size() == 2K). Must satisfy
  /// r(z) r(1 - z) = 1 to 1e-12 and be increasing; throws InvalidArgument.
  static RateFunction tabulated(const std::vector<double>& values);

  double operator()(long long z) const;
  double R(long long z) const;

  bool exponential() const { return table_.empty(); }
  double beta() const { return beta_; }
  /// lim r(k); infinite for the exponential family.
  double theta_star() const;

 private:
  double beta_;
  std::vector<double> table_;  // r(1 - K) .. r(K) when tabulated
  long long k_ = 0;
  std::vector<double> cache_;  // exponential family, z in [-kCache, kCache]
  static constexpr long long kCache = 64;
};

double rate(long long z, double beta);

struct GibbsParams {
  double fugacity = 1.0;
  double tilt = 1.0;
  int parity = 0;
  double beta = 1.0;

  /// Throws InvalidArgument outside fugacity > 0, tilt > 0, parity in {0,1}, beta > 0.
  void validate() const;
};

/// Z_s(lambda, theta) = sum over n + z = s (mod 2) of lambda^n / n! theta^z / R(z),
/// with its first and second partial derivatives.
struct PartitionValues {
  double Z = 0.0;
  double Z_l = 0.0;
  double Z_t = 0.0;
  double Z_ll = 0.0;
  double Z_lt = 0.0;
  double Z_tt = 0.0;
  std::size_t z_terms = 0;  // slope terms summed per parity class
};

/// The n-sum over a parity class is cosh or sinh of the fugacity, so only
/// the z-sums are truncated; each is summed outward from its mode until a
/// geometric bound on the remaining tail drops below tol * Z.
/// Throws NonConvergent if max_terms is exceeded.
PartitionValues partition_function(const GibbsParams& gp, double tol = 1e-12,
                                   std::size_t max_terms = 100000);

struct SiteValue {
  long long n = 0;
  long long z = 0;
};

/// Exact sampler for one site of the Gibbs measure: Poisson(fugacity) for n
/// and a discrete Gaussian with weights theta^z exp(-beta z^2 / 2) for z,
/// rejected until n + z has the requested parity.
class GibbsSampler {
 public:
  explicit GibbsSampler(const GibbsParams& gp);
  SiteValue operator()(Rng& rng) const;
  const GibbsParams& params() const { return gp_; }

 private:
  GibbsParams gp_;
  long long z_lo_ = 0;
  mutable std::poisson_distribution<long long> poisson_;
  mutable std::discrete_distribution<long long> slope_;
};

/// Ring configuration. Heights h_j live on the edge between sites j and j+1
/// and are tracked only when requested (which needs sum z = 0); then
/// z_j = h_{j-1} - h_j holds exactly.
struct BrickState {
  std::vector<long long> n;
  std::vector<long long> z;
  std::vector<long long> h;     // empty when heights are not tracked
  std::vector<int> parity;      // (n_j + z_j) mod 2, fixed at construction
  double time = 0.0;

  BrickState() = default;
  /// Throws InvalidArgument on size mismatch, negative n, L < 2, or
  /// track_heights with sum z != 0. Heights start as h_j = -(z_0 + ... + z_j).
  BrickState(std::vector<long long> n, std::vector<long long> z, bool track_heights = false);

  std::size_t size() const { return n.size(); }
  bool tracks_heights() const { return !h.empty(); }
  long long total_n() const;
  long long total_z() const;
  bool parity_intact() const;
  bool heights_consistent() const;
};

/// i.i.d. sites from the Gibbs measure. With track_heights the slope sum is
/// moved to zero at site 0 (adding one walker there if the shift is odd).
BrickState sample_gibbs(const GibbsParams& gp, std::size_t L, std::uint64_t seed,
                        bool track_heights = false);
/// Local-equilibrium sample with per-site parameters (shared parity and beta).
BrickState sample_local_gibbs(const std::vector<GibbsParams>& sites, Rng& rng);

enum class Direction { Right, Left };

/// Applies Theta_{j+} (Right) or Theta_{j-} (Left). Requires n_j >= 1.
void apply_jump(BrickState& st, std::size_t j, Direction d);

/// Total jump rate n_j (r(z_j) + r(-z_j)) of site j.
double site_rate(const BrickState& st, std::size_t j, const RateFunction& rf);

struct KmcEvent {
  std::size_t site = 0;
  Direction direction = Direction::Right;
  double elapsed = 0.0;
};

/// One Gillespie step choosing the event by a linear scan over sites.
/// Throws FrozenState when no walker can move.
KmcEvent kmc_step(BrickState& st, const RateFunction& rf, Rng& rng);

/// Gillespie engine with a binary rate tree: O(log L) selection and updates.
class KmcEngine {
 public:
  KmcEngine(BrickState st, RateFunction rf);

  const BrickState& state() const { return st_; }
  BrickState& mutable_state() { return st_; }
  double total_rate() const { return tree_.empty() ? 0.0 : tree_[1]; }
  std::uint64_t events() const { return events_; }

  /// Draws the next event and applies it. Throws FrozenState if the total rate is 0.
  KmcEvent step(Rng& rng);

  /// Runs until the next event would pass t_end, then sets the clock to t_end.
  /// The callback (if any) sees the state just before each event together
  /// with the time it was held.
  void run_until(double t_end, Rng& rng,
                 const std::function<void(const BrickState&, double held)>& on_hold = {});

 private:
  void update(std::size_t j);

  BrickState st_;
  RateFunction rf_;
  std::size_t leaves_ = 1;
  std::vector<double> tree_;
  std::uint64_t events_ = 0;
};

/// Ln_j: n_{j-1} r(z_{j-1}) - n_j (r(z_j) + r(-z_j)) + n_{j+1} r(-z_{j+1}).
double generator_n(const BrickState& st, std::size_t j, const RateFunction& rf);
/// Lz_j: n_{j-1} r(z_{j-1}) - n_j r(z_j) + n_j r(-z_j) - n_{j+1} r(-z_{j+1}).
double generator_z(const BrickState& st, std::size_t j, const RateFunction& rf);

struct ObservableConfig {
  std::vector<double> record_times;  // snapshots of (n, z, h) at these times
  long long dynkin_site = -1;        // >= 0: integrate L n_j along the path
};

struct Snapshot {
  double t = 0.0;
  std::vector<long long> n;
  std::vector<long long> z;
  std::vector<long long> h;
};

struct SimulationResult {
  BrickState final_state;
  std::vector<Snapshot> snapshots;
  std::uint64_t events = 0;
  double growth_rate = 0.0;        // bricks per edge per unit time
  double dynkin_integral = 0.0;    // integral of L n_j over [0, t_end]
};

/// Simulates to st0.time + duration. An empty lattice yields no events.
SimulationResult simulate(const BrickState& st0, const RateFunction& rf, double duration,
                          const ObservableConfig& obs, Rng& rng);

struct FluxEstimate {
  double plus = 0.0;      // <n r(z)>
  double plus_se = 0.0;
  double minus = 0.0;     // <n r(-z)>
  double minus_se = 0.0;
  std::size_t samples = 0;
};

/// Site averages of n r(z) and n r(-z) over an ensemble of configurations;
/// standard errors treat sites as independent draws.
FluxEstimate estimate_flux(const std::vector<BrickState>& ensemble, const RateFunction& rf);

/// Two-site balance for right (or left) jumps, summed exhaustively over
/// n <= n_max, |z| <= z_max for both sites and all four parity pairs, with
/// random test functions supported away from the truncation edge. Returns
/// the largest |lhs - rhs| / max(1, |lhs|).
double two_site_balance_residual(const GibbsParams& gp, Direction d, long long n_max,
                                 long long z_max, std::size_t n_functions = 8,
                                 std::uint64_t seed = 1);

/// Empirical joint law of (n, z) as a sorted histogram.
struct Histogram {
  std::vector<std::pair<SiteValue, double>> mass;
  std::size_t count = 0;
};

Histogram site_histogram(const std::vector<SiteValue>& samples);
double total_variation(const Histogram& a, const Histogram& b);
/// TV distance of an empirical law from the exact Gibbs marginal.
double total_variation(const Histogram& a, const GibbsParams& gp);

std::vector<SiteValue> site_values(const BrickState& st);

}  // namespace depo
