#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "depo/characteristics.hpp"
#include "depo/field.hpp"

namespace depo {

/// Flux of the deposition system: (rho u, rho).
Vec2 flux(const PhysState& p);

/// A conservation law d_t v + d_x J(v) = 0 for v = (rho, u): its flux and
/// a bound (min, max) on the characteristic speeds at a state.
struct FluxModel {
  std::string name;
  std::function<Vec2(const PhysState&)> flux;
  std::function<std::array<double, 2>(const PhysState&)> speeds;
  /// Whether cells must stay in the closure of u^2 + 4 rho > 0.
  bool check_deposition_hyperbolicity = false;
};

FluxModel deposition_model();

enum class Scheme { LaxFriedrichs, HLL, Viscous };

const char* to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct StepOptions {
  double cfl = 0.45;
  bool enforce_positivity = true;  // abort with NonPhysicalState when rho < -1e-10
};

inline constexpr double kPositivityTolerance = 1e-10;

double max_char_speed(const Field1D& f, const FluxModel& model);

/// Largest admissible time step: cfl dx / max_speed, capped by 0.5 dx^2 / eps.
double stable_dt(const Field1D& f, double eps, double cfl, const FluxModel& model);

/// One explicit two-stage step of the viscous system
///   d_t rho + d_x(rho u) = eps d_xx rho,  d_t u + d_x rho = eps d_xx u
/// with centered flux differences and centered second differences.
Field1D step_viscous(const Field1D& f, double eps, double dt, const StepOptions& opts = {},
                     const FluxModel& model = deposition_model());

/// One conservative step of an inviscid scheme: Lax-Friedrichs with forward
/// Euler, or HLL with a two-stage SSP Runge-Kutta.
Field1D step_inviscid(const Field1D& f, Scheme scheme, double dt, const StepOptions& opts = {},
                      const FluxModel& model = deposition_model());

struct Diagnostics {
  double t = 0.0;
  double sup_w = 0.0;
  double sup_z = 0.0;
  double mass = 0.0;
  double total_u = 0.0;
  double entropy = 0.0;  // integral of rho log rho + u^2 / 2
};

Diagnostics diagnose(const Field1D& f);

struct Trajectory {
  std::vector<Field1D> fields;
  std::vector<Diagnostics> diagnostics;
  std::size_t steps = 0;

  std::vector<double> times() const;
};

struct EvolveConfig {
  Scheme scheme = Scheme::HLL;
  double viscosity = 0.0;
  double cfl = 0.45;
  std::size_t snapshot_stride = 1;  // record every k-th step; the last step always
  double fixed_dt = 0.0;            // > 0 disables adaptive stepping
  bool enforce_positivity = true;
  bool record_diagnostics = true;
  FluxModel model = deposition_model();
};

/// Steps f0 to t_end. The first snapshot is f0 itself.
Trajectory evolve(const Field1D& f0, const EvolveConfig& cfg, double t_end);

struct ExtremaSeries {
  std::vector<double> sup_w;
  std::vector<double> sup_z;
};

/// Per-snapshot maxima of the Riemann invariants. Densities within the
/// positivity tolerance below zero are treated as vacuum.
ExtremaSeries monitor_extrema(const Trajectory& traj);

struct ShockLocatorOptions {
  std::size_t window = 10;          // cells either side used for plateau levels
  double threshold = 1e-6;          // minimum |d rho| between cells, relative to max |rho|
  double skip_fraction = 0.1;       // ignore the earliest part of the run in the fit
};

/// Sub-cell position of the steepest density jump (mid-level crossing).
double locate_shock(const Field1D& f, const ShockLocatorOptions& opts = {});

/// Least-squares slope of shock position against time.
double measure_shock_speed(const Trajectory& traj, const ShockLocatorOptions& opts = {});

/// rho -> alpha^(2(1-nu)) rho(alpha t, alpha^nu x), u -> alpha^(1-nu) u(alpha t, alpha^nu x).
/// Snapshots keep their cells; times become t / alpha and the grid is mapped
/// to x / alpha^nu.
Trajectory rescale(const Trajectory& traj, double alpha, double nu);

/// Linear interpolation of a field onto another grid (cell centers).
Field1D resample(const Field1D& f, const GridSpec& target);

/// L1 norms (over cells, averaged over interior snapshots) of the centered
/// space-time residuals of both equations.
Vec2 pde_residual(const Trajectory& traj);

/// Heights at the n_cells + 1 cell faces, so that u_i ~ -(h_{i+1} - h_i) / dx.
struct HeightField {
  GridSpec grid;
  std::vector<double> h;
  double time = 0.0;
};

/// Heights integrated from the slopes of f, starting from h_left at x_min.
HeightField height_from_slope(const Field1D& f, double h_left = 0.0);

/// max_i |u_i + (h_{i+1} - h_i) / dx|.
double height_consistency(const Field1D& f, const HeightField& h);

/// Advances d_t h = rho (face densities, trapezoidal in time) along the
/// snapshots of traj. Throws InconsistentInitialHeight unless h0 matches the
/// first snapshot's slopes to within O(dx).
std::vector<HeightField> reconstruct_height(const Trajectory& traj, const HeightField& h0);

// Initial data helpers.
Field1D make_field(const GridSpec& g, const std::function<PhysState(double)>& profile);
Field1D make_riemann(const GridSpec& g, const PhysState& left, const PhysState& right,
                     double x0 = 0.0);

/// L1 distance sum |rho_a - rho_b| dx + sum |u_a - u_b| dx on a shared grid.
double l1_distance(const Field1D& a, const Field1D& b);

}  // namespace depo
