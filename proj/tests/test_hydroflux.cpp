#include <doctest.h>

#include <cmath>
#include <random>

#include "depo/bricklayer.hpp"
#include "depo/error.hpp"
#include "depo/hydroflux.hpp"

using namespace depo;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidArgument;
}

// sum over z = parity (mod 2), |z| <= 40, of z^k exp(-beta z^2 / 2).
double slope_moment(double beta, int parity, int k) {
  double s = 0.0;
  for (int z = -40; z <= 40; ++z) {
    if (((z % 2) + 2) % 2 != parity) continue;
    s += std::pow(static_cast<double>(z), k) * std::exp(-0.5 * beta * z * z);
  }
  return s;
}

struct Moments {
  double mean_n = 0.0, mean_z = 0.0, se_n = 0.0, se_z = 0.0;
  Mat2 cov{};
  Mat2 cov_se{};
};

Moments sample_moments(const GibbsParams& gp, std::size_t N, std::uint64_t seed) {
  const BrickState st = sample_gibbs(gp, N, seed);
  const double n = static_cast<double>(N);
  Moments m;
  for (std::size_t j = 0; j < N; ++j) {
    m.mean_n += static_cast<double>(st.n[j]) / n;
    m.mean_z += static_cast<double>(st.z[j]) / n;
  }
  Mat2 s{}, s2{};
  for (std::size_t j = 0; j < N; ++j) {
    const double a[2] = {static_cast<double>(st.n[j]) - m.mean_n,
                         static_cast<double>(st.z[j]) - m.mean_z};
    for (int p = 0; p < 2; ++p) {
      for (int q = 0; q < 2; ++q) {
        s[p][q] += a[p] * a[q];
        s2[p][q] += a[p] * a[q] * a[p] * a[q];
      }
    }
  }
  for (int p = 0; p < 2; ++p) {
    for (int q = 0; q < 2; ++q) {
      m.cov[p][q] = s[p][q] / n;
      m.cov_se[p][q] = std::sqrt(std::max(0.0, s2[p][q] / n - m.cov[p][q] * m.cov[p][q]) / n);
    }
  }
  m.se_n = std::sqrt(m.cov[0][0] / n);
  m.se_z = std::sqrt(m.cov[1][1] / n);
  return m;
}

}  // namespace

TEST_CASE("macro_from_fug examples") {
  const ThermoTable tab(0, 1.0);
  CHECK(macro_from_fug(0.7, 1.0, tab).u == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::abs(macro_from_fug(0.7, 1.0, tab).u) < 1e-14);
  CHECK(macro_from_fug(1e-10, 1.3, tab).rho < 1e-9);

  const Moments mc = sample_moments(tab.params(0.8, 1.2), 200000, 17);
  const MacroState ms = macro_from_fug(0.8, 1.2, tab);
  CHECK(std::abs(ms.rho - mc.mean_n) < 3.0 * mc.se_n);
  CHECK(std::abs(ms.u - mc.mean_z) < 3.0 * mc.se_z);

  const Mat2 cov = covariance(0.8, 1.2, tab);
  for (int p = 0; p < 2; ++p) {
    for (int q = 0; q < 2; ++q) CHECK(std::abs(cov[p][q] - mc.cov[p][q]) < 3.0 * mc.cov_se[p][q]);
  }
}

TEST_CASE("macro Jacobian matches finite differences and is positive definite") {
  const ThermoTable tab(1, 0.8);
  const double l = 0.6, t = 0.9, h = 1e-6;
  const Mat2 J = macro_jacobian(l, t, tab);
  const MacroState pl = macro_from_fug(l + h, t, tab), ml = macro_from_fug(l - h, t, tab);
  const MacroState pt = macro_from_fug(l, t + h, tab), mt = macro_from_fug(l, t - h, tab);
  CHECK(J[0][0] == doctest::Approx((pl.rho - ml.rho) / (2 * h)).epsilon(1e-6));
  CHECK(J[1][0] == doctest::Approx((pl.u - ml.u) / (2 * h)).epsilon(1e-6));
  CHECK(J[0][1] == doctest::Approx((pt.rho - mt.rho) / (2 * h)).epsilon(1e-6));
  CHECK(J[1][1] == doctest::Approx((pt.u - mt.u) / (2 * h)).epsilon(1e-6));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ll(-6.0, 2.0), lt(-2.0, 2.0);
  for (int k = 0; k < 100; ++k) {
    const Mat2 c = covariance(std::exp(ll(rng)), std::exp(lt(rng)), tab);
    CHECK(c[0][0] > 0.0);
    CHECK(c[0][0] * c[1][1] - c[0][1] * c[1][0] > 0.0);
  }
}

TEST_CASE("fug_from_macro examples") {
  const ThermoTable tab(0, 1.0);
  const MacroState ms = macro_from_fug(0.8, 1.2, tab);
  const Fugacities f = fug_from_macro(ms, tab);
  CHECK(std::abs(f.fugacity - 0.8) < 1e-10);
  CHECK(std::abs(f.tilt - 1.2) < 1e-10);
  const MacroState back = macro_from_fug(f.fugacity, f.tilt, tab);
  CHECK(std::abs(back.rho - ms.rho) < 1e-10);
  CHECK(std::abs(back.u - ms.u) < 1e-10);

  CHECK(std::abs(fug_from_macro({1.3, 0.0}, tab).tilt - 1.0) < 1e-12);
  const Fugacities a = fug_from_macro({0.5, 0.4}, tab), b = fug_from_macro({0.5, -0.4}, tab);
  CHECK(std::abs(a.fugacity - b.fugacity) < 1e-10);
  CHECK(std::abs(a.tilt * b.tilt - 1.0) < 1e-10);

  CHECK(kind_of([&] { fug_from_macro({0.0, 0.1}, tab); }) == ErrorKind::OutsideDomain);
  CHECK(kind_of([&] { fug_from_macro({-1.0, 0.1}, tab); }) == ErrorKind::OutsideDomain);
  CHECK(kind_of([&] { fug_from_macro({0.5, 0.4}, tab, 1e-12, 1); }) ==
        ErrorKind::NewtonDiverged);
}

TEST_CASE("symmetry suite and round trips on sampled points") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> lr(-5.0, 2.5), ur(-3.0, 3.0);
  for (int s : {0, 1}) {
    const ThermoTable tab(s, 1.0);
    for (int k = 0; k < 100; ++k) {
      const double rho = std::exp(lr(rng)), u = ur(rng);
      const PartitionValues p1 = tab.partition(rho, 1.0 + 0.01 * k);
      const PartitionValues p2 = tab.partition(rho, 1.0 / (1.0 + 0.01 * k));
      CHECK(std::abs(p1.Z - p2.Z) <= 1e-10 * p1.Z);
      const Fugacities f = fug_from_macro({rho, u}, tab);
      const Fugacities g = fug_from_macro({rho, -u}, tab);
      CHECK(std::abs(f.fugacity - g.fugacity) <= 1e-10 * f.fugacity);
      CHECK(std::abs(f.tilt * g.tilt - 1.0) <= 1e-10);
      const MacroState back = macro_from_fug(f.fugacity, f.tilt, tab);
      CHECK(std::abs(back.rho - rho) <= 1e-10 * std::max(1.0, rho));
      CHECK(std::abs(back.u - u) <= 1e-10 * std::max(1.0, std::abs(u)));
    }
  }
}

TEST_CASE("macroscopic fluxes") {
  const ThermoTable tab(0, 1.0);
  const MacroState ms = macro_from_fug(0.8, 1.2, tab);
  const Vec2 J = macro_flux(ms, tab);
  CHECK(J[0] == doctest::Approx(0.8 * (1.2 - 1.0 / 1.2)).epsilon(1e-10));
  CHECK(J[1] == doctest::Approx(0.8 * (1.2 + 1.0 / 1.2)).epsilon(1e-10));
  CHECK(std::abs(J[0] - 0.29333) < 1e-5);
  CHECK(std::abs(J[1] - 1.62667) < 1e-5);
  CHECK(macro_flux({0.9, 0.0}, tab)[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(macro_flux({0.9, 0.0}, tab)[0]) < 1e-12);
  const Vec2 Jm = macro_flux({ms.rho, -ms.u}, tab);
  CHECK(Jm[0] == doctest::Approx(-J[0]).epsilon(1e-10));
  CHECK(Jm[1] == doctest::Approx(J[1]).epsilon(1e-10));

  // Against microscopic estimates of <n r(+-z)>.
  const RateFunction rf(1.0);
  std::vector<BrickState> ens;
  for (std::uint64_t s = 0; s < 10; ++s) ens.push_back(sample_gibbs(tab.params(0.8, 1.2), 10000, 40 + s));
  const FluxEstimate fe = estimate_flux(ens, rf);
  CHECK(std::abs(fe.plus - fe.minus - J[0]) < 3.0 * std::hypot(fe.plus_se, fe.minus_se));
  CHECK(std::abs(fe.plus + fe.minus - J[1]) < 3.0 * std::hypot(fe.plus_se, fe.minus_se));
}

TEST_CASE("flux Jacobian and hydro model speeds") {
  const ThermoTable tab(0, 1.0);
  const MacroState ms{0.7, 0.3};
  const Mat2 A = macro_flux_jacobian(ms, tab);
  const double h = 1e-6;
  const Vec2 pr = macro_flux({ms.rho + h, ms.u}, tab), mr = macro_flux({ms.rho - h, ms.u}, tab);
  const Vec2 pu = macro_flux({ms.rho, ms.u + h}, tab), mu = macro_flux({ms.rho, ms.u - h}, tab);
  CHECK(A[0][0] == doctest::Approx((pr[0] - mr[0]) / (2 * h)).epsilon(1e-6));
  CHECK(A[1][0] == doctest::Approx((pr[1] - mr[1]) / (2 * h)).epsilon(1e-6));
  CHECK(A[0][1] == doctest::Approx((pu[0] - mu[0]) / (2 * h)).epsilon(1e-6));
  CHECK(A[1][1] == doctest::Approx((pu[1] - mu[1]) / (2 * h)).epsilon(1e-6));

  const double tr = A[0][0] + A[1][1], det = A[0][0] * A[1][1] - A[0][1] * A[1][0];
  const double disc = tr * tr - 4.0 * det;
  REQUIRE(disc > 0.0);
  const FluxModel model = hydro_model(tab);
  const auto sp = model.speeds({ms.rho, ms.u});
  CHECK(sp[0] == doctest::Approx(0.5 * (tr - std::sqrt(disc))).epsilon(1e-9));
  CHECK(sp[1] == doctest::Approx(0.5 * (tr + std::sqrt(disc))).epsilon(1e-9));
  const Vec2 mf = model.flux({ms.rho, ms.u});
  const Vec2 direct = macro_flux(ms, tab);
  CHECK(mf[0] == doctest::Approx(direct[0]).epsilon(1e-12));
  CHECK(mf[1] == doctest::Approx(direct[1]).epsilon(1e-12));
}

TEST_CASE("low-density constant") {
  CHECK(low_density_c(1.0, 0) == doctest::Approx(1.0 / slope_moment(1.0, 0, 2)).epsilon(1e-13));
  CHECK(low_density_c(1.0, 1) == doctest::Approx(1.0 / slope_moment(1.0, 1, 2)).epsilon(1e-13));
  CHECK(std::abs(low_density_c(1.0, 0) - 0.915) < 1e-3);
  CHECK(low_density_c(5.0, 0) > low_density_c(1.0, 0));
  CHECK(low_density_c(30.0, 0) > 1e10);

  // Exact first-order coefficients of the inverse map, fitted numerically.
  const ThermoTable tab(0, 1.0);
  const LowDensityCoefficients co = low_density_coefficients(1.0, 0);
  CHECK(co.kappa == doctest::Approx(slope_moment(1.0, 0, 0) / slope_moment(1.0, 1, 0)).epsilon(1e-12));
  CHECK(co.c_eff == doctest::Approx(slope_moment(1.0, 0, 0) / slope_moment(1.0, 0, 2)).epsilon(1e-12));
  const double rho = 1e-7;
  double prev = 1e300;
  for (double u : {1e-2, 1e-3, 1e-4}) {
    const Fugacities f = fug_from_macro({rho, u}, tab);
    const double dev = std::abs(f.tilt - 1.0 - co.c_eff * u) / u;
    CHECK(dev < prev);
    prev = dev;
    CHECK(f.fugacity / rho == doctest::Approx(co.kappa).epsilon(1e-3));
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("rescaled fluxes approach the deposition fluxes") {
  const ThermoTable tab(0, 1.0);
  std::vector<MacroState> states;
  for (double rho : {0.5, 1.0, 2.0}) {
    for (double u : {-1.0, -0.3, 0.4, 1.2}) states.push_back({rho, u});
  }
  double prev = 1e300;
  for (double alpha : {1.0, 0.1, 0.01}) {
    const RescaledDeviation d = rescaled_flux_limit(states, alpha, tab);
    CHECK(std::isfinite(d.combined()));
    CHECK(d.combined() < prev);
    prev = d.combined();
  }
  CHECK(kind_of([&] { rescaled_flux_limit(states, 0.0, tab); }) == ErrorKind::InvalidArgument);
}
