#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "transition/analytic.hpp"
#include "transition/madelung.hpp"
#include "transition/solver.hpp"

using namespace transition;
using Catch::Approx;
using cd = std::complex<double>;

namespace {

ComplexField<double> plane_wave(const Grid1D<double>& g, double k) {
  ComplexArray<double> v(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) v[i] = std::polar(1.0, k * g.x(i));
  return ComplexField<double>(g, v);
}

PolarField<double> real_polar(const Grid1D<double>& g, const RealArray<double>& a) {
  return PolarField<double>(g, a, RealArray<double>::Zero(g.size()));
}

// Max |r| over interior nodes where the amplitude exceeds 1e-3 of its peak.
double masked_max(const RealArray<double>& r, const RealArray<double>& amplitude) {
  const double cut = 1e-3 * amplitude.maxCoeff();
  double worst = 0;
  for (Eigen::Index i = 2; i + 2 < r.size(); ++i) {
    if (amplitude[i] > cut) worst = std::max(worst, std::abs(r[i]));
  }
  return worst;
}

}  // namespace

TEST_CASE("polar_decompose of a plane wave", "[madelung]") {
  const auto g = make_grid(-5.0, 5.0, 201);
  const double k = 2.3;
  const auto p = polar_decompose(plane_wave(g, k), 1.0);
  CHECK((p.amplitude() - 1.0).abs().maxCoeff() < 1e-15);
  // Constant amplitude: the first node is the anchor.
  const double s0 = p.action()[0];
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    CHECK(p.action()[i] - s0 == Approx(k * (g.x(i) - g.x(0))).margin(1e-12));
  }
}

TEST_CASE("polar_decompose of a real positive field has zero action", "[madelung]") {
  const auto g = make_grid(-5.0, 5.0, 201);
  ComplexArray<double> v(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) v[i] = std::exp(-g.x(i) * g.x(i) / 4);
  const auto p = polar_decompose(ComplexField<double>(g, v), 1.0);
  CHECK((p.action() == 0.0).all());
}

TEST_CASE("polar_decompose round trip of the evolved two-Gaussian state",
          "[madelung]") {
  const TwoGaussianConfig<double> cfg(3.0, 1.0, SimParams<double>());
  const auto g = make_grid(-40.0, 40.0, 2001);
  const auto psi = wavefunction_at(cfg, 5.0, g);
  const auto back = recompose(polar_decompose(psi, 1.0), 1.0);
  const RealArray<double> a = psi.values().abs();
  const double cut = 1e-6 * a.maxCoeff();
  double worst = 0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (a[i] > cut) worst = std::max(worst, std::abs(back.values()[i] - psi.values()[i]));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("polar_decompose rejects a vanishing field", "[madelung]") {
  const auto g = make_grid(0.0, 1.0, 11);
  CHECK_THROWS_AS(polar_decompose(ComplexField<double>::zeros(g), 1.0), Error);
}

TEST_CASE("property: decompose/recompose reproduces random smooth fields",
          "[madelung][property]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto g = make_grid(-10.0, 10.0, 1001);
  for (int trial = 0; trial < 25; ++trial) {
    // Sum of a few random Gaussian packets with momenta.
    ComplexArray<double> v = ComplexArray<double>::Zero(g.size());
    for (int k = 0; k < 3; ++k) {
      const double c = 4 * u(rng), w = 1.0 + 0.5 * u(rng), p = 3 * u(rng);
      const cd amp(u(rng), u(rng));
      for (Eigen::Index i = 0; i < g.size(); ++i) {
        const double x = g.x(i);
        v[i] += amp * std::exp(cd(-(x - c) * (x - c) / (4 * w * w), p * x));
      }
    }
    const ComplexField<double> psi(g, v);
    const auto back = recompose(polar_decompose(psi, 1.0), 1.0);
    const RealArray<double> a = v.abs();
    const double floor = 1e-8 * a.maxCoeff();
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      if (a[i] > floor) {
        CHECK(std::abs(back.values()[i] - v[i]) <= 1e-12 * a[i] * (1 + std::abs(
            polar_decompose(psi, 1.0).action()[i])));
      }
    }
  }
}

TEST_CASE("quantum_potential of a constant amplitude vanishes", "[madelung]") {
  const auto g = make_grid(-1.0, 1.0, 51);
  const auto u = quantum_potential(real_polar(g, RealArray<double>::Constant(51, 0.7)),
                                   SimParams<double>());
  CHECK(u.abs().maxCoeff() < 1e-12);
}

TEST_CASE("quantum_potential of a Gaussian amplitude", "[madelung]") {
  // A = exp(-x^2/4): A''/A = x^2/4 - 1/2, U = -(1/2)(x^2/4 - 1/2).
  const auto g = make_grid(-6.0, 6.0, 12001);
  RealArray<double> a(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) a[i] = std::exp(-g.x(i) * g.x(i) / 4);
  const auto u = quantum_potential(real_polar(g, a), SimParams<double>());
  const Eigen::Index mid = 6000;  // x = 0
  CHECK(u[mid] == Approx(0.25).margin(1e-6));
  CHECK(u[mid + 2000] == Approx(-0.25).margin(1e-6));  // x = 2
  double worst = 0;
  for (Eigen::Index i = 1; i + 1 < g.size(); ++i) {
    const double x = g.x(i);
    if (std::abs(x) <= 4) worst = std::max(worst, std::abs(u[i] + 0.5 * (x * x / 4 - 0.5)));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("quantum_potential of cos(kx) is constant hbar^2 k^2 / 2m", "[madelung]") {
  const double k = 0.5;
  const auto g = make_grid(-1.0, 1.0, 2001);
  RealArray<double> a(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) a[i] = std::cos(k * g.x(i));
  const SimParams<double> params(2.0, 1.5, 1.0);
  const auto u = quantum_potential(real_polar(g, a), params);
  const double expected = 1.5 * 1.5 * k * k / (2 * 2.0);
  CHECK((u.segment(1, g.size() - 2) - expected).abs().maxCoeff() < 1e-8);
  // One-sided end stencils are second order too.
  CHECK(std::abs(u[0] - expected) < 1e-5);
}

TEST_CASE("quantum_potential matches a dense finite-difference oracle", "[madelung]") {
  // Oracle: evaluate the closed-form amplitude at x +- h directly.
  const TwoGaussianConfig<double> cfg(3.0, 1.0, SimParams<double>());
  const auto g = make_grid(-20.0, 20.0, 4001);
  const auto polar = polar_decompose(initial_state(cfg, g), 1.0);
  const auto u = quantum_potential(polar, SimParams<double>());
  const double n0 = normalization_constant(cfg);
  auto amp = [n0](double x) {
    return std::sqrt(n0) * (std::exp(-(x - 3) * (x - 3) / 4) + std::exp(-(x + 3) * (x + 3) / 4));
  };
  const double h = g.dx();
  double worst = 0;
  for (Eigen::Index i = 1; i + 1 < g.size(); ++i) {
    const double x = g.x(i);
    if (std::abs(x) > 10) continue;  // amplitude bounded away from zero
    const double oracle =
        -0.5 * (amp(x + h) - 2 * amp(x) + amp(x - h)) / (h * h) / amp(x);
    worst = std::max(worst, std::abs(u[i] - oracle));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("classicality term special cases", "[madelung]") {
  const auto g = make_grid(-5.0, 5.0, 101);
  const TwoGaussianConfig<double> cfg(3.0, 1.0, SimParams<double>());
  const auto gg = make_grid(-20.0, 20.0, 801);
  const auto psi = initial_state(cfg, gg);

  const auto quantum = classicality_potential_term(psi, SimParams<double>(1, 1, 1.0));
  CHECK((quantum.values() == cd(0.0)).all());

  const auto pw = classicality_potential_term(plane_wave(g, 1.3), SimParams<double>(1, 1, 0.3));
  CHECK(pw.values().abs().maxCoeff() < 1e-12);
}

TEST_CASE("classicality term at eps = 0 equals -U psi", "[madelung]") {
  const TwoGaussianConfig<double> cfg(3.0, 1.0, SimParams<double>());
  const auto g = make_grid(-20.0, 20.0, 4001);
  const auto psi = initial_state(cfg, g);
  const auto term = classicality_potential_term(psi, SimParams<double>(1, 1, 0.0));
  const double n0 = normalization_constant(cfg);
  auto amp = [n0](double x) {
    return std::sqrt(n0) * (std::exp(-(x - 3) * (x - 3) / 4) + std::exp(-(x + 3) * (x + 3) / 4));
  };
  const double h = g.dx();
  double worst = 0;
  for (Eigen::Index i = 1; i + 1 < g.size(); ++i) {
    const double x = g.x(i);
    if (std::abs(x) > 10) continue;
    const double u = -0.5 * (amp(x + h) - 2 * amp(x) + amp(x - h)) / (h * h) / amp(x);
    worst = std::max(worst, std::abs(term.values()[i] - (-u * amp(x))));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("continuity residual", "[madelung]") {
  const auto g = make_grid(-10.0, 10.0, 401);
  RealArray<double> a(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) a[i] = std::exp(-g.x(i) * g.x(i) / 4);
  const auto p = real_polar(g, a);
  CHECK((continuity_residual(p, p, 0.01, SimParams<double>()) == 0.0).all());

  // Negative control: unrelated random fields are not a solution.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RealArray<double> a0(g.size()), a1(g.size()), s0(g.size()), s1(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    a0[i] = u(rng);
    a1[i] = u(rng);
    s0[i] = u(rng);
    s1[i] = u(rng);
  }
  const auto r = continuity_residual(PolarField<double>(g, a0, s0),
                                     PolarField<double>(g, a1, s1), 0.01,
                                     SimParams<double>());
  CHECK(r.abs().maxCoeff() > 1.0);

  CHECK_THROWS_AS(continuity_residual(p, real_polar(make_grid(-10.0, 10.0, 201),
                                                    RealArray<double>::Ones(201)),
                                      0.01, SimParams<double>()),
                  Error);
}

TEST_CASE("residuals of the analytic state shrink under refinement", "[madelung]") {
  const double eps = 0.3;
  const SimParams<double> params(1.0, 1.0, eps);
  const TwoGaussianConfig<double> cfg(3.0, 1.0, params);
  const double t = 5.0;
  std::vector<double> cont, hj;
  for (int level = 0; level < 3; ++level) {
    const Eigen::Index n = 400 * (1 << level) + 1;
    const double dt = 0.02 / (1 << level);
    const auto g = make_grid(-40.0, 40.0, n);
    // S_eps = hbar~ arg(psi~), A_eps = |psi~|
    const auto p0 = polar_decompose(wavefunction_at(cfg, t, g), params.hbar_scaled());
    const auto p1 = polar_decompose(wavefunction_at(cfg, t + dt, g), params.hbar_scaled());
    const RealArray<double> amp = (p0.amplitude() + p1.amplitude()) / 2;
    cont.push_back(masked_max(continuity_residual(p0, p1, dt, params), amp));
    hj.push_back(masked_max(hj_residual(p0, p1, dt, params), amp));
  }
  INFO("continuity " << cont[0] << " " << cont[1] << " " << cont[2]);
  INFO("hj " << hj[0] << " " << hj[1] << " " << hj[2]);
  CHECK(cont[1] < cont[0]);
  CHECK(cont[2] < cont[1]);
  CHECK(hj[1] < hj[0]);
  CHECK(hj[2] < hj[1]);
  CHECK(cont[0] / cont[1] > 3.0);
  CHECK(hj[0] / hj[1] > 3.0);
}

TEST_CASE("hj residual", "[madelung]") {
  const auto g = make_grid(-10.0, 10.0, 401);
  RealArray<double> a(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) a[i] = std::exp(-g.x(i) * g.x(i) / 4);
  const auto p = real_polar(g, a);
  CHECK((hj_residual(p, p, 0.01, SimParams<double>(1, 1, 0.0)) == 0.0).all());

  // An eps = 1 solution checked with eps = 0 leaves the Bohm potential.
  const TwoGaussianConfig<double> cfg(3.0, 1.0, SimParams<double>());
  const auto gg = make_grid(-40.0, 40.0, 3201);
  const double dt = 0.0025;
  const auto p0 = polar_decompose(wavefunction_at(cfg, 5.0, gg), 1.0);
  const auto p1 = polar_decompose(wavefunction_at(cfg, 5.0 + dt, gg), 1.0);
  const auto right = hj_residual(p0, p1, dt, SimParams<double>(1, 1, 1.0));
  const auto wrong = hj_residual(p0, p1, dt, SimParams<double>(1, 1, 0.0));
  const PolarField<double> mid(gg, (p0.amplitude() + p1.amplitude()) / 2,
                               RealArray<double>::Zero(gg.size()));
  const auto u = quantum_potential(mid, SimParams<double>());
  const RealArray<double> amp = mid.amplitude();
  CHECK(masked_max(right, amp) < 1e-3);
  CHECK(masked_max(wrong, amp) > 0.1);
  CHECK(masked_max(wrong + u, amp) < 1e-3);
}

TEST_CASE("map_to_scaled", "[madelung]") {
  const auto g = make_grid(-5.0, 5.0, 201);
  const auto pw = plane_wave(g, 1.0);

  const auto same = map_to_scaled(pw, SimParams<double>(1, 1, 1.0));
  CHECK((same.values() == pw.values()).all());

  ComplexArray<double> real(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) real[i] = std::exp(-g.x(i) * g.x(i));
  const ComplexField<double> pos(g, real);
  CHECK((map_to_scaled(pos, SimParams<double>(1, 1, 0.37)).values() == real).all());

  // 1 / sqrt(0.25) = 2 doubles the phase.
  const auto doubled = map_to_scaled(pw, SimParams<double>(1, 1, 0.25));
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    CHECK(std::abs(doubled.values()[i] - std::polar(1.0, 2 * g.x(i))) < 1e-12);
  }

  CHECK_THROWS_AS(map_to_scaled(pw, SimParams<double>(1, 1, 0.0)), Error);
}

TEST_CASE("property: map_to_scaled preserves density", "[madelung][property]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto g = make_grid(-10.0, 10.0, 801);
  for (int trial = 0; trial < 25; ++trial) {
    ComplexArray<double> v(g.size());
    const double p = 4 * u(rng), c = 2 * u(rng);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      const double x = g.x(i);
      v[i] = std::exp(cd(-(x - c) * (x - c) / 6, p * x + 0.3 * x * x));
    }
    const ComplexField<double> psi(g, v);
    const double eps = 0.01 + 0.99 * (u(rng) + 1) / 2;
    const auto mapped = map_to_scaled(psi, SimParams<double>(1, 1, eps));
    const RealArray<double> r0 = v.abs2();
    const RealArray<double> r1 = mapped.values().abs2();
    CHECK((r1 - r0).abs().maxCoeff() <= 1e-13 * r0.maxCoeff());
  }
}

TEST_CASE("bohm_velocity", "[madelung]") {
  const auto g = make_grid(-5.0, 5.0, 101);
  CHECK((bohm_velocity(real_polar(g, RealArray<double>::Ones(101)), SimParams<double>()) == 0.0).all());

  const SimParams<double> params(2.0, 1.0, 1.0);
  const auto v = bohm_velocity(polar_decompose(plane_wave(g, 1.5), 1.0), params);
  CHECK((v - 0.75).abs().maxCoeff() < 1e-12);

  // Even density, odd current: v(0) = 0.
  const TwoGaussianConfig<double> cfg(3.0, 1.0, SimParams<double>());
  const auto gg = make_grid(-40.0, 40.0, 1601);
  const auto vv = bohm_velocity(polar_decompose(wavefunction_at(cfg, 4.0, gg), 1.0),
                                SimParams<double>());
  CHECK(std::abs(vv[800]) < 1e-12);
  CHECK(std::abs(vv[900] + vv[700]) < 1e-10);
}

TEST_CASE("integrate_trajectory", "[madelung]") {
  const auto g = make_grid(-10.0, 10.0, 201);
  const std::vector<RealArray<double>> still(50, RealArray<double>::Zero(201));
  const auto t0 = integrate_trajectory<double>(g, 1.3, still, 0.1);
  CHECK(t0.positions.size() == 50);
  for (double x : t0.positions) CHECK(x == 1.3);

  const std::vector<RealArray<double>> drift(50, RealArray<double>::Constant(201, 0.7));
  const auto t1 = integrate_trajectory<double>(g, -2.0, drift, 0.1);
  CHECK_FALSE(t1.exited);
  for (std::size_t n = 0; n < t1.positions.size(); ++n) {
    CHECK(std::abs(t1.positions[n] - (-2.0 + 0.7 * t1.times[n])) < 1e-10);
  }

  const std::vector<RealArray<double>> fast(50, RealArray<double>::Constant(201, 5.0));
  const auto t2 = integrate_trajectory<double>(g, 0.0, fast, 0.1);
  CHECK(t2.exited);
  CHECK(t2.positions.back() <= 10.0);
  CHECK(t2.positions.size() < 50);

  CHECK_THROWS_AS(integrate_trajectory<double>(g, 11.0, still, 0.1), Error);
}

TEST_CASE("classical ensemble stays frozen at eps = 0", "[madelung]") {
  const SimParams<double> params(1.0, 1.0, 0.0);
  const TwoGaussianConfig<double> cfg(3.0, 1.0, params);
  const auto g = make_grid(-30.0, 30.0, 601);
  auto psi = initial_state(cfg, g);
  const double dt = stability_dt(params, g);
  std::vector<RealArray<double>> velocities;
  for (int n = 0; n <= 400; ++n) {
    velocities.push_back(bohm_velocity(polar_decompose(psi, 1.0), params));
    psi = step(psi, n * dt, dt, params);
  }
  for (double x0 : {-4.5, -3.0, -1.0, 0.5, 2.0, 3.0, 5.0}) {
    const auto traj = integrate_trajectory<double>(g, x0, velocities, dt);
    CHECK_FALSE(traj.exited);
    CHECK(std::abs(traj.positions.back() - x0) < 1e-10);
  }
  const auto rho0 = density(initial_state(cfg, g)).rho;
  CHECK((density(psi).rho - rho0).abs().maxCoeff() < 1e-10 * rho0.maxCoeff());
}
