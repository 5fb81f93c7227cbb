#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "transition/madelung.hpp"
#include "transition/wavefield.hpp"

namespace transition {

enum class Boundary { DirichletZero };
enum class Integrator { RK4 };

inline constexpr const char* kSchemeId =
    "rk4+central-fd2+dirichlet-zero+floored-divisor";

template <typename Scalar = double>
struct SolverConfig {
  SimParams<Scalar> params;
  Grid1D<Scalar> grid;
  Scalar t_final;
  std::vector<Scalar> snapshot_times = {};
  Boundary boundary = Boundary::DirichletZero;
  Integrator integrator = Integrator::RK4;
  // Steps between norm samples (snapshot times are always sampled).
  long long norm_every = 256;

  void validate() const {
    if (!(t_final >= 0)) throw config_error("t_final must be nonnegative");
    if (!std::is_sorted(snapshot_times.begin(), snapshot_times.end())) {
      throw config_error("snapshot times must be sorted");
    }
    for (Scalar t : snapshot_times) {
      if (t < 0 || t > t_final) {
        throw config_error("snapshot times must lie within [0, t_final]");
      }
    }
    if (norm_every < 1) throw config_error("norm_every must be positive");
  }
};

template <typename Scalar = double>
struct RunResult {
  std::vector<std::pair<Scalar, ComplexField<Scalar>>> snapshots;
  std::vector<std::pair<Scalar, Scalar>> norm_series;
  Scalar dt_used = 0;
  long long steps_taken = 0;
  Scalar max_classicality_term = 0;
  // eps = 0: kinetic and classicality terms cancel analytically.
  bool singular_regime = false;

  Scalar max_norm_drift() const {
    if (norm_series.empty() || norm_series.front().second == 0) return 0;
    const Scalar n0 = norm_series.front().second;
    Scalar drift = 0;
    for (const auto& [t, n] : norm_series) {
      drift = std::max(drift, std::abs(n - n0) / n0);
    }
    return drift;
  }

  const ComplexField<Scalar>& final_field() const {
    return snapshots.back().second;
  }
};

/// dt = dt_safety * m dx^2 / hbar. RK4 covers the imaginary axis up to
/// |lambda dt| ~ 2.83 and the free spectral radius is 2 hbar / (m dx^2).
template <typename Scalar>
Scalar stability_dt(const SimParams<Scalar>& params, const Grid1D<Scalar>& grid) {
  return params.dt_safety() * params.mass() * grid.dx() * grid.dx() /
         params.hbar();
}

namespace detail {

// d psi / dt for the transition equation at interior nodes; boundary nodes
// are held at zero.
template <typename Scalar>
void transition_rhs(const ComplexArray<Scalar>& psi, Scalar t,
                    const Grid1D<Scalar>& grid, const SimParams<Scalar>& params,
                    RealArray<Scalar>& amplitude, ComplexArray<Scalar>& out) {
  const Eigen::Index n = psi.size();
  const Scalar dx = grid.dx();
  const Scalar kinetic = params.hbar() / (2 * params.mass() * dx * dx);
  const Scalar nonlinear = (1 - params.epsilon()) * kinetic;
  const std::complex<Scalar> minus_i(0, -1);

  amplitude = psi.abs();
  const Scalar floor = params.amp_floor_rel() * amplitude.maxCoeff();
  const bool clamp = params.clamp_below_floor();
  const bool with_potential = params.has_potential();

  out[0] = 0;
  out[n - 1] = 0;
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    // H psi / hbar, with H = -(hbar^2/2m) D2 + V + (1 - eps)(hbar^2/2m) D2|psi|/|psi|
    const std::complex<Scalar> lap = psi[i + 1] - Scalar(2) * psi[i] + psi[i - 1];
    std::complex<Scalar> h = -kinetic * lap;
    if (nonlinear != 0) {
      const Scalar a = amplitude[i];
      Scalar ratio = 0;
      if (a > 0 && !(clamp && a < floor)) {
        ratio = (amplitude[i + 1] - 2 * a + amplitude[i - 1]) / std::max(a, floor);
      }
      h += (nonlinear * ratio) * psi[i];
    }
    if (with_potential) h += params.potential(grid.x(i), t) / params.hbar() * psi[i];
    out[i] = minus_i * h;
  }
}

template <typename Scalar>
Scalar discrete_norm(const ComplexArray<Scalar>& psi, Scalar dx) {
  return trapezoid(psi.abs2(), dx);
}

template <typename Scalar>
class Rk4Stepper {
 public:
  Rk4Stepper(const Grid1D<Scalar>& grid, const SimParams<Scalar>& params)
      : grid_(grid), params_(params) {
    const Eigen::Index n = grid.size();
    k1_.resize(n);
    k2_.resize(n);
    k3_.resize(n);
    k4_.resize(n);
    stage_.resize(n);
    amplitude_.resize(n);
  }

  // Advances psi in place; throws if the norm jumps by more than 1e-3.
  void advance(ComplexArray<Scalar>& psi, Scalar t, Scalar dt) {
    const Scalar before = discrete_norm(psi, grid_.dx());
    const Eigen::Index n = psi.size();
    auto pin = [n](ComplexArray<Scalar>& v) {
      v[0] = 0;
      v[n - 1] = 0;
    };
    transition_rhs(psi, t, grid_, params_, amplitude_, k1_);
    stage_ = psi + (dt / 2) * k1_;
    pin(stage_);
    transition_rhs(stage_, t + dt / 2, grid_, params_, amplitude_, k2_);
    stage_ = psi + (dt / 2) * k2_;
    pin(stage_);
    transition_rhs(stage_, t + dt / 2, grid_, params_, amplitude_, k3_);
    stage_ = psi + dt * k3_;
    pin(stage_);
    transition_rhs(stage_, t + dt, grid_, params_, amplitude_, k4_);
    psi += (dt / 6) * (k1_ + Scalar(2) * k2_ + Scalar(2) * k3_ + k4_);
    pin(psi);

    const Scalar after = discrete_norm(psi, grid_.dx());
    if (!std::isfinite(after)) {
      throw numerical_error("non-finite field after step at t = " +
                            std::to_string(t));
    }
    if (before > 0 ? std::abs(after - before) > Scalar(1e-3) * before
                   : after != 0) {
      throw numerical_error("instability detected: norm changed from " +
                            std::to_string(before) + " to " +
                            std::to_string(after) + " in one step at t = " +
                            std::to_string(t));
    }
  }

 private:
  Grid1D<Scalar> grid_;
  SimParams<Scalar> params_;
  ComplexArray<Scalar> k1_, k2_, k3_, k4_, stage_;
  RealArray<Scalar> amplitude_;
};

}  // namespace detail

/// Right-hand side d psi / dt of the transition equation with homogeneous
/// Dirichlet boundaries (boundary entries are zero).
template <typename Scalar>
ComplexField<Scalar> rhs(const ComplexField<Scalar>& psi, Scalar t,
                         const SimParams<Scalar>& params) {
  ComplexArray<Scalar> out(psi.size());
  RealArray<Scalar> amplitude(psi.size());
  detail::transition_rhs(psi.values(), t, psi.grid(), params, amplitude, out);
  return ComplexField<Scalar>(psi.grid(), std::move(out));
}

/// One classical RK4 step. |psi| and its floored divisor are recomputed at
/// every stage and boundary nodes are pinned to zero after each stage.
template <typename Scalar>
ComplexField<Scalar> step(const ComplexField<Scalar>& psi, Scalar t, Scalar dt,
                          const SimParams<Scalar>& params) {
  detail::Rk4Stepper<Scalar> stepper(psi.grid(), params);
  ComplexArray<Scalar> v = psi.values();
  stepper.advance(v, t, dt);
  return ComplexField<Scalar>(psi.grid(), std::move(v));
}

/// Integrates from t = 0 to t_final with the stability step, shortening the
/// last step before every snapshot time. Never renormalizes.
template <typename Scalar>
RunResult<Scalar> evolve(const SolverConfig<Scalar>& config,
                         const ComplexField<Scalar>& psi0) {
  config.validate();
  require_same_grid(config.grid, psi0.grid(), "evolve");
  const auto& grid = config.grid;
  const auto& params = config.params;

  RunResult<Scalar> result;
  result.singular_regime = params.epsilon() == Scalar(0);
  result.dt_used = stability_dt(params, grid);
  const Scalar dt = result.dt_used;

  std::vector<Scalar> stops = config.snapshot_times;
  stops.push_back(config.t_final);
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  ComplexArray<Scalar> psi = psi0.values();
  psi[0] = 0;
  psi[psi.size() - 1] = 0;
  detail::Rk4Stepper<Scalar> stepper(grid, params);

  auto record = [&](Scalar t) {
    ComplexField<Scalar> field(grid, psi);
    const auto term = classicality_potential_term(field, params);
    result.max_classicality_term = std::max(
        result.max_classicality_term,
        term.values().abs().maxCoeff());
    result.snapshots.emplace_back(t, std::move(field));
  };
  auto sample_norm = [&](Scalar t) {
    result.norm_series.emplace_back(t, detail::discrete_norm(psi, grid.dx()));
  };

  sample_norm(0);
  Scalar t = 0;
  for (Scalar stop : stops) {
    const Scalar start = t;
    const Scalar span = stop - start;
    auto full = static_cast<long long>(std::floor(span / dt));
    const Scalar tail = span - static_cast<Scalar>(full) * dt;
    const bool has_tail = tail > Scalar(1e-9) * dt;
    const long long count = full + (has_tail ? 1 : 0);
    for (long long k = 0; k < count; ++k) {
      const Scalar tk = start + static_cast<Scalar>(k) * dt;
      const Scalar h = (k == full) ? tail : dt;
      try {
        stepper.advance(psi, tk, h);
      } catch (const Error& e) {
        throw numerical_error(std::string(e.what()) + " (step " +
                              std::to_string(result.steps_taken + 1) + ")");
      }
      ++result.steps_taken;
      if (result.steps_taken % config.norm_every == 0) sample_norm(tk + h);
    }
    t = stop;
    if (result.norm_series.back().first != t) sample_norm(t);
    record(t);
  }
  return result;
}

}  // namespace transition
