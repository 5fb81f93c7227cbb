#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "transition/stencil.hpp"
#include "transition/wavefield.hpp"

namespace transition {

/// Polar decomposition psi = A exp(iS/hbar).
///
/// The phase is unwrapped sequentially outward from the node of largest
/// amplitude, keeping every adjacent jump in (-pi, pi]. The anchor keeps its
/// principal phase, so A exp(iS/hbar) reproduces psi up to rounding.
template <typename Scalar>
PolarField<Scalar> polar_decompose(const ComplexField<Scalar>& psi,
                                   Scalar hbar) {
  const auto& v = psi.values();
  const Eigen::Index n = v.size();
  RealArray<Scalar> amplitude = v.abs();
  Eigen::Index anchor = 0;
  const Scalar peak = amplitude.maxCoeff(&anchor);
  if (!(peak > std::numeric_limits<Scalar>::min())) {
    throw numerical_error("polar_decompose: field vanishes, phase undefined");
  }

  const Scalar two_pi = 2 * std::numbers::pi_v<Scalar>;
  auto wrap = [two_pi](Scalar a) {
    a = std::remainder(a, two_pi);  // [-pi, pi]
    if (a <= -std::numbers::pi_v<Scalar>) a += two_pi;
    return a;
  };

  RealArray<Scalar> phase(n);
  for (Eigen::Index i = 0; i < n; ++i) phase[i] = std::arg(v[i]);

  RealArray<Scalar> unwrapped(n);
  unwrapped[anchor] = phase[anchor];
  for (Eigen::Index i = anchor + 1; i < n; ++i) {
    unwrapped[i] = unwrapped[i - 1] + wrap(phase[i] - phase[i - 1]);
  }
  for (Eigen::Index i = anchor - 1; i >= 0; --i) {
    unwrapped[i] = unwrapped[i + 1] + wrap(phase[i] - phase[i + 1]);
  }
  return PolarField<Scalar>(psi.grid(), std::move(amplitude), hbar * unwrapped);
}

template <typename Scalar>
ComplexField<Scalar> recompose(const PolarField<Scalar>& polar, Scalar hbar) {
  const auto& a = polar.amplitude();
  const auto& s = polar.action();
  ComplexArray<Scalar> values(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    values[i] = std::polar(a[i], s[i] / hbar);
  }
  return ComplexField<Scalar>(polar.grid(), std::move(values));
}

namespace detail {

// (d^2 A / dx^2) / max(A, floor) with floor = floor_rel * max(A).
template <typename Scalar>
RealArray<Scalar> laplacian_over_amplitude(const RealArray<Scalar>& amplitude,
                                           Scalar dx, Scalar floor_rel) {
  if (!amplitude.isFinite().all()) {
    throw numerical_error("quantum potential: non-finite amplitude");
  }
  const Scalar floor = floor_rel * amplitude.maxCoeff();
  RealArray<Scalar> ratio = stencil::second_difference(amplitude, dx);
  if (floor > 0) {
    ratio /= amplitude.max(floor);
  } else {
    ratio.setZero();
  }
  return ratio;
}

}  // namespace detail

/// Bohm potential U = -(hbar^2 / 2m) A'' / A with a floored divisor.
template <typename Scalar>
RealArray<Scalar> quantum_potential(const PolarField<Scalar>& polar,
                                    const SimParams<Scalar>& params) {
  const Scalar c = params.hbar() * params.hbar() / (2 * params.mass());
  return -c * detail::laplacian_over_amplitude(
                  polar.amplitude(), polar.grid().dx(), params.amp_floor_rel());
}

/// (1 - eps)(hbar^2 / 2m)(|psi|'' / |psi|) psi, i.e. -(1 - eps) U psi.
template <typename Scalar>
ComplexField<Scalar> classicality_potential_term(
    const ComplexField<Scalar>& psi, const SimParams<Scalar>& params) {
  if (params.epsilon() == Scalar(1)) return ComplexField<Scalar>::zeros(psi.grid());
  const Scalar c = (1 - params.epsilon()) * params.hbar() * params.hbar() /
                   (2 * params.mass());
  const RealArray<Scalar> amplitude = psi.values().abs();
  if (amplitude.maxCoeff() == Scalar(0)) return ComplexField<Scalar>::zeros(psi.grid());
  const RealArray<Scalar> ratio = detail::laplacian_over_amplitude(
      amplitude, psi.grid().dx(), params.amp_floor_rel());
  return ComplexField<Scalar>(psi.grid(), (c * ratio) * psi.values());
}

/// Probability current, Bohm potential and the polar fields of one snapshot.
template <typename Scalar = double>
struct HydroFields {
  PolarField<Scalar> polar;
  RealArray<Scalar> current;
  RealArray<Scalar> quantum_potential;
};

/// Bohmian velocity (dS/dx) / m.
template <typename Scalar>
RealArray<Scalar> bohm_velocity(const PolarField<Scalar>& polar,
                                const SimParams<Scalar>& params) {
  return stencil::gradient(polar.action(), polar.grid().dx()) / params.mass();
}

template <typename Scalar>
HydroFields<Scalar> hydro_fields(const ComplexField<Scalar>& psi,
                                 const SimParams<Scalar>& params) {
  PolarField<Scalar> polar = polar_decompose(psi, params.hbar());
  RealArray<Scalar> current =
      polar.amplitude().square() * bohm_velocity(polar, params);
  RealArray<Scalar> u = quantum_potential(polar, params);
  return {std::move(polar), std::move(current), std::move(u)};
}

namespace detail {


template <typename Scalar>
struct Midpoint {
  RealArray<Scalar> amplitude;
  RealArray<Scalar> action;
  RealArray<Scalar> d_amplitude_dt;
  RealArray<Scalar> d_action_dt;
};

// Forward difference in time evaluated at the midpoint fields. The two
// actions are first brought onto the same 2*pi*hbar branch at the node of
// largest midpoint amplitude.
template <typename Scalar>
Midpoint<Scalar> midpoint(const PolarField<Scalar>& p0,
                          const PolarField<Scalar>& p1, Scalar dt,
                          Scalar hbar) {
  require_same_grid(p0.grid(), p1.grid(), "residual");
  if (!(dt > 0)) throw config_error("residual: dt must be positive");
  Midpoint<Scalar> m;
  m.amplitude = (p0.amplitude() + p1.amplitude()) / 2;
  Eigen::Index k = 0;
  m.amplitude.maxCoeff(&k);
  const Scalar period = 2 * std::numbers::pi_v<Scalar> * hbar;
  const Scalar branch =
      period * std::round((p1.action()[k] - p0.action()[k]) / period);
  const RealArray<Scalar> s1 = p1.action() - branch;
  m.action = (p0.action() + s1) / 2;
  m.d_amplitude_dt = (p1.amplitude() - p0.amplitude()) / dt;
  m.d_action_dt = (s1 - p0.action()) / dt;
  return m;
}

}  // namespace detail

/// Residual of dA/dt + (1/m) A' S' + (1/2m) A S'' = 0.
template <typename Scalar>
RealArray<Scalar> continuity_residual(const PolarField<Scalar>& p0,
                                      const PolarField<Scalar>& p1, Scalar dt,
                                      const SimParams<Scalar>& params) {
  const auto m = detail::midpoint(p0, p1, dt, params.hbar());
  const Scalar dx = p0.grid().dx();
  const RealArray<Scalar> da = stencil::gradient(m.amplitude, dx);
  const RealArray<Scalar> ds = stencil::gradient(m.action, dx);
  const RealArray<Scalar> d2s = stencil::second_difference(m.action, dx);
  const Scalar mass = params.mass();
  return m.d_amplitude_dt + da * ds / mass + m.amplitude * d2s / (2 * mass);
}

/// Residual of dS/dt + (1/2m) S'^2 + V - eps (hbar^2/2m) A''/A = 0.
/// The potential is evaluated at t0 + dt/2.
template <typename Scalar>
RealArray<Scalar> hj_residual(const PolarField<Scalar>& p0,
                              const PolarField<Scalar>& p1, Scalar dt,
                              const SimParams<Scalar>& params,
                              Scalar t0 = Scalar(0)) {
  const auto m = detail::midpoint(p0, p1, dt, params.hbar());
  const auto& grid = p0.grid();
  const Scalar dx = grid.dx();
  const Scalar mass = params.mass();
  const RealArray<Scalar> ds = stencil::gradient(m.action, dx);
  const RealArray<Scalar> lap_ratio = detail::laplacian_over_amplitude(
      m.amplitude, dx, params.amp_floor_rel());
  RealArray<Scalar> r = m.d_action_dt + ds.square() / (2 * mass) -
                        params.epsilon() * params.hbar() * params.hbar() /
                            (2 * mass) * lap_ratio;
  if (params.has_potential()) {
    const Scalar tm = t0 + dt / 2;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      r[i] += params.potential(grid.x(i), tm);
    }
  }
  return r;
}

/// Maps a transition-equation solution onto the scaled Schroedinger field
/// psi~ = psi_eps exp(i S_eps (1/sqrt(eps) - 1) / hbar) = A_eps exp(i S_eps / hbar~).
template <typename Scalar>
ComplexField<Scalar> map_to_scaled(const ComplexField<Scalar>& psi_eps,
                                   const SimParams<Scalar>& params) {
  if (params.epsilon() == Scalar(0)) {
    throw config_error("map_to_scaled: classical case has no scaled counterpart");
  }
  if (params.epsilon() == Scalar(1)) return psi_eps;
  const auto polar = polar_decompose(psi_eps, params.hbar());
  const Scalar factor = (1 / std::sqrt(params.epsilon()) - 1) / params.hbar();
  const auto& s = polar.action();
  ComplexArray<Scalar> values(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    values[i] = psi_eps.values()[i] * std::polar(Scalar(1), s[i] * factor);
  }
  return ComplexField<Scalar>(psi_eps.grid(), std::move(values));
}

template <typename Scalar = double>
struct Trajectory {
  std::vector<Scalar> times;
  std::vector<Scalar> positions;
  bool exited = false;
};

/// Integrates dx/dt = v(x, t) with the explicit midpoint rule. Velocity
/// fields are snapshots spaced dt apart; v is interpolated linearly in space
/// and in time between snapshots.
template <typename Scalar>
Trajectory<Scalar> integrate_trajectory(
    const Grid1D<Scalar>& grid, Scalar x0,
    std::span<const RealArray<Scalar>> velocity_fields, Scalar dt) {
  if (x0 < grid.x_min() || x0 > grid.x_max()) {
    throw config_error("integrate_trajectory: start point outside grid");
  }
  if (!(dt > 0)) throw config_error("integrate_trajectory: dt must be positive");
  for (const auto& v : velocity_fields) {
    if (v.size() != grid.size()) {
      throw config_error("integrate_trajectory: velocity field size mismatch");
    }
  }

  auto inside = [&](Scalar x) { return x >= grid.x_min() && x <= grid.x_max(); };
  auto sample = [&](const RealArray<Scalar>& v, Scalar x) {
    const Scalar u = (x - grid.x_min()) / grid.dx();
    auto i = static_cast<Eigen::Index>(std::floor(u));
    i = std::clamp<Eigen::Index>(i, 0, grid.size() - 2);
    const Scalar w = u - static_cast<Scalar>(i);
    return (1 - w) * v[i] + w * v[i + 1];
  };

  Trajectory<Scalar> out;
  out.times.push_back(0);
  out.positions.push_back(x0);
  Scalar x = x0;
  for (std::size_t n = 0; n + 1 < velocity_fields.size(); ++n) {
    const auto& v0 = velocity_fields[n];
    const auto& v1 = velocity_fields[n + 1];
    const Scalar x_half = x + dt / 2 * sample(v0, x);
    if (!inside(x_half)) {
      out.exited = true;
      break;
    }
    const Scalar v_half = (sample(v0, x_half) + sample(v1, x_half)) / 2;
    x += dt * v_half;
    if (!inside(x)) {
      out.exited = true;
      break;
    }
    out.times.push_back(static_cast<Scalar>(n + 1) * dt);
    out.positions.push_back(x);
  }
  return out;
}

}  // namespace transition
