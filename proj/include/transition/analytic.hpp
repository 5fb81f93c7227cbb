#pragma once

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "transition/visibility.hpp"
#include "transition/wavefield.hpp"

namespace transition {

/// Two Gaussians of rms width sigma centred at +-d, no initial momentum.
template <typename Scalar = double>
class TwoGaussianConfig {
 public:
  TwoGaussianConfig(Scalar d, Scalar sigma, SimParams<Scalar> params)
      : d_(d), sigma_(sigma), params_(std::move(params)) {
    if (!(sigma > 0)) throw config_error("sigma must be positive");
    if (!(d >= 0)) throw config_error("d must be nonnegative");
  }

  Scalar d() const { return d_; }
  Scalar sigma() const { return sigma_; }
  const SimParams<Scalar>& params() const { return params_; }

  TwoGaussianConfig with_params(SimParams<Scalar> params) const {
    return TwoGaussianConfig(d_, sigma_, std::move(params));
  }

 private:
  Scalar d_;
  Scalar sigma_;
  SimParams<Scalar> params_;
};

template <typename Scalar = double>
struct AnalyticState {
  Scalar time;
  // sigma^2 + i hbar~ t / 2m
  std::complex<Scalar> a_t_squared;
  // hbar~^2 t^2 / (4 m^2 sigma^2) + sigma^2
  Scalar sigma_t_squared;
  Scalar n0;
};

/// N0 = [2 sqrt(2 pi) sigma (exp(-d^2 / 2 sigma^2) + 1)]^-1.
template <typename Scalar>
Scalar normalization_constant(const TwoGaussianConfig<Scalar>& config) {
  const Scalar s = config.sigma();
  const Scalar d = config.d();
  return 1 / (2 * std::sqrt(2 * std::numbers::pi_v<Scalar>) * s *
              (std::exp(-d * d / (2 * s * s)) + 1));
}

// Everything below depends on hbar~ and t only through their product, which
// makes the eps-time scaling law hold bit for bit.
template <typename Scalar>
AnalyticState<Scalar> analytic_state(const TwoGaussianConfig<Scalar>& config,
                                     Scalar t) {
  if (!(t >= 0)) throw config_error("time must be nonnegative");
  const auto& p = config.params();
  const Scalar s2 = config.sigma() * config.sigma();
  const Scalar ht = p.hbar_scaled() * t;
  const Scalar m = p.mass();
  return {t, {s2, ht / (2 * m)}, ht * ht / (4 * m * m * s2) + s2,
          normalization_constant(config)};
}

namespace detail {

template <typename Scalar>
void require_resolved(const TwoGaussianConfig<Scalar>& config,
                      const Grid1D<Scalar>& grid, Scalar width) {
  const Scalar s = config.sigma();
  if (grid.dx() > s / 4) {
    const auto needed = static_cast<long long>(
        std::ceil((grid.x_max() - grid.x_min()) / (s / 4))) + 1;
    throw config_error("grid too narrow: dx = " + std::to_string(grid.dx()) +
                       " does not resolve sigma; need at least " +
                       std::to_string(needed) + " points");
  }
  // exp(-r^2 / 4 w^2) < 1e-10  <=>  r > 2 w sqrt(10 ln 10)
  const Scalar reach =
      config.d() + 2 * width * std::sqrt(10 * std::log(Scalar(10)));
  if (grid.x_min() > -reach || grid.x_max() < reach) {
    throw config_error("grid too narrow: boundary amplitude above 1e-10 of "
                       "peak; extent must cover [-" +
                       std::to_string(reach) + ", " + std::to_string(reach) +
                       "]");
  }
}

}  // namespace detail

/// Real, even initial field sqrt(N0) [g(x - d) + g(x + d)].
template <typename Scalar>
ComplexField<Scalar> initial_state(const TwoGaussianConfig<Scalar>& config,
                                   const Grid1D<Scalar>& grid) {
  detail::require_resolved(config, grid, config.sigma());
  const Scalar root_n0 = std::sqrt(normalization_constant(config));
  const Scalar four_s2 = 4 * config.sigma() * config.sigma();
  const Scalar d = config.d();
  ComplexArray<Scalar> values(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const Scalar x = grid.x(i);
    values[i] = root_n0 * (std::exp(-(x - d) * (x - d) / four_s2) +
                           std::exp(-(x + d) * (x + d) / four_s2));
  }
  return ComplexField<Scalar>(grid, std::move(values));
}

/// Free evolution of the two-Gaussian state under the scaled Schroedinger
/// equation: sqrt(N0 sigma^2 / a_t^2) [exp(-(x-d)^2 / 4a_t^2) + (x -> -x)].
template <typename Scalar>
ComplexField<Scalar> wavefunction_at(const TwoGaussianConfig<Scalar>& config,
                                     Scalar t, const Grid1D<Scalar>& grid) {
  const auto st = analytic_state(config, t);
  if (st.a_t_squared.imag() == Scalar(0)) return initial_state(config, grid);
  const Scalar s2 = config.sigma() * config.sigma();
  const Scalar tau = st.a_t_squared.imag() / s2;
  // sigma^2 / a_t^2
  const std::complex<Scalar> ratio{1 / (1 + tau * tau), -tau / (1 + tau * tau)};
  const std::complex<Scalar> prefactor = std::sqrt(st.n0 * ratio);
  const std::complex<Scalar> exponent_scale = -ratio / (4 * s2);
  const Scalar d = config.d();
  ComplexArray<Scalar> values(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const Scalar x = grid.x(i);
    values[i] = prefactor * (std::exp(exponent_scale * ((x - d) * (x - d))) +
                             std::exp(exponent_scale * ((x + d) * (x + d))));
  }
  return ComplexField<Scalar>(grid, std::move(values));
}

/// Closed-form Young pattern at a single point.
template <typename Scalar>
Scalar density_value(const TwoGaussianConfig<Scalar>& config,
                     const AnalyticState<Scalar>& st, Scalar x) {
  const Scalar s = config.sigma();
  const Scalar d = config.d();
  const Scalar w2 = st.sigma_t_squared;
  const Scalar envelope = std::exp(-(x - d) * (x - d) / (4 * w2)) +
                          std::exp(-(x + d) * (x + d) / (4 * w2));
  // hbar~ t x d / (4 m sigma^2 sigma_t^2) with hbar~ t / 2m = Im(a_t^2)
  const Scalar phase = st.a_t_squared.imag() * x * d / (2 * s * s * w2);
  const Scalar sine = std::sin(phase);
  const Scalar bracket = envelope * envelope -
                         4 * std::exp(-(x * x + d * d) / (2 * w2)) * sine * sine;
  return st.n0 * s / std::sqrt(w2) * bracket;
}

template <typename Scalar>
DensityProfile<Scalar> density_at(const TwoGaussianConfig<Scalar>& config,
                                  Scalar t, const Grid1D<Scalar>& grid) {
  const auto st = analytic_state(config, t);
  RealArray<Scalar> rho(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    rho[i] = density_value(config, st, grid.x(i));
  }
  return {grid, std::move(rho), t, config.params().epsilon(),
          Provenance::Analytic};
}

/// Fringe visibility of the closed-form density. Extrema are bracketed on a
/// dense grid scaled to the current width and fringe period, then refined on
/// the exact function.
template <typename Scalar>
Visibility<Scalar> analytic_visibility(const TwoGaussianConfig<Scalar>& config,
                                       Scalar t) {
  const auto st = analytic_state(config, t);
  if (config.params().epsilon() == Scalar(0) || st.a_t_squared.imag() == 0) {
    return {};
  }
  const Scalar w = std::sqrt(st.sigma_t_squared);
  const Scalar s = config.sigma();
  const Scalar half_width = config.d() + 12 * w;
  // sin^2 term has spatial period pi / k
  const Scalar k = st.a_t_squared.imag() * config.d() /
                   (2 * s * s * st.sigma_t_squared);
  Scalar h = std::min(w, s) / 64;
  if (k > 0) h = std::min(h, std::numbers::pi_v<Scalar> / k / 64);
  const auto n = std::min<Eigen::Index>(
      static_cast<Eigen::Index>(std::ceil(2 * half_width / h)) + 1, 4'000'001);
  const Grid1D<Scalar> grid(-half_width, half_width, n);

  const std::function<Scalar(Scalar)> f = [&](Scalar x) {
    return density_value(config, st, x);
  };
  RealArray<Scalar> rho(n);
  for (Eigen::Index i = 0; i < n; ++i) rho[i] = f(grid.x(i));

  std::vector<Extremum<Scalar>> extrema;
  for (const auto& e : sampled_extrema(rho, grid.x_min(), grid.dx())) {
    extrema.push_back(
        refine_extremum(f, e.x - grid.dx(), e.x + grid.dx(), e.is_max));
  }
  return visibility_from_extrema(extrema);
}

}  // namespace transition
