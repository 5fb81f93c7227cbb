#pragma once

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <utility>

#include "transition/error.hpp"

namespace transition {

template <typename Scalar>
using RealArray = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using ComplexArray = Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, 1>;

/// Uniform 1-D grid with nodes at both endpoints.
template <typename Scalar = double>
class Grid1D {
 public:
  Grid1D(Scalar x_min, Scalar x_max, Eigen::Index n_points)
      : x_min_(x_min), x_max_(x_max), n_points_(n_points) {
    if (n_points < 3) {
      throw config_error("grid needs at least 3 points, got " +
                         std::to_string(n_points));
    }
    if (!(std::isfinite(x_min) && std::isfinite(x_max)) || !(x_max > x_min)) {
      throw config_error("grid bounds must satisfy x_min < x_max");
    }
    dx_ = (x_max - x_min) / static_cast<Scalar>(n_points - 1);
  }

  Scalar x_min() const { return x_min_; }
  Scalar x_max() const { return x_max_; }
  Eigen::Index size() const { return n_points_; }
  Scalar dx() const { return dx_; }

  Scalar x(Eigen::Index i) const {
    return x_min_ + static_cast<Scalar>(i) * dx_;
  }

  RealArray<Scalar> points() const {
    RealArray<Scalar> xs(n_points_);
    for (Eigen::Index i = 0; i < n_points_; ++i) xs[i] = x(i);
    return xs;
  }

  friend bool operator==(const Grid1D& a, const Grid1D& b) {
    return a.x_min_ == b.x_min_ && a.x_max_ == b.x_max_ &&
           a.n_points_ == b.n_points_;
  }

 private:
  Scalar x_min_;
  Scalar x_max_;
  Eigen::Index n_points_;
  Scalar dx_;
};

template <typename Scalar>
Grid1D<Scalar> make_grid(Scalar x_min, Scalar x_max, Eigen::Index n_points) {
  return Grid1D<Scalar>(x_min, x_max, n_points);
}

template <typename Scalar>
void require_same_grid(const Grid1D<Scalar>& a, const Grid1D<Scalar>& b,
                       const char* where) {
  if (!(a == b)) throw config_error(std::string(where) + ": grid mismatch");
}

/// Complex wave-function samples on a grid. Immutable once built.
template <typename Scalar = double>
class ComplexField {
 public:
  ComplexField(Grid1D<Scalar> grid, ComplexArray<Scalar> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw config_error("field size does not match grid");
    }
    if (!values_.real().isFinite().all() || !values_.imag().isFinite().all()) {
      throw numerical_error("field contains non-finite values");
    }
  }

  static ComplexField zeros(const Grid1D<Scalar>& grid) {
    return ComplexField(grid, ComplexArray<Scalar>::Zero(grid.size()));
  }

  const Grid1D<Scalar>& grid() const { return grid_; }
  const ComplexArray<Scalar>& values() const { return values_; }
  Eigen::Index size() const { return values_.size(); }

  ComplexField scaled(std::complex<Scalar> c) const {
    return ComplexField(grid_, values_ * c);
  }

 private:
  Grid1D<Scalar> grid_;
  ComplexArray<Scalar> values_;
};

/// Amplitude A >= 0 and unwrapped action S (units of hbar).
template <typename Scalar = double>
class PolarField {
 public:
  PolarField(Grid1D<Scalar> grid, RealArray<Scalar> amplitude,
             RealArray<Scalar> action)
      : grid_(std::move(grid)),
        amplitude_(std::move(amplitude)),
        action_(std::move(action)) {
    if (amplitude_.size() != grid_.size() || action_.size() != grid_.size()) {
      throw config_error("polar field size does not match grid");
    }
    if (!amplitude_.isFinite().all() || !action_.isFinite().all()) {
      throw numerical_error("polar field contains non-finite values");
    }
    if ((amplitude_ < Scalar(0)).any()) {
      throw config_error("polar field amplitude must be nonnegative");
    }
  }

  const Grid1D<Scalar>& grid() const { return grid_; }
  const RealArray<Scalar>& amplitude() const { return amplitude_; }
  const RealArray<Scalar>& action() const { return action_; }

 private:
  Grid1D<Scalar> grid_;
  RealArray<Scalar> amplitude_;
  RealArray<Scalar> action_;
};

/// Physical and numerical parameters of the transition equation.
template <typename Scalar = double>
class SimParams {
 public:
  using Potential = std::function<Scalar(Scalar x, Scalar t)>;

  SimParams() : SimParams(Scalar(1), Scalar(1), Scalar(1)) {}

  SimParams(Scalar mass, Scalar hbar, Scalar epsilon,
            Scalar dt_safety = Scalar(0.5), Scalar amp_floor_rel = Scalar(1e-8),
            Potential potential = {})
      : mass_(mass),
        hbar_(hbar),
        epsilon_(epsilon),
        dt_safety_(dt_safety),
        amp_floor_rel_(amp_floor_rel),
        potential_(std::move(potential)) {
    if (!(mass > 0)) throw config_error("mass must be positive");
    if (!(hbar > 0)) throw config_error("hbar must be positive");
    if (!(epsilon >= 0 && epsilon <= 1)) {
      throw config_error("epsilon must lie in [0, 1]");
    }
    if (!(dt_safety > 0 && dt_safety <= 1)) {
      throw config_error("dt_safety must lie in (0, 1]");
    }
    if (!(amp_floor_rel > 0)) {
      throw config_error("amp_floor_rel must be positive");
    }
    hbar_scaled_ = hbar_ * std::sqrt(epsilon_);
  }

  Scalar mass() const { return mass_; }
  Scalar hbar() const { return hbar_; }
  Scalar epsilon() const { return epsilon_; }
  /// hbar * sqrt(epsilon).
  Scalar hbar_scaled() const { return hbar_scaled_; }
  Scalar dt_safety() const { return dt_safety_; }
  Scalar amp_floor_rel() const { return amp_floor_rel_; }

  bool has_potential() const { return static_cast<bool>(potential_); }
  Scalar potential(Scalar x, Scalar t) const {
    return potential_ ? potential_(x, t) : Scalar(0);
  }

  // Opt-in: zero the classicality term where |psi| is below the floor.
  // Unstable near eps = 0; kept for comparison runs only.
  bool clamp_below_floor() const { return clamp_below_floor_; }
  SimParams with_clamp_below_floor(bool on) const {
    SimParams p = *this;
    p.clamp_below_floor_ = on;
    return p;
  }

  SimParams with_epsilon(Scalar epsilon) const {
    SimParams p(mass_, hbar_, epsilon, dt_safety_, amp_floor_rel_, potential_);
    p.clamp_below_floor_ = clamp_below_floor_;
    return p;
  }

  SimParams with_dt_safety(Scalar dt_safety) const {
    SimParams p(mass_, hbar_, epsilon_, dt_safety, amp_floor_rel_, potential_);
    p.clamp_below_floor_ = clamp_below_floor_;
    return p;
  }

 private:
  Scalar mass_;
  Scalar hbar_;
  Scalar epsilon_;
  Scalar hbar_scaled_;
  Scalar dt_safety_;
  Scalar amp_floor_rel_;
  Potential potential_;
  bool clamp_below_floor_ = false;
};

enum class Provenance { Simulated, Analytic, Initial };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::Simulated:
      return "simulated";
    case Provenance::Analytic:
      return "analytic";
    case Provenance::Initial:
      return "initial";
  }
  return "unknown";
}

template <typename Scalar = double>
struct DensityProfile {
  Grid1D<Scalar> grid;
  RealArray<Scalar> rho;
  Scalar time = 0;
  Scalar epsilon = 1;
  Provenance provenance = Provenance::Simulated;
};

/// rho = |psi|^2 pointwise. The caller sets time, epsilon and provenance.
template <typename Scalar>
DensityProfile<Scalar> density(const ComplexField<Scalar>& psi,
                               Scalar time = 0, Scalar epsilon = 1,
                               Provenance provenance = Provenance::Simulated) {
  return {psi.grid(), psi.values().abs2(), time, epsilon, provenance};
}

/// Composite trapezoid rule on a uniform grid.
template <typename Derived>
typename Derived::Scalar trapezoid(const Eigen::ArrayBase<Derived>& f,
                                   typename Derived::Scalar dx) {
  const Eigen::Index n = f.size();
  using S = typename Derived::Scalar;
  return dx * (f.sum() - S(0.5) * (f[0] + f[n - 1]));
}

/// Integral of |psi|^2 dx.
template <typename Scalar>
Scalar norm(const ComplexField<Scalar>& psi) {
  return trapezoid(psi.values().abs2(), psi.grid().dx());
}

template <typename Scalar>
Scalar norm(const DensityProfile<Scalar>& profile) {
  return trapezoid(profile.rho, profile.grid.dx());
}

}  // namespace transition
