#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace transition {

template <typename Scalar = double>
struct Extremum {
  Scalar x;
  Scalar value;
  bool is_max;
};

template <typename Scalar = double>
struct Visibility {
  Scalar value = 0;
  // No interference fringe yet: the brightest feature is not flanked by
  // maxima on both sides (two separated bumps, a single bump, or flat).
  bool pre_fringe = true;
  Scalar rho_max = 0;
  Scalar rho_min = 0;
  Scalar x_max = 0;
  Scalar x_min = 0;
};

// Maxima below this fraction of the peak are ignored as tail noise.
inline constexpr double kSignificantFraction = 1e-3;

/// Contrast between the global maximum and the deeper of the two minima
/// adjacent to it. Extrema must be sorted by x.
template <typename Scalar>
Visibility<Scalar> visibility_from_extrema(
    const std::vector<Extremum<Scalar>>& extrema) {
  Visibility<Scalar> out;
  Scalar peak = 0;
  for (const auto& e : extrema) {
    if (e.is_max) peak = std::max(peak, e.value);
  }
  if (!(peak > 0)) return out;

  const Scalar significant = Scalar(kSignificantFraction) * peak;
  std::vector<std::size_t> maxima;
  for (std::size_t i = 0; i < extrema.size(); ++i) {
    if (extrema[i].is_max && extrema[i].value >= significant) maxima.push_back(i);
  }
  if (maxima.size() < 3) return out;

  // Among maxima tied with the peak, prefer one flanked on both sides, closest
  // to the middle of the significant maxima.
  const Scalar tie = peak * (1 - Scalar(1e-9));
  std::size_t best = maxima.size();
  const double middle = 0.5 * static_cast<double>(maxima.size() - 1);
  for (std::size_t k = 1; k + 1 < maxima.size(); ++k) {
    if (extrema[maxima[k]].value < tie) continue;
    if (best == maxima.size() ||
        std::abs(static_cast<double>(k) - middle) <
            std::abs(static_cast<double>(best) - middle)) {
      best = k;
    }
  }
  if (best == maxima.size()) return out;

  auto deepest_between = [&](std::size_t lo, std::size_t hi) {
    std::size_t arg = lo;
    Scalar v = extrema[lo].value;
    for (std::size_t i = lo + 1; i < hi; ++i) {
      if (!extrema[i].is_max && extrema[i].value < v) {
        v = extrema[i].value;
        arg = i;
      }
    }
    return arg;
  };
  const std::size_t g = maxima[best];
  const std::size_t left = deepest_between(maxima[best - 1], g);
  const std::size_t right = deepest_between(g, maxima[best + 1]);
  const std::size_t m =
      extrema[left].value <= extrema[right].value ? left : right;

  out.pre_fringe = false;
  out.rho_max = extrema[g].value;
  out.rho_min = std::max(extrema[m].value, Scalar(0));
  out.x_max = extrema[g].x;
  out.x_min = extrema[m].x;
  out.value = (out.rho_max - out.rho_min) / (out.rho_max + out.rho_min);
  return out;
}

/// Local extrema of sampled data refined with a 3-point parabolic fit.
template <typename Scalar>
std::vector<Extremum<Scalar>> sampled_extrema(
    const Eigen::Array<Scalar, Eigen::Dynamic, 1>& f, Scalar x0, Scalar dx) {
  std::vector<Extremum<Scalar>> out;
  const Eigen::Index n = f.size();
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const Scalar a = f[i - 1], b = f[i], c = f[i + 1];
    // Half-open comparisons so plateaus produce a single extremum.
    const bool is_max = b > a && b >= c;
    const bool is_min = b < a && b <= c;
    if (!is_max && !is_min) continue;
    const Scalar curvature = a - 2 * b + c;
    Scalar offset = 0;
    Scalar value = b;
    if (curvature != 0) {
      offset = std::clamp(Scalar(0.5) * (a - c) / curvature, Scalar(-0.5),
                          Scalar(0.5));
      value = b - Scalar(0.25) * (a - c) * offset;
    }
    out.push_back({x0 + (static_cast<Scalar>(i) + offset) * dx, value, is_max});
  }
  return out;
}

/// Golden-section refinement of an extremum of f bracketed by [lo, hi].
template <typename Scalar>
Extremum<Scalar> refine_extremum(const std::function<Scalar(Scalar)>& f,
                                 Scalar lo, Scalar hi, bool is_max) {
  const Scalar sign = is_max ? Scalar(-1) : Scalar(1);
  const Scalar r = (std::sqrt(Scalar(5)) - 1) / 2;
  Scalar a = lo, b = hi;
  Scalar c = b - r * (b - a), d = a + r * (b - a);
  Scalar fc = sign * f(c), fd = sign * f(d);
  for (int it = 0; it < 200 && (b - a) > Scalar(1e-13) * (1 + std::abs(a)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = sign * f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = sign * f(d);
    }
  }
  const Scalar x = (a + b) / 2;
  return {x, f(x), is_max};
}

}  // namespace transition
