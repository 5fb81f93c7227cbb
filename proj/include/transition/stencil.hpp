#pragma once

#include <Eigen/Core>

namespace transition::stencil {

// Second-order finite differences on a uniform grid. Interior nodes use
// central stencils, the two end nodes use one-sided second-order stencils.
// Arrays need at least 4 points for the one-sided second difference.

template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> gradient(
    const Eigen::ArrayBase<Derived>& f, typename Eigen::NumTraits<
                                            typename Derived::Scalar>::Real dx) {
  using T = typename Derived::Scalar;
  const Eigen::Index n = f.size();
  Eigen::Array<T, Eigen::Dynamic, 1> g(n);
  const auto inv2dx = 1 / (2 * dx);
  g.segment(1, n - 2) = (f.tail(n - 2) - f.head(n - 2)) * inv2dx;
  g[0] = (T(-3) * f[0] + T(4) * f[1] - f[2]) * inv2dx;
  g[n - 1] = (T(3) * f[n - 1] - T(4) * f[n - 2] + f[n - 3]) * inv2dx;
  return g;
}

template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> second_difference(
    const Eigen::ArrayBase<Derived>& f,
    typename Eigen::NumTraits<typename Derived::Scalar>::Real dx) {
  using T = typename Derived::Scalar;
  const Eigen::Index n = f.size();
  Eigen::Array<T, Eigen::Dynamic, 1> d(n);
  const auto inv_dx2 = 1 / (dx * dx);
  d.segment(1, n - 2) =
      (f.tail(n - 2) - T(2) * f.segment(1, n - 2) + f.head(n - 2)) * inv_dx2;
  if (n >= 4) {
    d[0] = (T(2) * f[0] - T(5) * f[1] + T(4) * f[2] - f[3]) * inv_dx2;
    d[n - 1] =
        (T(2) * f[n - 1] - T(5) * f[n - 2] + T(4) * f[n - 3] - f[n - 4]) *
        inv_dx2;
  } else {
    d[0] = d[1];
    d[n - 1] = d[n - 2];
  }
  return d;
}

}  // namespace transition::stencil
