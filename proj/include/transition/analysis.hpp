#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "transition/analytic.hpp"
#include "transition/solver.hpp"
#include "transition/visibility.hpp"
#include "transition/wavefield.hpp"

namespace transition {

/// One solve of the two-Gaussian interference problem.
struct Experiment {
  TwoGaussianConfig<double> packets;
  Grid1D<double> grid;
  double t_final;
  std::vector<double> snapshot_times = {};

  double epsilon() const { return packets.params().epsilon(); }
  Experiment with_epsilon(double eps) const;
  Experiment with_grid_points(Eigen::Index n) const;
  SolverConfig<double> solver_config() const;
};

/// Default interference setup: hbar = m = sigma = 1, d = 3, +-80 sigma with
/// 4096 nodes, t = 20.
Experiment default_experiment(double epsilon);

struct ComparisonReport {
  double epsilon = 0;
  double time = 0;
  double linf_error_rel_peak = 0;
  double l2_error = 0;
  double visibility_sim = 0;
  double visibility_analytic = 0;
  double norm_drift = 0;
  double x_min = 0;
  double x_max = 0;
  Eigen::Index grid_points = 0;
  double dt_used = 0;
  long long steps = 0;
};

/// max |sim - ref| / max ref.
double linf_error(const DensityProfile<double>& sim,
                  const DensityProfile<double>& ref);

/// sqrt(integral (sim - ref)^2 dx), trapezoid rule.
double l2_error(const DensityProfile<double>& sim,
                const DensityProfile<double>& ref);

/// Extremum-based visibility of sampled data with parabolic sub-grid
/// refinement. Flat or fringe-free profiles give 0.
Visibility<double> measured_visibility(const DensityProfile<double>& profile);

/// Reference density at time t: the closed-form pattern for eps > 0, the
/// initial density for eps = 0.
DensityProfile<double> reference_density(const Experiment& experiment, double t);

DensityProfile<double> linear_interpolate(const DensityProfile<double>& profile,
                                          const Grid1D<double>& target);

ComparisonReport compare(const Experiment& experiment,
                         const RunResult<double>& run, double t);

struct RunComparison {
  RunResult<double> run;
  ComparisonReport report;
};

/// Solve and compare against the reference at t_final.
RunComparison run_and_compare(const Experiment& experiment);

struct SweepItem {
  double epsilon = 0;
  std::optional<RunComparison> result;
  std::string error;

  bool ok() const { return result.has_value(); }
};

/// One run per epsilon on up to `threads` workers. Failures are recorded
/// per item and do not stop the sweep.
std::vector<SweepItem> epsilon_sweep(const std::vector<double>& eps_list,
                                     const Experiment& experiment,
                                     unsigned threads = 0);

struct ConvergenceRow {
  double dx = 0;
  Eigen::Index grid_points = 0;
  double dt = 0;
  double linf_error = 0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  // orders[k] = log2(e_k / e_{k+1}) for successive halvings of dx
  std::vector<double> orders;
  bool non_monotone = false;
  bool degenerate = false;
};

ConvergenceTable convergence_from_rows(std::vector<ConvergenceRow> rows);

/// Repeats the experiment at eps = 1 with dx halved `levels - 1` times
/// (n -> 2(n - 1) + 1, nodes nest) and compares with the closed form.
ConvergenceTable convergence_study(const Experiment& experiment, int levels);

/// Smallest t with analytic visibility >= target, by bisection.
/// std::nullopt when eps = 0 (no interference ever forms).
std::optional<double> retardation_curve(const TwoGaussianConfig<double>& packets,
                                        double visibility_target);

}  // namespace transition
