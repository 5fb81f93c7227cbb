#include "transition/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <mutex>
#include <thread>

namespace transition {

Experiment Experiment::with_epsilon(double eps) const {
  Experiment e = *this;
  e.packets = packets.with_params(packets.params().with_epsilon(eps));
  return e;
}

Experiment Experiment::with_grid_points(Eigen::Index n) const {
  Experiment e = *this;
  e.grid = Grid1D<double>(grid.x_min(), grid.x_max(), n);
  return e;
}

SolverConfig<double> Experiment::solver_config() const {
  return {packets.params(), grid, t_final, snapshot_times};
}

Experiment default_experiment(double epsilon) {
  const SimParams<double> params(1.0, 1.0, epsilon);
  return {TwoGaussianConfig<double>(3.0, 1.0, params),
          Grid1D<double>(-80.0, 80.0, 4096), 20.0, {}};
}

double linf_error(const DensityProfile<double>& sim,
                  const DensityProfile<double>& ref) {
  require_same_grid(sim.grid, ref.grid, "linf_error");
  const double peak = ref.rho.maxCoeff();
  if (!(peak > 0)) throw config_error("linf_error: reference has no peak");
  return (sim.rho - ref.rho).abs().maxCoeff() / peak;
}

double l2_error(const DensityProfile<double>& sim,
                const DensityProfile<double>& ref) {
  require_same_grid(sim.grid, ref.grid, "l2_error");
  return std::sqrt(trapezoid((sim.rho - ref.rho).square(), sim.grid.dx()));
}

Visibility<double> measured_visibility(const DensityProfile<double>& profile) {
  if ((profile.rho < 0).any()) {
    throw config_error("measured_visibility: density must be nonnegative");
  }
  return visibility_from_extrema(sampled_extrema(
      profile.rho, profile.grid.x_min(), profile.grid.dx()));
}

DensityProfile<double> reference_density(const Experiment& experiment,
                                          double t) {
  if (experiment.epsilon() == 0.0) {
    auto rho = density(initial_state(experiment.packets, experiment.grid), t,
                       0.0, Provenance::Initial);
    return rho;
  }
  return density_at(experiment.packets, t, experiment.grid);
}

DensityProfile<double> linear_interpolate(const DensityProfile<double>& profile,
                                          const Grid1D<double>& target) {
  const auto& g = profile.grid;
  RealArray<double> rho(target.size());
  for (Eigen::Index i = 0; i < target.size(); ++i) {
    const double u = (target.x(i) - g.x_min()) / g.dx();
    if (u <= 0) {
      rho[i] = profile.rho[0];
      continue;
    }
    auto j = static_cast<Eigen::Index>(std::floor(u));
    if (j >= g.size() - 1) {
      rho[i] = profile.rho[g.size() - 1];
      continue;
    }
    const double w = u - static_cast<double>(j);
    rho[i] = (1 - w) * profile.rho[j] + w * profile.rho[j + 1];
  }
  return {target, std::move(rho), profile.time, profile.epsilon,
          profile.provenance};
}

ComparisonReport compare(const Experiment& experiment,
                         const RunResult<double>& run, double t) {
  const auto it = std::find_if(run.snapshots.begin(), run.snapshots.end(),
                               [t](const auto& s) { return s.first == t; });
  if (it == run.snapshots.end()) {
    throw config_error("compare: no snapshot at t = " + std::to_string(t));
  }
  const double eps = experiment.epsilon();
  const auto sim = density(it->second, t, eps, Provenance::Simulated);
  const auto ref = reference_density(experiment, t);

  ComparisonReport r;
  r.epsilon = eps;
  r.time = t;
  r.linf_error_rel_peak = linf_error(sim, ref);
  r.l2_error = l2_error(sim, ref);
  r.visibility_sim = measured_visibility(sim).value;
  r.visibility_analytic =
      eps > 0 ? analytic_visibility(experiment.packets, t).value : 0.0;
  r.norm_drift = run.max_norm_drift();
  r.x_min = experiment.grid.x_min();
  r.x_max = experiment.grid.x_max();
  r.grid_points = experiment.grid.size();
  r.dt_used = run.dt_used;
  r.steps = run.steps_taken;
  return r;
}

RunComparison run_and_compare(const Experiment& experiment) {
  const auto psi0 = initial_state(experiment.packets, experiment.grid);
  auto run = evolve(experiment.solver_config(), psi0);
  auto report = compare(experiment, run, experiment.t_final);
  return {std::move(run), report};
}

std::vector<SweepItem> epsilon_sweep(const std::vector<double>& eps_list,
                                     const Experiment& experiment,
                                     unsigned threads) {
  for (double eps : eps_list) {
    if (!(eps >= 0 && eps <= 1)) {
      throw config_error("epsilon_sweep: epsilon values must lie in [0, 1]");
    }
  }
  std::vector<SweepItem> items(eps_list.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, std::max<std::size_t>(1, eps_list.size()));

  std::mutex next_mutex;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard lock(next_mutex);
        if (next >= eps_list.size()) return;
        i = next++;
      }
      items[i].epsilon = eps_list[i];
      try {
        items[i].result = run_and_compare(experiment.with_epsilon(eps_list[i]));
      } catch (const std::exception& e) {
        items[i].error = e.what();
      }
    }
  };
  std::vector<std::future<void>> pool;
  for (unsigned k = 0; k < threads; ++k) {
    pool.push_back(std::async(std::launch::async, worker));
  }
  for (auto& f : pool) f.get();
  return items;
}

ConvergenceTable convergence_from_rows(std::vector<ConvergenceRow> rows) {
  ConvergenceTable table;
  table.rows = std::move(rows);
  for (std::size_t k = 0; k + 1 < table.rows.size(); ++k) {
    const auto& a = table.rows[k];
    const auto& b = table.rows[k + 1];
    if (a.dx == b.dx || a.linf_error == b.linf_error) {
      table.orders.push_back(0.0);
      table.degenerate = true;
      table.non_monotone = true;
      continue;
    }
    if (!(b.linf_error < a.linf_error)) table.non_monotone = true;
    table.orders.push_back(std::log(a.linf_error / b.linf_error) /
                           std::log(a.dx / b.dx));
  }
  return table;
}

ConvergenceTable convergence_study(const Experiment& experiment, int levels) {
  if (levels < 3) throw config_error("convergence_study needs at least 3 levels");
  const Experiment base = experiment.with_epsilon(1.0);
  std::vector<ConvergenceRow> rows;
  Eigen::Index n = base.grid.size();
  for (int level = 0; level < levels; ++level) {
    const Experiment e = base.with_grid_points(n);
    const auto rc = run_and_compare(e);
    rows.push_back({e.grid.dx(), n, rc.run.dt_used,
                    rc.report.linf_error_rel_peak});
    n = 2 * (n - 1) + 1;
  }
  return convergence_from_rows(std::move(rows));
}

std::optional<double> retardation_curve(const TwoGaussianConfig<double>& packets,
                                        double visibility_target) {
  if (!(visibility_target > 0 && visibility_target < 1)) {
    throw config_error("retardation_curve: target must lie in (0, 1)");
  }
  if (packets.params().epsilon() == 0.0) return std::nullopt;
  auto reached = [&](double t) {
    return analytic_visibility(packets, t).value >= visibility_target;
  };
  double lo = 0.0;
  double hi = 1.0;
  int doublings = 0;
  while (!reached(hi)) {
    lo = hi;
    hi *= 2;
    if (++doublings > 200) return std::nullopt;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = lo + (hi - lo) / 2;
    (reached(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace transition
