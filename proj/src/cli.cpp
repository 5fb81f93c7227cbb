#include "transition/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iostream>

#include "transition/io.hpp"

namespace transition::cli {

namespace fs = std::filesystem;
using nlohmann::json;

void ExperimentConfig::validate() const {
  if (epsilon.empty()) throw config_error("at least one epsilon is required");
  for (double e : epsilon) {
    if (!(e >= 0 && e <= 1)) {
      throw config_error("epsilon must lie in [0, 1], got " + io::shortest(e));
    }
  }
  if (!(d_over_sigma >= 0)) throw config_error("d_over_sigma must be >= 0");
  if (!(t_final_units >= 0)) throw config_error("t_final_units must be >= 0");
  if (!(grid_extent_over_sigma > 0)) {
    throw config_error("grid_extent_over_sigma must be positive");
  }
  if (grid_points < 3) {
    throw config_error("grid too narrow: grid_points must be at least 3");
  }
  if (!(dt_safety > 0 && dt_safety <= 1)) {
    throw config_error("dt_safety must lie in (0, 1]");
  }
  if (!(amp_floor_rel > 0)) throw config_error("amp_floor_rel must be positive");
  if (levels < 3) throw config_error("levels must be at least 3");
  if (!(hbar > 0) || !(mass > 0)) throw config_error("hbar and mass must be positive");
  for (double t : snapshot_times) {
    if (t < 0 || t > t_final_units) {
      throw config_error("snapshot_times must lie within [0, t_final_units]");
    }
  }
  for (double t : times) {
    if (t < 0) throw config_error("times must be nonnegative");
  }
}

Experiment ExperimentConfig::experiment(double eps) const {
  const SimParams<double> params(mass, hbar, eps, dt_safety, amp_floor_rel);
  // Lengths in units of sigma = 1, times in units of m sigma^2 / hbar.
  const double sigma = 1.0;
  const double time_unit = mass * sigma * sigma / hbar;
  std::vector<double> snaps;
  for (double t : snapshot_times) snaps.push_back(t * time_unit);
  std::sort(snaps.begin(), snaps.end());
  return {TwoGaussianConfig<double>(d_over_sigma * sigma, sigma, params),
          Grid1D<double>(-grid_extent_over_sigma * sigma,
                         grid_extent_over_sigma * sigma,
                         static_cast<Eigen::Index>(grid_points)),
          t_final_units * time_unit, snaps};
}

json to_json(const ExperimentConfig& c) {
  return {{"epsilon", c.epsilon},
          {"d_over_sigma", c.d_over_sigma},
          {"t_final_units", c.t_final_units},
          {"grid_extent_over_sigma", c.grid_extent_over_sigma},
          {"grid_points", c.grid_points},
          {"dt_safety", c.dt_safety},
          {"amp_floor_rel", c.amp_floor_rel},
          {"snapshot_times", c.snapshot_times},
          {"times", c.times},
          {"levels", c.levels},
          {"threads", c.threads},
          {"input", c.input},
          {"hbar", c.hbar},
          {"mass", c.mass},
          {"output_dir", c.output_dir}};
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  try {
    j.at("epsilon").get_to(c.epsilon);
    j.at("d_over_sigma").get_to(c.d_over_sigma);
    j.at("t_final_units").get_to(c.t_final_units);
    j.at("grid_extent_over_sigma").get_to(c.grid_extent_over_sigma);
    j.at("grid_points").get_to(c.grid_points);
    j.at("dt_safety").get_to(c.dt_safety);
    j.at("amp_floor_rel").get_to(c.amp_floor_rel);
    j.at("snapshot_times").get_to(c.snapshot_times);
    j.at("times").get_to(c.times);
    j.at("levels").get_to(c.levels);
    j.at("threads").get_to(c.threads);
    j.at("input").get_to(c.input);
    j.at("hbar").get_to(c.hbar);
    j.at("mass").get_to(c.mass);
    j.at("output_dir").get_to(c.output_dir);
  } catch (const json::exception& e) {
    throw config_error(std::string("manifest config: ") + e.what());
  }
  return c;
}

ExperimentConfig config_from_manifest(const fs::path& manifest) {
  json j;
  try {
    j = json::parse(io::read_text(manifest));
  } catch (const json::exception& e) {
    throw config_error("cannot parse manifest '" + manifest.string() +
                       "': " + e.what());
  }
  if (j.value("schema_version", 0) != kSchemaVersion) {
    throw config_error("unsupported manifest schema_version");
  }
  return config_from_json(j.at("config"));
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Config:
      return kExitConfig;
    case ErrorKind::Numerical:
      return kExitNumerical;
    case ErrorKind::Io:
      return kExitIo;
  }
  return kExitNumerical;
}

namespace {

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json manifest_header(const std::string& command, const ExperimentConfig& c) {
  return {{"schema_version", kSchemaVersion},
          {"tool", "transition"},
          {"version", kToolVersion},
          {"command", command},
          {"config", to_json(c)},
          {"units", "hbar = m = sigma = 1; time in m sigma^2 / hbar"},
          {"created_utc", utc_timestamp()}};
}

void write_manifest(const fs::path& path, const json& manifest) {
  io::write_text(path, manifest.dump(2) + "\n");
}

json report_json(const ComparisonReport& r) {
  return {{"epsilon", r.epsilon},
          {"time", r.time},
          {"linf_error_rel_peak", r.linf_error_rel_peak},
          {"l2_error", r.l2_error},
          {"visibility_sim", r.visibility_sim},
          {"visibility_analytic", r.visibility_analytic},
          {"norm_drift", r.norm_drift}};
}

std::string snapshot_name(double t) {
  return "snapshot_t" + io::shortest(t) + ".csv";
}

// Writes one CSV per snapshot plus manifest.json into dir.
json write_run(const fs::path& dir, const ExperimentConfig& config,
               const Experiment& experiment, const RunResult<double>& run) {
  io::ensure_directory(dir);
  const RealArray<double> x = experiment.grid.points();
  json snapshots = json::array();
  for (const auto& [t, field] : run.snapshots) {
    const auto sim = density(field, t, experiment.epsilon());
    const auto ref = reference_density(experiment, t);
    const RealArray<double> re = field.values().real();
    const RealArray<double> im = field.values().imag();
    const std::string name = snapshot_name(t);
    io::write_csv(dir / name, {{"x", &x},
                               {"rho_sim", &sim.rho},
                               {"rho_analytic", &ref.rho},
                               {"re_psi", &re},
                               {"im_psi", &im}});
    json s = report_json(compare(experiment, run, t));
    s["file"] = name;
    s["reference"] = to_string(ref.provenance);
    snapshots.push_back(std::move(s));
  }

  json m = manifest_header("simulate", config);
  m["scheme"] = kSchemeId;
  m["epsilon"] = experiment.epsilon();
  m["hbar_scaled"] = experiment.packets.params().hbar_scaled();
  m["dt_used"] = run.dt_used;
  m["steps"] = run.steps_taken;
  m["norm_drift"] = run.max_norm_drift();
  m["max_classicality_term"] = run.max_classicality_term;
  m["singular_regime"] = run.singular_regime;
  m["grid"] = {{"x_min", experiment.grid.x_min()},
               {"x_max", experiment.grid.x_max()},
               {"n_points", experiment.grid.size()},
               {"dx", experiment.grid.dx()}};
  m["snapshots"] = snapshots;
  m["metrics"] = snapshots.back();
  write_manifest(dir / "manifest.json", m);
  return m;
}

ExperimentConfig single(const ExperimentConfig& c, double eps,
                        const std::string& out) {
  ExperimentConfig s = c;
  s.epsilon = {eps};
  s.output_dir = out;
  return s;
}

}  // namespace

json cmd_simulate(const ExperimentConfig& config) {
  config.validate();
  if (config.epsilon.size() != 1) {
    throw config_error("simulate takes exactly one epsilon; use sweep for lists");
  }
  const Experiment e = config.experiment(config.epsilon.front());
  const auto psi0 = initial_state(e.packets, e.grid);
  io::ensure_directory(config.output_dir);
  const auto run = evolve(e.solver_config(), psi0);
  return write_run(config.output_dir, config, e, run);
}

json cmd_sweep(const ExperimentConfig& config) {
  config.validate();
  std::vector<double> eps;
  json warnings = json::array();
  for (double e : config.epsilon) {
    if (std::find(eps.begin(), eps.end(), e) != eps.end()) {
      const std::string w = "duplicate epsilon " + io::shortest(e) + " ignored";
      std::cerr << "warning: " << w << "\n";
      warnings.push_back(w);
      continue;
    }
    eps.push_back(e);
  }
  // Validate the grid against the initial state before spending time.
  (void)initial_state(config.experiment(eps.front()).packets,
                      config.experiment(eps.front()).grid);

  const fs::path root = config.output_dir;
  io::ensure_directory(root);
  const auto items = epsilon_sweep(eps, config.experiment(eps.front()),
                                   config.threads);

  json runs = json::array();
  int failures = 0;
  for (const auto& item : items) {
    const std::string dir = "eps_" + io::shortest(item.epsilon);
    json entry = {{"epsilon", item.epsilon}, {"directory", dir}};
    if (item.ok()) {
      const auto sub = single(config, item.epsilon, (root / dir).string());
      const json m = write_run(root / dir, sub, config.experiment(item.epsilon),
                               item.result->run);
      entry["status"] = "ok";
      entry["manifest"] = dir + "/manifest.json";
      entry["csv"] = dir + "/" + m["snapshots"].back()["file"].get<std::string>();
      entry["metrics"] = m["metrics"];
    } else {
      ++failures;
      entry["status"] = "failed";
      entry["error"] = item.error;
    }
    runs.push_back(std::move(entry));
  }

  json m = manifest_header("sweep", config);
  m["scheme"] = kSchemeId;
  m["runs"] = runs;
  m["failures"] = failures;
  m["warnings"] = warnings;
  write_manifest(root / "sweep_manifest.json", m);
  return m;
}

json cmd_analytic(const ExperimentConfig& config) {
  config.validate();
  const fs::path root = config.output_dir;
  io::ensure_directory(root);
  std::vector<double> times = config.times;
  if (times.empty()) times.push_back(config.t_final_units);

  json files = json::array();
  for (double eps : config.epsilon) {
    const Experiment e = config.experiment(eps);
    (void)initial_state(e.packets, e.grid);
    const RealArray<double> x = e.grid.points();
    const double time_unit = config.mass / config.hbar;
    for (double t_units : times) {
      const double t = t_units * time_unit;
      const auto rho = density_at(e.packets, t, e.grid);
      const auto psi = wavefunction_at(e.packets, t, e.grid);
      const RealArray<double> re = psi.values().real();
      const RealArray<double> im = psi.values().imag();
      const std::string name =
          "analytic_eps" + io::shortest(eps) + "_t" + io::shortest(t_units) + ".csv";
      io::write_csv(root / name, {{"x", &x},
                                  {"rho_analytic", &rho.rho},
                                  {"re_psi_scaled", &re},
                                  {"im_psi_scaled", &im}});
      const auto vis = analytic_visibility(e.packets, t);
      files.push_back({{"epsilon", eps},
                       {"time", t_units},
                       {"file", name},
                       {"norm", norm(rho)},
                       {"visibility", vis.value},
                       {"pre_fringe", vis.pre_fringe}});
    }
  }
  json m = manifest_header("analytic", config);
  m["files"] = files;
  write_manifest(root / "analytic_manifest.json", m);
  return m;
}

json cmd_decompose(const ExperimentConfig& config) {
  if (config.input.empty()) throw config_error("decompose needs --input");
  const auto psi = io::read_field_csv(config.input);
  const SimParams<double> params(config.mass, config.hbar, 1.0, config.dt_safety,
                                 config.amp_floor_rel);
  const auto hydro = hydro_fields(psi, params);
  const RealArray<double> x = psi.grid().points();
  const RealArray<double> v = bohm_velocity(hydro.polar, params);

  const fs::path root = config.output_dir;
  io::ensure_directory(root);
  const std::string name = fs::path(config.input).stem().string() + "_decomposed.csv";
  io::write_csv(root / name, {{"x", &x},
                              {"A", &hydro.polar.amplitude()},
                              {"S", &hydro.polar.action()},
                              {"U", &hydro.quantum_potential},
                              {"j", &hydro.current},
                              {"v", &v}});
  json m = manifest_header("decompose", config);
  m["file"] = name;
  m["norm"] = norm(psi);
  write_manifest(root / "decompose_manifest.json", m);
  return m;
}

json cmd_convergence(const ExperimentConfig& config) {
  config.validate();
  const auto table = convergence_study(config.experiment(1.0), config.levels);
  RealArray<double> dx(table.rows.size()), n(table.rows.size()),
      dt(table.rows.size()), err(table.rows.size());
  json rows = json::array();
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const auto& r = table.rows[k];
    dx[k] = r.dx;
    n[k] = static_cast<double>(r.grid_points);
    dt[k] = r.dt;
    err[k] = r.linf_error;
    rows.push_back({{"dx", r.dx},
                    {"grid_points", r.grid_points},
                    {"dt", r.dt},
                    {"linf_error", r.linf_error}});
  }
  const fs::path root = config.output_dir;
  io::ensure_directory(root);
  io::write_csv(root / "convergence.csv", {{"dx", &dx},
                                           {"grid_points", &n},
                                           {"dt", &dt},
                                           {"linf_error", &err}});
  json m = manifest_header("convergence", config);
  m["scheme"] = kSchemeId;
  m["rows"] = rows;
  m["observed_orders"] = table.orders;
  m["non_monotone"] = table.non_monotone;
  write_manifest(root / "convergence_manifest.json", m);
  return m;
}

int run(int argc, char** argv) {
  CLI::App app{"Transition-equation simulator: classical to quantum interference"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value configuration file");

  ExperimentConfig c;
  if (const char* root = std::getenv(kOutputRootEnv)) c.output_dir = root;
  std::string replay;

  app.add_option("--epsilon", c.epsilon, "Degree of quantumness (list for sweep)")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--d_over_sigma", c.d_over_sigma)->capture_default_str();
  app.add_option("--t_final_units", c.t_final_units)->capture_default_str();
  app.add_option("--grid_extent_over_sigma", c.grid_extent_over_sigma)
      ->capture_default_str();
  app.add_option("--grid_points", c.grid_points)->capture_default_str();
  app.add_option("--dt_safety", c.dt_safety)->capture_default_str();
  app.add_option("--amp_floor_rel", c.amp_floor_rel)->capture_default_str();
  app.add_option("--snapshot_times", c.snapshot_times)->delimiter(',');
  app.add_option("--times", c.times, "Times for the analytic subcommand")
      ->delimiter(',');
  app.add_option("--levels", c.levels)->capture_default_str();
  app.add_option("--threads", c.threads)->capture_default_str();
  app.add_option("--input", c.input, "Field CSV (x, re_psi, im_psi)");
  app.add_option("--hbar", c.hbar)->capture_default_str();
  app.add_option("--mass", c.mass)->capture_default_str();
  auto* out_opt = app.add_option("--output_dir", c.output_dir)
                      ->envname(kOutputRootEnv)
                      ->capture_default_str();
  app.add_option("--replay", replay, "Re-run the config stored in a manifest");

  auto* simulate = app.add_subcommand("simulate", "Solve one epsilon and compare");
  auto* sweep = app.add_subcommand("sweep", "Solve a list of epsilon values");
  auto* analytic = app.add_subcommand("analytic", "Closed-form densities only");
  auto* decompose = app.add_subcommand("decompose", "Madelung fields of a CSV field");
  auto* convergence = app.add_subcommand("convergence", "dx-halving study at eps = 1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (!replay.empty()) {
      const std::string out = c.output_dir;
      c = config_from_manifest(replay);
      if (out_opt->count() > 0) c.output_dir = out;
    }
    json m;
    if (simulate->parsed()) {
      m = cmd_simulate(c);
    } else if (sweep->parsed()) {
      m = cmd_sweep(c);
      if (m["failures"].get<int>() > 0) {
        std::cerr << "sweep: " << m["failures"] << " run(s) failed\n";
        return kExitNumerical;
      }
    } else if (analytic->parsed()) {
      m = cmd_analytic(c);
    } else if (decompose->parsed()) {
      m = cmd_decompose(c);
    } else if (convergence->parsed()) {
      m = cmd_convergence(c);
    }
    std::cout << "wrote " << c.output_dir << "\n";
    return kExitOk;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace transition::cli
