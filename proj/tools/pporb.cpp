// pporb command-line front end: golden-table verification, single solves,
// family continuation, and trajectory export.
//
// Exit codes: 0 success, 1 quantitative failure (verification/convergence),
// 2 usage or I/O error.
#include "CLI11.hpp"
#include "pporb/harness.hpp"
#include "pporb/io.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

// Effective configuration: built-in defaults, overlaid by --config, overlaid
// by explicit flags.
struct Defaults {
  int problem = 4;
  std::string theta1;  // with deg/rad suffix
  pporb::IntegratorConfig integ;
  pporb::SolverParams solver;
  std::string data_dir = pporb::default_data_dir();
  std::string output_dir = ".";
  std::string format = "csv";
};

void load_config(const std::string& path, Defaults& def) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  json j = json::parse(in);
  if (j.contains("problem")) def.problem = j["problem"].get<int>();
  if (j.contains("theta1")) def.theta1 = j["theta1"].get<std::string>();
  if (j.contains("data_dir")) def.data_dir = j["data_dir"].get<std::string>();
  if (j.contains("output_dir")) def.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("format")) def.format = j["format"].get<std::string>();
  if (j.contains("seed")) def.solver.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("integrator")) {
    const json& ji = j["integrator"];
    if (ji.contains("method"))
      def.integ.method = ji["method"] == "rk4" ? pporb::IntegratorMethod::rk4_fixed
                                               : pporb::IntegratorMethod::rk54_adaptive;
    if (ji.contains("step")) def.integ.step = ji["step"].get<double>();
    if (ji.contains("abs_tol")) def.integ.abs_tol = ji["abs_tol"].get<double>();
    if (ji.contains("rel_tol")) def.integ.rel_tol = ji["rel_tol"].get<double>();
    if (ji.contains("max_steps")) def.integ.max_steps = ji["max_steps"].get<long>();
    if (ji.contains("collision_floor"))
      def.integ.collision_floor = ji["collision_floor"].get<double>();
  }
  if (j.contains("solver")) {
    const json& js = j["solver"];
    if (js.contains("N")) def.solver.N = js["N"].get<int>();
    if (js.contains("L_max")) def.solver.L_max = js["L_max"].get<int>();
    if (js.contains("rho")) def.solver.rho = js["rho"].get<double>();
    if (js.contains("c")) def.solver.c = js["c"].get<double>();
    if (js.contains("e_g")) def.solver.e_g = js["e_g"].get<double>();
    if (js.contains("seed")) def.solver.seed = js["seed"].get<std::uint64_t>();
    if (js.contains("threads")) def.solver.threads = js["threads"].get<int>();
    if (js.contains("d0")) {
      const auto v = js["d0"].get<std::vector<double>>();
      def.solver.d0 = Eigen::Map<const Eigen::ArrayXd>(v.data(), v.size());
    }
    if (js.contains("d_min")) {
      const auto v = js["d_min"].get<std::vector<double>>();
      def.solver.d_min = Eigen::Map<const Eigen::ArrayXd>(v.data(), v.size());
    }
  }
}

void add_integrator_opts(CLI::App* cmd, pporb::IntegratorConfig& cfg,
                         std::string& method) {
  cmd->add_option("--method", method, "integration method: adaptive | rk4");
  cmd->add_option("--step", cfg.step, "fixed step size / initial adaptive step");
  cmd->add_option("--abs-tol", cfg.abs_tol, "adaptive absolute tolerance");
  cmd->add_option("--rel-tol", cfg.rel_tol, "adaptive relative tolerance");
  cmd->add_option("--max-steps", cfg.max_steps, "step budget");
  cmd->add_option("--collision-floor", cfg.collision_floor,
                  "minimum admissible distance/radius");
}

void add_solver_opts(CLI::App* cmd, pporb::SolverParams& p,
                     std::vector<double>& d0, std::vector<double>& d_min) {
  cmd->add_option("-N,--samples-per-iter", p.N, "candidates per iteration");
  cmd->add_option("--L-max", p.L_max, "iteration cap");
  cmd->add_option("--rho", p.rho, "box shrink factor in (0,1)");
  cmd->add_option("-c,--learning-scale", p.c, "learning-term scale");
  cmd->add_option("--e-g", p.e_g, "target error");
  cmd->add_option("--seed", p.seed, "RNG seed");
  cmd->add_option("--threads", p.threads, "candidate evaluation threads (0 = auto)");
  cmd->add_option("--d0", d0, "initial box radii (6 values)")->delimiter(',');
  cmd->add_option("--d-min", d_min, "minimum box radii (6 values)")->delimiter(',');
}

void apply_method(const std::string& method, pporb::IntegratorConfig& cfg) {
  if (method == "rk4")
    cfg.method = pporb::IntegratorMethod::rk4_fixed;
  else if (method == "adaptive")
    cfg.method = pporb::IntegratorMethod::rk54_adaptive;
  else if (!method.empty())
    throw std::runtime_error("unknown integrator method \"" + method + "\"");
}

std::string checksum_hex(std::uint64_t checksum) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "0x%016llx",
                static_cast<unsigned long long>(checksum));
  return buf;
}

json provenance(const pporb::IntegratorConfig& cfg,
                const pporb::SolverParams* solver,
                std::optional<std::uint64_t> golden_checksum) {
  json j{{"integrator", pporb::to_json(cfg)}};
  if (solver) j["solver"] = pporb::to_json(*solver);
  j["golden_checksum"] =
      golden_checksum ? json(checksum_hex(*golden_checksum)) : json(nullptr);
  return j;
}

void warn_if_out_of_range(const pporb::ReturnSpec& spec) {
  if (!spec.theta1_in_conjectured_range()) {
    std::cerr << "warning: theta1=" << spec.theta1
              << " rad lies outside the conjectured family range for n="
              << spec.n << "; proceeding anyway\n";
  }
}

int cmd_verify(const std::string& table_name, const Defaults& def,
               const std::string& out_path) {
  const int n = table_name == "n4" ? 4 : 6;
  const auto golden = pporb::load_golden(n, def.data_dir);
  const auto report = pporb::verify_table(golden, def.integ);

  for (const auto& row : report.rows) {
    std::printf(
        "theta=%5.1f deg  Err=%.3e  Err_rk4=%.3e  driftL=%.2e  driftE=%.2e  "
        "mismatch=%.3e  %s\n",
        row.theta_deg, row.err_adaptive, row.err_rk4, row.drift_L, row.drift_E,
        row.mismatch, row.pass ? "ok" : "FAIL");
  }
  std::printf("table %s: %s\n", table_name.c_str(),
              report.all_pass ? "all rows pass" : "FAILURES present");

  if (!out_path.empty()) {
    json j = pporb::to_json(report);
    j["provenance"] = provenance(def.integ, nullptr, golden.checksum);
    pporb::atomic_write(out_path, j.dump(2) + "\n");
  }
  return report.all_pass ? 0 : 1;
}

int cmd_solve(const Defaults& def, bool warm_from_table,
              const std::vector<double>& z0_vals, double perturb, bool trace,
              const std::string& out_path) {
  const pporb::ReturnSpec spec{def.problem, pporb::parse_angle(def.theta1)};
  warn_if_out_of_range(spec);

  std::optional<std::uint64_t> checksum;
  pporb::Unknowns Z0{};
  if (!z0_vals.empty()) {
    Z0 = {z0_vals[0], z0_vals[1], z0_vals[2], z0_vals[3], z0_vals[4], z0_vals[5]};
  } else if (warm_from_table) {
    const auto golden = pporb::load_golden(def.problem, def.data_dir);
    checksum = golden.checksum;
    const auto nearest = std::min_element(
        golden.rows.begin(), golden.rows.end(),
        [&spec](const pporb::GoldenRow& a, const pporb::GoldenRow& b) {
          return std::abs(a.theta1() - spec.theta1) <
                 std::abs(b.theta1() - spec.theta1);
        });
    Z0 = nearest->Z;
  } else {
    std::cerr << "solve needs either --z0 or --warm-from-table\n";
    return 2;
  }

  pporb::SolverParams p = def.solver;
  if (perturb != 0.0) {
    // deterministic relative perturbation, seeded off the solver seed
    pporb::UniformRng rng(p.seed ^ 0x70657274757262ull);
    Eigen::VectorXd z = Z0.to_vec();
    for (int i = 0; i < 6; ++i) z[i] *= 1.0 + rng.next_in(-perturb, perturb);
    Z0 = pporb::Unknowns::from_vec(z);
  }
  if (!p.d0.size()) p.d0 = pporb::default_box(Z0.to_vec());
  if (!p.d_min.size())
    p.d_min = Eigen::ArrayXd::Constant(6, pporb::SolverParams::kDefaultDmin);
  p.record_trace = trace;

  const pporb::IntegratorConfig cfg = def.integ;
  const pporb::Objective objective = [&spec, &cfg](const Eigen::VectorXd& z) {
    return pporb::err(pporb::Unknowns::from_vec(z), spec, cfg);
  };
  const pporb::SolverResult sol = pporb::solve(objective, Z0.to_vec(), p);

  std::printf("e_best=%.6e after %d iterations (%ld evaluations): %s\n",
              sol.e_best, sol.iterations_used, sol.evals_used,
              sol.converged ? "converged" : "NOT converged");

  if (!out_path.empty()) {
    pporb::FamilyPoint point;
    point.theta1 = spec.theta1;
    point.Z_best = pporb::Unknowns::from_vec(sol.Z_best);
    point.e_best = sol.e_best;
    point.converged = sol.converged;
    point.iterations = sol.iterations_used;
    point.evals = sol.evals_used;
    point.seed = p.seed;
    if (std::isfinite(sol.e_best)) {
      const pporb::ReducedRhs rhs{spec.n, point.Z_best.m2, cfg.collision_floor};
      const auto drift = pporb::conservation_drift(
          rhs, point.Z_best.initial_state(), pporb::MassParam{point.Z_best.m2},
          spec.n, point.Z_best.T, cfg);
      point.drift_L = drift.drift_L;
      point.drift_E = drift.drift_E;
      point.mismatch =
          pporb::periodicity_check(point.Z_best, spec, cfg, 1e-5).max_mismatch;
    }
    json j = pporb::to_json(point, spec.n);
    j["provenance"] = provenance(cfg, &p, checksum);
    if (trace) {
      json jt = json::array();
      for (const auto& tp : sol.trace)
        jt.push_back({{"iteration", tp.iteration},
                      {"e_best", std::isfinite(tp.e_best) ? json(tp.e_best)
                                                          : json("inf")}});
      j["trace"] = std::move(jt);
    }
    pporb::atomic_write(out_path, j.dump(2) + "\n");
  }
  return sol.converged ? 0 : 1;
}

int cmd_trajectory(const Defaults& def, const std::string& row_angle,
                   int samples, double multiples, const std::string& out_path) {
  const double theta1 = pporb::parse_angle(row_angle);
  const auto golden = pporb::load_golden(def.problem, def.data_dir);
  const pporb::GoldenRow* row = nullptr;
  for (const auto& r : golden.rows)
    if (std::abs(r.theta1() - theta1) < 1e-9) row = &r;
  if (!row) {
    std::cerr << "no golden row at theta1=" << row_angle << " for n="
              << def.problem << "\n";
    return 2;
  }

  const pporb::ReducedRhs rhs{def.problem, row->Z.m2, def.integ.collision_floor};
  const auto traj = pporb::sample_trajectory(rhs, row->Z.initial_state().to_vec(),
                                             multiples * row->Z.T, def.integ,
                                             samples);
  if (!traj.completed()) {
    std::cerr << "integration failed at t=" << traj.failure->time << "\n";
    return 1;
  }
  const auto tracks = pporb::cartesian_tracks(
      traj.trajectory, pporb::MassParam{row->Z.m2}, def.problem);

  std::string payload;
  if (def.format == "csv") {
    payload = pporb::trajectory_csv(tracks);
  } else if (def.format == "svg") {
    payload = pporb::trajectory_svg(tracks);
  } else if (def.format == "json") {
    json j = pporb::trajectory_json(tracks);
    j["provenance"] = provenance(def.integ, nullptr, golden.checksum);
    payload = j.dump(2) + "\n";
  } else {
    std::cerr << "unknown format \"" << def.format << "\" (csv|json|svg)\n";
    return 2;
  }

  std::string path = out_path;
  if (path.empty()) {
    path = def.output_dir + "/trajectory_n" + std::to_string(def.problem) + "_" +
           row_angle + "." + def.format;
  }
  pporb::atomic_write(path, payload);
  std::printf("wrote %s (%d samples, %d bodies)\n", path.c_str(), samples,
              def.problem);
  return 0;
}

int cmd_family(const Defaults& def, const std::string& grid_text, bool cold,
               const std::vector<double>& z0_vals, bool descending,
               const std::string& out_dir) {
  const std::vector<double> grid = pporb::parse_grid(grid_text);
  if (grid.empty()) {
    std::cerr << "empty theta1 grid\n";
    return 2;
  }
  const auto golden = pporb::load_golden(def.problem, def.data_dir);

  pporb::FamilyOptions opts;
  opts.cold = cold;
  opts.descending = descending;
  opts.master_seed = def.solver.seed;
  if (!z0_vals.empty())
    opts.z0 = pporb::Unknowns{z0_vals[0], z0_vals[1], z0_vals[2],
                              z0_vals[3], z0_vals[4], z0_vals[5]};

  const auto result =
      pporb::run_family(def.problem, grid, def.solver, def.integ, golden, opts);

  json summary{{"n", result.n}, {"rows", json::array()}};
  for (const auto& point : result.rows) {
    const double deg = point.theta1 * 180.0 / M_PI;
    std::printf("theta1=%7.3f deg  e_best=%.3e  %s  (%d iters)\n", deg,
                point.e_best, point.converged ? "converged" : "UNCONVERGED",
                point.iterations);
    json j = pporb::to_json(point, result.n);
    j["provenance"] = provenance(def.integ, &def.solver, golden.checksum);
    char name[64];
    std::snprintf(name, sizeof(name), "point_%08.3fdeg.json", deg);
    pporb::atomic_write(out_dir + "/" + name, j.dump(2) + "\n");
    summary["rows"].push_back(pporb::to_json(point, result.n));
  }
  summary["all_converged"] = result.all_converged();
  summary["provenance"] = provenance(def.integ, &def.solver, golden.checksum);
  pporb::atomic_write(out_dir + "/summary.json", summary.dump(2) + "\n");
  return result.all_converged() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  Defaults def;
  try {
    for (int i = 1; i < argc; ++i) {
      const std::string a = argv[i];
      if (a == "--config" && i + 1 < argc) load_config(argv[i + 1], def);
      else if (a.rfind("--config=", 0) == 0) load_config(a.substr(9), def);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  CLI::App app{"pseudo-periodic planar 4- and 6-body orbit finder"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override it");

  std::string method;  // shared integrator-method text, applied after parse

  // verify
  auto* verify = app.add_subcommand("verify", "re-check a golden table");
  std::string table_name;
  std::string verify_out;
  verify->add_option("--table", table_name, "n4 | n6")
      ->required()
      ->check(CLI::IsMember({"n4", "n6"}));
  verify->add_option("--out", verify_out, "JSON report path");
  verify->add_option("--data-dir", def.data_dir, "golden data directory");
  add_integrator_opts(verify, def.integ, method);

  // solve
  auto* solve = app.add_subcommand("solve", "solve one return problem");
  bool warm = false, trace = false;
  double perturb = 0.0;
  std::vector<double> z0_vals, d0_vals, dmin_vals;
  std::string solve_out;
  solve->add_option("--problem", def.problem, "4 | 6")->check(CLI::IsMember({4, 6}));
  solve->add_option("--theta1", def.theta1, "target angle, e.g. 60deg or 1.0472rad")
      ->required();
  solve->add_option("--z0", z0_vals, "initial guess x1,x2,x3,x4,m2,T")
      ->delimiter(',')
      ->expected(6);
  solve->add_flag("--warm-from-table", warm, "start from the nearest golden row");
  solve->add_option("--perturb", perturb, "relative perturbation of the start");
  solve->add_flag("--trace", trace, "record per-iteration e_best");
  solve->add_option("--out", solve_out, "solution JSON path");
  solve->add_option("--data-dir", def.data_dir, "golden data directory");
  add_integrator_opts(solve, def.integ, method);
  add_solver_opts(solve, def.solver, d0_vals, dmin_vals);

  // trajectory
  auto* traj = app.add_subcommand("trajectory", "export body trajectories");
  std::string row_angle, traj_out;
  int samples = 512;
  double multiples = 1.0;
  traj->add_option("--problem", def.problem, "4 | 6")->check(CLI::IsMember({4, 6}));
  traj->add_option("--row", row_angle, "golden row angle, e.g. 60deg")->required();
  traj->add_option("--samples", samples, "sample count (>= 2)")
      ->check(CLI::Range(2, 100000000));
  traj->add_option("--multiples", multiples, "time horizon in units of T")
      ->check(CLI::PositiveNumber);
  traj->add_option("--format", def.format, "csv | json | svg");
  traj->add_option("--out", traj_out, "output file");
  traj->add_option("--output-dir", def.output_dir, "directory for default names");
  traj->add_option("--data-dir", def.data_dir, "golden data directory");
  add_integrator_opts(traj, def.integ, method);

  // family
  auto* family = app.add_subcommand("family", "continuation over a theta1 grid");
  std::string grid_text, family_out_dir = "family_out";
  bool cold = false, descending = false;
  std::vector<double> family_z0;
  family->add_option("--problem", def.problem, "4 | 6")->check(CLI::IsMember({4, 6}));
  family->add_option("--grid", grid_text, "start:step:end with deg/rad suffix")
      ->required();
  family->add_flag("--cold", cold, "no golden warm start (needs --z0)");
  family->add_option("--z0", family_z0, "explicit start x1,x2,x3,x4,m2,T")
      ->delimiter(',')
      ->expected(6);
  family->add_flag("--descending", descending, "continue from high theta1 down");
  family->add_option("--out-dir", family_out_dir, "output directory");
  family->add_option("--data-dir", def.data_dir, "golden data directory");
  add_integrator_opts(family, def.integ, method);
  add_solver_opts(family, def.solver, d0_vals, dmin_vals);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    apply_method(method, def.integ);
    if (!d0_vals.empty())
      def.solver.d0 = Eigen::Map<const Eigen::ArrayXd>(d0_vals.data(), d0_vals.size());
    if (!dmin_vals.empty())
      def.solver.d_min =
          Eigen::Map<const Eigen::ArrayXd>(dmin_vals.data(), dmin_vals.size());

    if (verify->parsed()) return cmd_verify(table_name, def, verify_out);
    if (solve->parsed())
      return cmd_solve(def, warm, z0_vals, perturb, trace, solve_out);
    if (traj->parsed())
      return cmd_trajectory(def, row_angle, samples, multiples, traj_out);
    if (family->parsed())
      return cmd_family(def, grid_text, cold, family_z0, descending,
                        family_out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
