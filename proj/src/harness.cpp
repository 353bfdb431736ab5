#include "pporb/harness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#ifndef PPORB_SOURCE_DATA_DIR
#define PPORB_SOURCE_DATA_DIR "data"
#endif

namespace pporb {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Pinned at transcription time; edits to the data files must fail loudly.
std::uint64_t expected_golden_checksum(int n) {
  return n == 4 ? 0x3c9559d5f3c75a56ull : 0x42970fe02afe4f48ull;
}

std::string default_data_dir() {
  if (const char* env = std::getenv("PPORB_DATA_DIR")) return env;
  return PPORB_SOURCE_DATA_DIR;
}

GoldenTable load_golden(int n, const std::string& dir) {
  if (n != 4 && n != 6) throw std::runtime_error("golden table: n must be 4 or 6");
  GoldenTable table;
  table.n = n;
  table.source_path = dir + (n == 4 ? "/table_n4.txt" : "/table_n6.txt");

  std::ifstream in(table.source_path, std::ios::binary);
  if (!in) throw std::runtime_error("golden table: cannot open " + table.source_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  table.checksum = fnv1a64(bytes);

  std::istringstream lines(bytes);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    double theta_deg;
    if (!(fields >> theta_deg)) continue;  // blank or comment-only line
    Unknowns Z{};
    if (!(fields >> Z.x1 >> Z.x2 >> Z.x3 >> Z.x4 >> Z.m2 >> Z.T)) {
      throw std::runtime_error("golden table: garbled row at " + table.source_path +
                               ":" + std::to_string(lineno));
    }
    table.rows.push_back({theta_deg, Z});
  }

  const size_t expected_rows = n == 4 ? 16 : 8;
  if (table.rows.size() != expected_rows) {
    throw std::runtime_error("golden table: " + table.source_path + " has " +
                             std::to_string(table.rows.size()) + " rows, expected " +
                             std::to_string(expected_rows));
  }
  if (table.checksum != expected_golden_checksum(n)) {
    std::ostringstream msg;
    msg << "golden table: " << table.source_path
        << " does not match the pinned transcription (checksum 0x" << std::hex
        << table.checksum << ", expected 0x" << expected_golden_checksum(n) << ")";
    throw std::runtime_error(msg.str());
  }
  return table;
}

VerifyReport verify_table(const GoldenTable& table, const IntegratorConfig& cfg,
                          const VerifyThresholds& thresholds) {
  VerifyReport report;
  report.n = table.n;
  report.thresholds = thresholds;
  report.all_pass = true;

  for (const auto& row : table.rows) {
    const ReturnSpec spec{table.n, row.theta1()};
    RowVerification v;
    v.theta_deg = row.theta_deg;

    v.err_adaptive = err(row.Z, spec, cfg);

    IntegratorConfig rk4 = cfg;
    rk4.method = IntegratorMethod::rk4_fixed;
    rk4.step = row.Z.T / 200000.0;
    v.err_rk4 = err(row.Z, spec, rk4);

    const ReducedRhs rhs{table.n, row.Z.m2, cfg.collision_floor};
    const auto drift = conservation_drift(rhs, row.Z.initial_state(),
                                          MassParam{row.Z.m2}, table.n, row.Z.T, cfg);
    v.drift_L = drift.drift_L;
    v.drift_E = drift.drift_E;

    const auto peri = periodicity_check(row.Z, spec, cfg, thresholds.mismatch_max);
    v.mismatch = peri.max_mismatch;
    v.permutation = peri.permutation;

    v.pass = drift.completed() && peri.evaluable &&
             v.err_adaptive < thresholds.err_max && v.err_rk4 < thresholds.err_max &&
             std::abs(v.err_adaptive - v.err_rk4) < thresholds.cross_check_max &&
             v.drift_L < thresholds.drift_max && v.drift_E < thresholds.drift_max &&
             v.mismatch < thresholds.mismatch_max;
    report.all_pass = report.all_pass && v.pass;
    report.rows.push_back(std::move(v));
  }
  return report;
}

bool FamilyResult::all_converged() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const FamilyPoint& p) { return p.converged; });
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t point_seed(std::uint64_t master_seed, double theta1) {
  return splitmix64(master_seed ^ splitmix64(std::bit_cast<std::uint64_t>(theta1)));
}

FamilyResult run_family(int n, const std::vector<double>& grid,
                        const SolverParams& params, const IntegratorConfig& cfg,
                        const GoldenTable& golden, const FamilyOptions& opts) {
  FamilyResult result;
  result.n = n;
  if (grid.empty()) return result;

  std::vector<double> order = grid;
  std::sort(order.begin(), order.end());
  if (opts.descending) std::reverse(order.begin(), order.end());

  std::optional<Unknowns> warm = opts.z0;
  for (const double theta1 : order) {
    Unknowns Z0{};
    if (warm) {
      Z0 = *warm;
    } else if (!opts.cold && !golden.rows.empty()) {
      // nearest golden row by theta1
      const auto nearest = std::min_element(
          golden.rows.begin(), golden.rows.end(),
          [theta1](const GoldenRow& a, const GoldenRow& b) {
            return std::abs(a.theta1() - theta1) < std::abs(b.theta1() - theta1);
          });
      Z0 = nearest->Z;
    } else {
      throw std::runtime_error("run_family: cold start requires an explicit z0");
    }

    const ReturnSpec spec{n, theta1};
    SolverParams p = params;
    p.seed = point_seed(opts.master_seed, theta1);
    if (!p.d0.size()) p.d0 = default_box(Z0.to_vec());

    const Objective objective = [&spec, &cfg](const Eigen::VectorXd& z) {
      return err(Unknowns::from_vec(z), spec, cfg);
    };
    const SolverResult sol = solve(objective, Z0.to_vec(), p);

    FamilyPoint point;
    point.theta1 = theta1;
    point.Z_best = Unknowns::from_vec(sol.Z_best);
    point.e_best = sol.e_best;
    point.converged = sol.converged;
    point.iterations = sol.iterations_used;
    point.evals = sol.evals_used;
    point.seed = p.seed;

    if (std::isfinite(sol.e_best)) {
      const ReducedRhs rhs{n, point.Z_best.m2, cfg.collision_floor};
      const auto drift = conservation_drift(rhs, point.Z_best.initial_state(),
                                            MassParam{point.Z_best.m2}, n,
                                            point.Z_best.T, cfg);
      point.drift_L = drift.drift_L;
      point.drift_E = drift.drift_E;
      point.mismatch = periodicity_check(point.Z_best, spec, cfg, 1e-5).max_mismatch;
    }
    result.rows.push_back(point);

    // continue the family from the best point found, converged or not
    warm = point.Z_best;
  }

  std::sort(result.rows.begin(), result.rows.end(),
            [](const FamilyPoint& a, const FamilyPoint& b) {
              return a.theta1 < b.theta1;
            });
  return result;
}

OracleReport oracle_campaign(const GoldenTable& table, const IntegratorConfig& cfg,
                             int samples) {
  OracleReport report;
  report.all_completed = true;

  for (const auto& row : table.rows) {
    OracleRow out;
    out.theta_deg = row.theta_deg;

    const ReducedState s0 = row.Z.initial_state();
    const MassParam m{row.Z.m2};
    const ReducedRhs rhs{table.n, row.Z.m2, cfg.collision_floor};
    const auto reduced = sample_trajectory(rhs, s0.to_vec(), row.Z.T, cfg, samples);

    const CartesianState c0 = embed_cartesian(s0, m, table.n);
    const CartesianRhs crhs{c0.masses, cfg.collision_floor};
    const auto cartesian = sample_trajectory(crhs, pack(c0), row.Z.T, cfg, samples);

    if (!reduced.completed() || !cartesian.completed()) {
      out.failure = reduced.completed() ? cartesian.failure : reduced.failure;
      report.all_completed = false;
      report.rows.push_back(out);
      continue;
    }

    for (int k = 0; k < samples; ++k) {
      const CartesianState from_reduced = embed_cartesian(
          ReducedState::from_vec(reduced.trajectory.states[k]), m, table.n);
      const CartesianState direct =
          unpack(c0.masses, cartesian.trajectory.states[k]);
      for (int i = 0; i < table.n; ++i) {
        const double gap =
            (from_reduced.positions[i] - direct.positions[i]).norm();
        out.max_discrepancy = std::max(out.max_discrepancy, gap);
      }
    }
    report.max_discrepancy = std::max(report.max_discrepancy, out.max_discrepancy);
    report.rows.push_back(out);
  }
  return report;
}

}  // namespace pporb
