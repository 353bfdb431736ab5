// Golden-table verification, continuation over the theta1 grid, and the
// reduced-vs-Cartesian cross-validation campaign.
#pragma once

#include "pporb/integrator.hpp"
#include "pporb/shooting.hpp"
#include "pporb/solver.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pporb {

// One transcribed table row: theta(T) in degrees plus the six unknowns.
struct GoldenRow {
  double theta_deg;
  Unknowns Z;

  double theta1() const { return theta_deg * M_PI / 180.0; }
};

struct GoldenTable {
  int n = 0;  // 4 or 6
  std::vector<GoldenRow> rows;
  std::uint64_t checksum = 0;  // FNV-1a over the file bytes
  std::string source_path;
};

// FNV-1a 64-bit, used to pin the golden transcriptions.
std::uint64_t fnv1a64(const std::string& bytes);

// Expected checksums of data/table_n4.txt and data/table_n6.txt.
std::uint64_t expected_golden_checksum(int n);

// Data directory resolution: explicit argument, else $PPORB_DATA_DIR, else
// the build-time source data directory.
std::string default_data_dir();

// Load and checksum-verify a golden table. Throws std::runtime_error with a
// row-identifying message on parse problems or an edited transcription.
GoldenTable load_golden(int n, const std::string& dir = default_data_dir());

struct VerifyThresholds {
  double err_max = 1e-5;          // per-row Err, both integrators
  double cross_check_max = 1e-7;  // |Err_adaptive - Err_rk4|
  double drift_max = 1e-9;        // relative L and E drift
  double mismatch_max = 1e-5;     // periodicity mismatch
};

struct RowVerification {
  double theta_deg = 0.0;
  double err_adaptive = 0.0;
  double err_rk4 = 0.0;
  double drift_L = 0.0;
  double drift_E = 0.0;
  double mismatch = 0.0;
  std::vector<int> permutation;
  bool pass = false;
};

struct VerifyReport {
  int n = 0;
  VerifyThresholds thresholds;
  std::vector<RowVerification> rows;
  bool all_pass = false;
};

// Re-derive every row's residual with the adaptive integrator and with
// fixed RK4 at h = T/200000 (the published cross-check), plus conservation
// drift and the periodicity mismatch.
VerifyReport verify_table(const GoldenTable& table, const IntegratorConfig& cfg,
                          const VerifyThresholds& thresholds = {});

struct FamilyPoint {
  double theta1 = 0.0;  // radians
  Unknowns Z_best{};
  double e_best = 0.0;
  bool converged = false;
  double drift_L = 0.0;
  double drift_E = 0.0;
  double mismatch = 0.0;
  int iterations = 0;
  long evals = 0;
  std::uint64_t seed = 0;
};

struct FamilyResult {
  int n = 0;
  std::vector<FamilyPoint> rows;  // sorted by theta1

  bool all_converged() const;
};

struct FamilyOptions {
  bool cold = false;                // skip the golden warm start
  std::optional<Unknowns> z0;       // explicit start (required when cold)
  bool descending = false;          // continuation direction
  std::uint64_t master_seed = 0;
};

// Per-point solver seed: a fixed mix of the master seed and theta1, so grid
// scheduling cannot change results.
std::uint64_t point_seed(std::uint64_t master_seed, double theta1);

// Continuation over the theta1 grid (radians). Each point warm-starts from
// the previous converged point; the first from the nearest golden row.
// Non-convergence is recorded, not fatal.
FamilyResult run_family(int n, const std::vector<double>& grid,
                        const SolverParams& params, const IntegratorConfig& cfg,
                        const GoldenTable& golden, const FamilyOptions& opts = {});

struct OracleRow {
  double theta_deg = 0.0;
  double max_discrepancy = 0.0;  // max body position gap over [0, T]
  std::optional<IntegrationFailure> failure;
};

struct OracleReport {
  std::vector<OracleRow> rows;
  double max_discrepancy = 0.0;
  bool all_completed = false;
};

// Integrate every golden row twice, through the reduced system and through
// the full Cartesian system from the embedded initial state, and report the
// largest position gap across bodies and sample times.
OracleReport oracle_campaign(const GoldenTable& table, const IntegratorConfig& cfg,
                             int samples = 129);

}  // namespace pporb
