// File emission and text plumbing for the CLI: trajectory exports (CSV, JSON,
// SVG), JSON provenance blocks, atomic writes, and angle/grid parsing.
#pragma once

#include "pporb/harness.hpp"
#include "pporb/integrator.hpp"
#include "pporb/solver.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace pporb {

// Planar tracks of all bodies at shared sample times.
struct BodyTracks {
  std::vector<double> times;
  std::vector<std::vector<Vec2>> bodies;  // bodies[i][k] at times[k]
};

// Embed a sampled reduced trajectory into per-body Cartesian tracks.
BodyTracks cartesian_tracks(const Trajectory<Vec8>& traj, MassParam m, int n);

// CSV with header "t,x1,y1,...,xn,yn", 17 significant digits per value.
std::string trajectory_csv(const BodyTracks& tracks);

// Static SVG plot: one polyline per body.
std::string trajectory_svg(const BodyTracks& tracks, int size = 720);

nlohmann::json trajectory_json(const BodyTracks& tracks);

// Write via a temp file in the same directory, then rename over the target.
void atomic_write(const std::string& path, const std::string& content);

// Angles on the CLI carry an explicit unit suffix: "60deg" or "1.047rad".
// Throws std::invalid_argument otherwise.
double parse_angle(const std::string& text);

// "start:step:end" with one trailing unit suffix, e.g. "30:15:90deg".
// Inclusive of the endpoint up to a half-step tolerance.
std::vector<double> parse_grid(const std::string& text);

// Provenance blocks embedded in every output file.
nlohmann::json to_json(const IntegratorConfig& cfg);
nlohmann::json to_json(const SolverParams& p);
nlohmann::json to_json(const VerifyReport& report);
nlohmann::json to_json(const FamilyPoint& point, int n);
nlohmann::json to_json(const OracleReport& report);

}  // namespace pporb
