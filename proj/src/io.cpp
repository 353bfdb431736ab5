#include "pporb/io.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace pporb {

using nlohmann::json;

BodyTracks cartesian_tracks(const Trajectory<Vec8>& traj, MassParam m, int n) {
  BodyTracks tracks;
  tracks.times = traj.times;
  tracks.bodies.assign(n, {});
  for (auto& b : tracks.bodies) b.reserve(traj.states.size());
  for (const auto& yv : traj.states) {
    const CartesianState c = embed_cartesian(ReducedState::from_vec(yv), m, n);
    for (int i = 0; i < n; ++i) tracks.bodies[i].push_back(c.positions[i]);
  }
  return tracks;
}

namespace {

std::string g17(double v) {
  std::array<char, 40> buf;
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

}  // namespace

std::string trajectory_csv(const BodyTracks& tracks) {
  std::string out = "t";
  for (size_t i = 0; i < tracks.bodies.size(); ++i) {
    out += ",x" + std::to_string(i + 1) + ",y" + std::to_string(i + 1);
  }
  out += "\n";
  for (size_t k = 0; k < tracks.times.size(); ++k) {
    out += g17(tracks.times[k]);
    for (const auto& body : tracks.bodies) {
      out += "," + g17(body[k].x()) + "," + g17(body[k].y());
    }
    out += "\n";
  }
  return out;
}

std::string trajectory_svg(const BodyTracks& tracks, int size) {
  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#ff7f0e", "#9467bd", "#8c564b"};
  Vec2 lo = tracks.bodies.at(0).at(0), hi = lo;
  for (const auto& body : tracks.bodies)
    for (const Vec2& p : body) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  const double span = std::max({hi.x() - lo.x(), hi.y() - lo.y(), 1e-12});
  const double margin = 0.05 * span;
  const double scale = size / (span + 2.0 * margin);
  const auto sx = [&](double x) { return (x - lo.x() + margin) * scale; };
  const auto sy = [&](double y) { return size - (y - lo.y() + margin) * scale; };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    std::to_string(size) + "\" height=\"" + std::to_string(size) +
                    "\" viewBox=\"0 0 " + std::to_string(size) + " " +
                    std::to_string(size) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (size_t i = 0; i < tracks.bodies.size(); ++i) {
    svg += "<polyline fill=\"none\" stroke=\"";
    svg += kPalette[i % 6];
    svg += "\" stroke-width=\"1\" points=\"";
    char buf[64];
    for (const Vec2& p : tracks.bodies[i]) {
      std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", sx(p.x()), sy(p.y()));
      svg += buf;
    }
    svg += "\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

json trajectory_json(const BodyTracks& tracks) {
  json j;
  j["times"] = tracks.times;
  j["bodies"] = json::array();
  for (const auto& body : tracks.bodies) {
    json pts = json::array();
    for (const Vec2& p : body) pts.push_back({p.x(), p.y()});
    j["bodies"].push_back(std::move(pts));
  }
  return j;
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out.good()) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

double parse_angle(const std::string& text) {
  const auto parse_number = [&](size_t suffix_len) {
    const std::string num = text.substr(0, text.size() - suffix_len);
    size_t used = 0;
    const double v = std::stod(num, &used);
    if (used != num.size()) throw std::invalid_argument("bad angle: " + text);
    return v;
  };
  if (text.size() > 3 && text.ends_with("deg"))
    return parse_number(3) * M_PI / 180.0;
  if (text.size() > 3 && text.ends_with("rad")) return parse_number(3);
  throw std::invalid_argument("angle needs a deg/rad suffix (got \"" + text + "\")");
}

std::vector<double> parse_grid(const std::string& text) {
  double unit = 1.0;
  std::string body = text;
  if (body.ends_with("deg")) {
    unit = M_PI / 180.0;
    body.resize(body.size() - 3);
  } else if (body.ends_with("rad")) {
    body.resize(body.size() - 3);
  } else {
    throw std::invalid_argument("grid needs a deg/rad suffix (got \"" + text + "\")");
  }
  const auto c1 = body.find(':');
  const auto c2 = body.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw std::invalid_argument("grid must be start:step:end, got \"" + text + "\"");
  const double start = std::stod(body.substr(0, c1));
  const double step = std::stod(body.substr(c1 + 1, c2 - c1 - 1));
  const double end = std::stod(body.substr(c2 + 1));
  if (step <= 0.0 || end < start)
    throw std::invalid_argument("grid must ascend with positive step: " + text);
  std::vector<double> grid;
  for (double v = start; v <= end + 0.5 * step; v += step)
    grid.push_back(std::min(v, end) * unit);
  if (!grid.empty() && end * unit - grid.back() > 1e-12 * std::max(1.0, end))
    grid.push_back(end * unit);
  return grid;
}

json to_json(const IntegratorConfig& cfg) {
  return {{"method", cfg.method == IntegratorMethod::rk4_fixed ? "rk4" : "adaptive"},
          {"step", cfg.step},
          {"abs_tol", cfg.abs_tol},
          {"rel_tol", cfg.rel_tol},
          {"max_steps", cfg.max_steps},
          {"collision_floor", cfg.collision_floor}};
}

json to_json(const SolverParams& p) {
  json j{{"rho", p.rho},     {"c", p.c},         {"e_g", p.e_g},
         {"N", p.N},         {"L_max", p.L_max}, {"seed", p.seed},
         {"threads", p.threads}};
  j["d0"] = std::vector<double>(p.d0.data(), p.d0.data() + p.d0.size());
  j["d_min"] = std::vector<double>(p.d_min.data(), p.d_min.data() + p.d_min.size());
  return j;
}

json to_json(const VerifyReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"theta_deg", r.theta_deg},
                    {"err_adaptive", r.err_adaptive},
                    {"err_rk4", r.err_rk4},
                    {"cross_check_gap", std::abs(r.err_adaptive - r.err_rk4)},
                    {"drift_L", r.drift_L},
                    {"drift_E", r.drift_E},
                    {"periodicity_mismatch", r.mismatch},
                    {"permutation", r.permutation},
                    {"pass", r.pass}});
  }
  return {{"n", report.n},
          {"thresholds",
           {{"err_max", report.thresholds.err_max},
            {"cross_check_max", report.thresholds.cross_check_max},
            {"drift_max", report.thresholds.drift_max},
            {"mismatch_max", report.thresholds.mismatch_max}}},
          {"rows", rows},
          {"all_pass", report.all_pass}};
}

json to_json(const FamilyPoint& point, int n) {
  return {{"n", n},
          {"theta1_rad", point.theta1},
          {"theta1_deg", point.theta1 * 180.0 / M_PI},
          {"Z_best",
           {{"x1", point.Z_best.x1},
            {"x2", point.Z_best.x2},
            {"x3", point.Z_best.x3},
            {"x4", point.Z_best.x4},
            {"m2", point.Z_best.m2},
            {"T", point.Z_best.T}}},
          {"e_best", std::isfinite(point.e_best) ? json(point.e_best) : json("inf")},
          {"converged", point.converged},
          {"drift_L", point.drift_L},
          {"drift_E", point.drift_E},
          {"periodicity_mismatch", point.mismatch},
          {"iterations", point.iterations},
          {"evals", point.evals},
          {"seed", point.seed}};
}

json to_json(const OracleReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    json row{{"theta_deg", r.theta_deg}, {"max_discrepancy", r.max_discrepancy}};
    if (r.failure) row["failure_time"] = r.failure->time;
    rows.push_back(std::move(row));
  }
  return {{"rows", rows},
          {"max_discrepancy", report.max_discrepancy},
          {"all_completed", report.all_completed}};
}

}  // namespace pporb
