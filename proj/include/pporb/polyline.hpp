// Planar polyline distance helpers. The orbit-coincidence checks compare the
// point set of one sampled orbit against another as curves, so distances are
// measured point-to-segment, not sample-to-sample.
#pragma once

#include "pporb/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <vector>

namespace pporb {

inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

// Uniform grid over the segments of a polyline, for nearest-segment queries.
class SegmentGrid {
 public:
  explicit SegmentGrid(const std::vector<Vec2>& pts) : pts_(pts) {
    Vec2 lo = pts.front(), hi = pts.front();
    double max_seg = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
      lo = lo.cwiseMin(pts[i]);
      hi = hi.cwiseMax(pts[i]);
      if (i + 1 < pts.size()) max_seg = std::max(max_seg, (pts[i + 1] - pts[i]).norm());
    }
    origin_ = lo;
    const double diag = (hi - lo).norm();
    cell_ = std::max({max_seg, diag / 512.0, 1e-300});
    nx_ = static_cast<int>((hi.x() - lo.x()) / cell_) + 1;
    ny_ = static_cast<int>((hi.y() - lo.y()) / cell_) + 1;
    for (size_t s = 0; s + 1 < pts.size(); ++s) {
      const Vec2 slo = pts[s].cwiseMin(pts[s + 1]);
      const Vec2 shi = pts[s].cwiseMax(pts[s + 1]);
      for (int cx = ix(slo.x()); cx <= ix(shi.x()); ++cx)
        for (int cy = iy(slo.y()); cy <= iy(shi.y()); ++cy)
          cells_[key(cx, cy)].push_back(static_cast<int>(s));
    }
  }

  // Distance from p to the nearest segment; expanding ring search.
  double distance(const Vec2& p) const {
    const int cx = ix(p.x()), cy = iy(p.y());
    double best = std::numeric_limits<double>::infinity();
    const int max_ring = std::max({nx_, ny_,
                                   std::abs(cx) + nx_, std::abs(cy) + ny_}) + 2;
    for (int r = 0; r <= max_ring; ++r) {
      if (best <= cell_ * r) break;  // farther rings cannot improve
      for (int dx = -r; dx <= r; ++dx) {
        for (int dy = -r; dy <= r; ++dy) {
          if (std::max(std::abs(dx), std::abs(dy)) != r) continue;
          const auto it = cells_.find(key(cx + dx, cy + dy));
          if (it == cells_.end()) continue;
          for (int s : it->second)
            best = std::min(best, point_segment_distance(p, pts_[s], pts_[s + 1]));
        }
      }
    }
    return best;
  }

 private:
  int ix(double x) const { return static_cast<int>(std::floor((x - origin_.x()) / cell_)); }
  int iy(double y) const { return static_cast<int>(std::floor((y - origin_.y()) / cell_)); }
  static long long key(int cx, int cy) {
    return (static_cast<long long>(cx) << 32) ^ static_cast<unsigned int>(cy);
  }

  const std::vector<Vec2>& pts_;
  Vec2 origin_;
  double cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::unordered_map<long long, std::vector<int>> cells_;
};

// sup over vertices of `from` of the distance to polyline `to`.
inline double directed_hausdorff(const std::vector<Vec2>& from,
                                 const std::vector<Vec2>& to) {
  const SegmentGrid grid(to);
  double worst = 0.0;
  for (const Vec2& p : from) worst = std::max(worst, grid.distance(p));
  return worst;
}

// Symmetric Hausdorff distance between two polylines.
inline double hausdorff_distance(const std::vector<Vec2>& a,
                                 const std::vector<Vec2>& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

}  // namespace pporb
