#include "marlot/geometry.hpp"

#include <algorithm>
#include <cassert>
#include <limits>

namespace marlot::geom {

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len_sq = ab.norm_sq();
  if (len_sq <= 0.0) return distance(p, a);
  double t = (p - a).dot(ab) / len_sq;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, a + ab * t);
}

static bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c,
                               const Vec2& d) {
  const auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    const double v = (q - p).cross(r - p);
    if (v > 0.0) return 1;
    if (v < 0.0) return -1;
    return 0;
  };
  const int o1 = orient(a, b, c);
  const int o2 = orient(a, b, d);
  const int o3 = orient(c, d, a);
  const int o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  const auto on = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) &&
           std::min(p.y, q.y) <= r.y && r.y <= std::max(p.y, q.y);
  };
  if (o1 == 0 && on(a, b, c)) return true;
  if (o2 == 0 && on(a, b, d)) return true;
  if (o3 == 0 && on(c, d, a)) return true;
  if (o4 == 0 && on(c, d, b)) return true;
  return false;
}

double segment_segment_distance(const Vec2& a, const Vec2& b, const Vec2& c,
                                const Vec2& d) {
  if (segments_intersect(a, b, c, d)) return 0.0;
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                   point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

std::vector<Vec2> Obb::corners() const {
  const Vec2 dir{std::cos(heading), std::sin(heading)};
  const Vec2 nrm = dir.left();
  const Vec2 half_l = dir * (length * 0.5);
  const Vec2 half_w = nrm * (width * 0.5);
  return {center + half_l + half_w, center - half_l + half_w,
          center - half_l - half_w, center + half_l - half_w};
}

bool obb_overlap(const Obb& a, const Obb& b) {
  const auto ca = a.corners();
  const auto cb = b.corners();
  const Vec2 axes[4] = {
      Vec2{std::cos(a.heading), std::sin(a.heading)},
      Vec2{std::cos(a.heading), std::sin(a.heading)}.left(),
      Vec2{std::cos(b.heading), std::sin(b.heading)},
      Vec2{std::cos(b.heading), std::sin(b.heading)}.left(),
  };
  for (const Vec2& axis : axes) {
    double lo_a = std::numeric_limits<double>::max(), hi_a = -lo_a;
    double lo_b = lo_a, hi_b = hi_a;
    for (const Vec2& c : ca) {
      const double v = axis.dot(c);
      lo_a = std::min(lo_a, v);
      hi_a = std::max(hi_a, v);
    }
    for (const Vec2& c : cb) {
      const double v = axis.dot(c);
      lo_b = std::min(lo_b, v);
      hi_b = std::max(hi_b, v);
    }
    if (hi_a < lo_b || hi_b < lo_a) return false;
  }
  return true;
}

double obb_clearance(const Obb& a, const Obb& b) {
  if (obb_overlap(a, b)) return 0.0;
  const auto ca = a.corners();
  const auto cb = b.corners();
  double best = std::numeric_limits<double>::max();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      best = std::min(best, segment_segment_distance(ca[i], ca[(i + 1) % 4],
                                                     cb[j], cb[(j + 1) % 4]));
    }
  }
  return best;
}

Polyline::Polyline(std::vector<Vec2> pts) : pts_(std::move(pts)) {
  cum_.resize(pts_.size(), 0.0);
  for (std::size_t i = 1; i < pts_.size(); ++i) {
    cum_[i] = cum_[i - 1] + distance(pts_[i - 1], pts_[i]);
  }
}

std::size_t Polyline::segment_for(double s) const {
  // upper_bound on the cumulative table; segment i spans [cum_[i], cum_[i+1]]
  const auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
  std::size_t idx = static_cast<std::size_t>(it - cum_.begin());
  if (idx == 0) return 0;
  if (idx >= pts_.size()) return pts_.size() - 2;
  return idx - 1;
}

Vec2 Polyline::point_at(double s) const {
  assert(!empty());
  s = std::clamp(s, 0.0, length());
  const std::size_t i = segment_for(s);
  const Vec2 dir = (pts_[i + 1] - pts_[i]).normalized();
  return pts_[i] + dir * (s - cum_[i]);
}

Vec2 Polyline::tangent_at(double s) const {
  assert(!empty());
  s = std::clamp(s, 0.0, length());
  const std::size_t i = segment_for(s);
  return (pts_[i + 1] - pts_[i]).normalized();
}

Vec2 Polyline::offset_point(double s, double d) const {
  s = std::clamp(s, 0.0, length());
  const std::size_t i = segment_for(s);
  const Vec2 dir = (pts_[i + 1] - pts_[i]).normalized();
  return pts_[i] + dir * (s - cum_[i]) + dir.left() * d;
}

Projection Polyline::project(const Vec2& p, std::optional<double> hint_s,
                             double hint_window) const {
  assert(!empty());
  std::size_t first = 0;
  std::size_t last = pts_.size() - 2;
  if (hint_s.has_value()) {
    first = segment_for(std::max(0.0, *hint_s - hint_window));
    last = segment_for(std::min(length(), *hint_s + hint_window));
  }
  Projection best;
  best.distance = std::numeric_limits<double>::max();
  for (std::size_t i = first; i <= last; ++i) {
    const Vec2& a = pts_[i];
    const Vec2& b = pts_[i + 1];
    const Vec2 ab = b - a;
    const double len = ab.norm();
    if (len <= 0.0) continue;
    const Vec2 dir = ab * (1.0 / len);
    double t = (p - a).dot(dir);
    t = std::clamp(t, 0.0, len);
    const Vec2 foot = a + dir * t;
    const double dist = distance(p, foot);
    if (dist < best.distance) {
      best.distance = dist;
      best.s = cum_[i] + t;
      best.segment = i;
      const double side = dir.cross(p - a);
      best.d = side >= 0.0 ? dist : -dist;
    }
  }
  return best;
}

double Polyline::distance_to(const Vec2& p) const {
  return project(p).distance;
}

}  // namespace marlot::geom
