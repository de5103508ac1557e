#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace marlot::geom {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double k) const { return {x * k, y * k}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::sqrt(x * x + y * y); }
  double norm_sq() const { return x * x + y * y; }

  /// Left-hand normal (rotate +90 degrees).
  Vec2 left() const { return {-y, x}; }

  Vec2 normalized() const {
    const double n = norm();
    return n > 0.0 ? Vec2{x / n, y / n} : Vec2{0.0, 0.0};
  }

  Vec2 rotated(double angle) const {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * x - s * y, s * x + c * y};
  }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

/// Unsigned area of the triangle a-b-c.
inline double triangle_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * std::abs((b - a).cross(c - a));
}

/// Unsigned area of a simple polygon (shoelace).
inline double polygon_area(const std::vector<Vec2>& pts) {
  double acc = 0.0;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = pts[i];
    const Vec2& q = pts[(i + 1) % n];
    acc += p.cross(q);
  }
  return 0.5 * std::abs(acc);
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);
double segment_segment_distance(const Vec2& a, const Vec2& b, const Vec2& c,
                                const Vec2& d);

/// Oriented bounding box: vehicle footprints.
struct Obb {
  Vec2 center;
  double heading = 0.0;
  double length = 0.0;  // extent along heading
  double width = 0.0;   // extent across heading

  /// Corners in CCW order.
  std::vector<Vec2> corners() const;
};

/// Separating-axis overlap test for two oriented boxes.
bool obb_overlap(const Obb& a, const Obb& b);

/// Surface clearance between two boxes: 0 when they overlap, otherwise the
/// minimum distance between their boundaries.
double obb_clearance(const Obb& a, const Obb& b);

struct Projection {
  double s = 0.0;         // arc length of the foot point
  double d = 0.0;         // signed lateral offset, positive = left of travel
  double distance = 0.0;  // unsigned distance to the foot point
  std::size_t segment = 0;
};

/// Open polyline with a cached cumulative arc-length table. Lane centerlines
/// are stored this way; frenet coordinates are defined against it.
class Polyline {
 public:
  Polyline() = default;
  explicit Polyline(std::vector<Vec2> pts);

  const std::vector<Vec2>& points() const { return pts_; }
  const std::vector<double>& cumulative() const { return cum_; }
  double length() const { return cum_.empty() ? 0.0 : cum_.back(); }
  bool empty() const { return pts_.size() < 2; }

  Vec2 point_at(double s) const;
  Vec2 tangent_at(double s) const;

  /// World point at arc length s, offset d along the left normal.
  Vec2 offset_point(double s, double d) const;

  /// Nearest-point projection. `hint_s`, when given, restricts the search to
  /// a window around that arc length (vehicles advance a bounded distance per
  /// step, so their previous s is a valid hint).
  Projection project(const Vec2& p,
                     std::optional<double> hint_s = std::nullopt,
                     double hint_window = 30.0) const;

  /// Unsigned distance from p to the polyline as a point set.
  double distance_to(const Vec2& p) const;

 private:
  std::size_t segment_for(double s) const;

  std::vector<Vec2> pts_;
  std::vector<double> cum_;
};

}  // namespace marlot::geom
