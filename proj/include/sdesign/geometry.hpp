#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <vector>

namespace sdesign {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kFourPi = 4.0 * std::numbers::pi;

// Unit vectors closer than this to a pole are snapped onto it.
inline constexpr double kPoleSnap = 1e-12;
inline constexpr double kUnitTolerance = 1e-12;

using Vec3 = Eigen::Vector3d;

// A point on the unit 2-sphere. Stores the Cartesian form; the spherical
// coordinates (theta in [0, pi], phi in [0, 2pi)) are derived on demand.
class SpherePoint {
 public:
  SpherePoint() : xyz_(0.0, 0.0, 1.0) {}

  // Throws DomainError unless | |v| - 1 | <= 1e-12.
  static SpherePoint from_cartesian(const Vec3& v);
  static SpherePoint from_cartesian(double x, double y, double z) {
    return from_cartesian(Vec3(x, y, z));
  }
  // Projects a nonzero vector onto the sphere.
  static SpherePoint normalized(const Vec3& v);
  static SpherePoint from_spherical(double theta, double phi);

  const Vec3& cartesian() const noexcept { return xyz_; }
  double x() const noexcept { return xyz_[0]; }
  double y() const noexcept { return xyz_[1]; }
  double z() const noexcept { return xyz_[2]; }

  double theta() const;
  double phi() const;

  // sin(theta) computed from x, y; zero within kPoleSnap of a pole.
  double sin_theta() const;
  double cos_theta() const;

  bool operator==(const SpherePoint& other) const { return xyz_ == other.xyz_; }

 private:
  explicit SpherePoint(const Vec3& v) : xyz_(v) {}
  Vec3 xyz_;
};

// Ordered list of points. Distinctness is not enforced on construction
// (it costs O(N^2)); `separation` reports it.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::vector<SpherePoint> points) : points_(std::move(points)) {}
  PointSet(std::initializer_list<SpherePoint> points) : points_(points) {}

  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const SpherePoint& operator[](std::size_t i) const { return points_[i]; }
  SpherePoint& operator[](std::size_t i) { return points_[i]; }
  const std::vector<SpherePoint>& points() const noexcept { return points_; }

  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }
  void push_back(const SpherePoint& p) { points_.push_back(p); }

 private:
  std::vector<SpherePoint> points_;
};

// Geodesic distance arccos(x.y) in [0, pi]. Switches to the chord form
// 2 asin(|x -+ y| / 2) near 0 and pi, where arccos loses accuracy.
double geodesic_dist(const SpherePoint& x, const SpherePoint& y);

// min_i dist(x, X_i). Throws DomainError on an empty set.
double least_dist(const SpherePoint& x, const PointSet& set);

// Minimal pairwise geodesic distance. Requires at least two points.
double separation(const PointSet& set);

// Symmetric Hausdorff distance between two nonempty point sets.
double hausdorff(const PointSet& a, const PointSet& b);

// For each point of `base`, the index of the point of `other` lying in the
// cap of radius separation(base)/2 around it. Requires equal sizes and
// hausdorff(base, other) < separation(base)/2; under that hypothesis the
// pairing is a bijection. Throws HypothesisError otherwise.
std::vector<std::size_t> nearest_pairing(const PointSet& base, const PointSet& other);

// Rotation helpers used by tests and the search module.
Eigen::Matrix3d rotation_about_axis(const Vec3& axis, double angle);
PointSet rotate(const PointSet& set, const Eigen::Matrix3d& rotation);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double mid() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
};

// C(center, radius) = { x : dist(x, center) <= radius }.
struct SphericalCap {
  SpherePoint center;
  double radius = 0.0;

  bool contains(const SpherePoint& x, double slack = 0.0) const {
    return geodesic_dist(center, x) <= radius + slack;
  }
};

// Image of [theta] x [phi] under the spherical parameterization.
// 0 <= theta.lo <= theta.hi <= pi, 0 <= phi.lo <= phi.hi < 2 pi.
struct SphericalRectangle {
  Interval theta;
  Interval phi;

  // Throws DomainError for invalid or wrapping intervals.
  void validate() const;

  // Vertices ordered (lo,lo), (lo,hi), (hi,hi), (hi,lo) in (theta, phi).
  std::array<SpherePoint, 4> vertices() const;
};

// Cap centered at the image of the parameter midpoint, with radius the
// larger of the distances to vertex 1 and vertex 3. Contains the rectangle.
SphericalCap cap_cover(const SphericalRectangle& rect);

// Deterministic low-discrepancy sample of `count` points of the rectangle,
// uniform with respect to area. Used for containment checks.
std::vector<SpherePoint> sample_rectangle(const SphericalRectangle& rect, std::size_t count);

struct EnclosureStats {
  double rad = 0.0;
  // Minimal gap dist(c_i, c_j) - r_i - r_j; +inf for a single element.
  double rho = std::numeric_limits<double>::infinity();
  bool overlapping = false;
  std::size_t closest_i = 0;
  std::size_t closest_j = 0;
};

// A set of interval enclosures. When built from rectangles the caps are
// their cap-cover; statistics always refer to the caps.
class EnclosureSet {
 public:
  static EnclosureSet from_rectangles(std::vector<SphericalRectangle> rects);
  static EnclosureSet from_caps(std::vector<SphericalCap> caps);

  std::size_t size() const noexcept { return caps_.size(); }
  const std::vector<SphericalCap>& caps() const noexcept { return caps_; }
  const std::vector<SphericalRectangle>& rectangles() const noexcept { return rects_; }
  bool has_rectangles() const noexcept { return !rects_.empty(); }

  PointSet centers() const;

 private:
  std::vector<SphericalRectangle> rects_;
  std::vector<SphericalCap> caps_;
};

EnclosureStats enclosure_stats(const EnclosureSet& set);

}  // namespace sdesign
