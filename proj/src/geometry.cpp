#include "sdesign/geometry.hpp"

#include "sdesign/error.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <string>

namespace sdesign {

SpherePoint SpherePoint::from_cartesian(const Vec3& v) {
  const double n = v.norm();
  if (!std::isfinite(n) || std::abs(n - 1.0) > kUnitTolerance) {
    throw DomainError("point is not on the unit sphere (norm " + std::to_string(n) + ")");
  }
  return SpherePoint(v);
}

SpherePoint SpherePoint::normalized(const Vec3& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw DomainError("cannot project a zero or non-finite vector onto the sphere");
  }
  return SpherePoint(v / n);
}

SpherePoint SpherePoint::from_spherical(double theta, double phi) {
  if (!std::isfinite(theta) || !std::isfinite(phi)) {
    throw DomainError("non-finite spherical coordinates");
  }
  const double st = std::sin(theta);
  return SpherePoint(Vec3(st * std::cos(phi), st * std::sin(phi), std::cos(theta)));
}

double SpherePoint::sin_theta() const {
  const double s = std::hypot(xyz_[0], xyz_[1]);
  return s < kPoleSnap ? 0.0 : s;
}

double SpherePoint::cos_theta() const {
  if (sin_theta() == 0.0) return xyz_[2] >= 0.0 ? 1.0 : -1.0;
  return xyz_[2];
}

double SpherePoint::theta() const {
  const double s = sin_theta();
  if (s == 0.0) return xyz_[2] >= 0.0 ? 0.0 : kPi;
  return std::atan2(s, xyz_[2]);
}

double SpherePoint::phi() const {
  if (sin_theta() == 0.0) return 0.0;
  double p = std::atan2(xyz_[1], xyz_[0]);
  if (p < 0.0) p += 2.0 * kPi;
  if (p >= 2.0 * kPi) p -= 2.0 * kPi;
  return p;
}

double geodesic_dist(const SpherePoint& x, const SpherePoint& y) {
  const double d = std::clamp(x.cartesian().dot(y.cartesian()), -1.0, 1.0);
  if (std::abs(d) < 0.5) return std::acos(d);
  if (d > 0.0) {
    const double chord = (x.cartesian() - y.cartesian()).norm();
    return 2.0 * std::asin(std::min(1.0, 0.5 * chord));
  }
  const double chord = (x.cartesian() + y.cartesian()).norm();
  return kPi - 2.0 * std::asin(std::min(1.0, 0.5 * chord));
}

double least_dist(const SpherePoint& x, const PointSet& set) {
  if (set.empty()) throw DomainError("least_dist: empty point set");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : set) best = std::min(best, geodesic_dist(x, p));
  return best;
}

double separation(const PointSet& set) {
  if (set.size() < 2) throw DomainError("separation needs at least two points");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t j = i + 1; j < set.size(); ++j) {
      best = std::min(best, geodesic_dist(set[i], set[j]));
    }
  }
  return best;
}

double hausdorff(const PointSet& a, const PointSet& b) {
  if (a.empty() || b.empty()) throw DomainError("hausdorff: empty point set");
  double h = 0.0;
  for (const auto& p : a) h = std::max(h, least_dist(p, b));
  for (const auto& p : b) h = std::max(h, least_dist(p, a));
  return h;
}

std::vector<std::size_t> nearest_pairing(const PointSet& base, const PointSet& other) {
  if (base.size() != other.size()) {
    throw HypothesisError("pairing requires point sets of equal size");
  }
  if (base.size() == 1) return {0};
  const double half_rho = 0.5 * separation(base);
  std::vector<std::size_t> pairing(base.size());
  std::vector<bool> used(other.size(), false);
  for (std::size_t i = 0; i < base.size(); ++i) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < other.size(); ++j) {
      const double d = geodesic_dist(base[i], other[j]);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    if (!(best_d < half_rho)) {
      throw HypothesisError("no point of the second set within half the separation of point " +
                            std::to_string(i));
    }
    if (used[best]) {
      throw HypothesisError("nearest-point pairing is not injective");
    }
    used[best] = true;
    pairing[i] = best;
  }
  return pairing;
}

Eigen::Matrix3d rotation_about_axis(const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

PointSet rotate(const PointSet& set, const Eigen::Matrix3d& rotation) {
  std::vector<SpherePoint> out;
  out.reserve(set.size());
  for (const auto& p : set) out.push_back(SpherePoint::normalized(rotation * p.cartesian()));
  return PointSet(std::move(out));
}

void SphericalRectangle::validate() const {
  if (!std::isfinite(theta.lo) || !std::isfinite(theta.hi) || !std::isfinite(phi.lo) ||
      !std::isfinite(phi.hi)) {
    throw DomainError("rectangle bounds must be finite");
  }
  if (theta.lo < 0.0 || theta.hi > kPi || theta.lo > theta.hi) {
    throw DomainError("theta interval must satisfy 0 <= lo <= hi <= pi");
  }
  if (phi.lo > phi.hi) {
    throw DomainError(
        "phi interval wraps past 2*pi (lo > hi); split it into [lo, 2pi) and [0, hi]");
  }
  if (phi.lo < 0.0 || phi.hi >= 2.0 * kPi) {
    throw DomainError("phi interval must lie in [0, 2*pi); wrapping intervals are not supported");
  }
}

std::array<SpherePoint, 4> SphericalRectangle::vertices() const {
  return {SpherePoint::from_spherical(theta.lo, phi.lo), SpherePoint::from_spherical(theta.lo, phi.hi),
          SpherePoint::from_spherical(theta.hi, phi.hi), SpherePoint::from_spherical(theta.hi, phi.lo)};
}

SphericalCap cap_cover(const SphericalRectangle& rect) {
  rect.validate();
  const SpherePoint center = SpherePoint::from_spherical(rect.theta.mid(), rect.phi.mid());
  const auto v = rect.vertices();
  const double radius = std::max(geodesic_dist(center, v[0]), geodesic_dist(center, v[2]));
  return {center, radius};
}

std::vector<SpherePoint> sample_rectangle(const SphericalRectangle& rect, std::size_t count) {
  rect.validate();
  // R2 sequence (plastic-number Kronecker lattice).
  constexpr double g = 1.32471795724474602596;
  constexpr double a1 = 1.0 / g;
  constexpr double a2 = 1.0 / (g * g);
  const double u_hi = std::cos(rect.theta.lo);
  const double u_lo = std::cos(rect.theta.hi);
  std::vector<SpherePoint> out;
  out.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    const double r1 = std::fmod(0.5 + a1 * static_cast<double>(n + 1), 1.0);
    const double r2 = std::fmod(0.5 + a2 * static_cast<double>(n + 1), 1.0);
    // Area-uniform in theta: cos(theta) uniform on [u_lo, u_hi].
    double th = std::acos(std::clamp(u_lo + r1 * (u_hi - u_lo), -1.0, 1.0));
    th = std::clamp(th, rect.theta.lo, rect.theta.hi);
    const double ph = rect.phi.lo + r2 * rect.phi.width();
    out.push_back(SpherePoint::from_spherical(th, ph));
  }
  return out;
}

EnclosureSet EnclosureSet::from_rectangles(std::vector<SphericalRectangle> rects) {
  EnclosureSet set;
  set.caps_.reserve(rects.size());
  for (const auto& r : rects) set.caps_.push_back(cap_cover(r));
  set.rects_ = std::move(rects);
  return set;
}

EnclosureSet EnclosureSet::from_caps(std::vector<SphericalCap> caps) {
  for (const auto& c : caps) {
    if (!(c.radius >= 0.0) || !(c.radius < kPi)) {
      throw DomainError("cap radius must lie in [0, pi)");
    }
  }
  EnclosureSet set;
  set.caps_ = std::move(caps);
  return set;
}

PointSet EnclosureSet::centers() const {
  std::vector<SpherePoint> pts;
  pts.reserve(caps_.size());
  for (const auto& c : caps_) pts.push_back(c.center);
  return PointSet(std::move(pts));
}

EnclosureStats enclosure_stats(const EnclosureSet& set) {
  EnclosureStats stats;
  const auto& caps = set.caps();
  for (const auto& c : caps) stats.rad = std::max(stats.rad, c.radius);
  for (std::size_t i = 0; i < caps.size(); ++i) {
    for (std::size_t j = i + 1; j < caps.size(); ++j) {
      const double gap = geodesic_dist(caps[i].center, caps[j].center) - caps[i].radius - caps[j].radius;
      if (gap < stats.rho) {
        stats.rho = gap;
        stats.closest_i = i;
        stats.closest_j = j;
      }
    }
  }
  stats.overlapping = stats.rho < 0.0;
  return stats;
}

}  // namespace sdesign
