#pragma once

#include "sdesign/certify.hpp"
#include "sdesign/search.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace testing {

using sdesign::PointSet;
using sdesign::SpherePoint;
using sdesign::Vec3;

inline SpherePoint random_point(std::mt19937_64& gen) {
  std::normal_distribution<double> n(0.0, 1.0);
  while (true) {
    const Vec3 v(n(gen), n(gen), n(gen));
    if (v.norm() > 1e-3) return SpherePoint::normalized(v);
  }
}

inline PointSet random_points(std::size_t count, std::mt19937_64& gen) {
  std::vector<SpherePoint> pts;
  for (std::size_t i = 0; i < count; ++i) pts.push_back(random_point(gen));
  return PointSet(std::move(pts));
}

// Moves x by exactly `angle` along a random great circle.
inline SpherePoint move_by(const SpherePoint& x, double angle, std::mt19937_64& gen) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v(n(gen), n(gen), n(gen));
  v -= v.dot(x.cartesian()) * x.cartesian();
  v.normalize();
  return SpherePoint::normalized(std::cos(angle) * x.cartesian() + std::sin(angle) * v);
}

inline PointSet tetrahedron() {
  const double c = 1.0 / std::sqrt(3.0);
  return PointSet{SpherePoint::normalized(Vec3(c, c, c)), SpherePoint::normalized(Vec3(c, -c, -c)),
                  SpherePoint::normalized(Vec3(-c, c, -c)), SpherePoint::normalized(Vec3(-c, -c, c))};
}

// Equal-weight t-design with (t+1)^2 points from the solver; checked by the caller.
inline sdesign::SearchResult square_design(int t, std::uint64_t seed = 11) {
  sdesign::SearchConfig cfg;
  cfg.t = t;
  cfg.n = (t + 1) * (t + 1);
  cfg.seed = seed;
  return sdesign::find_design(cfg);
}

// Gauss-Legendre nodes and weights on [-1, 1] by Newton's method on P_n.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace testing
