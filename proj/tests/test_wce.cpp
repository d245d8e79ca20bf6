#include "sdesign/error.hpp"
#include "sdesign/wce.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace sdesign;

namespace {

QuadratureRule equal_rule(const PointSet& pts, int t = 0) {
  QuadratureRule r;
  r.points = pts;
  r.weights = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(pts.size()), 4 * M_PI / pts.size());
  r.t = t;
  return r;
}

QuadratureRule random_rule(std::size_t n, std::mt19937_64& gen) {
  QuadratureRule r;
  r.points = testing::random_points(n, gen);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  r.weights.resize(static_cast<Eigen::Index>(n));
  for (auto& w : r.weights) w = u(gen);
  r.weights *= 4 * M_PI / r.weights.sum();
  return r;
}

}  // namespace

TEST_CASE("V coefficient") {
  CHECK(v_coeff(1.5) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(v_coeff(2.0) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("V coefficient matches a Monte Carlo distance integral") {
  // Mean of |x - y|^{2s-2} over independent uniform points.
  std::mt19937_64 gen(42);
  const double s = 5.5;
  const int n = 4'000'000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto a = testing::random_point(gen), b = testing::random_point(gen);
    sum += std::pow((a.cartesian() - b.cartesian()).norm(), 2 * s - 2);
  }
  CHECK(sum / n == doctest::Approx(v_coeff(s)).epsilon(5e-3));
}

TEST_CASE("kernel coefficients at s = 3/2") {
  CHECK(a_coeff(1.5, 0) == doctest::Approx(-4.0 / 3.0));
  CHECK(a_coeff(1.5, 1) == doctest::Approx(4.0 / 15.0).epsilon(1e-15));
  CHECK(a_coeff(1.5, 2) == doctest::Approx(4.0 / 105.0).epsilon(1e-15));
  const auto a = a_coeffs(1.5, 10);
  for (int l = 0; l <= 10; ++l) CHECK(a[l] == a_coeff(1.5, l));
}

TEST_CASE("kernel coefficients are positive on the low branch") {
  for (double s : {1.1, 1.5, 1.9}) {
    const auto a = a_coeffs(s, 200);
    for (int l = 1; l <= 200; ++l) CHECK(a[l] > 0.0);
  }
  // |x-y|^2 = 2 - 2u has only degrees 0 and 1.
  const auto a2 = a_coeffs(2.0, 50);
  CHECK(a2[1] == doctest::Approx(2.0 / 3.0));
  for (int l = 2; l <= 50; ++l) CHECK(a2[l] == 0.0);
}

TEST_CASE("Legendre expansion of the distance kernel reproduces it") {
  // |x-y|^{2s-2} = V - sum_l a_l (2l+1) P_l(u) on the low branch.
  const double s = 1.9;
  const auto a = a_coeffs(s, 20000);
  for (double u : {-0.9, -0.3, 0.2, 0.7}) {
    std::vector<double> p;
    legendre_polynomials(20000, u, p);
    double sum = 0.0;
    for (int l = 1; l <= 20000; ++l) sum += a[l] * (2.0 * l + 1.0) * p[l];
    CHECK(v_coeff(s) - sum == doctest::Approx(std::pow(2 - 2 * u, s - 1)).epsilon(1e-5));
  }
}

TEST_CASE("asymptotic decay of the coefficients") {
  for (double s : {1.3, 1.5, 2.5, 5.5}) {
    const double ratio = a_coeff(s, 2000) / a_asymptote(s, 2000);
    CHECK(ratio == doctest::Approx(1.0).epsilon(1e-2));
  }
  // Sign and size at s = 3/2: Gamma(5/2)/Gamma(-1/2) = -3/8.
  CHECK(a_asymptote(1.5, 100) == doctest::Approx(-(4.0 / 3.0) * (-0.375) * 1e-6).epsilon(1e-12));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(SobolevParams::make(1.0), DomainError);
  CHECK_THROWS_AS(SobolevParams::make(0.5), DomainError);
  CHECK_THROWS_AS(SobolevParams::make(3.0), DomainError);
  CHECK_THROWS_AS(SobolevParams::make(4.0), DomainError);
  CHECK(SobolevParams::make(2.0).boundary_warning);
  CHECK(SobolevParams::make(2.0).L == 0);
  CHECK(SobolevParams::make(2.5).L == 1);
  CHECK(SobolevParams::make(5.5).L == 4);
  QuadratureRule one = equal_rule(PointSet{SpherePoint()});
  CHECK_THROWS_AS(wce_closed(one, 3.0), DomainError);
  CHECK_THROWS_AS(wce_closed_low(one, 2.5), DomainError);
  CHECK_THROWS_AS(wce_closed_high(one, 1.5), DomainError);
}

TEST_CASE("closed form hand cases at s = 3/2") {
  const auto n = SpherePoint::from_cartesian(0, 0, 1);
  const auto s = SpherePoint::from_cartesian(0, 0, -1);
  CHECK(wce_closed(equal_rule(PointSet{n}), 1.5) == doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-12));
  CHECK(wce_closed(equal_rule(PointSet{n, s}), 1.5) == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("a single point has the same error everywhere") {
  // E^2 = V on the low branch. The high branch is compared with the series.
  std::mt19937_64 gen(1);
  const auto p = testing::random_point(gen);
  for (double s : {1.2, 1.5, 2.0}) {
    CHECK(wce_closed(equal_rule(PointSet{p}), s) == doctest::Approx(std::sqrt(v_coeff(s))).epsilon(1e-12));
  }
  const double high = wce_closed(equal_rule(PointSet{p}), 5.5);
  const SeriesResult series = wce_series(equal_rule(PointSet{p}), 5.5, 2000);
  CHECK(high == doctest::Approx(series.e_corrected).epsilon(1e-8));
}

TEST_CASE("closed form and series agree on the tetrahedron") {
  const QuadratureRule tet = equal_rule(testing::tetrahedron(), 2);
  for (double s : {1.3, 1.5, 2.5, 3.5, 5.5}) {
    const SeriesResult r = wce_series(tet, s, 5000);
    CHECK(wce_closed(tet, s) == doctest::Approx(r.e_corrected).epsilon(1e-6));
  }
}

TEST_CASE("closed form and series agree on random positive-weight rules") {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 6; ++trial) {
    const QuadratureRule rule = random_rule(5 + 30 * trial, gen);
    const LegendreMoments m(rule, 5000);
    for (double s : {1.3, 1.5, 1.9, 2.5, 3.5, 5.5}) {
      const double closed = wce_closed(rule, s);
      CHECK(std::abs(closed - wce_series(m, s).e_corrected) / closed < 1e-5);
    }
  }
}

TEST_CASE("partial sums for a single point converge to V") {
  const QuadratureRule one = equal_rule(PointSet{SpherePoint()});
  const double e2 = std::pow(wce_series(one, 1.5, 20000).e_partial, 2);
  CHECK(e2 < 4.0 / 3.0);
  CHECK(e2 == doctest::Approx(4.0 / 3.0).epsilon(1e-3));
  CHECK(std::pow(wce_series(one, 1.5, 200).e_corrected, 2) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("series is monotone in ell_max and the tail bound holds") {
  std::mt19937_64 gen(2);
  const QuadratureRule rule = random_rule(15, gen);
  const LegendreMoments m(rule, 4000);
  for (double s : {1.3, 1.5, 2.5}) {
    const double exact = wce_closed(rule, s);
    double prev = 0.0;
    for (int lmax : {250, 500, 1000, 2000}) {
      const SeriesResult r = wce_series(QuadratureRule(rule), s, lmax);
      CHECK(r.e_partial >= prev);
      prev = r.e_partial;
      CHECK(std::abs(exact - r.e_partial) <= r.tail_bound * (1 + 1e-9) + 1e-14);
    }
    const SeriesResult full = wce_series(m, s);
    CHECK(std::abs(exact - full.e_partial) <= full.tail_bound * (1 + 1e-9) + 1e-14);
  }
}

TEST_CASE("series via harmonics matches the Legendre route") {
  std::mt19937_64 gen(3);
  const QuadratureRule rule = random_rule(10, gen);
  for (double s : {1.5, 2.5}) {
    const double h = wce_series_harmonic(rule, s, 60);
    const double l = wce_series(rule, s, 60).e_partial;
    CHECK(h == doctest::Approx(l).epsilon(1e-10));
  }
}

TEST_CASE("rotating a rule leaves the error unchanged") {
  std::mt19937_64 gen(4);
  QuadratureRule rule = random_rule(25, gen);
  QuadratureRule rot = rule;
  rot.points = rotate(rule.points, rotation_about_axis(Vec3(1, -1, 0.5), 2.2));
  for (double s : {1.5, 5.5}) {
    CHECK(wce_closed(rule, s) == doctest::Approx(wce_closed(rot, s)).epsilon(1e-10));
  }
}

TEST_CASE("kernel symmetry") {
  std::mt19937_64 gen(5);
  for (int i = 0; i < 50; ++i) {
    const auto a = testing::random_point(gen), b = testing::random_point(gen);
    for (double s : {1.5, 2.5, 5.5}) CHECK(wce_kernel(s, a, b) == doctest::Approx(wce_kernel(s, b, a)));
  }
}

TEST_CASE("diagonal tail correction is the exact sum of the remaining terms") {
  // The correction for a single point equals the direct sum of |a_l|(2l+1)
  // over l in (2000, 400000] up to the remote remainder.
  const double s = 1.9;
  const QuadratureRule one = equal_rule(PointSet{SpherePoint()});
  const SeriesResult r = wce_series(one, s, 2000);
  const auto a = a_coeffs(s, 400000);
  double direct = 0.0;
  for (int l = 400000; l > 2000; --l) direct += std::abs(a[l]) * (2.0 * l + 1.0);
  const double remote = std::abs(a[400000]) * 400000.0 * 400000.0 * 2.0 / (2 * s - 2);
  const double corr = r.e_corrected * r.e_corrected - r.e_partial * r.e_partial;
  CHECK(corr == doctest::Approx(direct + remote).epsilon(1e-4));
}

TEST_CASE("rule validation") {
  QuadratureRule bad = equal_rule(testing::tetrahedron());
  bad.weights[0] = -1.0;
  CHECK_THROWS_AS(wce_closed(bad, 1.5), DomainError);
  QuadratureRule sum = equal_rule(testing::tetrahedron());
  sum.weights *= 1.01;
  CHECK_THROWS_AS(wce_closed(sum, 1.5), DomainError);
}
