#include "sdesign/certify.hpp"
#include "sdesign/error.hpp"
#include "support.hpp"

#include <Eigen/QR>
#include <doctest.h>

#include <cmath>
#include <random>

using namespace sdesign;

namespace {

// Inverse by cofactor expansion, independent of any factorization.
Eigen::Matrix4d adjugate_inverse(const Eigen::Matrix4d& a) {
  auto minor3 = [&](int r, int c) {
    double m[3][3];
    for (int i = 0, ii = 0; i < 4; ++i) {
      if (i == r) continue;
      for (int j = 0, jj = 0; j < 4; ++j) {
        if (j == c) continue;
        m[ii][jj++] = a(i, j);
      }
      ++ii;
    }
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  Eigen::Matrix4d cof;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) cof(i, j) = ((i + j) % 2 ? -1.0 : 1.0) * minor3(i, j);
  double det = 0.0;
  for (int j = 0; j < 4; ++j) det += a(0, j) * cof(0, j);
  return cof.transpose() / det;
}

double max_col_sum(const Eigen::MatrixXd& m) {
  double best = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) s += std::abs(m(i, j));
    best = std::max(best, s);
  }
  return best;
}

const PointSet& design10() {
  static const PointSet pts = [] {
    const SearchResult r = testing::square_design(10);
    REQUIRE(r.success);
    return r.rule.points;
  }();
  return pts;
}

}  // namespace

TEST_CASE("Weyl sums vanish on the tetrahedron up to degree 2") {
  const WeylSums w = weyl_sums(testing::tetrahedron(), 2);
  CHECK(w.sums.size() == 8);
  CHECK(w.max_abs < 1e-14);
  CHECK(weyl_sums(testing::tetrahedron(), 3).max_abs > 0.1);
}

TEST_CASE("Weyl sums of a single pole point") {
  const WeylSums w = weyl_sums(PointSet{SpherePoint::from_cartesian(0, 0, 1)}, 2);
  CHECK(w.sums[1] == doctest::Approx(std::sqrt(3.0 / (4 * M_PI))));
  CHECK(w.max_abs == doctest::Approx(std::sqrt(5.0 / (4 * M_PI))));
}

TEST_CASE("weights of the tetrahedron") {
  const WeightSolution w = solve_weights(testing::tetrahedron(), 1);
  CHECK(w.system == WeightSystem::Square);
  for (int i = 0; i < 4; ++i) CHECK(w.weights[i] == doctest::Approx(M_PI).epsilon(1e-13));
  CHECK(w.residual < 1e-13);
  CHECK(epsilon_from_weights(w.weights) < 1e-13);
}

TEST_CASE("square systems on a found design give equal weights") {
  const PointSet& x = design10();
  const WeightSolution w = solve_weights(x, 10);
  CHECK(w.system == WeightSystem::Square);
  for (Eigen::Index i = 0; i < w.weights.size(); ++i) {
    CHECK(w.weights[i] == doctest::Approx(4 * M_PI / 121).epsilon(1e-9));
  }
}

TEST_CASE("least squares and minimum norm systems") {
  std::mt19937_64 gen(1);
  const PointSet many = testing::random_points(30, gen);
  const WeightSolution mn = solve_weights(many, 3);
  CHECK(mn.system == WeightSystem::MinimumNorm);
  CHECK(mn.residual < 1e-12);
  CHECK(mn.weights.sum() == doctest::Approx(4 * M_PI).epsilon(1e-12));

  const PointSet few = testing::random_points(10, gen);
  const WeightSolution ls = solve_weights(few, 3);
  CHECK(ls.system == WeightSystem::LeastSquares);
  CHECK(ls.residual > 0.0);
}

TEST_CASE("coincident points are not fundamental") {
  PointSet x = testing::tetrahedron();
  x[1] = x[0];
  CHECK_THROWS_AS(solve_weights(x, 1), NotFundamentalError);
}

TEST_CASE("epsilon from weights") {
  const double c = 4 * M_PI / 4;
  Eigen::VectorXd w(4);
  w << c, c, c, c;
  CHECK(epsilon_from_weights(w) == 0.0);
  w << 0.9 * c, c, c, c / 0.9;
  CHECK(epsilon_from_weights(w) == doctest::Approx(0.1).epsilon(1e-14));
  w << 0.8 * c, c, c, c;
  CHECK(epsilon_from_weights(w) == doctest::Approx(0.2).epsilon(1e-14));
  w << c, c, c, 2 * c;
  CHECK(epsilon_from_weights(w) == doctest::Approx(0.5).epsilon(1e-14));
  w << c, c, c, 0.0;
  CHECK_THROWS_AS(epsilon_from_weights(w), DomainError);
}

TEST_CASE("inverse norm against an explicit inverse") {
  const DesignMatrix y = design_matrix(testing::tetrahedron(), 1);
  const Eigen::Matrix4d inv = adjugate_inverse(Eigen::Matrix4d(y.values));
  const InverseNorm k = one_norm_inverse(y);
  CHECK(k.exact);
  CHECK(k.value == doctest::Approx(max_col_sum(inv)).epsilon(1e-12));
  const InverseNorm est = one_norm_inverse(Eigen::MatrixXd(y.values), NormMode::Estimate);
  CHECK_FALSE(est.exact);
  CHECK(est.value <= k.value * (1 + 1e-12));
}

TEST_CASE("inverse norm of scaled identity") {
  for (double c : {2.0, -0.5, 1e3}) {
    const Eigen::MatrixXd a = c * Eigen::MatrixXd::Identity(7, 7);
    CHECK(one_norm_inverse(a).value == doctest::Approx(1.0 / std::abs(c)));
    CHECK(one_norm_inverse(a, NormMode::Estimate).value == doctest::Approx(1.0 / std::abs(c)));
  }
  CHECK(one_norm(Eigen::MatrixXd::Identity(3, 3) * -4.0) == 4.0);
}

TEST_CASE("the estimator never exceeds the exact norm") {
  const DesignMatrix y = design_matrix(design10(), 10);
  const double exact = one_norm_inverse(y, NormMode::Exact).value;
  const double est = one_norm_inverse(y, NormMode::Estimate).value;
  CHECK(est <= exact * (1 + 1e-10));
  CHECK(est >= 0.1 * exact);

  std::mt19937_64 gen(2);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd a(15, 15);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = nd(gen);
    const double ex = max_col_sum(a.colPivHouseholderQr().inverse());
    CHECK(one_norm_inverse(a, NormMode::Exact).value == doctest::Approx(ex).epsilon(1e-8));
    CHECK(one_norm_inverse(a, NormMode::Estimate).value <= ex * (1 + 1e-10));
  }
  CHECK_THROWS_AS(one_norm_inverse(Eigen::MatrixXd::Zero(3, 3)), NotFundamentalError);
}

TEST_CASE("tau constant") {
  CHECK(tau_constant(1) == doctest::Approx(std::sqrt(3 / (4 * M_PI)) * 8));
  CHECK(tau_constant(10) == doctest::Approx(std::sqrt(21 / (4 * M_PI)) * 1331));
}

TEST_CASE("perturbation bound") {
  const PointSet tet = testing::tetrahedron();
  const PerturbationBound same = perturbation_bound(tet, tet, 1);
  CHECK(same.bound == 0.0);
  CHECK(same.actual == 0.0);

  const PointSet rot = rotate(tet, rotation_about_axis(Vec3(0, 0, 1), 0.05));
  const PerturbationBound r = perturbation_bound(tet, rot, 1);
  CHECK(r.actual <= r.bound);
  CHECK(r.actual > 0.0);

  std::mt19937_64 gen(3);
  const PointSet& x = design10();
  const double rho = separation(x);
  std::uniform_real_distribution<double> frac(0.0, 0.49);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<SpherePoint> moved;
    for (const auto& p : x) moved.push_back(testing::move_by(p, frac(gen) * rho, gen));
    const PerturbationBound b = perturbation_bound(x, PointSet(moved), 10);
    CHECK(b.actual <= b.bound);
  }

  std::vector<SpherePoint> far(x.points());
  far[0] = testing::move_by(x[0], 0.6 * rho, gen);
  CHECK_THROWS_AS(perturbation_bound(x, PointSet(far), 10), HypothesisError);
}

TEST_CASE("point set certificate") {
  const PointSet tet = testing::tetrahedron();
  const PointSetCertificate zero = certify_point_set(tet, tet, 1);
  CHECK(zero.hypothesis_ok);
  CHECK(zero.eps_lower == 0.0);

  // Move one point by the sigma that makes tau sigma kappa = 0.1.
  const double kappa = one_norm_inverse(design_matrix(tet, 1)).value;
  const double sigma = 0.1 / (tau_constant(1) * kappa);
  std::mt19937_64 gen(4);
  std::vector<SpherePoint> moved(tet.points());
  moved[2] = testing::move_by(tet[2], sigma, gen);
  const PointSetCertificate c = certify_point_set(PointSet(moved), tet, 1);
  REQUIRE(c.hypothesis_ok);
  CHECK(c.sigma == doctest::Approx(sigma).epsilon(1e-10));
  CHECK(c.eps_lower == doctest::Approx(0.1 / 0.9).epsilon(1e-9));

  // The actual weights of the moved set stay within the certified band.
  const WeightSolution w = solve_weights(PointSet(moved), 1);
  CHECK(epsilon_from_weights(w.weights) <= c.eps_lower);

  moved[2] = testing::move_by(tet[2], 6 * sigma, gen);
  const PointSetCertificate refused = certify_point_set(PointSet(moved), tet, 1);
  CHECK_FALSE(refused.hypothesis_ok);
  CHECK_FALSE(refused.reason.empty());

  CHECK_THROWS_AS(certify_point_set(tet, PointSet{tet[0], tet[1]}, 1), DomainError);
}

TEST_CASE("enclosure certificate") {
  const PointSet& x = design10();
  const int t = 10;
  auto caps_of = [&](double r) {
    std::vector<SphericalCap> caps;
    for (const auto& p : x) caps.push_back({p, r});
    return EnclosureSet::from_caps(caps);
  };
  CertifyOptions opts;
  opts.refine_centers = false;

  const EpsilonCertificate z = certify_enclosures(caps_of(0.0), t, opts);
  CHECK(z.hypothesis_ok);
  CHECK(z.eps_lower == 0.0);

  const double kappa = one_norm_inverse(design_matrix(x, t)).value;
  const double r = 0.01 / (tau_constant(t) * kappa);
  const EpsilonCertificate c = certify_enclosures(caps_of(r), t, opts);
  REQUIRE(c.hypothesis_ok);
  const double a = tau_constant(t) * r * kappa;
  CHECK(c.eps_lower == doctest::Approx(2 * a / (1 - 4 * a)).epsilon(1e-12));
  REQUIRE(c.eps_hat_centers.has_value());
  CHECK(*c.eps_hat_centers < 1e-8);

  // Any selection of one point per cap has weights inside the band.
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<SpherePoint> sel;
    for (const auto& p : x) sel.push_back(testing::move_by(p, frac(gen) * r, gen));
    const WeightSolution w = solve_weights(PointSet(sel), t);
    CHECK(epsilon_from_weights(w.weights) <= c.eps_lower);
  }

  // Larger radius, larger bound.
  const EpsilonCertificate c2 = certify_enclosures(caps_of(2 * r), t, opts);
  CHECK(c2.eps_lower > c.eps_lower);

  const EpsilonCertificate big = certify_enclosures(caps_of(0.3 * separation(x)), t, opts);
  CHECK_FALSE(big.hypothesis_ok);
  CHECK_FALSE(big.rad_below_quarter_rho);

  std::vector<SphericalCap> fewer;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) fewer.push_back({x[i], r});
  CHECK_THROWS_AS(certify_enclosures(EnclosureSet::from_caps(fewer), t, opts), DomainError);
}

TEST_CASE("enclosure certificate refines centers towards an equal-weight design") {
  const PointSet& x = design10();
  std::mt19937_64 gen(6);
  std::vector<SphericalCap> caps;
  for (const auto& p : x) caps.push_back({testing::move_by(p, 1e-9, gen), 1e-12});
  const EpsilonCertificate c = certify_enclosures(EnclosureSet::from_caps(caps), 10);
  REQUIRE(c.sigma_refined.has_value());
  CHECK(*c.sigma_refined < 1e-7);
  REQUIRE(c.eps_sigma_refined.has_value());
  CHECK(*c.eps_sigma_refined < 1e-3);
}
