#include "sdesign/search.hpp"
#include "sdesign/wce.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace sdesign;

namespace {

// Independent check: the weighted sums of every harmonic of degree 1..t vanish.
double weyl_residual(const QuadratureRule& rule, int t) {
  const DesignMatrix y = design_matrix(rule.points, t);
  Eigen::VectorXd m = y.values.transpose() * rule.weights;
  m[0] -= std::sqrt(4 * M_PI);
  return m.norm();
}

}  // namespace

TEST_CASE("a perturbed tetrahedron converges to a 1-design") {
  std::mt19937_64 gen(1);
  std::vector<SpherePoint> start;
  for (const auto& p : testing::tetrahedron()) start.push_back(testing::move_by(p, 0.2, gen));
  SearchConfig cfg;
  cfg.t = 1;
  cfg.n = 4;
  cfg.initial = PointSet(start);
  const SearchResult r = find_design(cfg);
  REQUIRE(r.success);
  CHECK(r.residual < 1e-10);
  CHECK(weyl_residual(r.rule, 1) < 1e-10);
  CHECK(r.eps_hat < 1e-12);
}

TEST_CASE("weighted designs respect the epsilon box") {
  SearchConfig cfg;
  cfg.t = 3;
  cfg.epsilon = 0.1;
  cfg.n = 8;
  cfg.seed = 2;
  const SearchResult r = find_design(cfg);
  REQUIRE(r.success);
  CHECK(weyl_residual(r.rule, 3) < 1e-9);
  const double lo = 4 * M_PI * 0.9 / 8, hi = 4 * M_PI / (0.9 * 8);
  for (double w : r.rule.weights) {
    CHECK(w >= lo * (1 - 1e-12));
    CHECK(w <= hi * (1 + 1e-12));
  }
  CHECK(r.eps_hat <= 0.1 + 1e-12);
  CHECK(r.rule.weights.sum() == doctest::Approx(4 * M_PI).epsilon(1e-10));
}

TEST_CASE("equal-weight search at t = 5") {
  SearchConfig cfg;
  cfg.t = 5;
  cfg.n = 36;
  cfg.seed = 7;
  const SearchResult r = find_design(cfg);
  REQUIRE(r.success);
  CHECK(weyl_residual(r.rule, 5) < 1e-9);
  CHECK(separation(r.rule.points) > 0.1);
}

TEST_CASE("too few points report failure without throwing") {
  SearchConfig cfg;
  cfg.t = 3;
  cfg.n = 4;
  cfg.restarts = 2;
  SearchResult r;
  CHECK_NOTHROW(r = find_design(cfg));
  CHECK_FALSE(r.success);
  CHECK(r.residual > 1e-3);
  CHECK_FALSE(r.message.empty());
}

TEST_CASE("search is deterministic for a fixed seed") {
  SearchConfig cfg;
  cfg.t = 4;
  cfg.n = 14;
  cfg.seed = 5;
  const SearchResult a = find_design(cfg), b = find_design(cfg);
  REQUIRE(a.rule.size() == b.rule.size());
  for (std::size_t i = 0; i < a.rule.size(); ++i) CHECK(a.rule.points[i] == b.rule.points[i]);
}

TEST_CASE("scan finds small minimal point counts") {
  SearchConfig cfg;
  cfg.t = 1;
  cfg.restarts = 3;
  const ScanResult r = minimal_n_scan(cfg, 1, 6);
  REQUIRE(r.n.has_value());
  CHECK(*r.n <= 4);
  CHECK(*r.n >= 2);
  CHECK(r.best.success);
  CHECK(r.entries.back().success);

  cfg.t = 2;
  const ScanResult r2 = minimal_n_scan(cfg, 4, 8);
  REQUIRE(r2.n.has_value());
  CHECK(*r2.n <= 6);
}

TEST_CASE("scan brackets") {
  for (int t = 1; t <= 20; ++t) {
    CHECK(scan_lower_bound(t, 0.0) <= scan_upper_bound(t));
    CHECK(scan_lower_bound(t, 0.1) >= 2);
  }
}

TEST_CASE("Gauss-Newton refinement returns to an equal-weight design") {
  SearchConfig cfg;
  cfg.t = 5;
  cfg.n = 36;
  cfg.seed = 7;
  const SearchResult d = find_design(cfg);
  REQUIRE(d.success);
  std::mt19937_64 gen(3);
  std::vector<SpherePoint> moved;
  for (const auto& p : d.rule.points) moved.push_back(testing::move_by(p, 1e-4, gen));
  const RefineResult r = refine_equal_weight_design(PointSet(moved), 5);
  CHECK(r.converged);
  CHECK(r.residual < 1e-10);
  CHECK(hausdorff(r.points, PointSet(moved)) < 1e-3);
  QuadratureRule q;
  q.points = r.points;
  q.weights = Eigen::VectorXd::Constant(36, 4 * M_PI / 36);
  CHECK(weyl_residual(q, 5) < 1e-9);
}

TEST_CASE("worst-case error falls as designs gain strength") {
  double prev = 1e9;
  for (int t : {2, 4, 6}) {
    SearchConfig cfg;
    cfg.t = t;
    cfg.n = (t + 1) * (t + 1);
    cfg.seed = 9;
    const SearchResult r = find_design(cfg);
    REQUIRE(r.success);
    const double e = wce_closed(r.rule, 1.5);
    CHECK(e < prev);
    prev = e;
  }
}
