#include "sdesign/approx.hpp"

#include "sdesign/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace sdesign {

Eigen::VectorXd laplace_beltrami_betas(int L) {
  if (L < 0) throw DomainError("negative degree");
  Eigen::VectorXd beta(harmonic_dimension(L));
  for (int l = 0; l <= L; ++l) beta.segment(l * l, 2 * l + 1).setConstant(l * (l + 1.0));
  return beta;
}

void RegularizationProblem::validate() const {
  rule.validate();
  if (L < 0) throw DomainError("approximation degree must be nonnegative");
  if (static_cast<std::size_t>(samples.size()) != rule.size()) {
    throw DomainError("sample count does not match the number of points");
  }
  if (beta.size() != harmonic_dimension(L)) throw DomainError("beta must have (L+1)^2 entries");
  if ((beta.array() < 0.0).any() || !beta.allFinite()) {
    throw DomainError("beta entries must be finite and nonnegative");
  }
}

Eigen::VectorXd data_coefficients(const RegularizationProblem& problem) {
  problem.validate();
  const DesignMatrix y = design_matrix(problem.rule.points, problem.L);
  return y.values.transpose() * problem.rule.weights.cwiseProduct(problem.samples);
}

double gram_deviation(const QuadratureRule& rule, int L) {
  const DesignMatrix y = design_matrix(rule.points, L);
  const Eigen::MatrixXd h =
      y.values.transpose() * rule.weights.asDiagonal() * y.values;
  return (h - Eigen::MatrixXd::Identity(h.rows(), h.cols())).cwiseAbs().maxCoeff();
}

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& s, double lambda,
                               const Eigen::VectorXd& beta) {
  if (!(lambda >= 0.0)) throw DomainError("lambda must be nonnegative");
  Eigen::VectorXd a(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double lb = lambda * beta[i];
    a[i] = std::max(0.0, s[i] - lb) + std::min(0.0, s[i] + lb);
  }
  return a;
}

Eigen::VectorXd ridge_shrink(const Eigen::VectorXd& s, double lambda, const Eigen::VectorXd& beta) {
  if (!(lambda >= 0.0)) throw DomainError("lambda must be nonnegative");
  return s.array() / (1.0 + 2.0 * lambda * beta.array().square());
}

namespace {

void require_gram(const RegularizationProblem& p) {
  const double dev = gram_deviation(p.rule, p.L);
  if (!(dev <= p.gram_tolerance)) {
    throw HypothesisError("Gram matrix deviates from the identity by " + std::to_string(dev) +
                          " (tolerance " + std::to_string(p.gram_tolerance) +
                          "); the closed-form solution does not apply");
  }
}

}  // namespace

Eigen::VectorXd solve_l1(const RegularizationProblem& problem, double lambda) {
  require_gram(problem);
  return soft_threshold(data_coefficients(problem), lambda, problem.beta);
}

Eigen::VectorXd solve_l2(const RegularizationProblem& problem, double lambda) {
  require_gram(problem);
  return ridge_shrink(data_coefficients(problem), lambda, problem.beta);
}

bool subgradient_inclusion(const Eigen::VectorXd& alpha, const Eigen::VectorXd& s, double lambda,
                           const Eigen::VectorXd& beta, double tol) {
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    const double lb = lambda * beta[i];
    const double g = s[i] - alpha[i];  // must lie in lb * d|alpha_i|
    if (alpha[i] > 0.0) {
      if (std::abs(g - lb) > tol) return false;
    } else if (alpha[i] < 0.0) {
      if (std::abs(g + lb) > tol) return false;
    } else if (std::abs(g) > lb + tol) {
      return false;
    }
  }
  return true;
}

int degree_from_length(Eigen::Index length) {
  const int L = static_cast<int>(std::lround(std::sqrt(static_cast<double>(length)))) - 1;
  if (L < 0 || harmonic_dimension(L) != length) {
    throw DomainError("coefficient vector length " + std::to_string(length) +
                      " is not a perfect square");
  }
  return L;
}

Eigen::VectorXd evaluate_poly(const Eigen::VectorXd& alpha, const PointSet& points) {
  const int L = degree_from_length(alpha.size());
  Eigen::VectorXd out(static_cast<Eigen::Index>(points.size()));
  Eigen::VectorXd row(alpha.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    eval_harmonics(L, points[i], row);
    out[static_cast<Eigen::Index>(i)] = row.dot(alpha);
  }
  return out;
}

double weighted_residual(const RegularizationProblem& problem, const Eigen::VectorXd& alpha) {
  const Eigen::VectorXd p = evaluate_poly(alpha, problem.rule.points);
  return 0.5 * problem.rule.weights.dot((p - problem.samples).array().square().matrix());
}

std::size_t sparsity(const Eigen::VectorXd& alpha) {
  return static_cast<std::size_t>((alpha.array() == 0.0).count());
}

ErrorNorms error_norms(const Eigen::VectorXd& truth, const Eigen::VectorXd& approx) {
  if (truth.size() == 0 || truth.size() != approx.size()) {
    throw DomainError("error_norms: empty or mismatched value vectors");
  }
  const Eigen::VectorXd dev = truth - approx;
  ErrorNorms e;
  e.uniform = dev.cwiseAbs().maxCoeff();
  e.l2 = std::sqrt(kFourPi / static_cast<double>(dev.size()) * dev.squaredNorm());
  return e;
}

double EqualAreaCell::area() const {
  return (std::cos(theta.lo) - std::cos(theta.hi)) * phi.width();
}

std::vector<EqualAreaCell> equal_area_cells(int n) {
  if (n < 1) throw DomainError("equal_area_cells: need n >= 1");
  constexpr double two_pi = 2.0 * kPi;
  if (n == 1) return {{{0.0, kPi}, {0.0, two_pi}}};
  if (n == 2) return {{{0.0, kPi / 2}, {0.0, two_pi}}, {{kPi / 2, kPi}, {0.0, two_pi}}};

  const double nn = n;
  const double cap = 2.0 * std::asin(1.0 / std::sqrt(nn));
  const double ideal = std::sqrt(kFourPi / nn);
  const int collars = std::max(1, static_cast<int>(std::lround((kPi - 2.0 * cap) / ideal)));
  const double fitting = (kPi - 2.0 * cap) / collars;

  // Cells per collar, rounding with carried discrepancy.
  std::vector<int> counts(collars);
  double carry = 0.0;
  for (int i = 0; i < collars; ++i) {
    const double a = cap + i * fitting;
    const double b = a + fitting;
    const double y = 2.0 * kPi * (std::cos(a) - std::cos(b)) / (kFourPi / nn);
    counts[i] = static_cast<int>(std::lround(y + carry));
    carry += y - counts[i];
  }

  std::vector<EqualAreaCell> cells;
  cells.reserve(static_cast<std::size_t>(n));
  cells.push_back({{0.0, cap}, {0.0, two_pi}});
  int before = 1;
  double lo = cap;
  for (int i = 0; i < collars; ++i) {
    const int m = counts[i];
    before += m;
    // Exact colatitude enclosing `before` cells of area 4pi/n.
    const double hi = (i + 1 == collars) ? kPi - cap
                                         : std::acos(std::clamp(1.0 - 2.0 * before / nn, -1.0, 1.0));
    for (int j = 0; j < m; ++j) {
      cells.push_back({{lo, hi}, {j * two_pi / m, (j + 1) * two_pi / m}});
    }
    lo = hi;
  }
  cells.push_back({{kPi - cap, kPi}, {0.0, two_pi}});
  if (static_cast<int>(cells.size()) != n) {
    throw NumericalError("equal-area partition produced " + std::to_string(cells.size()) +
                         " cells for n = " + std::to_string(n));
  }
  return cells;
}

PointSet equal_area_grid(int n) {
  const auto cells = equal_area_cells(n);
  std::vector<SpherePoint> pts;
  pts.reserve(cells.size());
  for (const auto& c : cells) {
    if (c.theta.lo == 0.0) {
      pts.push_back(SpherePoint::from_cartesian(0.0, 0.0, 1.0));
    } else if (c.theta.hi == kPi) {
      pts.push_back(SpherePoint::from_cartesian(0.0, 0.0, -1.0));
    } else {
      pts.push_back(SpherePoint::from_spherical(c.theta.mid(), c.phi.mid()));
    }
  }
  return PointSet(std::move(pts));
}

double franke(const SpherePoint& p) {
  const double x = p.x(), y = p.y(), z = p.z();
  auto sq = [](double v) { return v * v; };
  return 0.75 * std::exp(-sq(9 * x - 2) / 4 - sq(9 * y - 2) / 4 - sq(9 * z - 2) / 4) +
         0.75 * std::exp(-sq(9 * x + 1) / 49 - (9 * y + 1) / 10 - (9 * z + 1) / 10) +
         0.5 * std::exp(-sq(9 * x - 7) / 4 - sq(9 * y - 3) / 4 - sq(9 * z - 5) / 4) -
         0.2 * std::exp(-sq(9 * x - 4) - sq(9 * y - 7) - sq(9 * z - 5));
}

double cap_bump(const SpherePoint& x, const SpherePoint& center, double r, double height) {
  if (!(r > 0.0 && r < kPi)) throw DomainError("cap radius must lie in (0, pi)");
  if (!(height > 0.0)) throw DomainError("cap height must be positive");
  const double d = geodesic_dist(center, x);
  if (d > r) return 0.0;
  return height * std::cos(kPi * d / (2.0 * r));
}

CapConfig default_cap() {
  return {SpherePoint::from_cartesian(-0.5, -0.5, std::sqrt(0.5)), 0.5, 1.0};
}

double franke_cap(const SpherePoint& x, const CapConfig& cap) {
  return franke(x) + cap_bump(x, cap.center, cap.r, cap.height);
}

Eigen::VectorXd add_noise(const Eigen::VectorXd& values, double delta, std::uint64_t seed) {
  if (!(delta >= 0.0)) throw DomainError("noise level must be nonnegative");
  std::mt19937_64 gen(seed);
  Eigen::VectorXd out = values;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    // 53 random bits -> [0, 1); spelled out so the stream is portable.
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    out[i] += delta * (2.0 * u - 1.0);
  }
  return out;
}

std::vector<double> log_lambda_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw DomainError("lambda grid needs lo <= hi and step > 0");
  std::vector<double> grid;
  const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-3)) + 1;
  for (int i = 0; i < count; ++i) grid.push_back(std::pow(10.0, lo + i * step));
  return grid;
}

}  // namespace sdesign
