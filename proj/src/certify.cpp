#include "sdesign/certify.hpp"

#include "sdesign/error.hpp"
#include "sdesign/search.hpp"

#include <Eigen/LU>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sdesign {

namespace {

const double kSqrtFourPi = std::sqrt(kFourPi);

double weight_residual(const RowMatrix& y, const Eigen::VectorXd& w) {
  Eigen::VectorXd r = y.transpose() * w;
  r[0] -= kSqrtFourPi;
  return r.norm();
}

// Hager's method with Higham's extra test vector; a lower bound on ||A^{-1}||_1.
double estimate_inverse_norm(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu, Eigen::Index n) {
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  double est = 0.0;
  Eigen::Index last_j = -1;
  for (int iter = 0; iter < 5; ++iter) {
    const Eigen::VectorXd y = lu.solve(x);
    const double y1 = y.lpNorm<1>();
    if (iter > 0 && y1 <= est) {
      est = std::max(est, y1);
      break;
    }
    est = y1;
    Eigen::VectorXd xi = y.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
    const Eigen::VectorXd z = lu.transpose().solve(xi);
    Eigen::Index j = 0;
    const double zmax = z.cwiseAbs().maxCoeff(&j);
    if (zmax <= z.dot(x) || j == last_j) break;
    x.setZero();
    x[j] = 1.0;
    last_j = j;
  }
  if (n > 1) {
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double mag = 1.0 + static_cast<double>(i) / static_cast<double>(n - 1);
      b[i] = (i % 2 == 0) ? mag : -mag;
    }
    const Eigen::VectorXd y = lu.solve(b);
    est = std::max(est, 2.0 * y.lpNorm<1>() / (3.0 * static_cast<double>(n)));
  }
  return est;
}

}  // namespace

void QuadratureRule::validate(double sum_tol) const {
  if (points.empty()) throw DomainError("quadrature rule has no points");
  if (static_cast<std::size_t>(weights.size()) != points.size()) {
    throw DomainError("quadrature rule: " + std::to_string(points.size()) + " points but " +
                      std::to_string(weights.size()) + " weights");
  }
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0)) {
      throw DomainError("quadrature weight " + std::to_string(i) + " is not positive");
    }
  }
  const double sum = weights.sum();
  if (std::abs(sum - kFourPi) > sum_tol) {
    throw DomainError("quadrature weights sum to " + std::to_string(sum) + ", expected 4pi");
  }
}

WeylSums weyl_sums(const PointSet& points, int t) {
  if (t < 1) throw DomainError("weyl_sums: need t >= 1");
  const DesignMatrix y = design_matrix(points, t);
  WeylSums out;
  out.sums = y.values.colwise().sum().transpose().tail(y.cols() - 1);
  out.max_abs = out.sums.cwiseAbs().maxCoeff();
  return out;
}

WeightSolution solve_weights(const PointSet& points, int t, double max_condition) {
  const DesignMatrix y = design_matrix(points, t);
  const Eigen::Index n = y.rows();
  const Eigen::Index d = y.cols();
  const Eigen::MatrixXd a = y.values.transpose();  // d x N
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
  rhs[0] = kSqrtFourPi;

  WeightSolution sol;
  if (n == d) {
    sol.system = WeightSystem::Square;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    const double rc = lu.rcond();
    sol.condition = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    if (!(sol.condition <= max_condition)) {
      throw NotFundamentalError("design matrix is not a fundamental system (condition estimate " +
                                std::to_string(sol.condition) + ")");
    }
    sol.weights = lu.solve(rhs);
  } else if (n < d) {
    sol.system = WeightSystem::LeastSquares;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    const auto diag = qr.matrixR().diagonal().cwiseAbs();
    const double big = diag.maxCoeff();
    const double small = diag.tail(std::min(n, d)).minCoeff();
    sol.condition = small > 0.0 ? big / small : std::numeric_limits<double>::infinity();
    if (!(sol.condition <= max_condition)) {
      throw NotFundamentalError("design matrix columns are numerically dependent (condition " +
                                std::to_string(sol.condition) + ")");
    }
    sol.weights = qr.solve(rhs);
  } else {
    sol.system = WeightSystem::MinimumNorm;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
    if (cod.rank() < d) {
      throw NotFundamentalError("design matrix has rank " + std::to_string(cod.rank()) + " < " +
                                std::to_string(d));
    }
    const auto diag = cod.matrixT().diagonal().cwiseAbs();
    sol.condition = diag.maxCoeff() / diag.head(d).minCoeff();
    if (!(sol.condition <= max_condition)) {
      throw NotFundamentalError("design matrix rows are numerically dependent (condition " +
                                std::to_string(sol.condition) + ")");
    }
    sol.weights = cod.solve(rhs);
  }
  sol.residual = weight_residual(y.values, sol.weights);
  return sol;
}

double epsilon_from_weights(const Eigen::VectorXd& weights) {
  if (weights.size() == 0) throw DomainError("epsilon_from_weights: no weights");
  const double n = static_cast<double>(weights.size());
  double eps = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    if (!(w > 0.0)) {
      throw DomainError("weight " + std::to_string(i) +
                        " is not positive: not a t_eps-design for any eps < 1");
    }
    const double r = n * w / kFourPi;
    eps = std::max({eps, 1.0 - r, 1.0 - 1.0 / r});
  }
  return eps;
}

double one_norm(const Eigen::MatrixXd& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

InverseNorm one_norm_inverse(const Eigen::MatrixXd& a, NormMode mode, Eigen::Index exact_max_n) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw DomainError("one_norm_inverse needs a nonempty square matrix");
  }
  const Eigen::Index n = a.rows();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const double rc = lu.rcond();
  if (!(rc > 0.0) || !std::isfinite(rc)) throw NotFundamentalError("matrix is singular");
  const bool exact = mode == NormMode::Exact || (mode == NormMode::Auto && n <= exact_max_n);
  InverseNorm out;
  out.exact = exact;
  if (exact) {
    out.value = one_norm(lu.inverse());
  } else {
    out.value = estimate_inverse_norm(lu, n);
  }
  if (!std::isfinite(out.value)) throw NotFundamentalError("inverse norm is not finite");
  return out;
}

InverseNorm one_norm_inverse(const DesignMatrix& y, NormMode mode) {
  if (y.rows() != y.cols()) {
    throw DomainError("one_norm_inverse: design matrix is " + std::to_string(y.rows()) + " x " +
                      std::to_string(y.cols()) + ", need N = (t+1)^2");
  }
  return one_norm_inverse(Eigen::MatrixXd(y.values), mode);
}

double tau_constant(int t) {
  const double tp1 = t + 1.0;
  return std::sqrt((2.0 * t + 1.0) / kFourPi) * tp1 * tp1 * tp1;
}

PerturbationBound perturbation_bound(const PointSet& x, const PointSet& xp, int t) {
  PerturbationBound out;
  out.sigma = hausdorff(x, xp);
  const auto pairing = nearest_pairing(x, xp);
  std::vector<SpherePoint> ordered;
  ordered.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) ordered.push_back(xp[pairing[i]]);
  const DesignMatrix a = design_matrix(x, t);
  const DesignMatrix b = design_matrix(PointSet(std::move(ordered)), t);
  out.actual = one_norm(Eigen::MatrixXd(a.values - b.values));
  out.bound = static_cast<double>(x.size()) * (t + 1.0) * std::sqrt((2.0 * t + 1.0) / kFourPi) *
              out.sigma;
  return out;
}

PointSetCertificate certify_point_set(const PointSet& x, const PointSet& x0, int t,
                                      NormMode mode) {
  PointSetCertificate c;
  c.t = t;
  c.n = x0.size();
  if (x0.size() != static_cast<std::size_t>(harmonic_dimension(t))) {
    throw DomainError("reference design must have (t+1)^2 points");
  }
  if (x.size() != x0.size()) {
    c.reason = "point sets differ in size";
    return c;
  }
  c.tau = tau_constant(t);
  const InverseNorm k = one_norm_inverse(design_matrix(x0, t), mode);
  c.kappa = k.value;
  c.kappa_exact = k.exact;
  c.sigma = hausdorff(x, x0);
  c.sigma_star_limit = 0.5 * std::min(1.0 / (c.tau * c.kappa), separation(x0));
  if (!(c.sigma < c.sigma_star_limit)) {
    c.reason = "sigma(X, X0) is not below (1/2) min(1/(tau kappa), rho(X0))";
    return c;
  }
  const double a = c.tau * c.sigma * c.kappa;
  c.eps_lower = a / (1.0 - a);
  c.hypothesis_ok = true;
  return c;
}

EpsilonCertificate certify_enclosures(const EnclosureSet& set, int t,
                                      const CertifyOptions& options) {
  EpsilonCertificate c;
  c.t = t;
  c.n = set.size();
  if (set.size() != static_cast<std::size_t>(harmonic_dimension(t))) {
    throw DomainError("enclosure set has " + std::to_string(set.size()) +
                      " elements, need (t+1)^2 = " + std::to_string(harmonic_dimension(t)));
  }
  const EnclosureStats stats = enclosure_stats(set);
  c.rad = stats.rad;
  c.rho = stats.rho;
  c.tau = tau_constant(t);

  const PointSet centers = set.centers();
  const DesignMatrix y = design_matrix(centers, t);
  const Eigen::Index exact_max_n =
      options.norm_mode == NormMode::Auto ? harmonic_dimension(60) : y.rows();
  const InverseNorm k = one_norm_inverse(Eigen::MatrixXd(y.values), options.norm_mode, exact_max_n);
  c.kappa = k.value;
  c.kappa_exact = k.exact;

  const double a = c.tau * c.rad * c.kappa;
  c.rad_below_quarter_rho = c.rad < 0.25 * c.rho;
  if (4.0 * a < 1.0) {
    c.eps_lower = 2.0 * a / (1.0 - 4.0 * a);
    c.eps_below_one = c.eps_lower < 1.0;
  } else {
    c.eps_lower = std::numeric_limits<double>::infinity();
  }
  c.hypothesis_ok = c.rad_below_quarter_rho && c.eps_below_one;
  if (!c.rad_below_quarter_rho) {
    c.reason = stats.overlapping ? "overlapping enclosures (rho < 0)" : "rad is not below rho/4";
  } else if (!c.eps_below_one) {
    c.reason = "tau * rad * kappa too large: no eps < 1 satisfies the bound";
  }

  if (options.center_weights) {
    try {
      c.eps_hat_centers = epsilon_from_weights(solve_weights(centers, t).weights);
    } catch (const Error&) {
      c.eps_hat_centers.reset();
    }
  }
  if (options.refine_centers && t <= options.refine_max_t) {
    const RefineResult r = refine_equal_weight_design(centers, t);
    if (r.converged) {
      c.sigma_refined = hausdorff(centers, r.points);
      const double b = c.tau * *c.sigma_refined * c.kappa;
      if (4.0 * b < 1.0) c.eps_sigma_refined = 2.0 * b / (1.0 - 4.0 * b);
    }
  }
  return c;
}

}  // namespace sdesign
