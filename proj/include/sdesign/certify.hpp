#pragma once

#include "sdesign/geometry.hpp"
#include "sdesign/sphharm.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>

namespace sdesign {

// Points with positive weights; `t` is the claimed algebraic accuracy.
struct QuadratureRule {
  PointSet points;
  Eigen::VectorXd weights;
  int t = 0;

  std::size_t size() const { return points.size(); }
  // Throws DomainError if sizes differ, a weight is not positive, or the
  // weights do not sum to 4pi within `sum_tol`.
  void validate(double sum_tol = 1e-8) const;
};

// Sums over the points of Y_{l,k} for l = 1..t, stored at column l^2+k-1
// minus one (the constant harmonic is dropped).
struct WeylSums {
  Eigen::VectorXd sums;
  double max_abs = 0.0;
};
WeylSums weyl_sums(const PointSet& points, int t);

enum class WeightSystem { Square, LeastSquares, MinimumNorm };

struct WeightSolution {
  Eigen::VectorXd weights;
  // ||Y^T w - sqrt(4pi) e_1||_2
  double residual = 0.0;
  // 1-norm condition estimate of the factorized matrix.
  double condition = 0.0;
  WeightSystem system = WeightSystem::Square;
};

// Solves Y(X)^T w = sqrt(4pi) e_1. Square systems use LU, N < (t+1)^2 a
// least-squares fit, N > (t+1)^2 the minimum-norm solution. Throws
// NotFundamentalError when the condition estimate exceeds `max_condition`.
WeightSolution solve_weights(const PointSet& points, int t, double max_condition = 1e12);

// Smallest eps in [0, 1) with 4pi(1-eps)/N <= w_i <= 4pi/((1-eps)N), N = w.size().
// Throws DomainError if some w_i <= 0.
double epsilon_from_weights(const Eigen::VectorXd& weights);

enum class NormMode { Auto, Exact, Estimate };

struct InverseNorm {
  double value = 0.0;
  // false when `value` comes from the estimator (a lower bound).
  bool exact = true;
};

// ||A^{-1}||_1 (max column sum). Auto is exact up to n = exact_max_n.
InverseNorm one_norm_inverse(const Eigen::MatrixXd& a, NormMode mode = NormMode::Auto,
                             Eigen::Index exact_max_n = 61 * 61);
InverseNorm one_norm_inverse(const DesignMatrix& y, NormMode mode = NormMode::Auto);

// Max absolute column sum.
double one_norm(const Eigen::MatrixXd& a);

// tau = sqrt((2t+1)/(4pi)) (t+1)^3
double tau_constant(int t);

struct PerturbationBound {
  double bound = 0.0;
  double actual = 0.0;  // ||Y(X) - Y(X')||_1 with rows of X' paired to X
  double sigma = 0.0;
};

// N(t+1) sqrt((2t+1)/(4pi)) sigma(X, X') and the measured difference.
// Throws HypothesisError unless sigma(X, X') < rho(X)/2.
PerturbationBound perturbation_bound(const PointSet& x, const PointSet& xp, int t);

struct PointSetCertificate {
  int t = 0;
  std::size_t n = 0;
  double sigma = 0.0;
  double sigma_star_limit = 0.0;  // (1/2) min(1/(tau kappa), rho(X0))
  double tau = 0.0;
  double kappa = 0.0;
  bool kappa_exact = true;
  double eps_lower = 0.0;
  bool hypothesis_ok = false;
  std::string reason;
};

// Lower bound on eps for X near the fundamental t-design X0 (N = (t+1)^2).
// Refusals are reported through hypothesis_ok / reason, not exceptions.
PointSetCertificate certify_point_set(const PointSet& x, const PointSet& x0, int t,
                                      NormMode mode = NormMode::Auto);

struct CertifyOptions {
  NormMode norm_mode = NormMode::Auto;
  // Diagnostics at the centers: eps from solved weights and the sigma of a
  // nearby equal-weight design. The latter costs a Gauss-Newton solve.
  bool center_weights = true;
  bool refine_centers = true;
  int refine_max_t = 60;
};

struct EpsilonCertificate {
  int t = 0;
  std::size_t n = 0;
  double rad = 0.0;
  double rho = 0.0;
  double tau = 0.0;
  double kappa = 0.0;
  bool kappa_exact = true;
  double eps_lower = 0.0;

  bool rad_below_quarter_rho = false;
  bool eps_below_one = false;  // 4 tau rad kappa < 1 and eps_lower < 1
  bool hypothesis_ok = false;
  bool assumes_design_exists = true;
  std::string reason;

  std::optional<double> eps_hat_centers;
  std::optional<double> sigma_refined;
  std::optional<double> eps_sigma_refined;
};

// Certificate for every selection of one point per enclosure. Requires
// N = (t+1)^2 and nonsingular Y at the cap centers (NotFundamentalError
// otherwise). Hypothesis failures are reported, not thrown.
EpsilonCertificate certify_enclosures(const EnclosureSet& set, int t,
                                      const CertifyOptions& options = {});

}  // namespace sdesign
