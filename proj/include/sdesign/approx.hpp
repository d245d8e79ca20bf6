#pragma once

#include "sdesign/certify.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace sdesign {

inline constexpr double kDefaultGramTolerance = 1e-6;

// beta_{l,k} = l(l+1), one entry per harmonic column up to degree L.
Eigen::VectorXd laplace_beltrami_betas(int L);

struct RegularizationProblem {
  QuadratureRule rule;       // weights act as the data weights mu_j
  Eigen::VectorXd samples;   // f^delta(x_j)
  int L = 0;
  Eigen::VectorXd beta;      // length (L+1)^2, nonnegative
  double gram_tolerance = kDefaultGramTolerance;

  void validate() const;
};

// s_{l,k} = sum_i w_i Y_{l,k}(x_i) f(x_i).
Eigen::VectorXd data_coefficients(const RegularizationProblem& problem);

// max |Y_L^T W Y_L - I|.
double gram_deviation(const QuadratureRule& rule, int L);

// Coordinatewise maps, valid when the Gram matrix is the identity.
Eigen::VectorXd soft_threshold(const Eigen::VectorXd& s, double lambda, const Eigen::VectorXd& beta);
Eigen::VectorXd ridge_shrink(const Eigen::VectorXd& s, double lambda, const Eigen::VectorXd& beta);

// Minimizers of 1/2 ||W^{1/2}(Y a - f)||^2 + lambda ||D a||_1 (resp. ||D a||_2^2).
// Throw HypothesisError if the Gram deviation exceeds the tolerance.
Eigen::VectorXd solve_l1(const RegularizationProblem& problem, double lambda);
Eigen::VectorXd solve_l2(const RegularizationProblem& problem, double lambda);

// Is 0 in a - s + lambda beta d|a| for every coordinate?
bool subgradient_inclusion(const Eigen::VectorXd& alpha, const Eigen::VectorXd& s, double lambda,
                           const Eigen::VectorXd& beta, double tol = 0.0);

// p(x) = sum alpha_{l,k} Y_{l,k}(x); degree taken from alpha's length.
Eigen::VectorXd evaluate_poly(const Eigen::VectorXd& alpha, const PointSet& points);
int degree_from_length(Eigen::Index length);

// 1/2 sum_j w_j (p(x_j) - f_j)^2
double weighted_residual(const RegularizationProblem& problem, const Eigen::VectorXd& alpha);

std::size_t sparsity(const Eigen::VectorXd& alpha);  // number of exact zeros

struct ErrorNorms {
  double uniform = 0.0;
  double l2 = 0.0;  // sqrt(4pi/N_t sum dev^2)
};
ErrorNorms error_norms(const Eigen::VectorXd& truth, const Eigen::VectorXd& approx);

// Zonal equal-area partition: polar caps plus collars split into equal
// cells. Deterministic; one point per cell.
struct EqualAreaCell {
  Interval theta;
  Interval phi;
  double area() const;
};
std::vector<EqualAreaCell> equal_area_cells(int n);
PointSet equal_area_grid(int n);

double franke(const SpherePoint& x);
double cap_bump(const SpherePoint& x, const SpherePoint& center, double r, double height);

struct CapConfig {
  SpherePoint center;
  double r = 0.5;
  double height = 1.0;
};
CapConfig default_cap();  // center (-0.5, -0.5, sqrt(0.5)), r = 0.5, height 1
double franke_cap(const SpherePoint& x, const CapConfig& cap = default_cap());

// Adds independent uniform noise on [-delta, delta].
Eigen::VectorXd add_noise(const Eigen::VectorXd& values, double delta, std::uint64_t seed);

// 10^lo, 10^(lo+step), ..., up to 10^hi inclusive (within step/1000).
std::vector<double> log_lambda_grid(double lo, double hi, double step);

}  // namespace sdesign
