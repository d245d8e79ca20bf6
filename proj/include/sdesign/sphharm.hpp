#pragma once

#include "sdesign/geometry.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace sdesign {

// Degree/order pair of a real spherical harmonic. `k` runs over 1..2l+1:
//   k = 1..l       cos branch, azimuthal order m = l + 1 - k
//   k = l + 1      zonal, m = 0
//   k = l+2..2l+1  sin branch, m = k - l - 1
// Column of Y_{l,k} in a design matrix is l^2 + k - 1 (zero based).
struct HarmonicIndex {
  int ell = 0;
  int k = 1;

  static HarmonicIndex from_column(int column);

  int column() const { return ell * ell + k - 1; }
  int order() const;  // m >= 0
  bool is_cos() const { return k <= ell; }
  bool is_sin() const { return k >= ell + 2; }
  void validate() const;
};

inline int harmonic_dimension(int t) { return (t + 1) * (t + 1); }

// Row-major storage matches "one row per point".
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Fully normalized associated Legendre value
//   sqrt((2l+1)/(4pi) (l-m)!/(l+m)!) P_l^m(u)
// including the Condon-Shortley phase. Harmonics are this value times
// sqrt(2) cos(m phi) / sqrt(2) sin(m phi) (m > 0) or 1 (m = 0).
// Computed with the standard stable recurrences; finite for l <= 2000.
double eval_legendre(int ell, int m, double u);

// Triangular table of normalized Legendre values for 0 <= m <= l <= t,
// entry (l, m) at l(l+1)/2 + m.
class LegendreTable {
 public:
  explicit LegendreTable(int t) : t_(t), values_((t + 1) * (t + 2) / 2, 0.0) {}

  // cos(theta) and sin(theta) supplied separately for accuracy near poles.
  void compute(double cos_theta, double sin_theta);

  int degree() const { return t_; }
  double operator()(int ell, int m) const { return values_[ell * (ell + 1) / 2 + m]; }

 private:
  int t_;
  std::vector<double> values_;
};

double eval_ylk(const HarmonicIndex& idx, const SpherePoint& x);

// All (t+1)^2 harmonics at one point, in column order.
void eval_harmonics(int t, const SpherePoint& x, Eigen::Ref<Eigen::VectorXd> out);
Eigen::VectorXd eval_harmonics(int t, const SpherePoint& x);

// Harmonics and their partial derivatives with respect to theta and phi.
struct HarmonicGradient {
  Eigen::VectorXd value;
  Eigen::VectorXd d_theta;
  Eigen::VectorXd d_phi;
};
HarmonicGradient eval_harmonics_with_gradient(int t, const SpherePoint& x);

// N x (t+1)^2 matrix with entry (i, l^2+k-1) = Y_{l,k}(x_i).
struct DesignMatrix {
  RowMatrix values;
  int t = 0;
  PointSet points;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

DesignMatrix design_matrix(const PointSet& points, int t);

// Legendre polynomials P_0..P_n at u by the three-term recurrence.
void legendre_polynomials(int n, double u, std::vector<double>& out);
double legendre_polynomial(int n, double u);

}  // namespace sdesign
