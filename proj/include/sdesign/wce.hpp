#pragma once

#include "sdesign/certify.hpp"

#include <string>
#include <vector>

namespace sdesign {

// Smoothness of the Sobolev space H^s on the sphere, with the norm fixed by
// the distance kernel |x - y|^{2s-2}. Laplace-Beltrami eigenvalues are
// l(l+1); kernel coefficients decay like (1 + l(l+1))^{-s}.
struct SobolevParams {
  double s = 1.5;
  // floor(s - 1), except at the boundary s = 2 which uses the low
  // branch (L = 0).
  int L = 0;
  bool boundary_warning = false;  // s = 2: 2s-2 is even

  // Throws DomainError for s <= 1 and for integer s > 2.
  static SobolevParams make(double s);
};

// V = double integral of |x-y|^{2s-2} over normalized measure = 2^{2s-2}/s.
double v_coeff(double s);

// a_l = V (-1)^{L+1} prod_{j<l} (1-s+j)/(1+s+j), with L = floor(s-1).
double a_coeff(double s, int ell);
// a_0..a_{ell_max} by running product; entry 0 is V (-1)^{L+1}.
std::vector<double> a_coeffs(double s, int ell_max);
// Leading-order behavior V (-1)^{L+1} Gamma(1+s)/Gamma(1-s) l^{-2s}.
double a_asymptote(double s, int ell);

// E_s from the closed-form kernels. Both validate the rule.
double wce_closed_low(const QuadratureRule& rule, double s);   // 1 < s <= 2
double wce_closed_high(const QuadratureRule& rule, double s);  // s > 2, non-integer
double wce_closed(const QuadratureRule& rule, double s);

// Kernel values in the double sums, exposed for symmetry checks.
double wce_kernel(double s, const SpherePoint& x, const SpherePoint& y);

// S_l = sum_ij w_i w_j / (16 pi^2) P_l(x_i . x_j) for l = 0..ell_max.
// Independent of s, so one table serves every smoothness.
class LegendreMoments {
 public:
  LegendreMoments(const QuadratureRule& rule, int ell_max);

  int ell_max() const { return ell_max_; }
  double operator[](int ell) const { return s_[ell]; }
  double diagonal() const { return diag_; }  // sum_i w_i^2 / (16 pi^2)
  // Off-diagonal tail bound helpers: pair weights and sin of the angle.
  const std::vector<double>& pair_weight() const { return pair_w_; }
  const std::vector<double>& pair_sin() const { return pair_sin_; }

 private:
  int ell_max_;
  std::vector<double> s_;
  double diag_ = 0.0;
  std::vector<double> pair_w_;
  std::vector<double> pair_sin_;
};

struct SeriesResult {
  int ell_max = 0;
  double e_partial = 0.0;    // sqrt of the truncated sum; nondecreasing in ell_max
  double e_corrected = 0.0;  // plus the exact diagonal part of the tail
  double tail_bound = 0.0;   // bound on |E - e_partial|
};

// E^2 = sum_{l>=1} |a_l| (2l+1) S_l.
SeriesResult wce_series(const LegendreMoments& moments, double s);
SeriesResult wce_series(const QuadratureRule& rule, double s, int ell_max);

// Same sum through the harmonics: 4pi sum_l |a_l| sum_k (sum_i w_i/(4pi) Y_lk(x_i))^2.
double wce_series_harmonic(const QuadratureRule& rule, double s, int ell_max);

}  // namespace sdesign
