#include "sdesign/wce.hpp"

#include "sdesign/error.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace sdesign {

namespace {

constexpr double kSixteenPiSq = 16.0 * kPi * kPi;

// Neumaier's variant of compensated summation.
class KahanSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double sign_pow(int k) { return (k % 2 == 0) ? 1.0 : -1.0; }

double chord_power(const SpherePoint& x, const SpherePoint& y, double p) {
  const double d = (x.cartesian() - y.cartesian()).norm();
  if (d == 0.0) return 0.0;
  return std::pow(d, p);
}

double finish(double e2, const char* what) {
  if (e2 < 0.0) {
    if (e2 < -1e-12) {
      throw NumericalError(std::string(what) + ": squared error " + std::to_string(e2) +
                           " is negative beyond rounding");
    }
    return 0.0;
  }
  return std::sqrt(e2);
}

// Gamma(1+s)/Gamma(1-s) in absolute value, times V.
double tail_constant(double s) {
  const double g = std::exp(std::lgamma(1.0 + s) - std::lgamma(1.0 - s));
  return v_coeff(s) * g;
}

// sum_{l >= n} (2l+1) Gamma(l+1-s)/Gamma(l+1+s), by telescoping.
double tail_sum(double s, int n) {
  const double nn = n;
  return std::exp(std::lgamma(nn + 2.0 - s) - std::lgamma(nn + s)) / (s - 1.0) +
         std::exp(std::lgamma(nn + 1.0 - s) - std::lgamma(nn + s));
}

}  // namespace

SobolevParams SobolevParams::make(double s) {
  if (!(s > 1.0) || !std::isfinite(s)) throw DomainError("smoothness s must exceed 1");
  SobolevParams p;
  p.s = s;
  if (s == 2.0) {
    p.L = 0;
    p.boundary_warning = true;
    return p;
  }
  if (s > 2.0 && s == std::floor(s)) {
    throw DomainError("s = " + std::to_string(s) +
                      " makes 2s-2 an even integer; the distance kernel is then a polynomial");
  }
  p.L = static_cast<int>(std::floor(s - 1.0));
  return p;
}

double v_coeff(double s) { return std::pow(2.0, 2.0 * s - 2.0) / s; }

std::vector<double> a_coeffs(double s, int ell_max) {
  const SobolevParams p = SobolevParams::make(s);
  std::vector<double> a(static_cast<std::size_t>(ell_max) + 1, 0.0);
  double ratio = 1.0;
  const double pre = v_coeff(s) * sign_pow(p.L + 1);
  a[0] = pre;
  for (int l = 1; l <= ell_max; ++l) {
    ratio *= (l - s) / (l + s);  // (1-s+j)/(1+s+j) with j = l-1
    a[l] = pre * ratio;
  }
  return a;
}

double a_coeff(double s, int ell) {
  if (ell < 0) throw DomainError("a_coeff: negative degree");
  return a_coeffs(s, ell)[ell];
}

double a_asymptote(double s, int ell) {
  const SobolevParams p = SobolevParams::make(s);
  const double g = std::tgamma(1.0 + s) / std::tgamma(1.0 - s);
  return v_coeff(s) * sign_pow(p.L + 1) * g * std::pow(static_cast<double>(ell), -2.0 * s);
}

double wce_kernel(double s, const SpherePoint& x, const SpherePoint& y) {
  const SobolevParams p = SobolevParams::make(s);
  const double v = v_coeff(s);
  const double dp = chord_power(x, y, 2.0 * s - 2.0);
  if (s <= 2.0) return v - dp;
  const double sg = sign_pow(p.L + 1);
  const auto a = a_coeffs(s, p.L);
  std::vector<double> leg;
  legendre_polynomials(p.L, std::clamp(x.cartesian().dot(y.cartesian()), -1.0, 1.0), leg);
  double q = 0.0;
  for (int l = 1; l <= p.L; ++l) {
    q += (sign_pow(p.L + 1 - l) - 1.0) * a[l] * (2.0 * l + 1.0) * leg[l];
  }
  return q + sg * dp - sg * v;
}

double wce_closed_low(const QuadratureRule& rule, double s) {
  rule.validate();
  if (!(s > 1.0 && s <= 2.0)) throw DomainError("low branch needs 1 < s <= 2");
  const SobolevParams p = SobolevParams::make(s);
  if (p.boundary_warning) {
    std::fprintf(stderr, "warning: s = 2 lies on the even-power boundary of the kernel family\n");
  }
  const double v = v_coeff(s);
  const double e = 2.0 * s - 2.0;
  const auto& w = rule.weights;
  const std::size_t n = rule.size();
  KahanSum sum;
  for (std::size_t i = 0; i < n; ++i) {
    sum.add(w[i] * w[i] / kSixteenPiSq * v);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double k = v - chord_power(rule.points[i], rule.points[j], e);
      sum.add(2.0 * w[i] * w[j] / kSixteenPiSq * k);
    }
  }
  return finish(sum.value(), "wce_closed_low");
}

double wce_closed_high(const QuadratureRule& rule, double s) {
  rule.validate();
  if (!(s > 2.0)) throw DomainError("high branch needs s > 2");
  const SobolevParams p = SobolevParams::make(s);
  const double v = v_coeff(s);
  const double e = 2.0 * s - 2.0;
  const double sg = sign_pow(p.L + 1);
  const auto a = a_coeffs(s, p.L);
  std::vector<double> qc(static_cast<std::size_t>(p.L) + 1, 0.0);
  for (int l = 1; l <= p.L; ++l) qc[l] = (sign_pow(p.L + 1 - l) - 1.0) * a[l] * (2.0 * l + 1.0);

  const auto& w = rule.weights;
  const std::size_t n = rule.size();
  std::vector<double> leg;
  auto kernel = [&](std::size_t i, std::size_t j) {
    const double u =
        std::clamp(rule.points[i].cartesian().dot(rule.points[j].cartesian()), -1.0, 1.0);
    legendre_polynomials(p.L, u, leg);
    double q = 0.0;
    for (int l = 1; l <= p.L; ++l) q += qc[l] * leg[l];
    return q + sg * chord_power(rule.points[i], rule.points[j], e) - sg * v;
  };
  KahanSum sum;
  for (std::size_t i = 0; i < n; ++i) {
    sum.add(w[i] * w[i] / kSixteenPiSq * kernel(i, i));
    for (std::size_t j = i + 1; j < n; ++j) {
      sum.add(2.0 * w[i] * w[j] / kSixteenPiSq * kernel(i, j));
    }
  }
  return finish(sum.value(), "wce_closed_high");
}

double wce_closed(const QuadratureRule& rule, double s) {
  return s <= 2.0 ? wce_closed_low(rule, s) : wce_closed_high(rule, s);
}

LegendreMoments::LegendreMoments(const QuadratureRule& rule, int ell_max) : ell_max_(ell_max) {
  rule.validate();
  if (ell_max < 1) throw DomainError("series needs ell_max >= 1");
  const auto& w = rule.weights;
  const std::size_t n = rule.size();
  std::vector<KahanSum> acc(static_cast<std::size_t>(ell_max) + 1);
  KahanSum diag;
  for (std::size_t i = 0; i < n; ++i) diag.add(w[i] * w[i] / kSixteenPiSq);
  diag_ = diag.value();

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec3& xi = rule.points[i].cartesian();
      const Vec3& xj = rule.points[j].cartesian();
      const double u = std::clamp(xi.dot(xj), -1.0, 1.0);
      const double pw = 2.0 * w[i] * w[j] / kSixteenPiSq;
      pair_w_.push_back(pw);
      pair_sin_.push_back(xi.cross(xj).norm());
      double p0 = 1.0, p1 = u;
      acc[0].add(pw);
      acc[1].add(pw * u);
      for (int l = 2; l <= ell_max; ++l) {
        const double p2 = ((2.0 * l - 1.0) * u * p1 - (l - 1.0) * p0) / l;
        acc[l].add(pw * p2);
        p0 = p1;
        p1 = p2;
      }
    }
  }
  s_.resize(static_cast<std::size_t>(ell_max) + 1);
  for (int l = 0; l <= ell_max; ++l) s_[l] = acc[l].value() + diag_;
}

SeriesResult wce_series(const LegendreMoments& m, double s) {
  SobolevParams::make(s);
  const int lmax = m.ell_max();
  const auto a = a_coeffs(s, lmax);
  KahanSum sum;
  for (int l = 1; l <= lmax; ++l) sum.add(std::abs(a[l]) * (2.0 * l + 1.0) * m[l]);
  SeriesResult r;
  r.ell_max = lmax;
  const double partial = sum.value();
  r.e_partial = finish(partial, "wce_series");

  const int n = lmax + 1;
  const double c = tail_constant(s);
  const double diag_tail = m.diagonal() * c * tail_sum(s, n);
  r.e_corrected = finish(partial + diag_tail, "wce_series");

  // Off-diagonal pairs: |P_l(cos theta)| <= min(1, sqrt(2/(pi l sin theta))).
  // sum_{l>=n} (2l+1) c_l l^{-1/2} is bounded by an integral of 3 c l^{1/2-2s}.
  const double sqrt_tail = 3.0 * c * std::pow(static_cast<double>(n) - 1.0, 1.5 - 2.0 * s) /
                           (2.0 * s - 1.5) * std::sqrt(2.0 / kPi);
  const double flat_tail = c * tail_sum(s, n);
  double off = 0.0;
  const auto& pw = m.pair_weight();
  const auto& ps = m.pair_sin();
  for (std::size_t k = 0; k < pw.size(); ++k) {
    const double b = ps[k] > 0.0 ? sqrt_tail / std::sqrt(ps[k]) : flat_tail;
    off += std::abs(pw[k]) * std::min(flat_tail, b);
  }
  r.tail_bound = std::sqrt(std::max(0.0, partial) + diag_tail + off) - r.e_partial;
  return r;
}

SeriesResult wce_series(const QuadratureRule& rule, double s, int ell_max) {
  return wce_series(LegendreMoments(rule, ell_max), s);
}

double wce_series_harmonic(const QuadratureRule& rule, double s, int ell_max) {
  rule.validate();
  SobolevParams::make(s);
  const auto a = a_coeffs(s, ell_max);
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(harmonic_dimension(ell_max));
  Eigen::VectorXd row(harmonic_dimension(ell_max));
  for (std::size_t i = 0; i < rule.size(); ++i) {
    eval_harmonics(ell_max, rule.points[i], row);
    sums += rule.weights[i] / kFourPi * row;
  }
  KahanSum total;
  for (int l = 1; l <= ell_max; ++l) {
    const double sq = sums.segment(l * l, 2 * l + 1).squaredNorm();
    total.add(kFourPi * std::abs(a[l]) * sq);
  }
  return finish(total.value(), "wce_series_harmonic");
}

}  // namespace sdesign
