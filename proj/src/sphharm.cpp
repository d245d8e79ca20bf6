#include "sdesign/sphharm.hpp"

#include "sdesign/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sdesign {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

// Azimuthal factors cos(m phi), sin(m phi) for m = 0..t from the unit
// vector (cos phi, sin phi).
void azimuthal(int t, double c1, double s1, std::vector<double>& c, std::vector<double>& s) {
  c.assign(t + 1, 0.0);
  s.assign(t + 1, 0.0);
  c[0] = 1.0;
  s[0] = 0.0;
  for (int m = 1; m <= t; ++m) {
    c[m] = c[m - 1] * c1 - s[m - 1] * s1;
    s[m] = s[m - 1] * c1 + c[m - 1] * s1;
  }
}

void unit_azimuth(const SpherePoint& x, double& c1, double& s1) {
  const double st = x.sin_theta();
  if (st == 0.0) {
    c1 = 1.0;
    s1 = 0.0;
    return;
  }
  c1 = x.x() / st;
  s1 = x.y() / st;
}

}  // namespace

HarmonicIndex HarmonicIndex::from_column(int column) {
  if (column < 0) throw DomainError("negative harmonic column");
  const int ell = static_cast<int>(std::sqrt(static_cast<double>(column)));
  int l = ell;
  while (l * l > column) --l;
  while ((l + 1) * (l + 1) <= column) ++l;
  return {l, column - l * l + 1};
}

int HarmonicIndex::order() const {
  if (k <= ell) return ell + 1 - k;
  if (k == ell + 1) return 0;
  return k - ell - 1;
}

void HarmonicIndex::validate() const {
  if (ell < 0 || k < 1 || k > 2 * ell + 1) {
    throw DomainError("harmonic index out of range: l=" + std::to_string(ell) +
                      " k=" + std::to_string(k));
  }
}

void LegendreTable::compute(double u, double s) {
  auto at = [this](int l, int m) -> double& { return values_[l * (l + 1) / 2 + m]; };
  at(0, 0) = 1.0 / std::sqrt(kFourPi);
  if (t_ == 0) return;
  // Sectoral terms.
  for (int m = 1; m <= t_; ++m) {
    at(m, m) = -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * at(m - 1, m - 1);
  }
  for (int m = 0; m < t_; ++m) {
    at(m + 1, m) = std::sqrt(2.0 * m + 3.0) * u * at(m, m);
    for (int l = m + 2; l <= t_; ++l) {
      const double ll = l, mm = m;
      const double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
      const double b =
          std::sqrt(((ll - 1.0) * (ll - 1.0) - mm * mm) / (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
      at(l, m) = a * (u * at(l - 1, m) - b * at(l - 2, m));
    }
  }
}

double eval_legendre(int ell, int m, double u) {
  if (ell < 0 || m < 0 || m > ell) {
    throw DomainError("eval_legendre: need 0 <= m <= l (l=" + std::to_string(ell) +
                      ", m=" + std::to_string(m) + ")");
  }
  if (!(std::abs(u) <= 1.0 + 1e-12)) throw DomainError("eval_legendre: |u| > 1");
  u = std::clamp(u, -1.0, 1.0);
  const double s = std::sqrt((1.0 - u) * (1.0 + u));

  // Single column m: sectoral seed, then upward in l.
  double pmm = 1.0 / std::sqrt(kFourPi);
  for (int j = 1; j <= m; ++j) pmm *= -std::sqrt((2.0 * j + 1.0) / (2.0 * j)) * s;
  if (ell == m) return pmm;
  double prev = pmm;
  double cur = std::sqrt(2.0 * m + 3.0) * u * pmm;
  for (int l = m + 2; l <= ell; ++l) {
    const double ll = l, mm = m;
    const double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
    const double b =
        std::sqrt(((ll - 1.0) * (ll - 1.0) - mm * mm) / (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
    const double next = a * (u * cur - b * prev);
    prev = cur;
    cur = next;
  }
  return cur;
}

double eval_ylk(const HarmonicIndex& idx, const SpherePoint& x) {
  idx.validate();
  const int m = idx.order();
  const double p = eval_legendre(idx.ell, m, x.cos_theta());
  if (m == 0) return p;
  double c1, s1;
  unit_azimuth(x, c1, s1);
  const double phi = std::atan2(s1, c1);
  return idx.is_cos() ? kSqrt2 * p * std::cos(m * phi) : kSqrt2 * p * std::sin(m * phi);
}

void eval_harmonics(int t, const SpherePoint& x, Eigen::Ref<Eigen::VectorXd> out) {
  if (t < 0) throw DomainError("negative degree");
  if (out.size() != harmonic_dimension(t)) throw DomainError("output size mismatch");
  LegendreTable table(t);
  table.compute(x.cos_theta(), x.sin_theta());
  double c1, s1;
  unit_azimuth(x, c1, s1);
  std::vector<double> cm, sm;
  azimuthal(t, c1, s1, cm, sm);
  for (int l = 0; l <= t; ++l) {
    const int base = l * l;
    for (int m = 1; m <= l; ++m) {
      const double p = kSqrt2 * table(l, m);
      out[base + (l + 1 - m) - 1] = p * cm[m];
      out[base + (l + 1 + m) - 1] = p * sm[m];
    }
    out[base + l] = table(l, 0);
  }
}

Eigen::VectorXd eval_harmonics(int t, const SpherePoint& x) {
  Eigen::VectorXd out(harmonic_dimension(t));
  eval_harmonics(t, x, out);
  return out;
}

HarmonicGradient eval_harmonics_with_gradient(int t, const SpherePoint& x) {
  if (t < 0) throw DomainError("negative degree");
  const int d = harmonic_dimension(t);
  HarmonicGradient g{Eigen::VectorXd(d), Eigen::VectorXd(d), Eigen::VectorXd(d)};
  LegendreTable table(t);
  table.compute(x.cos_theta(), x.sin_theta());
  double c1, s1;
  unit_azimuth(x, c1, s1);
  std::vector<double> cm, sm;
  azimuthal(t, c1, s1, cm, sm);

  for (int l = 0; l <= t; ++l) {
    const int base = l * l;
    const double ll = l;
    for (int m = 0; m <= l; ++m) {
      const double mm = m;
      // d/dtheta of the normalized Legendre function.
      const double up = (m < l) ? std::sqrt((ll - mm) * (ll + mm + 1.0)) * table(l, m + 1) : 0.0;
      double dp;
      if (m == 0) {
        dp = up;
      } else {
        const double down = std::sqrt((ll + mm) * (ll - mm + 1.0)) * table(l, m - 1);
        dp = 0.5 * (up - down);
      }
      if (m == 0) {
        g.value[base + l] = table(l, 0);
        g.d_theta[base + l] = dp;
        g.d_phi[base + l] = 0.0;
        continue;
      }
      const double p = kSqrt2 * table(l, m);
      const double q = kSqrt2 * dp;
      const int kc = base + (l + 1 - m) - 1;
      const int ks = base + (l + 1 + m) - 1;
      g.value[kc] = p * cm[m];
      g.value[ks] = p * sm[m];
      g.d_theta[kc] = q * cm[m];
      g.d_theta[ks] = q * sm[m];
      g.d_phi[kc] = -mm * p * sm[m];
      g.d_phi[ks] = mm * p * cm[m];
    }
  }
  return g;
}

DesignMatrix design_matrix(const PointSet& points, int t) {
  if (points.empty()) throw DomainError("design_matrix: empty point set");
  if (t < 0) throw DomainError("design_matrix: negative degree");
  DesignMatrix Y;
  Y.t = t;
  Y.points = points;
  Y.values.resize(static_cast<Eigen::Index>(points.size()), harmonic_dimension(t));
  Eigen::VectorXd row(harmonic_dimension(t));
  for (std::size_t i = 0; i < points.size(); ++i) {
    eval_harmonics(t, points[i], row);
    Y.values.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return Y;
}

void legendre_polynomials(int n, double u, std::vector<double>& out) {
  out.assign(n + 1, 0.0);
  out[0] = 1.0;
  if (n == 0) return;
  out[1] = u;
  for (int l = 2; l <= n; ++l) {
    out[l] = ((2.0 * l - 1.0) * u * out[l - 1] - (l - 1.0) * out[l - 2]) / l;
  }
}

double legendre_polynomial(int n, double u) {
  if (n < 0) throw DomainError("negative Legendre degree");
  double p0 = 1.0;
  if (n == 0) return p0;
  double p1 = u;
  for (int l = 2; l <= n; ++l) {
    const double p2 = ((2.0 * l - 1.0) * u * p1 - (l - 1.0) * p0) / l;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

}  // namespace sdesign
