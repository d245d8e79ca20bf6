#include "sdesign/search.hpp"

#include "sdesign/approx.hpp"
#include "sdesign/error.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace sdesign {

namespace {

const double kSqrtFourPi = std::sqrt(kFourPi);

struct WeightBox {
  double center = 0.0;
  double half = 0.0;
};

WeightBox weight_box(int n, double eps) {
  const double base = kFourPi / n;
  const double lo = base * (1.0 - eps);
  const double hi = base / (1.0 - eps);
  // Shrunk slightly so that sin(u) = +-1 stays strictly inside.
  return {0.5 * (lo + hi), 0.5 * (hi - lo) * (1.0 - 1e-9)};
}

class DesignProblem {
 public:
  DesignProblem(int t, int n, double eps)
      : t_(t), n_(n), d_(harmonic_dimension(t)), free_weights_(eps > 0.0), box_(weight_box(n, eps)) {}

  Eigen::Index params() const { return free_weights_ ? 3 * n_ : 2 * n_; }
  Eigen::Index rows() const { return d_; }

  Eigen::VectorXd weights(const Eigen::VectorXd& p) const {
    if (!free_weights_) return Eigen::VectorXd::Constant(n_, kFourPi / n_);
    Eigen::VectorXd w(n_);
    for (int i = 0; i < n_; ++i) w[i] = box_.center + box_.half * std::sin(p[2 * n_ + i]);
    return w;
  }

  PointSet points(const Eigen::VectorXd& p) const {
    std::vector<SpherePoint> pts;
    pts.reserve(n_);
    for (int i = 0; i < n_; ++i) pts.push_back(SpherePoint::from_spherical(p[i], p[n_ + i]));
    return PointSet(std::move(pts));
  }

  // Rewrites (theta, phi) into the canonical chart so that derivatives
  // evaluated from the point agree with the parameters.
  void canonicalize(Eigen::VectorXd& p) const {
    for (int i = 0; i < n_; ++i) {
      const SpherePoint x = SpherePoint::from_spherical(p[i], p[n_ + i]);
      p[i] = x.theta();
      p[n_ + i] = x.phi();
    }
  }

  Eigen::VectorXd residual(const Eigen::VectorXd& p) const {
    const Eigen::VectorXd w = weights(p);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(d_);
    Eigen::VectorXd row(d_);
    for (int i = 0; i < n_; ++i) {
      eval_harmonics(t_, SpherePoint::from_spherical(p[i], p[n_ + i]), row);
      r += w[i] * row;
    }
    r[0] -= kSqrtFourPi;
    return r;
  }

  void residual_and_jacobian(const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd& j) const {
    const Eigen::VectorXd w = weights(p);
    r.setZero(d_);
    j.setZero(d_, params());
    for (int i = 0; i < n_; ++i) {
      const HarmonicGradient g =
          eval_harmonics_with_gradient(t_, SpherePoint::from_spherical(p[i], p[n_ + i]));
      r += w[i] * g.value;
      j.col(i) = w[i] * g.d_theta;
      j.col(n_ + i) = w[i] * g.d_phi;
      if (free_weights_) j.col(2 * n_ + i) = box_.half * std::cos(p[2 * n_ + i]) * g.value;
    }
    r[0] -= kSqrtFourPi;
  }

 private:
  int t_;
  int n_;
  Eigen::Index d_;
  bool free_weights_;
  WeightBox box_;
};

// Levenberg-Marquardt step through whichever normal equations are smaller.
Eigen::VectorXd lm_step(const Eigen::MatrixXd& j, const Eigen::VectorXd& r, double mu) {
  if (j.rows() <= j.cols()) {
    Eigen::MatrixXd a = j * j.transpose();
    a.diagonal().array() += mu;
    return -(j.transpose() * a.ldlt().solve(r));
  }
  Eigen::MatrixXd a = j.transpose() * j;
  a.diagonal().array() += mu;
  return -a.ldlt().solve(j.transpose() * r);
}

struct LmOutcome {
  Eigen::VectorXd p;
  double residual = 0.0;
  int iterations = 0;
};

LmOutcome levenberg_marquardt(const DesignProblem& prob, Eigen::VectorXd p, int max_iter, double tol) {
  prob.canonicalize(p);
  Eigen::VectorXd r;
  Eigen::MatrixXd j;
  prob.residual_and_jacobian(p, r, j);
  double f = r.squaredNorm();
  double mu = 1e-3 * std::max(1e-12, j.cwiseAbs2().rowwise().sum().maxCoeff());
  double nu = 2.0;
  double checkpoint = f;
  int iter = 0;
  for (; iter < max_iter && std::sqrt(f) >= tol; ++iter) {
    const Eigen::VectorXd step = lm_step(j, r, mu);
    Eigen::VectorXd trial = p + step;
    prob.canonicalize(trial);
    const Eigen::VectorXd r_trial = prob.residual(trial);
    const double f_trial = r_trial.squaredNorm();
    const double predicted = f - (r + j * step).squaredNorm();
    const double gain = predicted > 0.0 ? (f - f_trial) / predicted : -1.0;
    if (gain > 1e-4 && f_trial < f) {
      p = trial;
      prob.residual_and_jacobian(p, r, j);
      f = r.squaredNorm();
      mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * gain - 1.0, 3));
      nu = 2.0;
    } else {
      mu *= nu;
      nu *= 2.0;
      if (mu > 1e30) break;
    }
    // Stall detection: less than a 1% decrease over 40 iterations.
    if (iter % 40 == 39) {
      if (f > 0.99 * checkpoint) break;
      checkpoint = f;
    }
  }
  return {p, std::sqrt(f), iter};
}

Eigen::VectorXd initial_parameters(const SearchConfig& cfg, int attempt, std::mt19937_64& gen) {
  const int n = cfg.n;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(cfg.epsilon > 0.0 ? 3 * n : 2 * n);
  std::normal_distribution<double> normal(0.0, 1.0);
  PointSet start;
  if (attempt == 0 && cfg.initial) {
    start = *cfg.initial;
  } else {
    start = equal_area_grid(n);
    // Random rotation, then jitter of a fraction of the cell size.
    Vec3 axis(normal(gen), normal(gen), normal(gen));
    if (axis.norm() == 0.0) axis = Vec3::UnitZ();
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    start = rotate(start, rotation_about_axis(axis, angle(gen)));
    const double scale = 0.25 * std::sqrt(kFourPi / n);
    std::vector<SpherePoint> jittered;
    for (const auto& x : start) {
      const Vec3 v(normal(gen), normal(gen), normal(gen));
      const Vec3 tangent = v - v.dot(x.cartesian()) * x.cartesian();
      jittered.push_back(SpherePoint::normalized(x.cartesian() + scale * tangent));
    }
    start = PointSet(std::move(jittered));
  }
  if (static_cast<int>(start.size()) != n) throw DomainError("initial point set has the wrong size");
  for (int i = 0; i < n; ++i) {
    p[i] = start[i].theta();
    p[n + i] = start[i].phi();
  }
  return p;
}

}  // namespace

SearchResult find_design(const SearchConfig& cfg) {
  if (cfg.t < 0) throw DomainError("find_design: negative degree");
  if (cfg.n < 1) throw DomainError("find_design: need at least one point");
  if (!(cfg.epsilon >= 0.0 && cfg.epsilon < 1.0)) throw DomainError("epsilon must lie in [0, 1)");
  const DesignProblem prob(cfg.t, cfg.n, cfg.epsilon);
  std::mt19937_64 gen(cfg.seed);

  SearchResult best;
  best.residual = std::numeric_limits<double>::infinity();
  const int attempts = std::max(1, cfg.restarts);
  for (int a = 0; a < attempts; ++a) {
    const LmOutcome out =
        levenberg_marquardt(prob, initial_parameters(cfg, a, gen), cfg.max_iter, 0.1 * cfg.tol);
    QuadratureRule rule{prob.points(out.p), prob.weights(out.p), cfg.t};
    // Independent recomputation of the exactness residual.
    const DesignMatrix y = design_matrix(rule.points, cfg.t);
    Eigen::VectorXd res = y.values.transpose() * rule.weights;
    res[0] -= kSqrtFourPi;
    const double residual = res.norm();
    best.iterations += out.iterations;
    if (residual < best.residual) {
      best.residual = residual;
      best.rule = rule;
    }
    best.attempts = a + 1;
    if (residual < cfg.tol) break;
  }

  best.eps_hat = epsilon_from_weights(best.rule.weights);
  const bool exact = best.residual < cfg.tol;
  const bool in_box = best.eps_hat <= cfg.epsilon + 1e-12;
  bool weights_ok = true;
  if (exact && in_box && static_cast<int>(best.rule.size()) <= harmonic_dimension(cfg.t)) {
    try {
      weights_ok = solve_weights(best.rule.points, cfg.t).residual < cfg.tol;
    } catch (const NotFundamentalError&) {
      weights_ok = true;  // ill-conditioned weight solve; the rule itself was verified
    }
  }
  best.success = exact && in_box && weights_ok;
  if (best.success) {
    best.message = "converged";
  } else if (!exact) {
    best.message = "residual " + std::to_string(best.residual) + " above tolerance after " +
                   std::to_string(best.attempts) + " attempts";
  } else if (!in_box) {
    best.message = "weights outside the eps box";
  } else {
    best.message = "weight solve did not reproduce the rule";
  }
  return best;
}

int scan_lower_bound(int t, double /*epsilon*/) {
  return ((t + 1) * (t + 1) + 2) / 3 + 1;  // ceil((t+1)^2 / 3) + 1
}

int scan_upper_bound(int t) { return ((t + 2) * (t + 2) + 1) / 2 + 1; }

ScanResult minimal_n_scan(const SearchConfig& base, std::optional<int> n_lo, std::optional<int> n_hi) {
  const int lo = n_lo.value_or(scan_lower_bound(base.t, base.epsilon));
  const int hi = n_hi.value_or(scan_upper_bound(base.t));
  ScanResult out;
  for (int n = lo; n <= hi; ++n) {
    SearchConfig cfg = base;
    cfg.n = n;
    cfg.initial.reset();
    SearchResult r = find_design(cfg);
    out.entries.push_back({n, r.success, r.residual});
    if (r.success) {
      out.n = n;
      out.best = std::move(r);
      return out;
    }
    if (!out.best.rule.points.size() || r.residual < out.best.residual) out.best = std::move(r);
  }
  return out;
}

RefineResult refine_equal_weight_design(const PointSet& start, int t, int max_iter, double tol) {
  const int n = static_cast<int>(start.size());
  const DesignProblem prob(t, n, 0.0);
  Eigen::VectorXd p(2 * n);
  for (int i = 0; i < n; ++i) {
    p[i] = start[i].theta();
    p[n + i] = start[i].phi();
  }
  const Eigen::Index d = prob.rows();
  Eigen::VectorXd r;
  Eigen::MatrixXd j;
  prob.residual_and_jacobian(p, r, j);
  // The constant harmonic is exact for equal weights; drop its row.
  auto trimmed = [d](const Eigen::VectorXd& v) { return Eigen::VectorXd(v.tail(d - 1)); };
  double f = trimmed(r).norm();
  for (int iter = 0; iter < max_iter && f >= tol; ++iter) {
    const Eigen::MatrixXd jt = j.bottomRows(d - 1);
    Eigen::MatrixXd a = jt * jt.transpose();
    a.diagonal().array() += 1e-14 * a.diagonal().maxCoeff();
    const Eigen::VectorXd step = -(jt.transpose() * a.ldlt().solve(trimmed(r)));
    double scale = 1.0;
    bool accepted = false;
    for (int k = 0; k < 12; ++k, scale *= 0.5) {
      Eigen::VectorXd trial = p + scale * step;
      prob.canonicalize(trial);
      const double ft = trimmed(prob.residual(trial)).norm();
      if (ft < f) {
        p = trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    prob.residual_and_jacobian(p, r, j);
    f = trimmed(r).norm();
  }
  return {prob.points(p), f, f < 1e-10};
}

}  // namespace sdesign
