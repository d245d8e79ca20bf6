#include "cli.hpp"

#include "sdesign/approx.hpp"
#include "sdesign/certify.hpp"
#include "sdesign/error.hpp"
#include "sdesign/io.hpp"
#include "sdesign/search.hpp"
#include "sdesign/wce.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

namespace sdesign::cli {

namespace {

using Json = nlohmann::ordered_json;

double env_double(const char* name, double fallback) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return fallback;
  char* end = nullptr;
  const double d = std::strtod(v, &end);
  if (end == v || *end != '\0') throw Error(std::string("cannot parse ") + name + "='" + v + "'");
  return d;
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

template <class T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

// Writes to --out when given, otherwise to the caller's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw Error("cannot write " + path);
      stream_ = file_.get();
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

struct Context {
  std::string config_hash;
  std::uint64_t seed = 1;

  std::vector<std::string> header() const {
    return {std::string("sdesign ") + kVersion, "seed " + std::to_string(seed),
            "config " + config_hash};
  }
  void stamp(Json& j) const {
    j["version"] = kVersion;
    j["seed"] = seed;
    j["config_hash"] = config_hash;
  }
};

void write_csv_header(std::ostream& out, const Context& ctx) {
  for (const auto& h : ctx.header()) out << "# " << h << '\n';
}

NormMode parse_norm(const std::string& s) {
  if (s == "auto") return NormMode::Auto;
  if (s == "exact") return NormMode::Exact;
  if (s == "estimate") return NormMode::Estimate;
  throw Error("unknown --norm '" + s + "' (auto | exact | estimate)");
}

std::vector<double> parse_lambda_grid(const std::string& spec) {
  double lo = 0, hi = 0, step = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(spec);
  if (!(in >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':') {
    throw Error("--lambda-grid expects lo:hi:step in log10 units, got '" + spec + "'");
  }
  return log_lambda_grid(lo, hi, step);
}

QuadratureRule load_rule(const std::string& points_path, const std::string& weights_path, int t) {
  QuadratureRule rule;
  rule.points = read_points(points_path);
  rule.t = t;
  if (!weights_path.empty()) {
    rule.weights = read_weights(weights_path);
  } else {
    rule.weights = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(rule.points.size()),
                                             kFourPi / static_cast<double>(rule.points.size()));
  }
  rule.validate(1e-8);
  return rule;
}

// ---- subcommands -------------------------------------------------------

struct GridOpts {
  int n = 0;
  bool spherical = false;
  std::string out;
};

int cmd_grid(const GridOpts& o, const Context& ctx, std::ostream& out) {
  const PointSet grid = equal_area_grid(o.n);
  Sink sink(o.out, out);
  if (!o.spherical) {
    write_points(sink.get(), grid, ctx.header());
    return kOk;
  }
  write_csv_header(sink.get(), ctx);
  for (const auto& p : grid) sink.get() << format_double(p.theta()) << ' ' << format_double(p.phi()) << '\n';
  return kOk;
}

struct WeightsOpts {
  std::string points;
  int t = 0;
  std::string out;
};

int cmd_weights(const WeightsOpts& o, const Context& ctx, std::ostream& out) {
  const PointSet pts = read_points(o.points);
  const WeightSolution sol =
      solve_weights(pts, o.t, env_double("SDESIGN_MAX_CONDITION", 1e12));
  auto header = ctx.header();
  header.push_back("residual " + format_double(sol.residual));
  header.push_back("condition " + format_double(sol.condition));
  if ((sol.weights.array() > 0.0).all()) {
    header.push_back("eps_hat " + format_double(epsilon_from_weights(sol.weights)));
  } else {
    header.push_back("eps_hat none (nonpositive weight)");
  }
  Sink sink(o.out, out);
  write_weights(sink.get(), sol.weights, header);
  return kOk;
}

struct CertifyOpts {
  std::string enclosures;
  std::string points;
  std::string reference;
  int t = 0;
  std::string norm = "auto";
  bool no_refine = false;
  std::string out;
};

int cmd_certify(const CertifyOpts& o, const Context& ctx, std::ostream& out, std::ostream& err) {
  Json j;
  bool ok = false;
  if (!o.enclosures.empty()) {
    const EnclosureSet set = EnclosureSet::from_rectangles(read_rectangles(o.enclosures));
    const EnclosureStats stats = enclosure_stats(set);
    if (stats.overlapping) {
      err << "warning: enclosures " << stats.closest_i << " and " << stats.closest_j
          << " overlap (rho = " << stats.rho << ")\n";
    }
    CertifyOptions opts;
    opts.norm_mode = parse_norm(o.norm);
    opts.refine_centers = !o.no_refine;
    const EpsilonCertificate c = certify_enclosures(set, o.t, opts);
    j["t"] = c.t;
    j["N"] = c.n;
    j["rad"] = c.rad;
    j["rho"] = number_or_null(c.rho);
    j["tau"] = c.tau;
    j["kappa"] = c.kappa;
    j["eps_lower"] = number_or_null(c.eps_lower);
    j["hypothesis_ok"] = c.hypothesis_ok;
    j["assumes_design_exists"] = c.assumes_design_exists;
    j["kappa_exact"] = c.kappa_exact;
    j["rad_below_quarter_rho"] = c.rad_below_quarter_rho;
    j["eps_below_one"] = c.eps_below_one;
    j["reason"] = c.reason;
    j["eps_hat_centers"] = optional_json(c.eps_hat_centers);
    j["sigma_refined"] = optional_json(c.sigma_refined);
    j["eps_sigma_refined"] = optional_json(c.eps_sigma_refined);
    ok = c.hypothesis_ok;
  } else if (!o.points.empty() && !o.reference.empty()) {
    const PointSetCertificate c =
        certify_point_set(read_points(o.points), read_points(o.reference), o.t, parse_norm(o.norm));
    j["t"] = c.t;
    j["N"] = c.n;
    j["sigma"] = c.sigma;
    j["sigma_star_limit"] = c.sigma_star_limit;
    j["tau"] = c.tau;
    j["kappa"] = c.kappa;
    j["eps_lower"] = c.hypothesis_ok ? Json(c.eps_lower) : Json(nullptr);
    j["hypothesis_ok"] = c.hypothesis_ok;
    j["kappa_exact"] = c.kappa_exact;
    j["reason"] = c.reason;
    ok = c.hypothesis_ok;
  } else {
    throw Error("certify needs --enclosures, or --points together with --reference");
  }
  ctx.stamp(j);
  Sink sink(o.out, out);
  sink.get() << j.dump(2) << '\n';
  if (!ok) {
    err << "certificate refused: " << j["reason"].get<std::string>() << '\n';
    return kRefused;
  }
  return kOk;
}

struct WceOpts {
  std::string points;
  std::string weights;
  std::vector<double> s{1.5};
  int t = -1;
  int ell_max = 5000;
  std::string out;
};

int cmd_wce(const WceOpts& o, const Context& ctx, std::ostream& out) {
  const QuadratureRule rule = load_rule(o.points, o.weights, o.t);
  const LegendreMoments moments(rule, o.ell_max);
  Sink sink(o.out, out);
  write_csv_header(sink.get(), ctx);
  sink.get() << "t,N,s,E_closed,E_series,tail_bound\n";
  for (double s : o.s) {
    const double closed = wce_closed(rule, s);
    const SeriesResult series = wce_series(moments, s);
    sink.get() << o.t << ',' << rule.size() << ',' << format_double(s) << ','
               << format_double(closed) << ',' << format_double(series.e_corrected) << ','
               << format_double(series.tail_bound) << '\n';
  }
  return kOk;
}

struct ApproxOpts {
  std::string target = "franke";
  std::string samples;
  std::string design;
  std::string weights;
  int t = 0;
  int L = -1;
  double delta = 0.0;
  std::string lambda_grid = "-20:0.5:0.5";
  std::string model = "both";
  int grid_n = 100000;
  std::string restore_out;
  std::string out;
};

int cmd_approx(const ApproxOpts& o, const Context& ctx, std::ostream& out) {
  QuadratureRule rule;
  rule.points = read_points(o.design);
  rule.t = o.t;
  rule.weights = o.weights.empty() ? solve_weights(rule.points, o.t).weights : read_weights(o.weights);
  rule.validate(1e-8);

  RegularizationProblem problem;
  problem.rule = rule;
  problem.L = o.L >= 0 ? o.L : o.t / 2;
  problem.beta = laplace_beltrami_betas(problem.L);
  problem.gram_tolerance = env_double("SDESIGN_GRAM_TOL", kDefaultGramTolerance);

  std::function<double(const SpherePoint&)> truth;
  Eigen::VectorXd clean(static_cast<Eigen::Index>(rule.size()));
  if (!o.samples.empty()) {
    clean = read_weights(o.samples);  // one value per line
    if (static_cast<std::size_t>(clean.size()) != rule.size()) {
      throw Error("sample file has " + std::to_string(clean.size()) + " values for " +
                  std::to_string(rule.size()) + " points");
    }
  } else {
    if (o.target == "franke") {
      truth = [](const SpherePoint& x) { return franke(x); };
    } else if (o.target == "franke+cap") {
      truth = [](const SpherePoint& x) { return franke_cap(x); };
    } else {
      throw Error("unknown --target '" + o.target + "' (franke | franke+cap)");
    }
    for (std::size_t i = 0; i < rule.size(); ++i) clean[static_cast<Eigen::Index>(i)] = truth(rule.points[i]);
  }
  problem.samples = add_noise(clean, o.delta, ctx.seed);

  // Errors on the equal-area grid against the target, or at the data
  // points against the supplied samples when no target function exists.
  const PointSet grid = truth ? equal_area_grid(o.grid_n) : rule.points;
  Eigen::VectorXd reference(static_cast<Eigen::Index>(grid.size()));
  if (truth) {
    for (std::size_t i = 0; i < grid.size(); ++i) reference[static_cast<Eigen::Index>(i)] = truth(grid[i]);
  } else {
    reference = clean;
  }

  const double dev = gram_deviation(rule, problem.L);
  if (!(dev <= problem.gram_tolerance)) {
    throw HypothesisError("Gram matrix deviates from the identity by " + std::to_string(dev) +
                          "; need a t_eps-design with t >= 2L");
  }
  const Eigen::VectorXd s = data_coefficients(problem);
  const DesignMatrix yg = design_matrix(grid, problem.L);
  const auto lambdas = parse_lambda_grid(o.lambda_grid);

  Sink sink(o.out, out);
  write_csv_header(sink.get(), ctx);
  sink.get() << "# L " << problem.L << ", N " << rule.size() << ", delta " << format_double(o.delta)
             << ", errors on " << (truth ? "equal-area grid" : "data points") << " of "
             << grid.size() << " points\n";
  sink.get() << "model,lambda,uniform_err,l2_err,sparsity\n";

  struct Best {
    double err = std::numeric_limits<double>::infinity();
    Eigen::VectorXd alpha;
  };
  Best best;
  auto emit = [&](const char* name, double lambda, const Eigen::VectorXd& alpha) {
    const Eigen::VectorXd p = yg.values * alpha;
    const ErrorNorms e = error_norms(reference, p);
    sink.get() << name << ',' << format_double(lambda) << ',' << format_double(e.uniform) << ','
               << format_double(e.l2) << ',' << sparsity(alpha) << '\n';
    if (e.uniform < best.err) best = {e.uniform, alpha};
  };
  for (double lambda : lambdas) {
    if (o.model == "l1" || o.model == "both") emit("l2-l1", lambda, soft_threshold(s, lambda, problem.beta));
    if (o.model == "l2" || o.model == "both") emit("l2-l2", lambda, ridge_shrink(s, lambda, problem.beta));
  }
  if (o.model != "l1" && o.model != "l2" && o.model != "both") {
    throw Error("unknown --model '" + o.model + "' (l1 | l2 | both)");
  }
  if (!o.restore_out.empty() && best.alpha.size() > 0) {
    Sink r(o.restore_out, out);
    write_csv_header(r.get(), ctx);
    r.get() << "x,y,z,value\n";
    const Eigen::VectorXd p = yg.values * best.alpha;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      r.get() << format_double(grid[i].x()) << ',' << format_double(grid[i].y()) << ','
              << format_double(grid[i].z()) << ',' << format_double(p[static_cast<Eigen::Index>(i)]) << '\n';
    }
  }
  return kOk;
}

struct FindOpts {
  int t = 1;
  double epsilon = 0.0;
  int n = 0;
  int n_min = 0;
  int n_max = 0;
  int restarts = 5;
  int max_iter = 400;
  double tol = 1e-10;
  std::string out;
};

int cmd_find_design(const FindOpts& o, const Context& ctx, std::ostream& out, std::ostream& err) {
  if (o.out.empty()) throw Error("find-design needs --out PREFIX");
  SearchConfig cfg;
  cfg.t = o.t;
  cfg.epsilon = o.epsilon;
  cfg.seed = ctx.seed;
  cfg.restarts = o.restarts;
  cfg.max_iter = o.max_iter;
  cfg.tol = env_double("SDESIGN_SEARCH_TOL", o.tol);

  SearchResult result;
  Json scan = Json::array();
  if (o.n > 0) {
    cfg.n = o.n;
    result = find_design(cfg);
  } else {
    const std::optional<int> lo = o.n_min > 0 ? std::optional<int>(o.n_min) : std::nullopt;
    const std::optional<int> hi = o.n_max > 0 ? std::optional<int>(o.n_max) : std::nullopt;
    ScanResult sr = minimal_n_scan(cfg, lo, hi);
    for (const auto& e : sr.entries) scan.push_back({{"N", e.n}, {"success", e.success}, {"residual", e.residual}});
    result = std::move(sr.best);
  }

  Json j;
  j["t"] = o.t;
  j["epsilon"] = o.epsilon;
  j["N"] = result.rule.size();
  j["success"] = result.success;
  j["residual"] = result.residual;
  j["eps_hat"] = result.eps_hat;
  j["weight_sum"] = result.rule.weights.sum();
  j["min_separation"] = result.rule.size() > 1 ? Json(separation(result.rule.points)) : Json(nullptr);
  j["attempts"] = result.attempts;
  j["iterations"] = result.iterations;
  j["message"] = result.message;
  if (!scan.empty()) j["scan"] = scan;
  ctx.stamp(j);

  {
    std::ofstream f(o.out + ".points");
    if (!f) throw Error("cannot write " + o.out + ".points");
    write_points(f, result.rule.points, ctx.header());
  }
  {
    std::ofstream f(o.out + ".weights");
    if (!f) throw Error("cannot write " + o.out + ".weights");
    write_weights(f, result.rule.weights, ctx.header());
  }
  {
    std::ofstream f(o.out + ".json");
    if (!f) throw Error("cannot write " + o.out + ".json");
    f << j.dump(2) << '\n';
  }
  out << j.dump(2) << '\n';
  if (!result.success) {
    err << "no design found: " << result.message << '\n';
    return kError;
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spherical t_eps-design certification, worst-case errors and regularized approximation"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Context ctx;
  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "Seed recorded in every artifact")->capture_default_str();

  GridOpts grid;
  auto* g = app.add_subcommand("grid", "Equal-area grid points");
  g->add_option("--n", grid.n, "Number of points")->required()->check(CLI::PositiveNumber);
  g->add_flag("--spherical", grid.spherical, "Write theta phi instead of x y z");
  g->add_option("--out", grid.out, "Output file (default stdout)");

  WeightsOpts weights;
  auto* w = app.add_subcommand("weights", "Quadrature weights exact to degree t");
  w->add_option("--points", weights.points)->required();
  w->add_option("--t", weights.t)->required()->check(CLI::NonNegativeNumber);
  w->add_option("--out", weights.out);

  CertifyOpts certify;
  auto* c = app.add_subcommand("certify", "Lower bound on eps for enclosures or a perturbed design");
  c->add_option("--enclosures", certify.enclosures, "Rectangles: theta_lo theta_hi phi_lo phi_hi");
  c->add_option("--points", certify.points, "Point set to certify against --reference");
  c->add_option("--reference", certify.reference, "Fundamental t-design with (t+1)^2 points");
  c->add_option("--t", certify.t)->required()->check(CLI::NonNegativeNumber);
  c->add_option("--norm", certify.norm, "auto | exact | estimate")->capture_default_str();
  c->add_flag("--no-refine", certify.no_refine, "Skip the Gauss-Newton refinement of the centers");
  c->add_option("--out", certify.out);

  WceOpts wce;
  auto* e = app.add_subcommand("wce", "Worst-case quadrature error in H^s");
  e->add_option("--points", wce.points)->required();
  e->add_option("--weights", wce.weights, "Default: equal weights 4pi/N");
  e->add_option("--s", wce.s, "Smoothness values, comma separated")->delimiter(',')->capture_default_str();
  e->add_option("--t", wce.t, "Degree label for the CSV");
  e->add_option("--ell-max", wce.ell_max, "Series truncation")->capture_default_str()->check(CLI::PositiveNumber);
  e->add_option("--out", wce.out);

  ApproxOpts approx;
  auto* a = app.add_subcommand("approx", "Regularized approximation from noisy samples");
  a->add_option("--target", approx.target, "franke | franke+cap")->capture_default_str();
  a->add_option("--samples", approx.samples, "Sample values, one per design point");
  a->add_option("--design", approx.design)->required();
  a->add_option("--weights", approx.weights, "Default: solved for degree t");
  a->add_option("--t", approx.t)->required()->check(CLI::NonNegativeNumber);
  a->add_option("--L", approx.L, "Degree (default floor(t/2))");
  a->add_option("--delta", approx.delta, "Uniform noise level")->capture_default_str();
  a->add_option("--lambda-grid", approx.lambda_grid, "lo:hi:step in log10")->capture_default_str();
  a->add_option("--model", approx.model, "l1 | l2 | both")->capture_default_str();
  a->add_option("--grid-n", approx.grid_n, "Error grid size")->capture_default_str();
  a->add_option("--restore-out", approx.restore_out, "Write the best restoration on the grid");
  a->add_option("--out", approx.out);

  FindOpts find;
  auto* f = app.add_subcommand("find-design", "Search for a t_eps-design");
  f->add_option("--t", find.t)->required()->check(CLI::NonNegativeNumber);
  f->add_option("--epsilon", find.epsilon)->capture_default_str();
  f->add_option("--n", find.n, "Point count (default: scan)");
  f->add_option("--n-min", find.n_min);
  f->add_option("--n-max", find.n_max);
  f->add_option("--restarts", find.restarts)->capture_default_str();
  f->add_option("--max-iter", find.max_iter)->capture_default_str();
  f->add_option("--tol", find.tol)->capture_default_str();
  f->add_option("--out", find.out, "Output prefix")->required();

  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& ex) {
    return app.exit(ex, out, err) == 0 ? kOk : kError;
  }

  std::string canonical;
  for (std::size_t i = 1; i < args.size(); ++i) canonical += args[i] + '\n';
  ctx.config_hash = hex64(fnv1a64(canonical));
  ctx.seed = seed;

  try {
    if (g->parsed()) return cmd_grid(grid, ctx, out);
    if (w->parsed()) return cmd_weights(weights, ctx, out);
    if (c->parsed()) return cmd_certify(certify, ctx, out, err);
    if (e->parsed()) return cmd_wce(wce, ctx, out);
    if (a->parsed()) return cmd_approx(approx, ctx, out);
    if (f->parsed()) return cmd_find_design(find, ctx, out, err);
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kError;
  }
  return kError;
}

}  // namespace sdesign::cli
