#pragma once

#include "sdesign/certify.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sdesign {

struct SearchConfig {
  int t = 1;
  double epsilon = 0.0;
  int n = 4;
  int max_iter = 400;
  double tol = 1e-10;
  std::uint64_t seed = 1;
  int restarts = 5;
  // Used for the first attempt instead of the jittered equal-area grid.
  std::optional<PointSet> initial;
};

struct SearchResult {
  bool success = false;
  QuadratureRule rule;
  double eps_hat = 0.0;
  double residual = 0.0;  // ||Y^T w - sqrt(4pi) e_1||_2, recomputed from scratch
  int iterations = 0;
  int attempts = 0;
  std::string message;
};

// Levenberg-Marquardt on (theta, phi) of every point and, for eps > 0, on
// weights w = c + h sin(u) confined to the eps box. Never throws on
// non-convergence; the best iterate is returned with success = false.
SearchResult find_design(const SearchConfig& config);

struct ScanEntry {
  int n = 0;
  bool success = false;
  double residual = 0.0;
};

struct ScanResult {
  std::optional<int> n;
  std::vector<ScanEntry> entries;
  SearchResult best;
};

// Default bracket for the point count.
int scan_lower_bound(int t, double epsilon);
int scan_upper_bound(int t);

// Smallest N in [n_lo, n_hi] for which find_design succeeds. `base`
// supplies t, epsilon and the solver settings; its n is ignored.
ScanResult minimal_n_scan(const SearchConfig& base, std::optional<int> n_lo = std::nullopt,
                          std::optional<int> n_hi = std::nullopt);

struct RefineResult {
  PointSet points;
  double residual = 0.0;
  bool converged = false;
};

// Minimum-norm Gauss-Newton from `start` towards an equal-weight t-design
// with the same number of points.
RefineResult refine_equal_weight_design(const PointSet& start, int t, int max_iter = 50,
                                        double tol = 1e-13);

}  // namespace sdesign
