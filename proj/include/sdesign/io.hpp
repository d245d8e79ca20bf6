#pragma once

#include "sdesign/geometry.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sdesign {

inline constexpr const char* kVersion = "0.1.0";

// 64-bit FNV-1a, printed as 16 hex digits. Used for config hashes.
std::uint64_t fnv1a64(const std::string& text);
std::string hex64(std::uint64_t value);

// Whitespace-separated numbers per line. Blank lines and lines starting
// with '#' are skipped. Characters "[", "]" and "," are treated as
// whitespace so bracketed interval dumps can be read unchanged.
std::vector<std::vector<double>> read_table(std::istream& in, const std::string& source);

// One point per line: "x y z" or "theta phi" (all lines the same form).
PointSet read_points(std::istream& in, const std::string& source);
PointSet read_points(const std::string& path);

// One weight per line.
Eigen::VectorXd read_weights(std::istream& in, const std::string& source);
Eigen::VectorXd read_weights(const std::string& path);

// One rectangle per line: theta_lo theta_hi phi_lo phi_hi.
std::vector<SphericalRectangle> read_rectangles(std::istream& in, const std::string& source);
std::vector<SphericalRectangle> read_rectangles(const std::string& path);

// %.17g, so values survive a write/read cycle bit for bit.
std::string format_double(double v);

// `header` lines are written with a leading "# ".
void write_points(std::ostream& out, const PointSet& points, const std::vector<std::string>& header = {});
void write_weights(std::ostream& out, const Eigen::VectorXd& weights,
                   const std::vector<std::string>& header = {});
void write_rectangles(std::ostream& out, const std::vector<SphericalRectangle>& rects,
                      const std::vector<std::string>& header = {});

}  // namespace sdesign
