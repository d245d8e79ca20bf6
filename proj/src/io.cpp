#include "sdesign/io.hpp"

#include "sdesign/error.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace sdesign {

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return in;
}

void write_header(std::ostream& out, const std::vector<std::string>& header) {
  for (const auto& h : header) out << "# " << h << '\n';
}

// Line numbers of the rows returned by read_table, for error messages.
struct Table {
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> lines;
};

Table parse_table(std::istream& in, const std::string& source) {
  Table table;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    for (char& c : line) {
      if (c == '[' || c == ']' || c == ',' || c == '\t' || c == '\r') c = ' ';
    }
    const auto first = line.find_first_not_of(' ');
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<double> row;
    const char* p = line.c_str();
    while (true) {
      while (*p == ' ') ++p;
      if (*p == '\0') break;
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(p, &end);
      if (end == p) {
        throw ParseError(source, number, "not a number: '" + std::string(p).substr(0, 20) + "'");
      }
      if (errno == ERANGE || !std::isfinite(v)) {
        throw ParseError(source, number, "value out of range");
      }
      row.push_back(v);
      p = end;
    }
    table.rows.push_back(std::move(row));
    table.lines.push_back(number);
  }
  return table;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::vector<std::vector<double>> read_table(std::istream& in, const std::string& source) {
  return parse_table(in, source).rows;
}

PointSet read_points(std::istream& in, const std::string& source) {
  const Table table = parse_table(in, source);
  if (table.rows.empty()) throw ParseError(source, 0, "no points");
  const std::size_t cols = table.rows.front().size();
  if (cols != 2 && cols != 3) {
    throw ParseError(source, table.lines.front(), "expected 'x y z' or 'theta phi'");
  }
  std::vector<SpherePoint> pts;
  pts.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    if (r.size() != cols) {
      throw ParseError(source, table.lines[i],
                       "expected " + std::to_string(cols) + " columns, found " + std::to_string(r.size()));
    }
    try {
      pts.push_back(cols == 3 ? SpherePoint::from_cartesian(r[0], r[1], r[2])
                              : SpherePoint::from_spherical(r[0], r[1]));
    } catch (const DomainError& e) {
      throw ParseError(source, table.lines[i], e.what());
    }
  }
  return PointSet(std::move(pts));
}

PointSet read_points(const std::string& path) {
  auto in = open_input(path);
  return read_points(in, path);
}

Eigen::VectorXd read_weights(std::istream& in, const std::string& source) {
  const Table table = parse_table(in, source);
  if (table.rows.empty()) throw ParseError(source, 0, "no weights");
  Eigen::VectorXd w(static_cast<Eigen::Index>(table.rows.size()));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (table.rows[i].size() != 1) throw ParseError(source, table.lines[i], "expected one weight");
    w[static_cast<Eigen::Index>(i)] = table.rows[i][0];
  }
  return w;
}

Eigen::VectorXd read_weights(const std::string& path) {
  auto in = open_input(path);
  return read_weights(in, path);
}

std::vector<SphericalRectangle> read_rectangles(std::istream& in, const std::string& source) {
  const Table table = parse_table(in, source);
  if (table.rows.empty()) throw ParseError(source, 0, "no enclosures");
  std::vector<SphericalRectangle> rects;
  rects.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    if (r.size() != 4) {
      throw ParseError(source, table.lines[i], "expected theta_lo theta_hi phi_lo phi_hi");
    }
    SphericalRectangle rect{{r[0], r[1]}, {r[2], r[3]}};
    try {
      rect.validate();
    } catch (const DomainError& e) {
      throw ParseError(source, table.lines[i], e.what());
    }
    rects.push_back(rect);
  }
  return rects;
}

std::vector<SphericalRectangle> read_rectangles(const std::string& path) {
  auto in = open_input(path);
  return read_rectangles(in, path);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_points(std::ostream& out, const PointSet& points, const std::vector<std::string>& header) {
  write_header(out, header);
  for (const auto& p : points) {
    out << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z()) << '\n';
  }
}

void write_weights(std::ostream& out, const Eigen::VectorXd& weights,
                   const std::vector<std::string>& header) {
  write_header(out, header);
  for (Eigen::Index i = 0; i < weights.size(); ++i) out << format_double(weights[i]) << '\n';
}

void write_rectangles(std::ostream& out, const std::vector<SphericalRectangle>& rects,
                      const std::vector<std::string>& header) {
  write_header(out, header);
  for (const auto& r : rects) {
    out << format_double(r.theta.lo) << ' ' << format_double(r.theta.hi) << ' '
        << format_double(r.phi.lo) << ' ' << format_double(r.phi.hi) << '\n';
  }
}

}  // namespace sdesign
