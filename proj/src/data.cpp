#include "vsk/data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>

#include "vsk/errors.hpp"

namespace vsk {

namespace {

double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double f = 1.0, r = 0.0;
  while (i) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

double parse_field(const std::string& field, std::size_t line_no, const std::string& col) {
  const char* begin = field.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v))
    throw io_error("line " + std::to_string(line_no) + ", column " + col +
                   ": cannot parse '" + field + "' as a number");
  return v;
}

} // namespace

NodeSet halton(std::size_t n) {
  NodeSet pts;
  pts.dim = 2;
  pts.coords.resize(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    pts.coords[2 * i] = radical_inverse(i + 1, 2);
    pts.coords[2 * i + 1] = radical_inverse(i + 1, 3);
  }
  return pts;
}

const char* test_function_name(TestFunction id) {
  switch (id) {
    case TestFunction::f1: return "f1";
    case TestFunction::f2: return "f2";
    case TestFunction::f3: return "f3";
    case TestFunction::franke_classic: return "franke";
  }
  return "?";
}

double test_function(TestFunction id, double x1, double x2) {
  constexpr double pi = std::numbers::pi;
  switch (id) {
    case TestFunction::f1: {
      const double a = 9.0 * x1 - 2.0, b = 9.0 * x2 - 2.0;
      const double c = 9.0 * x1 + 1.0, d = 9.0 * x2 + 1.0;
      const double t1 = 0.75 * std::exp(-(a * a + b * b) / 4.0);
      const double t2 = 0.75 * std::exp(-c * c / 49.0 - d / 10.0);
      // the third and fourth summands repeat the first two
      return t1 + t2 + t1 + t2;
    }
    case TestFunction::f2: {
      const double dx = x1 - 0.5, dy = x2 - 0.5;
      if (dx * dx + dy * dy >= 0.08) return -std::exp(-dx * dx + dy * dy);
      return std::sin(x1) + 4.0 * std::sin(x2);
    }
    case TestFunction::f3: {
      // two smooth bands with a jump across the curve x2 = e^{x1} - 1
      if (x2 >= std::exp(x1) - 1.0) return std::sin(0.4 * pi * (x1 + x2));
      return std::sin(0.7 * pi * (x1 + x2)) - 4.0;
    }
    case TestFunction::franke_classic: {
      const double a = 9.0 * x1 - 2.0, b = 9.0 * x2 - 2.0;
      const double c = 9.0 * x1 + 1.0, d = 9.0 * x2 + 1.0;
      const double e = 9.0 * x1 - 7.0, f = 9.0 * x2 - 3.0;
      const double g = 9.0 * x1 - 4.0, h = 9.0 * x2 - 7.0;
      return 0.75 * std::exp(-(a * a + b * b) / 4.0) +
             0.75 * std::exp(-c * c / 49.0 - d / 10.0) +
             0.5 * std::exp(-(e * e + f * f) / 4.0) - 0.2 * std::exp(-g * g - h * h);
    }
  }
  throw argument_error("unknown test function");
}

std::vector<double> sample(TestFunction id, const NodeSet& pts) {
  if (pts.dim != 2) throw argument_error("test functions are bivariate");
  std::vector<double> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double* p = pts.point(i);
    out[i] = test_function(id, p[0], p[1]);
  }
  return out;
}

NodeSet eval_grid(std::size_t side) {
  if (side < 2) throw argument_error("grid side must be >= 2");
  NodeSet g;
  g.dim = 2;
  g.coords.resize(2 * side * side);
  const double den = static_cast<double>(side - 1);
  std::size_t at = 0;
  for (std::size_t i = 0; i < side; ++i) {
    const double x1 = static_cast<double>(i) / den;
    for (std::size_t j = 0; j < side; ++j) {
      g.coords[at++] = x1;
      g.coords[at++] = static_cast<double>(j) / den;
    }
  }
  return g;
}

std::vector<AcetoneRecord> load_acetone_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw io_error("'" + path + "' is empty");
  const auto header = split_csv(line);
  std::size_t it = header.size(), ip = header.size(), ir = header.size();
  for (std::size_t k = 0; k < header.size(); ++k) {
    const std::string h = lower(header[k]);
    if (h == "t") it = k;
    else if (h == "p") ip = k;
    else if (h == "rho") ir = k;
  }
  if (it == header.size() || ip == header.size() || ir == header.size())
    throw io_error("'" + path + "' header must name columns T,p,rho");
  std::vector<AcetoneRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    const std::size_t need = std::max({it, ip, ir}) + 1;
    if (fields.size() < need)
      throw io_error("line " + std::to_string(line_no) + ": expected at least " +
                     std::to_string(need) + " fields, got " + std::to_string(fields.size()));
    AcetoneRecord rec;
    rec.T = parse_field(fields[it], line_no, "T");
    rec.p = parse_field(fields[ip], line_no, "p");
    rec.rho = parse_field(fields[ir], line_no, "rho");
    out.push_back(rec);
  }
  if (out.empty()) throw io_error("'" + path + "' has no data rows");
  return out;
}

F4Surface::F4Surface(const std::vector<AcetoneRecord>& records) {
  if (records.empty()) throw io_error("density surface needs at least one record");
  double tlo = records[0].T, thi = tlo, plo = records[0].p, phi = plo;
  double rlo = records[0].rho, rhi = rlo;
  for (const auto& r : records) {
    tlo = std::min(tlo, r.T); thi = std::max(thi, r.T);
    plo = std::min(plo, r.p); phi = std::max(phi, r.p);
    rlo = std::min(rlo, r.rho); rhi = std::max(rhi, r.rho);
  }
  if (!(thi > tlo)) throw io_error("temperature range is degenerate (max = min)");
  if (!(phi > plo)) throw io_error("pressure range is degenerate (max = min)");
  const double rspan = rhi > rlo ? rhi - rlo : 1.0;
  x_.reserve(records.size());
  y_.reserve(records.size());
  v_.reserve(records.size());
  for (const auto& r : records) {
    x_.push_back((r.T - tlo) / (thi - tlo));
    y_.push_back((r.p - plo) / (phi - plo));
    v_.push_back((r.rho - rlo) / rspan);
  }
}

double F4Surface::operator()(double x1, double x2) const {
  double best = std::numeric_limits<double>::infinity();
  std::size_t at = 0;
  for (std::size_t i = 0; i < x_.size(); ++i) {
    const double dx = x_[i] - x1, dy = y_[i] - x2;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best) {
      best = d2;
      at = i;
    }
  }
  return v_[at];
}

} // namespace vsk
