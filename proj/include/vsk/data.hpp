#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vsk/kernels.hpp"

namespace vsk {

struct ScatteredData {
  NodeSet nodes;
  std::vector<double> values;
};

// 2d Halton points (bases 2 and 3), indices 1..n, in [0,1)^2
NodeSet halton(std::size_t n);

enum class TestFunction { f1, f2, f3, franke_classic };

const char* test_function_name(TestFunction id);
double test_function(TestFunction id, double x1, double x2);
std::vector<double> sample(TestFunction id, const NodeSet& pts);

// side x side uniform grid on [0,1]^2 including both endpoints; the first
// coordinate is the outer loop: (0,0), (0,h), ..., (h,0), ...
NodeSet eval_grid(std::size_t side);

struct AcetoneRecord {
  double T = 0, p = 0, rho = 0;
};

// comma-separated, header names T,p,rho (case-insensitive, any order)
std::vector<AcetoneRecord> load_acetone_csv(const std::string& path);

// density surface over min-max normalized (T,p); queries snap to the nearest
// measurement (ties -> lowest record index), output normalized to [0,1]
class F4Surface {
 public:
  explicit F4Surface(const std::vector<AcetoneRecord>& records);
  double operator()(double x1, double x2) const;
  std::size_t size() const { return x_.size(); }

 private:
  std::vector<double> x_, y_, v_;
};

} // namespace vsk
