#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "vsk/data.hpp"
#include "vsk/interp.hpp"
#include "vsk/kernels.hpp"

namespace vsk {

enum class Target { f1, f2, f3, f4, franke_classic };
enum class Method { fsk, deltann_vsk, vsk_f };

const char* target_label(Target t);
Target target_from_name(const std::string& name);
const char* method_label(Method m);
Method method_from_name(const std::string& name);

struct ExperimentConfig {
  Target target = Target::f2;
  std::string f4_csv; // measurement table, required when target = f4
  std::size_t n = 1089;
  KernelSpec kernel{KernelFamily::matern_c2, 0.12};
  std::vector<Method> methods{Method::fsk};
  std::size_t grid_side = 100;
  std::vector<std::uint64_t> seeds{0};
  std::string out_dir = "out";
  int epochs_joint = 0;  // 0 = method default (2000)
  int epochs_direct = 0; // 0 = method default (1000)
  double lr = 1e-4;
  bool write_pgm = false;
  bool write_grids = true;
  int csv_digits = 9;
  int jobs = 1;
};

// empty = valid; otherwise one problem per entry
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

// the target as a function of (x1,x2); f4 snaps to the nearest measurement
class TargetField {
 public:
  static TargetField make(const ExperimentConfig& cfg);
  double operator()(double x1, double x2) const;
  std::vector<double> at(const NodeSet& pts) const;

 private:
  bool use_surface_ = false;
  TestFunction fn_ = TestFunction::f2;
  std::shared_ptr<F4Surface> surface_;
};

struct ReportRow {
  std::string target;
  std::size_t n = 0;
  std::string kernel;
  double epsilon = 0;
  std::string method;
  std::uint64_t seed = 0;
  std::string status; // "ok" or "failed: <reason>"
  double mae = 0, mse = 0, ssim = 0;
  int epochs_done = 0, epochs_max = 0;
  double jitter = 0;
  double gamma = 0;          // least-squares fit of fbar to f on the grid
  double node_resid_rel = 0; // ||K c - f||_inf / (1 + ||f||_inf)

  bool operator==(const ReportRow&) const = default;
};

// wall clock lives outside ReportRow so report.csv stays bit-reproducible
struct RowTiming {
  std::string method;
  std::uint64_t seed = 0;
  double train_seconds = 0, total_seconds = 0;
};

struct BenchmarkReport {
  std::vector<ReportRow> rows;
  std::vector<RowTiming> timings; // aligned with rows
};

BenchmarkReport run_benchmark(const ExperimentConfig& cfg);

void write_report_csv(const std::string& path, const BenchmarkReport& rep);
void write_report_txt(const std::string& path, const BenchmarkReport& rep);
void write_timings_csv(const std::string& path, const BenchmarkReport& rep);
std::vector<ReportRow> parse_report_csv(const std::string& path);

// "none" | "constant=<v>" | "checkpoint=<path>" | "table=<csv>"
ScalingFunction parse_scaling(const std::string& text);

struct LebesgueRun {
  LebesgueProfile profile;
  std::vector<BoundRecord> records;
  std::size_t violations = 0;
};

// lambda profile + bound records over the config grid, artifacts in out_dir
LebesgueRun run_lebesgue(const ExperimentConfig& cfg, const ScalingFunction& scaling);

// self-contained JSON container (network scalings embed their parameters)
void save_interpolant(const std::string& path, const Interpolant& itp);
Interpolant load_interpolant(const std::string& path);

// reads the x1,x2,value format written by write_grid_csv
std::pair<NodeSet, std::vector<double>> read_grid_csv(const std::string& path);

} // namespace vsk
