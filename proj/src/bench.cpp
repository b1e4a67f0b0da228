#include "vsk/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "vsk/errors.hpp"
#include "vsk/metrics.hpp"
#include "vsk/simd.hpp"
#include "vsk/training.hpp"

namespace vsk {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sanitize(std::string s) {
  for (auto& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

std::string mmss(double seconds) {
  const int whole = static_cast<int>(seconds);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02d:%05.2f", whole / 60, seconds - 60.0 * (whole / 60));
  return buf;
}

double strict_double(const std::string& s, const std::string& where) {
  const char* b = s.c_str();
  char* e = nullptr;
  const double v = std::strtod(b, &e);
  if (e == b || *e != '\0')
    throw io_error(where + ": cannot parse '" + s + "' as a number");
  return v;
}

std::vector<std::string> split_on_comma(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

constexpr const char* k_report_header =
    "target,n,kernel,epsilon,method,seed,status,mae,mse,ssim,epochs_done,epochs_max,"
    "jitter,gamma,node_resid_rel";

void write_train_log(const std::string& path, const std::vector<EpochLog>& log) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out << "epoch,loss,val_loss,lr\n";
  for (const auto& e : log) {
    out << e.epoch << ',' << fmt17(e.loss) << ',';
    if (std::isfinite(e.val_loss)) out << fmt17(e.val_loss);
    out << ',' << fmt17(e.lr) << '\n';
  }
}

} // namespace

const char* target_label(Target t) {
  switch (t) {
    case Target::f1: return "f1";
    case Target::f2: return "f2";
    case Target::f3: return "f3";
    case Target::f4: return "f4";
    case Target::franke_classic: return "franke";
  }
  return "?";
}

Target target_from_name(const std::string& name) {
  if (name == "f1") return Target::f1;
  if (name == "f2") return Target::f2;
  if (name == "f3") return Target::f3;
  if (name == "f4") return Target::f4;
  if (name == "franke" || name == "franke_classic") return Target::franke_classic;
  throw argument_error("unknown target '" + name + "'");
}

const char* method_label(Method m) {
  switch (m) {
    case Method::fsk: return "FSK";
    case Method::deltann_vsk: return "DeltaNNVSK";
    case Method::vsk_f: return "VSKf";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "FSK" || name == "fsk") return Method::fsk;
  if (name == "DeltaNNVSK" || name == "deltann" || name == "deltann_vsk")
    return Method::deltann_vsk;
  if (name == "VSKf" || name == "vskf" || name == "vsk_f") return Method::vsk_f;
  throw argument_error("unknown method '" + name + "'");
}

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
  std::vector<std::string> problems;
  if (cfg.n < 1) problems.push_back("n must be >= 1");
  if (cfg.grid_side < 11) problems.push_back("grid side must be >= 11 (ssim window)");
  if (cfg.methods.empty()) problems.push_back("at least one method is required");
  if (cfg.seeds.empty()) problems.push_back("at least one seed is required");
  if (!(cfg.kernel.epsilon > 0.0) || !std::isfinite(cfg.kernel.epsilon))
    problems.push_back("kernel epsilon must be finite and > 0");
  if (cfg.target == Target::f4 && cfg.f4_csv.empty())
    problems.push_back("target f4 needs a measurement csv");
  const bool wants_direct =
      std::find(cfg.methods.begin(), cfg.methods.end(), Method::vsk_f) != cfg.methods.end();
  if (wants_direct && cfg.n < 5)
    problems.push_back("VSKf needs n >= 5 for the validation split");
  if (cfg.jobs < 1) problems.push_back("jobs must be >= 1");
  if (!(cfg.lr > 0.0) || !std::isfinite(cfg.lr)) problems.push_back("lr must be finite and > 0");
  if (cfg.epochs_joint < 0 || cfg.epochs_direct < 0)
    problems.push_back("epoch budgets cannot be negative");
  return problems;
}

TargetField TargetField::make(const ExperimentConfig& cfg) {
  TargetField f;
  switch (cfg.target) {
    case Target::f1: f.fn_ = TestFunction::f1; break;
    case Target::f2: f.fn_ = TestFunction::f2; break;
    case Target::f3: f.fn_ = TestFunction::f3; break;
    case Target::franke_classic: f.fn_ = TestFunction::franke_classic; break;
    case Target::f4:
      f.use_surface_ = true;
      f.surface_ = std::make_shared<F4Surface>(load_acetone_csv(cfg.f4_csv));
      break;
  }
  return f;
}

double TargetField::operator()(double x1, double x2) const {
  return use_surface_ ? (*surface_)(x1, x2) : test_function(fn_, x1, x2);
}

std::vector<double> TargetField::at(const NodeSet& pts) const {
  std::vector<double> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double* p = pts.point(i);
    out[i] = (*this)(p[0], p[1]);
  }
  return out;
}

BenchmarkReport run_benchmark(const ExperimentConfig& cfg) {
  {
    const auto problems = validate_config(cfg);
    if (!problems.empty()) {
      std::string msg = "invalid config:";
      for (const auto& p : problems) msg += " " + p + ";";
      throw argument_error(msg);
    }
  }
  std::filesystem::create_directories(cfg.out_dir);
  const auto dir = std::filesystem::path(cfg.out_dir);

  const TargetField field = TargetField::make(cfg);
  const NodeSet nodes = halton(cfg.n);
  const ScatteredData data{nodes, field.at(nodes)};
  const NodeSet grid = eval_grid(cfg.grid_side);
  const std::vector<double> truth = field.at(grid);
  double lo = truth[0], hi = truth[0], fmax = 0.0;
  for (double v : truth) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (double v : data.values) fmax = std::max(fmax, std::fabs(v));
  double truth_dot = 0.0;
  for (double v : truth) truth_dot += v * v;

  const std::string base_tag =
      std::string(target_label(cfg.target)) + "_n" + std::to_string(cfg.n);
  if (cfg.write_grids)
    write_grid_csv((dir / ("grid_" + base_tag + "_target.csv")).string(), grid, truth,
                   cfg.csv_digits);
  if (cfg.write_pgm && hi > lo)
    write_pgm((dir / (base_tag + "_target.pgm")).string(),
              to_image(truth, cfg.grid_side, lo, hi));

  struct Task {
    Method method;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (Method m : {Method::fsk, Method::deltann_vsk, Method::vsk_f}) {
    if (std::find(cfg.methods.begin(), cfg.methods.end(), m) == cfg.methods.end()) continue;
    for (std::uint64_t s : cfg.seeds) tasks.push_back({m, s});
  }

  BenchmarkReport rep;
  rep.rows.resize(tasks.size());
  rep.timings.resize(tasks.size());

  auto run_task = [&](std::size_t ti) {
    const Task task = tasks[ti];
    ReportRow row;
    row.target = target_label(cfg.target);
    row.n = cfg.n;
    row.kernel = kernel_name(cfg.kernel.family);
    row.epsilon = cfg.kernel.epsilon;
    row.method = method_label(task.method);
    row.seed = task.seed;
    RowTiming tim;
    tim.method = row.method;
    tim.seed = task.seed;
    const auto t_row = std::chrono::steady_clock::now();
    try {
      Interpolant itp;
      std::vector<EpochLog> log;
      int ed = 0, em = 0;
      if (task.method == Method::fsk) {
        itp = fit(data, cfg.kernel, ScalingFunction::none());
      } else if (task.method == Method::deltann_vsk) {
        TrainConfig tc;
        tc.max_epochs = cfg.epochs_joint;
        tc.seed = task.seed;
        tc.adam.lr0 = cfg.lr;
        const auto t0 = std::chrono::steady_clock::now();
        auto res = train_joint(data, cfg.kernel, tc);
        tim.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        ed = res.epochs_done;
        em = res.epochs_max;
        log = std::move(res.history);
        itp = build_network_interpolant(std::move(res.theta), data, cfg.kernel);
      } else {
        TrainConfig tc;
        tc.max_epochs = cfg.epochs_direct;
        tc.seed = task.seed;
        tc.adam.lr0 = cfg.lr;
        const auto t0 = std::chrono::steady_clock::now();
        auto res = train_direct(data, tc);
        tim.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        ed = res.epochs_done;
        em = res.epochs_max;
        log = std::move(res.history);
        itp = build_network_interpolant(std::move(res.theta), data, cfg.kernel);
      }
      const auto pred = evaluate(itp, grid);
      row.mae = mae(truth, pred);
      row.mse = mse(truth, pred);
      row.ssim = ssim(to_image(truth, cfg.grid_side, lo, hi),
                      to_image(pred, cfg.grid_side, lo, hi));
      row.epochs_done = ed;
      row.epochs_max = em;
      row.jitter = itp.jitter;
      row.node_resid_rel = itp.node_residual / (1.0 + fmax);

      const std::string tag = base_tag + "_" + row.method + "_s" + std::to_string(task.seed);
      std::vector<double> scal;
      if (!itp.scaling.is_none()) {
        scal = eval_scaling(itp.scaling, grid);
        if (truth_dot > 0.0) {
          double num = 0.0;
          for (std::size_t i = 0; i < scal.size(); ++i) num += scal[i] * truth[i];
          row.gamma = num / truth_dot;
        }
      }
      if (cfg.write_grids) {
        write_grid_csv((dir / ("grid_" + tag + ".csv")).string(), grid, pred, cfg.csv_digits);
        if (!scal.empty())
          write_grid_csv((dir / ("scaling_" + tag + ".csv")).string(), grid, scal,
                         cfg.csv_digits);
      }
      if (cfg.write_pgm)
        write_pgm((dir / (tag + ".pgm")).string(), to_image(pred, cfg.grid_side, lo, hi));
      if (!log.empty()) write_train_log((dir / ("train_log_" + tag + ".csv")).string(), log);
      row.status = "ok";
    } catch (const std::exception& e) {
      // keep identity fields, zero the metrics, record the reason
      ReportRow clean;
      clean.target = row.target;
      clean.n = row.n;
      clean.kernel = row.kernel;
      clean.epsilon = row.epsilon;
      clean.method = row.method;
      clean.seed = row.seed;
      clean.status = sanitize(std::string("failed: ") + e.what());
      row = clean;
    }
    tim.total_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_row).count();
    rep.rows[ti] = std::move(row);
    rep.timings[ti] = tim;
  };

  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(cfg.jobs), tasks.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) run_task(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= tasks.size()) break;
          run_task(i);
        }
      });
    for (auto& t : pool) t.join();
  }

  write_report_csv((dir / "report.csv").string(), rep);
  write_report_txt((dir / "report.txt").string(), rep);
  write_timings_csv((dir / "timings.csv").string(), rep);
  return rep;
}

void write_report_csv(const std::string& path, const BenchmarkReport& rep) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out << k_report_header << '\n';
  for (const auto& r : rep.rows) {
    out << r.target << ',' << r.n << ',' << r.kernel << ',' << fmt17(r.epsilon) << ','
        << r.method << ',' << r.seed << ',' << r.status << ',' << fmt17(r.mae) << ','
        << fmt17(r.mse) << ',' << fmt17(r.ssim) << ',' << r.epochs_done << ','
        << r.epochs_max << ',' << fmt17(r.jitter) << ',' << fmt17(r.gamma) << ','
        << fmt17(r.node_resid_rel) << '\n';
  }
  if (!out) throw io_error("failed writing '" + path + "'");
}

void write_report_txt(const std::string& path, const BenchmarkReport& rep) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-8s %6s %-9s %-8s %-11s %5s %-11s %-11s %-7s %-11s %-9s %-9s %s\n",
                "target", "n", "kernel", "eps", "method", "seed", "mae", "mse", "ssim",
                "epochs", "jitter", "time", "status");
  out << buf;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& r = rep.rows[i];
    const double tsec = i < rep.timings.size() ? rep.timings[i].train_seconds : 0.0;
    std::string epochs = std::to_string(r.epochs_done) + "/" + std::to_string(r.epochs_max);
    std::snprintf(buf, sizeof buf,
                  "%-8s %6zu %-9s %-8.4g %-11s %5llu %-11.4e %-11.4e %-7.4f %-11s %-9.1e %-9s %s\n",
                  r.target.c_str(), r.n, r.kernel.c_str(), r.epsilon, r.method.c_str(),
                  static_cast<unsigned long long>(r.seed), r.mae, r.mse, r.ssim,
                  epochs.c_str(), r.jitter, mmss(tsec).c_str(), r.status.c_str());
    out << buf;
  }
}

void write_timings_csv(const std::string& path, const BenchmarkReport& rep) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out << "target,n,kernel,method,seed,train_seconds,total_seconds\n";
  char buf[64];
  for (std::size_t i = 0; i < rep.rows.size() && i < rep.timings.size(); ++i) {
    const auto& r = rep.rows[i];
    const auto& t = rep.timings[i];
    out << r.target << ',' << r.n << ',' << r.kernel << ',' << r.method << ',' << r.seed << ',';
    std::snprintf(buf, sizeof buf, "%.3f,%.3f\n", t.train_seconds, t.total_seconds);
    out << buf;
  }
}

std::vector<ReportRow> parse_report_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != k_report_header)
    throw io_error("'" + path + "' does not start with the report header");
  std::vector<ReportRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_on_comma(line);
    if (f.size() != 15)
      throw io_error("'" + path + "' line " + std::to_string(line_no) + ": expected 15 fields");
    const std::string where = path + " line " + std::to_string(line_no);
    ReportRow r;
    r.target = f[0];
    r.n = static_cast<std::size_t>(std::strtoull(f[1].c_str(), nullptr, 10));
    r.kernel = f[2];
    r.epsilon = strict_double(f[3], where);
    r.method = f[4];
    r.seed = std::strtoull(f[5].c_str(), nullptr, 10);
    r.status = f[6];
    r.mae = strict_double(f[7], where);
    r.mse = strict_double(f[8], where);
    r.ssim = strict_double(f[9], where);
    r.epochs_done = static_cast<int>(std::strtol(f[10].c_str(), nullptr, 10));
    r.epochs_max = static_cast<int>(std::strtol(f[11].c_str(), nullptr, 10));
    r.jitter = strict_double(f[12], where);
    r.gamma = strict_double(f[13], where);
    r.node_resid_rel = strict_double(f[14], where);
    rows.push_back(std::move(r));
  }
  return rows;
}

ScalingFunction parse_scaling(const std::string& text) {
  if (text.empty() || text == "none") return ScalingFunction::none();
  const auto eq = text.find('=');
  const std::string kind = text.substr(0, eq == std::string::npos ? text.size() : eq);
  const std::string arg = eq == std::string::npos ? "" : text.substr(eq + 1);
  if (kind == "constant") {
    return ScalingFunction::constant(strict_double(arg, "scaling constant"));
  }
  if (kind == "checkpoint") {
    if (arg.empty()) throw argument_error("checkpoint scaling needs a path");
    auto ck = load_checkpoint(arg);
    return ScalingFunction::network(
        std::make_shared<const NetworkParams>(std::move(ck.params)));
  }
  if (kind == "table") {
    if (arg.empty()) throw argument_error("table scaling needs a csv path");
    auto [pts, vals] = read_grid_csv(arg);
    return ScalingFunction::tabulated(TabulatedScaling{std::move(pts), std::move(vals)});
  }
  throw argument_error("unknown scaling '" + text +
                       "' (expected none, constant=<v>, checkpoint=<path>, table=<csv>)");
}

LebesgueRun run_lebesgue(const ExperimentConfig& cfg, const ScalingFunction& scaling) {
  if (cfg.n < 1) throw argument_error("n must be >= 1");
  if (cfg.grid_side < 2) throw argument_error("grid side must be >= 2");
  validate(cfg.kernel);
  std::filesystem::create_directories(cfg.out_dir);
  const auto dir = std::filesystem::path(cfg.out_dir);

  const TargetField field = TargetField::make(cfg);
  const NodeSet nodes = halton(cfg.n);
  const ScatteredData data{nodes, field.at(nodes)};
  const NodeSet grid = eval_grid(cfg.grid_side);
  const std::vector<double> truth = field.at(grid);

  Interpolant pf = fit(data, cfg.kernel, scaling);
  LebesgueRun run;
  run.profile = lebesgue_profile(pf, grid);

  std::vector<double> fbar_nodes = pf.cache->node_scaling;
  if (fbar_nodes.empty()) fbar_nodes.assign(cfg.n, 0.0);
  Interpolant pfb = pf;
  pfb.values = fbar_nodes;
  pfb.coefficients =
      refine_solve(pf.cache->gram, pf.cache->factor, fbar_nodes.data(), &pfb.node_residual);

  const auto pf_vals = evaluate(pf, grid);
  const auto pfb_vals = evaluate(pfb, grid);
  double enorm = 0.0;
  for (std::size_t i = 0; i < cfg.n; ++i)
    enorm = std::max(enorm, std::fabs(data.values[i] - fbar_nodes[i]));

  run.records.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    BoundRecord rec;
    rec.lhs = std::fabs(truth[k] - pf_vals[k]);
    rec.rhs = std::fabs(truth[k] - pfb_vals[k]) + enorm * run.profile.lambda_values[k];
    rec.holds = rec.lhs <= rec.rhs + 1e-8 * (1.0 + rec.rhs);
    if (!rec.holds) ++run.violations;
    run.records[k] = rec;
  }

  const std::string tag =
      std::string(target_label(cfg.target)) + "_n" + std::to_string(cfg.n);
  write_grid_csv((dir / ("lebesgue_" + tag + ".csv")).string(), grid,
                 run.profile.lambda_values, cfg.csv_digits);
  std::ofstream out((dir / ("bound_" + tag + ".csv")).string());
  if (!out) throw io_error("cannot write bound records");
  out << "x1,x2,lhs,rhs,holds\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double* p = grid.point(k);
    out << fmt17(p[0]) << ',' << fmt17(p[1]) << ',' << fmt17(run.records[k].lhs) << ','
        << fmt17(run.records[k].rhs) << ',' << (run.records[k].holds ? 1 : 0) << '\n';
  }
  return run;
}

void save_interpolant(const std::string& path, const Interpolant& itp) {
  if (!itp.cache) throw argument_error("interpolant has not been fitted");
  json j;
  j["kernel"] = {{"family", kernel_name(itp.kernel.family)}, {"epsilon", itp.kernel.epsilon}};
  j["dim"] = itp.centers.dim;
  j["nodes"] = itp.centers.coords;
  j["values"] = itp.values;
  j["coefficients"] = itp.coefficients;
  j["jitter"] = itp.jitter;
  j["node_residual"] = itp.node_residual;
  json s;
  if (itp.scaling.is_none()) {
    s["type"] = "none";
  } else if (const auto* c = std::get_if<ScalingFunction::Constant>(&itp.scaling.fn)) {
    s["type"] = "constant";
    s["value"] = c->value;
  } else if (const auto* t = std::get_if<TabulatedScaling>(&itp.scaling.fn)) {
    s["type"] = "table";
    s["points"] = t->points.coords;
    s["values"] = t->values;
  } else {
    const auto& net = std::get<ScalingFunction::Network>(itp.scaling.fn);
    s["type"] = "network";
    s["descriptor"] = arch_descriptor(net.params->arch());
    s["params"] = net.params->flat();
  }
  j["scaling"] = s;
  std::ofstream out(path);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out << j.dump();
  if (!out) throw io_error("failed writing '" + path + "'");
}

Interpolant load_interpolant(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw io_error("'" + path + "': " + e.what());
  }
  try {
    KernelSpec kernel;
    kernel.family = kernel_from_name(j.at("kernel").at("family").get<std::string>());
    kernel.epsilon = j.at("kernel").at("epsilon").get<double>();
    NodeSet nodes;
    nodes.dim = j.at("dim").get<std::size_t>();
    nodes.coords = j.at("nodes").get<std::vector<double>>();
    ScatteredData data{std::move(nodes), j.at("values").get<std::vector<double>>()};

    const json& s = j.at("scaling");
    const std::string type = s.at("type").get<std::string>();
    ScalingFunction scaling = ScalingFunction::none();
    if (type == "constant") {
      scaling = ScalingFunction::constant(s.at("value").get<double>());
    } else if (type == "table") {
      TabulatedScaling t;
      t.points.dim = 2;
      t.points.coords = s.at("points").get<std::vector<double>>();
      t.values = s.at("values").get<std::vector<double>>();
      scaling = ScalingFunction::tabulated(std::move(t));
    } else if (type == "network") {
      NetworkParams p(arch_from_descriptor(s.at("descriptor").get<std::string>()));
      p.set_flat(s.at("params").get<std::vector<double>>());
      scaling = ScalingFunction::network(std::make_shared<const NetworkParams>(std::move(p)));
    } else if (type != "none") {
      throw io_error("'" + path + "': unknown scaling type '" + type + "'");
    }

    Interpolant itp = fit(data, kernel, scaling);
    // the stored coefficients are authoritative so a load reproduces the
    // original fit even across hosts
    auto stored = j.at("coefficients").get<std::vector<double>>();
    if (stored.size() != itp.coefficients.size())
      throw io_error("'" + path + "': coefficient count does not match the nodes");
    itp.coefficients = std::move(stored);
    itp.node_residual = j.value("node_residual", itp.node_residual);
    return itp;
  } catch (const json::exception& e) {
    throw io_error("'" + path + "': " + e.what());
  }
}

std::pair<NodeSet, std::vector<double>> read_grid_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != "x1,x2,value")
    throw io_error("'" + path + "' must start with header x1,x2,value");
  NodeSet pts;
  pts.dim = 2;
  std::vector<double> vals;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_on_comma(line);
    if (f.size() != 3)
      throw io_error("'" + path + "' line " + std::to_string(line_no) + ": expected 3 fields");
    const std::string where = path + " line " + std::to_string(line_no);
    pts.coords.push_back(strict_double(f[0], where));
    pts.coords.push_back(strict_double(f[1], where));
    vals.push_back(strict_double(f[2], where));
  }
  if (vals.empty()) throw io_error("'" + path + "' has no data rows");
  return {std::move(pts), std::move(vals)};
}

} // namespace vsk
