#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "vsk/bench.hpp"
#include "vsk/errors.hpp"
#include "vsk/metrics.hpp"
#include "vsk/training.hpp"

namespace {

using nlohmann::json;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t pos = s.find(',', start);
    if (pos == std::string::npos) {
      if (start < s.size()) out.push_back(s.substr(start));
      break;
    }
    if (pos > start) out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

vsk::ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw vsk::io_error("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw vsk::io_error("config '" + path + "': " + e.what());
  }
  static const std::vector<std::string> known = {
      "target", "f4_csv", "n", "kernel", "epsilon", "methods", "grid_side", "seeds",
      "out_dir", "epochs_joint", "epochs_direct", "lr", "write_pgm", "write_grids",
      "csv_digits", "jobs"};
  for (const auto& item : j.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end())
      throw vsk::argument_error("config '" + path + "': unknown key '" + item.key() + "'");
  }
  vsk::ExperimentConfig cfg;
  try {
    if (j.contains("target")) cfg.target = vsk::target_from_name(j["target"].get<std::string>());
    if (j.contains("f4_csv")) cfg.f4_csv = j["f4_csv"].get<std::string>();
    if (j.contains("n")) cfg.n = j["n"].get<std::size_t>();
    if (j.contains("kernel"))
      cfg.kernel.family = vsk::kernel_from_name(j["kernel"].get<std::string>());
    if (j.contains("epsilon")) cfg.kernel.epsilon = j["epsilon"].get<double>();
    if (j.contains("methods")) {
      cfg.methods.clear();
      for (const auto& m : j["methods"])
        cfg.methods.push_back(vsk::method_from_name(m.get<std::string>()));
    }
    if (j.contains("grid_side")) cfg.grid_side = j["grid_side"].get<std::size_t>();
    if (j.contains("seeds")) {
      cfg.seeds.clear();
      for (const auto& s : j["seeds"]) cfg.seeds.push_back(s.get<std::uint64_t>());
    }
    if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("epochs_joint")) cfg.epochs_joint = j["epochs_joint"].get<int>();
    if (j.contains("epochs_direct")) cfg.epochs_direct = j["epochs_direct"].get<int>();
    if (j.contains("lr")) cfg.lr = j["lr"].get<double>();
    if (j.contains("write_pgm")) cfg.write_pgm = j["write_pgm"].get<bool>();
    if (j.contains("write_grids")) cfg.write_grids = j["write_grids"].get<bool>();
    if (j.contains("csv_digits")) cfg.csv_digits = j["csv_digits"].get<int>();
    if (j.contains("jobs")) cfg.jobs = j["jobs"].get<int>();
  } catch (const json::exception& e) {
    throw vsk::argument_error("config '" + path + "': " + e.what());
  }
  return cfg;
}

struct CommonFlags {
  std::string target = "f2";
  std::string f4_csv;
  std::size_t n = 1089;
  std::string kernel = "matern2";
  double eps = 0.12;
  std::size_t grid_side = 100;
  std::string out;
  int digits = 9;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--target", f.target, "target surface: f1|f2|f3|f4|franke");
  cmd->add_option("--f4-csv", f.f4_csv, "measurement csv for target f4");
  cmd->add_option("--n", f.n, "number of Halton nodes");
  cmd->add_option("--kernel", f.kernel, "kernel family: gaussian|matern2");
  cmd->add_option("--eps", f.eps, "kernel shape parameter");
  cmd->add_option("--grid-side", f.grid_side, "evaluation grid side");
  cmd->add_option("--digits", f.digits, "significant digits in csv exports (>= 6)");
}

vsk::ExperimentConfig to_config(const CommonFlags& f) {
  vsk::ExperimentConfig cfg;
  cfg.target = vsk::target_from_name(f.target);
  cfg.f4_csv = f.f4_csv;
  cfg.n = f.n;
  cfg.kernel.family = vsk::kernel_from_name(f.kernel);
  cfg.kernel.epsilon = f.eps;
  cfg.grid_side = f.grid_side;
  if (!f.out.empty()) cfg.out_dir = f.out;
  cfg.csv_digits = f.digits;
  return cfg;
}

int do_bench(const vsk::ExperimentConfig& cfg) {
  const auto problems = vsk::validate_config(cfg);
  if (!problems.empty()) {
    for (const auto& p : problems) std::cerr << "config error: " << p << "\n";
    return 2;
  }
  const auto rep = vsk::run_benchmark(cfg);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& r = rep.rows[i];
    if (r.status == "ok") ++ok;
    std::printf("%-10s seed %-4llu %-28s mae %.3e  mse %.3e  ssim %.4f  epochs %d/%d  %.1fs\n",
                r.method.c_str(), static_cast<unsigned long long>(r.seed), r.status.c_str(),
                r.mae, r.mse, r.ssim, r.epochs_done, r.epochs_max,
                rep.timings[i].total_seconds);
  }
  std::printf("report written to %s/report.csv (%zu/%zu rows ok)\n", cfg.out_dir.c_str(), ok,
              rep.rows.size());
  if (ok == 0 && !rep.rows.empty()) return 3;
  return 0;
}

int do_fit(const CommonFlags& flags, const std::string& scaling_text, const std::string& out) {
  auto cfg = to_config(flags);
  if (cfg.n < 1) throw vsk::argument_error("n must be >= 1");
  const auto field = vsk::TargetField::make(cfg);
  const vsk::NodeSet nodes = vsk::halton(cfg.n);
  const vsk::ScatteredData data{nodes, field.at(nodes)};
  const auto scaling = vsk::parse_scaling(scaling_text);
  const auto itp = vsk::fit(data, cfg.kernel, scaling);
  vsk::save_interpolant(out, itp);
  std::printf("fit: %zu nodes, kernel %s eps %g, jitter %.1e, node residual %.3e -> %s\n",
              cfg.n, vsk::kernel_name(cfg.kernel.family), cfg.kernel.epsilon, itp.jitter,
              itp.node_residual, out.c_str());
  return 0;
}

int do_eval(const std::string& interp_path, std::size_t grid_side,
            const std::string& points_csv, const std::string& out, const std::string& pgm,
            int digits) {
  const auto itp = vsk::load_interpolant(interp_path);
  vsk::NodeSet pts;
  if (!points_csv.empty()) {
    pts = vsk::read_grid_csv(points_csv).first;
    if (!pgm.empty())
      throw vsk::argument_error("--pgm needs a square grid; use --grid-side");
  } else {
    pts = vsk::eval_grid(grid_side);
  }
  const auto vals = vsk::evaluate(itp, pts);
  vsk::write_grid_csv(out, pts, vals, digits);
  if (!pgm.empty()) {
    double lo = vals[0], hi = vals[0];
    for (double v : vals) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (!(hi > lo)) throw vsk::argument_error("constant surface cannot be rendered");
    vsk::write_pgm(pgm, vsk::to_image(vals, grid_side, lo, hi));
  }
  std::printf("evaluated %zu points -> %s\n", pts.size(), out.c_str());
  return 0;
}

int do_lebesgue(const CommonFlags& flags, const std::string& scaling_text) {
  auto cfg = to_config(flags);
  const auto scaling = vsk::parse_scaling(scaling_text);
  const auto run = vsk::run_lebesgue(cfg, scaling);
  std::printf(
      "lebesgue: %zu nodes, %zu grid points, Lambda estimate (grid max) %.6g, "
      "bound violations %zu\n",
      cfg.n, run.profile.eval_points.size(), run.profile.lambda_sup, run.violations);
  return 0;
}

int do_train(const CommonFlags& flags, const std::string& method, std::uint64_t seed,
             int epochs, double lr, const std::string& out, const std::string& log_path) {
  auto cfg = to_config(flags);
  const auto field = vsk::TargetField::make(cfg);
  const vsk::NodeSet nodes = vsk::halton(cfg.n);
  const vsk::ScatteredData data{nodes, field.at(nodes)};
  vsk::TrainConfig tc;
  tc.max_epochs = epochs;
  tc.seed = seed;
  tc.adam.lr0 = lr;
  std::vector<vsk::EpochLog> history;
  if (method == "joint") {
    auto res = vsk::train_joint(data, cfg.kernel, tc);
    vsk::save_checkpoint(out, res.theta, seed, static_cast<std::uint32_t>(res.epochs_done));
    history = std::move(res.history);
    std::printf("joint: %d/%d epochs, final loss %.6e -> %s\n", res.epochs_done,
                res.epochs_max, history.back().loss, out.c_str());
  } else if (method == "direct") {
    auto res = vsk::train_direct(data, tc);
    vsk::save_checkpoint(out, res.theta, seed, static_cast<std::uint32_t>(res.best_epoch));
    history = std::move(res.history);
    std::printf("direct: %d/%d epochs, best val mse %.6e at epoch %d -> %s\n",
                res.epochs_done, res.epochs_max, res.best_val_mse, res.best_epoch,
                out.c_str());
  } else {
    throw vsk::argument_error("unknown training method '" + method +
                              "' (expected joint or direct)");
  }
  if (!log_path.empty()) {
    std::ofstream log(log_path);
    if (!log) throw vsk::io_error("cannot open '" + log_path + "' for writing");
    log << "epoch,loss,val_loss,lr\n";
    for (const auto& e : history) {
      log << e.epoch << ',' << e.loss << ',';
      if (std::isfinite(e.val_loss)) log << e.val_loss;
      log << ',' << e.lr << '\n';
    }
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"variably scaled kernel interpolation workbench"};
  app.require_subcommand(1);

  // bench
  auto* bench = app.add_subcommand("bench", "run a benchmark config and write reports");
  std::string cfg_path, methods_flag, seeds_flag;
  CommonFlags bench_flags;
  int jobs = 0, epochs_joint = -1, epochs_direct = -1;
  double lr = 0.0;
  bool pgm_flag = false, no_grids = false;
  bench->add_option("--config", cfg_path, "json config file (flags override it)");
  add_common(bench, bench_flags);
  bench_flags.out.clear();
  bench->add_option("--methods", methods_flag, "comma list: FSK,DeltaNNVSK,VSKf");
  bench->add_option("--seed", seeds_flag, "comma list of seeds");
  bench->add_option("--out", bench_flags.out, "output directory");
  bench->add_option("--jobs", jobs, "parallel rows");
  bench->add_option("--epochs-joint", epochs_joint, "joint epoch budget (0 = default 2000)");
  bench->add_option("--epochs-direct", epochs_direct, "direct epoch budget (0 = default 1000)");
  bench->add_option("--lr", lr, "initial learning rate");
  bench->add_flag("--pgm", pgm_flag, "also write pgm images");
  bench->add_flag("--no-grids", no_grids, "skip grid csv artifacts");

  // fit
  auto* fitc = app.add_subcommand("fit", "fit one interpolant and save it as json");
  CommonFlags fit_flags;
  std::string fit_scaling = "none", fit_out = "interpolant.json";
  add_common(fitc, fit_flags);
  fitc->add_option("--scaling", fit_scaling,
                   "none | constant=<v> | checkpoint=<path> | table=<csv>");
  fitc->add_option("--out", fit_out, "output interpolant json");

  // eval
  auto* evalc = app.add_subcommand("eval", "evaluate a saved interpolant");
  std::string eval_interp, eval_points, eval_out = "grid.csv", eval_pgm;
  std::size_t eval_side = 100;
  int eval_digits = 9;
  evalc->add_option("--interpolant", eval_interp, "interpolant json from fit")->required();
  evalc->add_option("--grid-side", eval_side, "evaluation grid side");
  evalc->add_option("--points", eval_points, "csv of evaluation points (x1,x2,value)");
  evalc->add_option("--out", eval_out, "output csv");
  evalc->add_option("--pgm", eval_pgm, "also render a pgm image");
  evalc->add_option("--digits", eval_digits, "significant digits in csv exports");

  // lebesgue
  auto* lebc = app.add_subcommand("lebesgue", "lambda profile and error-bound check");
  CommonFlags leb_flags;
  std::string leb_scaling = "none";
  add_common(lebc, leb_flags);
  lebc->add_option("--scaling", leb_scaling,
                   "none | constant=<v> | checkpoint=<path> | table=<csv>");
  lebc->add_option("--out", leb_flags.out, "output directory");

  // train-scaling
  auto* trainc = app.add_subcommand("train-scaling", "train a scaling network checkpoint");
  CommonFlags train_flags;
  std::string train_method = "joint", train_out = "scaling.ckpt", train_log;
  std::uint64_t train_seed = 0;
  int train_epochs = 0;
  double train_lr = 1e-4;
  add_common(trainc, train_flags);
  trainc->add_option("--method", train_method, "joint | direct");
  trainc->add_option("--seed", train_seed, "training seed");
  trainc->add_option("--epochs", train_epochs, "epoch budget (0 = method default)");
  trainc->add_option("--lr", train_lr, "initial learning rate");
  trainc->add_option("--out", train_out, "checkpoint path")->required();
  trainc->add_option("--log", train_log, "write a train_log csv here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*bench) {
      vsk::ExperimentConfig cfg =
          cfg_path.empty() ? vsk::ExperimentConfig{} : load_config_file(cfg_path);
      if (bench->count("--target")) cfg.target = vsk::target_from_name(bench_flags.target);
      if (bench->count("--f4-csv")) cfg.f4_csv = bench_flags.f4_csv;
      if (bench->count("--n")) cfg.n = bench_flags.n;
      if (bench->count("--kernel"))
        cfg.kernel.family = vsk::kernel_from_name(bench_flags.kernel);
      if (bench->count("--eps")) cfg.kernel.epsilon = bench_flags.eps;
      if (bench->count("--grid-side")) cfg.grid_side = bench_flags.grid_side;
      if (bench->count("--digits")) cfg.csv_digits = bench_flags.digits;
      if (bench->count("--methods")) {
        cfg.methods.clear();
        for (const auto& m : split_list(methods_flag))
          cfg.methods.push_back(vsk::method_from_name(m));
      }
      if (bench->count("--seed")) {
        cfg.seeds.clear();
        for (const auto& s : split_list(seeds_flag))
          cfg.seeds.push_back(std::strtoull(s.c_str(), nullptr, 10));
      }
      if (bench->count("--out")) cfg.out_dir = bench_flags.out;
      if (bench->count("--jobs")) cfg.jobs = jobs;
      if (bench->count("--epochs-joint")) cfg.epochs_joint = epochs_joint;
      if (bench->count("--epochs-direct")) cfg.epochs_direct = epochs_direct;
      if (bench->count("--lr")) cfg.lr = lr;
      if (pgm_flag) cfg.write_pgm = true;
      if (no_grids) cfg.write_grids = false;
      return do_bench(cfg);
    }
    if (*fitc) return do_fit(fit_flags, fit_scaling, fit_out);
    if (*evalc)
      return do_eval(eval_interp, eval_side, eval_points, eval_out, eval_pgm, eval_digits);
    if (*lebc) {
      if (leb_flags.out.empty()) leb_flags.out = "out";
      return do_lebesgue(leb_flags, leb_scaling);
    }
    if (*trainc)
      return do_train(train_flags, train_method, train_seed, train_epochs, train_lr,
                      train_out, train_log);
  } catch (const vsk::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
