// end-to-end gates for the interpolation benchmarks: one printed line per
// check, nonzero exit when any gate fails
#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "vsk/bench.hpp"
#include "vsk/deltann.hpp"
#include "vsk/errors.hpp"
#include "vsk/metrics.hpp"
#include "vsk/rng.hpp"
#include "vsk/training.hpp"

using namespace vsk;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;
std::vector<double> g_node_resids; // relative node residual of every fitted row

std::string str(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

void report(int id, bool pass, const std::string& detail) {
  std::printf("[%s] %2d. %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

const fs::path& scratch() {
  static const fs::path p = [] {
    fs::path q = fs::temp_directory_path() / "vsk_acceptance";
    fs::remove_all(q);
    fs::create_directories(q);
    return q;
  }();
  return p;
}

double med3(double a, double b, double c) {
  std::vector<double> v{a, b, c};
  std::sort(v.begin(), v.end());
  return v[1];
}

BenchmarkReport bench(ExperimentConfig cfg, const char* tag) {
  cfg.out_dir = (scratch() / tag).string();
  cfg.write_grids = false;
  BenchmarkReport rep = run_benchmark(cfg);
  for (const auto& r : rep.rows)
    if (r.status == "ok") g_node_resids.push_back(r.node_resid_rel);
  return rep;
}

// rows of one method, in seed order; empty if any of them failed
std::vector<const ReportRow*> ok_rows(const BenchmarkReport& rep, const char* method,
                                      std::string* why) {
  std::vector<const ReportRow*> out;
  for (const auto& r : rep.rows) {
    if (r.method != method) continue;
    if (r.status != "ok") {
      *why = r.method + " seed " + std::to_string(r.seed) + " " + r.status;
      return {};
    }
    out.push_back(&r);
  }
  if (out.empty()) *why = std::string(method) + ": no rows produced";
  return out;
}

NodeSet random_points(std::size_t n, Rng& rng) {
  NodeSet pts;
  pts.dim = 2;
  for (std::size_t i = 0; i < 2 * n; ++i) pts.coords.push_back(rng.next_double());
  return pts;
}

TabulatedScaling random_table(const NodeSet& pts, std::uint64_t seed) {
  TabulatedScaling t;
  t.points = pts;
  Rng rng(seed, "table");
  for (std::size_t i = 0; i < pts.size(); ++i) t.values.push_back(rng.uniform(-2.0, 2.0));
  return t;
}

} // namespace

int main() {
  const KernelSpec matern012{KernelFamily::matern_c2, 0.12};
  const KernelSpec matern048{KernelFamily::matern_c2, 0.48};

  // ---- 1: plain kernel on f2 at n=1089 against the reference value ----
  double fsk_f2_mae = 0.0;
  {
    ExperimentConfig cfg;
    cfg.target = Target::f2;
    cfg.n = 1089;
    cfg.kernel = matern012;
    const BenchmarkReport rep = bench(cfg, "c1");
    std::string why;
    const auto rows = ok_rows(rep, "FSK", &why);
    if (rows.empty()) {
      report(1, false, "fsk f2 n=1089: " + why);
    } else {
      fsk_f2_mae = rows[0]->mae;
      const double ratio = fsk_f2_mae / 1.45e-1;
      const double secs = rep.timings[0].total_seconds;
      const bool pass = ratio >= 0.7 && ratio <= 1.4 && secs < 60.0;
      report(1, pass,
             str("fsk f2 n=1089 matern eps=0.12: mae %.4e = %.3fx of 1.45e-01 (want "
                 "[0.7,1.4]x), solve+score %.1fs (< 60s)",
                 fsk_f2_mae, ratio, secs));
    }
  }

  // ---- 2: plain kernel on f3 at n=1521 ----
  {
    ExperimentConfig cfg;
    cfg.target = Target::f3;
    cfg.n = 1521;
    cfg.kernel = matern048;
    const BenchmarkReport rep = bench(cfg, "c2");
    std::string why;
    const auto rows = ok_rows(rep, "FSK", &why);
    if (rows.empty()) {
      report(2, false, "fsk f3 n=1521: " + why);
    } else {
      const double ratio = rows[0]->mae / 6.28e-2;
      report(2, ratio >= 0.6 && ratio <= 1.6,
             str("fsk f3 n=1521 matern eps=0.48: mae %.4e = %.3fx of 6.28e-02 (want "
                 "[0.6,1.6]x)",
                 rows[0]->mae, ratio));
    }
  }

  // ---- 3: plain gaussian on f1 at n=1521, order-of-magnitude gate ----
  {
    ExperimentConfig cfg;
    cfg.target = Target::f1;
    cfg.n = 1521;
    cfg.kernel = {KernelFamily::gaussian, 4.8};
    const BenchmarkReport rep = bench(cfg, "c3");
    std::string why;
    const auto rows = ok_rows(rep, "FSK", &why);
    if (rows.empty())
      report(3, false, "fsk f1 n=1521: " + why);
    else
      report(3, rows[0]->mae <= 5e-3,
             str("fsk f1 n=1521 gauss eps=4.8: mae %.4e (<= 5e-03)", rows[0]->mae));
  }

  // ---- 4: jointly trained scaling on f2, medians over three seeds ----
  {
    ExperimentConfig cfg;
    cfg.target = Target::f2;
    cfg.n = 1089;
    cfg.kernel = matern012;
    cfg.methods = {Method::deltann_vsk};
    cfg.seeds = {0, 1, 2};
    const BenchmarkReport rep = bench(cfg, "c4");
    std::string why;
    const auto rows = ok_rows(rep, "DeltaNNVSK", &why);
    if (rows.size() != 3 || fsk_f2_mae <= 0.0) {
      report(4, false, "deltann-vsk f2 n=1089: " + why);
    } else {
      const double m = med3(rows[0]->mae, rows[1]->mae, rows[2]->mae);
      const double s = med3(rows[0]->ssim, rows[1]->ssim, rows[2]->ssim);
      const double w = med3(rep.timings[0].train_seconds, rep.timings[1].train_seconds,
                            rep.timings[2].train_seconds);
      const double ratio = m / fsk_f2_mae;
      const bool pass = ratio <= 0.25 && s >= 0.90 && w <= 1044.0;
      report(4, pass,
             str("deltann-vsk f2 n=1089, 3 seeds: median mae %.4e = %.3fx of own fsk "
                 "(<= 0.25x), median ssim %.4f (>= 0.90), median train %.0fs (<= 1044s)",
                 m, ratio, s, w));
    }
  }

  // ---- 5: directly trained scaling on f3, medians over three seeds ----
  {
    ExperimentConfig cfg;
    cfg.target = Target::f3;
    cfg.n = 1089;
    cfg.kernel = matern048;
    cfg.methods = {Method::fsk, Method::vsk_f};
    cfg.seeds = {0, 1, 2};
    const BenchmarkReport rep = bench(cfg, "c5");
    std::string why;
    const auto fsk = ok_rows(rep, "FSK", &why);
    const auto vsk = ok_rows(rep, "VSKf", &why);
    if (fsk.empty() || vsk.size() != 3) {
      report(5, false, "vsk-f f3 n=1089: " + why);
    } else {
      const double m = med3(vsk[0]->mae, vsk[1]->mae, vsk[2]->mae);
      const double s = med3(vsk[0]->ssim, vsk[1]->ssim, vsk[2]->ssim);
      const double ratio = m / fsk[0]->mae;
      report(5, s >= 0.88 && ratio <= 0.4,
             str("vsk-f f3 n=1089, 3 seeds: median ssim %.4f (>= 0.88), median mae %.4e "
                 "= %.3fx of fsk (<= 0.4x)",
                 s, m, ratio));
    }
  }

  // ---- 6: measurement stand-in, both trained scalings beat the plain fit ----
  {
    ExperimentConfig cfg;
    cfg.target = Target::f4;
    cfg.f4_csv = VSK_DATA_DIR "/acetone_standin.csv";
    cfg.n = 1089;
    cfg.kernel = matern012;
    cfg.methods = {Method::fsk, Method::deltann_vsk, Method::vsk_f};
    cfg.seeds = {0, 1, 2};
    const BenchmarkReport rep = bench(cfg, "c6");
    std::string why;
    const auto fsk = ok_rows(rep, "FSK", &why);
    const auto dnn = ok_rows(rep, "DeltaNNVSK", &why);
    const auto vsk = ok_rows(rep, "VSKf", &why);
    if (fsk.empty() || dnn.size() != 3 || vsk.size() != 3) {
      report(6, false, "stand-in f4 n=1089: " + why);
    } else {
      const double dm = med3(dnn[0]->mae, dnn[1]->mae, dnn[2]->mae);
      const double ds = med3(dnn[0]->ssim, dnn[1]->ssim, dnn[2]->ssim);
      const double vm = med3(vsk[0]->mae, vsk[1]->mae, vsk[2]->mae);
      const double vs = med3(vsk[0]->ssim, vsk[1]->ssim, vsk[2]->ssim);
      const double dr = dm / fsk[0]->mae, vr = vm / fsk[0]->mae;
      const bool pass = ds >= 0.95 && dr <= 0.3 && vs >= 0.95 && vr <= 0.3;
      report(6, pass,
             str("stand-in f4 n=1089 (fsk mae %.4e, ssim %.4f): deltann ssim %.4f mae "
                 "%.3fx, vsk-f ssim %.4f mae %.3fx (want ssim >= 0.95, mae <= 0.3x)",
                 fsk[0]->mae, fsk[0]->ssim, ds, dr, vs, vr));
    }
  }

  // ---- 7: constant scaling is the plain kernel in disguise ----
  {
    const KernelSpec kernels[] = {{KernelFamily::gaussian, 0.6}, {KernelFamily::matern_c2, 1.0}};
    double worst = 0.0;
    Rng qrng(705);
    const NodeSet queries = random_points(100, qrng);
    for (const auto& kern : kernels) {
      for (std::size_t n : {std::size_t{25}, std::size_t{729}}) {
        const NodeSet nodes = halton(n);
        const ScatteredData data{nodes, sample(TestFunction::f2, nodes)};
        const Interpolant plain = fit(data, kern, ScalingFunction::none());
        const auto base = evaluate(plain, queries);
        for (double c : {0.77, -1.3}) {
          const Interpolant scaled = fit(data, kern, ScalingFunction::constant(c));
          const auto got = evaluate(scaled, queries);
          for (std::size_t i = 0; i < got.size(); ++i)
            worst = std::max(worst, std::fabs(got[i] - base[i]));
        }
      }
    }
    report(7, worst <= 1e-12,
           str("constant scaling == plain kernel: both families, n in {25,729}, "
               "100 queries, worst |diff| %.2e (<= 1e-12)",
               worst));
  }

  // ---- 8: node residuals of every benchmark interpolant fitted above ----
  {
    double worst = 0.0;
    for (double r : g_node_resids) worst = std::max(worst, r);
    report(8, !g_node_resids.empty() && worst <= 1e-8,
           str("%zu fitted interpolants: max node residual %.2e relative (<= 1e-08)",
               g_node_resids.size(), worst));
  }

  // ---- 9: the cardinal-function error bound under randomized scalings ----
  {
    const NodeSet nodes = halton(25);
    const ScatteredData data{nodes, sample(TestFunction::f2, nodes)};
    const KernelSpec kern{KernelFamily::matern_c2, 1.0};
    const NodeSet grid = eval_grid(20);
    const std::vector<double> truth = sample(TestFunction::f2, grid);
    std::size_t violations = 0, checked = 0;
    for (std::uint64_t k = 0; k < 20; ++k) {
      const auto recs = bound_check(
          data, kern, ScalingFunction::tabulated(random_table(nodes, 900 + k)), truth, grid);
      for (const auto& rec : recs) {
        ++checked;
        if (!rec.holds) ++violations;
      }
    }
    report(9, checked == 8000 && violations == 0,
           str("error bound on 20 random scalings x 400 grid points: %zu violations "
               "of %zu checks (want 0)",
               violations, checked));
  }

  // ---- 10: cardinality of the scaled basis at the nodes ----
  {
    const NodeSet nodes = halton(25);
    const ScatteredData data{nodes, sample(TestFunction::f2, nodes)};
    const KernelSpec kern{KernelFamily::matern_c2, 1.0};
    double worst_card = 0.0, worst_lambda = 0.0;
    const ScalingFunction scalings[] = {ScalingFunction::none(),
                                        ScalingFunction::tabulated(random_table(nodes, 901))};
    for (const auto& scaling : scalings) {
      const Interpolant itp = fit(data, kern, scaling);
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto phi = cardinal_values(itp, nodes.point(i));
        for (std::size_t j = 0; j < phi.size(); ++j) {
          const double want = i == j ? 1.0 : 0.0;
          worst_card = std::max(worst_card, std::fabs(phi[j] - want));
        }
      }
      const auto prof = lebesgue_profile(itp, nodes);
      for (double lv : prof.lambda_values)
        worst_lambda = std::max(worst_lambda, std::fabs(lv - 1.0));
    }
    report(10, worst_card <= 1e-8 && worst_lambda <= 1e-8,
           str("cardinal functions at 25 nodes, plain and scaled: max |phi_j(x_i) - "
               "delta_ij| %.2e, max |lambda(x_i) - 1| %.2e (<= 1e-08)",
               worst_card, worst_lambda));
  }

  // ---- 11: gradient suite over ten seeds ----
  {
    double worst_fd = 0.0, worst_alpha = 0.0;
    bool guarded = true, nonvacuous = true;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      // finite differences on every weight and bias, jumps held clear of zero
      NetworkParams p(arch_from_descriptor("fc 2 3 elu;delta 3 2 elu;rb 2;fc 2 1 linear"));
      Rng ir(3000 + seed, "init");
      init_params(p, ir);
      p.alpha(1)[0] = 0.3;
      p.alpha(1)[1] = -0.2;
      p.bump();

      const std::size_t m = 6;
      Rng xr(3000 + seed, "x");
      Matrix x(m, 2);
      ForwardCache cache;
      bool clear = false;
      for (int tries = 0; tries < 50 && !clear; ++tries) {
        for (auto& v : x.a) v = xr.uniform(-1.5, 1.5);
        network_forward(p, x, cache);
        clear = true;
        for (std::size_t l = 0; l < p.arch().size(); ++l)
          if (p.arch()[l].kind == LayerKind::discontinuous)
            for (double z : cache.layers[l].z.a)
              if (std::fabs(z) <= 1e-3) clear = false;
      }
      if (!clear) {
        guarded = false;
        continue;
      }
      std::vector<double> upstream(m);
      Rng ur(3000 + seed, "u");
      for (auto& u : upstream) u = ur.uniform(-1.0, 1.0);
      const auto grad = network_backward(p, cache, upstream);
      auto loss = [&]() {
        ForwardCache c;
        network_forward(p, x, c);
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += upstream[i] * c.out(i, 0);
        return s;
      };
      const double h = 1e-6;
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double save = p.data()[i];
        p.data()[i] = save + h;
        p.bump();
        const double up = loss();
        p.data()[i] = save - h;
        p.bump();
        const double dn = loss();
        p.data()[i] = save;
        p.bump();
        const double fd = (up - dn) / (2.0 * h);
        const double scale = std::max({std::fabs(fd), std::fabs(grad[i]), 1e-6});
        worst_fd = std::max(worst_fd, std::fabs(fd - grad[i]) / scale);
      }

      // jump amplitudes: the gradient is an exact sum of upstream terms
      NetworkParams q(arch_from_descriptor("fc 2 3 elu;delta 3 1 linear"));
      Rng qr(4000 + seed, "init");
      init_params(q, qr);
      q.alpha(1)[0] = 0.25;
      q.bump();
      const std::size_t mq = 40;
      Rng qx(4000 + seed, "x");
      Matrix xq(mq, 2);
      for (auto& v : xq.a) v = qx.uniform(-2.0, 2.0);
      std::vector<double> uq(mq);
      for (auto& u : uq) u = qx.uniform(-1.0, 1.0);
      ForwardCache cq;
      network_forward(q, xq, cq);
      const auto gq = network_backward(q, cq, uq);
      double want = 0.0;
      for (std::size_t i = 0; i < mq; ++i)
        if (cq.layers[1].z(i, 0) >= 0.0) want += uq[i];
      if (want == 0.0) nonvacuous = false;
      NetworkParams probe(q.arch());
      const std::size_t slot = static_cast<std::size_t>(probe.alpha(1) - probe.data());
      worst_alpha = std::max(worst_alpha, std::fabs(gq[slot] - want));
    }
    report(11, guarded && nonvacuous && worst_fd < 1e-4 && worst_alpha <= 1e-10,
           str("10 seeds: worst W,b finite-difference error %.2e relative (< 1e-04), "
               "worst jump-gradient error %.2e (<= 1e-10)",
               worst_fd, worst_alpha));
  }

  // ---- 12: the optimizer against a scalar oracle, scheduler, early stop ----
  {
    AdamConfig ac;
    ac.lr0 = 0.05;

    double params[3] = {1.0, -0.5, 2.0};
    const double grads[3][3] = {{0.1, -0.2, 0.05}, {-0.3, 0.4, 0.1}, {0.2, 0.1, -0.25}};
    OptState st = make_opt_state(3, ac);
    double ref[3] = {1.0, -0.5, 2.0};
    double m[3] = {0, 0, 0}, v[3] = {0, 0, 0};
    double worst = 0.0;
    for (int t = 1; t <= 3; ++t) {
      adam_step(st, ac, params, grads[t - 1], 3);
      for (int i = 0; i < 3; ++i) {
        const double g = grads[t - 1][i];
        m[i] = 0.9 * m[i] + 0.1 * g;
        v[i] = 0.999 * v[i] + 0.001 * g * g;
        const double mh = m[i] / (1.0 - std::pow(0.9, t));
        const double vh = v[i] / (1.0 - std::pow(0.999, t));
        ref[i] -= ac.lr0 * mh / (std::sqrt(vh) + ac.eps_hat);
        worst = std::max(worst, std::fabs(params[i] - ref[i]));
      }
    }
    const bool adam_ok = worst <= 1e-12;

    OptState ps = make_opt_state(1, ac);
    plateau_update(ps, ac, 1.0); // baseline
    for (int k = 0; k < 74; ++k) plateau_update(ps, ac, 1.0);
    const bool before = ps.lr == ac.lr0; // 74 flat epochs leave lr alone
    plateau_update(ps, ac, 1.0);
    const bool after = ps.lr == 0.5 * ac.lr0; // the 75th halves it

    OptState es = make_opt_state(2, ac);
    double w1[2] = {1.0, 2.0};
    bool stopped = false;
    int stop_epoch = 0;
    early_stop_update(es, ac, 1.0, w1, 2, 1);
    w1[0] = 3.0;
    w1[1] = 4.0;
    early_stop_update(es, ac, 0.4, w1, 2, 2); // best epoch
    w1[0] = 9.0;
    w1[1] = 9.0;
    for (int e = 3; e <= 600 && !stopped; ++e) {
      if (early_stop_update(es, ac, 0.4, w1, 2, e)) {
        stopped = true;
        stop_epoch = e;
      }
    }
    const bool stop_ok = stopped && stop_epoch == 552 && es.best_epoch == 2 &&
                         es.best_snapshot == std::vector<double>{3.0, 4.0};

    report(12, adam_ok && before && after && stop_ok,
           str("adam 3-step oracle diff %.2e (<= 1e-12); lr halves on flat epoch 75 "
               "(%s); early stop at epoch %d restores the epoch-2 snapshot (%s)",
               worst, before && after ? "yes" : "no", stop_epoch, stop_ok ? "yes" : "no"));
  }

  // ---- 13: the realized jump at a unit's boundary equals its amplitude ----
  {
    double worst = 0.0;
    for (double a : {0.5, -0.3, 1.7}) {
      NetworkParams p(arch_from_descriptor("delta 1 1 linear"));
      p.w(0)[0] = 1.0;
      p.b(0)[0] = 0.0;
      p.alpha(0)[0] = a;
      p.bump();
      auto out = [&](double t) {
        Matrix x(1, 1);
        x.a[0] = t;
        ForwardCache c;
        network_forward(p, x, c);
        return c.out(0, 0);
      };
      const double t = 1e-12;
      worst = std::max(worst, std::fabs((out(0.0) - out(-t)) - a));
      worst = std::max(worst, std::fabs((out(t) - out(-t)) - a));
    }
    report(13, worst <= 1e-8,
           str("identity-activation probes, jumps {0.5,-0.3,1.7}: worst |boundary "
               "difference - alpha| %.2e (<= 1e-08)",
               worst));
  }

  // ---- 14: the image score behaves like one ----
  {
    const NodeSet grid = eval_grid(40);
    const std::vector<double> t2 = sample(TestFunction::f2, grid);
    const std::vector<double> t3 = sample(TestFunction::f3, grid);
    double lo = t2[0], hi = t2[0];
    for (double v : t2) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const GreyImage a = to_image(t2, 40, lo, hi);
    const GreyImage b = to_image(t3, 40, lo, hi);
    const double self = std::fabs(ssim(a, a) - 1.0);

    GreyImage c1, c2;
    c1.width = c1.height = 16;
    c1.pixels.assign(256, 0.2);
    c2.width = c2.height = 16;
    c2.pixels.assign(256, 0.8);
    const double want = (2.0 * 0.2 * 0.8 + 1e-4) / (0.2 * 0.2 + 0.8 * 0.8 + 1e-4);
    const double flat = std::fabs(ssim(c1, c2) - want);

    const double sym = std::fabs(ssim(a, b) - ssim(b, a));
    report(14, self <= 1e-9 && flat <= 1e-10 && sym <= 1e-12,
           str("ssim: |s(I,I)-1| %.1e (<= 1e-09), constant-image closed form off by "
               "%.1e (<= 1e-10), asymmetry %.1e (<= 1e-12)",
               self, flat, sym));
  }

  // ---- 15: the cli reproduces report.csv byte for byte ----
  {
    const std::string d1 = (scratch() / "c15_a").string();
    const std::string d2 = (scratch() / "c15_b").string();
    const std::string flags =
        " bench --target f2 --n 64 --kernel matern2 --eps 2.0 --grid-side 20"
        " --methods FSK,DeltaNNVSK,VSKf --seed 0,1 --epochs-joint 40 --epochs-direct 60"
        " --out ";
    const int rc1 =
        std::system((std::string(VSK_CLI_BIN) + flags + d1 + " > " + d1 + ".log 2>&1").c_str());
    const int rc2 =
        std::system((std::string(VSK_CLI_BIN) + flags + d2 + " > " + d2 + ".log 2>&1").c_str());
    auto slurp = [](const std::string& p) {
      std::ifstream in(p, std::ios::binary);
      return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    };
    const std::string r1 = slurp(d1 + "/report.csv");
    const std::string r2 = slurp(d2 + "/report.csv");
    const bool pass = rc1 == 0 && rc2 == 0 && !r1.empty() && r1 == r2;
    report(15, pass,
           str("two cli runs, 3 methods x 2 seeds: exit codes %d/%d, report.csv %zu "
               "bytes, byte-identical: %s",
               rc1, rc2, r1.size(), r1 == r2 ? "yes" : "no"));
  }

  std::printf("acceptance: %d/15 checks passed\n", 15 - g_failures);
  return g_failures;
}
