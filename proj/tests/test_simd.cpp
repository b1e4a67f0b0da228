#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "vsk/rng.hpp"
#include "vsk/simd.hpp"

using namespace vsk;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng, double lo, double hi) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

// run a check against both implementations
template <typename F>
void for_both(F&& f) {
  f(simd::scalar_ops());
  if (simd::cpu_has_avx2()) f(simd::avx2_ops());
}

} // namespace

TEST_CASE("vexp matches std::exp across lane offsets and tails") {
  Rng rng(7, "vexp");
  for_both([&](const simd::OpsTable& t) {
    for (std::size_t n : {0ul, 1ul, 2ul, 3ul, 4ul, 5ul, 7ul, 8ul, 9ul, 31ul, 64ul, 100ul}) {
      const auto in = random_vec(n, rng, -40.0, 40.0);
      std::vector<double> out(n, -1.0);
      t.vexp(out.data(), in.data(), n);
      for (std::size_t i = 0; i < n; ++i)
        CHECK(out[i] == doctest::Approx(std::exp(in[i])).epsilon(1e-13));
    }
  });
}

TEST_CASE("vexp result is independent of position in the buffer") {
  // the same scalar must map to the same bits whether it sits in a full
  // vector lane or in the loop tail
  const double x = 0.7310585786300049;
  for_both([&](const simd::OpsTable& t) {
    double alone = 0.0;
    t.vexp(&alone, &x, 1);
    std::vector<double> in(13, 1.0), out(13, 0.0);
    in[12] = x; // tail position of a 13-element buffer
    t.vexp(out.data(), in.data(), 13);
    CHECK(out[12] == alone);
    in.assign(13, x);
    t.vexp(out.data(), in.data(), 13);
    for (double v : out) CHECK(v == alone);
  });
}

TEST_CASE("profiles match their closed forms") {
  const double eps = 2.0;
  const std::vector<double> r2 = {0.0, 0.25, 1.0, 2.0, 7.5};
  for_both([&](const simd::OpsTable& t) {
    std::vector<double> g(r2.size()), m(r2.size());
    t.gaussian_profile(g.data(), r2.data(), r2.size(), eps);
    t.matern2_profile(m.data(), r2.data(), r2.size(), eps);
    for (std::size_t i = 0; i < r2.size(); ++i) {
      const double r = std::sqrt(r2[i]);
      CHECK(g[i] == doctest::Approx(std::exp(-eps * eps * r2[i])).epsilon(1e-13));
      CHECK(m[i] == doctest::Approx(std::exp(-eps * r) * (1.0 + eps * r)).epsilon(1e-13));
    }
    // r = 0 must be exactly 1 so gram diagonals are exact
    CHECK(g[0] == 1.0);
    CHECK(m[0] == 1.0);
  });
}

TEST_CASE("gaussian profile: known value exp(-1)") {
  // eps = 2, r = 0.5 -> exp(-eps^2 r^2) = exp(-1)
  const double r2 = 0.25;
  double out = 0.0;
  simd::gaussian_profile(&out, &r2, 1, 2.0);
  CHECK(out == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
}

TEST_CASE("matern profile: known value 2 exp(-1)") {
  // eps = 1, r = 1 -> exp(-1) * 2
  const double r2 = 1.0;
  double out = 0.0;
  simd::matern2_profile(&out, &r2, 1, 1.0);
  CHECK(out == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-15));
}

TEST_CASE("sqdist2 and sqdist3 agree with direct evaluation") {
  Rng rng(11, "sqdist");
  const std::size_t n = 37;
  const auto xs = random_vec(n, rng, -2, 2);
  const auto ys = random_vec(n, rng, -2, 2);
  const auto zs = random_vec(n, rng, -2, 2);
  const double qx = 0.3, qy = -1.7, qz = 0.9;
  for_both([&](const simd::OpsTable& t) {
    std::vector<double> d2(n), d3(n);
    t.sqdist2(d2.data(), xs.data(), ys.data(), n, qx, qy);
    t.sqdist3(d3.data(), xs.data(), ys.data(), zs.data(), n, qx, qy, qz);
    for (std::size_t i = 0; i < n; ++i) {
      const double ex = (xs[i] - qx) * (xs[i] - qx) + (ys[i] - qy) * (ys[i] - qy);
      const double ez = (zs[i] - qz) * (zs[i] - qz);
      CHECK(d2[i] == doctest::Approx(ex).epsilon(1e-13));
      CHECK(d3[i] == doctest::Approx(ex + ez).epsilon(1e-13));
    }
  });
}

TEST_CASE("sqdist3 with equal third coordinate is bitwise sqdist2") {
  // the augmented-distance prefix property the constant-scaling
  // equivalence rests on
  Rng rng(13, "prefix");
  const std::size_t n = 41;
  const auto xs = random_vec(n, rng, 0, 1);
  const auto ys = random_vec(n, rng, 0, 1);
  for (double c : {0.0, -0.0, 3.25, -17.5}) {
    const std::vector<double> zs(n, c);
    for_both([&](const simd::OpsTable& t) {
      std::vector<double> d2(n), d3(n);
      t.sqdist2(d2.data(), xs.data(), ys.data(), n, 0.25, 0.75);
      t.sqdist3(d3.data(), xs.data(), ys.data(), zs.data(), n, 0.25, 0.75, c);
      for (std::size_t i = 0; i < n; ++i) CHECK(d3[i] == d2[i]);
    });
  }
}

TEST_CASE("dot, axpy, gemv against direct loops") {
  Rng rng(17, "blas1");
  for (std::size_t n : {1ul, 4ul, 5ul, 33ul, 128ul}) {
    const auto a = random_vec(n, rng, -1, 1);
    const auto b = random_vec(n, rng, -1, 1);
    double exact = 0.0;
    for (std::size_t i = 0; i < n; ++i) exact += a[i] * b[i];
    for_both([&](const simd::OpsTable& t) {
      CHECK(t.dot(a.data(), b.data(), n) == doctest::Approx(exact).epsilon(1e-12));
      auto y = b;
      t.axpy(y.data(), 0.5, a.data(), n);
      for (std::size_t i = 0; i < n; ++i)
        CHECK(y[i] == doctest::Approx(b[i] + 0.5 * a[i]).epsilon(1e-13));
    });
  }
  const std::size_t m = 7, n = 5;
  const auto A = random_vec(m * n, rng, -1, 1);
  const auto x = random_vec(n, rng, -1, 1);
  for_both([&](const simd::OpsTable& t) {
    std::vector<double> y(m, -1);
    t.gemv(y.data(), A.data(), x.data(), m, n);
    for (std::size_t i = 0; i < m; ++i) {
      double e = 0.0;
      for (std::size_t j = 0; j < n; ++j) e += A[i * n + j] * x[j];
      CHECK(y[i] == doctest::Approx(e).epsilon(1e-12));
    }
  });
}

TEST_CASE("elu and elu_grad closed forms") {
  const std::vector<double> z = {-3.0, -0.5, -1e-12, 0.0, 1e-12, 0.5, 3.0};
  for_both([&](const simd::OpsTable& t) {
    std::vector<double> v(z.size()), g(z.size());
    t.elu(v.data(), z.data(), z.size());
    t.elu_grad(g.data(), z.data(), z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double ev = z[i] >= 0.0 ? z[i] : std::expm1(z[i]);
      const double eg = z[i] >= 0.0 ? 1.0 : std::exp(z[i]);
      CHECK(v[i] == doctest::Approx(ev).epsilon(1e-13));
      CHECK(g[i] == doctest::Approx(eg).epsilon(1e-13));
    }
    CHECK(v[3] == 0.0);
    CHECK(g[3] == 1.0);
  });
}

TEST_CASE("matmul variants against naive triple loops") {
  Rng rng(23, "matmul");
  const std::size_t m = 6, k = 7, n = 5;
  const auto A = random_vec(m * k, rng, -1, 1);   // m x k
  const auto Bn = random_vec(k * n, rng, -1, 1);  // k x n
  const auto Bt = random_vec(n * k, rng, -1, 1);  // n x k
  const auto Bm = random_vec(m * n, rng, -1, 1);  // m x n
  for_both([&](const simd::OpsTable& t) {
    std::vector<double> C(m * n, -1);
    t.matmul_nn(C.data(), A.data(), Bn.data(), m, k, n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double e = 0.0;
        for (std::size_t l = 0; l < k; ++l) e += A[i * k + l] * Bn[l * n + j];
        CHECK(C[i * n + j] == doctest::Approx(e).epsilon(1e-12));
      }
    t.matmul_nt(C.data(), A.data(), Bt.data(), m, k, n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double e = 0.0;
        for (std::size_t l = 0; l < k; ++l) e += A[i * k + l] * Bt[j * k + l];
        CHECK(C[i * n + j] == doctest::Approx(e).epsilon(1e-12));
      }
    std::vector<double> G(k * n, 0.25); // must accumulate on top
    t.matmul_tn_acc(G.data(), A.data(), Bm.data(), m, k, n);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double e = 0.25;
        for (std::size_t l = 0; l < m; ++l) e += A[l * k + i] * Bm[l * n + j];
        CHECK(G[i * n + j] == doctest::Approx(e).epsilon(1e-12));
      }
  });
}

TEST_CASE("scalar and avx2 agree closely on large mixed workloads") {
  if (!simd::cpu_has_avx2()) return;
  Rng rng(31, "equiv");
  const std::size_t n = 1000;
  const auto r2 = random_vec(n, rng, 0.0, 9.0);
  std::vector<double> a(n), b(n);
  simd::scalar_ops().matern2_profile(a.data(), r2.data(), n, 0.48);
  simd::avx2_ops().matern2_profile(b.data(), r2.data(), n, 0.48);
  for (std::size_t i = 0; i < n; ++i)
    CHECK(a[i] == doctest::Approx(b[i]).epsilon(5e-13));
  const auto u = random_vec(n, rng, -1, 1);
  const auto v = random_vec(n, rng, -1, 1);
  const double ds = simd::scalar_ops().dot(u.data(), v.data(), n);
  const double dv = simd::avx2_ops().dot(u.data(), v.data(), n);
  CHECK(ds == doctest::Approx(dv).epsilon(1e-12));
}

TEST_CASE("force_isa switches the active table") {
  const simd::Isa before = simd::active_isa();
  simd::force_isa(simd::Isa::scalar);
  CHECK(simd::active_isa() == simd::Isa::scalar);
  CHECK(&simd::ops() == &simd::scalar_ops());
  simd::force_isa(before);
  CHECK(simd::active_isa() == before);
}
