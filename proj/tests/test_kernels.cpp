#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "vsk/errors.hpp"
#include "vsk/kernels.hpp"
#include "vsk/rng.hpp"

using namespace vsk;

namespace {

NodeSet random_nodes(std::size_t n, std::size_t dim, Rng& rng) {
  NodeSet s;
  s.dim = dim;
  s.coords.resize(n * dim);
  for (auto& c : s.coords) c = rng.uniform(0, 1);
  return s;
}

} // namespace

TEST_CASE("kernel names round-trip and bad names throw") {
  CHECK(kernel_from_name("gaussian") == KernelFamily::gaussian);
  CHECK(kernel_from_name("matern2") == KernelFamily::matern_c2);
  CHECK(std::string(kernel_name(KernelFamily::gaussian)) == "gaussian");
  CHECK(std::string(kernel_name(KernelFamily::matern_c2)) == "matern2");
  CHECK_THROWS_AS(kernel_from_name("cubic"), argument_error);
}

TEST_CASE("validate rejects bad epsilon") {
  CHECK_THROWS_AS(validate({KernelFamily::gaussian, 0.0}), argument_error);
  CHECK_THROWS_AS(validate({KernelFamily::gaussian, -1.0}), argument_error);
  CHECK_THROWS_AS(validate({KernelFamily::gaussian, std::nan("")}), argument_error);
  CHECK_NOTHROW(validate({KernelFamily::gaussian, 0.12}));
}

TEST_CASE("rbf_eval closed forms") {
  // gaussian eps=2 r=0.5 -> exp(-1); matern eps=1 r=1 -> 2 exp(-1)
  CHECK(rbf_eval({KernelFamily::gaussian, 2.0}, 0.5) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(rbf_eval({KernelFamily::matern_c2, 1.0}, 1.0) ==
        doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-15));
  CHECK(rbf_eval({KernelFamily::gaussian, 3.0}, 0.0) == 1.0);
  CHECK(rbf_eval({KernelFamily::matern_c2, 3.0}, 0.0) == 1.0);
  CHECK_THROWS_AS(rbf_eval({KernelFamily::gaussian, 1.0}, -0.5), argument_error);
}

TEST_CASE("rbf_dprofile2 matches a central difference in rho") {
  const std::vector<double> rho = {0.04, 0.3, 1.1, 4.0};
  for (KernelFamily fam : {KernelFamily::gaussian, KernelFamily::matern_c2}) {
    const KernelSpec spec{fam, 0.7};
    std::vector<double> d(rho.size());
    rbf_dprofile2(spec, rho.data(), d.data(), rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) {
      const double h = 1e-6 * rho[i];
      double pp, pm;
      const double rp = rho[i] + h, rm = rho[i] - h;
      rbf_profile(spec, &rp, &pp, 1);
      rbf_profile(spec, &rm, &pm, 1);
      const double fd = (pp - pm) / (2 * h);
      CHECK(d[i] == doctest::Approx(2.0 * fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("NodeCols round-trips a NodeSet and computes distances") {
  Rng rng(3, "cols");
  const NodeSet s = random_nodes(19, 2, rng);
  const NodeCols c = NodeCols::from(s);
  REQUIRE(c.dim() == 2);
  REQUIRE(c.size() == 19);
  std::vector<double> r2(19);
  const double q[2] = {0.4, 0.6};
  c.sqdist_point(q, r2.data());
  for (std::size_t i = 0; i < 19; ++i) {
    const double* p = s.point(i);
    const double want = (p[0] - q[0]) * (p[0] - q[0]) + (p[1] - q[1]) * (p[1] - q[1]);
    CHECK(r2[i] == doctest::Approx(want).epsilon(1e-14));
  }
  std::vector<double> r2i(5);
  c.sqdist_to(7, r2i.data(), 5);
  for (std::size_t j = 0; j < 5; ++j) {
    const double* a = s.point(7);
    const double* b = s.point(j);
    const double want = (a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]);
    CHECK(r2i[j] == doctest::Approx(want).epsilon(1e-14));
  }
  CHECK(r2i[0] >= 0.0);
}

TEST_CASE("push_col length mismatch throws") {
  Rng rng(1, "push");
  NodeCols c = NodeCols::from(random_nodes(4, 2, rng));
  CHECK_THROWS_AS(c.push_col(std::vector<double>(3, 0.0)), argument_error);
  CHECK_NOTHROW(c.push_col(std::vector<double>(4, 0.0)));
  CHECK(c.dim() == 3);
}

TEST_CASE("augment appends the scaling coordinate") {
  Rng rng(5, "aug");
  const NodeSet s = random_nodes(6, 2, rng);
  std::vector<double> fbar(6);
  for (std::size_t i = 0; i < 6; ++i) fbar[i] = 0.1 * static_cast<double>(i);
  const AugmentedNodeSet a = augment(s, fbar);
  REQUIRE(a.points.dim == 3);
  REQUIRE(a.points.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(a.points.point(i)[0] == s.point(i)[0]);
    CHECK(a.points.point(i)[1] == s.point(i)[1]);
    CHECK(a.points.point(i)[2] == fbar[i]);
  }
  CHECK(a.scaling_values == fbar);
  CHECK_THROWS_AS(augment(s, std::vector<double>(5, 0.0)), argument_error);
}

TEST_CASE("gram matrix matches pairwise rbf_eval") {
  Rng rng(7, "gram");
  const NodeSet s = random_nodes(23, 2, rng);
  for (KernelFamily fam : {KernelFamily::gaussian, KernelFamily::matern_c2}) {
    const KernelSpec spec{fam, 1.3};
    const Matrix K = gram(spec, s);
    REQUIRE(K.rows == 23);
    REQUIRE(K.cols == 23);
    for (std::size_t i = 0; i < 23; ++i) {
      CHECK(K(i, i) == 1.0); // exact unit diagonal
      for (std::size_t j = 0; j < 23; ++j) {
        const double* a = s.point(i);
        const double* b = s.point(j);
        const double r = std::hypot(a[0] - b[0], a[1] - b[1]);
        CHECK(K(i, j) == doctest::Approx(rbf_eval(spec, r)).epsilon(1e-13));
        CHECK(K(i, j) == K(j, i)); // exact symmetry by construction
      }
    }
  }
}

TEST_CASE("gram in 3d handles augmented sets") {
  Rng rng(9, "gram3");
  const NodeSet s = random_nodes(11, 2, rng);
  std::vector<double> fbar(11);
  for (auto& v : fbar) v = rng.uniform(-1, 1);
  const KernelSpec spec{KernelFamily::matern_c2, 0.8};
  const Matrix K = gram(spec, augment(s, fbar).points);
  for (std::size_t i = 0; i < 11; ++i)
    for (std::size_t j = 0; j < 11; ++j) {
      const double* a = s.point(i);
      const double* b = s.point(j);
      const double r2 = (a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) +
                        (fbar[i] - fbar[j]) * (fbar[i] - fbar[j]);
      CHECK(K(i, j) == doctest::Approx(rbf_eval(spec, std::sqrt(r2))).epsilon(1e-13));
    }
}

TEST_CASE("duplicate nodes are reported with both indices") {
  NodeSet s;
  s.dim = 2;
  s.coords = {0.1, 0.2, 0.5, 0.5, 0.1, 0.2};
  try {
    gram({KernelFamily::gaussian, 1.0}, s);
    FAIL("expected argument_error");
  } catch (const argument_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("duplicate") != std::string::npos);
    CHECK(msg.find('0') != std::string::npos);
    CHECK(msg.find('2') != std::string::npos);
  }
}

TEST_CASE("augmented duplicates are separable by the scaling coordinate") {
  // two coincident planar points stop colliding once fbar differs
  NodeSet s;
  s.dim = 2;
  s.coords = {0.1, 0.2, 0.1, 0.2};
  CHECK_THROWS_AS(gram({KernelFamily::gaussian, 1.0}, s), argument_error);
  const AugmentedNodeSet a = augment(s, {0.0, 1.0});
  CHECK_NOTHROW(gram({KernelFamily::gaussian, 1.0}, a.points));
}
