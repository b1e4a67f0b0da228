#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "vsk/errors.hpp"
#include "vsk/metrics.hpp"
#include "vsk/rng.hpp"

using namespace vsk;

namespace {

GreyImage random_image(std::size_t side, Rng& rng) {
  GreyImage img;
  img.width = side;
  img.height = side;
  img.pixels.resize(side * side);
  for (auto& p : img.pixels) p = rng.uniform(0, 1);
  return img;
}

// independent ssim: per-window statistics computed from scratch
double ssim_reference(const GreyImage& a, const GreyImage& b) {
  const int w = 11;
  const double sigma = 1.5, c1 = 1e-4, c2 = 9e-4;
  std::vector<double> win(w * w);
  double wsum = 0;
  for (int i = 0; i < w; ++i)
    for (int j = 0; j < w; ++j) {
      const double dx = i - 5.0, dy = j - 5.0;
      win[i * w + j] = std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
      wsum += win[i * w + j];
    }
  for (auto& x : win) x /= wsum;
  const int H = static_cast<int>(a.height), W = static_cast<int>(a.width);
  double total = 0;
  int count = 0;
  for (int r = 0; r + w <= H; ++r)
    for (int c = 0; c + w <= W; ++c) {
      double ma = 0, mb = 0;
      for (int i = 0; i < w; ++i)
        for (int j = 0; j < w; ++j) {
          ma += win[i * w + j] * a.at(r + i, c + j);
          mb += win[i * w + j] * b.at(r + i, c + j);
        }
      double va = 0, vb = 0, cov = 0;
      for (int i = 0; i < w; ++i)
        for (int j = 0; j < w; ++j) {
          const double da = a.at(r + i, c + j) - ma;
          const double db = b.at(r + i, c + j) - mb;
          va += win[i * w + j] * da * da;
          vb += win[i * w + j] * db * db;
          cov += win[i * w + j] * da * db;
        }
      total += ((2 * ma * mb + c1) * (2 * cov + c2)) /
               ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++count;
    }
  return total / count;
}

} // namespace

TEST_CASE("mae and mse on hand values") {
  const std::vector<double> a = {1.0, 2.0, 3.0};
  const std::vector<double> b = {2.0, 0.0, 3.0};
  CHECK(mae(a, b) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mse(a, b) == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
  CHECK(mae(a, a) == 0.0);
  CHECK_THROWS_AS(mae(a, std::vector<double>{1.0}), argument_error);
  CHECK_THROWS_AS(mse(std::vector<double>{}, std::vector<double>{}), argument_error);
}

TEST_CASE("to_image normalizes and clamps") {
  const std::vector<double> v = {0.0, 0.5, 1.0, 2.0, -1.0, 0.25, 0.75, 0.1, 0.9};
  const GreyImage img = to_image(v, 3, 0.0, 1.0);
  REQUIRE(img.width == 3);
  REQUIRE(img.height == 3);
  CHECK(img.at(0, 0) == 0.0);
  CHECK(img.at(0, 1) == 0.5);
  CHECK(img.at(0, 2) == 1.0);
  CHECK(img.at(1, 0) == 1.0);  // clamped from 2.0
  CHECK(img.at(1, 1) == 0.0);  // clamped from -1.0
  const GreyImage img2 = to_image(v, 3, -1.0, 3.0);
  CHECK(img2.at(0, 0) == doctest::Approx(0.25));
  CHECK(img2.at(1, 0) == doctest::Approx(0.75));
  CHECK_THROWS_AS(to_image(v, 2, 0.0, 1.0), argument_error);   // 4 != 9
  CHECK_THROWS_AS(to_image(v, 3, 1.0, 1.0), argument_error);   // empty range
}

TEST_CASE("ssim of an image with itself is 1") {
  Rng rng(3, "selfssim");
  const GreyImage img = random_image(16, rng);
  CHECK(ssim(img, img) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("ssim of constant images matches the closed form") {
  GreyImage a, b;
  a.width = a.height = b.width = b.height = 12;
  a.pixels.assign(144, 0.2);
  b.pixels.assign(144, 0.8);
  const double c1 = 1e-4;
  const double want = (2 * 0.2 * 0.8 + c1) / (0.2 * 0.2 + 0.8 * 0.8 + c1);
  CHECK(ssim(a, b) == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("ssim is symmetric") {
  Rng rng(5, "symm");
  const GreyImage a = random_image(20, rng);
  const GreyImage b = random_image(20, rng);
  CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)).epsilon(1e-12));
}

TEST_CASE("ssim agrees with an independent reference implementation") {
  Rng rng(7, "ref");
  const GreyImage a = random_image(18, rng);
  GreyImage b = a;
  for (std::size_t i = 0; i < b.pixels.size(); ++i)
    b.pixels[i] = 0.8 * b.pixels[i] + 0.1 + 0.05 * rng.uniform(-1, 1);
  CHECK(ssim(a, b) == doctest::Approx(ssim_reference(a, b)).epsilon(1e-10));
}

TEST_CASE("ssim rejects mismatched or too-small images") {
  Rng rng(9, "small");
  const GreyImage a = random_image(10, rng); // smaller than the 11x11 window
  CHECK_THROWS_AS(ssim(a, a), argument_error);
  const GreyImage b = random_image(16, rng);
  const GreyImage c = random_image(20, rng);
  CHECK_THROWS_AS(ssim(b, c), argument_error);
}

TEST_CASE("pgm files round-trip header and pixel bytes") {
  GreyImage img;
  img.width = 3;
  img.height = 2;
  img.pixels = {0.0, 0.5, 1.0, 0.25, 0.75, 1.0};
  const std::string path = "./test_metrics_tmp.pgm";
  write_pgm(path, img);
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::string magic;
  std::size_t w, h, maxv;
  in >> magic >> w >> h >> maxv;
  CHECK(magic == "P5");
  CHECK(w == 3);
  CHECK(h == 2);
  CHECK(maxv == 255);
  in.get(); // single whitespace after the header
  unsigned char px[6];
  in.read(reinterpret_cast<char*>(px), 6);
  REQUIRE(in.gcount() == 6);
  CHECK(px[0] == 0);
  CHECK(px[1] == 128); // lround(0.5 * 255)
  CHECK(px[2] == 255);
  CHECK(px[3] == 64);
  CHECK(px[4] == 191);
  std::remove(path.c_str());
}
