#include "vsk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "vsk/errors.hpp"

namespace vsk {

namespace {

void check_pair(const std::vector<double>& truth, const std::vector<double>& pred) {
  if (truth.empty()) throw argument_error("metric over empty vectors");
  if (truth.size() != pred.size())
    throw argument_error("metric length mismatch: " + std::to_string(truth.size()) + " vs " +
                         std::to_string(pred.size()));
}

constexpr int k_win = 11;

// normalized 11x11 Gaussian window, sigma 1.5
std::vector<double> gaussian_window() {
  std::vector<double> w(k_win * k_win);
  double sum = 0.0;
  for (int i = 0; i < k_win; ++i)
    for (int j = 0; j < k_win; ++j) {
      const double di = i - (k_win - 1) / 2.0, dj = j - (k_win - 1) / 2.0;
      const double v = std::exp(-(di * di + dj * dj) / (2.0 * 1.5 * 1.5));
      w[i * k_win + j] = v;
      sum += v;
    }
  for (auto& v : w) v /= sum;
  return w;
}

} // namespace

double mae(const std::vector<double>& truth, const std::vector<double>& pred) {
  check_pair(truth, pred);
  double acc = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) acc += std::fabs(truth[i] - pred[i]);
  return acc / static_cast<double>(truth.size());
}

double mse(const std::vector<double>& truth, const std::vector<double>& pred) {
  check_pair(truth, pred);
  double acc = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double d = truth[i] - pred[i];
    acc += d * d;
  }
  return acc / static_cast<double>(truth.size());
}

GreyImage to_image(const std::vector<double>& values, std::size_t side, double lo, double hi) {
  if (values.size() != side * side)
    throw argument_error("image expects side*side values");
  if (!(hi > lo)) throw argument_error("image range must satisfy hi > lo");
  GreyImage img;
  img.width = img.height = side;
  img.pixels.resize(values.size());
  const double scale = 1.0 / (hi - lo);
  for (std::size_t i = 0; i < values.size(); ++i)
    img.pixels[i] = std::clamp((values[i] - lo) * scale, 0.0, 1.0);
  return img;
}

double ssim(const GreyImage& a, const GreyImage& b) {
  if (a.width != b.width || a.height != b.height)
    throw argument_error("ssim image size mismatch");
  if (a.width < k_win || a.height < k_win)
    throw argument_error("ssim needs images at least 11x11");
  static const std::vector<double> w = gaussian_window();
  constexpr double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03; // dynamic range 1
  const std::size_t rows = a.height - k_win + 1, cols = a.width - k_win + 1;
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      double ma = 0, mb = 0, maa = 0, mbb = 0, mab = 0;
      for (int i = 0; i < k_win; ++i) {
        const double* pa = a.pixels.data() + (r + i) * a.width + c;
        const double* pb = b.pixels.data() + (r + i) * b.width + c;
        const double* pw = w.data() + i * k_win;
        for (int j = 0; j < k_win; ++j) {
          const double va = pa[j], vb = pb[j], wij = pw[j];
          ma += wij * va;
          mb += wij * vb;
          maa += wij * va * va;
          mbb += wij * vb * vb;
          mab += wij * va * vb;
        }
      }
      const double va = maa - ma * ma, vb = mbb - mb * mb, cov = mab - ma * mb;
      total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
               ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
  }
  return total / static_cast<double>(rows * cols);
}

void write_pgm(const std::string& path, const GreyImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open '" + path + "' for writing");
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  for (double v : img.pixels) {
    const double c = std::clamp(v, 0.0, 1.0);
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * c))));
  }
  if (!out) throw io_error("failed writing '" + path + "'");
}

} // namespace vsk
