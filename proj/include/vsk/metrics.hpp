#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace vsk {

struct GreyImage {
  std::size_t width = 0, height = 0;
  std::vector<double> pixels; // row-major, [0,1]

  double at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }
};

double mae(const std::vector<double>& truth, const std::vector<double>& pred);
double mse(const std::vector<double>& truth, const std::vector<double>& pred);

// map values affinely from [lo,hi] to [0,1], clamping; values are row-major
// over a side x side grid (row = first grid coordinate)
GreyImage to_image(const std::vector<double>& values, std::size_t side, double lo, double hi);

// mean structural similarity: 11x11 Gaussian window (sigma 1.5), k1=0.01,
// k2=0.03, dynamic range 1, averaged over fully covered window positions
double ssim(const GreyImage& a, const GreyImage& b);

void write_pgm(const std::string& path, const GreyImage& img);

} // namespace vsk
