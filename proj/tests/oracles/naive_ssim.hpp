#pragma once

// Mean SSIM with an 11 x 11 Gaussian window (sigma 1.5), computed window by
// window with explicit loops and centred second moments.

#include <cmath>
#include <vector>

namespace oracle {

/// Images are row-major, height x width.
inline double naive_ssim(const std::vector<double>& x, const std::vector<double>& y, int width, int height,
                         double dynamic_range) {
  const int size = 11;
  const double sigma = 1.5;
  double weights[size][size];
  double total = 0.0;
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) {
      const double di = i - 5.0, dj = j - 5.0;
      weights[i][j] = std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma));
      total += weights[i][j];
    }
  }
  const double c1 = std::pow(0.01 * dynamic_range, 2);
  const double c2 = std::pow(0.03 * dynamic_range, 2);
  double sum = 0.0;
  int windows = 0;
  for (int top = 0; top + size <= height; ++top) {
    for (int left = 0; left + size <= width; ++left) {
      double mx = 0.0, my = 0.0;
      for (int i = 0; i < size; ++i) {
        for (int j = 0; j < size; ++j) {
          const double w = weights[i][j] / total;
          mx += w * x[(top + i) * width + left + j];
          my += w * y[(top + i) * width + left + j];
        }
      }
      double vx = 0.0, vy = 0.0, cxy = 0.0;
      for (int i = 0; i < size; ++i) {
        for (int j = 0; j < size; ++j) {
          const double w = weights[i][j] / total;
          const double dx = x[(top + i) * width + left + j] - mx;
          const double dy = y[(top + i) * width + left + j] - my;
          vx += w * dx * dx;
          vy += w * dy * dy;
          cxy += w * dx * dy;
        }
      }
      sum += ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
      ++windows;
    }
  }
  return sum / windows;
}

}  // namespace oracle
