#pragma once

#include "mrxi/forward.hpp"

#include <string>

namespace mrxi {

/// Gaussian-window SSIM parameters (11 x 11 window, sigma 1.5, K1 = 0.01, K2 = 0.03).
struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
};

/// Mean SSIM over all window positions that fit inside the image.
/// Both fields must share the same 2D grid shape.
double ssim(const DensityField& x, const DensityField& y, double dynamic_range, const SsimParams& params = {});

/// |x - y| / |y|.
double rel_l2(const Vector& x, const Vector& y);

struct EvaluationResult {
  std::string phantom;
  std::string method;
  std::string setup;
  double ssim = 0.0;
  double rel_l2 = 0.0;
  double data_misfit = 0.0;
  double dynamic_range = 1.0;
  double alpha = 0.0;
};

}  // namespace mrxi
