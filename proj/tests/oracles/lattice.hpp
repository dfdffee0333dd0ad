#pragma once

// Brute-force minimization over the nonnegative orthant for tiny problems:
// an exhaustive search on a uniform lattice over [0, upper]^n, followed by
// exhaustive searches on successively finer lattices centred on the best
// point so far.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

struct LatticeResult {
  Eigen::VectorXd point;
  double value = std::numeric_limits<double>::infinity();
};

inline LatticeResult lattice_minimize(const std::function<double(const Eigen::VectorXd&)>& f, int n, double upper,
                                      int levels, int refinements, int half_width = 4) {
  LatticeResult best;
  Eigen::VectorXd x(n);

  // visits every point of prod_i {start_i + j * step : j = 0..count-1}, clipped to >= 0
  auto sweep = [&](const Eigen::VectorXd& start, double step, int count) {
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    for (;;) {
      for (int i = 0; i < n; ++i) x[i] = std::max(0.0, start[i] + idx[static_cast<std::size_t>(i)] * step);
      const double v = f(x);
      if (v < best.value) {
        best.value = v;
        best.point = x;
      }
      int i = 0;
      while (i < n && ++idx[static_cast<std::size_t>(i)] == count) idx[static_cast<std::size_t>(i++)] = 0;
      if (i == n) break;
    }
  };

  double step = upper / (levels - 1);
  sweep(Eigen::VectorXd::Zero(n), step, levels);
  for (int r = 0; r < refinements; ++r) {
    const Eigen::VectorXd centre = best.point;
    step /= half_width;
    sweep(centre.array() - half_width * step, step, 2 * half_width + 1);
  }
  return best;
}

}  // namespace oracle
