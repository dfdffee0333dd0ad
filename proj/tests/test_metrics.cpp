#include "mrxi/errors.hpp"
#include "mrxi/metrics.hpp"
#include "oracles/naive_ssim.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace mrxi;

namespace {

DensityField random_field(std::mt19937_64& rng, std::size_t nx, std::size_t ny, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  const PixelGrid grid = PixelGrid::square(nx, ny);
  DensityField f = DensityField::zeros(grid);
  for (auto& v : f.values) v = u(rng);
  return f;
}

/// Modulated checkerboard with zero mean; local window means stay near zero.
DensityField pattern(std::size_t n) {
  const PixelGrid grid = PixelGrid::square(n, n);
  DensityField f = DensityField::zeros(grid);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const double sign = (i + j) % 2 == 0 ? 1.0 : -1.0;
      f.values[static_cast<Eigen::Index>(grid.index(i, j))] = sign * (1.0 + 0.5 * std::sin(0.2 * static_cast<double>(i)));
    }
  }
  f.values.array() -= f.values.mean();
  return f;
}

/// Row-major (top row = highest y is irrelevant here: both images use the same order).
std::vector<double> rows(const DensityField& f) {
  std::vector<double> out;
  for (std::size_t j = 0; j < f.grid.ny(); ++j)
    for (std::size_t i = 0; i < f.grid.nx(); ++i) out.push_back(f.values[static_cast<Eigen::Index>(f.grid.index(i, j))]);
  return out;
}

}  // namespace

TEST_CASE("ssim of an image with itself is one") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 5; ++t) {
    const DensityField x = random_field(rng, 20, 24, -3.0, 5.0);
    CHECK(ssim(x, x, 8.0) == doctest::Approx(1.0).epsilon(1e-14));
  }
  const DensityField zero = DensityField::zeros(PixelGrid::square(16, 16));
  CHECK(ssim(zero, zero, 1.0) == 1.0);
}

TEST_CASE("anticorrelated images score negative") {
  const DensityField x = pattern(40);
  DensityField y = x;
  y.values = -x.values.array() + 0.01;
  CHECK(ssim(x, y, 2.0) < -0.5);
}

TEST_CASE("ssim matches a window-by-window reference") {
  std::mt19937_64 rng(32);
  for (int t = 0; t < 5; ++t) {
    const DensityField x = random_field(rng, 32, 32);
    const DensityField y = random_field(rng, 32, 32);
    const double ref = oracle::naive_ssim(rows(x), rows(y), 32, 32, 1.0);
    CHECK(std::abs(ssim(x, y, 1.0) - ref) <= 1e-10);
  }
  // non-square, correlated pair
  DensityField x = random_field(rng, 27, 19);
  DensityField y = x;
  std::normal_distribution<double> n(0.0, 0.1);
  for (auto& v : y.values) v += n(rng);
  CHECK(std::abs(ssim(x, y, 1.0) - oracle::naive_ssim(rows(x), rows(y), 27, 19, 1.0)) <= 1e-10);
}

TEST_CASE("ssim is symmetric and bounded") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const DensityField x = random_field(rng, 25, 25, -1.0, 2.0);
    const DensityField y = random_field(rng, 25, 25, 0.0, 1.0);
    const double a = ssim(x, y, 3.0), b = ssim(y, x, 3.0);
    CHECK(std::abs(a - b) <= 1e-12);
    CHECK(a >= -1.0);
    CHECK(a <= 1.0);
  }
}

TEST_CASE("ssim is invariant under joint scaling with the dynamic range") {
  std::mt19937_64 rng(5);
  const DensityField x = random_field(rng, 30, 30);
  const DensityField y = random_field(rng, 30, 30);
  const double base = ssim(x, y, 1.0);
  for (double s : {1e-3, 0.5, 7.0, 1e4}) {
    DensityField xs = x, ys = y;
    xs.values *= s;
    ys.values *= s;
    CHECK(ssim(xs, ys, s) == doctest::Approx(base).epsilon(1e-10));
  }
}

TEST_CASE("ssim input validation") {
  std::mt19937_64 rng(6);
  const DensityField a = random_field(rng, 20, 20);
  const DensityField b = random_field(rng, 21, 20);
  CHECK_THROWS_AS(ssim(a, b, 1.0), ConfigError);
  CHECK_THROWS_AS(ssim(a, a, 0.0), ConfigError);
  const DensityField tiny = random_field(rng, 8, 8);
  CHECK_THROWS_AS(ssim(tiny, tiny, 1.0), ConfigError);
}

TEST_CASE("relative l2 error") {
  const Vector y = (Vector(3) << 1.0, -2.0, 2.0).finished();
  CHECK(rel_l2(y, y) == 0.0);
  CHECK(rel_l2(2.0 * y, y) == 1.0);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n;
  Vector a(50), b(50);
  for (auto& v : a) v = n(rng);
  for (auto& v : b) v = n(rng);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < 50; ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  CHECK(rel_l2(a, b) == doctest::Approx(std::sqrt(num / den)).epsilon(1e-14));
  CHECK_THROWS_AS(rel_l2(a, Vector::Zero(50)), NumericError);
  CHECK_THROWS_AS(rel_l2(a, Vector::Zero(3)), ConfigError);
}
