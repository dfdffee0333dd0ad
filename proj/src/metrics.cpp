#include "mrxi/metrics.hpp"

#include "mrxi/errors.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace mrxi {

namespace {

Eigen::VectorXd gaussian_window(int size, double sigma) {
  Eigen::VectorXd w(size);
  const double center = (size - 1) / 2.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - center;
    w[i] = std::exp(-d * d / (2.0 * sigma * sigma));
  }
  return w / w.sum();
}

/// Separable "valid" correlation of an (ny x nx) image with w w^T.
Eigen::MatrixXd filter_valid(const Eigen::MatrixXd& img, const Eigen::VectorXd& w) {
  const auto k = w.size();
  const auto rows = img.rows() - k + 1;
  const auto cols = img.cols() - k + 1;
  Eigen::MatrixXd tmp = Eigen::MatrixXd::Zero(rows, img.cols());
  for (Eigen::Index t = 0; t < k; ++t) tmp += w[t] * img.middleRows(t, rows);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, cols);
  for (Eigen::Index t = 0; t < k; ++t) out += w[t] * tmp.middleCols(t, cols);
  return out;
}

Eigen::MatrixXd as_image(const DensityField& f) {
  Eigen::MatrixXd img(f.grid.ny(), f.grid.nx());
  for (std::size_t j = 0; j < f.grid.ny(); ++j) {
    for (std::size_t i = 0; i < f.grid.nx(); ++i) {
      img(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
          f.values[static_cast<Eigen::Index>(f.grid.index(i, j))];
    }
  }
  return img;
}

}  // namespace

double ssim(const DensityField& x, const DensityField& y, double dynamic_range, const SsimParams& params) {
  if (x.grid.cells() != y.grid.cells()) throw ConfigError("SSIM inputs differ in shape");
  if (x.grid.dimension() != 2 || x.grid.nz() != 1) throw ConfigError("SSIM is defined for 2D images");
  if (!(dynamic_range > 0.0)) throw ConfigError("SSIM dynamic range must be positive");
  if (params.window < 1 || static_cast<std::size_t>(params.window) > x.grid.nx() ||
      static_cast<std::size_t>(params.window) > x.grid.ny()) {
    throw ConfigError("image is smaller than the SSIM window");
  }
  const Eigen::VectorXd w = gaussian_window(params.window, params.sigma);
  const Eigen::MatrixXd a = as_image(x);
  const Eigen::MatrixXd b = as_image(y);
  const double c1 = std::pow(params.k1 * dynamic_range, 2);
  const double c2 = std::pow(params.k2 * dynamic_range, 2);

  const Eigen::ArrayXXd mu_a = filter_valid(a, w).array();
  const Eigen::ArrayXXd mu_b = filter_valid(b, w).array();
  const Eigen::ArrayXXd var_a = filter_valid(a.cwiseProduct(a), w).array() - mu_a * mu_a;
  const Eigen::ArrayXXd var_b = filter_valid(b.cwiseProduct(b), w).array() - mu_b * mu_b;
  const Eigen::ArrayXXd cov = filter_valid(a.cwiseProduct(b), w).array() - mu_a * mu_b;
  const Eigen::ArrayXXd map = ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
                              ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
  return map.mean();
}

double rel_l2(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw ConfigError("relative error inputs differ in length");
  const double ref = y.norm();
  if (!(ref > 0.0)) throw NumericError("relative error needs a nonzero reference");
  return (x - y).norm() / ref;
}

}  // namespace mrxi
