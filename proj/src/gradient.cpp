#include "mrxi/gradient.hpp"

#include "mrxi/errors.hpp"

#include <cmath>
#include <numbers>

namespace mrxi {

GradientOperator::GradientOperator(std::array<std::size_t, 3> shape) : shape_(shape) {
  cells_ = shape[0] * shape[1] * shape[2];
  if (cells_ == 0) throw ConfigError("gradient needs a nonempty grid");
  std::size_t stride = 1;
  for (int a = 0; a < 3; ++a) {
    if (shape[a] > 1) axes_.push_back({a, shape[a], stride});
    stride *= shape[a];
  }
}

void GradientOperator::apply_into(const Vector& c, Vector& out) const {
  if (static_cast<std::size_t>(c.size()) != cells_) throw ConfigError("gradient input has the wrong length");
  out.resize(static_cast<Eigen::Index>(output_size()));
  for (std::size_t b = 0; b < axes_.size(); ++b) {
    const auto& ax = axes_[b];
    double* dst = out.data() + b * cells_;
    for (std::size_t p = 0; p < cells_; ++p) {
      const std::size_t coord = (p / ax.stride) % ax.extent;
      dst[p] = coord + 1 < ax.extent ? c[static_cast<Eigen::Index>(p + ax.stride)] - c[static_cast<Eigen::Index>(p)]
                                     : 0.0;
    }
  }
}

Vector GradientOperator::apply(const Vector& c) const {
  Vector out;
  apply_into(c, out);
  return out;
}

void GradientOperator::add_adjoint(const Vector& v, Vector& out) const {
  if (static_cast<std::size_t>(v.size()) != output_size()) throw ConfigError("gradient adjoint input has the wrong length");
  if (static_cast<std::size_t>(out.size()) != cells_) throw ConfigError("gradient adjoint output has the wrong length");
  for (std::size_t b = 0; b < axes_.size(); ++b) {
    const auto& ax = axes_[b];
    const double* src = v.data() + b * cells_;
    for (std::size_t p = 0; p < cells_; ++p) {
      const std::size_t coord = (p / ax.stride) % ax.extent;
      double acc = 0.0;
      if (coord + 1 < ax.extent) acc -= src[p];
      if (coord > 0) acc += src[p - ax.stride];
      out[static_cast<Eigen::Index>(p)] += acc;
    }
  }
}

Vector GradientOperator::adjoint(const Vector& v) const {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(cells_));
  add_adjoint(v, out);
  return out;
}

Eigen::SparseMatrix<double> GradientOperator::incidence() const {
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(2 * output_size());
  for (std::size_t b = 0; b < axes_.size(); ++b) {
    const auto& ax = axes_[b];
    for (std::size_t p = 0; p < cells_; ++p) {
      const std::size_t coord = (p / ax.stride) % ax.extent;
      if (coord + 1 >= ax.extent) continue;
      const auto row = static_cast<int>(b * cells_ + p);
      entries.emplace_back(row, static_cast<int>(p), -1.0);
      entries.emplace_back(row, static_cast<int>(p + ax.stride), 1.0);
    }
  }
  Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(output_size()), static_cast<Eigen::Index>(cells_));
  m.setFromTriplets(entries.begin(), entries.end());
  return m;
}

double GradientOperator::total_variation(const Vector& c, TvFlavor flavor) const {
  const Vector d = apply(c);
  if (flavor == TvFlavor::Anisotropic) return d.lpNorm<1>();
  double tv = 0.0;
  for (std::size_t p = 0; p < cells_; ++p) {
    double sq = 0.0;
    for (std::size_t b = 0; b < axes_.size(); ++b) {
      const double x = d[static_cast<Eigen::Index>(b * cells_ + p)];
      sq += x * x;
    }
    tv += std::sqrt(sq);
  }
  return tv;
}

GradientOperator::Spectrum GradientOperator::spectrum() const {
  Spectrum s;
  for (const auto& ax : axes_) {
    const auto n = static_cast<Eigen::Index>(ax.extent);
    const double nd = static_cast<double>(ax.extent);
    Vector mu(n);
    Eigen::MatrixXd basis(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double half = std::sin(std::numbers::pi * static_cast<double>(k) / (2.0 * nd));
      mu[k] = 4.0 * half * half;
      const double norm = k == 0 ? std::sqrt(1.0 / nd) : std::sqrt(2.0 / nd);
      for (Eigen::Index i = 0; i < n; ++i) {
        basis(i, k) = norm * std::cos(std::numbers::pi * static_cast<double>(k) * (static_cast<double>(i) + 0.5) / nd);
      }
    }
    s.eigenvalues.push_back(std::move(mu));
    s.basis.push_back(std::move(basis));
  }
  return s;
}

ShiftedLaplacianSolver::ShiftedLaplacianSolver(const GradientOperator& grad, double shift, double smooth)
    : grad_(grad), spectrum_(grad.spectrum()) {
  if (!(shift > 0.0) || !(smooth >= 0.0)) throw NumericError("shifted Laplacian needs shift > 0 and smooth >= 0");
  const std::size_t n = grad.cells();
  inverse_eigenvalues_.resize(static_cast<Eigen::Index>(n));
  for (std::size_t p = 0; p < n; ++p) {
    double lambda = shift;
    for (std::size_t b = 0; b < grad.axes().size(); ++b) {
      const auto& ax = grad.axes()[b];
      lambda += smooth * spectrum_.eigenvalues[b][static_cast<Eigen::Index>((p / ax.stride) % ax.extent)];
    }
    inverse_eigenvalues_[static_cast<Eigen::Index>(p)] = 1.0 / lambda;
  }
}

void ShiftedLaplacianSolver::transform(Eigen::VectorXd& data, bool forward) const {
  Eigen::VectorXd scratch(data.size());
  for (std::size_t b = 0; b < grad_.axes().size(); ++b) {
    const auto& ax = grad_.axes()[b];
    const auto& basis = spectrum_.basis[b];
    const auto n = static_cast<Eigen::Index>(ax.extent);
    const auto inner = static_cast<Eigen::Index>(ax.stride);
    const auto outer = static_cast<Eigen::Index>(grad_.cells() / (ax.stride * ax.extent));
    // View each outer slab as an (inner x n) column-major matrix; the axis runs along columns.
    for (Eigen::Index o = 0; o < outer; ++o) {
      Eigen::Map<const Eigen::MatrixXd> src(data.data() + o * inner * n, inner, n);
      Eigen::Map<Eigen::MatrixXd> dst(scratch.data() + o * inner * n, inner, n);
      if (forward) {
        dst.noalias() = src * basis;
      } else {
        dst.noalias() = src * basis.transpose();
      }
    }
    data.swap(scratch);
  }
}

Vector ShiftedLaplacianSolver::solve(const Vector& y) const {
  if (static_cast<std::size_t>(y.size()) != grad_.cells()) throw ConfigError("right-hand side has the wrong length");
  Vector x = y;
  transform(x, true);
  x.array() *= inverse_eigenvalues_.array();
  transform(x, false);
  return x;
}

}  // namespace mrxi
