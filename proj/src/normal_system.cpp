#include "mrxi/normal_system.hpp"

#include "mrxi/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace mrxi {

namespace {

/// Number of leading entries of a descending spectrum above the rounding floor.
Eigen::Index retained_modes(const Vector& descending) {
  if (descending.size() == 0) return 0;
  const double floor = std::numeric_limits<double>::epsilon() * std::max(descending[0], 0.0);
  Eigen::Index r = 0;
  while (r < descending.size() && descending[r] > floor) ++r;
  return r;
}

/// Eigenpairs of a symmetric matrix, descending.
std::pair<Vector, Eigen::MatrixXd> descending_eigen(const Eigen::MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  if (es.info() != Eigen::Success) throw NumericError("symmetric eigendecomposition failed");
  return {es.eigenvalues().reverse(), es.eigenvectors().rowwise().reverse()};
}

}  // namespace

GramSpectrum::GramSpectrum(const Matrix& K) : rows_(K.rows()) {
  Eigen::MatrixXd gram(K.rows(), K.rows());
  gram.setZero();
  gram.selfadjointView<Eigen::Lower>().rankUpdate(K);
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  auto [values, vectors] = descending_eigen(gram);
  const Eigen::Index r = retained_modes(values);
  eigenvalues_ = values.head(r);
  projected_ = vectors.leftCols(r).transpose() * K;
}

NormalSystem::NormalSystem(const Matrix& K, double shift, double smooth, std::array<std::size_t, 3> shape,
                           SystemStrategy strategy)
    : K_(&K), shift_(shift), smooth_(smooth), grad_(shape), strategy_(strategy) {
  const auto n = static_cast<std::size_t>(K.cols());
  const auto m = static_cast<std::size_t>(K.rows());
  if (grad_.cells() != n) throw ConfigError("operator columns do not match the grid");
  if (!(shift >= 0.0) || !(smooth >= 0.0) || !std::isfinite(shift) || !std::isfinite(smooth)) {
    throw ConfigError("normal system weights must be finite and nonnegative");
  }
  if (strategy_ == SystemStrategy::Auto) {
    if (n <= m && n <= kDirectSizeLimit) {
      strategy_ = SystemStrategy::Direct;
    } else if (m < n && m <= kDirectSizeLimit && shift > 0.0) {
      strategy_ = SystemStrategy::Woodbury;
    } else if (n <= kDirectSizeLimit) {
      strategy_ = SystemStrategy::Direct;
    } else {
      strategy_ = SystemStrategy::ConjugateGradient;
    }
  }
  switch (strategy_) {
    case SystemStrategy::Direct:
      factor_direct();
      break;
    case SystemStrategy::Woodbury:
      factor_woodbury();
      break;
    case SystemStrategy::ConjugateGradient: {
      jacobi_ = K.colwise().squaredNorm().transpose();
      jacobi_.array() += shift_;
      if (smooth_ > 0.0) {
        // diag(grad^T grad) counts the neighbours of each cell.
        Vector count = Vector::Zero(static_cast<Eigen::Index>(n));
        for (const auto& ax : grad_.axes()) {
          for (std::size_t p = 0; p < n; ++p) {
            const std::size_t coord = (p / ax.stride) % ax.extent;
            count[static_cast<Eigen::Index>(p)] += (coord > 0 ? 1.0 : 0.0) + (coord + 1 < ax.extent ? 1.0 : 0.0);
          }
        }
        jacobi_ += smooth_ * count;
      }
      if (!(jacobi_.minCoeff() > 0.0)) throw NumericError("normal system is singular");
      break;
    }
    case SystemStrategy::Auto:
      break;
  }
}

void NormalSystem::factor_direct() {
  const Matrix& K = *K_;
  Eigen::MatrixXd A(K.cols(), K.cols());
  A.setZero();
  A.selfadjointView<Eigen::Lower>().rankUpdate(K.transpose());
  A.diagonal().array() += shift_;
  if (smooth_ > 0.0) {
    for (const auto& ax : grad_.axes()) {
      for (std::size_t p = 0; p < grad_.cells(); ++p) {
        if ((p / ax.stride) % ax.extent + 1 >= ax.extent) continue;
        const auto i = static_cast<Eigen::Index>(p);
        const auto j = static_cast<Eigen::Index>(p + ax.stride);
        A(i, i) += smooth_;
        A(j, j) += smooth_;
        A(j, i) -= smooth_;
      }
    }
  }
  direct_.emplace(A);
  if (direct_->info() != Eigen::Success) throw NumericError("normal matrix is not positive definite");
}

NormalSystem::NormalSystem(const Matrix& K, double shift, const GramSpectrum& spectrum)
    : K_(&K), shift_(shift), smooth_(0.0), grad_({static_cast<std::size_t>(K.cols()), 1, 1}),
      strategy_(SystemStrategy::Woodbury) {
  if (spectrum.rows() != K.rows() || spectrum.cols() != K.cols()) throw ConfigError("spectrum does not match the operator");
  if (!(shift > 0.0) || !std::isfinite(shift)) throw NumericError("Woodbury factorization needs a positive shift");
  // F_i = q_i^T K / sqrt(s (s + lambda_i))
  const Vector weights = (shift * (spectrum.eigenvalues().array() + shift)).rsqrt().matrix();
  woodbury_factor_ = weights.asDiagonal() * spectrum.projected();
}

void NormalSystem::factor_woodbury() {
  if (!(shift_ > 0.0)) throw NumericError("Woodbury factorization needs a positive shift");
  const Matrix& K = *K_;
  // K D^{-1}, row by row (D is symmetric).
  Matrix KD(K.rows(), K.cols());
  if (smooth_ > 0.0) {
    laplacian_.emplace(grad_, shift_, smooth_);
    for (Eigen::Index r = 0; r < K.rows(); ++r) KD.row(r) = laplacian_->solve(K.row(r).transpose()).transpose();
  } else {
    KD = K / shift_;
  }
  Eigen::MatrixXd S = KD * K.transpose();
  S = 0.5 * (S + S.transpose()).eval();
  auto [mu, Q] = descending_eigen(S);
  const Eigen::Index r = retained_modes(mu);
  const Vector weights = (1.0 + mu.head(r).array()).rsqrt().matrix();
  woodbury_factor_ = weights.asDiagonal() * (Q.leftCols(r).transpose() * KD);
}

Vector NormalSystem::multiply(const Vector& x) const {
  const Matrix& K = *K_;
  Vector y = K.transpose() * (K * x);
  y += shift_ * x;
  if (smooth_ > 0.0) grad_.add_adjoint(smooth_ * grad_.apply(x), y);
  return y;
}

Vector NormalSystem::solve(const Vector& b) const {
  if (b.size() != K_->cols()) throw ConfigError("right-hand side has the wrong length");
  switch (strategy_) {
    case SystemStrategy::Direct:
      return direct_->solve(b);
    case SystemStrategy::Woodbury: {
      Vector x = laplacian_ ? laplacian_->solve(b) : Vector(b / shift_);
      const Vector t = woodbury_factor_ * b;
      x.noalias() -= woodbury_factor_.transpose() * t;
      return x;
    }
    case SystemStrategy::ConjugateGradient:
      return solve_cg(b);
    case SystemStrategy::Auto:
      break;
  }
  throw NumericError("normal system has no strategy");
}

Vector NormalSystem::solve_cg(const Vector& b) const {
  const Eigen::Index n = b.size();
  Vector x = Vector::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) return x;
  Vector r = b;
  Vector z = r.cwiseQuotient(jacobi_);
  Vector p = z;
  double rz = r.dot(z);
  const auto max_iter = static_cast<std::size_t>(std::max<Eigen::Index>(n, 100)) * 2;
  for (std::size_t k = 0; k < max_iter; ++k) {
    const Vector q = multiply(p);
    const double step = rz / p.dot(q);
    x += step * p;
    r -= step * q;
    if (r.norm() <= kCgTolerance * bnorm) return x;
    z = r.cwiseQuotient(jacobi_);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  throw NumericError("conjugate gradients did not reach the requested tolerance");
}

}  // namespace mrxi
