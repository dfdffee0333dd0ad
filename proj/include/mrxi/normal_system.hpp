#pragma once

#include "mrxi/gradient.hpp"
#include "mrxi/types.hpp"

#include <Eigen/Cholesky>

#include <array>
#include <memory>
#include <optional>

namespace mrxi {

enum class SystemStrategy {
  Auto,
  /// Cholesky of the N x N normal matrix.
  Direct,
  /// Sherman-Morrison-Woodbury through an eigendecomposition of the M x M
  /// capacitance matrix, for operators with fewer rows than columns. Modes
  /// below the rounding floor of the capacitance spectrum are dropped.
  Woodbury,
  /// Jacobi-preconditioned conjugate gradients, matrix-free.
  ConjugateGradient,
};

/// Above this many unknowns the N x N factorization is not formed.
inline constexpr std::size_t kDirectSizeLimit = 20000;

/// Eigendecomposition K K^T = Q diag(lambda) Q^T, truncated at the rounding
/// floor eps * max(lambda). Lets systems K^T K + s I share one decomposition
/// across shifts s.
class GramSpectrum {
 public:
  explicit GramSpectrum(const Matrix& K);

  /// Retained eigenvalues, descending.
  const Vector& eigenvalues() const { return eigenvalues_; }
  /// Row i is q_i^T K.
  const Matrix& projected() const { return projected_; }
  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return projected_.cols(); }

 private:
  Eigen::Index rows_;
  Vector eigenvalues_;
  Matrix projected_;
};

/// Factorized solver for (K^T K + shift I + smooth grad^T grad) x = b.
///
/// Holds a reference to K; the matrix must outlive the solver.
class NormalSystem {
 public:
  NormalSystem(const Matrix& K, double shift, double smooth, std::array<std::size_t, 3> shape,
               SystemStrategy strategy = SystemStrategy::Auto);
  /// Woodbury system K^T K + shift I built from a precomputed spectrum of K.
  NormalSystem(const Matrix& K, double shift, const GramSpectrum& spectrum);

  Vector solve(const Vector& b) const;
  /// (K^T K + shift I + smooth grad^T grad) x, evaluated without the factorization.
  Vector multiply(const Vector& x) const;

  SystemStrategy strategy() const { return strategy_; }
  double shift() const { return shift_; }
  double smooth() const { return smooth_; }
  /// Stopping tolerance of the CG path (relative residual).
  static constexpr double kCgTolerance = 1e-10;

 private:
  void factor_direct();
  void factor_woodbury();
  Vector solve_cg(const Vector& b) const;

  const Matrix* K_;
  double shift_;
  double smooth_;
  GradientOperator grad_;
  SystemStrategy strategy_;

  std::optional<Eigen::LLT<Eigen::MatrixXd>> direct_;
  std::optional<ShiftedLaplacianSolver> laplacian_;
  // Woodbury: A^{-1} b = D^{-1} b - F^T F b with F = (I + M)^{-1/2} Q^T K D^{-1},
  // Q M Q^T = K D^{-1} K^T.
  Matrix woodbury_factor_;
  Vector jacobi_;
};

}  // namespace mrxi
