#pragma once

#include "mrxi/geometry.hpp"
#include "mrxi/types.hpp"

#include <Eigen/SparseCore>

#include <array>
#include <cstddef>
#include <vector>

namespace mrxi {

enum class TvFlavor { Anisotropic, Isotropic };

/// Forward differences with a homogeneous Neumann boundary (the last
/// difference along each axis is zero). Axes of extent 1 are dropped, so a
/// 200 x 1 grid yields a single 1D difference block.
///
/// Output layout: one block of cells() entries per active axis, stacked in
/// axis order x, y, z.
class GradientOperator {
 public:
  explicit GradientOperator(std::array<std::size_t, 3> shape);
  static GradientOperator for_grid(const PixelGrid& grid) { return GradientOperator(grid.cells()); }

  const std::array<std::size_t, 3>& shape() const { return shape_; }
  std::size_t cells() const { return cells_; }
  std::size_t active_axes() const { return axes_.size(); }
  std::size_t output_size() const { return axes_.size() * cells_; }

  Vector apply(const Vector& c) const;
  Vector adjoint(const Vector& v) const;
  void apply_into(const Vector& c, Vector& out) const;
  /// out += adjoint(v)
  void add_adjoint(const Vector& v, Vector& out) const;

  /// Sparse incidence matrix of the stacked differences.
  Eigen::SparseMatrix<double> incidence() const;

  double total_variation(const Vector& c, TvFlavor flavor = TvFlavor::Anisotropic) const;

  /// Eigenvalues of the 1D Neumann Laplacian for each active axis, in the
  /// orthonormal DCT-II basis (basis[a] has the eigenvectors as columns).
  struct Spectrum {
    std::vector<Vector> eigenvalues;
    std::vector<Eigen::MatrixXd> basis;
  };
  Spectrum spectrum() const;

  struct Axis {
    int axis;
    std::size_t extent;
    std::size_t stride;
  };
  const std::vector<Axis>& axes() const { return axes_; }

 private:
  std::array<std::size_t, 3> shape_;
  std::size_t cells_;
  std::vector<Axis> axes_;
};

/// Solves (shift I + smooth grad^T grad) x = y exactly by diagonalizing the
/// Neumann Laplacian with separable cosine transforms.
class ShiftedLaplacianSolver {
 public:
  ShiftedLaplacianSolver(const GradientOperator& grad, double shift, double smooth);
  Vector solve(const Vector& y) const;

 private:
  /// Applies basis^T (forward) or basis (inverse) along every active axis.
  void transform(Eigen::VectorXd& data, bool forward) const;

  GradientOperator grad_;
  GradientOperator::Spectrum spectrum_;
  Vector inverse_eigenvalues_;
};

}  // namespace mrxi
