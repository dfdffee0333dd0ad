#pragma once

#include "mrxi/gradient.hpp"
#include "mrxi/normal_system.hpp"
#include "mrxi/types.hpp"

#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mrxi {

struct AdmmParams {
  /// Augmentation weight of the augmented Lagrangian.
  double rho = 1.0;
  /// Regularization weight. Zero is accepted and reduces TV-ADMM to a projection.
  double alpha = 1.0;
  std::size_t max_iterations = 2000;
  double primal_tolerance = 1e-6;
  double dual_tolerance = 1e-6;
  /// Absolute floor added to both relative tolerances (scaled by sqrt of the dimension).
  double absolute_tolerance = 1e-12;
  TvFlavor flavor = TvFlavor::Anisotropic;
  bool positivity = true;
  /// Objective and misfit are recorded every this many iterations (and at the last one).
  std::size_t history_stride = 1;
  SystemStrategy strategy = SystemStrategy::Auto;

  void validate() const;
};

enum class Termination { Converged, MaxIterations, ClosedForm, Discrepancy, MaxOuterIterations };
std::string_view to_string(Termination t);

struct SolverReport {
  std::string method;
  Vector solution;
  /// Indexed like `history_iterations`.
  std::vector<double> objective;
  std::vector<double> data_misfit;
  std::vector<std::size_t> history_iterations;
  /// One entry per (inner) iteration.
  std::vector<double> primal_residual;
  std::vector<double> dual_residual;
  std::size_t iterations = 0;
  Termination termination = Termination::MaxIterations;
  double final_objective = 0.0;
  double final_misfit = 0.0;
  double wall_time_s = 0.0;
  /// Relative residual of the normal equations (closed-form solves only).
  std::optional<double> normal_residual;
  /// Bregman outer loop.
  std::vector<double> outer_misfit;
  std::vector<std::size_t> inner_iterations;
  std::map<std::string, double> parameters;

  bool converged() const {
    return termination == Termination::Converged || termination == Termination::ClosedForm ||
           termination == Termination::Discrepancy;
  }
};

/// sign(z) * max(|z| - threshold, 0); exact ties map to zero.
double soft_threshold(double z, double threshold);

/// 0.5 |K c - g|^2 + alpha TV(c).
double tv_objective(const Matrix& K, const Vector& g, const GradientOperator& grad, const Vector& c, double alpha,
                    TvFlavor flavor = TvFlavor::Anisotropic);

/// TV + positivity via ADMM with E = [grad; I], H = -I, u = 0 and
/// Psi(v) = alpha |v_grad|_1 + indicator(v_id >= 0).
///
/// The c-update matrix K^T K + rho E^T E is factorized once at construction and
/// reused by every solve, so one instance serves an alpha sweep, several data
/// vectors, or a Bregman loop. Holds a reference to K.
class TvAdmmSolver {
 public:
  TvAdmmSolver(const Matrix& K, std::array<std::size_t, 3> shape, double rho,
               SystemStrategy strategy = SystemStrategy::Auto);

  /// params.rho must match the factorized rho.
  SolverReport solve(const Vector& g, const AdmmParams& params) const;

  double rho() const { return rho_; }
  const GradientOperator& gradient() const { return grad_; }
  SystemStrategy strategy() const { return system_.strategy(); }

 private:
  const Matrix* K_;
  GradientOperator grad_;
  double rho_;
  NormalSystem system_;
};

SolverReport solve_tv_admm(const Matrix& K, const Vector& g, std::array<std::size_t, 3> shape,
                           const AdmmParams& params);

/// argmin 0.5 |K c - g|^2 + alpha |c|^2 (+ positivity).
///
/// Without positivity this is the closed-form solve of (K^T K + 2 alpha I) c = K^T g.
/// With positivity it runs ADMM with E = I and Psi = indicator(v >= 0); only
/// rho, iteration limits, tolerances and history stride are read from `admm`.
///
/// For wide operators the spectrum of K K^T is computed once at construction
/// and shared by every alpha. Holds a reference to K.
class TikhonovSolver {
 public:
  explicit TikhonovSolver(const Matrix& K, SystemStrategy strategy = SystemStrategy::Auto);

  SolverReport solve(const Vector& g, double alpha, bool positivity, const AdmmParams& admm = {}) const;

 private:
  NormalSystem system(double shift) const;

  const Matrix* K_;
  SystemStrategy strategy_;
  std::optional<GramSpectrum> spectrum_;
};

SolverReport solve_tikhonov(const Matrix& K, const Vector& g, double alpha, bool positivity,
                            const AdmmParams& admm = {});

enum class BregmanSelection {
  /// Return the first iterate whose misfit is at or below the threshold.
  AtThreshold,
  /// Return the iterate preceding it.
  BeforeThreshold,
};

struct BregmanParams {
  /// Fixed, large TV weight used by every outer step.
  double alpha = 1.0;
  AdmmParams inner;
  std::size_t max_outer = 50;
  /// Noise level delta = expected |K c_true - g|; enables discrepancy stopping.
  std::optional<double> noise_level;
  double tau = 1.02;
  BregmanSelection selection = BregmanSelection::AtThreshold;

  void validate() const;
};

/// Bregman iteration: c^{k+1} solves the TV problem for data g^k, then
/// g^{k+1} = g^k + g - K c^{k+1}, starting from g^0 = g.
SolverReport solve_bregman(const Matrix& K, const Vector& g, std::array<std::size_t, 3> shape,
                           const BregmanParams& params);
SolverReport solve_bregman(const TvAdmmSolver& solver, const Matrix& K, const Vector& g,
                           const BregmanParams& params);

}  // namespace mrxi
