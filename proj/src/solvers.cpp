#include "mrxi/solvers.hpp"

#include "mrxi/errors.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>

namespace mrxi {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_problem(const Matrix& K, const Vector& g) {
  if (K.rows() != g.size()) {
    throw ConfigError("data has " + std::to_string(g.size()) + " entries, operator has " + std::to_string(K.rows()) +
                      " rows");
  }
  if (!g.allFinite()) throw NumericError("data has non-finite entries");
}

/// E = [grad; I]; v = (v_grad, v_id).
struct TvSplitting {
  const GradientOperator& grad;
  TvFlavor flavor;
  bool positivity;

  std::size_t size() const { return grad.output_size() + grad.cells(); }

  void apply(const Vector& c, Vector& out) const {
    const auto g = static_cast<Eigen::Index>(grad.output_size());
    Vector d;
    grad.apply_into(c, d);
    out.resize(static_cast<Eigen::Index>(size()));
    out.head(g) = d;
    out.tail(c.size()) = c;
  }

  void add_adjoint(const Vector& v, Vector& out) const {
    const auto g = static_cast<Eigen::Index>(grad.output_size());
    grad.add_adjoint(v.head(g), out);
    out += v.tail(out.size());
  }

  void prox(const Vector& z, Vector& v, double threshold) const {
    const auto g = static_cast<Eigen::Index>(grad.output_size());
    const auto n = static_cast<Eigen::Index>(grad.cells());
    v.resize(z.size());
    if (flavor == TvFlavor::Anisotropic) {
      for (Eigen::Index i = 0; i < g; ++i) v[i] = soft_threshold(z[i], threshold);
    } else {
      const auto axes = static_cast<Eigen::Index>(grad.active_axes());
      for (Eigen::Index p = 0; p < n; ++p) {
        double sq = 0.0;
        for (Eigen::Index b = 0; b < axes; ++b) sq += z[b * n + p] * z[b * n + p];
        const double norm = std::sqrt(sq);
        const double scale = norm > threshold ? (norm - threshold) / norm : 0.0;
        for (Eigen::Index b = 0; b < axes; ++b) v[b * n + p] = scale * z[b * n + p];
      }
    }
    for (Eigen::Index i = g; i < z.size(); ++i) v[i] = positivity ? std::max(z[i], 0.0) : z[i];
  }

  Vector solution(const Vector& c, const Vector& v) const {
    return positivity ? Vector(v.tail(c.size())) : c;
  }

  double penalty(const Vector& x, double alpha) const { return alpha * grad.total_variation(x, flavor); }
};

/// E = I, Psi = indicator(v >= 0); the quadratic term lives in the data part.
struct PositivitySplitting {
  std::size_t n;

  std::size_t size() const { return n; }
  void apply(const Vector& c, Vector& out) const { out = c; }
  void add_adjoint(const Vector& v, Vector& out) const { out += v; }
  void prox(const Vector& z, Vector& v, double) const { v = z.cwiseMax(0.0); }
  Vector solution(const Vector&, const Vector& v) const { return v; }
  double penalty(const Vector& x, double alpha) const { return alpha * x.squaredNorm(); }
};

template <typename Splitting>
SolverReport run_admm(const Matrix& K, const Vector& g, const NormalSystem& system, const Splitting& split,
                      const AdmmParams& params, double threshold, double penalty_weight, std::string method) {
  const auto start = Clock::now();
  const auto n = static_cast<Eigen::Index>(K.cols());
  const auto p = static_cast<Eigen::Index>(split.size());
  const double rho = params.rho;

  SolverReport report;
  report.method = std::move(method);
  report.parameters = {{"alpha", params.alpha},
                       {"rho", rho},
                       {"max_iterations", static_cast<double>(params.max_iterations)},
                       {"primal_tolerance", params.primal_tolerance},
                       {"dual_tolerance", params.dual_tolerance}};

  const Vector Ktg = K.transpose() * g;
  Vector c = Vector::Zero(n);
  Vector v = Vector::Zero(p);
  Vector lambda = Vector::Zero(p);
  Vector v_prev(p), Ec(p), z(p), rhs(n), Et(n), x;
  report.termination = Termination::MaxIterations;

  auto record = [&](std::size_t iteration) {
    x = split.solution(c, v);
    const double misfit = (K * x - g).norm();
    report.history_iterations.push_back(iteration);
    report.data_misfit.push_back(misfit);
    report.objective.push_back(0.5 * misfit * misfit + split.penalty(x, penalty_weight));
  };

  for (std::size_t k = 1; k <= params.max_iterations; ++k) {
    // c-update: (K^T K + rho E^T E) c = K^T g + E^T (rho v - lambda)
    rhs = Ktg;
    split.add_adjoint(rho * v - lambda, rhs);
    c = system.solve(rhs);

    // v-update: prox of Psi / rho at E c + lambda / rho
    split.apply(c, Ec);
    z = Ec + lambda / rho;
    v_prev.swap(v);
    split.prox(z, v, threshold);

    // dual ascent
    const Vector r = Ec - v;
    lambda += rho * r;

    Et.setZero();
    split.add_adjoint(v - v_prev, Et);
    const double primal = r.norm();
    const double dual = rho * Et.norm();
    report.primal_residual.push_back(primal);
    report.dual_residual.push_back(dual);
    report.iterations = k;

    Et.setZero();
    split.add_adjoint(lambda, Et);
    const double eps_primal = std::sqrt(static_cast<double>(p)) * params.absolute_tolerance +
                              params.primal_tolerance * std::max(Ec.norm(), v.norm());
    const double eps_dual =
        std::sqrt(static_cast<double>(n)) * params.absolute_tolerance + params.dual_tolerance * Et.norm();
    const bool done = primal <= eps_primal && dual <= eps_dual;
    if (done) report.termination = Termination::Converged;
    if (done || k == params.max_iterations || k % params.history_stride == 0) record(k);
    if (done) break;
  }
  if (params.max_iterations == 0) record(0);

  report.solution = split.solution(c, v);
  if (!report.solution.allFinite()) throw NumericError(report.method + " produced non-finite iterates");
  report.final_objective = report.objective.back();
  report.final_misfit = report.data_misfit.back();
  report.wall_time_s = seconds_since(start);
  return report;
}

}  // namespace

void AdmmParams::validate() const {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ConfigError("ADMM rho must be positive");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("regularization weight must be nonnegative");
  if (!(primal_tolerance > 0.0) || !(dual_tolerance > 0.0) || !(absolute_tolerance >= 0.0)) {
    throw ConfigError("ADMM tolerances must be positive");
  }
  if (history_stride == 0) throw ConfigError("history stride must be at least 1");
}

void BregmanParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("Bregman alpha must be positive");
  if (max_outer == 0) throw ConfigError("Bregman needs at least one outer iteration");
  if (noise_level && !(*noise_level >= 0.0)) throw ConfigError("noise level must be nonnegative");
  if (!(tau > 0.0)) throw ConfigError("discrepancy factor tau must be positive");
  inner.validate();
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::Converged:
      return "converged";
    case Termination::MaxIterations:
      return "max_iterations";
    case Termination::ClosedForm:
      return "closed_form";
    case Termination::Discrepancy:
      return "discrepancy";
    case Termination::MaxOuterIterations:
      return "max_outer_iterations";
  }
  return "unknown";
}

double soft_threshold(double z, double threshold) {
  const double mag = std::abs(z) - threshold;
  if (mag <= 0.0) return 0.0;
  return z > 0.0 ? mag : -mag;
}

double tv_objective(const Matrix& K, const Vector& g, const GradientOperator& grad, const Vector& c, double alpha,
                    TvFlavor flavor) {
  return 0.5 * (K * c - g).squaredNorm() + alpha * grad.total_variation(c, flavor);
}

TvAdmmSolver::TvAdmmSolver(const Matrix& K, std::array<std::size_t, 3> shape, double rho, SystemStrategy strategy)
    : K_(&K), grad_(shape), rho_(rho), system_(K, rho, rho, shape, strategy) {
  if (!(rho > 0.0)) throw ConfigError("ADMM rho must be positive");
}

SolverReport TvAdmmSolver::solve(const Vector& g, const AdmmParams& params) const {
  params.validate();
  check_problem(*K_, g);
  if (params.rho != rho_) throw ConfigError("ADMM rho differs from the factorized system");
  const TvSplitting split{grad_, params.flavor, params.positivity};
  return run_admm(*K_, g, system_, split, params, params.alpha / params.rho, params.alpha, "tv_admm");
}

SolverReport solve_tv_admm(const Matrix& K, const Vector& g, std::array<std::size_t, 3> shape,
                           const AdmmParams& params) {
  params.validate();
  const TvAdmmSolver solver(K, shape, params.rho, params.strategy);
  return solver.solve(g, params);
}

TikhonovSolver::TikhonovSolver(const Matrix& K, SystemStrategy strategy) : K_(&K), strategy_(strategy) {
  const bool wide = K.rows() < K.cols() && static_cast<std::size_t>(K.rows()) <= kDirectSizeLimit;
  if (strategy == SystemStrategy::Woodbury || (strategy == SystemStrategy::Auto && wide)) spectrum_.emplace(K);
}

NormalSystem TikhonovSolver::system(double shift) const {
  if (spectrum_) return NormalSystem(*K_, shift, *spectrum_);
  return NormalSystem(*K_, shift, 0.0, {static_cast<std::size_t>(K_->cols()), 1, 1}, strategy_);
}

SolverReport TikhonovSolver::solve(const Vector& g, double alpha, bool positivity, const AdmmParams& admm) const {
  const Matrix& K = *K_;
  check_problem(K, g);
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("Tikhonov alpha must be positive");

  if (!positivity) {
    const auto start = Clock::now();
    const NormalSystem sys = system(2.0 * alpha);
    const Vector rhs = K.transpose() * g;
    SolverReport report;
    report.method = "tikhonov";
    report.solution = sys.solve(rhs);
    report.termination = Termination::ClosedForm;
    report.iterations = 1;
    report.parameters = {{"alpha", alpha}};
    const double misfit = (K * report.solution - g).norm();
    report.final_misfit = misfit;
    report.final_objective = 0.5 * misfit * misfit + alpha * report.solution.squaredNorm();
    report.history_iterations = {1};
    report.data_misfit = {misfit};
    report.objective = {report.final_objective};
    const double rhs_norm = rhs.norm();
    report.normal_residual = (sys.multiply(report.solution) - rhs).norm() / (rhs_norm > 0.0 ? rhs_norm : 1.0);
    report.wall_time_s = seconds_since(start);
    return report;
  }

  AdmmParams params = admm;
  params.alpha = alpha;
  params.validate();
  const NormalSystem sys = system(2.0 * alpha + params.rho);
  const PositivitySplitting split{static_cast<std::size_t>(K.cols())};
  return run_admm(K, g, sys, split, params, 0.0, alpha, "tikhonov_positive");
}

SolverReport solve_tikhonov(const Matrix& K, const Vector& g, double alpha, bool positivity, const AdmmParams& admm) {
  return TikhonovSolver(K, admm.strategy).solve(g, alpha, positivity, admm);
}

SolverReport solve_bregman(const TvAdmmSolver& solver, const Matrix& K, const Vector& g, const BregmanParams& params) {
  params.validate();
  check_problem(K, g);
  const auto start = Clock::now();
  AdmmParams inner = params.inner;
  inner.alpha = params.alpha;

  SolverReport report;
  report.method = "bregman";
  report.parameters = {{"alpha", params.alpha},
                       {"rho", inner.rho},
                       {"tau", params.tau},
                       {"max_outer", static_cast<double>(params.max_outer)}};
  if (params.noise_level) report.parameters["noise_level"] = *params.noise_level;
  report.termination = Termination::MaxOuterIterations;

  Vector data = g;
  Vector previous = Vector::Zero(K.cols());
  double previous_misfit = g.norm();
  double previous_objective = 0.5 * previous_misfit * previous_misfit;
  auto objective = [&](const Vector& c, double misfit) {
    return 0.5 * misfit * misfit + params.alpha * solver.gradient().total_variation(c, inner.flavor);
  };
  const double threshold = params.noise_level ? params.tau * *params.noise_level : -1.0;

  for (std::size_t outer = 0; outer < params.max_outer; ++outer) {
    SolverReport step = solver.solve(data, inner);
    const Vector residual = g - K * step.solution;
    const double misfit = residual.norm();

    const std::size_t offset = report.iterations;
    for (auto it : step.history_iterations) report.history_iterations.push_back(offset + it);
    report.objective.insert(report.objective.end(), step.objective.begin(), step.objective.end());
    report.data_misfit.insert(report.data_misfit.end(), step.data_misfit.begin(), step.data_misfit.end());
    report.primal_residual.insert(report.primal_residual.end(), step.primal_residual.begin(),
                                  step.primal_residual.end());
    report.dual_residual.insert(report.dual_residual.end(), step.dual_residual.begin(), step.dual_residual.end());
    report.iterations += step.iterations;
    report.inner_iterations.push_back(step.iterations);
    report.outer_misfit.push_back(misfit);

    if (misfit <= threshold) {
      report.termination = Termination::Discrepancy;
      if (params.selection == BregmanSelection::BeforeThreshold && outer > 0) {
        report.solution = previous;
        report.final_misfit = previous_misfit;
        report.final_objective = previous_objective;
      } else {
        report.final_misfit = misfit;
        report.final_objective = objective(step.solution, misfit);
        report.solution = std::move(step.solution);
      }
      break;
    }
    previous = step.solution;
    previous_misfit = misfit;
    previous_objective = objective(step.solution, misfit);
    report.final_objective = previous_objective;
    report.final_misfit = misfit;
    report.solution = std::move(step.solution);
    data += residual;
  }
  report.wall_time_s = seconds_since(start);
  return report;
}

SolverReport solve_bregman(const Matrix& K, const Vector& g, std::array<std::size_t, 3> shape,
                           const BregmanParams& params) {
  params.validate();
  const TvAdmmSolver solver(K, shape, params.inner.rho, params.inner.strategy);
  return solve_bregman(solver, K, g, params);
}

}  // namespace mrxi
