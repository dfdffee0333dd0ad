#pragma once

#include "mrxi/config.hpp"
#include "mrxi/forward.hpp"
#include "mrxi/metrics.hpp"
#include "mrxi/signal.hpp"
#include "mrxi/solvers.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mrxi {

struct Layout {
  std::vector<Activation> activations;
  std::vector<SensorSpec> sensors;
};

/// Coils and sensors evenly spaced along the four sides of the unit square at
/// the configured standoff, ordered bottom, right, top, left (counter-clockwise).
/// Side position i of n sits at (i + 0.5) / n. Sensors always face inward;
/// coils face inward (aligned) or along a seeded uniform random angle in the
/// plane (randomized).
Layout make_layout(const ExperimentConfig& config);
nlohmann::json layout_json(const Layout& layout);

PixelGrid simulation_grid(const ExperimentConfig& config);
PixelGrid reconstruction_grid(const ExperimentConfig& config);

/// Forward operator of the configured model on `grid`.
ForwardOperator build_operator(const ExperimentConfig& config, const Layout& layout, const PixelGrid& grid);

/// Clean data from the simulation-grid phantom, plus noise seeded with
/// noise.seed + phantom_index.
Measurement simulate_measurement(const ExperimentConfig& config, const ForwardOperator& simulation_op,
                                 const DensityField& phantom, std::size_t phantom_index);

/// Expected noise norm sqrt(M) * sigma for the configured SNR (0 when noise is off).
double expected_noise_norm(const ExperimentConfig& config, const Vector& clean);

/// Absolute weight for a sweep setting; data-relative settings are scaled by |K^T g|_inf.
double resolve_alpha(const MethodConfig& method, const Matrix& K, const Vector& g, double setting);

/// One reconstruction with a freshly factorized solver. `noise_level` enables
/// discrepancy stopping for Bregman and is ignored otherwise.
SolverReport solve_method(const MethodConfig& method, const Matrix& K, std::array<std::size_t, 3> shape, const Vector& g,
                          double alpha, std::optional<double> noise_level = std::nullopt);

/// JSON form of a solver report; the iterate itself is referenced, not inlined.
nlohmann::json report_json(const SolverReport& report, const std::string& solution_path = {});

struct SweepPoint {
  std::string phantom;
  std::string method;
  double alpha_setting = 0.0;
  double alpha = 0.0;
  double ssim = 0.0;
  double rel_l2 = 0.0;
  double data_misfit = 0.0;
  std::size_t iterations = 0;
  std::string termination;
};

struct Artifact {
  std::string path;
  std::string sha256;
  std::size_t bytes = 0;
};

struct ExperimentResult {
  std::string setup;
  /// Best alpha per (phantom, method), in config order (phantom-major).
  std::vector<EvaluationResult> best;
  std::vector<SweepPoint> sweep;
  std::vector<Artifact> artifacts;
  nlohmann::json manifest;

  /// SSIM of the best sweep point; throws ConfigError if absent.
  double ssim(const std::string& phantom, const std::string& method) const;
};

struct RunOptions {
  /// Write artifacts to config.output.directory.
  bool write_artifacts = true;
  /// Progress lines (stage, timings) go here when set.
  std::ostream* log = nullptr;
};

/// layout -> assemble (simulation grid) -> simulate -> noise -> assemble
/// (reconstruction grid) -> alpha sweep per method -> evaluate -> export.
///
/// Failures are rethrown tagged with the stage name. When artifacts were
/// already written, a manifest with status "partial" is left behind.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// SSIM table with one row per method and one column per phantom.
std::string ssim_table_csv(const std::vector<EvaluationResult>& results);
nlohmann::json ssim_table_json(const std::vector<EvaluationResult>& results);
nlohmann::json evaluation_json(const EvaluationResult& result);
EvaluationResult evaluation_from_json(const nlohmann::json& j);

/// Re-renders the SSIM tables from one or more manifests (their evaluation
/// files). Several manifests are combined column-wise, prefixed with the setup.
std::string render_report(const std::vector<std::filesystem::path>& manifests);

}  // namespace mrxi
