#pragma once

#include "mrxi/gradient.hpp"
#include "mrxi/phantoms.hpp"
#include "mrxi/solvers.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mrxi {

inline constexpr int kConfigSchemaVersion = 1;

enum class CoilMode { Aligned, Randomized };
enum class ForwardModel {
  /// Dipole activations and directional sensors around the unit square.
  Dipole,
  /// K = I on the reconstruction grid; a sanity path for exact inversion.
  Identity,
};
enum class MethodKind { Tikhonov, TvAdmm, Bregman };
enum class AlphaReference {
  /// alphas are used as given.
  Absolute,
  /// alphas are multiplied by max |K^T g| for the data being reconstructed.
  Data,
};

struct CoilLayoutConfig {
  CoilMode mode = CoilMode::Aligned;
  std::size_t per_side = 7;
  std::uint64_t seed = 0;
  double moment = 1.0;
  double scale = 1.0;
};

struct NoiseConfig {
  /// Empty means noise is disabled.
  std::optional<double> snr_db = 80.0;
  /// Phantom i (in config order) is perturbed with seed + i.
  std::uint64_t seed = 1;
};

struct MethodConfig {
  MethodKind kind = MethodKind::TvAdmm;
  std::vector<double> alphas;
  AlphaReference alpha_reference = AlphaReference::Data;
  bool positivity = true;
  TvFlavor flavor = TvFlavor::Anisotropic;
  double rho = 1.0;
  std::size_t max_iterations = 2000;
  double tolerance = 1e-6;
  std::size_t history_stride = 10;
  /// Bregman only.
  std::size_t max_outer = 10;
  double tau = 1.02;
  BregmanSelection selection = BregmanSelection::AtThreshold;

  /// Identifier used in tables and file names ("tikhonov_pos", "tv_pos", ...).
  std::string label() const;
  AdmmParams admm(double alpha) const;
};

struct OutputConfig {
  std::string directory = "mrxi_out";
  bool write_operators = false;
  int pgm_bits = 16;
};

struct ExperimentConfig {
  int schema_version = kConfigSchemaVersion;
  std::string name = "default";
  double standoff = 0.15;
  CoilLayoutConfig coils;
  std::size_t sensors_per_side = 19;
  ForwardModel forward_model = ForwardModel::Dipole;
  bool langevin = true;
  std::array<std::size_t, 2> simulation_grid{197, 197};
  std::array<std::size_t, 2> reconstruction_grid{75, 75};
  bool allow_inverse_crime = false;
  std::vector<PhantomSpec> phantoms;
  NoiseConfig noise;
  std::vector<MethodConfig> methods;
  /// Empty means the ground-truth maximum of each phantom.
  std::optional<double> ssim_dynamic_range;
  OutputConfig output;

  /// Two-method, three-phantom setup of the aligned-coil experiment.
  static ExperimentConfig default_setup();

  /// Parses and validates; every problem found is listed in one ConfigError.
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::string& path);
  /// Fully expanded form (all defaults written out).
  nlohmann::json to_json() const;
  void validate() const;
  /// Semantic problems, one message per entry; empty when valid.
  [[nodiscard]] std::vector<std::string> problems() const;
};

/// Sets the value at a dotted key path ("noise.snr_db") inside a config
/// document, creating objects as needed. `value` is parsed as JSON, falling
/// back to a plain string.
void set_config_value(nlohmann::json& document, const std::string& dotted_key, const std::string& value);

std::string to_string(CoilMode mode);
std::string to_string(ForwardModel model);
std::string to_string(MethodKind kind);
std::string to_string(TvFlavor flavor);

}  // namespace mrxi
