// Command line driver: one subcommand per pipeline stage plus `run` and `report`.
//
// Config precedence, lowest first: built-in defaults, --config file, --set
// overrides (in order), named flags. Exit codes: 0 ok, 2 config, 3 numeric or
// geometry, 4 I/O, 1 anything else.

#include "mrxi/errors.hpp"
#include "mrxi/experiment.hpp"
#include "mrxi/image_io.hpp"
#include "mrxi/io.hpp"
#include "mrxi/phantoms.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace mrxi;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct ConfigOptions {
  std::string file;
  std::vector<std::string> sets;
  std::optional<std::string> name, output_dir, coil_mode, forward_model, snr_db;
  std::optional<std::uint64_t> coil_seed, noise_seed;
  std::optional<std::size_t> coils_per_side, sensors_per_side, max_iterations;
  bool allow_inverse_crime = false;
  bool write_operators = false;

  void attach(CLI::App& app) {
    app.add_option("-c,--config", file, "experiment config (JSON)");
    app.add_option("--set", sets, "override a config key, e.g. --set noise.snr_db=60 or methods.1.rho=2");
    app.add_option("--name", name, "name");
    app.add_option("--output-dir", output_dir, "output.directory");
    app.add_option("--coil-mode", coil_mode, "coils.mode (aligned | randomized)");
    app.add_option("--coil-seed", coil_seed, "coils.seed");
    app.add_option("--coils-per-side", coils_per_side, "coils.per_side");
    app.add_option("--sensors-per-side", sensors_per_side, "sensors.per_side");
    app.add_option("--forward-model", forward_model, "forward_model (dipole | identity)");
    app.add_option("--snr-db", snr_db, "noise.snr_db; 'null' disables noise");
    app.add_option("--noise-seed", noise_seed, "noise.seed");
    app.add_option("--max-iterations", max_iterations, "max_iterations of every method");
    app.add_flag("--allow-inverse-crime", allow_inverse_crime, "grids.allow_inverse_crime");
    app.add_flag("--write-operators", write_operators, "output.write_operators");
  }

  ExperimentConfig resolve() const {
    json doc = ExperimentConfig::default_setup().to_json();
    if (!file.empty()) {
      const std::string text = io::read_file(file);
      try {
        doc = json::parse(text);
      } catch (const json::parse_error& e) {
        throw ConfigError(file + ": " + e.what());
      }
    }
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
      set_config_value(doc, s.substr(0, eq), s.substr(eq + 1));
    }
    auto put = [&](const char* key, const json& value) { set_config_value(doc, key, value.dump()); };
    if (name) put("name", *name);
    if (output_dir) put("output.directory", *output_dir);
    if (coil_mode) put("coils.mode", *coil_mode);
    if (coil_seed) put("coils.seed", *coil_seed);
    if (coils_per_side) put("coils.per_side", *coils_per_side);
    if (sensors_per_side) put("sensors.per_side", *sensors_per_side);
    if (forward_model) put("forward_model", *forward_model);
    if (snr_db) set_config_value(doc, "noise.snr_db", *snr_db);
    if (noise_seed) put("noise.seed", *noise_seed);
    if (allow_inverse_crime) put("grids.allow_inverse_crime", true);
    if (write_operators) put("output.write_operators", true);
    if (max_iterations && doc.contains("methods") && doc["methods"].is_array()) {
      for (std::size_t i = 0; i < doc["methods"].size(); ++i) {
        put(("methods." + std::to_string(i) + ".max_iterations").c_str(), *max_iterations);
      }
    }
    return ExperimentConfig::from_json(doc);
  }
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    io::write_file_atomic(path, text);
  }
}

bool is_csv(const std::string& path) { return fs::path(path).extension() == ".csv"; }

void write_vector(const std::string& path, const Vector& v) {
  if (is_csv(path)) {
    io::write_vector_csv(path, v);
  } else {
    io::write_vector_binary(path, v);
  }
}

std::size_t phantom_index(const ExperimentConfig& config, const std::string& name) {
  for (std::size_t i = 0; i < config.phantoms.size(); ++i) {
    if (to_string(config.phantoms[i].kind()) == name) return i;
  }
  throw ConfigError("phantom '" + name + "' is not in the config");
}

const MethodConfig& find_method(const ExperimentConfig& config, const std::string& label) {
  if (label.empty()) return config.methods.front();
  for (const auto& m : config.methods) {
    if (m.label() == label) return m;
  }
  throw ConfigError("method '" + label + "' is not in the config");
}

ForwardOperator load_or_build(const ExperimentConfig& config, const std::string& path, bool fine) {
  if (!path.empty()) return io::read_operator(path);
  const Layout layout = make_layout(config);
  return build_operator(config, layout, fine ? simulation_grid(config) : reconstruction_grid(config));
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const NumericError*>(&e) || dynamic_cast<const GeometryError*>(&e)) return 3;
  if (dynamic_cast<const IoError*>(&e)) return 4;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Magnetorelaxometry imaging: simulation and reconstruction"};
  app.require_subcommand(1);
  app.fallthrough();
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "progress on stderr");

  ConfigOptions cfg;

  auto* layout_cmd = app.add_subcommand("layout", "write the coil and sensor layout as JSON");
  std::string layout_out;
  cfg.attach(*layout_cmd);
  layout_cmd->add_option("-o,--out", layout_out, "output file (default stdout)");

  auto* assemble_cmd = app.add_subcommand("assemble", "assemble a forward operator");
  std::string assemble_grid = "reconstruction", assemble_out;
  cfg.attach(*assemble_cmd);
  assemble_cmd->add_option("--grid", assemble_grid, "simulation | reconstruction")
      ->check(CLI::IsMember({"simulation", "reconstruction"}));
  assemble_cmd->add_option("-o,--out", assemble_out, "operator container")->required();

  auto* simulate_cmd = app.add_subcommand("simulate", "simulate noisy data for one phantom");
  std::string sim_phantom, sim_operator, sim_out, sim_clean;
  cfg.attach(*simulate_cmd);
  simulate_cmd->add_option("--phantom", sim_phantom, "phantom kind from the config")->required();
  simulate_cmd->add_option("--operator", sim_operator, "simulation-grid operator (assembled when omitted)");
  simulate_cmd->add_option("-o,--out", sim_out, "noisy data (.csv or binary)")->required();
  simulate_cmd->add_option("--clean", sim_clean, "also write the clean data here");

  auto* recon_cmd = app.add_subcommand("reconstruct", "reconstruct one data vector");
  std::string rec_operator, rec_data, rec_method, rec_out, rec_report, rec_pgm;
  std::optional<double> rec_alpha, rec_noise;
  cfg.attach(*recon_cmd);
  recon_cmd->add_option("--operator", rec_operator, "reconstruction-grid operator (assembled when omitted)");
  recon_cmd->add_option("--data", rec_data, "data vector (.csv or binary)")->required();
  recon_cmd->add_option("--method", rec_method, "method label, e.g. tv_pos (default: first method)");
  recon_cmd->add_option("--alpha", rec_alpha, "alpha setting (default: the method's first)");
  recon_cmd->add_option("--noise-level", rec_noise, "expected noise norm for Bregman stopping");
  recon_cmd->add_option("-o,--out", rec_out, "reconstruction as a grid CSV")->required();
  recon_cmd->add_option("--report", rec_report, "solver report JSON");
  recon_cmd->add_option("--pgm", rec_pgm, "reconstruction as PGM (sidecar alongside)");

  auto* eval_cmd = app.add_subcommand("evaluate", "SSIM and relative error against a phantom");
  std::string eval_phantom, eval_recon;
  cfg.attach(*eval_cmd);
  eval_cmd->add_option("--phantom", eval_phantom, "phantom kind from the config")->required();
  eval_cmd->add_option("--reconstruction", eval_recon, "grid CSV")->required();

  auto* run_cmd = app.add_subcommand("run", "run the full experiment and write all artifacts");
  cfg.attach(*run_cmd);

  auto* report_cmd = app.add_subcommand("report", "re-render SSIM tables from manifests");
  std::vector<std::string> manifests;
  std::string report_out;
  report_cmd->add_option("manifests", manifests, "manifest.json files")->required();
  report_cmd->add_option("-o,--out", report_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (report_cmd->parsed()) {
      std::vector<fs::path> paths(manifests.begin(), manifests.end());
      write_text(report_out, render_report(paths));
      return 0;
    }

    const ExperimentConfig config = cfg.resolve();

    if (layout_cmd->parsed()) {
      write_text(layout_out, layout_json(make_layout(config)).dump(2) + "\n");
    } else if (assemble_cmd->parsed()) {
      io::write_operator(assemble_out, load_or_build(config, {}, assemble_grid == "simulation"));
    } else if (simulate_cmd->parsed()) {
      const std::size_t index = phantom_index(config, sim_phantom);
      const ForwardOperator op = load_or_build(config, sim_operator, true);
      const DensityField truth = rasterize(config.phantoms[index], op.grid);
      const Measurement m = simulate_measurement(config, op, truth, index);
      write_vector(sim_out, m.data);
      if (!sim_clean.empty()) write_vector(sim_clean, *m.clean);
      if (verbose) std::cerr << "expected noise norm " << io::format_double(expected_noise_norm(config, *m.clean)) << "\n";
    } else if (recon_cmd->parsed()) {
      const MethodConfig& method = find_method(config, rec_method);
      const ForwardOperator op = load_or_build(config, rec_operator, false);
      const Vector g = io::read_vector(rec_data);
      const double alpha = resolve_alpha(method, op.matrix, g, rec_alpha ? *rec_alpha : method.alphas.front());
      const SolverReport report = solve_method(method, op.matrix, op.grid.cells(), g, alpha, rec_noise);
      const DensityField recon(op.grid, report.solution);
      io::write_file_atomic(rec_out, io::format_grid_csv(recon));
      if (!rec_report.empty()) io::write_file_atomic(rec_report, report_json(report, rec_out).dump(2) + "\n");
      if (!rec_pgm.empty()) {
        const io::PgmScaling scale = io::auto_scaling(recon, config.output.pgm_bits);
        io::write_file_atomic(rec_pgm, io::encode_pgm(recon, scale));
        io::write_file_atomic(rec_pgm + ".json", io::pgm_sidecar(scale, op.grid));
      }
      if (verbose) {
        std::cerr << method.label() << " alpha " << io::format_double(alpha) << ": " << report.iterations
                  << " iterations, " << to_string(report.termination) << "\n";
      }
    } else if (eval_cmd->parsed()) {
      const std::size_t index = phantom_index(config, eval_phantom);
      const DensityField recon = io::read_grid_csv(eval_recon);
      const DensityField truth = resample(rasterize(config.phantoms[index], simulation_grid(config)), recon.grid);
      const double range = config.ssim_dynamic_range ? *config.ssim_dynamic_range : truth.values.maxCoeff();
      const json out = {{"phantom", eval_phantom},
                        {"ssim", ssim(recon, truth, range)},
                        {"rel_l2", rel_l2(recon.values, truth.values)},
                        {"dynamic_range", range}};
      std::cout << out.dump(2) << "\n";
    } else if (run_cmd->parsed()) {
      RunOptions options;
      if (verbose) options.log = &std::cerr;
      const ExperimentResult result = run_experiment(config, options);
      std::cout << ssim_table_csv(result.best);
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}
