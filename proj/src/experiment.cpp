#include "mrxi/experiment.hpp"

#include "mrxi/errors.hpp"
#include "mrxi/image_io.hpp"
#include "mrxi/io.hpp"
#include "mrxi/phantoms.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

namespace mrxi {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

/// Runs `fn`, prefixing any library error with the stage name while keeping its type.
template <class F>
auto in_stage(const std::string& stage, F&& fn) -> decltype(fn()) {
  const std::string tag = "[" + stage + "] ";
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError(tag + e.what());
  } catch (const GeometryError& e) {
    throw GeometryError(tag + e.what());
  } catch (const NumericError& e) {
    throw NumericError(tag + e.what());
  } catch (const IoError& e) {
    throw IoError(tag + e.what());
  } catch (const fs::filesystem_error& e) {
    throw IoError(tag + e.what());
  }
}

/// Point on side `side` (0 bottom, 1 right, 2 top, 3 left) at fraction t,
/// together with the inward unit normal.
std::pair<Vec3, Vec3> side_point(const Domain& d, int side, double t) {
  const double r = d.standoff;
  const Vec3& lo = d.lower;
  const Vec3& hi = d.upper;
  const double w = hi.x() - lo.x();
  const double h = hi.y() - lo.y();
  switch (side) {
    case 0:
      return {Vec3(lo.x() + t * w, lo.y() - r, lo.z()), Vec3(0, 1, 0)};
    case 1:
      return {Vec3(hi.x() + r, lo.y() + t * h, lo.z()), Vec3(-1, 0, 0)};
    case 2:
      return {Vec3(hi.x() - t * w, hi.y() + r, lo.z()), Vec3(0, -1, 0)};
    default:
      return {Vec3(lo.x() - r, hi.y() - t * h, lo.z()), Vec3(1, 0, 0)};
  }
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

std::string noise_sidecar(const Measurement& m, double expected_norm) {
  json j;
  j["entries"] = m.data.size();
  j["snr_db"] = m.snr_db ? json(*m.snr_db) : json(nullptr);
  j["seed"] = m.seed ? json(*m.seed) : json(nullptr);
  j["expected_noise_norm"] = expected_norm;
  j["snr_convention"] = "10 log10(mean(g^2) / sigma^2) over all channels";
  j["generator"] = "mt19937_64 + Box-Muller";
  return j.dump(2) + "\n";
}

class ArtifactWriter {
 public:
  ArtifactWriter(fs::path root, bool enabled) : root_(std::move(root)), enabled_(enabled) {}

  void write(const std::string& relative, const std::string& bytes) {
    if (!enabled_) return;
    io::write_file_atomic(root_ / relative, bytes);
    artifacts_.push_back({relative, io::sha256_hex(bytes), bytes.size()});
  }

  bool enabled() const { return enabled_; }
  const fs::path& root() const { return root_; }
  std::vector<Artifact> sorted() const {
    auto out = artifacts_;
    std::sort(out.begin(), out.end(), [](const Artifact& a, const Artifact& b) { return a.path < b.path; });
    return out;
  }

 private:
  fs::path root_;
  bool enabled_;
  std::vector<Artifact> artifacts_;
};

json manifest_json(const ExperimentConfig& config, const std::vector<Artifact>& artifacts, const std::string& status,
                   const std::string& failed_stage, const std::string& error) {
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["setup"] = config.name;
  j["status"] = status;
  if (!failed_stage.empty()) {
    j["failed_stage"] = failed_stage;
    j["error"] = error;
  }
  j["config"] = "config.json";
  j["evaluation"] = "evaluation.json";
  j["artifacts"] = json::array();
  for (const auto& a : artifacts) j["artifacts"].push_back({{"path", a.path}, {"sha256", a.sha256}, {"bytes", a.bytes}});
  return j;
}

class Logger {
 public:
  explicit Logger(std::ostream* out) : out_(out) {}
  void operator()(const std::string& line) const {
    if (out_) *out_ << line << std::endl;
  }

 private:
  std::ostream* out_;
};

std::string fixed(double x, int digits) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << x;
  return s.str();
}

}  // namespace

Layout make_layout(const ExperimentConfig& config) {
  if (config.coils.per_side == 0 || config.sensors_per_side == 0) throw ConfigError("layout counts must be positive");
  const Domain domain = Domain::unit_square(config.standoff);
  domain.validate();
  Layout layout;
  std::mt19937_64 engine(config.coils.seed);
  for (int side = 0; side < 4; ++side) {
    for (std::size_t i = 0; i < config.coils.per_side; ++i) {
      const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(config.coils.per_side);
      auto [position, inward] = side_point(domain, side, t);
      Vec3 direction = inward;
      if (config.coils.mode == CoilMode::Randomized) {
        const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
        const double angle = 2.0 * std::numbers::pi * u;
        direction = Vec3(std::cos(angle), std::sin(angle), 0.0);
      }
      DipoleActivation act{position, config.coils.moment * direction, config.coils.scale};
      act.validate(&domain);
      layout.activations.emplace_back(act);
    }
  }
  for (int side = 0; side < 4; ++side) {
    for (std::size_t i = 0; i < config.sensors_per_side; ++i) {
      const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(config.sensors_per_side);
      auto [position, inward] = side_point(domain, side, t);
      SensorSpec sensor{position, inward};
      sensor.validate(&domain);
      layout.sensors.push_back(sensor);
    }
  }
  return layout;
}

json layout_json(const Layout& layout) {
  json j;
  j["activations"] = json::array();
  for (const auto& act : layout.activations) {
    if (const auto* d = std::get_if<DipoleActivation>(&act)) {
      j["activations"].push_back(
          {{"type", "dipole"}, {"position", vec_json(d->position)}, {"moment", vec_json(d->moment)}, {"scale", d->scale}});
    } else {
      const auto& coil = std::get<SegmentedCoil>(act);
      json vertices = json::array();
      for (const auto& v : coil.vertices) vertices.push_back(vec_json(v));
      j["activations"].push_back({{"type", "coil"}, {"vertices", vertices}, {"scale", coil.scale}});
    }
  }
  j["sensors"] = json::array();
  for (const auto& s : layout.sensors) {
    j["sensors"].push_back({{"position", vec_json(s.position)}, {"orientation", vec_json(s.orientation)}});
  }
  return j;
}

PixelGrid simulation_grid(const ExperimentConfig& config) {
  return PixelGrid::square(config.simulation_grid[0], config.simulation_grid[1]);
}

PixelGrid reconstruction_grid(const ExperimentConfig& config) {
  return PixelGrid::square(config.reconstruction_grid[0], config.reconstruction_grid[1]);
}

ForwardOperator build_operator(const ExperimentConfig& config, const Layout& layout, const PixelGrid& grid) {
  if (config.forward_model == ForwardModel::Identity) {
    ForwardOperator op;
    const auto n = static_cast<Eigen::Index>(grid.size());
    op.matrix = Matrix::Identity(n, n);
    op.grid = grid;
    op.activation_count = 1;
    op.sensor_count = grid.size();
    op.langevin = false;
    op.rows.reserve(grid.size());
    for (std::size_t s = 0; s < grid.size(); ++s) op.rows.push_back({0, s});
    return op;
  }
  return assemble_operator(layout.activations, layout.sensors, grid, config.langevin);
}

namespace {

BregmanParams bregman_params(const MethodConfig& method, double alpha, std::optional<double> noise_level) {
  BregmanParams bp;
  bp.alpha = alpha;
  bp.inner = method.admm(alpha);
  bp.max_outer = method.max_outer;
  bp.tau = method.tau;
  bp.selection = method.selection;
  bp.noise_level = noise_level;
  return bp;
}

}  // namespace

double resolve_alpha(const MethodConfig& method, const Matrix& K, const Vector& g, double setting) {
  if (method.alpha_reference == AlphaReference::Absolute) return setting;
  if (K.cols() == 0 || K.rows() != g.size()) throw ConfigError("data length does not match the operator");
  return setting * (K.transpose() * g).cwiseAbs().maxCoeff();
}

SolverReport solve_method(const MethodConfig& method, const Matrix& K, std::array<std::size_t, 3> shape, const Vector& g,
                          double alpha, std::optional<double> noise_level) {
  switch (method.kind) {
    case MethodKind::Tikhonov:
      return solve_tikhonov(K, g, alpha, method.positivity, method.admm(alpha));
    case MethodKind::TvAdmm:
      return solve_tv_admm(K, g, shape, method.admm(alpha));
    case MethodKind::Bregman:
      return solve_bregman(K, g, shape, bregman_params(method, alpha, noise_level));
  }
  throw ConfigError("unknown method");
}

double expected_noise_norm(const ExperimentConfig& config, const Vector& clean) {
  if (!config.noise.snr_db || clean.size() == 0) return 0.0;
  return clean.norm() * std::pow(10.0, -*config.noise.snr_db / 20.0);
}

Measurement simulate_measurement(const ExperimentConfig& config, const ForwardOperator& simulation_op,
                                 const DensityField& phantom, std::size_t phantom_index) {
  const Vector clean = apply(simulation_op, phantom);
  if (!config.noise.snr_db) {
    Measurement m;
    m.data = clean;
    m.clean = clean;
    return m;
  }
  return add_gaussian_noise(clean, *config.noise.snr_db, config.noise.seed + phantom_index);
}

json report_json(const SolverReport& report, const std::string& solution_path) {
  json j;
  j["method"] = report.method;
  j["termination"] = std::string(to_string(report.termination));
  j["iterations"] = report.iterations;
  j["final_objective"] = report.final_objective;
  j["final_misfit"] = report.final_misfit;
  j["parameters"] = report.parameters;
  j["history_iterations"] = report.history_iterations;
  j["objective"] = report.objective;
  j["data_misfit"] = report.data_misfit;
  j["primal_residual"] = report.primal_residual;
  j["dual_residual"] = report.dual_residual;
  if (report.normal_residual) j["normal_residual"] = *report.normal_residual;
  if (!report.outer_misfit.empty()) {
    j["outer_misfit"] = report.outer_misfit;
    j["inner_iterations"] = report.inner_iterations;
  }
  if (!solution_path.empty()) j["solution"] = solution_path;
  return j;
}

double ExperimentResult::ssim(const std::string& phantom, const std::string& method) const {
  for (const auto& r : best) {
    if (r.phantom == phantom && r.method == method) return r.ssim;
  }
  throw ConfigError("no result for phantom " + phantom + " and method " + method);
}

json evaluation_json(const EvaluationResult& r) {
  return {{"phantom", r.phantom},   {"method", r.method},           {"setup", r.setup},
          {"ssim", r.ssim},         {"rel_l2", r.rel_l2},           {"data_misfit", r.data_misfit},
          {"alpha", r.alpha},       {"dynamic_range", r.dynamic_range}};
}

EvaluationResult evaluation_from_json(const json& j) {
  try {
    EvaluationResult r;
    r.phantom = j.at("phantom").get<std::string>();
    r.method = j.at("method").get<std::string>();
    r.setup = j.at("setup").get<std::string>();
    r.ssim = j.at("ssim").get<double>();
    r.rel_l2 = j.at("rel_l2").get<double>();
    r.data_misfit = j.at("data_misfit").get<double>();
    r.alpha = j.at("alpha").get<double>();
    r.dynamic_range = j.at("dynamic_range").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed evaluation record: ") + e.what());
  }
}

namespace {

template <class T>
void push_unique(std::vector<T>& list, const T& value) {
  if (std::find(list.begin(), list.end(), value) == list.end()) list.push_back(value);
}

}  // namespace

std::string ssim_table_csv(const std::vector<EvaluationResult>& results) {
  std::vector<std::string> phantoms, methods;
  std::map<std::pair<std::string, std::string>, double> cell;
  for (const auto& r : results) {
    push_unique(phantoms, r.phantom);
    push_unique(methods, r.method);
    cell[{r.method, r.phantom}] = r.ssim;
  }
  std::string out = "method";
  for (const auto& p : phantoms) out += "," + p;
  out += "\n";
  for (const auto& m : methods) {
    out += m;
    for (const auto& p : phantoms) {
      auto it = cell.find({m, p});
      out += ",";
      if (it != cell.end()) out += io::format_double(it->second);
    }
    out += "\n";
  }
  return out;
}

json ssim_table_json(const std::vector<EvaluationResult>& results) {
  std::vector<std::string> phantoms, methods;
  for (const auto& r : results) {
    push_unique(phantoms, r.phantom);
    push_unique(methods, r.method);
  }
  json j;
  j["columns"] = phantoms;
  j["rows"] = json::array();
  for (const auto& m : methods) {
    json row = {{"method", m}, {"ssim", json::object()}, {"alpha", json::object()}};
    for (const auto& r : results) {
      if (r.method != m) continue;
      row["ssim"][r.phantom] = r.ssim;
      row["alpha"][r.phantom] = r.alpha;
    }
    j["rows"].push_back(row);
  }
  return j;
}

std::string render_report(const std::vector<fs::path>& manifests) {
  if (manifests.empty()) throw ConfigError("report needs at least one manifest");
  std::string out;
  std::vector<std::string> phantoms;
  struct Row {
    std::string setup, method;
    std::map<std::string, double> ssim;
  };
  std::vector<Row> rows;
  for (const auto& path : manifests) {
    json manifest;
    try {
      manifest = json::parse(io::read_file(path));
    } catch (const json::parse_error& e) {
      throw IoError(path.string() + " is not valid JSON: " + e.what());
    }
    if (!manifest.contains("evaluation") || !manifest.contains("setup")) {
      throw IoError(path.string() + " is not an experiment manifest");
    }
    const fs::path eval_path = path.parent_path() / manifest.at("evaluation").get<std::string>();
    json evaluation;
    try {
      evaluation = json::parse(io::read_file(eval_path));
    } catch (const json::parse_error& e) {
      throw IoError(eval_path.string() + " is not valid JSON: " + e.what());
    }
    for (const auto& item : evaluation.at("best")) {
      const EvaluationResult r = evaluation_from_json(item);
      push_unique(phantoms, r.phantom);
      auto it = std::find_if(rows.begin(), rows.end(),
                             [&](const Row& row) { return row.setup == r.setup && row.method == r.method; });
      if (it == rows.end()) {
        rows.push_back({r.setup, r.method, {}});
        it = rows.end() - 1;
      }
      it->ssim[r.phantom] = r.ssim;
    }
  }
  out = "setup,method";
  for (const auto& p : phantoms) out += "," + p;
  out += "\n";
  for (const auto& row : rows) {
    out += row.setup + "," + row.method;
    for (const auto& p : phantoms) {
      out += ",";
      if (auto it = row.ssim.find(p); it != row.ssim.end()) out += io::format_double(it->second);
    }
    out += "\n";
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  const Logger log(options.log);
  ArtifactWriter writer(config.output.directory, options.write_artifacts);
  ExperimentResult result;
  result.setup = config.name;
  std::string stage = "setup";
  const auto run_start = Clock::now();

  auto mark = [&](const std::string& name) {
    stage = name;
    log("[" + name + "]");
  };

  try {
    mark("layout");
    const Layout layout = in_stage(stage, [&] { return make_layout(config); });
    in_stage(stage, [&] {
      writer.write("config.json", config.to_json().dump(2) + "\n");
      writer.write("layout.json", layout_json(layout).dump(2) + "\n");
    });
    log("  " + std::to_string(layout.activations.size()) + " activations, " + std::to_string(layout.sensors.size()) +
        " sensors");

    mark("assemble_simulation");
    auto t0 = Clock::now();
    const PixelGrid fine_grid = simulation_grid(config);
    const ForwardOperator fine = in_stage(stage, [&] { return build_operator(config, layout, fine_grid); });
    log("  " + std::to_string(fine.row_count()) + " x " + std::to_string(fine.column_count()) + " in " +
        fixed(seconds_since(t0), 2) + " s");
    if (config.output.write_operators) in_stage(stage, [&] { writer.write("operators/simulation.bin", io::encode_operator(fine)); });

    mark("simulate");
    struct PhantomData {
      std::string name;
      DensityField truth;
      Measurement measurement;
      double expected_noise = 0.0;
    };
    const PixelGrid coarse_grid = reconstruction_grid(config);
    std::vector<PhantomData> phantoms;
    in_stage(stage, [&] {
      for (std::size_t i = 0; i < config.phantoms.size(); ++i) {
        const auto& spec = config.phantoms[i];
        const std::string name(to_string(spec.kind()));
        const DensityField fine_truth = rasterize(spec, fine_grid);
        Measurement m = simulate_measurement(config, fine, fine_truth, i);
        const double expected = expected_noise_norm(config, *m.clean);
        DensityField truth = resample(fine_truth, coarse_grid);

        const int bits = config.output.pgm_bits;
        const io::PgmScaling truth_scale = io::auto_scaling(truth, bits);
        writer.write("phantoms/" + name + "_truth.csv", io::format_grid_csv(truth));
        writer.write("phantoms/" + name + "_truth.pgm", io::encode_pgm(truth, truth_scale));
        writer.write("phantoms/" + name + "_truth.pgm.json", io::pgm_sidecar(truth_scale, coarse_grid));
        const io::PgmScaling fine_scale = io::auto_scaling(fine_truth, bits);
        writer.write("phantoms/" + name + "_simulation.pgm", io::encode_pgm(fine_truth, fine_scale));
        writer.write("phantoms/" + name + "_simulation.pgm.json", io::pgm_sidecar(fine_scale, fine_grid));
        writer.write("data/" + name + "_clean.csv", io::format_vector_csv(*m.clean));
        writer.write("data/" + name + "_noisy.csv", io::format_vector_csv(m.data));
        writer.write("data/" + name + "_noisy.bin", io::encode_vector(m.data));
        writer.write("data/" + name + "_noisy.json", noise_sidecar(m, expected));
        phantoms.push_back({name, std::move(truth), std::move(m), expected});
      }
    });

    mark("assemble_reconstruction");
    t0 = Clock::now();
    const ForwardOperator coarse = in_stage(stage, [&] { return build_operator(config, layout, coarse_grid); });
    if (coarse.row_count() != fine.row_count()) {
      throw ConfigError("[" + stage + "] reconstruction operator has " + std::to_string(coarse.row_count()) +
                        " rows, data has " + std::to_string(fine.row_count()));
    }
    log("  " + std::to_string(coarse.row_count()) + " x " + std::to_string(coarse.column_count()) + " in " +
        fixed(seconds_since(t0), 2) + " s");
    if (config.output.write_operators) {
      in_stage(stage, [&] { writer.write("operators/reconstruction.bin", io::encode_operator(coarse)); });
    }

    mark("reconstruct");
    const Matrix& K = coarse.matrix;
    const std::array<std::size_t, 3> shape = coarse_grid.cells();
    std::optional<TikhonovSolver> tikhonov;
    std::map<double, std::unique_ptr<TvAdmmSolver>> tv_solvers;
    auto tv_solver = [&](double rho) -> const TvAdmmSolver& {
      auto& slot = tv_solvers[rho];
      if (!slot) {
        const auto start = Clock::now();
        slot = std::make_unique<TvAdmmSolver>(K, shape, rho);
        log("  factorized TV system (rho " + io::format_double(rho) + ") in " + fixed(seconds_since(start), 2) + " s");
      }
      return *slot;
    };

    for (const auto& ph : phantoms) {
      const Vector& g = ph.measurement.data;
      const double data_scale = (K.transpose() * g).cwiseAbs().maxCoeff();
      const double dynamic_range = config.ssim_dynamic_range ? *config.ssim_dynamic_range : ph.truth.values.maxCoeff();
      if (!(dynamic_range > 0.0)) throw NumericError("[evaluate] phantom " + ph.name + " has no positive intensity");

      for (const auto& method : config.methods) {
        const std::string label = method.label();
        std::optional<SolverReport> best_report;
        std::optional<SweepPoint> best_point;
        json sweep = json::array();
        for (const double setting : method.alphas) {
          const double alpha = method.alpha_reference == AlphaReference::Data ? setting * data_scale : setting;
          const auto start = Clock::now();
          SolverReport report = in_stage("reconstruct", [&] {
            switch (method.kind) {
              case MethodKind::Tikhonov: {
                if (!tikhonov) {
                  const auto f = Clock::now();
                  tikhonov.emplace(K);
                  log("  factorized Tikhonov spectrum in " + fixed(seconds_since(f), 2) + " s");
                }
                return tikhonov->solve(g, alpha, method.positivity, method.admm(alpha));
              }
              case MethodKind::TvAdmm:
                return tv_solver(method.rho).solve(g, method.admm(alpha));
              case MethodKind::Bregman: {
                std::optional<double> level;
                if (config.noise.snr_db) level = ph.expected_noise;
                return solve_bregman(tv_solver(method.rho), K, g, bregman_params(method, alpha, level));
              }
            }
            throw ConfigError("unknown method");
          });
          SweepPoint point = in_stage("evaluate", [&] {
            SweepPoint p;
            p.phantom = ph.name;
            p.method = label;
            p.alpha_setting = setting;
            p.alpha = alpha;
            p.ssim = mrxi::ssim(DensityField(coarse_grid, report.solution), ph.truth, dynamic_range);
            p.rel_l2 = rel_l2(report.solution, ph.truth.values);
            p.data_misfit = report.final_misfit;
            p.iterations = report.iterations;
            p.termination = std::string(to_string(report.termination));
            return p;
          });
          log("  " + ph.name + " " + label + " alpha " + io::format_double(setting) + ": ssim " + fixed(point.ssim, 4) +
              ", " + std::to_string(point.iterations) + " it, " + fixed(seconds_since(start), 2) + " s");
          sweep.push_back({{"alpha_setting", setting},
                           {"alpha", alpha},
                           {"ssim", point.ssim},
                           {"rel_l2", point.rel_l2},
                           {"data_misfit", point.data_misfit},
                           {"iterations", point.iterations},
                           {"termination", point.termination}});
          result.sweep.push_back(point);
          if (!best_point || point.ssim > best_point->ssim) {
            best_point = point;
            best_report = std::move(report);
          }
        }

        EvaluationResult eval;
        eval.phantom = ph.name;
        eval.method = label;
        eval.setup = config.name;
        eval.ssim = best_point->ssim;
        eval.rel_l2 = best_point->rel_l2;
        eval.data_misfit = best_point->data_misfit;
        eval.dynamic_range = dynamic_range;
        eval.alpha = best_point->alpha;
        result.best.push_back(eval);

        stage = "export";
        in_stage(stage, [&] {
          const DensityField recon(coarse_grid, best_report->solution);
          const std::string base = "reconstructions/" + ph.name + "_" + label;
          const io::PgmScaling scale = io::auto_scaling(recon, config.output.pgm_bits);
          writer.write(base + ".csv", io::format_grid_csv(recon));
          writer.write(base + ".pgm", io::encode_pgm(recon, scale));
          writer.write(base + ".pgm.json", io::pgm_sidecar(scale, coarse_grid));
          json report = {{"phantom", ph.name},
                         {"method", label},
                         {"setup", config.name},
                         {"data_scale", data_scale},
                         {"alpha_reference", method.alpha_reference == AlphaReference::Data ? "data" : "absolute"},
                         {"sweep", sweep},
                         {"best", evaluation_json(eval)},
                         {"solver", report_json(*best_report, base + ".csv")}};
          writer.write("reports/" + ph.name + "_" + label + ".json", report.dump(2) + "\n");
        });
        stage = "reconstruct";
      }
    }

    mark("evaluate");
    in_stage(stage, [&] {
      json evaluation;
      evaluation["setup"] = config.name;
      evaluation["best"] = json::array();
      for (const auto& r : result.best) evaluation["best"].push_back(evaluation_json(r));
      evaluation["sweep"] = json::array();
      for (const auto& p : result.sweep) {
        evaluation["sweep"].push_back({{"phantom", p.phantom},
                                       {"method", p.method},
                                       {"alpha_setting", p.alpha_setting},
                                       {"alpha", p.alpha},
                                       {"ssim", p.ssim},
                                       {"rel_l2", p.rel_l2},
                                       {"data_misfit", p.data_misfit},
                                       {"iterations", p.iterations},
                                       {"termination", p.termination}});
      }
      writer.write("evaluation.json", evaluation.dump(2) + "\n");
      writer.write("ssim_table.csv", ssim_table_csv(result.best));
      writer.write("ssim_table.json", ssim_table_json(result.best).dump(2) + "\n");
    });

    mark("manifest");
    result.artifacts = writer.sorted();
    result.manifest = manifest_json(config, result.artifacts, "complete", "", "");
    if (writer.enabled()) {
      in_stage(stage, [&] { io::write_file_atomic(writer.root() / "manifest.json", result.manifest.dump(2) + "\n"); });
    }
    log("done in " + fixed(seconds_since(run_start), 1) + " s");
    return result;
  } catch (const Error& e) {
    if (writer.enabled() && !writer.sorted().empty()) {
      try {
        const json manifest = manifest_json(config, writer.sorted(), "partial", stage, e.what());
        io::write_file_atomic(writer.root() / "manifest.json", manifest.dump(2) + "\n");
      } catch (const Error&) {
        // the original failure is more informative than a secondary write error
      }
    }
    throw;
  }
}

}  // namespace mrxi
