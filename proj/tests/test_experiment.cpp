#include "mrxi/errors.hpp"
#include "mrxi/experiment.hpp"
#include "mrxi/io.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace mrxi;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config(const fs::path& out) {
  ExperimentConfig c = ExperimentConfig::default_setup();
  c.name = "small";
  c.coils.per_side = 3;
  c.sensors_per_side = 5;
  c.simulation_grid = {37, 37};
  c.reconstruction_grid = {20, 20};
  for (auto& m : c.methods) {
    m.alphas = {1e-2, 1e-4};
    m.max_iterations = 30;
  }
  c.output.directory = out.string();
  return c;
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = io::read_file(e.path());
  }
  return files;
}

}  // namespace

TEST_CASE("default layout has 28 activations and 76 sensors") {
  const ExperimentConfig c = ExperimentConfig::default_setup();
  const Layout layout = make_layout(c);
  CHECK(layout.activations.size() == 28);
  CHECK(layout.sensors.size() == 76);
  const Domain domain = Domain::unit_square(c.standoff);
  // outward normals of bottom, right, top, left
  const Vec3 outward[4] = {{0, -1, 0}, {1, 0, 0}, {0, 1, 0}, {-1, 0, 0}};
  for (std::size_t i = 0; i < 28; ++i) {
    const auto& d = std::get<DipoleActivation>(layout.activations[i]);
    CHECK(domain.in_shell(d.position));
    CHECK(d.moment.dot(outward[i / 7]) == -1.0);
    CHECK(domain.distance_to(d.position) == doctest::Approx(0.15));
  }
  for (std::size_t i = 0; i < 76; ++i) {
    const auto& s = layout.sensors[i];
    CHECK(s.orientation.dot(outward[i / 19]) == -1.0);
    CHECK(s.position.z() == 0.0);
  }
  // evenly spaced along the bottom side at (i + 0.5) / n
  CHECK(std::get<DipoleActivation>(layout.activations[0]).position.isApprox(Vec3(0.5 / 7, -0.15, 0)));
  CHECK(layout.sensors[18].position.isApprox(Vec3(18.5 / 19, -0.15, 0)));
}

TEST_CASE("randomized layouts are reproducible and seed dependent") {
  ExperimentConfig c = ExperimentConfig::default_setup();
  c.coils.mode = CoilMode::Randomized;
  c.coils.seed = 5;
  const json a = layout_json(make_layout(c));
  const json b = layout_json(make_layout(c));
  CHECK(a.dump() == b.dump());
  c.coils.seed = 6;
  CHECK(layout_json(make_layout(c)).dump() != a.dump());
  for (const auto& act : make_layout(c).activations) {
    const auto& d = std::get<DipoleActivation>(act);
    CHECK(d.moment.norm() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(d.moment.z() == 0.0);
  }
}

TEST_CASE("default operator has 2128 rows and 5625 columns") {
  const ExperimentConfig c = ExperimentConfig::default_setup();
  const ForwardOperator op = build_operator(c, make_layout(c), reconstruction_grid(c));
  CHECK(op.row_count() == 2128);
  CHECK(op.column_count() == 5625);
  op.validate();
}

TEST_CASE("expected noise norm follows the SNR convention") {
  ExperimentConfig c = ExperimentConfig::default_setup();
  const Vector g = Vector::LinSpaced(100, 1.0, 2.0);
  CHECK(expected_noise_norm(c, g) == doctest::Approx(g.norm() * 1e-4));
  c.noise.snr_db.reset();
  CHECK(expected_noise_norm(c, g) == 0.0);
}

TEST_CASE("identity model with exact data inverts to the phantom") {
  const auto dir = test_support::scratch_dir("experiment_identity");
  ExperimentConfig c = ExperimentConfig::default_setup();
  c.name = "identity";
  c.forward_model = ForwardModel::Identity;
  c.simulation_grid = c.reconstruction_grid = {40, 40};
  c.allow_inverse_crime = true;
  c.noise.snr_db.reset();
  MethodConfig m;
  m.kind = MethodKind::Tikhonov;
  m.positivity = false;
  m.alpha_reference = AlphaReference::Absolute;
  m.alphas = {1e-9};
  c.methods = {m};
  c.output.directory = dir.string();
  const ExperimentResult r = run_experiment(c);
  REQUIRE(r.best.size() == 3);
  for (const auto& e : r.best) {
    CHECK(e.rel_l2 < 1e-6);
    CHECK(e.ssim == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("end-to-end run writes a complete, hashed artifact set") {
  const auto dir = test_support::scratch_dir("experiment_small");
  const ExperimentConfig c = small_config(dir);
  const ExperimentResult r = run_experiment(c);

  REQUIRE(r.best.size() == 6);
  CHECK(r.sweep.size() == 12);
  for (const auto& e : r.best) {
    CHECK(e.ssim >= -1.0);
    CHECK(e.ssim <= 1.0);
    CHECK(e.rel_l2 >= 0.0);
    CHECK(e.setup == "small");
  }
  CHECK_NOTHROW(r.ssim("tumor", "tv_pos"));
  CHECK_THROWS_AS(r.ssim("tumor", "bregman"), ConfigError);

  const json manifest = json::parse(io::read_file(dir / "manifest.json"));
  CHECK(manifest.at("status") == "complete");
  std::set<std::string> listed;
  for (const auto& a : manifest.at("artifacts")) {
    const std::string path = a.at("path");
    listed.insert(path);
    const std::string bytes = io::read_file(dir / path);
    CHECK(a.at("sha256") == io::sha256_hex(bytes));
    CHECK(a.at("bytes") == bytes.size());
  }
  for (const char* expect : {"config.json", "layout.json", "evaluation.json", "ssim_table.csv", "ssim_table.json",
                             "phantoms/p_shape_truth.pgm", "phantoms/p_shape_truth.pgm.json",
                             "data/shepp_logan_noisy.bin", "data/tumor_noisy.json",
                             "reconstructions/tumor_tv_pos.pgm", "reports/p_shape_tikhonov_pos.json"}) {
    CHECK(listed.count(expect) == 1);
  }

  // table layout: rows are methods, columns phantoms
  const std::string table = io::read_file(dir / "ssim_table.csv");
  CHECK(table.substr(0, table.find('\n')) == "method,p_shape,shepp_logan,tumor");
  CHECK(std::count(table.begin(), table.end(), '\n') == 3);

  // config artifact parses back to the same config
  CHECK(ExperimentConfig::from_json(json::parse(io::read_file(dir / "config.json"))).to_json() == c.to_json());

  // report re-renders from the manifest
  const std::string report = render_report({dir / "manifest.json"});
  CHECK(report.substr(0, report.find('\n')) == "setup,method,p_shape,shepp_logan,tumor");
  CHECK(report.find("small,tv_pos,") != std::string::npos);
}

TEST_CASE("repeated runs are byte identical") {
  const auto a = test_support::scratch_dir("experiment_repeat");
  const ExperimentConfig c = small_config(a);
  run_experiment(c);
  const auto first = read_tree(a);
  fs::remove_all(a);
  run_experiment(c);
  const auto second = read_tree(a);
  CHECK(first.size() == second.size());
  for (const auto& [path, bytes] : first) {
    CAPTURE(path);
    REQUIRE(second.count(path) == 1);
    CHECK(bytes == second.at(path));
  }
}

TEST_CASE("failures are tagged with the stage and leave a partial manifest") {
  const auto dir = test_support::scratch_dir("experiment_failure");
  ExperimentConfig c = small_config(dir);
  // an empty phantom has no signal, so the SNR is undefined
  PhantomSpec empty = PhantomSpec::defaults(PhantomKind::Tumor);
  std::get<Tumor>(empty.shape).intensity = 0.0;
  c.phantoms = {empty};
  try {
    run_experiment(c);
    FAIL("expected a numeric error");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).rfind("[simulate]", 0) == 0);
  }
  const json manifest = json::parse(io::read_file(dir / "manifest.json"));
  CHECK(manifest.at("status") == "partial");
  CHECK(manifest.at("failed_stage") == "simulate");
}

TEST_CASE("dry runs write nothing") {
  const auto dir = test_support::scratch_dir("experiment_dry") / "never";
  ExperimentConfig c = small_config(dir);
  RunOptions opts;
  opts.write_artifacts = false;
  const ExperimentResult r = run_experiment(c, opts);
  CHECK(r.best.size() == 6);
  CHECK(r.artifacts.empty());
  CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("evaluation records round-trip") {
  EvaluationResult e{"tumor", "tv_pos", "aligned", 0.25, 0.5, 1e-3, 1.0, 2e-4};
  const EvaluationResult back = evaluation_from_json(evaluation_json(e));
  CHECK(back.phantom == e.phantom);
  CHECK(back.ssim == e.ssim);
  CHECK(back.alpha == e.alpha);
  CHECK_THROWS_AS(evaluation_from_json(json{{"phantom", "x"}}), IoError);
}
