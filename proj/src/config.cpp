#include "mrxi/config.hpp"

#include "mrxi/errors.hpp"
#include "mrxi/io.hpp"

#include <charconv>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <set>
#include <sstream>

namespace mrxi {

using nlohmann::json;

namespace {

template <class E>
struct EnumName {
  E value;
  const char* name;
};

constexpr EnumName<CoilMode> kCoilModes[] = {{CoilMode::Aligned, "aligned"}, {CoilMode::Randomized, "randomized"}};
constexpr EnumName<ForwardModel> kForwardModels[] = {{ForwardModel::Dipole, "dipole"},
                                                     {ForwardModel::Identity, "identity"}};
constexpr EnumName<MethodKind> kMethods[] = {
    {MethodKind::Tikhonov, "tikhonov"}, {MethodKind::TvAdmm, "tv_admm"}, {MethodKind::Bregman, "bregman"}};
constexpr EnumName<AlphaReference> kAlphaRefs[] = {{AlphaReference::Absolute, "absolute"},
                                                   {AlphaReference::Data, "data"}};
constexpr EnumName<TvFlavor> kFlavors[] = {{TvFlavor::Anisotropic, "anisotropic"}, {TvFlavor::Isotropic, "isotropic"}};
constexpr EnumName<BregmanSelection> kSelections[] = {{BregmanSelection::AtThreshold, "at_threshold"},
                                                      {BregmanSelection::BeforeThreshold, "before_threshold"}};

template <class E, std::size_t N>
std::string name_of(const EnumName<E> (&table)[N], E value) {
  for (const auto& entry : table) {
    if (entry.value == value) return entry.name;
  }
  return "?";
}

// Collects every problem in a document instead of stopping at the first.
class Reader {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& message) { errors.push_back(path + ": " + message); }

  bool expect_object(const json& j, const std::string& path) {
    if (j.is_object()) return true;
    fail(path, "expected an object");
    return false;
  }

  void allow_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& item : obj.items()) {
      if (!allowed.count(item.key())) fail(join(path, item.key()), "unknown key");
    }
  }

  static std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

  void number(const json& obj, const std::string& path, const char* key, double& out) {
    if (!obj.contains(key)) return;
    read_number(obj.at(key), join(path, key), out);
  }

  void read_number(const json& v, const std::string& path, double& out) {
    if (!v.is_number()) return fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) return fail(path, "must be finite");
    out = x;
  }

  void optional_number(const json& obj, const std::string& path, const char* key, std::optional<double>& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (v.is_null()) {
      out.reset();
      return;
    }
    double x = 0.0;
    const auto before = errors.size();
    read_number(v, join(path, key), x);
    if (errors.size() == before) out = x;
  }

  static bool nonnegative_integer(const json& v) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
  }

  template <class U>
  void unsigned_int(const json& obj, const std::string& path, const char* key, U& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!nonnegative_integer(v)) return fail(join(path, key), "expected a nonnegative integer");
    const auto x = v.get<std::uint64_t>();
    if (x > std::numeric_limits<U>::max()) return fail(join(path, key), "out of range");
    out = static_cast<U>(x);
  }

  void boolean(const json& obj, const std::string& path, const char* key, bool& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_boolean()) return fail(join(path, key), "expected true or false");
    out = v.get<bool>();
  }

  void string(const json& obj, const std::string& path, const char* key, std::string& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_string()) return fail(join(path, key), "expected a string");
    out = v.get<std::string>();
  }

  template <class E, std::size_t N>
  void enumeration(const json& obj, const std::string& path, const char* key, const EnumName<E> (&table)[N], E& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    std::string choices;
    for (const auto& entry : table) choices += std::string(choices.empty() ? "" : ", ") + entry.name;
    if (v.is_string()) {
      for (const auto& entry : table) {
        if (v.get<std::string>() == entry.name) {
          out = entry.value;
          return;
        }
      }
    }
    fail(join(path, key), "expected one of " + choices);
  }

  void grid_shape(const json& obj, const std::string& path, const char* key, std::array<std::size_t, 2>& out) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    const std::string p = join(path, key);
    if (!v.is_array() || v.size() != 2 || !nonnegative_integer(v[0]) || !nonnegative_integer(v[1])) {
      return fail(p, "expected [nx, ny] with positive integers");
    }
    out = {v[0].get<std::size_t>(), v[1].get<std::size_t>()};
  }

  void ellipse(const json& obj, const std::string& path, Ellipse& e, bool with_value) {
    if (!expect_object(obj, path)) return;
    if (with_value) {
      allow_keys(obj, path, {"cx", "cy", "semi_x", "semi_y", "angle_deg", "value"});
      number(obj, path, "value", e.value);
    } else {
      allow_keys(obj, path, {"cx", "cy", "semi_x", "semi_y", "angle_deg"});
    }
    number(obj, path, "cx", e.cx);
    number(obj, path, "cy", e.cy);
    number(obj, path, "semi_x", e.semi_x);
    number(obj, path, "semi_y", e.semi_y);
    number(obj, path, "angle_deg", e.angle_deg);
  }

  void box(const json& obj, const std::string& path, OrientedBox& b) {
    if (!expect_object(obj, path)) return;
    allow_keys(obj, path, {"cx", "cy", "half_length", "half_width", "angle_deg"});
    number(obj, path, "cx", b.cx);
    number(obj, path, "cy", b.cy);
    number(obj, path, "half_length", b.half_length);
    number(obj, path, "half_width", b.half_width);
    number(obj, path, "angle_deg", b.angle_deg);
  }

  std::optional<PhantomSpec> phantom(const json& obj, const std::string& path) {
    if (!expect_object(obj, path)) return std::nullopt;
    if (!obj.contains("kind") || !obj.at("kind").is_string()) {
      fail(join(path, "kind"), "expected p_shape, shepp_logan or tumor");
      return std::nullopt;
    }
    PhantomKind kind;
    try {
      kind = phantom_kind_from_string(obj.at("kind").get<std::string>());
    } catch (const Error&) {
      fail(join(path, "kind"), "expected p_shape, shepp_logan or tumor");
      return std::nullopt;
    }
    PhantomSpec spec = PhantomSpec::defaults(kind);
    if (auto* p = std::get_if<PShape>(&spec.shape)) {
      allow_keys(obj, path, {"kind", "intensity", "stem", "bowl", "hole"});
      number(obj, path, "intensity", p->intensity);
      if (obj.contains("stem")) box(obj.at("stem"), join(path, "stem"), p->stem);
      if (obj.contains("bowl")) ellipse(obj.at("bowl"), join(path, "bowl"), p->bowl, false);
      if (obj.contains("hole")) ellipse(obj.at("hole"), join(path, "hole"), p->hole, false);
    } else if (auto* s = std::get_if<SheppLogan>(&spec.shape)) {
      allow_keys(obj, path, {"kind", "ellipses"});
      if (obj.contains("ellipses")) {
        const json& list = obj.at("ellipses");
        if (!list.is_array() || list.empty()) {
          fail(join(path, "ellipses"), "expected a nonempty list");
        } else {
          s->ellipses.clear();
          for (std::size_t i = 0; i < list.size(); ++i) {
            Ellipse e;
            ellipse(list[i], join(path, "ellipses") + "[" + std::to_string(i) + "]", e, true);
            s->ellipses.push_back(e);
          }
        }
      }
    } else if (auto* t = std::get_if<Tumor>(&spec.shape)) {
      allow_keys(obj, path, {"kind", "intensity", "body", "vein"});
      number(obj, path, "intensity", t->intensity);
      if (obj.contains("body")) ellipse(obj.at("body"), join(path, "body"), t->body, false);
      if (obj.contains("vein")) box(obj.at("vein"), join(path, "vein"), t->vein);
    }
    return spec;
  }

  MethodConfig method(const json& obj, const std::string& path) {
    MethodConfig m;
    if (!expect_object(obj, path)) return m;
    allow_keys(obj, path,
               {"name", "alphas", "alpha_reference", "positivity", "flavor", "rho", "max_iterations", "tolerance",
                "history_stride", "max_outer", "tau", "selection"});
    if (!obj.contains("name")) fail(join(path, "name"), "required");
    enumeration(obj, path, "name", kMethods, m.kind);
    if (obj.contains("alphas")) {
      const json& list = obj.at("alphas");
      if (!list.is_array()) {
        fail(join(path, "alphas"), "expected a list of numbers");
      } else {
        for (std::size_t i = 0; i < list.size(); ++i) {
          double a = 0.0;
          read_number(list[i], join(path, "alphas") + "[" + std::to_string(i) + "]", a);
          m.alphas.push_back(a);
        }
      }
    }
    enumeration(obj, path, "alpha_reference", kAlphaRefs, m.alpha_reference);
    boolean(obj, path, "positivity", m.positivity);
    enumeration(obj, path, "flavor", kFlavors, m.flavor);
    number(obj, path, "rho", m.rho);
    unsigned_int(obj, path, "max_iterations", m.max_iterations);
    number(obj, path, "tolerance", m.tolerance);
    unsigned_int(obj, path, "history_stride", m.history_stride);
    unsigned_int(obj, path, "max_outer", m.max_outer);
    number(obj, path, "tau", m.tau);
    enumeration(obj, path, "selection", kSelections, m.selection);
    return m;
  }
};

json ellipse_json(const Ellipse& e, bool with_value) {
  json j = {{"cx", e.cx}, {"cy", e.cy}, {"semi_x", e.semi_x}, {"semi_y", e.semi_y}, {"angle_deg", e.angle_deg}};
  if (with_value) j["value"] = e.value;
  return j;
}

json box_json(const OrientedBox& b) {
  return {{"cx", b.cx}, {"cy", b.cy}, {"half_length", b.half_length}, {"half_width", b.half_width},
          {"angle_deg", b.angle_deg}};
}

json phantom_json(const PhantomSpec& spec) {
  json j;
  j["kind"] = std::string(to_string(spec.kind()));
  if (const auto* p = std::get_if<PShape>(&spec.shape)) {
    j["intensity"] = p->intensity;
    j["stem"] = box_json(p->stem);
    j["bowl"] = ellipse_json(p->bowl, false);
    j["hole"] = ellipse_json(p->hole, false);
  } else if (const auto* s = std::get_if<SheppLogan>(&spec.shape)) {
    j["ellipses"] = json::array();
    for (const auto& e : s->ellipses) j["ellipses"].push_back(ellipse_json(e, true));
  } else if (const auto* t = std::get_if<Tumor>(&spec.shape)) {
    j["intensity"] = t->intensity;
    j["body"] = ellipse_json(t->body, false);
    j["vein"] = box_json(t->vein);
  }
  return j;
}

}  // namespace

std::string MethodConfig::label() const {
  switch (kind) {
    case MethodKind::Tikhonov:
      return positivity ? "tikhonov_pos" : "tikhonov";
    case MethodKind::TvAdmm:
      return positivity ? "tv_pos" : "tv";
    case MethodKind::Bregman:
      return "bregman";
  }
  return "unknown";
}

AdmmParams MethodConfig::admm(double alpha) const {
  AdmmParams p;
  p.rho = rho;
  p.alpha = alpha;
  p.max_iterations = max_iterations;
  p.primal_tolerance = tolerance;
  p.dual_tolerance = tolerance;
  p.flavor = flavor;
  p.positivity = positivity;
  p.history_stride = history_stride;
  return p;
}

ExperimentConfig ExperimentConfig::default_setup() {
  ExperimentConfig c;
  c.name = "aligned";
  c.phantoms = {PhantomSpec::defaults(PhantomKind::PShape), PhantomSpec::defaults(PhantomKind::SheppLogan),
                PhantomSpec::defaults(PhantomKind::Tumor)};
  MethodConfig tikhonov;
  tikhonov.kind = MethodKind::Tikhonov;
  tikhonov.alphas = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
  MethodConfig tv;
  tv.kind = MethodKind::TvAdmm;
  tv.alphas = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
  c.methods = {tikhonov, tv};
  return c;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  Reader r;
  ExperimentConfig c = default_setup();
  if (!r.expect_object(j, "(root)")) throw ConfigError("config: " + r.errors.front());
  r.allow_keys(j, "", {"schema_version", "name", "domain", "coils", "sensors", "forward_model", "langevin", "grids",
                       "phantoms", "noise", "methods", "metrics", "output"});
  if (!j.contains("schema_version")) {
    r.fail("schema_version", "required");
  } else {
    int version = 0;
    r.unsigned_int(j, "", "schema_version", version);
    if (r.errors.empty() && version != kConfigSchemaVersion) {
      r.fail("schema_version", "unsupported version " + std::to_string(version) + " (expected " +
                                   std::to_string(kConfigSchemaVersion) + ")");
    }
  }
  r.string(j, "", "name", c.name);
  if (j.contains("domain") && r.expect_object(j.at("domain"), "domain")) {
    r.allow_keys(j.at("domain"), "domain", {"standoff"});
    r.number(j.at("domain"), "domain", "standoff", c.standoff);
  }
  if (j.contains("coils") && r.expect_object(j.at("coils"), "coils")) {
    const json& o = j.at("coils");
    r.allow_keys(o, "coils", {"mode", "per_side", "seed", "moment", "scale"});
    r.enumeration(o, "coils", "mode", kCoilModes, c.coils.mode);
    r.unsigned_int(o, "coils", "per_side", c.coils.per_side);
    r.unsigned_int(o, "coils", "seed", c.coils.seed);
    r.number(o, "coils", "moment", c.coils.moment);
    r.number(o, "coils", "scale", c.coils.scale);
  }
  if (j.contains("sensors") && r.expect_object(j.at("sensors"), "sensors")) {
    r.allow_keys(j.at("sensors"), "sensors", {"per_side"});
    r.unsigned_int(j.at("sensors"), "sensors", "per_side", c.sensors_per_side);
  }
  r.enumeration(j, "", "forward_model", kForwardModels, c.forward_model);
  r.boolean(j, "", "langevin", c.langevin);
  if (j.contains("grids") && r.expect_object(j.at("grids"), "grids")) {
    const json& o = j.at("grids");
    r.allow_keys(o, "grids", {"simulation", "reconstruction", "allow_inverse_crime"});
    r.grid_shape(o, "grids", "simulation", c.simulation_grid);
    r.grid_shape(o, "grids", "reconstruction", c.reconstruction_grid);
    r.boolean(o, "grids", "allow_inverse_crime", c.allow_inverse_crime);
  }
  if (j.contains("phantoms")) {
    const json& list = j.at("phantoms");
    if (!list.is_array()) {
      r.fail("phantoms", "expected a list");
    } else {
      c.phantoms.clear();
      for (std::size_t i = 0; i < list.size(); ++i) {
        if (auto p = r.phantom(list[i], "phantoms[" + std::to_string(i) + "]")) c.phantoms.push_back(*p);
      }
    }
  }
  if (j.contains("noise") && r.expect_object(j.at("noise"), "noise")) {
    r.allow_keys(j.at("noise"), "noise", {"snr_db", "seed"});
    r.optional_number(j.at("noise"), "noise", "snr_db", c.noise.snr_db);
    r.unsigned_int(j.at("noise"), "noise", "seed", c.noise.seed);
  }
  if (j.contains("methods")) {
    const json& list = j.at("methods");
    if (!list.is_array()) {
      r.fail("methods", "expected a list");
    } else {
      c.methods.clear();
      for (std::size_t i = 0; i < list.size(); ++i) c.methods.push_back(r.method(list[i], "methods[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("metrics") && r.expect_object(j.at("metrics"), "metrics")) {
    r.allow_keys(j.at("metrics"), "metrics", {"dynamic_range"});
    r.optional_number(j.at("metrics"), "metrics", "dynamic_range", c.ssim_dynamic_range);
  }
  if (j.contains("output") && r.expect_object(j.at("output"), "output")) {
    const json& o = j.at("output");
    r.allow_keys(o, "output", {"directory", "write_operators", "pgm_bits"});
    r.string(o, "output", "directory", c.output.directory);
    r.boolean(o, "output", "write_operators", c.output.write_operators);
    r.unsigned_int(o, "output", "pgm_bits", c.output.pgm_bits);
  }

  // semantic checks run on whatever parsed, so one pass reports everything
  for (auto& e : c.problems()) r.errors.push_back(std::move(e));
  if (r.errors.empty()) return c;
  {
    std::ostringstream msg;
    msg << "invalid config (" << r.errors.size() << (r.errors.size() == 1 ? " problem)" : " problems)");
    for (const auto& e : r.errors) msg << "\n  " << e;
    throw ConfigError(msg.str());
  }
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  const std::string text = io::read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

json ExperimentConfig::to_json() const {
  json j;
  j["schema_version"] = schema_version;
  j["name"] = name;
  j["domain"] = {{"standoff", standoff}};
  j["coils"] = {{"mode", to_string(coils.mode)},
                {"per_side", coils.per_side},
                {"seed", coils.seed},
                {"moment", coils.moment},
                {"scale", coils.scale}};
  j["sensors"] = {{"per_side", sensors_per_side}};
  j["forward_model"] = to_string(forward_model);
  j["langevin"] = langevin;
  j["grids"] = {{"simulation", {simulation_grid[0], simulation_grid[1]}},
                {"reconstruction", {reconstruction_grid[0], reconstruction_grid[1]}},
                {"allow_inverse_crime", allow_inverse_crime}};
  j["phantoms"] = json::array();
  for (const auto& p : phantoms) j["phantoms"].push_back(phantom_json(p));
  j["noise"] = {{"snr_db", noise.snr_db ? json(*noise.snr_db) : json(nullptr)}, {"seed", noise.seed}};
  j["methods"] = json::array();
  for (const auto& m : methods) {
    json mj = {{"name", to_string(m.kind)},
               {"alphas", m.alphas},
               {"alpha_reference", name_of(kAlphaRefs, m.alpha_reference)},
               {"positivity", m.positivity},
               {"flavor", to_string(m.flavor)},
               {"rho", m.rho},
               {"max_iterations", m.max_iterations},
               {"tolerance", m.tolerance},
               {"history_stride", m.history_stride}};
    if (m.kind == MethodKind::Bregman) {
      mj["max_outer"] = m.max_outer;
      mj["tau"] = m.tau;
      mj["selection"] = name_of(kSelections, m.selection);
    }
    j["methods"].push_back(std::move(mj));
  }
  j["metrics"] = {{"dynamic_range", ssim_dynamic_range ? json(*ssim_dynamic_range) : json(nullptr)}};
  j["output"] = {{"directory", output.directory},
                 {"write_operators", output.write_operators},
                 {"pgm_bits", output.pgm_bits}};
  return j;
}

void ExperimentConfig::validate() const {
  const std::vector<std::string> errors = problems();
  if (!errors.empty()) {
    std::ostringstream msg;
    msg << "invalid config (" << errors.size() << (errors.size() == 1 ? " problem)" : " problems)");
    for (const auto& e : errors) msg << "\n  " << e;
    throw ConfigError(msg.str());
  }
}

std::vector<std::string> ExperimentConfig::problems() const {
  std::vector<std::string> errors;
  auto check = [&](bool ok, const std::string& message) {
    if (!ok) errors.push_back(message);
  };
  check(schema_version == kConfigSchemaVersion, "schema_version: unsupported");
  check(standoff > 0.0 && std::isfinite(standoff), "domain.standoff: must be positive");
  check(coils.per_side >= 1, "coils.per_side: must be at least 1");
  check(coils.moment > 0.0, "coils.moment: must be positive");
  check(coils.scale > 0.0, "coils.scale: must be positive");
  check(sensors_per_side >= 1, "sensors.per_side: must be at least 1");
  for (auto* g : {&simulation_grid, &reconstruction_grid}) {
    check((*g)[0] >= 1 && (*g)[1] >= 1, "grids: every extent must be at least 1");
  }
  check(forward_model != ForwardModel::Identity || simulation_grid == reconstruction_grid,
        "grids: the identity forward model needs equal simulation and reconstruction grids");
  check(allow_inverse_crime || simulation_grid != reconstruction_grid,
        "grids: simulation and reconstruction grids coincide (inverse crime); set grids.allow_inverse_crime to override");
  check(!phantoms.empty(), "phantoms: at least one phantom is required");
  for (std::size_t i = 0; i < phantoms.size(); ++i) {
    try {
      phantoms[i].validate();
    } catch (const ConfigError& e) {
      errors.push_back("phantoms[" + std::to_string(i) + "]: " + e.what());
    }
  }
  if (noise.snr_db) check(std::isfinite(*noise.snr_db), "noise.snr_db: must be finite or null");
  check(!methods.empty(), "methods: at least one method is required");
  for (std::size_t i = 0; i < methods.size(); ++i) {
    const auto& m = methods[i];
    const std::string p = "methods[" + std::to_string(i) + "].";
    check(!m.alphas.empty(), p + "alphas: at least one value is required");
    for (double a : m.alphas) check(a > 0.0 && std::isfinite(a), p + "alphas: values must be positive");
    check(m.rho > 0.0, p + "rho: must be positive");
    check(m.max_iterations >= 1, p + "max_iterations: must be at least 1");
    check(m.tolerance > 0.0, p + "tolerance: must be positive");
    check(m.history_stride >= 1, p + "history_stride: must be at least 1");
    check(m.max_outer >= 1, p + "max_outer: must be at least 1");
    check(m.tau > 0.0, p + "tau: must be positive");
  }
  std::set<std::string> labels;
  for (const auto& m : methods) check(labels.insert(m.label()).second, "methods: duplicate method " + m.label());
  if (ssim_dynamic_range) check(*ssim_dynamic_range > 0.0, "metrics.dynamic_range: must be positive");
  check(output.pgm_bits == 8 || output.pgm_bits == 16, "output.pgm_bits: must be 8 or 16");
  check(!output.directory.empty(), "output.directory: must not be empty");
  return errors;
}

void set_config_value(json& document, const std::string& dotted_key, const std::string& value) {
  if (dotted_key.empty()) throw ConfigError("empty config key");
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    parsed = value;
  }
  json* node = &document;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted_key.find('.', start);
    const std::string part = dotted_key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("malformed config key '" + dotted_key + "'");
    if (node->is_array()) {
      // numeric parts index into lists ("methods.1.rho")
      std::size_t index = 0;
      const auto [end, ec] = std::from_chars(part.data(), part.data() + part.size(), index);
      if (ec != std::errc() || end != part.data() + part.size() || index >= node->size()) {
        throw ConfigError("config key '" + dotted_key + "' has no list element '" + part + "'");
      }
      node = &(*node)[index];
    } else {
      if (!node->is_object()) {
        if (!node->is_null()) throw ConfigError("config key '" + dotted_key + "' descends into a non-object");
        *node = json::object();
      }
      node = &(*node)[part];
    }
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = std::move(parsed);
}

std::string to_string(CoilMode mode) { return name_of(kCoilModes, mode); }
std::string to_string(ForwardModel model) { return name_of(kForwardModels, model); }
std::string to_string(MethodKind kind) { return name_of(kMethods, kind); }
std::string to_string(TvFlavor flavor) { return name_of(kFlavors, flavor); }

}  // namespace mrxi
