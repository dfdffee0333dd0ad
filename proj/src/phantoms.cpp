#include "mrxi/phantoms.hpp"

#include "mrxi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mrxi {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

void check_inside_unit_square(double cx, double cy, double ex, double ey, const char* what) {
  const double tol = 1e-12;
  if (cx - ex < -tol || cx + ex > 1.0 + tol || cy - ey < -tol || cy + ey > 1.0 + tol) {
    throw ConfigError(std::string(what) + " leaves the unit square");
  }
}

void validate_ellipse(const Ellipse& e, const char* what) {
  if (!(e.semi_x > 0.0) || !(e.semi_y > 0.0)) throw ConfigError(std::string(what) + " needs positive semi-axes");
  const double c = std::cos(e.angle_deg * kDeg);
  const double s = std::sin(e.angle_deg * kDeg);
  check_inside_unit_square(e.cx, e.cy, std::hypot(e.semi_x * c, e.semi_y * s), std::hypot(e.semi_x * s, e.semi_y * c),
                           what);
}

void validate_box(const OrientedBox& b, const char* what) {
  if (!(b.half_length > 0.0) || !(b.half_width > 0.0)) throw ConfigError(std::string(what) + " needs positive size");
  const double c = std::abs(std::cos(b.angle_deg * kDeg));
  const double s = std::abs(std::sin(b.angle_deg * kDeg));
  check_inside_unit_square(b.cx, b.cy, b.half_length * c + b.half_width * s, b.half_length * s + b.half_width * c,
                           what);
}

void require_nonnegative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + " must be a nonnegative number");
}

/// Overlap weights between 1D cell partitions of the same interval:
/// weight[t][s] = |T_t n S_s| / |T_t|.
std::vector<std::vector<std::pair<std::size_t, double>>> overlap_weights(double lo, double hi, std::size_t source,
                                                                          std::size_t target) {
  std::vector<std::vector<std::pair<std::size_t, double>>> w(target);
  if (source % target == 0) {
    const std::size_t ratio = source / target;
    const double share = 1.0 / static_cast<double>(ratio);
    for (std::size_t t = 0; t < target; ++t) {
      for (std::size_t s = t * ratio; s < (t + 1) * ratio; ++s) w[t].emplace_back(s, share);
    }
    return w;
  }
  const double hs = (hi - lo) / static_cast<double>(source);
  const double ht = (hi - lo) / static_cast<double>(target);
  for (std::size_t t = 0; t < target; ++t) {
    const double t0 = lo + static_cast<double>(t) * ht;
    const double t1 = lo + static_cast<double>(t + 1) * ht;
    const auto first = static_cast<std::size_t>(std::max(0.0, std::floor((t0 - lo) / hs)));
    for (std::size_t s = first; s < source; ++s) {
      const double s0 = lo + static_cast<double>(s) * hs;
      if (s0 >= t1) break;
      const double s1 = lo + static_cast<double>(s + 1) * hs;
      const double overlap = std::min(s1, t1) - std::max(s0, t0);
      if (overlap > 0.0) w[t].emplace_back(s, overlap / ht);
    }
  }
  return w;
}

}  // namespace

bool Ellipse::contains(double x, double y) const {
  const double c = std::cos(angle_deg * kDeg);
  const double s = std::sin(angle_deg * kDeg);
  const double dx = x - cx;
  const double dy = y - cy;
  const double u = (dx * c + dy * s) / semi_x;
  const double v = (-dx * s + dy * c) / semi_y;
  return u * u + v * v <= 1.0;
}

bool OrientedBox::contains(double x, double y) const {
  const double c = std::cos(angle_deg * kDeg);
  const double s = std::sin(angle_deg * kDeg);
  const double dx = x - cx;
  const double dy = y - cy;
  return std::abs(dx * c + dy * s) <= half_length && std::abs(-dx * s + dy * c) <= half_width;
}

SheppLogan SheppLogan::modified() {
  // Higher-contrast ten-ellipse table, mapped from [-1,1]^2 to the unit square.
  struct Row {
    double value, a, b, x0, y0, phi;
  };
  static constexpr Row table[] = {
      {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},        {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
      {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},    {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
      {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},       {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
      {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},     {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
      {0.1, 0.023, 0.023, 0.0, -0.606, 0.0},   {0.1, 0.023, 0.046, 0.06, -0.605, 0.0},
  };
  SheppLogan p;
  for (const auto& r : table) {
    p.ellipses.push_back({(r.x0 + 1.0) / 2.0, (r.y0 + 1.0) / 2.0, r.a / 2.0, r.b / 2.0, r.phi, r.value});
  }
  return p;
}

PhantomSpec PhantomSpec::defaults(PhantomKind kind) {
  switch (kind) {
    case PhantomKind::PShape:
      return {PShape{}};
    case PhantomKind::SheppLogan:
      return {SheppLogan::modified()};
    case PhantomKind::Tumor:
      return {Tumor{}};
  }
  throw ConfigError("unsupported phantom kind");
}

double PhantomSpec::value_at(double x, double y) const {
  if (const auto* p = std::get_if<PShape>(&shape)) {
    const bool body = p->stem.contains(x, y) || p->bowl.contains(x, y);
    return body && !p->hole.contains(x, y) ? p->intensity : 0.0;
  }
  if (const auto* t = std::get_if<Tumor>(&shape)) {
    return t->body.contains(x, y) && !t->vein.contains(x, y) ? t->intensity : 0.0;
  }
  const auto& sl = std::get<SheppLogan>(shape);
  double v = 0.0;
  for (const auto& e : sl.ellipses) {
    if (e.contains(x, y)) v += e.value;
  }
  return std::max(v, 0.0);
}

void PhantomSpec::validate() const {
  if (const auto* p = std::get_if<PShape>(&shape)) {
    require_nonnegative(p->intensity, "P-shape intensity");
    validate_box(p->stem, "P-shape stem");
    validate_ellipse(p->bowl, "P-shape bowl");
    validate_ellipse(p->hole, "P-shape hole");
  } else if (const auto* t = std::get_if<Tumor>(&shape)) {
    require_nonnegative(t->intensity, "tumor intensity");
    validate_ellipse(t->body, "tumor body");
    validate_box(t->vein, "tumor vein");
  } else {
    const auto& sl = std::get<SheppLogan>(shape);
    if (sl.ellipses.empty()) throw ConfigError("Shepp-Logan phantom needs at least one ellipse");
    for (const auto& e : sl.ellipses) {
      if (!std::isfinite(e.value)) throw ConfigError("Shepp-Logan ellipse value must be finite");
      validate_ellipse(e, "Shepp-Logan ellipse");
    }
  }
}

std::string_view to_string(PhantomKind kind) {
  switch (kind) {
    case PhantomKind::PShape:
      return "p_shape";
    case PhantomKind::SheppLogan:
      return "shepp_logan";
    case PhantomKind::Tumor:
      return "tumor";
  }
  return "unknown";
}

PhantomKind phantom_kind_from_string(std::string_view name) {
  if (name == "p_shape") return PhantomKind::PShape;
  if (name == "shepp_logan") return PhantomKind::SheppLogan;
  if (name == "tumor") return PhantomKind::Tumor;
  throw ConfigError("unsupported phantom kind '" + std::string(name) + "'");
}

DensityField rasterize(const PhantomSpec& spec, const PixelGrid& grid) {
  if (grid.dimension() != 2) throw ConfigError("phantoms are rasterized on 2D grids only");
  spec.validate();
  // Phantom geometry lives in unit-square coordinates relative to the grid box.
  const Vec3 lo = grid.lower();
  const Vec3 ext = grid.upper() - grid.lower();
  DensityField out = DensityField::zeros(grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Vec3 w = grid.midpoint(k);
    out.values[static_cast<Eigen::Index>(k)] = spec.value_at((w.x() - lo.x()) / ext.x(), (w.y() - lo.y()) / ext.y());
  }
  return out;
}

DensityField resample(const DensityField& field, const PixelGrid& target) {
  const PixelGrid& source = field.grid;
  if (!source.same_extent(target, 1e-12)) throw ConfigError("resampling requires grids covering the same region");
  if (source.cells() == target.cells()) return {target, field.values};

  std::array<std::vector<std::vector<std::pair<std::size_t, double>>>, 3> weights;
  for (int a = 0; a < 3; ++a) {
    const double lo = source.lower()[a];
    const double hi = a == 2 && source.dimension() == 2 ? lo + 1.0 : source.upper()[a];
    weights[a] = overlap_weights(lo, hi, source.cells()[a], target.cells()[a]);
  }

  DensityField out = DensityField::zeros(target);
  for (std::size_t tk = 0; tk < target.nz(); ++tk) {
    for (std::size_t tj = 0; tj < target.ny(); ++tj) {
      for (std::size_t ti = 0; ti < target.nx(); ++ti) {
        double acc = 0.0;
        for (const auto& [sk, wk] : weights[2][tk]) {
          for (const auto& [sj, wj] : weights[1][tj]) {
            for (const auto& [si, wi] : weights[0][ti]) {
              acc += wk * wj * wi * field.values[static_cast<Eigen::Index>(source.index(si, sj, sk))];
            }
          }
        }
        out.values[static_cast<Eigen::Index>(target.index(ti, tj, tk))] = acc;
      }
    }
  }
  return out;
}

}  // namespace mrxi
