#include "mrxi/geometry.hpp"

#include "mrxi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace mrxi {

namespace {

std::string fmt_point(const Vec3& p) {
  std::ostringstream os;
  os << '(' << p.x() << ", " << p.y() << ", " << p.z() << ')';
  return os.str();
}

bool finite(const Vec3& v) { return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z()); }

void check_placement(const Domain* domain, const Vec3& p, const char* what) {
  if (!finite(p)) throw ConfigError(std::string(what) + " position is not finite");
  if (domain && !domain->in_shell(p)) {
    throw ConfigError(std::string(what) + " at " + fmt_point(p) + " is not inside the standoff shell around the domain");
  }
}

}  // namespace

// ---------------------------------------------------------------- Domain

Domain Domain::unit_square(double standoff) {
  Domain d;
  d.upper = Vec3(1.0, 1.0, 0.0);
  d.standoff = standoff;
  d.dimension = 2;
  return d;
}

Domain Domain::unit_cube(double standoff) {
  Domain d;
  d.standoff = standoff;
  d.dimension = 3;
  return d;
}

bool Domain::contains(const Vec3& p) const {
  for (int a = 0; a < dimension; ++a) {
    if (p[a] < lower[a] || p[a] > upper[a]) return false;
  }
  return true;
}

bool Domain::in_shell(const Vec3& p) const {
  if (contains(p)) return false;
  // Small slack so points placed exactly on the outer box survive rounding.
  const double slack = 1e-12 * (1.0 + standoff);
  for (int a = 0; a < dimension; ++a) {
    if (p[a] < lower[a] - standoff - slack || p[a] > upper[a] + standoff + slack) return false;
  }
  return true;
}

double Domain::distance_to(const Vec3& p) const {
  double sq = 0.0;
  for (int a = 0; a < dimension; ++a) {
    const double excess = std::max({lower[a] - p[a], 0.0, p[a] - upper[a]});
    sq += excess * excess;
  }
  if (dimension == 2) {
    const double dz = p.z() - lower.z();
    sq += dz * dz;
  }
  return std::sqrt(sq);
}

void Domain::validate() const {
  if (dimension != 2 && dimension != 3) throw ConfigError("domain dimension must be 2 or 3");
  if (!(standoff > 0.0) || !std::isfinite(standoff)) throw ConfigError("domain standoff must be positive");
  for (int a = 0; a < dimension; ++a) {
    if (!(upper[a] > lower[a])) throw ConfigError("domain upper bound must exceed lower bound on every axis");
  }
}

// ---------------------------------------------------------------- sources

SegmentedCoil SegmentedCoil::circle(const Vec3& center, const Vec3& normal, double radius,
                                    std::size_t segments, double scale) {
  if (segments < 3) throw ConfigError("circular coil needs at least 3 segments");
  if (!(radius > 0.0)) throw ConfigError("coil radius must be positive");
  const Vec3 n = normal.normalized();
  // Any vector not parallel to n seeds the in-plane basis.
  const Vec3 seed = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 u = n.cross(seed).normalized();
  const Vec3 v = n.cross(u);
  SegmentedCoil coil;
  coil.scale = scale;
  coil.vertices.reserve(segments + 1);
  for (std::size_t k = 0; k < segments; ++k) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(segments);
    coil.vertices.push_back(center + radius * (std::cos(t) * u + std::sin(t) * v));
  }
  coil.vertices.push_back(coil.vertices.front());
  return coil;
}

void SegmentedCoil::validate(const Domain* domain) const {
  if (vertices.size() < 2) throw ConfigError("segmented coil needs at least one segment");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("coil scale must be positive");
  for (const auto& v : vertices) check_placement(domain, v, "coil vertex");
}

void DipoleActivation::validate(const Domain* domain) const {
  if (!(moment.norm() > 0.0) || !finite(moment)) throw ConfigError("dipole moment must be nonzero");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("dipole scale must be positive");
  check_placement(domain, position, "dipole activation");
}

void SensorSpec::validate(const Domain* domain) const {
  if (!finite(orientation) || std::abs(orientation.norm() - 1.0) > 1e-12) {
    throw ConfigError("sensor orientation must be a unit vector");
  }
  check_placement(domain, position, "sensor");
}

// ---------------------------------------------------------------- PixelGrid

PixelGrid::PixelGrid(std::array<std::size_t, 3> cells, Vec3 lower, Vec3 upper, int dimension)
    : cells_(cells), lower_(std::move(lower)), upper_(std::move(upper)), dimension_(dimension) {
  if (dimension_ != 2 && dimension_ != 3) throw ConfigError("grid dimension must be 2 or 3");
  for (auto c : cells_) {
    if (c == 0) throw ConfigError("grid needs at least one cell per axis");
  }
  if (dimension_ == 2) {
    if (cells_[2] != 1) throw ConfigError("2D grid must have a single layer in z");
    upper_.z() = lower_.z();
  }
  for (int a = 0; a < dimension_; ++a) {
    if (!(upper_[a] > lower_[a])) throw ConfigError("grid extent must be positive on every axis");
  }
}

PixelGrid PixelGrid::square(std::size_t nx, std::size_t ny, const Domain& domain) {
  return PixelGrid({nx, ny, 1}, domain.lower, domain.upper, 2);
}

PixelGrid PixelGrid::cube(std::size_t nx, std::size_t ny, std::size_t nz, const Domain& domain) {
  return PixelGrid({nx, ny, nz}, domain.lower, domain.upper, 3);
}

PixelGrid PixelGrid::line(std::size_t n) { return PixelGrid({n, 1, 1}, Vec3::Zero(), Vec3(1.0, 1.0, 0.0), 2); }

Vec3 PixelGrid::spacing() const {
  Vec3 h;
  for (int a = 0; a < 3; ++a) h[a] = (upper_[a] - lower_[a]) / static_cast<double>(cells_[a]);
  return h;
}

double PixelGrid::cell_measure() const {
  const Vec3 h = spacing();
  return dimension_ == 2 ? h.x() * h.y() : h.x() * h.y() * h.z();
}

Vec3 PixelGrid::midpoint(std::size_t linear) const {
  const std::size_t i = linear % cells_[0];
  const std::size_t j = (linear / cells_[0]) % cells_[1];
  const std::size_t k = linear / (cells_[0] * cells_[1]);
  const Vec3 h = spacing();
  return {lower_.x() + (static_cast<double>(i) + 0.5) * h.x(), lower_.y() + (static_cast<double>(j) + 0.5) * h.y(),
          dimension_ == 2 ? lower_.z() : lower_.z() + (static_cast<double>(k) + 0.5) * h.z()};
}

bool PixelGrid::same_extent(const PixelGrid& other, double tol) const {
  return dimension_ == other.dimension_ && (lower_ - other.lower_).cwiseAbs().maxCoeff() <= tol &&
         (upper_ - other.upper_).cwiseAbs().maxCoeff() <= tol;
}

bool PixelGrid::operator==(const PixelGrid& other) const { return cells_ == other.cells_ && same_extent(other, 0.0); }

// ---------------------------------------------------------------- fields

Vec3 segment_field(const Vec3& a, const Vec3& b, const Vec3& w, double scale) {
  const Vec3 da = a - w;
  const Vec3 db = b - w;
  const double la = da.norm();
  const double lb = db.norm();
  if (la < kDegeneracyTolerance || lb < kDegeneracyTolerance) {
    throw GeometryError("segment field evaluated at a segment endpoint " + fmt_point(w));
  }
  const double prod = la * lb;
  const double denom = prod + da.dot(db);
  if (std::abs(denom) < kDegeneracyTolerance) {
    throw GeometryError("segment field evaluated on the conductor at " + fmt_point(w));
  }
  return scale * ((la + lb) / prod) * da.cross(db) / denom;
}

Vec3 coil_field(const SegmentedCoil& coil, const Vec3& w) {
  Vec3 field = Vec3::Zero();
  for (std::size_t k = 0; k + 1 < coil.vertices.size(); ++k) {
    field += segment_field(coil.vertices[k], coil.vertices[k + 1], w, coil.scale);
  }
  return field;
}

Vec3 dipole_tensor_apply(const Vec3& d, const Vec3& v) {
  const double r2 = d.squaredNorm();
  const double r = std::sqrt(r2);
  if (r < kDegeneracyTolerance) throw GeometryError("dipole kernel evaluated at its source");
  const double inv_r3 = 1.0 / (r2 * r);
  return (3.0 * d.dot(v) / r2) * inv_r3 * d - inv_r3 * v;
}

Vec3 dipole_activation_field(const DipoleActivation& act, const Vec3& w) {
  return act.scale * dipole_tensor_apply(w - act.position, act.moment);
}

Vec3 activation_field(const Activation& act, const Vec3& w) {
  return std::visit(
      [&w](const auto& a) -> Vec3 {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, SegmentedCoil>) {
          return coil_field(a, w);
        } else {
          return dipole_activation_field(a, w);
        }
      },
      act);
}

}  // namespace mrxi
