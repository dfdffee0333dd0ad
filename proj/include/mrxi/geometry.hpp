#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cstddef>
#include <variant>
#include <vector>

namespace mrxi {

using Vec3 = Eigen::Vector3d;

/// Denominators below this magnitude are treated as singular geometry.
inline constexpr double kDegeneracyTolerance = 1e-14;

/// Region of interest Omega as an axis-aligned box plus the standoff r that
/// defines the shell Omega_0 = [lower - r, upper + r] \ Omega holding coils
/// and sensors.
///
/// A 2D domain lives in the z = lower.z plane; containment tests then ignore
/// the z coordinate.
struct Domain {
  Vec3 lower{0.0, 0.0, 0.0};
  Vec3 upper{1.0, 1.0, 1.0};
  double standoff = 0.15;
  int dimension = 3;

  static Domain unit_square(double standoff = 0.15);
  static Domain unit_cube(double standoff = 0.15);

  /// Closed-box membership.
  bool contains(const Vec3& p) const;
  /// True when p is outside Omega but inside the enlarged box.
  bool in_shell(const Vec3& p) const;
  /// Euclidean distance from p to Omega (0 inside).
  double distance_to(const Vec3& p) const;

  void validate() const;
};

/// Piecewise linear conductor path; vertex k and k+1 bound segment k.
struct SegmentedCoil {
  std::vector<Vec3> vertices;
  double scale = 1.0;

  std::size_t segment_count() const { return vertices.empty() ? 0 : vertices.size() - 1; }

  /// Closed regular polygon approximating a circle; the first vertex is
  /// repeated at the end so the path closes.
  static SegmentedCoil circle(const Vec3& center, const Vec3& normal, double radius,
                              std::size_t segments = 64, double scale = 1.0);

  void validate(const Domain* domain = nullptr) const;
};

/// Idealized small coil: a magnetic dipole with moment `moment` at `position`.
struct DipoleActivation {
  Vec3 position = Vec3::Zero();
  Vec3 moment = Vec3::UnitX();
  double scale = 1.0;

  void validate(const Domain* domain = nullptr) const;
};

using Activation = std::variant<SegmentedCoil, DipoleActivation>;

/// Directional point sensor.
struct SensorSpec {
  Vec3 position = Vec3::Zero();
  Vec3 orientation = Vec3::UnitX();

  void validate(const Domain* domain = nullptr) const;
};

/// Uniform cell-centred grid over a box. A 2D grid has nz == 1 and zero
/// thickness in z; its cell measure is the cell area.
class PixelGrid {
 public:
  PixelGrid() = default;
  PixelGrid(std::array<std::size_t, 3> cells, Vec3 lower, Vec3 upper, int dimension);

  static PixelGrid square(std::size_t nx, std::size_t ny, const Domain& domain = Domain::unit_square());
  static PixelGrid cube(std::size_t nx, std::size_t ny, std::size_t nz,
                        const Domain& domain = Domain::unit_cube());
  /// nx x 1 grid on [0,1], used for 1D signal problems.
  static PixelGrid line(std::size_t n);

  std::size_t nx() const { return cells_[0]; }
  std::size_t ny() const { return cells_[1]; }
  std::size_t nz() const { return cells_[2]; }
  const std::array<std::size_t, 3>& cells() const { return cells_; }
  std::size_t size() const { return cells_[0] * cells_[1] * cells_[2]; }
  int dimension() const { return dimension_; }
  const Vec3& lower() const { return lower_; }
  const Vec3& upper() const { return upper_; }
  Vec3 spacing() const;
  double cell_measure() const;

  /// Column-major linear index: x fastest, then y, then z.
  std::size_t index(std::size_t i, std::size_t j, std::size_t k = 0) const {
    return i + cells_[0] * (j + cells_[1] * k);
  }
  Vec3 midpoint(std::size_t linear) const;

  bool same_extent(const PixelGrid& other, double tol = 1e-12) const;
  bool operator==(const PixelGrid& other) const;

 private:
  std::array<std::size_t, 3> cells_{1, 1, 1};
  Vec3 lower_ = Vec3::Zero();
  Vec3 upper_ = Vec3::Ones();
  int dimension_ = 2;
};

/// Magnetic field of the straight segment a->b carrying unit current,
/// evaluated at w (closed-form Biot-Savart).
Vec3 segment_field(const Vec3& a, const Vec3& b, const Vec3& w, double scale = 1.0);

Vec3 coil_field(const SegmentedCoil& coil, const Vec3& w);

/// Dipole tensor (3 d (x) d / |d|^5 - I / |d|^3) applied to v, with d = x - source.
Vec3 dipole_tensor_apply(const Vec3& d, const Vec3& v);

Vec3 dipole_activation_field(const DipoleActivation& act, const Vec3& w);

/// Dispatches to coil_field or dipole_activation_field.
Vec3 activation_field(const Activation& act, const Vec3& w);

}  // namespace mrxi
