#pragma once

#include "mrxi/geometry.hpp"
#include "mrxi/types.hpp"

#include <cstddef>
#include <map>
#include <vector>

namespace mrxi {

/// Slope of the Langevin function at the origin; the linearized particle
/// response is m = B c / 3.
inline constexpr double kLinearLangevin = 1.0 / 3.0;

/// coth(x) - 1/x, using x/3 - x^3/45 near zero.
double langevin(double x);

/// Cell-averaged particle density on a grid.
struct DensityField {
  PixelGrid grid;
  Vector values;

  DensityField() = default;
  DensityField(PixelGrid g, Vector v);
  static DensityField zeros(const PixelGrid& g) { return {g, Vector::Zero(static_cast<Eigen::Index>(g.size()))}; }

  double mass() const { return values.sum() * grid.cell_measure(); }
  bool nonnegative() const { return values.size() == 0 || values.minCoeff() >= 0.0; }
};

/// Sensor reading at `sensor` produced by unit density at w after excitation
/// with an activation field B (already evaluated at w).
double kernel_from_field(const SensorSpec& sensor, const Vec3& w, const Vec3& field, bool apply_langevin);

double measurement_kernel(const Activation& act, const SensorSpec& sensor, const Vec3& w, bool apply_langevin = true);

/// One operator row: entry k is the kernel at midpoint w_k times the cell measure.
Vector assemble_row(const Activation& act, const SensorSpec& sensor, const PixelGrid& grid,
                    bool apply_langevin = true);

struct RowKey {
  std::size_t activation = 0;
  std::size_t sensor = 0;
  bool operator==(const RowKey&) const = default;
};

/// Dense forward matrix with block layout metadata. Rows are activation-major,
/// sensor-minor; columns follow the grid's linear cell index.
struct ForwardOperator {
  Matrix matrix;
  std::vector<RowKey> rows;
  PixelGrid grid;
  std::size_t activation_count = 0;
  std::size_t sensor_count = 0;
  bool langevin = true;

  std::size_t row_of(std::size_t activation, std::size_t sensor) const { return activation * sensor_count + sensor; }
  std::size_t row_count() const { return static_cast<std::size_t>(matrix.rows()); }
  std::size_t column_count() const { return static_cast<std::size_t>(matrix.cols()); }
  /// Throws if shape, row map, or entries are inconsistent.
  void validate() const;
};

ForwardOperator assemble_operator(const std::vector<Activation>& activations, const std::vector<SensorSpec>& sensors,
                                  const PixelGrid& grid, bool apply_langevin = true);

/// Nonnegative weights per pattern, keyed by base activation id.
struct ActivationPattern {
  std::vector<std::map<std::size_t, double>> weights;

  static ActivationPattern identity(std::size_t activations);
};

/// Each output block is the weighted sum of the base activation blocks.
ForwardOperator apply_pattern(const ForwardOperator& op, const ActivationPattern& pattern);

Vector apply(const ForwardOperator& op, const DensityField& c);
Vector apply(const ForwardOperator& op, const Vector& c);

/// Upper bound on |K_ij| over one row, from the closest approach of the
/// source and the sensor to the grid midpoints.
double kernel_bound(const Activation& act, const SensorSpec& sensor, const PixelGrid& grid,
                    bool apply_langevin = true);

}  // namespace mrxi
