#include "mrxi/forward.hpp"

#include "mrxi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace mrxi {

unsigned thread_count() {
  if (const char* env = std::getenv("MRXI_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && n > 0) return static_cast<unsigned>(n);
  }
  return 1;
}

double langevin(double x) {
  if (std::abs(x) < 1e-4) return x / 3.0 - x * x * x / 45.0;
  return 1.0 / std::tanh(x) - 1.0 / x;
}

DensityField::DensityField(PixelGrid g, Vector v) : grid(std::move(g)), values(std::move(v)) {
  if (static_cast<std::size_t>(values.size()) != grid.size()) {
    throw ConfigError("density has " + std::to_string(values.size()) + " values for a grid of " +
                      std::to_string(grid.size()) + " cells");
  }
}

double kernel_from_field(const SensorSpec& sensor, const Vec3& w, const Vec3& field, bool apply_langevin) {
  const double response = sensor.orientation.dot(dipole_tensor_apply(sensor.position - w, field));
  return apply_langevin ? kLinearLangevin * response : response;
}

double measurement_kernel(const Activation& act, const SensorSpec& sensor, const Vec3& w, bool apply_langevin) {
  return kernel_from_field(sensor, w, activation_field(act, w), apply_langevin);
}

Vector assemble_row(const Activation& act, const SensorSpec& sensor, const PixelGrid& grid, bool apply_langevin) {
  const double measure = grid.cell_measure();
  Vector row(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Vec3 w = grid.midpoint(k);
    try {
      row[static_cast<Eigen::Index>(k)] = measurement_kernel(act, sensor, w, apply_langevin) * measure;
    } catch (const GeometryError& e) {
      throw GeometryError(std::string(e.what()) + " [cell " + std::to_string(k) + "]");
    }
  }
  return row;
}

void ForwardOperator::validate() const {
  if (activation_count == 0 || sensor_count == 0) throw ConfigError("operator needs activations and sensors");
  if (row_count() != activation_count * sensor_count) {
    throw ConfigError("operator row count does not equal activations x sensors");
  }
  if (column_count() != grid.size()) throw ConfigError("operator column count does not match grid");
  if (rows.size() != row_count()) throw ConfigError("operator row map has wrong length");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].activation >= activation_count || rows[r].sensor >= sensor_count ||
        row_of(rows[r].activation, rows[r].sensor) != r) {
      throw ConfigError("operator row map is not activation-major at row " + std::to_string(r));
    }
  }
  if (!matrix.allFinite()) throw NumericError("operator has non-finite entries");
}

ForwardOperator assemble_operator(const std::vector<Activation>& activations, const std::vector<SensorSpec>& sensors,
                                  const PixelGrid& grid, bool apply_langevin) {
  if (activations.empty()) throw ConfigError("assembly needs at least one activation");
  if (sensors.empty()) throw ConfigError("assembly needs at least one sensor");

  ForwardOperator op;
  op.grid = grid;
  op.activation_count = activations.size();
  op.sensor_count = sensors.size();
  op.langevin = apply_langevin;
  op.matrix.resize(static_cast<Eigen::Index>(activations.size() * sensors.size()),
                   static_cast<Eigen::Index>(grid.size()));
  op.rows.reserve(activations.size() * sensors.size());
  for (std::size_t a = 0; a < activations.size(); ++a) {
    for (std::size_t s = 0; s < sensors.size(); ++s) op.rows.push_back({a, s});
  }

  const std::size_t cells = grid.size();
  const double measure = grid.cell_measure();
  std::vector<Vec3> midpoints(cells);
  for (std::size_t k = 0; k < cells; ++k) midpoints[k] = grid.midpoint(k);

  // Activations are distributed over workers; each worker writes disjoint rows,
  // so the result does not depend on the worker count.
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&](std::size_t first, std::size_t stride) {
    std::vector<Vec3> field(cells);
    for (std::size_t a = first; a < activations.size(); a += stride) {
      std::size_t k = 0;
      std::size_t s = 0;
      try {
        for (k = 0; k < cells; ++k) field[k] = activation_field(activations[a], midpoints[k]);
        for (s = 0; s < sensors.size(); ++s) {
          auto row = op.matrix.row(static_cast<Eigen::Index>(op.row_of(a, s)));
          for (k = 0; k < cells; ++k) {
            row[static_cast<Eigen::Index>(k)] =
                kernel_from_field(sensors[s], midpoints[k], field[k], apply_langevin) * measure;
          }
        }
      } catch (const GeometryError& e) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::make_exception_ptr(GeometryError(std::string(e.what()) + " [activation " + std::to_string(a) +
                                                          ", sensor " + std::to_string(s) + ", cell " +
                                                          std::to_string(k) + "]"));
        }
        return;
      }
    }
  };

  const unsigned workers = std::min<unsigned>(thread_count(), static_cast<unsigned>(activations.size()));
  if (workers <= 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work, t, workers);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  if (!op.matrix.allFinite()) throw NumericError("assembled operator has non-finite entries");
  return op;
}

ActivationPattern ActivationPattern::identity(std::size_t activations) {
  ActivationPattern p;
  for (std::size_t a = 0; a < activations; ++a) p.weights.push_back({{a, 1.0}});
  return p;
}

ForwardOperator apply_pattern(const ForwardOperator& op, const ActivationPattern& pattern) {
  if (pattern.weights.empty()) throw ConfigError("activation pattern set is empty");
  for (std::size_t b = 0; b < pattern.weights.size(); ++b) {
    bool any = false;
    for (const auto& [id, w] : pattern.weights[b]) {
      if (id >= op.activation_count) {
        throw ConfigError("pattern " + std::to_string(b) + " references unknown activation " + std::to_string(id));
      }
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw ConfigError("pattern " + std::to_string(b) + " has a negative or non-finite weight");
      }
      any = any || w > 0.0;
    }
    if (!any) throw ConfigError("pattern " + std::to_string(b) + " has no nonzero weight");
  }

  const auto s = static_cast<Eigen::Index>(op.sensor_count);
  ForwardOperator out;
  out.grid = op.grid;
  out.activation_count = pattern.weights.size();
  out.sensor_count = op.sensor_count;
  out.langevin = op.langevin;
  out.matrix = Matrix::Zero(static_cast<Eigen::Index>(out.activation_count) * s, op.matrix.cols());
  for (std::size_t b = 0; b < pattern.weights.size(); ++b) {
    auto block = out.matrix.middleRows(static_cast<Eigen::Index>(b) * s, s);
    for (const auto& [id, w] : pattern.weights[b]) {
      if (w == 0.0) continue;
      block += w * op.matrix.middleRows(static_cast<Eigen::Index>(id) * s, s);
    }
    for (std::size_t k = 0; k < op.sensor_count; ++k) out.rows.push_back({b, k});
  }
  return out;
}

Vector apply(const ForwardOperator& op, const Vector& c) {
  if (static_cast<std::size_t>(c.size()) != op.column_count()) {
    throw ConfigError("density has " + std::to_string(c.size()) + " entries, operator expects " +
                      std::to_string(op.column_count()));
  }
  return op.matrix * c;
}

Vector apply(const ForwardOperator& op, const DensityField& c) {
  if (c.grid.cells() != op.grid.cells()) throw ConfigError("density grid does not match operator grid");
  return apply(op, c.values);
}

namespace {

double distance_to_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

}  // namespace

double kernel_bound(const Activation& act, const SensorSpec& sensor, const PixelGrid& grid, bool apply_langevin) {
  double ds = std::numeric_limits<double>::infinity();
  double da = std::numeric_limits<double>::infinity();
  const auto* dipole = std::get_if<DipoleActivation>(&act);
  const auto* coil = std::get_if<SegmentedCoil>(&act);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Vec3 w = grid.midpoint(k);
    ds = std::min(ds, (sensor.position - w).norm());
    if (dipole) {
      da = std::min(da, (dipole->position - w).norm());
    } else {
      for (std::size_t s = 0; s + 1 < coil->vertices.size(); ++s) {
        da = std::min(da, distance_to_segment(w, coil->vertices[s], coil->vertices[s + 1]));
      }
    }
  }
  if (!(ds > 0.0) || !(da > 0.0)) throw GeometryError("source or sensor touches a grid midpoint");
  // |dipole tensor| <= 2 / r^3 in operator norm.
  const double sensor_factor = 2.0 / (ds * ds * ds);
  double field_bound = 0.0;
  if (dipole) {
    field_bound = dipole->scale * 2.0 * dipole->moment.norm() / (da * da * da);
  } else {
    // A straight segment at distance >= d contributes at most 2 / d.
    field_bound = coil->scale * 2.0 * static_cast<double>(coil->segment_count()) / da;
  }
  return (apply_langevin ? kLinearLangevin : 1.0) * sensor_factor * field_bound * grid.cell_measure();
}

}  // namespace mrxi
