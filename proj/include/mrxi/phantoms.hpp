#pragma once

#include "mrxi/forward.hpp"

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mrxi {

/// Ellipse in unit-square coordinates, rotated counter-clockwise by angle_deg.
struct Ellipse {
  double cx = 0.5;
  double cy = 0.5;
  double semi_x = 0.25;
  double semi_y = 0.25;
  double angle_deg = 0.0;
  double value = 1.0;

  bool contains(double x, double y) const;
};

/// Rotated rectangle; half_length runs along the rotated x axis.
struct OrientedBox {
  double cx = 0.5;
  double cy = 0.5;
  double half_length = 0.25;
  double half_width = 0.05;
  double angle_deg = 0.0;

  bool contains(double x, double y) const;
};

/// Letter P: a vertical stem joined to an elliptical bowl, minus an elliptical hole.
struct PShape {
  double intensity = 1.0;
  OrientedBox stem{0.335, 0.5, 0.085, 0.35, 0.0};
  Ellipse bowl{0.48, 0.66, 0.25, 0.19, 0.0, 1.0};
  Ellipse hole{0.53, 0.66, 0.10, 0.08, 0.0, 1.0};
};

/// Sum of additive ellipses, clipped below at zero.
struct SheppLogan {
  std::vector<Ellipse> ellipses;
  static SheppLogan modified();
};

/// Filled ellipse crossed by a particle-free channel.
struct Tumor {
  double intensity = 1.0;
  Ellipse body{0.5, 0.5, 0.3, 0.22, 15.0, 1.0};
  OrientedBox vein{0.5, 0.47, 0.45, 0.035, -30.0};
};

enum class PhantomKind { PShape, SheppLogan, Tumor };

struct PhantomSpec {
  std::variant<PShape, SheppLogan, Tumor> shape;

  static PhantomSpec defaults(PhantomKind kind);
  PhantomKind kind() const { return static_cast<PhantomKind>(shape.index()); }
  double value_at(double x, double y) const;
  /// Throws ConfigError on negative intensities or geometry leaving the unit square.
  void validate() const;
};

std::string_view to_string(PhantomKind kind);
PhantomKind phantom_kind_from_string(std::string_view name);

/// Midpoint sampling of the phantom on a 2D grid over the unit square.
DensityField rasterize(const PhantomSpec& spec, const PixelGrid& grid);

/// Conservative area-weighted averaging onto `target`.
DensityField resample(const DensityField& field, const PixelGrid& target);

}  // namespace mrxi
