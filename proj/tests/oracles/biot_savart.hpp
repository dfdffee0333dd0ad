#pragma once

// Numerical Biot-Savart integral along straight segments, used as an
// independent reference for the closed-form segment field.

#include "mrxi/geometry.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <vector>

namespace oracle {

/// scale * int_0^1 (b - a) x (w - phi(t)) / |w - phi(t)|^3 dt, phi(t) = a + t (b - a).
inline mrxi::Vec3 biot_savart_segment(const mrxi::Vec3& a, const mrxi::Vec3& b, const mrxi::Vec3& w,
                                      double scale = 1.0) {
  using boost::math::quadrature::gauss_kronrod;
  const mrxi::Vec3 dl = b - a;
  mrxi::Vec3 out;
  for (int axis = 0; axis < 3; ++axis) {
    auto integrand = [&](double t) {
      const mrxi::Vec3 r = w - (a + t * dl);
      const double n = r.norm();
      return dl.cross(r)[axis] / (n * n * n);
    };
    out[axis] = gauss_kronrod<double, 61>::integrate(integrand, 0.0, 1.0, 30, 1e-14);
  }
  return scale * out;
}

inline mrxi::Vec3 biot_savart_path(const std::vector<mrxi::Vec3>& vertices, const mrxi::Vec3& w, double scale = 1.0) {
  mrxi::Vec3 sum = mrxi::Vec3::Zero();
  for (std::size_t k = 0; k + 1 < vertices.size(); ++k) sum += biot_savart_segment(vertices[k], vertices[k + 1], w, scale);
  return sum;
}

}  // namespace oracle
