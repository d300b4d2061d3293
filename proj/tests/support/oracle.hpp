#pragma once

// Reference implementations written independently of the library kernels,
// used only to check them.

#include <cmath>
#include <complex>
#include <functional>

#include "holo/core.hpp"

namespace oracle {

using holo::Complex;
using holo::Vec3;

/// Circular piston: p_ref * 2 J1(u)/u * exp(ikd)/d, u = k r sin(theta).
inline Complex piston(const Vec3& point, const Vec3& source, const Vec3& normal, double k, double radius,
                      double p_ref) {
  const Vec3 v = point - source;
  const double d = v.norm();
  const double sin_theta = normal.cross(v).norm() / d;
  const double u = k * radius * sin_theta;
  const double dir = u < 1e-12 ? 1.0 : 2.0 * std::cyl_bessel_j(1.0, u) / u;
  return p_ref * dir * std::exp(Complex(0.0, k * d)) / d;
}

inline Complex green(const Vec3& point, const Vec3& source, double k) {
  const double r = (point - source).norm();
  return std::exp(Complex(0.0, k * r)) / (4.0 * holo::kPi * r);
}

/// Central difference of a complex field along axis `a`.
inline Complex central(const std::function<Complex(const Vec3&)>& f, const Vec3& at, int a, double h) {
  return (f(at + h * Vec3::Unit(a)) - f(at - h * Vec3::Unit(a))) / (2.0 * h);
}

inline double relative_error(Complex got, Complex want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

}  // namespace oracle
