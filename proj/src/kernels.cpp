#include "holo/kernels.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace holo::kernels {

namespace {

constexpr int kSeriesTerms = 32;
// Beyond this argument the closed Bessel forms are used; below it the power
// series in w keeps full precision and is much cheaper.
constexpr double kSeriesLimit = 5.0;
constexpr double kCoincident = 1e-9;

struct SeriesCoefficients {
  std::array<double, kSeriesTerms> c{};
  SeriesCoefficients() {
    // c_m = (-1)^m / (m! (m+1)!)
    double fact_m = 1.0;
    double fact_m1 = 1.0;
    for (int m = 0; m < kSeriesTerms; ++m) {
      if (m > 0) fact_m *= m;
      fact_m1 *= (m + 1);
      c[m] = ((m % 2) ? -1.0 : 1.0) / (fact_m * fact_m1);
    }
  }
};

const SeriesCoefficients& series() {
  static const SeriesCoefficients coefficients;
  return coefficients;
}

template <typename Kernel>
void for_each_row(std::ptrdiff_t rows, Exec exec, Kernel&& kernel) {
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t n = 0; n < rows; ++n) kernel(n);
  } else {
    for (std::ptrdiff_t n = 0; n < rows; ++n) kernel(n);
  }
}

void allocate(Blocks& blocks, Eigen::Index rows, Eigen::Index cols, Order order) {
  blocks.value.resize(rows, cols);
  if (order >= Order::Gradient)
    for (auto& g : blocks.gradient) g.resize(rows, cols);
  if (order >= Order::Hessian)
    for (auto& h : blocks.hessian) h.resize(rows, cols);
}

void store(Blocks& blocks, Eigen::Index n, Eigen::Index t, const Derivatives& d, Order order) {
  blocks.value(n, t) = d.value;
  if (order >= Order::Gradient)
    for (int a = 0; a < 3; ++a) blocks.gradient[a](n, t) = d.gradient[a];
  if (order >= Order::Hessian)
    for (int h = 0; h < 6; ++h) blocks.hessian[h](n, t) = d.hessian[h];
}

}  // namespace

Directivity directivity(double u) {
  const double w = 0.25 * u * u;
  if (u < kSeriesLimit) {
    const auto& c = series().c;
    double value = 0.0, d_w = 0.0, d_ww = 0.0;
    for (int m = kSeriesTerms - 1; m >= 0; --m) value = value * w + c[m];
    for (int m = kSeriesTerms - 1; m >= 1; --m) d_w = d_w * w + m * c[m];
    for (int m = kSeriesTerms - 1; m >= 2; --m) d_ww = d_ww * w + m * (m - 1) * c[m];
    return {value, d_w, d_ww};
  }
  const double j1 = std::cyl_bessel_j(1.0, u);
  const double j2 = std::cyl_bessel_j(2.0, u);
  const double j3 = std::cyl_bessel_j(3.0, u);
  return {2.0 * j1 / u, -4.0 * j2 / (u * u), 8.0 * j3 / (u * u * u)};
}

Derivatives piston(const Vec3& point, const Vec3& source, const Vec3& normal, double wavenumber, double radius,
                   double p_ref, Order order) {
  const Vec3 v = point - source;
  const double d2 = v.squaredNorm();
  const double d = std::sqrt(d2);
  const double along = normal.dot(v);
  // sin^2 of the off-axis angle; the cross product form avoids cancellation near the axis.
  const double sin2 = std::min(1.0, normal.cross(v).squaredNorm() / d2);
  const double kr = wavenumber * radius;
  const double beta = 0.25 * kr * kr;
  const Directivity dir = directivity(kr * std::sqrt(sin2));

  const Complex ik(0.0, wavenumber);
  const Complex radial = std::polar(1.0 / d, wavenumber * d);  // exp(ikd)/d
  Derivatives out;
  out.value = p_ref * dir.value * radial;
  if (order == Order::Value) return out;

  const Complex g = ik - 1.0 / d;
  const Complex radial_1 = radial * g;  // d/dd
  const double d4 = d2 * d2;
  std::array<double, 3> ds{};  // gradient of sin^2
  for (int i = 0; i < 3; ++i) ds[i] = -2.0 * along * normal[i] / d2 + 2.0 * along * along * v[i] / d4;
  for (int i = 0; i < 3; ++i) {
    out.gradient[i] = p_ref * (dir.d_w * beta * ds[i] * radial + dir.value * radial_1 * (v[i] / d));
  }
  if (order == Order::Gradient) return out;

  const Complex radial_2 = radial * (g * g + 1.0 / d2);
  const double d6 = d4 * d2;
  for (int h = 0; h < 6; ++h) {
    const int i = kHessianPairs[h][0];
    const int j = kHessianPairs[h][1];
    const double delta = i == j ? 1.0 : 0.0;
    const double dds = -2.0 * normal[i] * normal[j] / d2 + 4.0 * along * (normal[i] * v[j] + normal[j] * v[i]) / d4 +
                       2.0 * along * along * delta / d4 - 8.0 * along * along * v[i] * v[j] / d6;
    const Complex term = dir.d_ww * beta * beta * ds[i] * ds[j] * radial + dir.d_w * beta * dds * radial +
                         dir.d_w * beta * (ds[i] * v[j] + ds[j] * v[i]) * radial_1 / d +
                         dir.value * (radial_2 * v[i] * v[j] / d2 + radial_1 * (delta / d - v[i] * v[j] / (d2 * d)));
    out.hessian[h] = p_ref * term;
  }
  return out;
}

Complex green(const Vec3& point, const Vec3& source, double wavenumber) {
  const double r = (point - source).norm();
  return std::polar(1.0 / (4.0 * kPi * r), wavenumber * r);
}

Derivatives green_normal_derivative(const Vec3& point, const Vec3& element, const Vec3& normal, double wavenumber,
                                    Order order) {
  const Vec3 rho = point - element;
  const double r2 = rho.squaredNorm();
  const double r = std::sqrt(r2);
  const double kr = wavenumber * r;
  const double proj = rho.dot(normal);
  const Complex e = std::polar(1.0 / (4.0 * kPi), kr);

  const double r3 = r2 * r;
  const Complex phi = e * Complex(1.0, -kr) / r3;
  Derivatives out;
  out.value = phi * proj;
  if (order == Order::Value) return out;

  const double r4 = r2 * r2;
  const Complex phi_1 = e * Complex(kr * kr - 3.0, 3.0 * kr) / r4;
  for (int i = 0; i < 3; ++i) out.gradient[i] = phi_1 * (rho[i] / r) * proj + phi * normal[i];
  if (order == Order::Gradient) return out;

  const Complex phi_2 = e * Complex(12.0 - 5.0 * kr * kr, kr * kr * kr - 12.0 * kr) / (r4 * r);
  for (int h = 0; h < 6; ++h) {
    const int i = kHessianPairs[h][0];
    const int j = kHessianPairs[h][1];
    const double delta = i == j ? 1.0 : 0.0;
    out.hessian[h] = (phi_2 * rho[i] * rho[j] / r2 + phi_1 * (delta / r - rho[i] * rho[j] / r3)) * proj +
                     phi_1 * (rho[i] * normal[j] + rho[j] * normal[i]) / r;
  }
  return out;
}

Blocks assemble_piston(std::span<const Vec3> points, const TransducerArray& array, double wavenumber, Order order,
                       Exec exec) {
  const auto rows = static_cast<Eigen::Index>(points.size());
  const auto cols = static_cast<Eigen::Index>(array.size());
  Blocks blocks;
  allocate(blocks, rows, cols, order);
  std::vector<Eigen::Index> coincident(points.size(), -1);

  for_each_row(rows, exec, [&](std::ptrdiff_t n) {
    const Vec3& q = points[n];
    for (Eigen::Index t = 0; t < cols; ++t) {
      if ((q - array.position(t)).norm() < kCoincident) {
        if (coincident[n] < 0) coincident[n] = t;
        store(blocks, n, t, Derivatives{}, order);
        continue;
      }
      store(blocks, n, t,
            piston(q, array.position(t), array.normal(t), wavenumber, array.element_radius(), array.p_ref(), order),
            order);
    }
  });

  for (std::size_t n = 0; n < coincident.size(); ++n) {
    if (coincident[n] >= 0) {
      throw PropagationError("point " + std::to_string(n) + " coincides with transducer " +
                             std::to_string(coincident[n]));
    }
  }
  return blocks;
}

Blocks assemble_green(std::span<const Vec3> points, const SurfaceMesh& mesh, double wavenumber, Order order,
                      Exec exec) {
  const auto rows = static_cast<Eigen::Index>(points.size());
  const auto cols = static_cast<Eigen::Index>(mesh.size());
  Blocks blocks;
  allocate(blocks, rows, cols, order);
  std::vector<Eigen::Index> coincident(points.size(), -1);

  for_each_row(rows, exec, [&](std::ptrdiff_t n) {
    const Vec3& q = points[n];
    for (Eigen::Index m = 0; m < cols; ++m) {
      if ((q - mesh.centroid(m)).norm() < kCoincident) {
        if (coincident[n] < 0) coincident[n] = m;
        store(blocks, n, m, Derivatives{}, order);
        continue;
      }
      Derivatives d = green_normal_derivative(q, mesh.centroid(m), mesh.normal(m), wavenumber, order);
      const double area = mesh.area(m);
      d.value *= area;
      for (auto& g : d.gradient) g *= area;
      for (auto& h : d.hessian) h *= area;
      store(blocks, n, m, d, order);
    }
  });

  for (std::size_t n = 0; n < coincident.size(); ++n) {
    if (coincident[n] >= 0) {
      throw PropagationError("point " + std::to_string(n) + " coincides with mesh element " +
                             std::to_string(coincident[n]));
    }
  }
  return blocks;
}

Eigen::MatrixXcd assemble_surface_operator(const SurfaceMesh& mesh, double wavenumber, Exec exec) {
  const auto m = static_cast<Eigen::Index>(mesh.size());
  // Row-major fill, then hand a column-major copy to the factorization.
  ComplexMatrix system(m, m);
  for_each_row(m, exec, [&](std::ptrdiff_t i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i == j) {
        system(i, j) = Complex(0.5, 0.0);
        continue;
      }
      const Derivatives d =
          green_normal_derivative(mesh.centroid(i), mesh.centroid(j), mesh.normal(j), wavenumber, Order::Value);
      system(i, j) = -d.value * mesh.area(j);
    }
  });
  return system;
}

}  // namespace holo::kernels
