#pragma once

// Per-entry physics kernels and the loops that assemble them into matrices.
//
// Every assembly routine has a serial reference path and an OpenMP path.
// Both call the same scalar kernel per entry in the same order within a row,
// so their outputs are bit-identical; tests rely on that.

#include <array>
#include <span>

#include "holo/core.hpp"
#include "holo/geometry.hpp"

namespace holo::kernels {

enum class Exec { Serial, Parallel };

/// Derivative order to assemble: value only, + gradient, + Hessian.
enum class Order { Value = 0, Gradient = 1, Hessian = 2 };

/// (i, j) axis pairs of the six unique Hessian entries, in storage order.
inline constexpr std::array<std::array<int, 2>, 6> kHessianPairs = {
    {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}}};

struct Derivatives {
  Complex value;
  std::array<Complex, 3> gradient{};
  std::array<Complex, 6> hessian{};
};

/// Directivity 2 J1(u)/u expressed in w = u^2/4, with its first two w-derivatives.
struct Directivity {
  double value;
  double d_w;
  double d_ww;
};
Directivity directivity(double u);

/// Piston emitter at `source` with unit `normal`, evaluated at `point`.
/// Derivatives are with respect to the point coordinates. Caller guarantees
/// the point is not coincident with the source.
Derivatives piston(const Vec3& point, const Vec3& source, const Vec3& normal, double wavenumber,
                   double radius, double p_ref, Order order);

/// Normal derivative (at the source element, along `normal`) of the free-space
/// Green's function exp(ikr)/(4 pi r), and its derivatives w.r.t. `point`.
Derivatives green_normal_derivative(const Vec3& point, const Vec3& element, const Vec3& normal,
                                    double wavenumber, Order order);

/// Free-space Green's function exp(ikr)/(4 pi r).
Complex green(const Vec3& point, const Vec3& source, double wavenumber);

/// Assembled blocks; `gradient` and `hessian` stay empty below the requested order.
struct Blocks {
  ComplexMatrix value;
  std::array<ComplexMatrix, 3> gradient;
  std::array<ComplexMatrix, 6> hessian;
};

/// N x T piston transfer blocks. Throws PropagationError when a point sits on
/// a transducer (distance < 1e-9 m).
Blocks assemble_piston(std::span<const Vec3> points, const TransducerArray& array, double wavenumber,
                       Order order, Exec exec = Exec::Parallel);

/// N x M blocks of area-weighted Green normal derivatives from mesh elements to points.
Blocks assemble_green(std::span<const Vec3> points, const SurfaceMesh& mesh, double wavenumber, Order order,
                      Exec exec = Exec::Parallel);

/// M x M collocation matrix I/2 - D with D_ij = dG(c_i, c_j)/dn_j * area_j, D_ii = 0.
Eigen::MatrixXcd assemble_surface_operator(const SurfaceMesh& mesh, double wavenumber,
                                           Exec exec = Exec::Parallel);

}  // namespace holo::kernels
