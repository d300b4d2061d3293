#pragma once

#include <array>
#include <memory>

#include "holo/core.hpp"
#include "holo/geometry.hpp"
#include "holo/kernels.hpp"

namespace holo {

/// Complex transfer matrix, N points x T transducers (Pa per unit drive).
class PropagatorMatrix {
 public:
  explicit PropagatorMatrix(ComplexMatrix entries);

  const ComplexMatrix& matrix() const noexcept { return entries_; }
  Eigen::Index points() const noexcept { return entries_.rows(); }
  Eigen::Index transducers() const noexcept { return entries_.cols(); }

  /// Sub-propagator restricted to the given point rows.
  PropagatorMatrix rows(std::span<const std::size_t> indices) const;

 private:
  ComplexMatrix entries_;
};

/// d/dx, d/dy, d/dz of a PropagatorMatrix with respect to the point coordinates.
struct PropagatorGradients {
  std::array<ComplexMatrix, 3> axes;

  PropagatorGradients rows(std::span<const std::size_t> indices) const;
};

/// Second derivatives, ordered as kernels::kHessianPairs (xx, yy, zz, xy, xz, yz).
struct PropagatorHessians {
  std::array<ComplexMatrix, 6> pairs;
};

/// Transfer matrix plus, depending on the requested order, its first and
/// second spatial derivatives from a single assembly pass.
struct PropagatorBundle {
  PropagatorMatrix transfer;
  PropagatorGradients gradients;  // empty below Order::Gradient
  PropagatorHessians hessians;    // empty below Order::Hessian
};

PropagatorBundle piston_bundle(const PointSet& points, const TransducerArray& array, const MediumConfig& medium,
                               kernels::Order order);
PropagatorMatrix piston_transfer(const PointSet& points, const TransducerArray& array, const MediumConfig& medium);
PropagatorGradients piston_gradients(const PointSet& points, const TransducerArray& array,
                                     const MediumConfig& medium);
PropagatorHessians piston_hessians(const PointSet& points, const TransducerArray& array,
                                   const MediumConfig& medium);

/// Builds propagators for arbitrary point sets. Solvers and analysis code
/// accept any implementation, so free-field and scattering models swap freely.
class Propagator {
 public:
  virtual ~Propagator() = default;

  virtual PropagatorBundle evaluate(const PointSet& points, kernels::Order order) const = 0;

  PropagatorMatrix transfer(const PointSet& points) const { return evaluate(points, kernels::Order::Value).transfer; }
  PropagatorGradients gradients(const PointSet& points) const {
    return std::move(evaluate(points, kernels::Order::Gradient).gradients);
  }
  PropagatorHessians hessians(const PointSet& points) const {
    return std::move(evaluate(points, kernels::Order::Hessian).hessians);
  }

  virtual const TransducerArray& array() const noexcept = 0;
  virtual const MediumConfig& medium() const noexcept = 0;
  virtual std::string_view name() const noexcept = 0;
};

class PistonPropagator final : public Propagator {
 public:
  PistonPropagator(TransducerArray array, MediumConfig medium);

  PropagatorBundle evaluate(const PointSet& points, kernels::Order order) const override;

  const TransducerArray& array() const noexcept override { return array_; }
  const MediumConfig& medium() const noexcept override { return medium_; }
  std::string_view name() const noexcept override { return "piston"; }

 private:
  TransducerArray array_;
  MediumConfig medium_;
};

}  // namespace holo
