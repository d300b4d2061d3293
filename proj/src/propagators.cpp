#include "holo/propagators.hpp"

namespace holo {

namespace {

ComplexMatrix select_rows(const ComplexMatrix& m, std::span<const std::size_t> indices) {
  ComplexMatrix out(static_cast<Eigen::Index>(indices.size()), m.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= static_cast<std::size_t>(m.rows())) {
      throw PropagationError("row index " + std::to_string(indices[i]) + " out of range");
    }
    out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(indices[i]));
  }
  return out;
}

}  // namespace

PropagatorMatrix::PropagatorMatrix(ComplexMatrix entries) : entries_(std::move(entries)) {
  if (!entries_.allFinite()) throw PropagationError("propagator matrix has non-finite entries");
}

PropagatorMatrix PropagatorMatrix::rows(std::span<const std::size_t> indices) const {
  return PropagatorMatrix(select_rows(entries_, indices));
}

PropagatorGradients PropagatorGradients::rows(std::span<const std::size_t> indices) const {
  PropagatorGradients out;
  for (int a = 0; a < 3; ++a) out.axes[a] = select_rows(axes[a], indices);
  return out;
}

PropagatorBundle piston_bundle(const PointSet& points, const TransducerArray& array, const MediumConfig& medium,
                               kernels::Order order) {
  auto blocks = kernels::assemble_piston(points.positions(), array, medium.wavenumber(), order);
  return PropagatorBundle{PropagatorMatrix(std::move(blocks.value)), PropagatorGradients{std::move(blocks.gradient)},
                          PropagatorHessians{std::move(blocks.hessian)}};
}

PropagatorMatrix piston_transfer(const PointSet& points, const TransducerArray& array, const MediumConfig& medium) {
  return piston_bundle(points, array, medium, kernels::Order::Value).transfer;
}

PropagatorGradients piston_gradients(const PointSet& points, const TransducerArray& array,
                                     const MediumConfig& medium) {
  return std::move(piston_bundle(points, array, medium, kernels::Order::Gradient).gradients);
}

PropagatorHessians piston_hessians(const PointSet& points, const TransducerArray& array,
                                   const MediumConfig& medium) {
  return std::move(piston_bundle(points, array, medium, kernels::Order::Hessian).hessians);
}

PistonPropagator::PistonPropagator(TransducerArray array, MediumConfig medium)
    : array_(std::move(array)), medium_(medium) {}

PropagatorBundle PistonPropagator::evaluate(const PointSet& points, kernels::Order order) const {
  return piston_bundle(points, array_, medium_, order);
}

}  // namespace holo
