#include "holo/bem.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace holo {

namespace {

void warn_inside(const PointSet& points, const SurfaceMesh& mesh) {
  const auto inside = points_inside_scatterer(points, mesh);
  if (inside.empty()) return;
  std::ostringstream os;
  os << inside.size() << " field point(s) appear to lie inside the scatterer (first: point " << inside.front()
     << ")";
  warn(os.str());
}

}  // namespace

BemOperator::BemOperator(std::shared_ptr<const SurfaceMesh> mesh, ComplexMatrix h, std::uint64_t array_hash,
                         double wavenumber, double rcond)
    : mesh_(std::move(mesh)), h_(std::move(h)), array_hash_(array_hash), wavenumber_(wavenumber), rcond_(rcond) {
  if (!mesh_ || mesh_->empty()) throw PropagationError("BEM operator needs a non-empty mesh");
  if (h_.rows() != static_cast<Eigen::Index>(mesh_->size())) {
    throw PropagationError("BEM operator: H rows do not match mesh element count");
  }
}

void BemOperator::check_compatible(const TransducerArray& array, const MediumConfig& medium) const {
  if (array.hash() != array_hash_ || static_cast<Eigen::Index>(array.size()) != h_.cols()) {
    throw PropagationError("BEM operator was built for a different transducer array");
  }
  if (std::abs(medium.wavenumber() - wavenumber_) > 1e-12 * wavenumber_) {
    throw PropagationError("BEM operator was built for a different wavenumber");
  }
}

BemOperator bem_build(const SurfaceMesh& mesh, const TransducerArray& array, const MediumConfig& medium,
                      const BemOptions& options) {
  if (mesh.empty()) throw PropagationError("bem_build: mesh is empty");
  const double k = medium.wavenumber();
  const double quarter_wave = 0.25 * medium.wavelength();
  if (mesh.max_edge() > quarter_wave) {
    std::ostringstream os;
    os << "bem_build: longest mesh edge " << mesh.max_edge() << " m exceeds lambda/4 = " << quarter_wave << " m";
    warn(os.str());
  }

  const Eigen::MatrixXcd system = kernels::assemble_surface_operator(mesh, k, options.exec);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(system);
  const double rcond = lu.rcond();
  if (!(rcond >= options.min_rcond)) {
    std::ostringstream os;
    os << "bem_build: surface system is singular or ill-conditioned (rcond estimate " << rcond << ")";
    throw PropagationError(os.str());
  }

  auto surface = kernels::assemble_piston(mesh.centroids(), array, k, kernels::Order::Value, options.exec);
  const Eigen::MatrixXcd rhs = surface.value;
  ComplexMatrix h = lu.solve(rhs);
  if (!h.allFinite()) throw PropagationError("bem_build: solution contains non-finite values");
  return BemOperator(std::make_shared<const SurfaceMesh>(mesh), std::move(h), array.hash(), k, rcond);
}

PropagatorBundle bem_bundle(const PointSet& points, const BemOperator& op, const TransducerArray& array,
                            const MediumConfig& medium, kernels::Order order) {
  op.check_compatible(array, medium);
  warn_inside(points, op.mesh());
  const double k = medium.wavenumber();
  auto direct = kernels::assemble_piston(points.positions(), array, k, order);
  const auto scattered = kernels::assemble_green(points.positions(), op.mesh(), k, order);
  direct.value.noalias() += scattered.value * op.h();
  if (order >= kernels::Order::Gradient)
    for (int a = 0; a < 3; ++a) direct.gradient[a].noalias() += scattered.gradient[a] * op.h();
  if (order >= kernels::Order::Hessian)
    for (int h = 0; h < 6; ++h) direct.hessian[h].noalias() += scattered.hessian[h] * op.h();
  return PropagatorBundle{PropagatorMatrix(std::move(direct.value)), PropagatorGradients{std::move(direct.gradient)},
                          PropagatorHessians{std::move(direct.hessian)}};
}

PropagatorMatrix bem_propagator(const PointSet& points, const BemOperator& op, const TransducerArray& array,
                                const MediumConfig& medium) {
  return bem_bundle(points, op, array, medium, kernels::Order::Value).transfer;
}

PropagatorGradients bem_gradients(const PointSet& points, const BemOperator& op, const TransducerArray& array,
                                  const MediumConfig& medium) {
  return std::move(bem_bundle(points, op, array, medium, kernels::Order::Gradient).gradients);
}

PropagatorHessians bem_hessians(const PointSet& points, const BemOperator& op, const TransducerArray& array,
                                const MediumConfig& medium) {
  return std::move(bem_bundle(points, op, array, medium, kernels::Order::Hessian).hessians);
}

std::vector<std::size_t> points_inside_scatterer(const PointSet& points, const SurfaceMesh& mesh) {
  std::vector<std::size_t> inside;
  for (std::size_t n = 0; n < points.size(); ++n) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t nearest = 0;
    for (std::size_t m = 0; m < mesh.size(); ++m) {
      const double d = (points[n] - mesh.centroid(m)).squaredNorm();
      if (d < best) {
        best = d;
        nearest = m;
      }
    }
    if ((points[n] - mesh.centroid(nearest)).dot(mesh.normal(nearest)) < 0.0) inside.push_back(n);
  }
  return inside;
}

BemPropagator::BemPropagator(std::shared_ptr<const BemOperator> op, TransducerArray array, MediumConfig medium)
    : op_(std::move(op)), array_(std::move(array)), medium_(medium) {
  if (!op_) throw PropagationError("BemPropagator needs an operator");
  op_->check_compatible(array_, medium_);
}

PropagatorBundle BemPropagator::evaluate(const PointSet& points, kernels::Order order) const {
  return bem_bundle(points, *op_, array_, medium_, order);
}

}  // namespace holo
