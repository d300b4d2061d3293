#pragma once

#include <memory>

#include "holo/propagators.hpp"

namespace holo {

/// Rigid-scatterer surface operator with the cached transducer-to-surface
/// solution H = (I/2 - D)^-1 F_surface (M elements x T transducers).
class BemOperator {
 public:
  BemOperator(std::shared_ptr<const SurfaceMesh> mesh, ComplexMatrix h, std::uint64_t array_hash, double wavenumber,
              double rcond);

  const SurfaceMesh& mesh() const noexcept { return *mesh_; }
  std::shared_ptr<const SurfaceMesh> shared_mesh() const noexcept { return mesh_; }
  const ComplexMatrix& h() const noexcept { return h_; }
  std::uint64_t array_hash() const noexcept { return array_hash_; }
  double wavenumber() const noexcept { return wavenumber_; }
  /// Reciprocal condition estimate of the surface system (NaN when loaded from cache).
  double rcond() const noexcept { return rcond_; }

  /// Throws PropagationError unless built for this array and medium.
  void check_compatible(const TransducerArray& array, const MediumConfig& medium) const;

 private:
  std::shared_ptr<const SurfaceMesh> mesh_;
  ComplexMatrix h_;
  std::uint64_t array_hash_;
  double wavenumber_;
  double rcond_;
};

struct BemOptions {
  /// Systems with a smaller reciprocal condition estimate are rejected.
  double min_rcond = 1e-10;
  kernels::Exec exec = kernels::Exec::Parallel;
};

/// Sound-hard centroid-collocation BEM: solves (I/2 - D) P = F_surface.
BemOperator bem_build(const SurfaceMesh& mesh, const TransducerArray& array, const MediumConfig& medium,
                      const BemOptions& options = {});

/// E = F + G H and, by order, dE = dF + dG H, d2E = d2F + d2G H.
PropagatorBundle bem_bundle(const PointSet& points, const BemOperator& op, const TransducerArray& array,
                            const MediumConfig& medium, kernels::Order order);

/// E = F + G H.
PropagatorMatrix bem_propagator(const PointSet& points, const BemOperator& op, const TransducerArray& array,
                                const MediumConfig& medium);
/// dE/da = dF/da + (dG/da) H.
PropagatorGradients bem_gradients(const PointSet& points, const BemOperator& op, const TransducerArray& array,
                                  const MediumConfig& medium);
PropagatorHessians bem_hessians(const PointSet& points, const BemOperator& op, const TransducerArray& array,
                                const MediumConfig& medium);

/// Indices of points that lie behind the element nearest to them.
std::vector<std::size_t> points_inside_scatterer(const PointSet& points, const SurfaceMesh& mesh);

class BemPropagator final : public Propagator {
 public:
  BemPropagator(std::shared_ptr<const BemOperator> op, TransducerArray array, MediumConfig medium);

  PropagatorBundle evaluate(const PointSet& points, kernels::Order order) const override;

  const TransducerArray& array() const noexcept override { return array_; }
  const MediumConfig& medium() const noexcept override { return medium_; }
  std::string_view name() const noexcept override { return "bem"; }
  const BemOperator& op() const noexcept { return *op_; }

 private:
  std::shared_ptr<const BemOperator> op_;
  TransducerArray array_;
  MediumConfig medium_;
};

}  // namespace holo
