#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "holo/propagators.hpp"

namespace holo {

enum class DerivativeMode { Analytic, FiniteDifference };
DerivativeMode parse_derivative_mode(std::string_view name);

/// How the Laplacian of U is obtained.
enum class StiffnessMode {
  ForceDivergence,     // -div F with F from the analytic force
  PotentialLaplacian,  // central second differences of U
};

struct AnalysisOptions {
  DerivativeMode mode = DerivativeMode::Analytic;
  double fd_step = 1e-6;  // metres
  StiffnessMode stiffness = StiffnessMode::ForceDivergence;
};

/// p = A x.
ComplexVector propagate(const ComplexVector& x, const PropagatorMatrix& a);

/// Gor'kov potential (J) per point.
std::vector<double> gorkov(const ComplexVector& x, const Propagator& propagator, const PointSet& points,
                           const GorkovConstants& constants, const AnalysisOptions& options = {});
std::vector<double> gorkov(const ComplexVector& x, const Propagator& propagator, const PointSet& points,
                           const ParticleConfig& particle, const AnalysisOptions& options = {});

/// Radiation force -grad U (N) per point.
std::vector<Vec3> force(const ComplexVector& x, const Propagator& propagator, const PointSet& points,
                        const GorkovConstants& constants, const AnalysisOptions& options = {});
std::vector<Vec3> force(const ComplexVector& x, const Propagator& propagator, const PointSet& points,
                        const ParticleConfig& particle, const AnalysisOptions& options = {});

/// Laplacian of U (J/m^2) per point.
std::vector<double> stiffness(const ComplexVector& x, const Propagator& propagator, const PointSet& points,
                              const GorkovConstants& constants, const AnalysisOptions& options = {});

// Central-difference helpers over arbitrary fields. Each evaluates the field
// once on a batch of 6N offset points ordered +x, -x, +y, -y, +z, -z per point.
using ScalarField = std::function<std::vector<double>(const PointSet&)>;
using VectorField = std::function<std::vector<Vec3>(const PointSet&)>;

PointSet axis_offsets(const PointSet& points, double h);
std::vector<Vec3> fd_gradient(const ScalarField& field, const PointSet& points, double h);
std::vector<double> fd_divergence(const VectorField& field, const PointSet& points, double h);
std::vector<double> fd_laplacian(const ScalarField& field, const PointSet& points, double h);

/// Newton iteration on grad U = 0 from `start`, with a gradient-step fallback
/// whenever a Newton step would raise U. Returns the refined position.
Vec3 find_trap_minimum(const ComplexVector& x, const Propagator& propagator, const Vec3& start,
                       const GorkovConstants& constants, const AnalysisOptions& options = {},
                       int max_iterations = 50);

/// Rectangular sampling window spanned by two orthonormal axes.
struct GridSpec {
  Vec3 center = Vec3::Zero();
  Vec3 u_axis = Vec3::UnitX();
  Vec3 v_axis = Vec3::UnitZ();
  double u_extent = 0.1;
  double v_extent = 0.1;
  int u_cells = 64;
  int v_cells = 64;

  /// Axis-aligned plane "xy", "xz" or "yz".
  static GridSpec plane(std::string_view name, const Vec3& center, double u_extent, double v_extent, int u_cells,
                        int v_cells);

  void validate() const;
  std::size_t size() const noexcept { return static_cast<std::size_t>(u_cells) * static_cast<std::size_t>(v_cells); }
  /// Cell centres, v outer and u inner.
  std::vector<Vec3> cell_centers() const;
};

enum class Metric { Pressure, Phase, Gorkov, Force, Stiffness };
Metric parse_metric(std::string_view name);
std::string_view to_string(Metric metric);
/// Column names a metric contributes to field CSV output.
std::vector<std::string_view> metric_columns(Metric metric);

struct FieldSample {
  Vec3 position = Vec3::Zero();
  Complex pressure{};
  std::optional<double> amplitude;
  std::optional<double> phase;
  std::optional<double> gorkov;
  std::optional<Vec3> force;
  std::optional<double> stiffness;
};

struct FieldGrid {
  GridSpec spec;
  std::vector<Metric> metrics;
  std::vector<FieldSample> samples;  // v outer, u inner

  const FieldSample& at(int i, int j) const {
    return samples[static_cast<std::size_t>(j) * static_cast<std::size_t>(spec.u_cells) + static_cast<std::size_t>(i)];
  }
  /// Scalar value of a single-column metric, or one force component.
  double value(std::size_t index, Metric metric, int component = 0) const;
};

struct SampleOptions {
  AnalysisOptions analysis;
  /// Upper bound on propagator storage per block (bytes).
  std::size_t block_bytes = std::size_t{64} << 20;
};

FieldGrid sample_grid(const ComplexVector& x, const Propagator& propagator, const GridSpec& spec,
                      const std::vector<Metric>& metrics, const GorkovConstants& constants,
                      const SampleOptions& options = {});

struct TimingSummary {
  double min_seconds = 0.0;
  double median_seconds = 0.0;
};

struct GorkovBenchReport {
  std::size_t points = 0;
  int repetitions = 0;
  TimingSummary analytic;
  TimingSummary finite_difference;
  TimingSummary propagate;
  double analytic_rate = 0.0;  // solutions per second, from the median
  double fd_rate = 0.0;
  double speedup = 0.0;        // analytic_rate / fd_rate
  double fd_over_propagate = 0.0;
  double max_relative_difference = 0.0;
};

/// Times analytic and finite-difference U one point at a time with
/// threading limited to one thread.
GorkovBenchReport bench_gorkov(const ComplexVector& x, const Propagator& propagator, const PointSet& points,
                               const GorkovConstants& constants, int repetitions = 3, double fd_step = 1e-6);

}  // namespace holo
