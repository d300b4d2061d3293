#include "holo/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace holo {

namespace {

constexpr double kMinFdStep = 1e-9;

void check_step(double h) {
  if (!(h >= kMinFdStep) || !std::isfinite(h)) {
    throw ConfigError("finite-difference step " + std::to_string(h) + " m is below the 1e-9 m floor");
  }
}

void check_size(const ComplexVector& x, const Propagator& propagator) {
  if (x.size() != static_cast<Eigen::Index>(propagator.array().size())) {
    throw PropagationError("hologram has " + std::to_string(x.size()) + " entries but the board has " +
                           std::to_string(propagator.array().size()) + " transducers");
  }
}

// Pressure at 7 points per input point (centre then +x,-x,+y,-y,+z,-z), in
// one propagator evaluation.
struct StencilPressure {
  ComplexVector centre;
  std::array<ComplexVector, 3> gradient;
};

StencilPressure stencil_pressure(const ComplexVector& x, const Propagator& propagator, const PointSet& points,
                                 double h) {
  const std::size_t n = points.size();
  std::vector<Vec3> all;
  all.reserve(7 * n);
  for (const Vec3& p : points) {
    all.push_back(p);
    for (int a = 0; a < 3; ++a) {
      all.push_back(p + h * Vec3::Unit(a));
      all.push_back(p - h * Vec3::Unit(a));
    }
  }
  const ComplexVector p = propagator.transfer(PointSet(std::move(all))).matrix() * x;
  StencilPressure out;
  out.centre.resize(static_cast<Eigen::Index>(n));
  for (auto& g : out.gradient) g.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto base = static_cast<Eigen::Index>(7 * i);
    const auto row = static_cast<Eigen::Index>(i);
    out.centre[row] = p[base];
    for (int a = 0; a < 3; ++a) {
      out.gradient[a][row] = (p[base + 1 + 2 * a] - p[base + 2 + 2 * a]) / (2.0 * h);
    }
  }
  return out;
}

std::vector<double> potential_from(const ComplexVector& p, const std::array<ComplexVector, 3>& grad,
                                   const GorkovConstants& c) {
  std::vector<double> u(static_cast<std::size_t>(p.size()));
  for (Eigen::Index n = 0; n < p.size(); ++n) {
    const double energy = std::norm(grad[0][n]) + std::norm(grad[1][n]) + std::norm(grad[2][n]);
    u[static_cast<std::size_t>(n)] = c.k1 * std::norm(p[n]) - c.k2 * energy;
  }
  return u;
}

std::vector<double> gorkov_analytic(const ComplexVector& x, const Propagator& propagator, const PointSet& points,
                                    const GorkovConstants& c) {
  const auto bundle = propagator.evaluate(points, kernels::Order::Gradient);
  const ComplexVector p = bundle.transfer.matrix() * x;
  std::array<ComplexVector, 3> grad;
  for (int a = 0; a < 3; ++a) grad[a] = bundle.gradients.axes[a] * x;
  return potential_from(p, grad, c);
}

std::vector<double> gorkov_fd(const ComplexVector& x, const Propagator& propagator, const PointSet& points,
                              const GorkovConstants& c, double h) {
  const auto s = stencil_pressure(x, propagator, points, h);
  return potential_from(s.centre, s.gradient, c);
}

std::vector<Vec3> force_analytic(const ComplexVector& x, const Propagator& propagator, const PointSet& points,
                                 const GorkovConstants& c) {
  const auto bundle = propagator.evaluate(points, kernels::Order::Hessian);
  const ComplexVector p = bundle.transfer.matrix() * x;
  std::array<ComplexVector, 3> grad;
  for (int a = 0; a < 3; ++a) grad[a] = bundle.gradients.axes[a] * x;
  std::array<ComplexVector, 6> hess;
  for (int e = 0; e < 6; ++e) hess[e] = bundle.hessians.pairs[e] * x;

  // Index of the stored Hessian entry for axis pair (a, b).
  constexpr int slot[3][3] = {{0, 3, 4}, {3, 1, 5}, {4, 5, 2}};
  std::vector<Vec3> out(points.size());
  for (Eigen::Index n = 0; n < p.size(); ++n) {
    Vec3 f;
    for (int b = 0; b < 3; ++b) {
      double du = 2.0 * c.k1 * (std::conj(p[n]) * grad[b][n]).real();
      for (int a = 0; a < 3; ++a) du -= 2.0 * c.k2 * (std::conj(grad[a][n]) * hess[slot[a][b]][n]).real();
      f[b] = -du;
    }
    out[static_cast<std::size_t>(n)] = f;
  }
  return out;
}

}  // namespace

DerivativeMode parse_derivative_mode(std::string_view name) {
  if (name == "analytic") return DerivativeMode::Analytic;
  if (name == "fd" || name == "finite-difference") return DerivativeMode::FiniteDifference;
  throw ConfigError("unknown derivative mode '" + std::string(name) + "'");
}

ComplexVector propagate(const ComplexVector& x, const PropagatorMatrix& a) {
  if (a.transducers() != x.size()) {
    throw PropagationError("propagate: hologram has " + std::to_string(x.size()) + " entries, propagator has " +
                           std::to_string(a.transducers()) + " columns");
  }
  return a.matrix() * x;
}

std::vector<double> gorkov(const ComplexVector& x, const Propagator& propagator, const PointSet& points,
                           const GorkovConstants& constants, const AnalysisOptions& options) {
  check_size(x, propagator);
  if (options.mode == DerivativeMode::Analytic) return gorkov_analytic(x, propagator, points, constants);
  check_step(options.fd_step);
  return gorkov_fd(x, propagator, points, constants, options.fd_step);
}

std::vector<double> gorkov(const ComplexVector& x, const Propagator& propagator, const PointSet& points,
                           const ParticleConfig& particle, const AnalysisOptions& options) {
  return gorkov(x, propagator, points, gorkov_constants(propagator.medium(), particle), options);
}

std::vector<Vec3> force(const ComplexVector& x, const Propagator& propagator, const PointSet& points,
                        const GorkovConstants& constants, const AnalysisOptions& options) {
  check_size(x, propagator);
  if (options.mode == DerivativeMode::Analytic) return force_analytic(x, propagator, points, constants);
  check_step(options.fd_step);
  const double h = options.fd_step;
  auto grad = fd_gradient(
      [&](const PointSet& at) { return gorkov_fd(x, propagator, at, constants, h); }, points, h);
  for (Vec3& g : grad) g = -g;
  return grad;
}

std::vector<Vec3> force(const ComplexVector& x, const Propagator& propagator, const PointSet& points,
                        const ParticleConfig& particle, const AnalysisOptions& options) {
  return force(x, propagator, points, gorkov_constants(propagator.medium(), particle), options);
}

std::vector<double> stiffness(const ComplexVector& x, const Propagator& propagator, const PointSet& points,
                              const GorkovConstants& constants, const AnalysisOptions& options) {
  check_size(x, propagator);
  check_step(options.fd_step);
  const double h = options.fd_step;
  if (options.stiffness == StiffnessMode::PotentialLaplacian) {
    return fd_laplacian([&](const PointSet& at) { return gorkov(x, propagator, at, constants, options); }, points, h);
  }
  AnalysisOptions inner = options;
  inner.mode = DerivativeMode::Analytic;
  auto div = fd_divergence([&](const PointSet& at) { return force(x, propagator, at, constants, inner); }, points, h);
  for (double& v : div) v = -v;
  return div;
}

PointSet axis_offsets(const PointSet& points, double h) {
  std::vector<Vec3> all;
  all.reserve(6 * points.size());
  for (const Vec3& p : points) {
    for (int a = 0; a < 3; ++a) {
      all.push_back(p + h * Vec3::Unit(a));
      all.push_back(p - h * Vec3::Unit(a));
    }
  }
  return PointSet(std::move(all));
}

std::vector<Vec3> fd_gradient(const ScalarField& field, const PointSet& points, double h) {
  check_step(h);
  const auto v = field(axis_offsets(points, h));
  std::vector<Vec3> out(points.size());
  for (std::size_t n = 0; n < points.size(); ++n) {
    for (int a = 0; a < 3; ++a) out[n][a] = (v[6 * n + 2 * a] - v[6 * n + 2 * a + 1]) / (2.0 * h);
  }
  return out;
}

std::vector<double> fd_divergence(const VectorField& field, const PointSet& points, double h) {
  check_step(h);
  const auto v = field(axis_offsets(points, h));
  std::vector<double> out(points.size(), 0.0);
  for (std::size_t n = 0; n < points.size(); ++n) {
    for (int a = 0; a < 3; ++a) out[n] += (v[6 * n + 2 * a][a] - v[6 * n + 2 * a + 1][a]) / (2.0 * h);
  }
  return out;
}

std::vector<double> fd_laplacian(const ScalarField& field, const PointSet& points, double h) {
  check_step(h);
  const auto centre = field(points);
  const auto v = field(axis_offsets(points, h));
  std::vector<double> out(points.size(), 0.0);
  for (std::size_t n = 0; n < points.size(); ++n) {
    double sum = 0.0;
    for (int a = 0; a < 3; ++a) sum += v[6 * n + 2 * a] + v[6 * n + 2 * a + 1] - 2.0 * centre[n];
    out[n] = sum / (h * h);
  }
  return out;
}

Vec3 find_trap_minimum(const ComplexVector& x, const Propagator& propagator, const Vec3& start,
                       const GorkovConstants& constants, const AnalysisOptions& options, int max_iterations) {
  check_step(options.fd_step);
  AnalysisOptions analytic = options;
  analytic.mode = DerivativeMode::Analytic;
  const double h = options.fd_step;
  const double max_step = propagator.medium().wavelength() / 16.0;
  auto potential = [&](const Vec3& at) { return gorkov(x, propagator, PointSet({at}), constants, analytic)[0]; };

  Vec3 pos = start;
  double u = potential(pos);
  for (int it = 0; it < max_iterations; ++it) {
    const Vec3 f = force(x, propagator, PointSet({pos}), constants, analytic)[0];
    // Hessian of U = -Jacobian of F, by central differences.
    const auto shifted = force(x, propagator, axis_offsets(PointSet({pos}), h), constants, analytic);
    Eigen::Matrix3d hess;
    for (int a = 0; a < 3; ++a) hess.col(a) = -(shifted[2 * a] - shifted[2 * a + 1]) / (2.0 * h);
    hess = 0.5 * (hess + hess.transpose()).eval();

    const Eigen::LDLT<Eigen::Matrix3d> ldlt(hess);
    Vec3 step = ldlt.solve(f);
    const bool newton_ok = step.allFinite() && (ldlt.vectorD().array() > 0.0).all();
    if (!newton_ok) step = f.normalized() * max_step * 0.1;
    if (step.norm() > max_step) step *= max_step / step.norm();

    double trial_u = potential(pos + step);
    int halvings = 0;
    while (trial_u > u && halvings < 30) {
      step *= 0.5;
      trial_u = potential(pos + step);
      ++halvings;
    }
    if (trial_u > u) break;
    pos += step;
    const double moved = step.norm();
    u = trial_u;
    if (moved < 1e-12) break;
  }
  return pos;
}

GridSpec GridSpec::plane(std::string_view name, const Vec3& center, double u_extent, double v_extent, int u_cells,
                         int v_cells) {
  GridSpec spec;
  spec.center = center;
  spec.u_extent = u_extent;
  spec.v_extent = v_extent;
  spec.u_cells = u_cells;
  spec.v_cells = v_cells;
  if (name == "xy") {
    spec.u_axis = Vec3::UnitX();
    spec.v_axis = Vec3::UnitY();
  } else if (name == "xz") {
    spec.u_axis = Vec3::UnitX();
    spec.v_axis = Vec3::UnitZ();
  } else if (name == "yz") {
    spec.u_axis = Vec3::UnitY();
    spec.v_axis = Vec3::UnitZ();
  } else {
    throw ConfigError("unknown plane '" + std::string(name) + "' (expected xy, xz or yz)");
  }
  spec.validate();
  return spec;
}

void GridSpec::validate() const {
  if (u_cells < 2 || v_cells < 2) throw ConfigError("grid resolution must be at least 2 cells per axis");
  if (!(u_extent > 0.0) || !(v_extent > 0.0) || !std::isfinite(u_extent) || !std::isfinite(v_extent)) {
    throw ConfigError("grid extents must be positive and finite");
  }
  if (!center.allFinite()) throw ConfigError("grid centre must be finite");
  if (std::abs(u_axis.norm() - 1.0) > 1e-9 || std::abs(v_axis.norm() - 1.0) > 1e-9 ||
      std::abs(u_axis.dot(v_axis)) > 1e-9) {
    throw ConfigError("grid axes must be orthonormal");
  }
}

std::vector<Vec3> GridSpec::cell_centers() const {
  validate();
  std::vector<Vec3> out;
  out.reserve(size());
  for (int j = 0; j < v_cells; ++j) {
    const double v = ((j + 0.5) / v_cells - 0.5) * v_extent;
    for (int i = 0; i < u_cells; ++i) {
      const double u = ((i + 0.5) / u_cells - 0.5) * u_extent;
      out.push_back(center + u * u_axis + v * v_axis);
    }
  }
  return out;
}

Metric parse_metric(std::string_view name) {
  if (name == "pressure" || name == "amplitude") return Metric::Pressure;
  if (name == "phase") return Metric::Phase;
  if (name == "gorkov" || name == "potential") return Metric::Gorkov;
  if (name == "force") return Metric::Force;
  if (name == "stiffness") return Metric::Stiffness;
  throw ConfigError("unknown metric '" + std::string(name) + "'");
}

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::Pressure:
      return "pressure";
    case Metric::Phase:
      return "phase";
    case Metric::Gorkov:
      return "gorkov";
    case Metric::Force:
      return "force";
    case Metric::Stiffness:
      return "stiffness";
  }
  return "unknown";
}

std::vector<std::string_view> metric_columns(Metric metric) {
  if (metric == Metric::Force) return {"fx", "fy", "fz"};
  return {to_string(metric)};
}

double FieldGrid::value(std::size_t index, Metric metric, int component) const {
  const FieldSample& s = samples.at(index);
  switch (metric) {
    case Metric::Pressure:
      return s.amplitude.value_or(std::abs(s.pressure));
    case Metric::Phase:
      return s.phase.value_or(holo::phase(s.pressure));
    case Metric::Gorkov:
      if (!s.gorkov) break;
      return *s.gorkov;
    case Metric::Force:
      if (!s.force) break;
      return (*s.force)[component];
    case Metric::Stiffness:
      if (!s.stiffness) break;
      return *s.stiffness;
  }
  throw ConfigError("metric '" + std::string(to_string(metric)) + "' was not sampled");
}

FieldGrid sample_grid(const ComplexVector& x, const Propagator& propagator, const GridSpec& spec,
                      const std::vector<Metric>& metrics, const GorkovConstants& constants,
                      const SampleOptions& options) {
  spec.validate();
  check_size(x, propagator);
  const auto has = [&](Metric m) { return std::find(metrics.begin(), metrics.end(), m) != metrics.end(); };
  const bool want_u = has(Metric::Gorkov);
  const bool want_f = has(Metric::Force);
  const bool want_k = has(Metric::Stiffness);

  // Blocks per point: 1 for the value, +3 for U, +10 (+ stencils) for force and stiffness.
  std::size_t matrices = 1;
  if (want_u) matrices += options.analysis.mode == DerivativeMode::Analytic ? 3 : 7;
  if (want_f) matrices += 10;
  if (want_k) matrices += 60;
  const std::size_t per_point = matrices * propagator.array().size() * sizeof(Complex);
  const std::size_t block = std::max<std::size_t>(1, options.block_bytes / std::max<std::size_t>(1, per_point));

  const auto centres = spec.cell_centers();
  FieldGrid grid{spec, metrics, {}};
  grid.samples.resize(centres.size());
  for (std::size_t begin = 0; begin < centres.size(); begin += block) {
    const std::size_t end = std::min(centres.size(), begin + block);
    const PointSet chunk(std::vector<Vec3>(centres.begin() + static_cast<std::ptrdiff_t>(begin),
                                           centres.begin() + static_cast<std::ptrdiff_t>(end)));
    const ComplexVector p = propagator.transfer(chunk).matrix() * x;
    std::vector<double> u;
    std::vector<Vec3> f;
    std::vector<double> k;
    if (want_u) u = gorkov(x, propagator, chunk, constants, options.analysis);
    if (want_f) f = force(x, propagator, chunk, constants, options.analysis);
    if (want_k) k = stiffness(x, propagator, chunk, constants, options.analysis);
    for (std::size_t i = begin; i < end; ++i) {
      FieldSample& s = grid.samples[i];
      const std::size_t local = i - begin;
      s.position = centres[i];
      s.pressure = p[static_cast<Eigen::Index>(local)];
      s.amplitude = std::abs(s.pressure);
      if (has(Metric::Phase)) s.phase = holo::phase(s.pressure);
      if (want_u) s.gorkov = u[local];
      if (want_f) s.force = f[local];
      if (want_k) s.stiffness = k[local];
    }
  }
  return grid;
}

namespace {

TimingSummary summarize(std::vector<double> seconds) {
  std::sort(seconds.begin(), seconds.end());
  return {seconds.front(), seconds[seconds.size() / 2]};
}

class SingleThreadScope {
 public:
  SingleThreadScope() {
#ifdef _OPENMP
    saved_ = omp_get_max_threads();
    omp_set_num_threads(1);
#endif
  }
  ~SingleThreadScope() {
#ifdef _OPENMP
    omp_set_num_threads(saved_);
#endif
  }
  SingleThreadScope(const SingleThreadScope&) = delete;
  SingleThreadScope& operator=(const SingleThreadScope&) = delete;

 private:
  int saved_ = 1;
};

}  // namespace

GorkovBenchReport bench_gorkov(const ComplexVector& x, const Propagator& propagator, const PointSet& points,
                               const GorkovConstants& constants, int repetitions, double fd_step) {
  if (repetitions < 1) throw ConfigError("bench needs at least one repetition");
  check_size(x, propagator);
  check_step(fd_step);
  const SingleThreadScope single;
  using clock = std::chrono::steady_clock;

  std::vector<PointSet> singles;
  singles.reserve(points.size());
  for (const Vec3& p : points) singles.emplace_back(std::vector<Vec3>{p});

  AnalysisOptions analytic;
  AnalysisOptions fd;
  fd.mode = DerivativeMode::FiniteDifference;
  fd.fd_step = fd_step;

  std::vector<double> u_analytic(points.size());
  std::vector<double> u_fd(points.size());
  std::vector<double> t_analytic, t_fd, t_prop;
  double sink = 0.0;
  for (int r = 0; r < repetitions; ++r) {
    auto t0 = clock::now();
    for (std::size_t n = 0; n < singles.size(); ++n) u_analytic[n] = gorkov(x, propagator, singles[n], constants, analytic)[0];
    auto t1 = clock::now();
    for (std::size_t n = 0; n < singles.size(); ++n) u_fd[n] = gorkov(x, propagator, singles[n], constants, fd)[0];
    auto t2 = clock::now();
    for (const auto& s : singles) sink += std::abs(propagate(x, propagator.transfer(s))[0]);
    auto t3 = clock::now();
    t_analytic.push_back(std::chrono::duration<double>(t1 - t0).count());
    t_fd.push_back(std::chrono::duration<double>(t2 - t1).count());
    t_prop.push_back(std::chrono::duration<double>(t3 - t2).count());
  }
  (void)sink;

  GorkovBenchReport report;
  report.points = points.size();
  report.repetitions = repetitions;
  report.analytic = summarize(t_analytic);
  report.finite_difference = summarize(t_fd);
  report.propagate = summarize(t_prop);
  const double n = static_cast<double>(points.size());
  report.analytic_rate = n / report.analytic.median_seconds;
  report.fd_rate = n / report.finite_difference.median_seconds;
  report.speedup = report.analytic_rate / report.fd_rate;
  report.fd_over_propagate = report.finite_difference.median_seconds / report.propagate.median_seconds;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double scale = std::max(std::abs(u_analytic[i]), 1e-300);
    report.max_relative_difference = std::max(report.max_relative_difference, std::abs(u_analytic[i] - u_fd[i]) / scale);
  }
  return report;
}

}  // namespace holo
