#include <random>

#include "doctest.h"
#include "holo/analysis.hpp"
#include "holo/bem.hpp"
#include "holo/objectives.hpp"
#include "holo/solvers.hpp"
#include "support/warnings.hpp"

using namespace holo;

namespace {

const MediumConfig kMedium;
const GorkovConstants kConstants = gorkov_constants(kMedium, ParticleConfig());
const double kLambda = kMedium.wavelength();

ComplexVector focus_on(const Propagator& prop, const Vec3& target) {
  return naive(prop.transfer(PointSet({target})), TargetAmplitudes::uniform(1)).activations();
}

// Opposed boards focused at the origin form a standing wave; the node just
// above the focus holds a bead.
struct StandingTrap {
  PistonPropagator prop{preset_board(BoardKind::TwoOpposed), kMedium};
  ComplexVector x = focus_on(prop, Vec3::Zero());
  Vec3 centre = find_trap_minimum(x, prop, Vec3(0, 0, kLambda / 4), kConstants);
};

const StandingTrap& standing_trap() {
  static const StandingTrap trap;
  return trap;
}

std::vector<Vec3> axis_probes(const Vec3& c, double r) {
  std::vector<Vec3> out;
  for (int a = 0; a < 3; ++a) {
    out.push_back(c + r * Vec3::Unit(a));
    out.push_back(c - r * Vec3::Unit(a));
  }
  return out;
}

}  // namespace

TEST_CASE("propagation is linear and conjugates with the phases") {
  const auto board = preset_board(BoardKind::Bottom);
  PointSpec spec;
  spec.count = 30;
  spec.seed = 4;
  const auto a = piston_transfer(create_points(spec), board, kMedium);
  const ComplexVector x1 = random_phases(256, 1);
  const ComplexVector x2 = random_phases(256, 2);
  CHECK(propagate(ComplexVector::Zero(256), a).cwiseAbs().maxCoeff() == 0.0);
  const ComplexVector sum = propagate(x1 + x2, a);
  const ComplexVector parts = propagate(x1, a) + propagate(x2, a);
  CHECK((sum - parts).cwiseAbs().maxCoeff() < 1e-12 * parts.cwiseAbs().maxCoeff());
  // conj(A) conj(x) = conj(A x): the negated-phase hologram through the conjugate medium.
  const PropagatorMatrix conj_a(a.matrix().conjugate());
  CHECK((propagate(x1.conjugate(), conj_a) - propagate(x1, a).conjugate()).cwiseAbs().maxCoeff() <
        1e-12 * parts.cwiseAbs().maxCoeff());
  CHECK_THROWS_AS(propagate(ComplexVector::Zero(5), a), PropagationError);

  const auto single = piston_transfer(PointSet({Vec3(0.01, 0.02, 0.06)}), board, kMedium);
  const ComplexVector nx = naive(single, TargetAmplitudes::uniform(1)).activations();
  CHECK(std::abs(propagate(nx, single)[0]) ==
        doctest::Approx(single.matrix().row(0).cwiseAbs().sum()).epsilon(1e-9));
}

TEST_CASE("analytic and finite-difference potentials agree above the board") {
  const PistonPropagator prop(preset_board(BoardKind::Bottom), kMedium);
  const ComplexVector x = focus_on(prop, Vec3(0.005, 0.0, 0.05));
  PointSpec spec;
  spec.count = 100;
  spec.seed = 21;
  spec.min = Vec3(-0.03, -0.03, -0.02);
  spec.max = Vec3(0.03, 0.03, 0.06);
  const PointSet points = create_points(spec);
  AnalysisOptions fd;
  fd.mode = DerivativeMode::FiniteDifference;
  const auto ua = gorkov(x, prop, points, kConstants);
  const auto uf = gorkov(x, prop, points, kConstants, fd);
  double worst = 0.0;
  for (std::size_t n = 0; n < points.size(); ++n) worst = std::max(worst, std::abs(ua[n] - uf[n]) / std::abs(ua[n]));
  CHECK(worst < 1e-3);
}

TEST_CASE("analytic and finite-difference potentials agree with a scatterer") {
  const auto board = preset_board(BoardKind::Top);
  testing::WarningCapture quiet;
  auto op = std::make_shared<const BemOperator>(bem_build(make_plate(0.06, 0.06, 14, 14, -0.06), board, kMedium));
  const BemPropagator prop(op, board, kMedium);
  const ComplexVector x = focus_on(prop, Vec3(0, 0, -0.03));
  const PointSet points({Vec3(0.004, 0.0, -0.02), Vec3(-0.01, 0.006, -0.04), Vec3(0.0, 0.0, -0.03)});
  AnalysisOptions fd;
  fd.mode = DerivativeMode::FiniteDifference;
  const auto ua = gorkov(x, prop, points, kConstants);
  const auto uf = gorkov(x, prop, points, kConstants, fd);
  for (std::size_t n = 0; n < points.size(); ++n) CHECK(std::abs(ua[n] - uf[n]) < 1e-3 * std::abs(ua[n]));
  const auto fa = force(x, prop, points, kConstants);
  const auto ff = force(x, prop, points, kConstants, fd);
  for (std::size_t n = 0; n < points.size(); ++n) CHECK((fa[n] - ff[n]).norm() < 1e-3 * fa[n].norm());
}

TEST_CASE("matched particle feels no potential") {
  const PistonPropagator prop(preset_board(BoardKind::Bottom), kMedium);
  const ComplexVector x = focus_on(prop, Vec3(0, 0, 0.05));
  const ParticleConfig matched(1e-3, kMedium.sound_speed(), kMedium.density());
  for (double u : gorkov(x, prop, PointSet({Vec3(0, 0, 0.05), Vec3(0.01, 0, 0.03)}), matched)) CHECK(u == 0.0);
}

TEST_CASE("force equals the negative gradient of the potential") {
  const PistonPropagator prop(preset_board(BoardKind::TwoOpposed), kMedium);
  const ComplexVector x = random_phases(512, 8);
  PointSpec spec;
  spec.count = 20;
  spec.seed = 2;
  const PointSet points = create_points(spec);
  const auto f = force(x, prop, points, kConstants);
  const double h = 1e-6;
  const auto g = fd_gradient([&](const PointSet& at) { return gorkov(x, prop, at, kConstants); }, points, h);
  double worst = 0.0;
  for (std::size_t n = 0; n < points.size(); ++n)
    for (int a = 0; a < 3; ++a) worst = std::max(worst, std::abs(f[n][a] + g[n][a]) / f[n].norm());
  CHECK(worst < 1e-3);

  AnalysisOptions fd;
  fd.mode = DerivativeMode::FiniteDifference;
  const auto ff = force(x, prop, points, kConstants, fd);
  for (std::size_t n = 0; n < points.size(); ++n) CHECK((ff[n] - f[n]).norm() < 1e-3 * f[n].norm());
}

TEST_CASE("a standing-wave node traps the bead") {
  const StandingTrap& trap = standing_trap();
  const Vec3 c = trap.centre;
  CHECK(std::abs(c.z() - kLambda / 4) < kLambda / 8);

  const double u0 = gorkov(trap.x, trap.prop, PointSet({c}), kConstants)[0];
  CHECK(u0 < 0.0);
  const auto probes = axis_probes(c, kLambda / 10);
  for (double u : gorkov(trap.x, trap.prop, PointSet(probes), kConstants)) CHECK(u > u0);

  const auto f = force(trap.x, trap.prop, PointSet(probes), kConstants);
  for (std::size_t i = 0; i < probes.size(); ++i) CHECK(f[i].dot(probes[i] - c) < 0.0);

  // Stationarity against the largest force on a lambda/2 sphere.
  std::vector<Vec3> sphere;
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 24; ++j) {
      const double th = kPi * (i + 0.5) / 12, ph = kTwoPi * j / 24;
      sphere.push_back(c + 0.5 * kLambda * Vec3(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)));
    }
  double max_force = 0.0;
  for (const Vec3& v : force(trap.x, trap.prop, PointSet(sphere), kConstants)) max_force = std::max(max_force, v.norm());
  CHECK(force(trap.x, trap.prop, PointSet({c}), kConstants)[0].norm() < 1e-3 * max_force);
}

TEST_CASE("stiffness is positive at the trap and weaker half a wavelength away") {
  const StandingTrap& trap = standing_trap();
  const Vec3 c = trap.centre;
  const auto at_trap = stiffness(trap.x, trap.prop, PointSet({c}), kConstants);
  CHECK(at_trap[0] > 0.0);
  const auto off = stiffness(trap.x, trap.prop, PointSet(axis_probes(c, kLambda / 2)), kConstants);
  for (double s : off) CHECK(s < at_trap[0]);

  AnalysisOptions lap;
  lap.stiffness = StiffnessMode::PotentialLaplacian;
  lap.fd_step = 1e-5;
  const double via_u = stiffness(trap.x, trap.prop, PointSet({c}), kConstants, lap)[0];
  CHECK(via_u == doctest::Approx(at_trap[0]).epsilon(1e-3));
}

TEST_CASE("finite-difference pipeline recovers the Laplacian of a quadratic") {
  const double c = 3.7;
  const ScalarField u = [c](const PointSet& at) {
    std::vector<double> out;
    for (const Vec3& p : at) out.push_back(c * p.squaredNorm());
    return out;
  };
  const VectorField f = [c](const PointSet& at) {
    std::vector<Vec3> out;
    for (const Vec3& p : at) out.push_back(-2.0 * c * p);
    return out;
  };
  const PointSet points({Vec3(0.01, -0.02, 0.03), Vec3::Zero(), Vec3(-0.05, 0.0, 0.1)});
  for (double lap : fd_laplacian(u, points, 1e-4)) CHECK(lap == doctest::Approx(6 * c).epsilon(1e-6));
  for (double div : fd_divergence(f, points, 1e-4)) CHECK(-div == doctest::Approx(6 * c).epsilon(1e-12));
  const auto g = fd_gradient(u, points, 1e-4);
  CHECK((g[0] - 2 * c * points[0]).norm() < 1e-9);
  CHECK(axis_offsets(points, 0.5).size() == 18);
  CHECK(axis_offsets(points, 0.5)[3] == points[0] - 0.5 * Vec3::UnitY());
}

TEST_CASE("finite-difference steps below a nanometre are rejected") {
  const PistonPropagator prop(preset_board(BoardKind::Bottom), kMedium);
  const ComplexVector x = random_phases(256, 0);
  const PointSet p({Vec3(0, 0, 0.05)});
  AnalysisOptions tiny;
  tiny.mode = DerivativeMode::FiniteDifference;
  tiny.fd_step = 1e-10;
  CHECK_THROWS_AS(gorkov(x, prop, p, kConstants, tiny), ConfigError);
  CHECK_THROWS_AS(force(x, prop, p, kConstants, tiny), ConfigError);
  CHECK_THROWS_AS(stiffness(x, prop, p, kConstants, tiny), ConfigError);
  CHECK_THROWS_AS(gorkov(random_phases(10, 0), prop, p, kConstants), PropagationError);
  CHECK(parse_derivative_mode("fd") == DerivativeMode::FiniteDifference);
  CHECK_THROWS_AS(parse_derivative_mode("symbolic"), ConfigError);
}

TEST_CASE("grid specs") {
  const GridSpec xz = GridSpec::plane("xz", Vec3(0, 0, 0.1), 0.04, 0.02, 4, 2);
  const auto centres = xz.cell_centers();
  REQUIRE(centres.size() == 8);
  CHECK((centres[0] - Vec3(-0.015, 0, 0.095)).norm() < 1e-15);
  CHECK((centres[1] - Vec3(-0.005, 0, 0.095)).norm() < 1e-15);
  CHECK((centres[4] - Vec3(-0.015, 0, 0.105)).norm() < 1e-15);
  CHECK(GridSpec::plane("yz", Vec3::Zero(), 1, 1, 2, 2).u_axis == Vec3::UnitY());
  CHECK_THROWS_AS(GridSpec::plane("xw", Vec3::Zero(), 1, 1, 2, 2), ConfigError);
  CHECK_THROWS_AS(GridSpec::plane("xy", Vec3::Zero(), 1, 1, 1, 2).validate(), ConfigError);
  GridSpec skew;
  skew.v_axis = Vec3(1, 1, 0).normalized();
  CHECK_THROWS_AS(skew.validate(), ConfigError);
  CHECK(parse_metric("stiffness") == Metric::Stiffness);
  CHECK(metric_columns(Metric::Force).size() == 3);
}

TEST_CASE("sampling a zero hologram gives zero amplitude") {
  const PistonPropagator prop(preset_board(BoardKind::Bottom), kMedium);
  const auto grid = sample_grid(ComplexVector::Zero(256), prop, GridSpec::plane("xy", Vec3(0, 0, 0.05), 0.01, 0.01, 2, 2),
                                {Metric::Pressure, Metric::Gorkov}, kConstants);
  REQUIRE(grid.samples.size() == 4);
  for (const auto& s : grid.samples) {
    CHECK(*s.amplitude == 0.0);
    CHECK(*s.gorkov == 0.0);
  }
}

TEST_CASE("sampled focus peaks at the target and sampling is pure") {
  const PistonPropagator prop(preset_board(BoardKind::Bottom), kMedium);
  const Vec3 target(0.01, 0, 0.08);
  const ComplexVector x = focus_on(prop, target);
  const GridSpec spec = GridSpec::plane("xz", Vec3(0, 0, 0.07), 0.08, 0.08, 64, 64);
  SampleOptions small_blocks;
  small_blocks.block_bytes = 1 << 16;  // forces many row blocks
  const auto grid = sample_grid(x, prop, spec, {Metric::Pressure, Metric::Phase, Metric::Gorkov, Metric::Force}, kConstants,
                                small_blocks);
  std::size_t best = 0;
  for (std::size_t i = 0; i < grid.samples.size(); ++i)
    if (*grid.samples[i].amplitude > *grid.samples[best].amplitude) best = i;
  CHECK((grid.samples[best].position - target).norm() < kLambda / 2);
  for (const auto& s : grid.samples) CHECK(*s.amplitude == std::abs(s.pressure));

  const std::vector<Metric> metrics{Metric::Pressure, Metric::Phase, Metric::Gorkov, Metric::Force};
  const auto again = sample_grid(x, prop, spec, metrics, kConstants, small_blocks);
  const auto one_block = sample_grid(x, prop, spec, metrics, kConstants);
  REQUIRE(again.samples.size() == grid.samples.size());
  for (std::size_t i = 0; i < grid.samples.size(); ++i) {
    CHECK(again.samples[i].pressure == grid.samples[i].pressure);
    CHECK(*again.samples[i].gorkov == *grid.samples[i].gorkov);
    CHECK(*again.samples[i].force == *grid.samples[i].force);
    // Block size only changes rounding.
    CHECK(std::abs(one_block.samples[i].pressure - grid.samples[i].pressure) < 1e-12 * std::abs(grid.samples[i].pressure));
  }
  CHECK(grid.value(5, Metric::Force, 2) == (*grid.samples[5].force)[2]);
  CHECK_THROWS_AS(grid.value(5, Metric::Stiffness), ConfigError);
}

TEST_CASE("gorkov benchmark reports ordered, consistent timings") {
  const PistonPropagator prop(preset_board(BoardKind::Bottom), kMedium);
  const ComplexVector x = focus_on(prop, Vec3(0, 0, 0.05));
  PointSpec spec;
  spec.count = 300;
  spec.seed = 9;
  const auto report = bench_gorkov(x, prop, create_points(spec), kConstants, 3);
  CHECK(report.points == 300);
  CHECK(report.repetitions == 3);
  CHECK(report.analytic.min_seconds <= report.analytic.median_seconds);
  CHECK(report.finite_difference.min_seconds <= report.finite_difference.median_seconds);
  CHECK(report.analytic_rate > report.fd_rate);
  CHECK(report.speedup == doctest::Approx(report.analytic_rate / report.fd_rate));
  // Seven value-only evaluations per point against one.
  CHECK(report.fd_over_propagate > 7.0 / 2.0);
  CHECK(report.fd_over_propagate < 7.0 * 2.0);
  CHECK(report.max_relative_difference < 1e-3);
  CHECK_THROWS_AS(bench_gorkov(x, prop, create_points(spec), kConstants, 0), ConfigError);
}
