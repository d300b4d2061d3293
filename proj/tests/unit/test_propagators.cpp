#include <random>

#include "doctest.h"
#include "holo/kernels.hpp"
#include "holo/propagators.hpp"
#include "support/oracle.hpp"

using namespace holo;

namespace {

TransducerArray single(const Vec3& pos = Vec3::Zero(), const Vec3& normal = Vec3(0, 0, 1)) {
  return TransducerArray({pos}, {normal}, 8.02, 0.0045);
}

}  // namespace

TEST_CASE("directivity series matches the Bessel closed form") {
  for (double u = 0.0; u < 12.0; u += 0.0137) {
    const double want = u < 1e-12 ? 1.0 : 2.0 * std::cyl_bessel_j(1.0, u) / u;
    CHECK(kernels::directivity(u).value == doctest::Approx(want).epsilon(1e-13).scale(1.0));
  }
  CHECK(kernels::directivity(0.0).value == 1.0);
  CHECK(kernels::directivity(0.0).d_w == doctest::Approx(-0.5));
}

TEST_CASE("on-axis piston entry is p_ref/d exp(ikd)") {
  const MediumConfig m;
  const double k = m.wavenumber();
  for (double d : {0.01, 0.1, 0.37}) {
    const auto a = piston_transfer(PointSet({Vec3(0, 0, d)}), single(), m).matrix()(0, 0);
    const Complex want = 8.02 / d * std::exp(Complex(0, k * d));
    CHECK(std::abs(a - want) < 1e-13 * std::abs(want));
  }
}

TEST_CASE("on-axis amplitude halves when the distance doubles") {
  const MediumConfig m;
  const auto a = piston_transfer(PointSet({Vec3(0, 0, 0.05), Vec3(0, 0, 0.1)}), single(), m).matrix();
  CHECK(std::abs(a(1, 0)) == doctest::Approx(0.5 * std::abs(a(0, 0))).epsilon(1e-14));
}

TEST_CASE("assembled board matrix matches the scalar oracle") {
  const MediumConfig m;
  const auto board = preset_board(BoardKind::Bottom);
  PointSpec spec;
  spec.count = 20;
  spec.seed = 3;
  std::vector<Vec3> pts{Vec3(0, 0, 0.1)};
  for (const Vec3& p : create_points(spec)) pts.push_back(p);
  const PointSet points(pts);
  const auto a = piston_transfer(points, board, m).matrix();
  double worst = 0.0;
  for (std::size_t n = 0; n < points.size(); ++n) {
    for (std::size_t t = 0; t < board.size(); ++t) {
      const Complex want = oracle::piston(points[n], board.position(t), board.normal(t), m.wavenumber(),
                                          board.element_radius(), board.p_ref());
      worst = std::max(worst, oracle::relative_error(a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t)), want));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("piston gradients match central differences") {
  const MediumConfig m;
  const auto board = preset_board(BoardKind::TwoOpposed);
  PointSpec spec;
  spec.count = 10;
  spec.seed = 11;
  const PointSet points = create_points(spec);
  const auto grad = piston_gradients(points, board, m);
  const double h = 1e-6;
  double worst = 0.0;
  for (std::size_t n = 0; n < points.size(); ++n) {
    for (std::size_t t = 0; t < board.size(); t += 7) {
      auto f = [&](const Vec3& q) {
        return oracle::piston(q, board.position(t), board.normal(t), m.wavenumber(), board.element_radius(),
                              board.p_ref());
      };
      for (int a = 0; a < 3; ++a) {
        const Complex fd = oracle::central(f, points[n], a, h);
        const Complex got = grad.axes[a](static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t));
        // Relative to the gradient magnitude of this entry; single components can pass through zero.
        const double scale = std::sqrt(std::norm(grad.axes[0](n, t)) + std::norm(grad.axes[1](n, t)) +
                                       std::norm(grad.axes[2](n, t)));
        worst = std::max(worst, std::abs(got - fd) / scale);
      }
    }
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("piston Hessians match central differences of the gradients") {
  const MediumConfig m;
  const auto board = preset_board(BoardKind::Bottom);
  const PointSet points({Vec3(0.01, -0.02, 0.03), Vec3(0.0, 0.0, 0.0), Vec3(-0.03, 0.02, 0.05)});
  const auto hess = piston_hessians(points, board, m);
  const double h = 1e-6;
  double worst = 0.0;
  for (std::size_t n = 0; n < points.size(); ++n) {
    std::array<ComplexMatrix, 6> fd;
    for (int e = 0; e < 6; ++e) {
      const int i = kernels::kHessianPairs[e][0];
      const int j = kernels::kHessianPairs[e][1];
      const auto plus = piston_gradients(PointSet({points[n] + h * Vec3::Unit(j)}), board, m);
      const auto minus = piston_gradients(PointSet({points[n] - h * Vec3::Unit(j)}), board, m);
      fd[e] = (plus.axes[i] - minus.axes[i]) / (2.0 * h);
    }
    for (Eigen::Index t = 0; t < static_cast<Eigen::Index>(board.size()); ++t) {
      double scale = 0.0;
      for (int e = 0; e < 6; ++e) scale += std::norm(hess.pairs[e](n, t));
      scale = std::sqrt(scale);
      for (int e = 0; e < 6; ++e) worst = std::max(worst, std::abs(hess.pairs[e](n, t) - fd[e](0, t)) / scale);
    }
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("on-axis gradient is finite with zero lateral components") {
  const MediumConfig m;
  const auto g = piston_gradients(PointSet({Vec3(0, 0, 0.08)}), single(), m);
  for (int a = 0; a < 3; ++a) CHECK(std::isfinite(std::abs(g.axes[a](0, 0))));
  CHECK(std::abs(g.axes[0](0, 0)) == 0.0);
  CHECK(std::abs(g.axes[1](0, 0)) == 0.0);
  CHECK(std::abs(g.axes[2](0, 0)) > 0.0);
  const auto hs = piston_hessians(PointSet({Vec3(0, 0, 0.08)}), single(), m);
  for (int e = 0; e < 6; ++e) CHECK(std::isfinite(std::abs(hs.pairs[e](0, 0))));
}

TEST_CASE("gradients are unchanged when point and transducer translate together") {
  const MediumConfig m;
  const Vec3 shift(0.3, -0.2, 1.1);
  const Vec3 n = Vec3(0.2, 0.1, 1.0).normalized();
  const Vec3 p(0.02, 0.03, 0.09);
  const auto a = piston_gradients(PointSet({p}), single(Vec3::Zero(), n), m);
  const auto b = piston_gradients(PointSet({p + shift}), single(shift, n), m);
  for (int ax = 0; ax < 3; ++ax) CHECK(std::abs(a.axes[ax](0, 0) - b.axes[ax](0, 0)) < 1e-9 * std::abs(a.axes[ax](0, 0)) + 1e-12);
}

TEST_CASE("coincident point and transducer is an error naming the pair") {
  const MediumConfig m;
  const auto board = preset_board(BoardKind::Bottom);
  const PointSet points({Vec3(0, 0, 0), board.position(17)});
  try {
    piston_transfer(points, board, m);
    FAIL("expected an error");
  } catch (const PropagationError& e) {
    const std::string what = e.what();
    CHECK(what.find("point 1") != std::string::npos);
    CHECK(what.find("transducer 17") != std::string::npos);
  }
}

TEST_CASE("serial and parallel assembly are bit identical") {
  const MediumConfig m;
  const auto board = preset_board(BoardKind::TwoOpposed);
  PointSpec spec;
  spec.count = 64;
  spec.seed = 5;
  const PointSet points = create_points(spec);
  const auto s = kernels::assemble_piston(points.positions(), board, m.wavenumber(), kernels::Order::Hessian,
                                          kernels::Exec::Serial);
  const auto p = kernels::assemble_piston(points.positions(), board, m.wavenumber(), kernels::Order::Hessian,
                                          kernels::Exec::Parallel);
  CHECK(s.value == p.value);
  for (int a = 0; a < 3; ++a) CHECK(s.gradient[a] == p.gradient[a]);
  for (int e = 0; e < 6; ++e) CHECK(s.hessian[e] == p.hessian[e]);

  const SurfaceMesh mesh = make_box(Vec3(-0.02, -0.02, -0.02), Vec3(0.02, 0.02, 0.02), 3);
  CHECK(kernels::assemble_surface_operator(mesh, m.wavenumber(), kernels::Exec::Serial) ==
        kernels::assemble_surface_operator(mesh, m.wavenumber(), kernels::Exec::Parallel));
  const auto gs = kernels::assemble_green(points.positions(), mesh, m.wavenumber(), kernels::Order::Gradient,
                                          kernels::Exec::Serial);
  const auto gp = kernels::assemble_green(points.positions(), mesh, m.wavenumber(), kernels::Order::Gradient,
                                          kernels::Exec::Parallel);
  CHECK(gs.value == gp.value);
  for (int a = 0; a < 3; ++a) CHECK(gs.gradient[a] == gp.gradient[a]);
}

TEST_CASE("Green normal derivative matches differencing the Green's function") {
  const double k = MediumConfig().wavenumber();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Vec3 point(u(rng), u(rng), u(rng) + 0.12);
    const Vec3 element(u(rng), u(rng), u(rng));
    const Vec3 normal = Vec3(u(rng), u(rng), u(rng)).normalized();
    const double h = 1e-7;
    const Complex fd = (oracle::green(point, element + h * normal, k) - oracle::green(point, element - h * normal, k)) / (2 * h);
    const auto got = kernels::green_normal_derivative(point, element, normal, k, kernels::Order::Value).value;
    worst = std::max(worst, oracle::relative_error(got, fd));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("Green kernel point derivatives match central differences") {
  const double k = MediumConfig().wavenumber();
  const Vec3 element(0.01, 0.0, 0.0);
  const Vec3 normal = Vec3(0.3, 0.2, 0.9).normalized();
  const Vec3 point(0.03, -0.02, 0.07);
  const auto d = kernels::green_normal_derivative(point, element, normal, k, kernels::Order::Hessian);
  auto f = [&](const Vec3& q) { return kernels::green_normal_derivative(q, element, normal, k, kernels::Order::Value).value; };
  auto g = [&](int a) {
    return [&, a](const Vec3& q) { return kernels::green_normal_derivative(q, element, normal, k, kernels::Order::Gradient).gradient[a]; };
  };
  for (int a = 0; a < 3; ++a) CHECK(oracle::relative_error(d.gradient[a], oracle::central(f, point, a, 1e-7)) < 1e-6);
  for (int e = 0; e < 6; ++e) {
    const int i = kernels::kHessianPairs[e][0], j = kernels::kHessianPairs[e][1];
    CHECK(oracle::relative_error(d.hessian[e], oracle::central(g(i), point, j, 1e-7)) < 1e-5);
  }
}

TEST_CASE("propagator bundle agrees with the separate calls") {
  const MediumConfig m;
  PistonPropagator prop(preset_board(BoardKind::Bottom), m);
  const PointSet points({Vec3(0.01, 0.0, 0.02), Vec3(0.0, 0.02, 0.04)});
  const auto bundle = prop.evaluate(points, kernels::Order::Hessian);
  CHECK(bundle.transfer.matrix() == prop.transfer(points).matrix());
  const auto g = prop.gradients(points);
  for (int a = 0; a < 3; ++a) CHECK(bundle.gradients.axes[a] == g.axes[a]);
  CHECK(prop.transfer(points).points() == 2);
  CHECK(prop.transfer(points).transducers() == 256);
  const std::array<std::size_t, 1> rows{1};
  CHECK(prop.transfer(points).rows(rows).matrix().row(0) == bundle.transfer.matrix().row(1));
  CHECK_THROWS_AS(PropagatorMatrix(ComplexMatrix::Constant(1, 1, Complex(std::nan(""), 0))), PropagationError);
}
