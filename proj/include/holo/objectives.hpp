#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "holo/propagators.hpp"
#include "holo/solvers.hpp"

namespace holo {

enum class ObjectiveKind {
  /// L = -sum |p_f|, or sum (|p_f| - y_f)^2 when targets are given.
  FocusPressure,
  /// L = sum U_t.
  TrapGorkov,
  /// L = -|p_f| + lambda * U_t.
  PressurePlusTrap,
  /// L = U_t + lambda * (U_s - U_target)^2.
  DualTrapTarget,
  /// User callback; gradient by central differences over Re/Im of every activation.
  Custom,
};

enum class PointRole { Focus, Trap, TargetTrap };
enum class OptimizerKind { FixedStep, AdaptiveMoments };

ObjectiveKind parse_objective_kind(std::string_view name);
std::string_view to_string(ObjectiveKind kind);
PointRole parse_point_role(std::string_view name);
OptimizerKind parse_optimizer_kind(std::string_view name);

using CustomObjective = std::function<double(const ComplexVector& activations)>;

struct AdamParameters {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct ObjectiveSpec {
  ObjectiveKind objective = ObjectiveKind::FocusPressure;
  /// One role per point row; empty selects the objective's default layout
  /// (pressure-plus-trap: focus then traps, dual-trap-target: trap then targeted traps).
  std::vector<PointRole> roles;
  double coupling = 0.0;
  double target_potential = 0.0;
  OptimizerKind optimizer = OptimizerKind::AdaptiveMoments;
  double learning_rate = 0.01;
  int iterations = 1000;
  std::uint64_t seed = 0;
  ConstraintMode constraint = ConstraintMode::Unit;
  GorkovConstants gorkov{};
  AdamParameters adam{};
  CustomObjective custom;
  double custom_fd_step = 1e-7;
};

/// Per-point propagators. Gradients are needed whenever a role uses U.
struct ObjectiveInputs {
  PropagatorMatrix transfer;
  std::optional<PropagatorGradients> gradients;
};

ObjectiveInputs make_objective_inputs(const Propagator& propagator, const PointSet& points, bool with_gradients);

/// Loss and its gradient packed as dL/dRe(x_t) + i dL/dIm(x_t).
struct ObjectiveValue {
  double loss = 0.0;
  ComplexVector gradient;
};

ObjectiveValue evaluate_objective(const ObjectiveSpec& spec, const ObjectiveInputs& inputs, const ComplexVector& x,
                                  const std::optional<TargetAmplitudes>& targets = std::nullopt);

/// dL/dphi_t for activations x_t = |x_t| exp(i phi_t).
Eigen::VectorXd phase_gradient(const ComplexVector& x, const ComplexVector& gradient);

struct GradientDescentResult {
  Hologram hologram;
  /// Loss of x_k before the k-th update.
  std::vector<double> loss_trace;
};

/// Projected gradient descent from seeded random phases:
/// x_{k+1} = P(x_k - step(grad L(x_k))), step = alpha * g or the adaptive-moments update.
GradientDescentResult gradient_descent_solve(const ObjectiveSpec& spec, const ObjectiveInputs& inputs,
                                             const std::optional<TargetAmplitudes>& targets = std::nullopt);

/// Seeded random unit-amplitude starting point.
ComplexVector random_phases(Eigen::Index count, std::uint64_t seed);

}  // namespace holo
