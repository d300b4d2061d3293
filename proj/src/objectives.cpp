#include "holo/objectives.hpp"

#include <cmath>
#include <random>
#include <string>

namespace holo {

namespace {

std::vector<PointRole> resolve_roles(const ObjectiveSpec& spec, Eigen::Index points) {
  if (!spec.roles.empty()) {
    if (static_cast<Eigen::Index>(spec.roles.size()) != points) {
      throw SolverError("objective has " + std::to_string(spec.roles.size()) + " roles for " +
                        std::to_string(points) + " points");
    }
    return spec.roles;
  }
  const auto n = static_cast<std::size_t>(points);
  switch (spec.objective) {
    case ObjectiveKind::FocusPressure:
      return std::vector<PointRole>(n, PointRole::Focus);
    case ObjectiveKind::TrapGorkov:
      return std::vector<PointRole>(n, PointRole::Trap);
    case ObjectiveKind::PressurePlusTrap: {
      std::vector<PointRole> roles(n, PointRole::Trap);
      roles[0] = PointRole::Focus;
      return roles;
    }
    case ObjectiveKind::DualTrapTarget: {
      std::vector<PointRole> roles(n, PointRole::TargetTrap);
      roles[0] = PointRole::Trap;
      return roles;
    }
    case ObjectiveKind::Custom:
      return {};
  }
  return {};
}

void validate(const ObjectiveSpec& spec) {
  if (spec.iterations < 1) throw SolverError("gradient descent needs at least one iteration");
  if (!(spec.coupling >= 0.0)) throw SolverError("coupling weight must be >= 0");
  if (!(spec.learning_rate > 0.0)) throw SolverError("learning rate must be positive");
  if (spec.objective == ObjectiveKind::Custom && !spec.custom) {
    throw SolverError("custom objective selected without a callback");
  }
}

ObjectiveValue custom_value(const ObjectiveSpec& spec, const ComplexVector& x) {
  ObjectiveValue out;
  out.loss = spec.custom(x);
  out.gradient.resize(x.size());
  ComplexVector probe = x;
  const double h = spec.custom_fd_step;
  for (Eigen::Index t = 0; t < x.size(); ++t) {
    const Complex original = probe[t];
    probe[t] = original + h;
    const double re_plus = spec.custom(probe);
    probe[t] = original - h;
    const double re_minus = spec.custom(probe);
    probe[t] = original + Complex(0.0, h);
    const double im_plus = spec.custom(probe);
    probe[t] = original - Complex(0.0, h);
    const double im_minus = spec.custom(probe);
    probe[t] = original;
    out.gradient[t] = Complex((re_plus - re_minus) / (2.0 * h), (im_plus - im_minus) / (2.0 * h));
  }
  return out;
}

}  // namespace

ObjectiveKind parse_objective_kind(std::string_view name) {
  if (name == "focus-pressure") return ObjectiveKind::FocusPressure;
  if (name == "trap-gorkov") return ObjectiveKind::TrapGorkov;
  if (name == "pressure-plus-trap") return ObjectiveKind::PressurePlusTrap;
  if (name == "dual-trap-target") return ObjectiveKind::DualTrapTarget;
  if (name == "custom") return ObjectiveKind::Custom;
  throw SolverError("unknown objective '" + std::string(name) + "'");
}

std::string_view to_string(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::FocusPressure:
      return "focus-pressure";
    case ObjectiveKind::TrapGorkov:
      return "trap-gorkov";
    case ObjectiveKind::PressurePlusTrap:
      return "pressure-plus-trap";
    case ObjectiveKind::DualTrapTarget:
      return "dual-trap-target";
    case ObjectiveKind::Custom:
      return "custom";
  }
  return "unknown";
}

PointRole parse_point_role(std::string_view name) {
  if (name == "focus" || name == "f") return PointRole::Focus;
  if (name == "trap" || name == "t") return PointRole::Trap;
  if (name == "target" || name == "target-trap" || name == "s") return PointRole::TargetTrap;
  throw SolverError("unknown point role '" + std::string(name) + "'");
}

OptimizerKind parse_optimizer_kind(std::string_view name) {
  if (name == "adam" || name == "adaptive-moments") return OptimizerKind::AdaptiveMoments;
  if (name == "sgd" || name == "fixed-step") return OptimizerKind::FixedStep;
  throw SolverError("unknown optimizer '" + std::string(name) + "'");
}

ObjectiveInputs make_objective_inputs(const Propagator& propagator, const PointSet& points, bool with_gradients) {
  ObjectiveInputs inputs{propagator.transfer(points), std::nullopt};
  if (with_gradients) inputs.gradients = propagator.gradients(points);
  return inputs;
}

ObjectiveValue evaluate_objective(const ObjectiveSpec& spec, const ObjectiveInputs& inputs, const ComplexVector& x,
                                  const std::optional<TargetAmplitudes>& targets) {
  if (spec.objective == ObjectiveKind::Custom) return custom_value(spec, x);

  const ComplexMatrix& a = inputs.transfer.matrix();
  if (a.cols() != x.size()) throw SolverError("objective: hologram size does not match propagator");
  const auto roles = resolve_roles(spec, a.rows());
  if (targets && targets->size() != a.rows()) throw SolverError("objective: target count does not match points");

  bool needs_gradients = false;
  for (PointRole role : roles) needs_gradients |= role != PointRole::Focus;
  if (needs_gradients && !inputs.gradients) {
    throw SolverError("objective uses the Gor'kov potential but no propagator gradients were supplied");
  }

  const double k1 = spec.gorkov.k1;
  const double k2 = spec.gorkov.k2;
  const double trap_weight = spec.objective == ObjectiveKind::PressurePlusTrap ? spec.coupling : 1.0;

  // Per-point sensitivities: dL/dp (packed Re + i Im) for the pressure and each gradient axis.
  const ComplexVector p = a * x;
  ComplexVector sens_p = ComplexVector::Zero(a.rows());
  std::array<ComplexVector, 3> sens_grad;
  std::array<ComplexVector, 3> p_grad;
  if (needs_gradients) {
    for (int ax = 0; ax < 3; ++ax) {
      p_grad[ax] = inputs.gradients->axes[ax] * x;
      sens_grad[ax] = ComplexVector::Zero(a.rows());
    }
  }

  ObjectiveValue out;
  for (Eigen::Index n = 0; n < a.rows(); ++n) {
    const auto role = roles[static_cast<std::size_t>(n)];
    if (role == PointRole::Focus) {
      const double magnitude = std::abs(p[n]);
      if (magnitude == 0.0) throw SolverError("objective: zero pressure at focus point " + std::to_string(n));
      if (targets) {
        const double err = magnitude - targets->values()[n];
        out.loss += err * err;
        sens_p[n] += 2.0 * err * p[n] / magnitude;
      } else {
        out.loss -= magnitude;
        sens_p[n] -= p[n] / magnitude;
      }
      continue;
    }

    double grad_energy = 0.0;
    for (int ax = 0; ax < 3; ++ax) grad_energy += std::norm(p_grad[ax][n]);
    const double u = k1 * std::norm(p[n]) - k2 * grad_energy;
    // dU/dp = 2 K1 p, dU/d(p_a) = -2 K2 p_a
    double weight = 0.0;
    if (role == PointRole::Trap) {
      out.loss += trap_weight * u;
      weight = trap_weight;
    } else {
      const double err = u - spec.target_potential;
      out.loss += spec.coupling * err * err;
      weight = 2.0 * spec.coupling * err;
    }
    sens_p[n] += weight * 2.0 * k1 * p[n];
    for (int ax = 0; ax < 3; ++ax) sens_grad[ax][n] -= weight * 2.0 * k2 * p_grad[ax][n];
  }

  out.gradient = a.adjoint() * sens_p;
  if (needs_gradients) {
    for (int ax = 0; ax < 3; ++ax) out.gradient.noalias() += inputs.gradients->axes[ax].adjoint() * sens_grad[ax];
  }
  return out;
}

Eigen::VectorXd phase_gradient(const ComplexVector& x, const ComplexVector& gradient) {
  Eigen::VectorXd out(x.size());
  const Complex i(0.0, 1.0);
  for (Eigen::Index t = 0; t < x.size(); ++t) out[t] = (std::conj(gradient[t]) * i * x[t]).real();
  return out;
}

ComplexVector random_phases(Eigen::Index count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.0, kTwoPi);
  ComplexVector x(count);
  for (Eigen::Index t = 0; t < count; ++t) x[t] = std::polar(1.0, dist(rng));
  return x;
}

GradientDescentResult gradient_descent_solve(const ObjectiveSpec& spec, const ObjectiveInputs& inputs,
                                             const std::optional<TargetAmplitudes>& targets) {
  validate(spec);
  const Eigen::Index count = inputs.transfer.transducers();
  ComplexVector x = random_phases(count, spec.seed);

  // Adam moments per real parameter: real parts hold Re(x) moments, imaginary parts Im(x).
  ComplexVector first = ComplexVector::Zero(count);
  Eigen::VectorXd second_re = Eigen::VectorXd::Zero(count);
  Eigen::VectorXd second_im = Eigen::VectorXd::Zero(count);
  double beta1_power = 1.0;
  double beta2_power = 1.0;

  GradientDescentResult result;
  result.loss_trace.reserve(static_cast<std::size_t>(spec.iterations));
  for (int k = 0; k < spec.iterations; ++k) {
    const ObjectiveValue value = evaluate_objective(spec, inputs, x, targets);
    if (!std::isfinite(value.loss) || !value.gradient.allFinite()) {
      throw SolverError("gradient descent produced a non-finite loss or gradient at iteration " + std::to_string(k));
    }
    result.loss_trace.push_back(value.loss);

    ComplexVector step(count);
    if (spec.optimizer == OptimizerKind::FixedStep) {
      step = spec.learning_rate * value.gradient;
    } else {
      const AdamParameters& adam = spec.adam;
      beta1_power *= adam.beta1;
      beta2_power *= adam.beta2;
      for (Eigen::Index t = 0; t < count; ++t) {
        const Complex g = value.gradient[t];
        first[t] = adam.beta1 * first[t] + (1.0 - adam.beta1) * g;
        second_re[t] = adam.beta2 * second_re[t] + (1.0 - adam.beta2) * g.real() * g.real();
        second_im[t] = adam.beta2 * second_im[t] + (1.0 - adam.beta2) * g.imag() * g.imag();
        const Complex m_hat = first[t] / (1.0 - beta1_power);
        const double v_re = second_re[t] / (1.0 - beta2_power);
        const double v_im = second_im[t] / (1.0 - beta2_power);
        step[t] = spec.learning_rate * Complex(m_hat.real() / (std::sqrt(v_re) + adam.epsilon),
                                               m_hat.imag() / (std::sqrt(v_im) + adam.epsilon));
      }
    }
    x = project_transducer(x - step, spec.constraint).activations();
  }
  result.hologram = Hologram(std::move(x));
  return result;
}

}  // namespace holo
