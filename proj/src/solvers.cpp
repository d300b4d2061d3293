#include "holo/solvers.hpp"

#include <cmath>
#include <string>

namespace holo {

namespace {

void require_iterations(int iterations) {
  if (iterations < 1) throw SolverError("iteration count must be >= 1, got " + std::to_string(iterations));
}

void require_shape(const PropagatorMatrix& a, const TargetAmplitudes& y) {
  if (a.points() != y.size()) {
    throw SolverError("target amplitudes have " + std::to_string(y.size()) + " entries but the propagator has " +
                      std::to_string(a.points()) + " points");
  }
}

}  // namespace

Hologram::Hologram(ComplexVector activations, std::uint64_t board_hash)
    : activations_(std::move(activations)), board_hash_(board_hash) {
  if (!activations_.allFinite()) throw SolverError("hologram contains non-finite activations");
}

Eigen::VectorXd Hologram::phases() const {
  Eigen::VectorXd out(activations_.size());
  for (Eigen::Index t = 0; t < activations_.size(); ++t) out[t] = phase(activations_[t]);
  return out;
}

TargetAmplitudes::TargetAmplitudes(Eigen::VectorXd values) : values_(std::move(values)) {
  if (values_.size() == 0) throw SolverError("target amplitudes must not be empty");
  for (Eigen::Index n = 0; n < values_.size(); ++n) {
    if (!(values_[n] > 0.0) || !std::isfinite(values_[n])) {
      throw SolverError("target amplitude " + std::to_string(n) + " must be positive");
    }
  }
}

TargetAmplitudes TargetAmplitudes::uniform(Eigen::Index count, double value) {
  return TargetAmplitudes(Eigen::VectorXd::Constant(count, value));
}

Hologram project_transducer(const ComplexVector& x, ConstraintMode mode) {
  ComplexVector out = x;
  for (Eigen::Index t = 0; t < x.size(); ++t) {
    const double magnitude = std::abs(x[t]);
    if (mode == ConstraintMode::Unit) {
      if (magnitude == 0.0) {
        throw SolverError("transducer " + std::to_string(t) + " has zero activation; phase undefined");
      }
      out[t] = x[t] / magnitude;
    } else if (magnitude > 1.0) {
      out[t] = x[t] / magnitude;
    }
  }
  return Hologram(std::move(out));
}

ComplexVector project_points(const ComplexVector& p, const TargetAmplitudes& y) {
  if (p.size() != y.size()) throw SolverError("project_points: size mismatch");
  ComplexVector out(p.size());
  for (Eigen::Index n = 0; n < p.size(); ++n) {
    const double magnitude = std::abs(p[n]);
    if (magnitude == 0.0) throw SolverError("point " + std::to_string(n) + " has zero pressure; phase undefined");
    out[n] = p[n] / magnitude * y.values()[n];
  }
  return out;
}

Hologram naive(const PropagatorMatrix& a, const TargetAmplitudes& y, ConstraintMode constraint) {
  require_shape(a, y);
  const ComplexVector back = a.matrix().adjoint() * y.values().cast<Complex>();
  return project_transducer(back, constraint);
}

Hologram iterative_backpropagation(const PropagatorMatrix& a, const TargetAmplitudes& y,
                                   const ProjectiveOptions& options) {
  require_iterations(options.iterations);
  Hologram x = naive(a, y, options.constraint);
  for (int k = 0; k < options.iterations; ++k) {
    const ComplexVector p = a.matrix() * x.activations();
    const ComplexVector back = a.matrix().adjoint() * project_points(p, y);
    x = project_transducer(back, options.constraint);
  }
  return x;
}

Hologram gspat(const PropagatorMatrix& a, const TargetAmplitudes& y, const ProjectiveOptions& options) {
  require_shape(a, y);
  require_iterations(options.iterations);
  const ComplexMatrix& forward = a.matrix();

  ComplexMatrix backward = forward.adjoint();
  for (Eigen::Index n = 0; n < forward.rows(); ++n) {
    const double norm2 = forward.row(n).squaredNorm();
    if (norm2 == 0.0) throw SolverError("gspat: point " + std::to_string(n) + " receives no field");
    backward.col(n) /= norm2;
  }
  const ComplexMatrix r = forward * backward;

  ComplexVector b = y.values().cast<Complex>();
  for (int k = 0; k < options.iterations; ++k) b = project_points(r * b, y);

  const ComplexVector p_final = r * b;
  Eigen::VectorXd corrected(y.size());
  for (Eigen::Index n = 0; n < y.size(); ++n) {
    const double magnitude = std::abs(p_final[n]);
    if (magnitude == 0.0) throw SolverError("gspat: point " + std::to_string(n) + " has zero pressure");
    corrected[n] = y.values()[n] * y.values()[n] / magnitude;
  }
  const ComplexVector targets = project_points(p_final, TargetAmplitudes(corrected));
  return project_transducer(backward * targets, options.constraint);
}

Hologram wgs(const PropagatorMatrix& a, const TargetAmplitudes& y, const ProjectiveOptions& options) {
  require_iterations(options.iterations);
  Hologram x = naive(a, y, options.constraint);
  const Eigen::Index n_points = y.size();
  Eigen::VectorXd weights = Eigen::VectorXd::Ones(n_points);
  const double mean_target = y.values().sum() / static_cast<double>(n_points);

  for (int k = 0; k < options.iterations; ++k) {
    const ComplexVector p = a.matrix() * x.activations();
    const Eigen::VectorXd magnitude = p.cwiseAbs();
    const double mean_magnitude = magnitude.sum() / static_cast<double>(n_points);
    for (Eigen::Index n = 0; n < n_points; ++n) {
      if (magnitude[n] == 0.0) throw SolverError("wgs: point " + std::to_string(n) + " has zero pressure");
      weights[n] *= mean_magnitude / magnitude[n];
    }
    Eigen::VectorXd weighted = y.values().cwiseProduct(weights);
    weighted *= mean_target / (weighted.sum() / static_cast<double>(n_points));
    const ComplexVector back = a.matrix().adjoint() * project_points(p, TargetAmplitudes(weighted));
    x = project_transducer(back, options.constraint);
  }
  return x;
}

ProjectiveSolver parse_projective_solver(std::string_view name) {
  if (name == "naive") return ProjectiveSolver::Naive;
  if (name == "ib" || name == "iterative-backpropagation") return ProjectiveSolver::IterativeBackpropagation;
  if (name == "gspat" || name == "gs-pat") return ProjectiveSolver::Gspat;
  if (name == "wgs") return ProjectiveSolver::Wgs;
  throw ConfigError("unknown projective solver '" + std::string(name) + "'");
}

Hologram solve_projective(ProjectiveSolver solver, const PropagatorMatrix& a, const TargetAmplitudes& y,
                          const ProjectiveOptions& options) {
  switch (solver) {
    case ProjectiveSolver::Naive:
      return naive(a, y, options.constraint);
    case ProjectiveSolver::IterativeBackpropagation:
      return iterative_backpropagation(a, y, options);
    case ProjectiveSolver::Gspat:
      return gspat(a, y, options);
    case ProjectiveSolver::Wgs:
      return wgs(a, y, options);
  }
  throw SolverError("unhandled solver");
}

}  // namespace holo
