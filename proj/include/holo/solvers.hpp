#pragma once

#include <cstdint>
#include <vector>

#include "holo/propagators.hpp"

namespace holo {

/// Per-transducer complex activations x_t = A_t exp(i phi_t).
class Hologram {
 public:
  Hologram() = default;
  explicit Hologram(ComplexVector activations, std::uint64_t board_hash = 0);

  const ComplexVector& activations() const noexcept { return activations_; }
  Eigen::Index size() const noexcept { return activations_.size(); }
  std::uint64_t board_hash() const noexcept { return board_hash_; }
  void set_board_hash(std::uint64_t hash) noexcept { board_hash_ = hash; }

  Eigen::VectorXd amplitudes() const { return activations_.cwiseAbs(); }
  Eigen::VectorXd phases() const;

 private:
  ComplexVector activations_;
  std::uint64_t board_hash_ = 0;
};

/// Unit: |x_t| = 1 (phase only). Cap: |x_t| <= 1.
enum class ConstraintMode { Unit, Cap };

/// Desired point amplitudes in Pa, all strictly positive.
class TargetAmplitudes {
 public:
  explicit TargetAmplitudes(Eigen::VectorXd values);
  static TargetAmplitudes uniform(Eigen::Index count, double value = 1.0);

  const Eigen::VectorXd& values() const noexcept { return values_; }
  Eigen::Index size() const noexcept { return values_.size(); }

 private:
  Eigen::VectorXd values_;
};

Hologram project_transducer(const ComplexVector& x, ConstraintMode mode = ConstraintMode::Unit);
ComplexVector project_points(const ComplexVector& p, const TargetAmplitudes& y);

struct ProjectiveOptions {
  int iterations = 100;
  ConstraintMode constraint = ConstraintMode::Unit;
};

/// Phase conjugation: P(A^H y).
Hologram naive(const PropagatorMatrix& a, const TargetAmplitudes& y,
               ConstraintMode constraint = ConstraintMode::Unit);

/// x_{k+1} = P_x(A^H P_y(A x_k)), starting from the naive hologram.
Hologram iterative_backpropagation(const PropagatorMatrix& a, const TargetAmplitudes& y,
                                   const ProjectiveOptions& options = {});

/// Point-space iteration through R = A B, with B = A^H scaled per point by
/// 1/||A_n||^2 (unit diagonal). After the loop the constrained targets are
/// scaled by y/|p_K| and back-propagated through B.
Hologram gspat(const PropagatorMatrix& a, const TargetAmplitudes& y, const ProjectiveOptions& options = {});

/// Weighted GS: IB with per-point weights w_n <- w_n * mean|p| / |p_n|,
/// targets y.*w renormalized to the mean of y.
Hologram wgs(const PropagatorMatrix& a, const TargetAmplitudes& y, const ProjectiveOptions& options = {});

enum class ProjectiveSolver { Naive, IterativeBackpropagation, Gspat, Wgs };
ProjectiveSolver parse_projective_solver(std::string_view name);
Hologram solve_projective(ProjectiveSolver solver, const PropagatorMatrix& a, const TargetAmplitudes& y,
                          const ProjectiveOptions& options = {});

}  // namespace holo
