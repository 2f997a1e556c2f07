#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tyc/integrate.hpp"
#include "tyc/models.hpp"

namespace tyc {

/// Upper bounds of the admissible sets; lower bounds are always 0.
struct ControlBounds {
  double mu_max = 0.0;  ///< +inf when uncapped
  double eta_max = 1.0;
};

/// How the sweep computes its projected update.
///  Discrete:   exact gradient of the discretized objective (reverse mode
///              through the RK4 steps and the trapezoid rule).
///  Continuous: the textbook sweep, projecting the backward-integrated
///              costate through the Pontryagin formulas.
enum class GradientMode { Discrete, Continuous };

struct SweepConfig {
  double omega = 0.5;
  double tol = 1e-4;
  int max_iters = 2000;
  /// Cap on mu for Tyc0. Unset means K; disabled by `cap_mu = false`.
  std::optional<double> mu_max;
  bool cap_mu = true;
  GradientMode mode = GradientMode::Discrete;

  /// Throws ValidationError on out-of-range values.
  void validate() const;
  ControlBounds bounds(const LifeParams& params) const;
};

struct SweepResult {
  ModelSpec spec;
  LifeParams params;
  SweepConfig config;
  State init;
  ControlSchedule schedule;
  Trajectory states;
  AdjointTrajectory adjoints;
  double objective = 0.0;
  double cost_excluding_controls = 0.0;
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;  ///< relative sup-norm control change at the last iteration
  std::string message;    ///< non-convergence diagnostics; empty on success
};

/// Pontryagin projection:
///   Tyc0        mu   = clamp(lambda3, 0, mu_max)
///   Models 1-6  eta1 = clamp(-G1(f) lambda1, 0, 1)
///               eta2 = clamp(+/-G2(m) lambda2, 0, 1)  (+ stocking, - harvesting)
Controls project_control(const ModelSpec& spec, const State& state, const Vec3& lambda, const ControlBounds& bounds);

struct ObjectiveTerms {
  double objective = 0.0;                ///< trapezoid of f + m + |u|^2/2
  double cost_excluding_controls = 0.0;  ///< trapezoid of f + m
  double control_energy = 0.0;           ///< trapezoid of |u|^2/2
};

ObjectiveTerms objective_terms(const Trajectory& traj, const ControlSchedule& schedule);

/// dJ/du at every node for the discretized problem (same RK4 and trapezoid
/// as integrate_forward/objective_terms). Channel k of node n is
/// gradient[n].channel(model, k).
std::vector<Controls> discrete_gradient(const ModelSpec& spec, const LifeParams& params, const Trajectory& traj,
                                        const ControlSchedule& schedule);

/// Forward-backward sweep from u = 0. The update is
///   u <- (1 - omega) u + omega * target,
/// with omega halved (for that iteration only) while J would increase.
/// Non-convergence is reported through `converged`/`message`, not thrown.
SweepResult forward_backward_sweep(const ModelSpec& spec, const LifeParams& params, const State& init,
                                   const TimeGrid& grid, const SweepConfig& config = {});

struct OptimalityCheck {
  /// max |dH/du| over nodes where the unclamped stationary control lies
  /// strictly inside the bounds, from the gradient of the discretized problem.
  double stationarity = 0.0;
  /// max |u - clamp(u - dH/du)| over every node.
  double projected = 0.0;
  /// As `stationarity`, with the continuous costate: |lambda . dF/du - u|.
  double continuous_stationarity = 0.0;
  int interior_points = 0;
  /// min over directions of J(clamp(u + eps v)) - J(u).
  double min_fd_change = 0.0;
  int directions = 0;
};

OptimalityCheck optimality_residual(const SweepResult& result, int directions = 20, double eps = 1e-3,
                                    std::uint64_t seed = 1);

void write_sweep_json(std::ostream& out, const SweepResult& result);
/// t, states, controls, adjoints.
void write_sweep_csv(std::ostream& out, const SweepResult& result);

}  // namespace tyc
