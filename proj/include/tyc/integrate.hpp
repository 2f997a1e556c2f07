#pragma once

#include <iosfwd>
#include <vector>

#include "tyc/models.hpp"

namespace tyc {

/// Uniform grid t0, t0 + dt, ..., t_end with dt = (t_end - t0) / n_steps.
struct TimeGrid {
  double t0 = 0.0;
  double t_end = 200.0;
  int n_steps = 4000;

  /// Grid whose step is the closest to `dt` that divides the horizon evenly.
  static TimeGrid with_step(double t0, double t_end, double dt);

  double dt() const noexcept { return (t_end - t0) / n_steps; }
  /// Node i, computed as t0 + i*dt so every pass sees the same times.
  double time(int i) const noexcept { return t0 + i * dt(); }
  int size() const noexcept { return n_steps + 1; }
  /// Throws ValidationError unless n_steps >= 1 and t_end > t0.
  void validate() const;

  bool operator==(const TimeGrid&) const = default;
};

inline constexpr double kDefaultStep = 0.05;
inline constexpr double kClipTolerance = 1e-9;
inline constexpr double kBlowUpFactor = 10.0;

/// Control values at every grid node; piecewise linear in between.
struct ControlSchedule {
  TimeGrid grid;
  std::vector<Controls> nodes;

  static ControlSchedule constant(const ModelSpec& spec, const TimeGrid& grid);
  /// Linear interpolation at an arbitrary time inside the grid.
  Controls at(double t) const;
};

struct Trajectory {
  TimeGrid grid;
  ModelId model = ModelId::Tyc0;
  std::vector<State> states;
};

/// Costates in the maximization convention: lambda' = -dH/dx with
/// H = -(f+m) - |u|^2/2 + lambda . rhs, lambda(T) = 0.
struct AdjointTrajectory {
  TimeGrid grid;
  std::vector<Vec3> lambda;
};

/// Classical RK4. Stages 2 and 3 use the control averaged over the step.
/// Throws BlowUpError once a component exceeds 10 K (carrying the last
/// accepted time) and NegativeStateError for undershoot beyond 1e-9.
Trajectory integrate_forward(const ModelSpec& spec, const LifeParams& params, const State& init,
                             const ControlSchedule& schedule);
/// Constant controls taken from `spec`.
Trajectory integrate_forward(const ModelSpec& spec, const LifeParams& params, const State& init, const TimeGrid& grid);

/// Integrates lambda' = (1, 1, 0) - J(x(t), u(t))^T lambda from lambda(T) = 0
/// back to t0 with RK4; mid-step states come from cubic Hermite
/// interpolation of `states`. Throws GridMismatchError when the trajectory,
/// the schedule and `grid` differ.
AdjointTrajectory integrate_adjoint_backward(const ModelSpec& spec, const LifeParams& params,
                                             const Trajectory& states, const ControlSchedule& schedule,
                                             const TimeGrid& grid);

/// The continuous adjoint right-hand side, exposed for testing.
Vec3 adjoint_rhs(const ModelSpec& spec, const LifeParams& params, const State& x, const Controls& u,
                 const Vec3& lambda);

/// Header t,f,m,s plus mu (Tyc0) or eta1,eta2 when a schedule is given.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const ControlSchedule* schedule = nullptr,
                          const AdjointTrajectory* adjoint = nullptr);

}  // namespace tyc
