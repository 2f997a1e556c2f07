#include "tyc/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "text.hpp"
#include "tyc/errors.hpp"

namespace tyc {

TimeGrid TimeGrid::with_step(double t0, double t_end, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive");
  if (!(t_end > t0)) throw ValidationError("t_end must exceed t0");
  const double n = std::max(1.0, std::round((t_end - t0) / dt));
  if (n > 5e7) throw ValidationError("grid too fine");
  return {t0, t_end, static_cast<int>(n)};
}

void TimeGrid::validate() const {
  if (n_steps < 1) throw ValidationError("n_steps must be at least 1");
  if (!std::isfinite(t0) || !std::isfinite(t_end) || !(t_end > t0)) throw ValidationError("t_end must exceed t0");
}

ControlSchedule ControlSchedule::constant(const ModelSpec& spec, const TimeGrid& grid) {
  grid.validate();
  return {grid, std::vector<Controls>(static_cast<std::size_t>(grid.size()), spec.constant_controls())};
}

Controls ControlSchedule::at(double t) const {
  const double pos = std::clamp((t - grid.t0) / grid.dt(), 0.0, static_cast<double>(grid.n_steps));
  const int i = std::min(static_cast<int>(pos), grid.n_steps - 1);
  const double w = pos - i;
  const Controls& a = nodes[static_cast<std::size_t>(i)];
  const Controls& b = nodes[static_cast<std::size_t>(i + 1)];
  return {(1 - w) * a.mu + w * b.mu, (1 - w) * a.eta1 + w * b.eta1, (1 - w) * a.eta2 + w * b.eta2};
}

namespace {

Controls average(const Controls& a, const Controls& b) {
  return {0.5 * (a.mu + b.mu), 0.5 * (a.eta1 + b.eta1), 0.5 * (a.eta2 + b.eta2)};
}

State axpy(const State& x, double h, const State& k) { return {x.f + h * k.f, x.m + h * k.m, x.s + h * k.s}; }

// Clips roundoff undershoot; anything more negative is a genuine failure.
State clip(const State& x, double t) {
  State y = x;
  for (double* v : {&y.f, &y.m, &y.s}) {
    if (*v < 0.0) {
      if (*v < -kClipTolerance) {
        std::ostringstream os;
        os << "state went negative (" << *v << ") at t = " << t;
        throw NegativeStateError(os.str());
      }
      *v = 0.0;
    }
  }
  return y;
}

void check_schedule(const ControlSchedule& schedule) {
  schedule.grid.validate();
  if (static_cast<int>(schedule.nodes.size()) != schedule.grid.size())
    throw GridMismatchError("control schedule length does not match its grid");
  for (const auto& u : schedule.nodes)
    if (!(u.mu >= 0.0) || !(u.eta1 >= 0.0) || !(u.eta2 >= 0.0) || !std::isfinite(u.mu) || !std::isfinite(u.eta1) ||
        !std::isfinite(u.eta2))
      throw ValidationError("control values must be finite and nonnegative");
}

}  // namespace

Trajectory integrate_forward(const ModelSpec& spec, const LifeParams& params, const State& init,
                             const ControlSchedule& schedule) {
  params.validate();
  check_schedule(schedule);
  for (double v : {init.f, init.m, init.s}) {
    if (!std::isfinite(v)) throw ValidationError("initial state must be finite");
    if (v < 0.0) throw NegativeStateError("initial state has a negative component");
  }
  if (spec.id != ModelId::Tyc0 && init.s != 0.0) throw ValidationError("harvesting models carry s = 0");

  const TimeGrid& grid = schedule.grid;
  const double h = grid.dt();
  const double guard = kBlowUpFactor * params.cap_k;
  Trajectory out{grid, spec.id, {}};
  out.states.reserve(static_cast<std::size_t>(grid.size()));
  out.states.push_back(init);

  State x = init;
  for (int n = 0; n < grid.n_steps; ++n) {
    const double t = grid.time(n);
    const Controls& u0 = schedule.nodes[static_cast<std::size_t>(n)];
    const Controls& u1 = schedule.nodes[static_cast<std::size_t>(n + 1)];
    const Controls um = average(u0, u1);
    const State k1 = rhs(spec, params, x, u0);
    const State k2 = rhs(spec, params, clip(axpy(x, 0.5 * h, k1), t), um);
    const State k3 = rhs(spec, params, clip(axpy(x, 0.5 * h, k2), t), um);
    const State k4 = rhs(spec, params, clip(axpy(x, h, k3), t), u1);
    State next{x.f + h / 6.0 * (k1.f + 2.0 * k2.f + 2.0 * k3.f + k4.f),
               x.m + h / 6.0 * (k1.m + 2.0 * k2.m + 2.0 * k3.m + k4.m),
               x.s + h / 6.0 * (k1.s + 2.0 * k2.s + 2.0 * k3.s + k4.s)};
    const double t_next = grid.time(n + 1);
    for (double v : {next.f, next.m, next.s}) {
      if (!std::isfinite(v) || v > guard) {
        std::ostringstream os;
        os << "state exceeded " << guard << " (10 K) before t = " << t_next;
        throw BlowUpError(os.str(), t);
      }
    }
    x = clip(next, t_next);
    out.states.push_back(x);
  }
  return out;
}

Trajectory integrate_forward(const ModelSpec& spec, const LifeParams& params, const State& init, const TimeGrid& grid) {
  return integrate_forward(spec, params, init, ControlSchedule::constant(spec, grid));
}

Vec3 adjoint_rhs(const ModelSpec& spec, const LifeParams& params, const State& x, const Controls& u,
                 const Vec3& lambda) {
  const Mat3 j = state_jacobian(spec, params, x, u);
  Vec3 out{1.0, 1.0, 0.0};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) out[static_cast<std::size_t>(i)] -= j[k][i] * lambda[static_cast<std::size_t>(k)];
  return out;
}

AdjointTrajectory integrate_adjoint_backward(const ModelSpec& spec, const LifeParams& params,
                                             const Trajectory& states, const ControlSchedule& schedule,
                                             const TimeGrid& grid) {
  if (!(states.grid == grid) || !(schedule.grid == grid))
    throw GridMismatchError("state trajectory, control schedule and adjoint grid must coincide");
  if (static_cast<int>(states.states.size()) != grid.size())
    throw GridMismatchError("state trajectory length does not match its grid");
  check_schedule(schedule);

  const double h = grid.dt();
  const auto n_nodes = static_cast<std::size_t>(grid.size());
  // Slopes at the nodes for Hermite interpolation.
  std::vector<State> slope(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) slope[i] = rhs(spec, params, states.states[i], schedule.nodes[i]);

  AdjointTrajectory out{grid, std::vector<Vec3>(n_nodes, Vec3{0.0, 0.0, 0.0})};
  auto plus = [](const Vec3& a, double c, const Vec3& b) {
    return Vec3{a[0] + c * b[0], a[1] + c * b[1], a[2] + c * b[2]};
  };
  for (int n = grid.n_steps; n > 0; --n) {
    const auto i1 = static_cast<std::size_t>(n);
    const auto i0 = i1 - 1;
    const State& x0 = states.states[i0];
    const State& x1 = states.states[i1];
    // Cubic Hermite midpoint: (x0 + x1)/2 + h (s0 - s1)/8.
    const State xm{0.5 * (x0.f + x1.f) + h / 8.0 * (slope[i0].f - slope[i1].f),
                   0.5 * (x0.m + x1.m) + h / 8.0 * (slope[i0].m - slope[i1].m),
                   0.5 * (x0.s + x1.s) + h / 8.0 * (slope[i0].s - slope[i1].s)};
    const State xmc{std::max(xm.f, 0.0), std::max(xm.m, 0.0), std::max(xm.s, 0.0)};
    const Controls um = average(schedule.nodes[i0], schedule.nodes[i1]);
    const Vec3& l = out.lambda[i1];
    // Stepping backwards: dlambda = -h * rhs.
    const Vec3 k1 = adjoint_rhs(spec, params, x1, schedule.nodes[i1], l);
    const Vec3 k2 = adjoint_rhs(spec, params, xmc, um, plus(l, -0.5 * h, k1));
    const Vec3 k3 = adjoint_rhs(spec, params, xmc, um, plus(l, -0.5 * h, k2));
    const Vec3 k4 = adjoint_rhs(spec, params, x0, schedule.nodes[i0], plus(l, -h, k3));
    Vec3 next{};
    for (std::size_t c = 0; c < 3; ++c) next[c] = l[c] - h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
    out.lambda[i0] = next;
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const ControlSchedule* schedule,
                          const AdjointTrajectory* adjoint) {
  if (schedule && !(schedule->grid == traj.grid)) throw GridMismatchError("schedule grid differs from trajectory");
  if (adjoint && !(adjoint->grid == traj.grid)) throw GridMismatchError("adjoint grid differs from trajectory");
  const bool tyc = traj.model == ModelId::Tyc0;
  out << "t,f,m,s";
  if (schedule) out << (tyc ? ",mu" : ",eta1,eta2");
  if (adjoint) out << (tyc ? ",lambda1,lambda2,lambda3" : ",lambda1,lambda2");
  out << '\n';
  using detail::num;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const State& x = traj.states[i];
    out << num(traj.grid.time(static_cast<int>(i))) << ',' << num(x.f) << ',' << num(x.m) << ',' << num(x.s);
    if (schedule) {
      const Controls& u = schedule->nodes[i];
      if (tyc)
        out << ',' << num(u.mu);
      else
        out << ',' << num(u.eta1) << ',' << num(u.eta2);
    }
    if (adjoint) {
      const Vec3& l = adjoint->lambda[i];
      out << ',' << num(l[0]) << ',' << num(l[1]);
      if (tyc) out << ',' << num(l[2]);
    }
    out << '\n';
  }
}

}  // namespace tyc
