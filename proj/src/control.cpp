#include "tyc/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "json_io.hpp"
#include "tyc/errors.hpp"

namespace tyc {

void SweepConfig::validate() const {
  if (!(omega > 0.0 && omega <= 1.0)) throw ValidationError("omega must lie in (0, 1]");
  if (!(tol > 0.0)) throw ValidationError("tol must be positive");
  if (max_iters < 1) throw ValidationError("max_iters must be at least 1");
  if (mu_max && !(*mu_max > 0.0)) throw ValidationError("mu_max must be positive");
}

ControlBounds SweepConfig::bounds(const LifeParams& params) const {
  ControlBounds b;
  b.mu_max = cap_mu ? mu_max.value_or(params.cap_k) : std::numeric_limits<double>::infinity();
  return b;
}

namespace {

double upper(ModelId id, int channel, const ControlBounds& b) {
  (void)channel;
  return id == ModelId::Tyc0 ? b.mu_max : b.eta_max;
}

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 transpose_times(const Mat3& j, const Vec3& a) {
  Vec3 out{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) out[static_cast<std::size_t>(i)] += j[k][i] * a[static_cast<std::size_t>(k)];
  return out;
}

Vec3 scaled(const Vec3& a, double c) { return {a[0] * c, a[1] * c, a[2] * c}; }
Vec3 sum(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }

Controls average(const Controls& a, const Controls& b) {
  return {0.5 * (a.mu + b.mu), 0.5 * (a.eta1 + b.eta1), 0.5 * (a.eta2 + b.eta2)};
}

State stage(const State& x, double h, const State& k) {
  return {std::max(0.0, x.f + h * k.f), std::max(0.0, x.m + h * k.m), std::max(0.0, x.s + h * k.s)};
}

double trapezoid_weight(int n, int n_steps) { return (n == 0 || n == n_steps) ? 0.5 : 1.0; }

double energy(ModelId id, const Controls& u) {
  return id == ModelId::Tyc0 ? 0.5 * u.mu * u.mu : 0.5 * (u.eta1 * u.eta1 + u.eta2 * u.eta2);
}

// J, or +inf when the schedule drives the system out of the guarded region.
double try_objective(const ModelSpec& spec, const LifeParams& params, const State& init,
                     const ControlSchedule& schedule, Trajectory* traj_out) {
  try {
    Trajectory traj = integrate_forward(spec, params, init, schedule);
    const double j = objective_terms(traj, schedule).objective;
    if (traj_out) *traj_out = std::move(traj);
    return j;
  } catch (const BlowUpError&) {
    return std::numeric_limits<double>::infinity();
  } catch (const NegativeStateError&) {
    return std::numeric_limits<double>::infinity();
  }
}

// Fixed-point target of the sweep for every node.
std::vector<Controls> sweep_target(const ModelSpec& spec, const LifeParams& params, const Trajectory& traj,
                                   const ControlSchedule& schedule, const SweepConfig& config,
                                   const ControlBounds& bounds) {
  const int channels = control_channels(spec.id);
  std::vector<Controls> target(schedule.nodes.size());
  if (config.mode == GradientMode::Continuous) {
    const auto adj = integrate_adjoint_backward(spec, params, traj, schedule, traj.grid);
    for (std::size_t n = 0; n < target.size(); ++n)
      target[n] = project_control(spec, traj.states[n], adj.lambda[n], bounds);
    return target;
  }
  const auto grad = discrete_gradient(spec, params, traj, schedule);
  const double h = traj.grid.dt();
  for (std::size_t n = 0; n < target.size(); ++n) {
    const double hw = h * trapezoid_weight(static_cast<int>(n), traj.grid.n_steps);
    for (int c = 0; c < channels; ++c) {
      const double u = schedule.nodes[n].channel(spec.id, c);
      const double z = u - grad[n].channel(spec.id, c) / hw;
      target[n].set_channel(spec.id, c, std::clamp(z, 0.0, upper(spec.id, c, bounds)));
    }
  }
  return target;
}

double sup_norm(ModelId id, const std::vector<Controls>& u) {
  double s = 0.0;
  for (const auto& c : u)
    for (int k = 0; k < control_channels(id); ++k) s = std::max(s, std::abs(c.channel(id, k)));
  return s;
}

}  // namespace

Controls project_control(const ModelSpec& spec, const State& state, const Vec3& lambda, const ControlBounds& bounds) {
  Controls u;
  if (spec.id == ModelId::Tyc0) {
    u.mu = std::clamp(lambda[2], 0.0, bounds.mu_max);
    return u;
  }
  u.eta1 = std::clamp(-harvest_g1(spec, state.f) * lambda[0], 0.0, bounds.eta_max);
  u.eta2 = std::clamp(male_sign(spec.id) * harvest_g2(spec, state.m) * lambda[1], 0.0, bounds.eta_max);
  return u;
}

ObjectiveTerms objective_terms(const Trajectory& traj, const ControlSchedule& schedule) {
  if (!(traj.grid == schedule.grid) || traj.states.size() != schedule.nodes.size())
    throw GridMismatchError("trajectory and schedule grids differ");
  ObjectiveTerms out;
  const double h = traj.grid.dt();
  for (int n = 0; n <= traj.grid.n_steps; ++n) {
    const double w = h * trapezoid_weight(n, traj.grid.n_steps);
    const State& x = traj.states[static_cast<std::size_t>(n)];
    out.cost_excluding_controls += w * (x.f + x.m);
    out.control_energy += w * energy(traj.model, schedule.nodes[static_cast<std::size_t>(n)]);
  }
  out.objective = out.cost_excluding_controls + out.control_energy;
  return out;
}

std::vector<Controls> discrete_gradient(const ModelSpec& spec, const LifeParams& params, const Trajectory& traj,
                                        const ControlSchedule& schedule) {
  if (!(traj.grid == schedule.grid) || traj.states.size() != schedule.nodes.size())
    throw GridMismatchError("trajectory and schedule grids differ");
  const int big_n = traj.grid.n_steps;
  const double h = traj.grid.dt();
  const int channels = control_channels(spec.id);
  const Vec3 running{1.0, 1.0, 0.0};
  std::vector<Controls> ubar(schedule.nodes.size());

  auto add_running = [&](int n, Vec3& xbar) {
    const double hw = h * trapezoid_weight(n, big_n);
    xbar = sum(xbar, scaled(running, hw));
    const Controls& u = schedule.nodes[static_cast<std::size_t>(n)];
    Controls& g = ubar[static_cast<std::size_t>(n)];
    for (int c = 0; c < channels; ++c) g.set_channel(spec.id, c, g.channel(spec.id, c) + hw * u.channel(spec.id, c));
  };
  auto add_control = [&](Controls& g, const State& y, const Vec3& gk, double weight) {
    for (int c = 0; c < channels; ++c)
      g.set_channel(spec.id, c, g.channel(spec.id, c) + weight * dot(control_sensitivity(spec, y, c), gk));
  };

  Vec3 xbar{};
  add_running(big_n, xbar);
  for (int n = big_n - 1; n >= 0; --n) {
    const auto i0 = static_cast<std::size_t>(n);
    const State& x = traj.states[i0];
    const Controls& u0 = schedule.nodes[i0];
    const Controls& u1 = schedule.nodes[i0 + 1];
    const Controls um = average(u0, u1);
    // Recompute the stages exactly as the forward pass did.
    const State k1 = rhs(spec, params, x, u0);
    const State y2 = stage(x, 0.5 * h, k1);
    const State k2 = rhs(spec, params, y2, um);
    const State y3 = stage(x, 0.5 * h, k2);
    const State k3 = rhs(spec, params, y3, um);
    const State y4 = stage(x, h, k3);

    const Vec3 a = xbar;
    Vec3 gk4 = scaled(a, h / 6.0);
    Vec3 gk3 = scaled(a, h / 3.0);
    Vec3 gk2 = scaled(a, h / 3.0);
    Vec3 gk1 = scaled(a, h / 6.0);
    Controls mid_bar;

    const Vec3 y4bar = transpose_times(state_jacobian(spec, params, y4, u1), gk4);
    add_control(ubar[i0 + 1], y4, gk4, 1.0);
    gk3 = sum(gk3, scaled(y4bar, h));
    Vec3 xn = y4bar;

    const Vec3 y3bar = transpose_times(state_jacobian(spec, params, y3, um), gk3);
    add_control(mid_bar, y3, gk3, 1.0);
    gk2 = sum(gk2, scaled(y3bar, 0.5 * h));
    xn = sum(xn, y3bar);

    const Vec3 y2bar = transpose_times(state_jacobian(spec, params, y2, um), gk2);
    add_control(mid_bar, y2, gk2, 1.0);
    gk1 = sum(gk1, scaled(y2bar, 0.5 * h));
    xn = sum(xn, y2bar);

    xn = sum(xn, transpose_times(state_jacobian(spec, params, x, u0), gk1));
    add_control(ubar[i0], x, gk1, 1.0);
    xn = sum(xn, a);

    for (int c = 0; c < channels; ++c) {
      const double half = 0.5 * mid_bar.channel(spec.id, c);
      ubar[i0].set_channel(spec.id, c, ubar[i0].channel(spec.id, c) + half);
      ubar[i0 + 1].set_channel(spec.id, c, ubar[i0 + 1].channel(spec.id, c) + half);
    }
    add_running(n, xn);
    xbar = xn;
  }
  return ubar;
}

SweepResult forward_backward_sweep(const ModelSpec& spec, const LifeParams& params, const State& init,
                                   const TimeGrid& grid, const SweepConfig& config) {
  params.validate();
  spec.validate(params);
  config.validate();
  grid.validate();
  const ControlBounds bounds = config.bounds(params);

  SweepResult res;
  res.spec = spec;
  res.params = params;
  res.config = config;
  res.init = init;
  res.schedule = ControlSchedule{grid, std::vector<Controls>(static_cast<std::size_t>(grid.size()))};
  res.states = integrate_forward(spec, params, init, res.schedule);
  double j = objective_terms(res.states, res.schedule).objective;

  for (int it = 1; it <= config.max_iters; ++it) {
    res.iterations = it;
    const auto target = sweep_target(spec, params, res.states, res.schedule, config, bounds);
    double diff = 0.0;
    for (std::size_t n = 0; n < target.size(); ++n)
      for (int c = 0; c < control_channels(spec.id); ++c)
        diff = std::max(diff, std::abs(target[n].channel(spec.id, c) - res.schedule.nodes[n].channel(spec.id, c)));
    const double scale = std::max(sup_norm(spec.id, res.schedule.nodes), sup_norm(spec.id, target));
    res.residual = scale > 0.0 ? diff / scale : 0.0;
    if (res.residual < config.tol) {
      res.converged = true;
      break;
    }

    double omega = config.omega;
    bool accepted = false;
    bool infeasible = false;
    ControlSchedule candidate = res.schedule;
    Trajectory cand_traj;
    while (omega >= 1e-10) {
      for (std::size_t n = 0; n < target.size(); ++n) {
        const Controls& u = res.schedule.nodes[n];
        const Controls& z = target[n];
        candidate.nodes[n] = {u.mu + omega * (z.mu - u.mu), u.eta1 + omega * (z.eta1 - u.eta1),
                              u.eta2 + omega * (z.eta2 - u.eta2)};
      }
      const double jc = try_objective(spec, params, init, candidate, &cand_traj);
      infeasible = std::isinf(jc);
      if (jc <= j + 1e-14 * std::abs(j)) {
        j = jc;
        accepted = true;
        break;
      }
      omega *= 0.5;
    }
    if (!accepted) {
      std::ostringstream os;
      os << "no relaxation step decreased J at iteration " << it << " (relative change " << res.residual << ")";
      if (infeasible) os << "; the smallest trial step left the nonnegative state region, so dt is likely too coarse";
      res.message = os.str();
      break;
    }
    res.schedule = std::move(candidate);
    res.states = std::move(cand_traj);
  }
  if (!res.converged && res.message.empty()) {
    std::ostringstream os;
    os << "reached max_iters = " << config.max_iters << " with relative change " << res.residual;
    res.message = os.str();
  }

  const auto terms = objective_terms(res.states, res.schedule);
  res.objective = terms.objective;
  res.cost_excluding_controls = terms.cost_excluding_controls;
  res.adjoints = integrate_adjoint_backward(spec, params, res.states, res.schedule, grid);
  return res;
}

OptimalityCheck optimality_residual(const SweepResult& result, int directions, double eps, std::uint64_t seed) {
  const ModelSpec& spec = result.spec;
  const ControlBounds bounds = result.config.bounds(result.params);
  const int channels = control_channels(spec.id);
  const auto grad = discrete_gradient(spec, result.params, result.states, result.schedule);
  const double h = result.states.grid.dt();

  OptimalityCheck out;
  for (std::size_t n = 0; n < grad.size(); ++n) {
    const double hw = h * trapezoid_weight(static_cast<int>(n), result.states.grid.n_steps);
    const Controls& u = result.schedule.nodes[n];
    for (int c = 0; c < channels; ++c) {
      const double v = u.channel(spec.id, c);
      const double ub = upper(spec.id, c, bounds);
      // Unclamped stationary value; a node is interior when it lies inside the bounds.
      const double z = v - grad[n].channel(spec.id, c) / hw;
      out.projected = std::max(out.projected, std::abs(v - std::clamp(z, 0.0, ub)));
      if (z > 0.0 && z < ub) {
        ++out.interior_points;
        out.stationarity = std::max(out.stationarity, std::abs(v - z));
      }
      const double zc = dot(result.adjoints.lambda[n], control_sensitivity(spec, result.states.states[n], c));
      if (zc > 0.0 && zc < ub) out.continuous_stationarity = std::max(out.continuous_stationarity, std::abs(v - zc));
    }
  }

  const double j0 = objective_terms(result.states, result.schedule).objective;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  out.min_fd_change = std::numeric_limits<double>::infinity();
  for (int d = 0; d < directions; ++d) {
    ControlSchedule pert = result.schedule;
    for (auto& u : pert.nodes)
      for (int c = 0; c < channels; ++c)
        u.set_channel(spec.id, c, std::clamp(u.channel(spec.id, c) + eps * unit(rng), 0.0, upper(spec.id, c, bounds)));
    const double jp = try_objective(spec, result.params, result.init, pert, nullptr);
    out.min_fd_change = std::min(out.min_fd_change, jp - j0);
    ++out.directions;
  }
  return out;
}

namespace {

detail::ordered_json config_json(const SweepResult& r) {
  detail::ordered_json c{{"omega", r.config.omega},
                         {"tol", r.config.tol},
                         {"max_iters", r.config.max_iters},
                         {"gradient", r.config.mode == GradientMode::Discrete ? "discrete" : "continuous"},
                         {"grid", detail::to_json(r.states.grid)},
                         {"init", detail::to_json(r.init)}};
  if (r.spec.id == ModelId::Tyc0) {
    const double cap = r.config.bounds(r.params).mu_max;
    if (std::isfinite(cap))
      c["mu_max"] = cap;
    else
      c["mu_max"] = nullptr;
  }
  return c;
}

}  // namespace

detail::ordered_json detail::sweep_to_json(const SweepResult& r) {
  ordered_json j{{"model", std::string(model_name(r.spec.id))},
                 {"params", to_json(r.params)},
                 {"spec", to_json(r.spec)},
                 {"config", config_json(r)},
                 {"objective", r.objective},
                 {"cost_excluding_controls", r.cost_excluding_controls},
                 {"iterations", r.iterations},
                 {"converged", r.converged},
                 {"residual", r.residual}};
  if (!r.message.empty()) j["message"] = r.message;
  return j;
}

void write_sweep_json(std::ostream& out, const SweepResult& r) { out << detail::sweep_to_json(r).dump(2) << '\n'; }

void write_sweep_csv(std::ostream& out, const SweepResult& r) {
  write_trajectory_csv(out, r.states, &r.schedule, &r.adjoints);
}

}  // namespace tyc
