#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "tyc/control.hpp"
#include "tyc/errors.hpp"

using namespace tyc;

namespace {
const LifeParams kFitted{};
const double kPlus = 405.0 / 4 * (1 + std::sqrt(1 - 16 * 0.0648 / (0.0057 * 405)));
const State kEq{kPlus, kPlus, 0};
}  // namespace

TEST_CASE("projection examples") {
  const ControlBounds b{405.0, 1.0};
  CHECK(project_control({ModelId::Fhms1}, {100, 100, 0}, {0, 0, 0}, b).eta1 == 0.0);
  CHECK(project_control({ModelId::Fhms1}, {100, 100, 0}, {-0.02, 0, 0}, b).eta1 == 1.0);
  CHECK(project_control({ModelId::Fhms1}, {100, 100, 0}, {-0.002, 0, 0}, b).eta1 == doctest::Approx(0.2));
  CHECK(project_control({ModelId::Tyc0}, {1, 1, 1}, {0, 0, -5}, b).mu == 0.0);
  CHECK(project_control({ModelId::Tyc0}, {1, 1, 1}, {0, 0, 7}, b).mu == 7.0);
  CHECK(project_control({ModelId::Tyc0}, {1, 1, 1}, {0, 0, 700}, b).mu == 405.0);
  // Stocking follows +G2 lambda2, harvesting -G2 lambda2.
  CHECK(project_control({ModelId::Fhms1}, {10, 10, 0}, {0, 0.01, 0}, b).eta2 == doctest::Approx(0.1));
  CHECK(project_control({ModelId::Fhmh4}, {10, 10, 0}, {0, -0.01, 0}, b).eta2 == doctest::Approx(0.1));
  CHECK(project_control({ModelId::Fhms2, 0, 0, 0, 1, 3}, {4, 3, 0}, {-0.5, 0.5, 0}, b).eta1 ==
        doctest::Approx(0.4));
  CHECK(project_control({ModelId::Fhmh6}, {4, 9, 0}, {-0.01, -0.01, 0}, b).eta2 == doctest::Approx(0.27));
}

TEST_CASE("discrete gradient matches finite differences of the discrete objective") {
  const TimeGrid g{0, 5, 50};
  for (ModelId id : kAllModels) {
    const ModelSpec spec{id, 2.0, 0.3, 0.02};
    ControlSchedule sched = ControlSchedule::constant(spec, g);
    for (int n = 0; n < g.size(); ++n) {
      const double w = 1.0 + 0.5 * std::sin(0.7 * n);
      sched.nodes[n] = {spec.mu * w, spec.eta1 * w, spec.eta2 * w};
    }
    const State init = id == ModelId::Tyc0 ? State{150, 140, 5} : State{150, 140, 0};
    const auto traj = integrate_forward(spec, kFitted, init, sched);
    const auto grad = discrete_gradient(spec, kFitted, traj, sched);
    auto objective = [&](const ControlSchedule& s) {
      return objective_terms(integrate_forward(spec, kFitted, init, s), s).objective;
    };
    for (int n : {0, 7, 25, 49, 50}) {
      for (int k = 0; k < control_channels(id); ++k) {
        const double h = 1e-5;
        ControlSchedule up = sched, dn = sched;
        up.nodes[n].set_channel(id, k, sched.nodes[n].channel(id, k) + h);
        dn.nodes[n].set_channel(id, k, sched.nodes[n].channel(id, k) - h);
        const double fd = (objective(up) - objective(dn)) / (2 * h);
        const double an = grad[n].channel(id, k);
        CHECK(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST_CASE("objective terms use the trapezoid rule") {
  ControlSchedule s;
  s.grid = TimeGrid{0, 2, 2};
  s.nodes = {{2, 0, 0}, {2, 0, 0}, {2, 0, 0}};
  Trajectory tr;
  tr.grid = s.grid;
  tr.states = {{1, 1, 0}, {2, 2, 0}, {3, 3, 0}};
  const auto t = objective_terms(tr, s);
  CHECK(t.cost_excluding_controls == doctest::Approx(8.0));
  CHECK(t.control_energy == doctest::Approx(4.0));
  CHECK(t.objective == doctest::Approx(12.0));
}

TEST_CASE("sweep invariants on a short horizon") {
  const TimeGrid g = TimeGrid::with_step(0, 30, kDefaultStep);
  for (ModelId id : kAllModels) {
    const ModelSpec spec{id};
    const auto r = forward_backward_sweep(spec, kFitted, kEq, g);
    CAPTURE(model_name(id));
    CHECK(r.converged);
    CHECK(r.residual < r.config.tol);
    const ControlBounds b = r.config.bounds(kFitted);
    for (const auto& u : r.schedule.nodes) {
      for (int k = 0; k < control_channels(id); ++k) {
        const double ub = id == ModelId::Tyc0 ? b.mu_max : b.eta_max;
        CHECK(u.channel(id, k) >= 0.0);
        CHECK(u.channel(id, k) <= ub);
      }
    }
    // Re-integrating the returned controls reproduces J.
    const auto again = integrate_forward(spec, kFitted, kEq, r.schedule);
    const auto terms = objective_terms(again, r.schedule);
    CHECK(terms.objective == doctest::Approx(r.objective).epsilon(1e-8));
    CHECK(terms.cost_excluding_controls == doctest::Approx(r.cost_excluding_controls).epsilon(1e-8));
    CHECK(terms.objective == doctest::Approx(terms.cost_excluding_controls + terms.control_energy).epsilon(1e-12));
    // The sweep starts from u = 0, so it can only improve on doing nothing.
    const auto idle = integrate_forward(spec, kFitted, kEq, g);
    CHECK(r.objective <= objective_terms(idle, ControlSchedule::constant(spec, g)).objective);
  }
}

TEST_CASE("objective does not increase as iterations are added") {
  const TimeGrid g = TimeGrid::with_step(0, 40, 0.1);
  SweepConfig c;
  double prev = std::numeric_limits<double>::infinity();
  for (int iters = 1; iters <= 12; ++iters) {
    c.max_iters = iters;
    const auto r = forward_backward_sweep({ModelId::Fhms1}, kFitted, kEq, g, c);
    CHECK(r.objective <= prev + 1e-9 * std::abs(prev));
    prev = r.objective;
  }
}

TEST_CASE("short horizon: Tyc0 control stays near zero") {
  const auto r = forward_backward_sweep({ModelId::Tyc0}, kFitted, kEq, TimeGrid{0, 0.1, 20});
  double peak = 0.0;
  for (const auto& u : r.schedule.nodes) peak = std::max(peak, u.mu);
  CHECK(peak < 1e-2);
  // lambda3(T) = 0; the discrete gradient at the last node is O(dt).
  CHECK(r.schedule.nodes.back().mu < 1e-4);
}

TEST_CASE("optimality residual separates optimal from arbitrary controls") {
  const TimeGrid g = TimeGrid::with_step(0, 30, 0.1);
  SweepConfig c;
  c.tol = 1e-7;
  const ModelSpec spec{ModelId::Fhmh4};
  const auto r = forward_backward_sweep(spec, kFitted, kEq, g, c);
  REQUIRE(r.converged);
  const auto ok = optimality_residual(r);
  CHECK(ok.stationarity < 1e-3);
  CHECK(ok.min_fd_change > -1e-6);
  CHECK(ok.directions == 20);

  SweepResult bad = r;
  bad.schedule = ControlSchedule::constant({ModelId::Fhmh4, 0, 0.3, 0.3}, g);
  bad.states = integrate_forward(spec, kFitted, kEq, bad.schedule);
  bad.objective = objective_terms(bad.states, bad.schedule).objective;
  const auto poor = optimality_residual(bad);
  CHECK(poor.stationarity > 100 * ok.stationarity);
  CHECK(poor.stationarity > 1e-2);
}

TEST_CASE("sweep configuration validation") {
  SweepConfig c;
  CHECK_NOTHROW(c.validate());
  c.omega = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.tol = -1;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.max_iters = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  CHECK(c.bounds(kFitted).mu_max == 405.0);
  c.cap_mu = false;
  CHECK(std::isinf(c.bounds(kFitted).mu_max));
  c.cap_mu = true;
  c.mu_max = 50.0;
  CHECK(c.bounds(kFitted).mu_max == 50.0);
}

TEST_CASE("sweep export") {
  const auto r = forward_backward_sweep({ModelId::Fhms1}, kFitted, kEq, TimeGrid{0, 5, 50});
  std::ostringstream js, csv;
  write_sweep_json(js, r);
  write_sweep_csv(csv, r);
  for (const char* key : {"\"model\"", "\"params\"", "\"config\"", "\"objective\"", "\"cost_excluding_controls\"",
                          "\"iterations\"", "\"converged\"", "\"residual\""})
    CHECK(js.str().find(key) != std::string::npos);
  CHECK(csv.str().rfind("t,f,m,s,eta1,eta2,lambda1,lambda2", 0) == 0);
}

TEST_CASE("coarse steps stall the power-law sweep with a diagnostic") {
  // eta1 f^{3/2} at f ~ 176 makes dt = 0.1 close to the RK4 stability limit.
  const auto r = forward_backward_sweep({ModelId::Fhms3}, kFitted, kEq, TimeGrid::with_step(0, 30, 0.1));
  CHECK_FALSE(r.converged);
  CHECK(r.message.find("no relaxation step") != std::string::npos);
  INFO(r.message);
  CHECK(r.objective < objective_terms(integrate_forward({ModelId::Fhms3}, kFitted, kEq, TimeGrid::with_step(0, 30, 0.1)),
                                      ControlSchedule::constant({ModelId::Fhms3}, TimeGrid::with_step(0, 30, 0.1)))
                          .objective);
}
