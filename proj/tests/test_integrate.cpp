#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "tyc/equilibria.hpp"
#include "tyc/errors.hpp"
#include "tyc/integrate.hpp"

using namespace tyc;

namespace {
const LifeParams kFitted{};
const double kPlus = 405.0 / 4 * (1 + std::sqrt(1 - 16 * 0.0648 / (0.0057 * 405)));
}  // namespace

TEST_CASE("time grid") {
  const TimeGrid g = TimeGrid::with_step(0, 200, 0.05);
  CHECK(g.n_steps == 4000);
  CHECK(g.time(g.n_steps) == doctest::Approx(200.0).epsilon(1e-15));
  CHECK(TimeGrid::with_step(0, 1, 0.3).n_steps == 3);
  CHECK_THROWS_AS((TimeGrid{0, 0, 10}.validate()), ValidationError);
  CHECK_THROWS_AS((TimeGrid{0, 1, 0}.validate()), ValidationError);
}

TEST_CASE("equilibrium start stays put") {
  const TimeGrid g{0, 200, 4000};
  for (ModelId id : {ModelId::Tyc0, ModelId::Fhms1, ModelId::Fhmh4}) {
    const auto tr = integrate_forward({id}, kFitted, {kPlus, kPlus, 0}, g);
    CHECK(tr.states.front().f == kPlus);
    for (const auto& s : tr.states) {
      CHECK(std::abs(s.f - kPlus) < 1e-8);
      CHECK(std::abs(s.m - kPlus) < 1e-8);
    }
  }
  // Harvesting equilibria located by the library.
  for (ModelId id : {ModelId::Fhms2, ModelId::Fhms3, ModelId::Fhmh5, ModelId::Fhmh6}) {
    const ModelSpec spec{id, 0, 0.02, 0.01};
    const auto eq = find_equilibria(spec, kFitted);
    for (const auto& p : eq.points) {
      const auto tr = integrate_forward(spec, kFitted, p.point, g);
      // Saddles amplify roundoff over T = 200, so this is relative.
      CHECK(std::abs(tr.states.back().f - p.point.f) < 1e-8 * std::max(1.0, p.point.f) * (p.hyperbolic ? 1e2 : 1));
      CHECK(std::abs(tr.states.back().m - p.point.m) < 1e-8 * std::max(1.0, p.point.m) * (p.hyperbolic ? 1e2 : 1));
    }
  }
}

TEST_CASE("supermale equation has the closed form s = c (1 - exp(-delta t))") {
  const double c = 37.0;
  const ModelSpec spec{ModelId::Tyc0, kFitted.delta * c};
  const TimeGrid g{0, 200, 4000};
  const auto tr = integrate_forward(spec, kFitted, {0, 0, 0}, g);
  for (int i = 0; i < g.size(); i += 97)
    CHECK(std::abs(tr.states[i].s - c * (1 - std::exp(-kFitted.delta * g.time(i)))) < 1e-6);
}

TEST_CASE("Allee threshold: small founder groups decline, larger ones establish") {
  const TimeGrid g{0, 200, 4000};
  const auto small = integrate_forward({ModelId::Tyc0}, kFitted, {15, 15, 0}, g);
  CHECK(small.states.back().f + small.states.back().m < 30.0);
  const auto large = integrate_forward({ModelId::Tyc0}, kFitted, {30, 30, 0}, g);
  CHECK(large.states.back().f + large.states.back().m == doctest::Approx(2 * kPlus).epsilon(1e-3));
}

TEST_CASE("matches an independent RK4 with constant controls") {
  const TimeGrid g{0, 50, 500};
  const ModelSpec spec{ModelId::Tyc0, 4.0};
  const auto tr = integrate_forward(spec, kFitted, {120, 90, 3}, g);
  const auto ref = oracle::rk4_endpoint(0, kFitted.beta, kFitted.delta, kFitted.cap_k, {120, 90, 3}, 4.0, 0, 0, 50, 500);
  CHECK(tr.states.back().f == doctest::Approx(ref[0]).epsilon(1e-12));
  CHECK(tr.states.back().m == doctest::Approx(ref[1]).epsilon(1e-12));
  CHECK(tr.states.back().s == doctest::Approx(ref[2]).epsilon(1e-12));
}

TEST_CASE("fourth-order convergence against a fine reference") {
  const ModelSpec spec{ModelId::Tyc0, 3.0};
  const State init{200, 60, 0};
  const auto ref = integrate_forward(spec, kFitted, init, TimeGrid{0, 40, 40 * 16 * 8}).states.back();
  double prev = 0.0;
  for (int n : {40 * 2, 40 * 4, 40 * 8}) {
    const auto end = integrate_forward(spec, kFitted, init, TimeGrid{0, 40, n}).states.back();
    const double err = std::abs(end.f - ref.f) + std::abs(end.m - ref.m);
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(16.0).epsilon(0.15));
    prev = err;
  }
}

TEST_CASE("deterministic") {
  const TimeGrid g{0, 100, 1000};
  const ModelSpec spec{ModelId::Fhmh6, 0, 0.01, 0.005};
  const auto a = integrate_forward(spec, kFitted, {100, 80, 0}, g);
  const auto b = integrate_forward(spec, kFitted, {100, 80, 0}, g);
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    CHECK(a.states[i].f == b.states[i].f);
    CHECK(a.states[i].m == b.states[i].m);
  }
}

TEST_CASE("guards") {
  const TimeGrid g{0, 200, 4000};
  SUBCASE("blow-up reports the last valid time") {
    try {
      (void)integrate_forward({ModelId::Tyc0, 1000.0}, kFitted, {0, 0, 0}, g);
      FAIL("expected BlowUpError");
    } catch (const BlowUpError& e) {
      CHECK(e.last_valid_time() > 0.0);
      CHECK(e.last_valid_time() < 200.0);
    }
  }
  SUBCASE("negative initial state") {
    CHECK_THROWS_AS(integrate_forward({ModelId::Tyc0}, kFitted, {-1, 1, 0}, g), NegativeStateError);
  }
  SUBCASE("harvesting models carry s = 0") {
    CHECK_THROWS_AS(integrate_forward({ModelId::Fhms1}, kFitted, {1, 1, 1}, g), ValidationError);
  }
  SUBCASE("overshoot far above capacity") {
    CHECK_THROWS_AS(integrate_forward({ModelId::Tyc0}, kFitted, {3000, 3000, 0}, TimeGrid{0, 10, 10}), Error);
  }
}

TEST_CASE("control schedule interpolation") {
  ControlSchedule s;
  s.grid = TimeGrid{0, 2, 2};
  s.nodes = {{0, 0, 0}, {2, 1, 0.5}, {4, 0, 1}};
  CHECK(s.at(0.5).mu == doctest::Approx(1.0));
  CHECK(s.at(1.5).eta1 == doctest::Approx(0.5));
  CHECK(s.at(2.0).eta2 == doctest::Approx(1.0));
}

TEST_CASE("adjoint: transversality, closed form, Hamiltonian derivative") {
  const TimeGrid g{0, 50, 1000};
  SUBCASE("zero terminal value for every model") {
    for (ModelId id : kAllModels) {
      const ModelSpec spec{id, 1.0, 0.2, 0.001};
      const auto tr = integrate_forward(spec, kFitted, {100, 100, 0}, g);
      const auto sched = ControlSchedule::constant(spec, g);
      const auto adj = integrate_adjoint_backward(spec, kFitted, tr, sched, g);
      for (double v : adj.lambda.back()) CHECK(v == 0.0);
    }
  }
  SUBCASE("zero state: lambda1,2 = (exp(delta (t - T)) - 1)/delta, lambda3 = 0") {
    const ModelSpec spec{ModelId::Tyc0};
    const auto tr = integrate_forward(spec, kFitted, {0, 0, 0}, g);
    const auto adj = integrate_adjoint_backward(spec, kFitted, tr, ControlSchedule::constant(spec, g), g);
    for (int i = 0; i < g.size(); i += 50) {
      const double expect = (std::exp(kFitted.delta * (g.time(i) - 50.0)) - 1.0) / kFitted.delta;
      CHECK(std::abs(adj.lambda[i][0] - expect) < 1e-6);
      CHECK(std::abs(adj.lambda[i][1] - expect) < 1e-6);
      CHECK(adj.lambda[i][2] == 0.0);
    }
  }
  SUBCASE("adjoint rhs equals -dH/dx by finite differences") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (int trial = 0; trial < 70; ++trial) {
      const int id = trial % 7;
      const ModelSpec spec{kAllModels[static_cast<std::size_t>(id)], 3 * u(rng), u(rng), 0.05 * u(rng), u(rng), u(rng)};
      const oracle::V3 x{300 * u(rng), 300 * u(rng), id == 0 ? 30 * u(rng) : 0.0};
      const Vec3 lam{-5 * u(rng), -5 * u(rng), 5 * u(rng)};
      const Controls c = spec.constant_controls();
      // H = -(f + m) - |u|^2/2 + lambda . F(x, u)
      auto hamiltonian = [&](const oracle::V3& y) {
        const auto fx = oracle::rhs(id, kFitted.beta, kFitted.delta, kFitted.cap_k, y, c.mu, c.eta1, c.eta2, spec.d1,
                                    spec.d2);
        return -(y[0] + y[1]) + lam[0] * fx[0] + lam[1] * fx[1] + lam[2] * fx[2];
      };
      const Vec3 got = adjoint_rhs(spec, kFitted, State::from_array(x), c, lam);
      for (int k = 0; k < state_dimension(spec.id); ++k) {
        oracle::V3 xp = x, xm = x;
        const double h = 1e-5 * std::max(1.0, x[k]);
        xp[k] += h;
        xm[k] -= h;
        const double dh = (hamiltonian(xp) - hamiltonian(xm)) / (2 * h);
        CHECK(std::abs(got[k] + dh) <= 1e-5 * std::max(1.0, std::abs(dh)));
      }
    }
  }
}

TEST_CASE("grid mismatch and CSV export") {
  const TimeGrid g{0, 10, 100};
  const ModelSpec spec{ModelId::Fhms1, 0, 0.1, 0.01};
  const auto tr = integrate_forward(spec, kFitted, {50, 50, 0}, g);
  CHECK_THROWS_AS(integrate_adjoint_backward(spec, kFitted, tr, ControlSchedule::constant(spec, g), TimeGrid{0, 10, 50}),
                  GridMismatchError);
  std::ostringstream os;
  const auto sched = ControlSchedule::constant(spec, g);
  write_trajectory_csv(os, tr, &sched);
  const std::string csv = os.str();
  CHECK(csv.rfind("t,f,m,s,eta1,eta2\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == g.size() + 1);
}
