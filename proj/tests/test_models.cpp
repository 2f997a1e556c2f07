#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tyc/errors.hpp"
#include "tyc/models.hpp"

using namespace tyc;

namespace {

const LifeParams kFitted{};

ModelSpec spec_for(int model, double mu, double eta1, double eta2, double d1 = 1.0, double d2 = 1.0) {
  return {kAllModels[static_cast<std::size_t>(model)], mu, eta1, eta2, d1, d2};
}

}  // namespace

TEST_CASE("logistic factor examples") {
  CHECK(logistic_factor({0, 0, 0}, kFitted) == 1.0);
  CHECK(logistic_factor({202.5, 202.5, 0}, kFitted) == 0.0);
  CHECK(logistic_factor({100, 100, 100}, kFitted) == doctest::Approx(1.0 - 300.0 / 405.0).epsilon(1e-15));
  // Unclamped above capacity.
  CHECK(logistic_factor({400, 400, 0}, kFitted) < 0.0);
}

TEST_CASE("rhs examples") {
  SUBCASE("only the source term survives at the origin") {
    const State r = rhs(spec_for(0, 10, 0, 0), kFitted, {0, 0, 0});
    CHECK(r.f == 0.0);
    CHECK(r.m == 0.0);
    CHECK(r.s == 10.0);
  }
  SUBCASE("boundary equilibrium (0, 0, mu/delta)") {
    for (double beta : {1e-4, 0.0057, 0.3}) {
      const LifeParams p{beta, 0.0648, 405};
      const State r = rhs(spec_for(0, 3.0, 0, 0), p, {0, 0, 3.0 / 0.0648});
      CHECK(std::abs(r.f) + std::abs(r.m) + std::abs(r.s) < 1e-14);
    }
  }
  SUBCASE("Fhmh4 uncontrolled at the plus branch") {
    const double k = kFitted.cap_k;
    const double fp = k / 4 * (1 + std::sqrt(1 - 16 * kFitted.delta / (kFitted.beta * k)));
    const State r = rhs(spec_for(4, 0, 0, 0), kFitted, {fp, fp, 0});
    CHECK(std::abs(r.f) < 1e-9);
    CHECK(std::abs(r.m) < 1e-9);
  }
  SUBCASE("origin is an equilibrium of every model") {
    for (int id = 0; id <= 6; ++id) {
      const State r = rhs(spec_for(id, 0, 0.3, 0.02), kFitted, {0, 0, 0});
      CHECK(r.f == 0.0);
      CHECK(r.m == 0.0);
      CHECK(r.s == 0.0);
    }
  }
}

TEST_CASE("rhs matches the transcribed equations on random states") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int id = trial % 7;
    const LifeParams p{1e-3 + 0.02 * u(rng), 0.01 + 0.5 * u(rng), 50 + 500 * u(rng)};
    const double mu = 20 * u(rng), e1 = u(rng), e2 = 0.5 * u(rng), d1 = 0.5 + 3 * u(rng), d2 = 0.5 + 3 * u(rng);
    const oracle::V3 x{p.cap_k * u(rng), p.cap_k * u(rng), id == 0 ? 50 * u(rng) : 0.0};
    const State r = rhs(spec_for(id, mu, e1, e2, d1, d2), p, {x[0], x[1], x[2]});
    const oracle::V3 o = oracle::rhs(id, p.beta, p.delta, p.cap_k, x, mu, e1, e2, d1, d2);
    CHECK(oracle::rel_err(r.f, o[0]) < 1e-12);
    CHECK(oracle::rel_err(r.m, o[1]) < 1e-12);
    CHECK(oracle::rel_err(r.s, o[2]) < 1e-12);
  }
}

TEST_CASE("FHMS/FHMH male-equation symmetry and Tyc0 reduction") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 400.0);
  for (int i = 0; i < 100; ++i) {
    const State x{u(rng), u(rng), 0.0};
    const double e1 = u(rng) / 400, e2 = u(rng) / 4000;
    const State stock = rhs(spec_for(1, 0, e1, e2), kFitted, x);
    const State harvest = rhs(spec_for(4, 0, e1, -e2), kFitted, x);
    CHECK(stock.m == doctest::Approx(harvest.m).epsilon(1e-14));
    CHECK(stock.f == harvest.f);

    const State tyc = rhs(spec_for(0, 0, 0, 0), kFitted, x);
    const State m1 = rhs(spec_for(1, 0, 0, 0), kFitted, x);
    CHECK(tyc.f == m1.f);
    CHECK(tyc.m == m1.m);
  }
}

TEST_CASE("negative states and controls are rejected") {
  CHECK_THROWS_AS(rhs(spec_for(0, 1, 0, 0), kFitted, {-1e-3, 1, 1}), NegativeStateError);
  CHECK_THROWS_AS(rhs(spec_for(3, 0, 1, 0), kFitted, {1, -2, 0}), NegativeStateError);
  CHECK_THROWS_AS(rhs(spec_for(1, 0, 0, 0), kFitted, {1, 1, 0}, Controls{0, -0.1, 0}), ValidationError);
}

TEST_CASE("analytic Jacobian and control sensitivity match finite differences") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int trial = 0; trial < 140; ++trial) {
    const int id = trial % 7;
    const ModelSpec spec = spec_for(id, 5 * u(rng), u(rng), 0.06 * u(rng), 2 * u(rng), 2 * u(rng));
    const oracle::V3 x{400 * u(rng), 400 * u(rng), id == 0 ? 40 * u(rng) : 0.0};
    const Controls c = spec.constant_controls();
    const Mat3 j = state_jacobian(spec, kFitted, State::from_array(x), c);
    auto field = [&](const oracle::V3& y) {
      const State r = rhs(spec, kFitted, State::from_array(y));
      return oracle::V3{r.f, r.m, r.s};
    };
    const int dim = state_dimension(spec.id);
    const auto fd = oracle::fd_jacobian(field, x, dim);
    for (int r = 0; r < dim; ++r)
      for (int col = 0; col < dim; ++col)
        CHECK(std::abs(j[r][col] - fd[r][col]) <= 1e-5 * std::max(1.0, std::abs(fd[r][col])));

    for (int ch = 0; ch < control_channels(spec.id); ++ch) {
      const Vec3 sens = control_sensitivity(spec, State::from_array(x), ch);
      const double h = 1e-6;
      Controls up = c, dn = c;
      up.set_channel(spec.id, ch, c.channel(spec.id, ch) + h);
      dn.set_channel(spec.id, ch, c.channel(spec.id, ch) + 2 * h);  // stays nonnegative; forward pair
      const State a = rhs(spec, kFitted, State::from_array(x), up);
      const State b = rhs(spec, kFitted, State::from_array(x), dn);
      const Vec3 d{(b.f - a.f) / h, (b.m - a.m) / h, (b.s - a.s) / h};
      for (int r = 0; r < 3; ++r) CHECK(std::abs(sens[r] - d[r]) <= 1e-5 * std::max(1.0, std::abs(d[r])));
    }
  }
}

TEST_CASE("model names round-trip") {
  for (ModelId id : kAllModels) {
    CHECK(parse_model_id(model_name(id)) == id);
    CHECK(parse_model_id(std::to_string(model_number(id))) == id);
  }
  CHECK_FALSE(parse_model_id("fhms7").has_value());
}

TEST_CASE("parameter and spec validation") {
  CHECK_NOTHROW(kFitted.validate());
  CHECK_THROWS_AS((LifeParams{0.0, 0.1, 10}.validate()), ValidationError);
  CHECK_THROWS_AS((LifeParams{0.1, 1.0, 10}.validate()), ValidationError);
  CHECK_THROWS_AS((LifeParams{0.1, 0.1, 0}.validate()), ValidationError);
  CHECK_THROWS((spec_for(1, 0, 0.1, 0.07).validate(kFitted)));  // stocking needs delta > eta2
  CHECK_NOTHROW(spec_for(4, 0, 0.1, 0.07).validate(kFitted));
  CHECK_THROWS((spec_for(2, 0, 0.1, 0.01, 0.0, 1.0).validate(kFitted)));
}
