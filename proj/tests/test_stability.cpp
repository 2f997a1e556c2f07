#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "tyc/errors.hpp"
#include "tyc/stability.hpp"

using namespace tyc;

namespace {

CharPoly boundary_poly(double d) { return {3, {d * d, 3 * d * d, 3 * d}}; }

double det3(const Mat3& a) {
  return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

}  // namespace

TEST_CASE("Routh-Hurwitz examples") {
  CHECK(routh_hurwitz(boundary_poly(0.5)).verdict == Verdict::Stable);
  CHECK(routh_hurwitz(boundary_poly(0.0648)).verdict == Verdict::Unstable);
  CHECK(routh_hurwitz(CharPoly{2, {0.0, 0.3, 0.0}}).verdict == Verdict::Marginal);
  CHECK(routh_hurwitz(CharPoly{2, {0.2, 0.3, 0.0}}).verdict == Verdict::Stable);
  CHECK(routh_hurwitz(CharPoly{2, {-0.2, 0.3, 0.0}}).verdict == Verdict::Unstable);
  const auto v = routh_hurwitz(boundary_poly(0.5));
  CHECK(v.criterion_trace.size() == 4);
}

TEST_CASE("closed-form boundary eigenvalues") {
  SUBCASE("delta = 0.5") {
    const auto e = boundary_eigenvalues({0.0057, 0.5, 405});
    CHECK(e[0].real() == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(e[1].real() == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK(e[2].real() == doctest::Approx(-0.25).epsilon(1e-12));
  }
  SUBCASE("delta = 1/9 sits on the switch") {
    const auto e = boundary_eigenvalues({0.0057, 1.0 / 9.0, 405});
    CHECK(std::abs(e[1].real()) < 1e-15);
  }
  SUBCASE("delta = 0.0648") {
    const auto e = boundary_eigenvalues({0.0057, 0.0648, 405});
    CHECK(e[1].real() == doctest::Approx(0.0140).epsilon(0.01));
  }
  SUBCASE("closed form solves its polynomial") {
    for (double d = 0.02; d < 0.95; d += 0.037) {
      const LifeParams p{0.0057, d, 405};
      const CharPoly poly = boundary_closed_form_polynomial(p);
      for (const auto& l : boundary_eigenvalues(p)) CHECK(std::abs(poly.evaluate(l)) < 1e-12);
    }
  }
}

TEST_CASE("model Jacobian at the boundary equilibrium") {
  const LifeParams p{0.0057, 0.0648, 405};
  const ModelSpec spec{ModelId::Tyc0, 2.0};
  const Jacobian j = jacobian(spec, p, {0, 0, 2.0 / p.delta});
  CHECK(j.a[2][2] == -p.delta);
  // Lower triangular there: the model's own spectrum is -delta three times.
  const auto roots = polynomial_roots(characteristic_polynomial(j));
  for (const auto& r : roots) CHECK(std::abs(r + p.delta) < 1e-4);
  CHECK(assess_point(spec, p, {0, 0, 2.0 / p.delta}).verdict == Verdict::Stable);
}

TEST_CASE("characteristic polynomial matches the determinant expansion") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 500; ++i) {
    Jacobian j;
    for (auto& row : j.a)
      for (auto& x : row) x = u(rng);
    const CharPoly c = characteristic_polynomial(j);
    const Mat3& a = j.a;
    const double tr = a[0][0] + a[1][1] + a[2][2];
    const double minors = a[0][0] * a[1][1] - a[0][1] * a[1][0] + a[0][0] * a[2][2] - a[0][2] * a[2][0] +
                          a[1][1] * a[2][2] - a[1][2] * a[2][1];
    CHECK(c.k[2] == doctest::Approx(-tr).epsilon(1e-10));
    CHECK(c.k[1] == doctest::Approx(minors).epsilon(1e-10));
    CHECK(c.k[0] == doctest::Approx(-det3(a)).epsilon(1e-10));

    // det(lambda I - A) at a probe point agrees with the polynomial.
    const double lam = u(rng);
    Mat3 m = a;
    for (int r = 0; r < 3; ++r)
      for (int col = 0; col < 3; ++col) m[r][col] = (r == col ? lam : 0.0) - a[r][col];
    CHECK(c.evaluate(lam) == doctest::Approx(std::abs(det3(m))).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("verdict agrees with eigenvalue signs on random polynomials") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int checked = 0;
  for (int i = 0; i < 3000; ++i) {
    const int deg = i % 2 ? 3 : 2;
    const CharPoly c{deg, {u(rng), u(rng), deg == 3 ? u(rng) : 0.0}};
    const auto v = routh_hurwitz(c);
    if (v.verdict == Verdict::Marginal || std::abs(v.max_real_part()) < 1e-7) continue;
    ++checked;
    CHECK((v.verdict == Verdict::Stable) == (v.max_real_part() < 0.0));
  }
  CHECK(checked > 2500);
}

TEST_CASE("global extinction conditions") {
  SUBCASE("Fhmh6 with beta K < 2 delta") {
    const auto g = global_extinction_condition({ModelId::Fhmh6}, {0.0002, 0.0648, 405});
    CHECK(g.satisfied);
    CHECK(g.lhs == doctest::Approx(0.081));
    CHECK(g.rhs == doctest::Approx(0.1296));
  }
  SUBCASE("Fhms1 at the fitted parameters") {
    const auto g = global_extinction_condition({ModelId::Fhms1}, {});
    CHECK_FALSE(g.satisfied);
    CHECK(g.lhs == doctest::Approx(2.3085));
  }
  SUBCASE("Fhms1 and Fhmh4 agree when uncontrolled") {
    for (double beta : {1e-5, 1e-4, 3e-4, 1e-3}) {
      const LifeParams p{beta, 0.0648, 405};
      CHECK(global_extinction_condition({ModelId::Fhms1}, p).satisfied ==
            global_extinction_condition({ModelId::Fhmh4}, p).satisfied);
    }
  }
  SUBCASE("side conditions for Models 2 and 3") {
    const LifeParams p{1e-5, 0.0648, 405};
    CHECK_FALSE(global_extinction_condition({ModelId::Fhms2, 0, 0, 0.07, 1, 1}, p).satisfied);
    CHECK_FALSE(global_extinction_condition({ModelId::Fhms3, 0, 0, 0.004, 1, 1}, p).satisfied);
    CHECK(global_extinction_condition({ModelId::Fhms3, 0, 0, 0.001, 1, 1}, p).satisfied);
  }
  CHECK_THROWS_AS(global_extinction_condition({ModelId::Tyc0}, {}), UnsupportedModelError);
}
