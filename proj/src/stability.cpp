#include "tyc/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tyc/errors.hpp"
#include "tyc/polynomial.hpp"

namespace tyc {

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Stable: return "stable";
    case Verdict::Unstable: return "unstable";
    case Verdict::Marginal: return "marginal";
  }
  return "?";
}

double CharPoly::evaluate(std::complex<double> lambda) const {
  std::complex<double> acc = 1.0;
  for (int i = degree - 1; i >= 0; --i) acc = acc * lambda + k[static_cast<std::size_t>(i)];
  return std::abs(acc);
}

double StabilityVerdict::max_real_part() const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& z : eigenvalues) best = std::max(best, z.real());
  return best;
}

Jacobian jacobian(const ModelSpec& spec, const LifeParams& params, const State& point) {
  if (harvest_shape(spec.id) == HarvestShape::Power && (point.f < 0.0 || point.m < 0.0))
    throw SingularDerivativeError("power harvesting has no derivative at negative densities");
  Jacobian j;
  j.dim = state_dimension(spec.id);
  j.a = state_jacobian(spec, params, point, spec.constant_controls());
  return j;
}

CharPoly characteristic_polynomial(const Jacobian& j) {
  const auto& a = j.a;
  CharPoly p;
  p.degree = j.dim;
  if (j.dim == 2) {
    p.k[1] = -(a[0][0] + a[1][1]);
    p.k[0] = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    return p;
  }
  const double trace = a[0][0] + a[1][1] + a[2][2];
  const double minors = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) + (a[0][0] * a[2][2] - a[0][2] * a[2][0]) +
                        (a[1][1] * a[2][2] - a[1][2] * a[2][1]);
  const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                     a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                     a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  p.k[2] = -trace;
  p.k[1] = minors;
  p.k[0] = -det;
  return p;
}

std::vector<std::complex<double>> polynomial_roots(const CharPoly& poly) {
  if (poly.degree == 2) {
    const auto r = poly::quadratic_roots(1.0, poly.k[1], poly.k[0]);
    return {r[0], r[1]};
  }
  const auto r = poly::cubic_roots(1.0, poly.k[2], poly.k[1], poly.k[0]);
  return {r[0], r[1], r[2]};
}

namespace {

double spectral_scale(const CharPoly& poly) {
  double rho = 0.0;
  for (int i = 1; i <= poly.degree; ++i) {
    const double coeff = poly.k[static_cast<std::size_t>(poly.degree - i)];
    rho = std::max(rho, std::pow(std::abs(coeff), 1.0 / i));
  }
  return rho;
}

}  // namespace

StabilityVerdict routh_hurwitz(const CharPoly& poly, double tol) {
  StabilityVerdict out;
  out.eigenvalues = polynomial_roots(poly);
  const double rho = spectral_scale(poly);
  out.scale = rho;
  if (rho == 0.0) {
    out.verdict = Verdict::Marginal;
    return out;
  }
  // Scaled coefficients: roots divided by rho.
  std::array<double, 3> c{};
  for (int j = 0; j < poly.degree; ++j)
    c[static_cast<std::size_t>(j)] = poly.k[static_cast<std::size_t>(j)] / std::pow(rho, poly.degree - j);

  auto check = [&](std::string name, double value) {
    CriterionCheck ck{std::move(name), value, value > tol, std::abs(value) <= tol};
    out.criterion_trace.push_back(ck);
  };
  if (poly.degree == 3) {
    check("k0", c[0]);
    check("k1", c[1]);
    check("k2", c[2]);
    check("k1*k2-k0", c[1] * c[2] - c[0]);
  } else {
    check("k0", c[0]);
    check("k1", c[1]);
  }
  const bool any_negative = std::any_of(out.criterion_trace.begin(), out.criterion_trace.end(),
                                        [](const CriterionCheck& ck) { return !ck.positive && !ck.marginal; });
  const bool any_marginal = std::any_of(out.criterion_trace.begin(), out.criterion_trace.end(),
                                        [](const CriterionCheck& ck) { return ck.marginal; });
  if (any_negative)
    out.verdict = Verdict::Unstable;
  else if (any_marginal)
    out.verdict = Verdict::Marginal;
  else
    out.verdict = Verdict::Stable;
  return out;
}

StabilityVerdict assess_point(const ModelSpec& spec, const LifeParams& params, const State& point) {
  return routh_hurwitz(characteristic_polynomial(jacobian(spec, params, point)));
}

std::array<std::complex<double>, 3> boundary_eigenvalues(const LifeParams& params) {
  const double d = params.delta;
  const double c = poly::real_cbrt(d * d * d - d * d);
  const double half_sqrt3 = std::sqrt(3.0) / 2.0;
  return {std::complex<double>(c - d, 0.0), std::complex<double>(-0.5 * c - d, half_sqrt3 * c),
          std::complex<double>(-0.5 * c - d, -half_sqrt3 * c)};
}

CharPoly boundary_closed_form_polynomial(const LifeParams& params) {
  const double d = params.delta;
  CharPoly p;
  p.degree = 3;
  p.k = {d * d, 3.0 * d * d, 3.0 * d};
  return p;
}

GlobalCondition global_extinction_condition(const ModelSpec& spec, const LifeParams& params) {
  const double bk = params.beta * params.cap_k;
  const double d = params.delta;
  const double k = params.cap_k;
  GlobalCondition g;
  g.lhs = bk;
  std::ostringstream os;
  switch (spec.id) {
    case ModelId::Tyc0:
      throw UnsupportedModelError("no global extinction condition is available for tyc0");
    case ModelId::Fhms1:
      g.rhs = 2.0 * d + spec.eta1 - spec.eta2;
      os << "beta*K < 2*delta + eta1 - eta2";
      break;
    case ModelId::Fhms2:
      g.rhs = 2.0 * d + spec.eta1 / (k + spec.d1) - spec.eta2 / spec.d2;
      g.has_side_condition = true;
      g.side_lhs = d;
      g.side_rhs = spec.eta2 / spec.d2;
      os << "beta*K < 2*delta + eta1/(K+d1) - eta2/d2 and delta > eta2/d2";
      break;
    case ModelId::Fhms3:
      g.rhs = 2.0 * d - spec.eta2 * std::sqrt(k);
      g.has_side_condition = true;
      g.side_lhs = d;
      g.side_rhs = spec.eta2 * std::sqrt(k);
      os << "beta*K < 2*delta - eta2*sqrt(K) and delta > eta2*sqrt(K)";
      break;
    case ModelId::Fhmh4:
      g.rhs = 2.0 * d + spec.eta1 + spec.eta2;
      os << "beta*K < 2*delta + eta1 + eta2";
      break;
    case ModelId::Fhmh5:
      g.rhs = 2.0 * d + spec.eta1 / (k + spec.d1) + spec.eta2 / (k + spec.d2);
      os << "beta*K < 2*delta + eta1/(K+d1) + eta2/(K+d2)";
      break;
    case ModelId::Fhmh6:
      g.rhs = 2.0 * d;
      os << "beta*K < 2*delta";
      break;
  }
  g.statement = os.str();
  // Strict inequalities throughout, including the side conditions.
  g.satisfied = g.lhs < g.rhs && (!g.has_side_condition || g.side_lhs > g.side_rhs);
  return g;
}

}  // namespace tyc
