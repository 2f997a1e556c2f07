#include "tyc/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "tyc/errors.hpp"
#include "tyc/polynomial.hpp"

namespace tyc {

const char* to_string(PositiveRoots p) noexcept {
  return p == PositiveRoots::TwoPositive ? "two-positive" : "no-positive";
}

const char* to_string(Classification c) noexcept {
  switch (c) {
    case Classification::Stable: return "stable";
    case Classification::Unstable: return "unstable";
    case Classification::NonHyperbolic: return "non-hyperbolic";
  }
  return "?";
}

double CubicCoefficients::discriminant() const noexcept {
  return b * b * c * c - 4.0 * a * c * c * c - 4.0 * b * b * b * d - 27.0 * a * a * d * d + 18.0 * a * b * c * d;
}

double CubicCoefficients::discriminant_scale() const noexcept {
  return std::abs(b * b * c * c) + std::abs(4.0 * a * c * c * c) + std::abs(4.0 * b * b * b * d) +
         std::abs(27.0 * a * a * d * d) + std::abs(18.0 * a * b * c * d);
}

double rhs_residual(const ModelSpec& spec, const LifeParams& params, const State& point) {
  const State r = rhs(spec, params, point);
  return std::max({std::abs(r.f), std::abs(r.m), std::abs(r.s)});
}

namespace {

bool near_equal(double x, double y) {
  return std::abs(x - y) <= kThresholdTolerance * std::max(std::abs(x), std::abs(y));
}

Classification from_verdict(Verdict v) {
  switch (v) {
    case Verdict::Stable: return Classification::Stable;
    case Verdict::Unstable: return Classification::Unstable;
    case Verdict::Marginal: return Classification::NonHyperbolic;
  }
  return Classification::NonHyperbolic;
}

EquilibriumPoint make_point(const ModelSpec& spec, const LifeParams& params, const State& x, std::string provenance,
                            std::optional<Classification> theory = std::nullopt) {
  EquilibriumPoint p;
  p.point = x;
  p.provenance = std::move(provenance);
  p.verdict = assess_point(spec, params, x);
  p.hyperbolic = p.verdict.verdict != Verdict::Marginal;
  p.classification = theory ? *theory : from_verdict(p.verdict.verdict);
  p.residual = rhs_residual(spec, params, x);
  return p;
}

void note_disagreements(EquilibriumReport& report) {
  for (const auto& p : report.points) {
    if (!p.hyperbolic) continue;
    const Classification computed = from_verdict(p.verdict.verdict);
    if (computed != p.classification) {
      std::ostringstream os;
      os << p.provenance << ": case analysis says " << to_string(p.classification)
         << " but the Routh-Hurwitz test on the Jacobian says " << to_string(computed);
      report.warnings.push_back(os.str());
    }
  }
}

ModelSpec with_id(ModelSpec spec, ModelId id) {
  spec.id = id;
  return spec;
}

}  // namespace

CubicCoefficients tyc_cubic(const LifeParams& params, double mu) {
  if (!(mu > 0.0)) throw ParameterError("tyc_cubic requires mu > 0");
  const double beta = params.beta;
  const double delta = params.delta;
  const double k = params.cap_k;
  const double s = mu / delta;
  CubicCoefficients c;
  c.s_star = s;
  c.a = 2.0 * beta;
  c.b = 3.0 * beta * s - k * beta;
  c.c = 2.0 * beta * s * s + 2.0 * k * delta - 2.0 * k * beta * s;
  c.d = 4.0 * k * delta * s;
  return c;
}

ThresholdSet tyc_thresholds(const LifeParams& params) {
  const double k = params.cap_k;
  ThresholdSet t;
  t.alpha = k * params.beta / params.delta;
  t.s_b = k / 3.0;
  const double inner = k * k / 4.0 - k * params.delta / params.beta;
  if (inner >= 0.0) {
    t.has_c_roots = true;
    const double root = std::sqrt(inner);
    t.s_c_plus = k / 2.0 + root;
    // Product of the roots is K delta / beta.
    t.s_c_minus = (k * params.delta / params.beta) / t.s_c_plus;
  }
  return t;
}

RootClassification classify_positive_roots(const CubicCoefficients& coeffs, const ThresholdSet& thresholds,
                                           double s_star) {
  RootClassification out;
  out.discriminant = coeffs.discriminant();
  const double scale = std::max(coeffs.discriminant_scale(), 1e-300);
  out.knife_edge = std::abs(out.discriminant) <= kThresholdTolerance * scale;

  const double coeff_scale = std::max({std::abs(coeffs.a), std::abs(coeffs.b), std::abs(coeffs.c), std::abs(coeffs.d)});
  if (std::abs(coeffs.d) <= kThresholdTolerance * coeff_scale && std::abs(coeffs.c) <= kThresholdTolerance * coeff_scale)
    throw DegenerateError("cubic has a repeated root at m = 0");

  // Sign of b and c from the position of s* relative to the thresholds.
  auto sign_about = [](double s, double root) {
    if (near_equal(s, root)) return 0;
    return s < root ? -1 : 1;
  };
  const int b_sign = sign_about(s_star, thresholds.s_b);  // b = 3 beta (s* - K/3)
  int c_sign = 1;
  if (thresholds.has_c_roots) {
    const int lo = sign_about(s_star, thresholds.s_c_minus);
    const int hi = sign_about(s_star, thresholds.s_c_plus);
    if (lo == 0 || hi == 0)
      c_sign = 0;
    else if (lo > 0 && hi < 0)
      c_sign = -1;
  }

  // Descartes: a > 0 and d > 0 bracket the pattern.
  std::vector<int> signs{1};
  if (b_sign != 0) signs.push_back(b_sign);
  if (c_sign != 0) signs.push_back(c_sign);
  signs.push_back(coeffs.d > 0.0 ? 1 : -1);
  for (std::size_t i = 1; i < signs.size(); ++i)
    if (signs[i] != signs[i - 1]) ++out.sign_changes;

  if (out.discriminant < 0.0 && !out.knife_edge) {
    // One real root whose product with |z|^2 is -d/a < 0: it is negative.
    out.kind = PositiveRoots::NoPositive;
  } else {
    // All roots real: the Descartes count is exact.
    out.kind = out.sign_changes >= 2 ? PositiveRoots::TwoPositive : PositiveRoots::NoPositive;
  }

  const auto roots = poly::cubic_roots(coeffs.a, coeffs.b, coeffs.c, coeffs.d);
  double root_scale = 0.0;
  for (const auto& z : roots) root_scale = std::max(root_scale, std::abs(z));
  for (const auto& z : roots)
    if (std::abs(z.imag()) <= 1e-7 * std::max(1.0, root_scale) && z.real() > 0.0) ++out.numeric_positive;
  return out;
}

EquilibriumReport tyc_mu0_equilibria(const LifeParams& params) {
  params.validate();
  const ModelSpec spec{ModelId::Tyc0};
  EquilibriumReport report;
  report.model = ModelId::Tyc0;
  const double k = params.cap_k;
  const double bk = params.beta * k;
  const double sixteen_delta = 16.0 * params.delta;
  report.points.push_back(make_point(spec, params, {}, "origin", Classification::Stable));
  if (near_equal(bk, sixteen_delta)) {
    auto p = make_point(spec, params, {k / 4.0, k / 4.0, 0.0}, "tangent branch 16*delta = beta*K",
                        Classification::Unstable);
    p.hyperbolic = false;
    report.points.push_back(p);
  } else if (sixteen_delta < bk) {
    const double root = std::sqrt(1.0 - sixteen_delta / bk);
    const double plus = k / 4.0 * (1.0 + root);
    // f+ f- = K delta / beta; avoids cancellation in the minus branch.
    const double minus = (k * params.delta / params.beta) / plus;
    report.points.push_back(make_point(spec, params, {plus, plus, 0.0}, "plus branch", Classification::Stable));
    report.points.push_back(make_point(spec, params, {minus, minus, 0.0}, "minus branch", Classification::Unstable));
  }
  note_disagreements(report);
  return report;
}

namespace {

// Interior equilibria of the linear two-sex model
//   f' = births - (delta + a) f,   m' = births - (delta - b) m,
// with a = eta1 and b = +eta2 (stocking) or -eta2 (harvesting):
// m = (delta + a)/(delta - b) f and
// f = (K beta +/- sqrt(K beta (K beta - 8 (2 delta + a - b)))) (delta - b) / (2 beta (2 delta + a - b)).
struct LinearBranches {
  bool tangent = false;
  int count = 0;
  State plus;
  State minus;
};

LinearBranches linear_branches(const LifeParams& params, double a, double b) {
  const double beta = params.beta;
  const double delta = params.delta;
  const double bk = beta * params.cap_k;
  const double sum = 2.0 * delta + a - b;
  const double threshold = 8.0 * sum;
  LinearBranches out;
  if (near_equal(bk, threshold)) {
    out.tangent = true;
    out.count = 1;
    out.plus = {bk * (delta - b) / (2.0 * beta * sum), bk * (delta + a) / (2.0 * beta * sum), 0.0};
    return out;
  }
  if (bk < threshold) return out;
  const double root = std::sqrt(bk * (bk - threshold));
  out.count = 2;
  out.plus = {(bk + root) * (delta - b) / (2.0 * beta * sum), (bk + root) * (delta + a) / (2.0 * beta * sum), 0.0};
  out.minus = {(bk - root) * (delta - b) / (2.0 * beta * sum), (bk - root) * (delta + a) / (2.0 * beta * sum), 0.0};
  return out;
}

}  // namespace

EquilibriumReport fhms_equilibria(const LifeParams& params, const ModelSpec& spec_in) {
  params.validate();
  const ModelSpec spec = with_id(spec_in, ModelId::Fhms1);
  if (spec.eta1 < 0.0 || spec.eta2 < 0.0) throw ParameterError("eta1 and eta2 must be nonnegative");
  if (spec.eta2 > 0.0 && !(params.delta > spec.eta2))
    throw ParameterError("male stocking requires delta > eta2");

  EquilibriumReport report;
  report.model = ModelId::Fhms1;
  report.points.push_back(make_point(spec, params, {}, "origin", Classification::Stable));

  const double beta = params.beta;
  const double delta = params.delta;
  const double bk = beta * params.cap_k;
  const double eta1 = spec.eta1;
  const double eta2 = spec.eta2;

  if (eta1 == 0.0 && eta2 == 0.0) {
    // Same interior points as Tyc0 with mu = 0.
    const auto base = tyc_mu0_equilibria(params);
    for (std::size_t i = 1; i < base.points.size(); ++i) {
      auto p = make_point(spec, params, base.points[i].point, base.points[i].provenance,
                          base.points[i].classification);
      p.hyperbolic = base.points[i].hyperbolic;
      report.points.push_back(p);
    }
  } else if (eta2 == 0.0) {
    // Case 1: eta1 > 0, eta2 = 0.
    const double threshold = 8.0 * (2.0 * delta + eta1);
    if (near_equal(bk, threshold)) {
      auto p = make_point(spec, params, {4.0 * delta / beta, 4.0 * (delta + eta1) / beta, 0.0},
                          "case 1 tangent beta*K = 8(2 delta + eta1)", Classification::Unstable);
      p.hyperbolic = false;
      report.points.push_back(p);
    } else if (bk > threshold) {
      const double root = std::sqrt(bk * (bk - 16.0 * delta - 8.0 * eta1));
      const double denom = 2.0 * (2.0 * delta + eta1) * beta;
      const State plus{(bk + root) * delta / denom, (delta + eta1) * (bk + root) / denom, 0.0};
      const State minus{(bk - root) * delta / denom, (delta + eta1) * (bk - root) / denom, 0.0};
      report.points.push_back(make_point(spec, params, plus, "case 1 plus branch", Classification::Stable));
      report.points.push_back(make_point(spec, params, minus, "case 1 minus branch", Classification::Unstable));
    }
  } else if (eta1 == 0.0) {
    // Case 2: eta1 = 0, eta2 > 0.
    const double threshold = 8.0 * (2.0 * delta - eta2);
    if (near_equal(bk, threshold)) {
      auto p = make_point(spec, params, {4.0 * (delta - eta2) / beta, 4.0 * delta / beta, 0.0},
                          "case 2 tangent beta*K = 8(2 delta - eta2)", Classification::Stable);
      p.hyperbolic = false;
      report.points.push_back(p);
    } else if (bk > threshold) {
      const double root = std::sqrt(bk * (bk - 16.0 * delta + 8.0 * eta2));
      const double m_denom = 2.0 * (2.0 * delta - eta2) * beta;
      // The female coordinate is printed with 2(2 delta + eta1) beta in the
      // denominator, which with eta1 = 0 disagrees with m* = delta/(delta - eta2) f*.
      // Both are evaluated and the one that zeroes the right-hand side is kept.
      const double f_denom_printed = 2.0 * (2.0 * delta + eta1) * beta;
      const double f_denom_alt = m_denom;
      for (int branch : {+1, -1}) {
        const double top = bk + branch * root;
        const State printed{(delta - eta2) * top / f_denom_printed, top * delta / m_denom, 0.0};
        const State alt{(delta - eta2) * top / f_denom_alt, top * delta / m_denom, 0.0};
        const double r_printed = rhs_residual(spec, params, printed);
        const double r_alt = rhs_residual(spec, params, alt);
        const bool use_printed = r_printed <= r_alt;
        const std::string name = branch > 0 ? "case 2 plus branch" : "case 2 minus branch";
        report.points.push_back(make_point(spec, params, use_printed ? printed : alt, name,
                                           branch > 0 ? Classification::Stable : Classification::Unstable));
        if (!use_printed) {
          std::ostringstream os;
          os << name << ": the female coordinate with denominator 2(2 delta + eta1) beta leaves a residual of "
             << r_printed << "; the denominator 2(2 delta - eta2) beta was used instead (residual " << r_alt << ")";
          report.warnings.push_back(os.str());
        }
      }
    }
  } else {
    // Case 3: both positive.
    const auto br = linear_branches(params, eta1, eta2);
    if (br.tangent) {
      auto p = make_point(spec, params, br.plus, "case 3 tangent beta*K = 8(2 delta + eta1 - eta2)",
                          Classification::Unstable);
      p.hyperbolic = false;
      report.points.push_back(p);
    } else if (br.count == 2) {
      report.points.push_back(make_point(spec, params, br.plus, "case 3 plus branch", Classification::Stable));
      report.points.push_back(make_point(spec, params, br.minus, "case 3 minus branch", Classification::Unstable));
    }
  }
  note_disagreements(report);
  return report;
}

namespace {

EquilibriumReport tyc_positive_mu(const ModelSpec& spec, const LifeParams& params) {
  EquilibriumReport report;
  report.model = ModelId::Tyc0;
  const double s_star = spec.mu / params.delta;
  report.points.push_back(make_point(spec, params, {0.0, 0.0, s_star}, "boundary (0, 0, mu/delta)"));

  const auto coeffs = tyc_cubic(params, spec.mu);
  const auto cls = classify_positive_roots(coeffs, tyc_thresholds(params), s_star);
  if (cls.kind == PositiveRoots::TwoPositive && cls.numeric_positive < 2 && !cls.knife_edge)
    report.warnings.push_back("sign-pattern count and numeric root count disagree");

  const auto roots = poly::cubic_roots(coeffs.a, coeffs.b, coeffs.c, coeffs.d);
  double root_scale = 0.0;
  for (const auto& z : roots) root_scale = std::max(root_scale, std::abs(z));
  std::vector<double> males;
  for (const auto& z : roots) {
    if (std::abs(z.imag()) > 1e-7 * std::max(1.0, root_scale) || !(z.real() > 0.0)) continue;
    const double m = z.real();
    if (std::none_of(males.begin(), males.end(), [&](double o) { return std::abs(o - m) <= 1e-7 * std::max(1.0, m); }))
      males.push_back(m);
  }
  std::sort(males.begin(), males.end());
  for (double m : males) {
    // From dm/dt = 0 with (1/2) m beta L = delta: f = m^2 / (m + 2 s*).
    const double f = m * m / (m + 2.0 * s_star);
    if (!(f > 0.0)) continue;
    auto p = make_point(spec, params, {f, m, s_star}, males.size() == 1 && cls.knife_edge
                                                            ? "interior (repeated cubic root)"
                                                            : "interior cubic root");
    report.points.push_back(p);
  }
  return report;
}

// Damped Newton on (f', m') = 0 from a grid of interior starts.
std::vector<State> newton_interior(const ModelSpec& spec, const LifeParams& params) {
  const double k = params.cap_k;
  std::vector<double> seeds;
  for (int i = 0; i < 12; ++i) seeds.push_back(k * (i + 0.5) / 12.0);
  for (int i = 0; i < 8; ++i) seeds.push_back(k * std::pow(10.0, -4.0 + 0.5 * i));
  const double tol = 1e-13 * std::max(1.0, params.delta * k);
  std::vector<State> found;
  const Controls u = spec.constant_controls();
  for (double f0 : seeds) {
    for (double m0 : seeds) {
      double f = f0;
      double m = m0;
      bool ok = false;
      for (int it = 0; it < 80; ++it) {
        const State r = rhs(spec, params, {f, m, 0.0});
        if (std::max(std::abs(r.f), std::abs(r.m)) <= tol) {
          ok = true;
          break;
        }
        const Mat3 j = state_jacobian(spec, params, {f, m, 0.0}, u);
        const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if (det == 0.0 || !std::isfinite(det)) break;
        const double df = -(j[1][1] * r.f - j[0][1] * r.m) / det;
        const double dm = -(-j[1][0] * r.f + j[0][0] * r.m) / det;
        double step = 1.0;
        while (step > 1e-12 && (f + step * df <= 0.0 || m + step * dm <= 0.0)) step *= 0.5;
        if (step <= 1e-12) break;
        f += step * df;
        m += step * dm;
        if (!std::isfinite(f) || !std::isfinite(m) || f > 100.0 * k || m > 100.0 * k) break;
      }
      if (!ok || !(f > 0.0) || !(m > 0.0)) continue;
      const bool dup = std::any_of(found.begin(), found.end(), [&](const State& o) {
        return std::abs(o.f - f) <= 1e-7 * std::max(1.0, f) && std::abs(o.m - m) <= 1e-7 * std::max(1.0, m);
      });
      if (!dup) found.push_back({f, m, 0.0});
    }
  }
  std::sort(found.begin(), found.end(), [](const State& a, const State& b) { return a.f + a.m > b.f + b.m; });
  return found;
}

EquilibriumReport harvesting_equilibria(const ModelSpec& spec, const LifeParams& params) {
  EquilibriumReport report;
  report.model = spec.id;
  report.points.push_back(make_point(spec, params, {}, "origin"));

  // f = 0 forces dm/dt = -delta m + sign * eta2 G2(m).
  if (male_sign(spec.id) > 0 && spec.eta2 > 0.0) {
    std::optional<double> m_boundary;
    if (harvest_shape(spec.id) == HarvestShape::Saturating && spec.eta2 / spec.d2 > params.delta)
      m_boundary = spec.eta2 / params.delta - spec.d2;
    if (harvest_shape(spec.id) == HarvestShape::Power)
      m_boundary = (params.delta / spec.eta2) * (params.delta / spec.eta2);
    if (m_boundary) report.points.push_back(make_point(spec, params, {0.0, *m_boundary, 0.0}, "boundary f = 0"));
  }

  if (harvest_shape(spec.id) == HarvestShape::Linear) {
    const double b = male_sign(spec.id) * spec.eta2;
    const auto br = linear_branches(params, spec.eta1, b);
    if (br.tangent) {
      auto p = make_point(spec, params, br.plus, "tangent branch");
      report.points.push_back(p);
    } else if (br.count == 2) {
      report.points.push_back(make_point(spec, params, br.plus, "plus branch"));
      report.points.push_back(make_point(spec, params, br.minus, "minus branch"));
    }
    return report;
  }
  for (const State& x : newton_interior(spec, params)) report.points.push_back(make_point(spec, params, x, "interior (Newton)"));
  return report;
}

}  // namespace

EquilibriumReport find_equilibria(const ModelSpec& spec, const LifeParams& params) {
  params.validate();
  spec.validate(params);
  switch (spec.id) {
    case ModelId::Tyc0:
      if (spec.mu > 0.0) return tyc_positive_mu(spec, params);
      return tyc_mu0_equilibria(params);
    case ModelId::Fhms1: return fhms_equilibria(params, spec);
    default: return harvesting_equilibria(spec, params);
  }
}

}  // namespace tyc
