#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "tyc/models.hpp"

namespace tyc {

/// Linearization at a point. Only the leading `dim` x `dim` block is used
/// (3 for Tyc0, 2 for the harvesting models).
struct Jacobian {
  int dim = 3;
  Mat3 a{};
};

/// Monic characteristic polynomial lambda^n + k[n-1] lambda^(n-1) + ... + k[0].
struct CharPoly {
  int degree = 3;
  std::array<double, 3> k{};

  double evaluate(std::complex<double> lambda) const;
};

enum class Verdict { Stable, Unstable, Marginal };
const char* to_string(Verdict v) noexcept;

/// One tested Routh-Hurwitz quantity, evaluated on the scale-normalized
/// polynomial so the marginal band is dimensionless.
struct CriterionCheck {
  std::string name;
  double value = 0.0;
  bool positive = false;
  bool marginal = false;
};

struct StabilityVerdict {
  Verdict verdict = Verdict::Marginal;
  std::vector<std::complex<double>> eigenvalues;
  std::vector<CriterionCheck> criterion_trace;
  /// Spectral scale used to normalize the band (max_i |k[n-i]|^(1/i)).
  double scale = 0.0;

  double max_real_part() const;
};

inline constexpr double kMarginalTolerance = 1e-9;

/// Analytic Jacobian at `point` using the constant controls in `spec`.
/// Throws SingularDerivativeError when a power-harvesting model is linearized
/// at a negative density.
Jacobian jacobian(const ModelSpec& spec, const LifeParams& params, const State& point);

CharPoly characteristic_polynomial(const Jacobian& j);

/// Roots of the characteristic polynomial (closed form, polished).
std::vector<std::complex<double>> polynomial_roots(const CharPoly& poly);

/// Degree 3: stable iff k0 > 0, k1 > 0, k2 > 0 and k1*k2 - k0 > 0.
/// Degree 2: stable iff k1 > 0 and k0 > 0. Any tested quantity inside the
/// marginal band (and none clearly negative) yields Marginal.
StabilityVerdict routh_hurwitz(const CharPoly& poly, double tol = kMarginalTolerance);

/// Jacobian -> characteristic polynomial -> Routh-Hurwitz for one point.
StabilityVerdict assess_point(const ModelSpec& spec, const LifeParams& params, const State& point);

/// Closed-form roots of lambda^3 + 3 delta lambda^2 + 3 delta^2 lambda + delta^2,
///   l1 = c - delta, l2,3 = -c/2 - delta +/- i (sqrt(3)/2) c,  c = cbrt(delta^3 - delta^2),
/// taking the real cube root of the negative radicand. Note that the model
/// Jacobian at (0, 0, mu/delta) is lower triangular with the triple
/// eigenvalue -delta; assess_point reports the verdict of the model itself.
std::array<std::complex<double>, 3> boundary_eigenvalues(const LifeParams& params);

/// The cubic whose roots boundary_eigenvalues returns.
CharPoly boundary_closed_form_polynomial(const LifeParams& params);

/// Sufficient Lyapunov condition (V = f + m) for global extinction.
struct GlobalCondition {
  bool satisfied = false;
  double lhs = 0.0;  ///< beta*K
  double rhs = 0.0;  ///< model-specific threshold
  /// Second inequality (delta > side_rhs) for Models 2 and 3; empty otherwise.
  bool has_side_condition = false;
  double side_lhs = 0.0;
  double side_rhs = 0.0;
  std::string statement;
};

/// Throws UnsupportedModelError for Tyc0.
GlobalCondition global_extinction_condition(const ModelSpec& spec, const LifeParams& params);

}  // namespace tyc
