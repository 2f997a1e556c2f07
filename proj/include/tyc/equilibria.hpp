#pragma once

#include <string>
#include <vector>

#include "tyc/models.hpp"
#include "tyc/stability.hpp"

namespace tyc {

/// a m^3 + b m^2 + c m + d whose positive roots are the male densities of the
/// interior Tyc0 equilibria with s* = mu/delta.
struct CubicCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double s_star = 0.0;

  /// b^2 c^2 - 4 a c^3 - 4 b^3 d - 27 a^2 d^2 + 18 a b c d
  double discriminant() const noexcept;
  /// Sum of the magnitudes of the discriminant terms; the knife-edge band is
  /// taken relative to it.
  double discriminant_scale() const noexcept;
};

/// Roots of c(s*) = 0 and b(s*) = 0 together with alpha = K beta / delta.
/// s_c_plus/s_c_minus exist only when alpha >= 4.
struct ThresholdSet {
  bool has_c_roots = false;
  double s_c_plus = 0.0;
  double s_c_minus = 0.0;
  double s_b = 0.0;
  double alpha = 0.0;
};

enum class PositiveRoots { TwoPositive, NoPositive };
const char* to_string(PositiveRoots p) noexcept;

struct RootClassification {
  PositiveRoots kind = PositiveRoots::NoPositive;
  double discriminant = 0.0;
  int sign_changes = 0;
  int numeric_positive = 0;  ///< positive real roots found numerically, counted with multiplicity
  bool knife_edge = false;   ///< discriminant inside the relative band
};

enum class Classification { Stable, Unstable, NonHyperbolic };
const char* to_string(Classification c) noexcept;

struct EquilibriumPoint {
  State point;
  Classification classification = Classification::NonHyperbolic;
  std::string provenance;
  StabilityVerdict verdict;  ///< Jacobian + Routh-Hurwitz at the point
  bool hyperbolic = true;
  double residual = 0.0;     ///< max |rhs| at the point
};

struct EquilibriumReport {
  ModelId model = ModelId::Tyc0;
  std::vector<EquilibriumPoint> points;
  std::vector<std::string> warnings;
};

inline constexpr double kThresholdTolerance = 1e-10;

/// Throws ParameterError unless mu > 0.
CubicCoefficients tyc_cubic(const LifeParams& params, double mu);
ThresholdSet tyc_thresholds(const LifeParams& params);

/// Discriminant plus Descartes sign patterns read off the thresholds.
/// Throws DegenerateError when c and d both vanish (a repeated root at 0).
RootClassification classify_positive_roots(const CubicCoefficients& coeffs, const ThresholdSet& thresholds,
                                           double s_star);

/// Equilibria of Tyc0 with mu = 0: origin plus the f = m branches.
EquilibriumReport tyc_mu0_equilibria(const LifeParams& params);

/// Case analysis for Fhms1 (linear female harvesting, male stocking).
/// Throws ParameterError when eta2 > 0 and delta <= eta2.
EquilibriumReport fhms_equilibria(const LifeParams& params, const ModelSpec& spec);

/// Every equilibrium the library can locate for any model: closed forms
/// where they exist, otherwise a damped Newton search over Omega.
EquilibriumReport find_equilibria(const ModelSpec& spec, const LifeParams& params);

double rhs_residual(const ModelSpec& spec, const LifeParams& params, const State& point);

}  // namespace tyc
