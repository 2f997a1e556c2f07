#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tyc/models.hpp"

namespace tyc {

/// Monthly counts. Either totals (`females`/`males` empty) or a sex split.
struct ObservationSeries {
  std::vector<double> times;
  std::vector<double> counts;  ///< totals; for split data f + m
  std::vector<double> females;
  std::vector<double> males;
  State init;  ///< state at times[0]; totals are split evenly between the sexes

  bool sex_split() const noexcept { return !females.empty(); }
  /// Throws ValidationError unless times increase strictly and counts >= 0.
  void validate() const;
};

/// Reads `t,count` or `t,f,m` (header required, '#' comments allowed).
/// Throws ParseError with the offending line number.
ObservationSeries read_observations(std::istream& in);
ObservationSeries read_observations_file(const std::string& path);

/// Box for (beta, delta, K).
struct FitBounds {
  LifeParams lower{1e-5, 1e-4, 1.0};
  LifeParams upper{1.0, 0.999, 1e5};

  void validate() const;
  bool contains(const LifeParams& p) const noexcept;
};

struct FitOptions {
  int max_evals = 6000;
  double f_tol = 1e-12;  ///< relative spread of simplex values
  double x_tol = 1e-10;  ///< simplex diameter in normalized coordinates
  double dt = 0.05;      ///< integration step, adjusted to land on the sample times
};

struct FitResult {
  LifeParams params;
  double sse = 0.0;
  double initial_sse = 0.0;
  int n_evals = 0;
  bool converged = false;
  bool sex_split = false;
  std::vector<std::string> notes;
};

/// Sum of squared residuals of Tyc0 (mu = 0, s = 0) against the data.
/// Split data contributes both sexes. Returns +inf when the simulation
/// leaves the guarded region.
double fit_objective(const ObservationSeries& data, const LifeParams& params, double dt = 0.05);

/// Nelder-Mead over (log beta, log delta, log K) scaled to the unit cube,
/// with every trial point projected onto the box. Throws ValidationError for
/// fewer than 4 observations or a guess outside the bounds, and
/// FitDivergedError when the simplex collapses short of the tolerance.
FitResult fit_life_params(const ObservationSeries& data, const LifeParams& guess, const FitBounds& bounds = {},
                          const FitOptions& options = {});

void write_fit_json(std::ostream& out, const FitResult& result);

/// Samples Tyc0 (mu = 0) at t = 0, 1, ..., months and multiplies every
/// count after the first by 1 + noise * N(0, 1) (seeded mt19937_64).
ObservationSeries synthesize_observations(const LifeParams& params, const State& init, int months, double noise,
                                          std::uint64_t seed, bool sex_split);

/// Writes `t,f,m` or `t,count` with 17 significant digits.
void write_observations_csv(std::ostream& out, const ObservationSeries& data);

}  // namespace tyc
