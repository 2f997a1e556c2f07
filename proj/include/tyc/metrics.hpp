#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tyc/control.hpp"

namespace tyc {

enum class Sex { Female, Male };

inline constexpr double kDefaultEpsilon = 0.5;

/// Earliest grid time with density < epsilon, or nullopt. With `permanent`
/// the density must also stay below epsilon through the end of the run.
/// Throws ValidationError unless epsilon > 0.
std::optional<double> eradication_time(const Trajectory& traj, Sex sex, double epsilon = kDefaultEpsilon,
                                       bool permanent = false);

struct StrategyReport {
  ModelId model = ModelId::Tyc0;
  double objective = 0.0;
  double cost_excluding_controls = 0.0;
  double f_final = 0.0;
  double m_final = 0.0;
  std::optional<double> t_erad_f;
  std::optional<double> t_erad_m;
  double epsilon = kDefaultEpsilon;
  bool converged = false;
  int iterations = 0;
};

struct ComparisonReport {
  std::vector<StrategyReport> rows;
  double epsilon = kDefaultEpsilon;
  bool permanence = false;
  State init;
  LifeParams params;
  TimeGrid grid;
  std::optional<std::size_t> cheapest;        ///< row with the smallest objective
  std::optional<std::size_t> fastest_female;  ///< row with the earliest female eradication
  std::vector<std::string> notes;
};

/// Throws GridMismatchError when scenarios differ in grid or parameters;
/// a differing initial state only adds a note.
ComparisonReport compare_strategies(const std::vector<SweepResult>& scenarios, double epsilon = kDefaultEpsilon,
                                    bool permanence = false);

void write_comparison_json(std::ostream& out, const ComparisonReport& report);
/// Aligned plain-text table; "/" marks a missing eradication time.
void write_comparison_text(std::ostream& out, const ComparisonReport& report);
void write_comparison_csv(std::ostream& out, const ComparisonReport& report);

}  // namespace tyc
