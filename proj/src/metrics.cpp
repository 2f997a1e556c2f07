#include "tyc/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "json_io.hpp"
#include "text.hpp"
#include "tyc/errors.hpp"

namespace tyc {

std::optional<double> eradication_time(const Trajectory& traj, Sex sex, double epsilon, bool permanent) {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  auto value = [&](std::size_t i) { return sex == Sex::Female ? traj.states[i].f : traj.states[i].m; };
  const std::size_t n = traj.states.size();
  if (!permanent) {
    for (std::size_t i = 0; i < n; ++i)
      if (value(i) < epsilon) return traj.grid.time(static_cast<int>(i));
    return std::nullopt;
  }
  // Scan backwards for the start of the final run below epsilon.
  std::optional<double> t;
  for (std::size_t i = n; i-- > 0;) {
    if (!(value(i) < epsilon)) break;
    t = traj.grid.time(static_cast<int>(i));
  }
  return t;
}

ComparisonReport compare_strategies(const std::vector<SweepResult>& scenarios, double epsilon, bool permanence) {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  ComparisonReport report;
  report.epsilon = epsilon;
  report.permanence = permanence;
  if (scenarios.empty()) return report;

  const SweepResult& first = scenarios.front();
  report.init = first.init;
  report.params = first.params;
  report.grid = first.states.grid;
  for (const auto& s : scenarios) {
    if (!(s.states.grid == report.grid)) throw GridMismatchError("scenarios use different time grids");
    const LifeParams& p = s.params;
    if (p.beta != report.params.beta || p.delta != report.params.delta || p.cap_k != report.params.cap_k)
      throw GridMismatchError("scenarios use different life parameters");
  }

  for (const auto& s : scenarios) {
    StrategyReport row;
    row.model = s.spec.id;
    row.objective = s.objective;
    row.cost_excluding_controls = s.cost_excluding_controls;
    row.f_final = s.states.states.back().f;
    row.m_final = s.states.states.back().m;
    row.t_erad_f = eradication_time(s.states, Sex::Female, epsilon, permanence);
    row.t_erad_m = eradication_time(s.states, Sex::Male, epsilon, permanence);
    row.epsilon = epsilon;
    row.converged = s.converged;
    row.iterations = s.iterations;
    report.rows.push_back(row);
    if (s.init.f != report.init.f || s.init.m != report.init.m || s.init.s != report.init.s)
      report.notes.push_back(std::string(model_name(s.spec.id)) + " starts from a different initial state");
    if (!s.converged) report.notes.push_back(std::string(model_name(s.spec.id)) + ": " + s.message);
  }

  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& r = report.rows[i];
    if (!report.cheapest || r.objective < report.rows[*report.cheapest].objective) report.cheapest = i;
    if (r.t_erad_f && (!report.fastest_female || *r.t_erad_f < *report.rows[*report.fastest_female].t_erad_f))
      report.fastest_female = i;
  }
  return report;
}

namespace {

detail::ordered_json optional_time(const std::optional<double>& t) {
  return t ? detail::ordered_json(*t) : detail::ordered_json(nullptr);
}

std::string time_cell(const std::optional<double>& t) {
  if (!t) return "/";
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << *t;
  return os.str();
}

}  // namespace

void write_comparison_json(std::ostream& out, const ComparisonReport& report) {
  detail::ordered_json rows = detail::ordered_json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"model", std::string(model_name(r.model))},
                    {"objective", r.objective},
                    {"cost_excluding_controls", r.cost_excluding_controls},
                    {"f_final", r.f_final},
                    {"m_final", r.m_final},
                    {"t_erad_f", optional_time(r.t_erad_f)},
                    {"t_erad_m", optional_time(r.t_erad_m)},
                    {"converged", r.converged},
                    {"iterations", r.iterations}});
  }
  auto model_at = [&](const std::optional<std::size_t>& i) {
    return i ? detail::ordered_json(std::string(model_name(report.rows[*i].model))) : detail::ordered_json(nullptr);
  };
  detail::ordered_json j{{"epsilon", report.epsilon},
                         {"permanence", report.permanence},
                         {"params", detail::to_json(report.params)},
                         {"grid", detail::to_json(report.grid)},
                         {"init", detail::to_json(report.init)},
                         {"rows", rows},
                         {"cheapest", model_at(report.cheapest)},
                         {"fastest_female_eradication", model_at(report.fastest_female)},
                         {"notes", report.notes}};
  out << j.dump(2) << '\n';
}

void write_comparison_text(std::ostream& out, const ComparisonReport& report) {
  const std::vector<std::string> head{"model", "objective", "cost excl. controls", "f(T)", "m(T)", "t_erad f",
                                      "t_erad m", "converged"};
  std::vector<std::vector<std::string>> cells{head};
  for (const auto& r : report.rows) {
    auto fixed = [](double v, int digits) {
      std::ostringstream os;
      os << std::fixed << std::setprecision(digits) << v;
      return os.str();
    };
    cells.push_back({std::string(model_name(r.model)), fixed(r.objective, 2), fixed(r.cost_excluding_controls, 2),
                     fixed(r.f_final, 4), fixed(r.m_final, 4), time_cell(r.t_erad_f), time_cell(r.t_erad_m),
                     r.converged ? "yes" : "no"});
  }
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& row : cells)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  for (std::size_t r = 0; r < cells.size(); ++r) {
    for (std::size_t c = 0; c < cells[r].size(); ++c) {
      if (c > 0) out << "  ";
      if (c == 0)
        out << std::left << std::setw(static_cast<int>(width[c])) << cells[r][c];
      else
        out << std::right << std::setw(static_cast<int>(width[c])) << cells[r][c];
    }
    out << '\n';
    if (r == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w;
      out << std::string(total + 2 * (width.size() - 1), '-') << '\n';
    }
  }
  out << std::left;
  out << "epsilon = " << report.epsilon << (report.permanence ? " (permanent crossing)" : " (first crossing)")
      << "; initial state (" << report.init.f << ", " << report.init.m << ", " << report.init.s << ")\n";
  if (report.cheapest) out << "cheapest: " << model_name(report.rows[*report.cheapest].model) << '\n';
  if (report.fastest_female)
    out << "fastest female eradication: " << model_name(report.rows[*report.fastest_female].model) << '\n';
  for (const auto& n : report.notes) out << "note: " << n << '\n';
}

void write_comparison_csv(std::ostream& out, const ComparisonReport& report) {
  using detail::num;
  out << "model,objective,cost_excluding_controls,f_final,m_final,t_erad_f,t_erad_m,converged\n";
  for (const auto& r : report.rows) {
    out << model_name(r.model) << ',' << num(r.objective) << ',' << num(r.cost_excluding_controls) << ','
        << num(r.f_final) << ',' << num(r.m_final) << ',' << (r.t_erad_f ? num(*r.t_erad_f) : "") << ','
        << (r.t_erad_m ? num(*r.t_erad_m) : "") << ',' << (r.converged ? "true" : "false") << '\n';
  }
}

}  // namespace tyc
