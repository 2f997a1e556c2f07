#include "tyc/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json_io.hpp"
#include "text.hpp"
#include "tyc/equilibria.hpp"
#include "tyc/errors.hpp"
#include "tyc/metrics.hpp"
#include "tyc/plot.hpp"
#include "tyc/stability.hpp"

namespace tyc {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  std::string out(s.substr(b, e - b + 1));
  // Optional surrounding quotes.
  if (out.size() >= 2 && (out.front() == '"' || out.front() == '\'') && out.back() == out.front())
    out = out.substr(1, out.size() - 2);
  return out;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double to_double(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
    throw ValidationError(std::string(key) + ": expected a number, got '" + t + "'");
  return v;
}

long to_integer(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size())
    throw ValidationError(std::string(key) + ": expected an integer, got '" + t + "'");
  return v;
}

bool to_bool(std::string_view key, std::string_view text) {
  const std::string t = lower(trim(text));
  if (t == "true" || t == "yes" || t == "1" || t == "on") return true;
  if (t == "false" || t == "no" || t == "0" || t == "off") return false;
  throw ValidationError(std::string(key) + ": expected true/false, got '" + t + "'");
}

}  // namespace

std::vector<ModelId> parse_model_list(std::string_view text) {
  const std::string t = lower(trim(text));
  if (t == "all") return {kAllModels.begin(), kAllModels.end()};
  std::vector<ModelId> out;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto dash = item.find('-');
    if (dash != std::string::npos && dash > 0) {
      const auto a = parse_model_id(item.substr(0, dash));
      const auto b = parse_model_id(item.substr(dash + 1));
      if (!a || !b || model_number(*a) > model_number(*b)) throw ValidationError("bad model range '" + item + "'");
      for (int k = model_number(*a); k <= model_number(*b); ++k) out.push_back(kAllModels[static_cast<std::size_t>(k)]);
      continue;
    }
    const auto id = parse_model_id(item);
    if (!id) throw ValidationError("unknown model '" + item + "'");
    out.push_back(*id);
  }
  if (out.empty()) throw ValidationError("empty model list");
  return out;
}

void ScenarioConfig::set(std::string_view key_in, std::string_view value) {
  const std::string key = lower(trim(key_in));
  const std::string v = trim(value);
  if (key == "params.beta") params.beta = to_double(key, v);
  else if (key == "params.delta") params.delta = to_double(key, v);
  else if (key == "params.k" || key == "params.cap_k") params.cap_k = to_double(key, v);
  else if (key == "model.id") {
    const auto id = parse_model_id(lower(v));
    if (!id) throw ValidationError("model.id: unknown model '" + v + "'");
    model.id = *id;
  } else if (key == "model.mu") model.mu = to_double(key, v);
  else if (key == "model.eta1") model.eta1 = to_double(key, v);
  else if (key == "model.eta2") model.eta2 = to_double(key, v);
  else if (key == "model.d1") model.d1 = to_double(key, v);
  else if (key == "model.d2") model.d2 = to_double(key, v);
  else if (key == "grid.t0") t0 = to_double(key, v);
  else if (key == "grid.t_end" || key == "grid.t") t_end = to_double(key, v);
  else if (key == "grid.dt") dt = to_double(key, v);
  else if (key == "init.mode") {
    const std::string m = lower(v);
    if (m == "equilibrium") init_mode = InitMode::Equilibrium;
    else if (m == "explicit") init_mode = InitMode::Explicit;
    else throw ValidationError("init.mode: expected 'equilibrium' or 'explicit'");
  } else if (key == "init.f" || key == "init.m" || key == "init.s") {
    const double x = to_double(key, v);
    (key == "init.f" ? init.f : key == "init.m" ? init.m : init.s) = x;
    init_mode = InitMode::Explicit;
  } else if (key == "sweep.omega") sweep.omega = to_double(key, v);
  else if (key == "sweep.tol") sweep.tol = to_double(key, v);
  else if (key == "sweep.max_iters") sweep.max_iters = static_cast<int>(to_integer(key, v));
  else if (key == "sweep.mu_max") {
    if (lower(v) == "none" || lower(v) == "inf") {
      sweep.cap_mu = false;
      sweep.mu_max.reset();
    } else if (lower(v) == "k" || lower(v) == "default") {
      sweep.cap_mu = true;
      sweep.mu_max.reset();
    } else {
      sweep.cap_mu = true;
      sweep.mu_max = to_double(key, v);
    }
  } else if (key == "sweep.gradient") {
    const std::string m = lower(v);
    if (m == "discrete") sweep.mode = GradientMode::Discrete;
    else if (m == "continuous") sweep.mode = GradientMode::Continuous;
    else throw ValidationError("sweep.gradient: expected 'discrete' or 'continuous'");
  } else if (key == "metrics.epsilon") epsilon = to_double(key, v);
  else if (key == "metrics.permanence") permanence = to_bool(key, v);
  else if (key == "compare.models") compare_models = parse_model_list(v);
  else if (key == "output.dir") out_dir = v;
  else if (key == "run.seed") {
    const long s = to_integer(key, v);
    if (s < 0) throw ValidationError("run.seed must be nonnegative");
    seed = static_cast<std::uint64_t>(s);
  } else {
    throw ValidationError("unknown key '" + key + "'");
  }
}

void ScenarioConfig::validate() const {
  params.validate();
  model.validate(params);
  grid().validate();
  sweep.validate();
  if (!(dt > 0.0)) throw ValidationError("grid.dt must be positive");
  if (!(epsilon > 0.0)) throw ValidationError("metrics.epsilon must be positive");
  if (init_mode == InitMode::Explicit) {
    for (double v : {init.f, init.m, init.s})
      if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("init components must be finite and nonnegative");
    if (model.id != ModelId::Tyc0 && init.s != 0.0) throw ValidationError("init.s must be 0 for harvesting models");
  }
}

TimeGrid ScenarioConfig::grid() const { return TimeGrid::with_step(t0, t_end, dt); }

State ScenarioConfig::initial_state() const {
  if (init_mode == InitMode::Explicit) return init;
  const auto report = tyc_mu0_equilibria(params);
  if (report.points.size() < 3)
    throw ValidationError("init.mode = equilibrium needs 16 delta < beta K (no stable interior equilibrium); "
                          "set init.f and init.m explicitly");
  return report.points[1].point;
}

ScenarioConfig parse_ini_config(std::string_view text) {
  ScenarioConfig cfg;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string l = trim(raw);
    if (l.empty() || l[0] == '#' || l[0] == ';') continue;
    if (l.front() == '[') {
      if (l.back() != ']') throw ParseError("unterminated section header", line);
      section = lower(trim(l.substr(1, l.size() - 2)));
      continue;
    }
    const auto eq = l.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", line);
    if (section.empty()) throw ParseError("key outside of a [section]", line);
    std::string value = l.substr(eq + 1);
    // Trailing comment after whitespace.
    for (const char* mark : {" #", "\t#", " ;", "\t;"}) {
      const auto c = value.find(mark);
      if (c != std::string::npos) value = value.substr(0, c);
    }
    try {
      cfg.set(section + "." + trim(l.substr(0, eq)), value);
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), line);
    }
  }
  return cfg;
}

ScenarioConfig parse_json_config(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), 0);
  }
  if (!doc.is_object()) throw ParseError("top level must be an object of sections", 0);
  ScenarioConfig cfg;
  for (const auto& [section, body] : doc.items()) {
    if (!body.is_object()) throw ValidationError("section '" + section + "' must be an object");
    for (const auto& [key, value] : body.items()) {
      std::string v;
      if (value.is_string())
        v = value.get<std::string>();
      else if (value.is_number() || value.is_boolean())
        v = value.dump();
      else if (value.is_null())
        v = "none";
      else if (value.is_array()) {
        for (const auto& item : value) v += (v.empty() ? "" : ",") + (item.is_string() ? item.get<std::string>() : item.dump());
      } else
        throw ValidationError(section + "." + key + ": unsupported value");
      cfg.set(section + "." + key, v);
    }
  }
  return cfg;
}

ScenarioConfig parse_config(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') return parse_json_config(text);
  return parse_ini_config(text);
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

using detail::ordered_json;

ordered_json verdict_json(const StabilityVerdict& v) {
  ordered_json eig = ordered_json::array();
  for (const auto& z : v.eigenvalues) eig.push_back({{"re", z.real()}, {"im", z.imag()}});
  ordered_json trace = ordered_json::array();
  for (const auto& c : v.criterion_trace)
    trace.push_back({{"quantity", c.name}, {"value", c.value}, {"positive", c.positive}, {"marginal", c.marginal}});
  return {{"verdict", to_string(v.verdict)}, {"eigenvalues", eig}, {"routh_hurwitz", trace}, {"scale", v.scale}};
}

std::vector<double> grid_times(const TimeGrid& g) {
  std::vector<double> t(static_cast<std::size_t>(g.size()));
  for (int i = 0; i < g.size(); ++i) t[static_cast<std::size_t>(i)] = g.time(i);
  return t;
}

PlotPanel density_panel(const Trajectory& traj, const std::string& title) {
  PlotPanel p{title, "density", {{"female f", "#c0392b", {}}, {"male m", "#27ae60", {}}}};
  if (traj.model == ModelId::Tyc0) p.series.push_back({"supermale s", "#2c3e50", {}});
  for (const auto& x : traj.states) {
    p.series[0].y.push_back(x.f);
    p.series[1].y.push_back(x.m);
    if (traj.model == ModelId::Tyc0) p.series[2].y.push_back(x.s);
  }
  return p;
}

PlotPanel control_panel(ModelId id, const ControlSchedule& schedule) {
  PlotPanel p{"controls", "rate", {}};
  if (id == ModelId::Tyc0) {
    p.series.push_back({"mu", "#2980b9", {}});
    for (const auto& u : schedule.nodes) p.series[0].y.push_back(u.mu);
  } else {
    p.series.push_back({"eta1", "#2980b9", {}});
    p.series.push_back({"eta2", "#8e44ad", {}});
    for (const auto& u : schedule.nodes) {
      p.series[0].y.push_back(u.eta1);
      p.series[1].y.push_back(u.eta2);
    }
  }
  return p;
}

std::string init_note(const ScenarioConfig& c) {
  return c.init_mode == InitMode::Equilibrium
             ? "initial state: stable interior equilibrium of the uncontrolled system"
             : "initial state: explicit";
}

}  // namespace

RunOutput run_analyze(const ScenarioConfig& config) {
  config.validate();
  const auto report = find_equilibria(config.model, config.params);
  RunOutput out;
  out.stem = "analyze_" + std::string(model_name(config.model.id));

  ordered_json points = ordered_json::array();
  for (const auto& p : report.points)
    points.push_back({{"point", detail::to_json(p.point)},
                      {"classification", to_string(p.classification)},
                      {"provenance", p.provenance},
                      {"hyperbolic", p.hyperbolic},
                      {"residual", p.residual},
                      {"jacobian", verdict_json(p.verdict)}});
  ordered_json j{{"model", std::string(model_name(config.model.id))},
                 {"params", detail::to_json(config.params)},
                 {"spec", detail::to_json(config.model)},
                 {"equilibria", points},
                 {"warnings", report.warnings}};

  std::ostringstream text;
  text << "model " << model_name(config.model.id) << "  beta=" << config.params.beta
       << " delta=" << config.params.delta << " K=" << config.params.cap_k << '\n';
  text << report.points.size() << " equilibria\n";
  for (const auto& p : report.points) {
    text << "  (" << p.point.f << ", " << p.point.m << ", " << p.point.s << ")  " << to_string(p.classification)
         << "  [" << p.provenance << "]  max Re(lambda) = " << p.verdict.max_real_part() << '\n';
  }
  for (const auto& w : report.warnings) text << "warning: " << w << '\n';

  if (config.model.id == ModelId::Tyc0) {
    j["global_extinction"] = nullptr;
    text << "global extinction condition: not available for tyc0\n";
    if (config.model.mu > 0.0) {
      // The closed-form boundary polynomial, shown next to the model verdict.
      const auto poly = boundary_closed_form_polynomial(config.params);
      const auto v = routh_hurwitz(poly);
      ordered_json closed = verdict_json(v);
      const auto eig = boundary_eigenvalues(config.params);
      ordered_json closed_eig = ordered_json::array();
      for (const auto& z : eig) closed_eig.push_back({{"re", z.real()}, {"im", z.imag()}});
      closed["closed_form_eigenvalues"] = closed_eig;
      closed["polynomial"] = {{"k0", poly.k[0]}, {"k1", poly.k[1]}, {"k2", poly.k[2]}};
      j["boundary_closed_form_polynomial"] = closed;
      text << "closed-form boundary polynomial l^3 + 3d l^2 + 3d^2 l + d^2: " << to_string(v.verdict)
           << " (the model Jacobian at (0,0,mu/delta) has eigenvalue -delta three times)\n";
    }
  } else {
    const auto g = global_extinction_condition(config.model, config.params);
    j["global_extinction"] = {{"statement", g.statement},
                              {"satisfied", g.satisfied},
                              {"lhs", g.lhs},
                              {"rhs", g.rhs}};
    if (g.has_side_condition) j["global_extinction"]["side"] = {{"lhs", g.side_lhs}, {"rhs", g.side_rhs}};
    text << "global extinction condition " << g.statement << ": " << (g.satisfied ? "satisfied" : "not satisfied")
         << " (" << g.lhs << " vs " << g.rhs << ")\n";
  }
  out.json = j.dump(2) + "\n";
  out.text = text.str();
  return out;
}

RunOutput run_simulate(const ScenarioConfig& config) {
  config.validate();
  const State init = config.initial_state();
  const TimeGrid grid = config.grid();
  const auto schedule = ControlSchedule::constant(config.model, grid);
  const auto traj = integrate_forward(config.model, config.params, init, schedule);
  RunOutput out;
  out.stem = "simulate_" + std::string(model_name(config.model.id));
  std::ostringstream csv;
  write_trajectory_csv(csv, traj, &schedule);
  out.csv = csv.str();
  const State& last = traj.states.back();
  const auto tf = eradication_time(traj, Sex::Female, config.epsilon, config.permanence);
  const auto tm = eradication_time(traj, Sex::Male, config.epsilon, config.permanence);
  auto opt = [](const std::optional<double>& t) { return t ? ordered_json(*t) : ordered_json(nullptr); };
  ordered_json j{{"model", std::string(model_name(config.model.id))},
                 {"params", detail::to_json(config.params)},
                 {"spec", detail::to_json(config.model)},
                 {"grid", detail::to_json(grid)},
                 {"init", detail::to_json(init)},
                 {"final_state", detail::to_json(last)},
                 {"final_total", last.f + last.m + last.s},
                 {"eradication", {{"epsilon", config.epsilon}, {"female", opt(tf)}, {"male", opt(tm)}}},
                 {"notes", {init_note(config)}}};
  out.json = j.dump(2) + "\n";
  std::ostringstream text;
  text << "simulated " << model_name(config.model.id) << " on [" << grid.t0 << ", " << grid.t_end << "] with dt "
       << grid.dt() << '\n'
       << "initial (" << init.f << ", " << init.m << ", " << init.s << ") -> final (" << last.f << ", " << last.m
       << ", " << last.s << "), total " << last.f + last.m + last.s << '\n'
       << "female eradication " << (tf ? std::to_string(*tf) : std::string("/")) << ", male eradication "
       << (tm ? std::to_string(*tm) : std::string("/")) << " (epsilon " << config.epsilon << ")\n";
  out.text = text.str();
  std::ostringstream svg;
  write_svg(svg, grid_times(grid), {density_panel(traj, std::string(model_name(config.model.id)) + " densities")});
  out.svg = svg.str();
  return out;
}

RunOutput run_optimize(const ScenarioConfig& config) {
  config.validate();
  const State init = config.initial_state();
  const TimeGrid grid = config.grid();
  const auto res = forward_backward_sweep(config.model, config.params, init, grid, config.sweep);
  const auto check = optimality_residual(res, 20, 1e-3, config.seed);
  const auto tf = eradication_time(res.states, Sex::Female, config.epsilon, config.permanence);
  const auto tm = eradication_time(res.states, Sex::Male, config.epsilon, config.permanence);

  RunOutput out;
  out.stem = "optimize_" + std::string(model_name(config.model.id));
  out.converged = res.converged;
  out.status = res.converged ? 0 : 3;
  ordered_json j = detail::sweep_to_json(res);
  j["optimality"] = {{"stationarity", check.stationarity},
                     {"projected", check.projected},
                     {"continuous_stationarity", check.continuous_stationarity},
                     {"interior_points", check.interior_points},
                     {"min_fd_change", check.min_fd_change},
                     {"directions", check.directions},
                     {"seed", config.seed}};
  j["eradication"] = {{"epsilon", config.epsilon},
                      {"permanence", config.permanence},
                      {"t_erad_f", tf ? ordered_json(*tf) : ordered_json(nullptr)},
                      {"t_erad_m", tm ? ordered_json(*tm) : ordered_json(nullptr)}};
  j["notes"] = {init_note(config)};
  out.json = j.dump(2) + "\n";
  std::ostringstream csv;
  write_sweep_csv(csv, res);
  out.csv = csv.str();

  std::ostringstream text;
  text << model_name(config.model.id) << ": J = " << std::setprecision(10) << res.objective
       << ", cost excluding controls = " << res.cost_excluding_controls << '\n'
       << "iterations " << res.iterations << ", " << (res.converged ? "converged" : "NOT converged")
       << ", relative change " << res.residual << '\n'
       << "max |dH/du| at interior nodes " << check.stationarity << "; min J change over " << check.directions
       << " perturbations " << check.min_fd_change << '\n'
       << "female eradication " << (tf ? std::to_string(*tf) : std::string("/")) << ", male eradication "
       << (tm ? std::to_string(*tm) : std::string("/")) << " (epsilon " << config.epsilon << ")\n";
  if (!res.converged) text << "diagnostics: " << res.message << '\n';
  out.text = text.str();

  std::ostringstream svg;
  write_svg(svg, grid_times(grid),
            {density_panel(res.states, std::string(model_name(config.model.id)) + " optimal densities"),
             control_panel(config.model.id, res.schedule)});
  out.svg = svg.str();
  return out;
}

RunOutput run_compare(const ScenarioConfig& config, const std::vector<ModelId>& models) {
  config.validate();
  const State init = config.initial_state();
  const TimeGrid grid = config.grid();
  std::vector<SweepResult> results;
  std::vector<std::string> failures;
  for (ModelId id : models) {
    ModelSpec spec = config.model;
    spec.id = id;
    try {
      results.push_back(forward_backward_sweep(spec, config.params, init, grid, config.sweep));
    } catch (const Error& e) {
      failures.push_back(std::string(model_name(id)) + ": " + e.what());
    }
  }
  auto report = compare_strategies(results, config.epsilon, config.permanence);
  report.init = init;
  report.params = config.params;
  report.grid = grid;
  report.notes.insert(report.notes.begin(), init_note(config));
  for (const auto& f : failures) report.notes.push_back("failed: " + f);

  RunOutput out;
  out.stem = "compare";
  out.converged = failures.empty() && std::all_of(results.begin(), results.end(), [](const SweepResult& r) { return r.converged; });
  out.status = out.converged ? 0 : 3;
  std::ostringstream js;
  write_comparison_json(js, report);
  auto j = nlohmann::ordered_json::parse(js.str());
  j["partial"] = !failures.empty();
  out.json = j.dump(2) + "\n";
  std::ostringstream text;
  write_comparison_text(text, report);
  out.text = text.str();
  std::ostringstream csv;
  write_comparison_csv(csv, report);
  out.csv = csv.str();

  static const char* palette[] = {"#2c3e50", "#c0392b", "#e67e22", "#f1c40f", "#27ae60", "#2980b9", "#8e44ad"};
  PlotPanel females{"female densities under optimal control", "f", {}};
  PlotPanel males{"male densities under optimal control", "m", {}};
  for (std::size_t i = 0; i < results.size(); ++i) {
    const char* color = palette[i % 7];
    PlotSeries sf{std::string(model_name(results[i].spec.id)), color, {}};
    PlotSeries sm = sf;
    for (const auto& x : results[i].states.states) {
      sf.y.push_back(x.f);
      sm.y.push_back(x.m);
    }
    females.series.push_back(std::move(sf));
    males.series.push_back(std::move(sm));
  }
  std::ostringstream svg;
  write_svg(svg, grid_times(grid), {females, males});
  out.svg = svg.str();
  return out;
}

RunOutput run_fit(const ObservationSeries& data, const ScenarioConfig& config) {
  config.params.validate();
  const auto res = fit_life_params(data, config.params);
  RunOutput out;
  out.stem = "fit";
  out.converged = res.converged;
  out.status = res.converged ? 0 : 3;
  std::ostringstream js;
  write_fit_json(js, res);
  out.json = js.str();
  std::ostringstream text;
  text << std::setprecision(6) << "beta = " << res.params.beta << "  delta = " << res.params.delta
       << "  K = " << res.params.cap_k << "\nsse = " << res.sse << " (start " << res.initial_sse << "), "
       << res.n_evals << " evaluations, " << (res.converged ? "converged" : "NOT converged") << '\n';
  for (const auto& n : res.notes) text << "note: " << n << '\n';
  out.text = text.str();

  // Fitted total over the observation window.
  const TimeGrid grid = TimeGrid::with_step(data.times.front(), data.times.back(), 0.05);
  const auto traj = integrate_forward(ModelSpec{ModelId::Tyc0}, res.params, data.init, grid);
  PlotPanel panel{"fit", "count", {{"fitted total", "#2980b9", {}}}};
  for (const auto& x : traj.states) panel.series[0].y.push_back(x.f + x.m);
  std::ostringstream svg;
  write_svg(svg, grid_times(grid), {panel});
  out.svg = svg.str();
  return out;
}

}  // namespace tyc
