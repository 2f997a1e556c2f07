#include "tyc/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "json_io.hpp"
#include "text.hpp"
#include "tyc/errors.hpp"
#include "tyc/integrate.hpp"

namespace tyc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& cell, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + cell + "'", line);
  }
  if (used != cell.size() || !std::isfinite(v)) throw ParseError("not a number: '" + cell + "'", line);
  return v;
}

}  // namespace

void ObservationSeries::validate() const {
  if (times.size() != counts.size()) throw ValidationError("times and counts differ in length");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw ValidationError("observation times must increase strictly");
  for (double c : counts)
    if (!(c >= 0.0)) throw ValidationError("counts must be nonnegative");
}

ObservationSeries read_observations(std::istream& in) {
  ObservationSeries data;
  std::string raw;
  int line = 0;
  int columns = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(raw);
    if (text.empty() || text[0] == '#') continue;
    auto cells = split_csv(text);
    if (columns == 0) {
      for (auto& c : cells) std::transform(c.begin(), c.end(), c.begin(), ::tolower);
      if (cells == std::vector<std::string>{"t", "count"})
        columns = 2;
      else if (cells == std::vector<std::string>{"t", "f", "m"})
        columns = 3;
      else
        throw ParseError("expected header 't,count' or 't,f,m'", line);
      continue;
    }
    if (static_cast<int>(cells.size()) != columns)
      throw ParseError("expected " + std::to_string(columns) + " columns, found " + std::to_string(cells.size()),
                       line);
    const double t = parse_number(cells[0], line);
    if (!data.times.empty() && !(t > data.times.back())) throw ParseError("times must increase strictly", line);
    data.times.push_back(t);
    if (columns == 2) {
      const double c = parse_number(cells[1], line);
      if (c < 0.0) throw ParseError("negative count", line);
      data.counts.push_back(c);
    } else {
      const double f = parse_number(cells[1], line);
      const double m = parse_number(cells[2], line);
      if (f < 0.0 || m < 0.0) throw ParseError("negative count", line);
      data.females.push_back(f);
      data.males.push_back(m);
      data.counts.push_back(f + m);
    }
  }
  if (columns == 0) throw ParseError("empty file: no header found", line);
  if (data.times.empty()) throw ParseError("no observations after the header", line);
  data.init = data.sex_split() ? State{data.females[0], data.males[0], 0.0}
                               : State{0.5 * data.counts[0], 0.5 * data.counts[0], 0.0};
  return data;
}

ObservationSeries read_observations_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_observations(in);
}

void FitBounds::validate() const {
  if (!(lower.beta > 0.0 && lower.delta > 0.0 && lower.cap_k > 0.0)) throw ValidationError("lower bounds must be positive");
  if (!(lower.beta < upper.beta && lower.delta < upper.delta && lower.cap_k < upper.cap_k))
    throw ValidationError("each lower bound must be below its upper bound");
  if (!(upper.delta < 1.0)) throw ValidationError("delta upper bound must stay below 1");
}

bool FitBounds::contains(const LifeParams& p) const noexcept {
  return p.beta >= lower.beta && p.beta <= upper.beta && p.delta >= lower.delta && p.delta <= upper.delta &&
         p.cap_k >= lower.cap_k && p.cap_k <= upper.cap_k;
}

double fit_objective(const ObservationSeries& data, const LifeParams& params, double dt) {
  const double t0 = data.times.front();
  const TimeGrid grid = TimeGrid::with_step(t0, data.times.back(), dt);
  Trajectory traj;
  try {
    traj = integrate_forward(ModelSpec{ModelId::Tyc0}, params, data.init, grid);
  } catch (const BlowUpError&) {
    return std::numeric_limits<double>::infinity();
  } catch (const NegativeStateError&) {
    return std::numeric_limits<double>::infinity();
  }
  double sse = 0.0;
  for (std::size_t i = 0; i < data.times.size(); ++i) {
    // Observation times between nodes are linearly interpolated.
    const double pos = (data.times[i] - t0) / grid.dt();
    const int j = std::min(static_cast<int>(std::floor(pos)), grid.n_steps - 1);
    const double w = std::clamp(pos - j, 0.0, 1.0);
    const State& a = traj.states[static_cast<std::size_t>(j)];
    const State& b = traj.states[static_cast<std::size_t>(j + 1)];
    const double f = (1 - w) * a.f + w * b.f;
    const double m = (1 - w) * a.m + w * b.m;
    if (data.sex_split()) {
      sse += (f - data.females[i]) * (f - data.females[i]) + (m - data.males[i]) * (m - data.males[i]);
    } else {
      const double r = f + m - data.counts[i];
      sse += r * r;
    }
  }
  return sse;
}

namespace {

using Point = std::array<double, 3>;

struct Box {
  Point lo;
  Point span;

  explicit Box(const FitBounds& b)
      : lo{std::log(b.lower.beta), std::log(b.lower.delta), std::log(b.lower.cap_k)},
        span{std::log(b.upper.beta) - lo[0], std::log(b.upper.delta) - lo[1], std::log(b.upper.cap_k) - lo[2]} {}

  LifeParams params(const Point& z) const {
    return {std::exp(lo[0] + z[0] * span[0]), std::exp(lo[1] + z[1] * span[1]), std::exp(lo[2] + z[2] * span[2])};
  }
  Point coords(const LifeParams& p) const {
    return {(std::log(p.beta) - lo[0]) / span[0], (std::log(p.delta) - lo[1]) / span[1],
            (std::log(p.cap_k) - lo[2]) / span[2]};
  }
};

Point project(Point z) {
  for (double& v : z) v = std::clamp(v, 0.0, 1.0);
  return z;
}

struct Simplex {
  std::array<Point, 4> x;
  std::array<double, 4> f;
};

}  // namespace

FitResult fit_life_params(const ObservationSeries& data, const LifeParams& guess, const FitBounds& bounds,
                          const FitOptions& options) {
  data.validate();
  bounds.validate();
  if (data.times.size() < 4) throw ValidationError("fit needs >= 4 observations");
  if (!bounds.contains(guess)) throw ValidationError("initial guess lies outside the bounds");

  const Box box(bounds);
  FitResult res;
  res.sex_split = data.sex_split();
  auto eval = [&](const Point& z) {
    ++res.n_evals;
    return fit_objective(data, box.params(z), options.dt);
  };

  Point start = box.coords(guess);
  res.initial_sse = eval(start);
  if (!std::isfinite(res.initial_sse)) throw ValidationError("model diverges at the initial guess");

  // Absolute floor for the value tolerance, so noise-free data can terminate.
  double data_scale = 0.0;
  for (double c : data.counts) data_scale += c * c;
  data_scale *= 1e-12;

  Point best = start;
  double best_f = res.initial_sse;
  // One restart from the optimum guards against a prematurely collapsed simplex.
  for (int round = 0; round < 3 && res.n_evals < options.max_evals; ++round) {
    Simplex s;
    s.x[0] = best;
    s.f[0] = best_f;
    for (int i = 0; i < 3; ++i) {
      Point p = best;
      const double step = round == 0 ? 0.05 : 0.01;
      p[static_cast<std::size_t>(i)] += (p[static_cast<std::size_t>(i)] + step <= 1.0) ? step : -step;
      s.x[static_cast<std::size_t>(i + 1)] = project(p);
      s.f[static_cast<std::size_t>(i + 1)] = eval(s.x[static_cast<std::size_t>(i + 1)]);
    }

    bool met = false;
    while (res.n_evals < options.max_evals) {
      std::array<int, 4> order{0, 1, 2, 3};
      std::sort(order.begin(), order.end(), [&](int a, int b) { return s.f[static_cast<std::size_t>(a)] < s.f[static_cast<std::size_t>(b)]; });
      Simplex sorted;
      for (std::size_t i = 0; i < 4; ++i) {
        sorted.x[i] = s.x[static_cast<std::size_t>(order[i])];
        sorted.f[i] = s.f[static_cast<std::size_t>(order[i])];
      }
      s = sorted;

      double diameter = 0.0;
      for (std::size_t i = 1; i < 4; ++i)
        for (std::size_t c = 0; c < 3; ++c) diameter = std::max(diameter, std::abs(s.x[i][c] - s.x[0][c]));
      const double spread = s.f[3] - s.f[0];
      if (spread <= options.f_tol * s.f[0] + 1e-12 * data_scale) {
        met = true;
        break;
      }
      if (diameter <= options.x_tol) {
        // A collapsed simplex is accepted only when the values have flattened too.
        if (spread <= 1e-6 * (s.f[0] + data_scale)) {
          met = true;
          break;
        }
        std::ostringstream os;
        os << "simplex collapsed with value spread " << spread << " after " << res.n_evals << " evaluations";
        throw FitDivergedError(os.str());
      }

      Point centroid{};
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t c = 0; c < 3; ++c) centroid[c] += s.x[i][c] / 3.0;
      auto along = [&](double coef) {
        Point p;
        for (std::size_t c = 0; c < 3; ++c) p[c] = centroid[c] + coef * (s.x[3][c] - centroid[c]);
        return project(p);
      };

      const Point xr = along(-1.0);
      const double fr = eval(xr);
      if (fr < s.f[0]) {
        const Point xe = along(-2.0);
        const double fe = eval(xe);
        if (fe < fr) {
          s.x[3] = xe;
          s.f[3] = fe;
        } else {
          s.x[3] = xr;
          s.f[3] = fr;
        }
      } else if (fr < s.f[2]) {
        s.x[3] = xr;
        s.f[3] = fr;
      } else {
        const bool outside = fr < s.f[3];
        const Point xc = along(outside ? -0.5 : 0.5);
        const double fc = eval(xc);
        if (fc < (outside ? fr : s.f[3])) {
          s.x[3] = xc;
          s.f[3] = fc;
        } else {
          for (std::size_t i = 1; i < 4; ++i) {
            for (std::size_t c = 0; c < 3; ++c) s.x[i][c] = s.x[0][c] + 0.5 * (s.x[i][c] - s.x[0][c]);
            s.f[i] = eval(s.x[i]);
          }
        }
      }
    }
    const auto it = std::min_element(s.f.begin(), s.f.end());
    const bool improved = *it < best_f;
    if (*it <= best_f) {
      best_f = *it;
      best = s.x[static_cast<std::size_t>(it - s.f.begin())];
    }
    res.converged = met;
    if (met && round > 0 && !improved) break;
  }

  res.params = box.params(best);
  res.sse = best_f;
  if (!res.converged) res.notes.push_back("evaluation budget exhausted before the simplex met its tolerance");
  res.notes.push_back(res.sex_split ? "fit to sex-split counts (t,f,m)" : "fit to total counts (t,count)");

  // Data with no transient pins only the equilibrium, not (beta, delta) separately.
  const auto [mn, mx] = std::minmax_element(data.counts.begin(), data.counts.end());
  if (*mx - *mn <= 1e-6 * std::max(1.0, *mx))
    res.notes.push_back("counts are constant: beta and delta are only weakly identified (wide confidence)");
  return res;
}

void write_fit_json(std::ostream& out, const FitResult& r) {
  detail::ordered_json j{{"params", detail::to_json(r.params)},
                         {"sse", r.sse},
                         {"initial_sse", r.initial_sse},
                         {"n_evals", r.n_evals},
                         {"converged", r.converged},
                         {"data", r.sex_split ? "t,f,m" : "t,count"},
                         {"notes", r.notes}};
  out << j.dump(2) << '\n';
}

ObservationSeries synthesize_observations(const LifeParams& params, const State& init, int months, double noise,
                                          std::uint64_t seed, bool sex_split) {
  if (months < 1) throw ValidationError("months must be at least 1");
  if (!(noise >= 0.0)) throw ValidationError("noise must be nonnegative");
  const TimeGrid grid{0.0, static_cast<double>(months), months * 20};
  const auto traj = integrate_forward(ModelSpec{ModelId::Tyc0}, params, init, grid);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ObservationSeries data;
  for (int i = 0; i <= months; ++i) {
    const State& x = traj.states[static_cast<std::size_t>(i * 20)];
    data.times.push_back(i);
    if (sex_split) {
      const double f = i == 0 ? x.f : std::max(0.0, x.f * (1.0 + noise * normal(rng)));
      const double m = i == 0 ? x.m : std::max(0.0, x.m * (1.0 + noise * normal(rng)));
      data.females.push_back(f);
      data.males.push_back(m);
      data.counts.push_back(f + m);
    } else {
      data.counts.push_back(i == 0 ? x.f + x.m : std::max(0.0, (x.f + x.m) * (1.0 + noise * normal(rng))));
    }
  }
  data.init = sex_split ? init : State{0.5 * data.counts[0], 0.5 * data.counts[0], 0.0};
  return data;
}

void write_observations_csv(std::ostream& out, const ObservationSeries& data) {
  using detail::num;
  out << (data.sex_split() ? "t,f,m\n" : "t,count\n");
  for (std::size_t i = 0; i < data.times.size(); ++i) {
    out << num(data.times[i]);
    if (data.sex_split())
      out << ',' << num(data.females[i]) << ',' << num(data.males[i]) << '\n';
    else
      out << ',' << num(data.counts[i]) << '\n';
  }
}

}  // namespace tyc
