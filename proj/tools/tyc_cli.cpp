// Command-line front end over the C API.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "tyc.h"

namespace {

struct Options {
  std::string config;
  std::string out_dir;
  std::string data;
  std::string models;
  std::vector<std::string> sets;
  bool plot = false;
  long long seed = -1;
  double dt = 0.0;
  double epsilon = 0.0;
  bool quiet = false;
};

int fail(tyc_status status) {
  std::cerr << "tyc: " << tyc_last_error() << '\n';
  const double t = tyc_last_blowup_time();
  if (t == t) std::cerr << "tyc: last valid time " << t << '\n';
  return static_cast<int>(status);
}

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

tyc_status apply(tyc_scenario* sc, const std::string& key, const std::string& value) {
  return tyc_scenario_set(sc, key.c_str(), value.c_str());
}

tyc_status build_scenario(const Options& o, tyc_scenario** out) {
  tyc_status st = o.config.empty() ? tyc_scenario_new(out) : tyc_scenario_from_file(o.config.c_str(), out);
  if (st != TYC_OK) return st;
  auto set = [&](const std::string& k, const std::string& v) {
    if (st == TYC_OK) st = apply(*out, k, v);
  };
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "tyc: --set expects key=value, got '%s'\n", kv.c_str());
      return TYC_ERR_VALIDATION;
    }
    set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!o.out_dir.empty()) set("output.dir", o.out_dir);
  if (o.seed >= 0) set("run.seed", std::to_string(o.seed));
  if (o.dt > 0.0) set("grid.dt", exact(o.dt));
  if (o.epsilon > 0.0) set("metrics.epsilon", exact(o.epsilon));
  if (!o.models.empty()) set("compare.models", o.models);
  return st;
}

bool write_file(const std::filesystem::path& path, const char* text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  return static_cast<bool>(f);
}

// Writes every non-empty product of `run` to <dir>/<stem>.{json,csv,txt,svg}.
int emit(const tyc_run* run, const Options& o, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    std::cerr << "tyc: cannot create " << dir << ": " << ec.message() << '\n';
    return TYC_ERR_IO;
  }
  const std::string stem = tyc_run_stem(run);
  struct Product {
    const char* ext;
    const char* text;
  };
  std::vector<Product> products{{".json", tyc_run_json(run)}, {".csv", tyc_run_csv(run)}, {".txt", tyc_run_text(run)}};
  if (o.plot) products.push_back({".svg", tyc_run_svg(run)});
  for (const auto& p : products) {
    if (!*p.text) continue;
    const fs::path path = fs::path(dir) / (stem + p.ext);
    if (!write_file(path, p.text)) {
      std::cerr << "tyc: cannot write " << path.string() << '\n';
      return TYC_ERR_IO;
    }
    if (!o.quiet) std::cout << "wrote " << path.string() << '\n';
  }
  if (*tyc_run_text(run) && !o.quiet) std::cout << tyc_run_text(run);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trojan Y chromosome population control: fitting, stability and optimal control"};
  app.set_version_flag("--version", std::string(tyc_version()));
  app.require_subcommand(1);

  Options o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", o.config, "scenario file (INI or JSON)");
    sub->add_option("-o,--out-dir", o.out_dir, "output directory (overrides [output] dir)");
    sub->add_option("-s,--set", o.sets, "override a config key, e.g. --set model.id=fhms1");
    sub->add_option("--dt", o.dt, "integration step")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "RNG seed for randomized diagnostics")->check(CLI::NonNegativeNumber);
    sub->add_option("--epsilon", o.epsilon, "eradication threshold")->check(CLI::PositiveNumber);
    sub->add_flag("--plot", o.plot, "also write an SVG plot");
    sub->add_flag("-q,--quiet", o.quiet, "only report errors");
  };

  auto* fit = app.add_subcommand("fit", "fit beta, delta, K to a CSV of counts");
  common(fit);
  fit->add_option("data", o.data, "CSV with header t,count or t,f,m")->required();

  auto* analyze = app.add_subcommand("analyze", "equilibria and local stability");
  common(analyze);
  auto* simulate = app.add_subcommand("simulate", "integrate with constant controls");
  common(simulate);
  auto* optimize = app.add_subcommand("optimize", "optimal control by forward-backward sweep");
  common(optimize);
  auto* compare = app.add_subcommand("compare", "optimize several models and compare");
  common(compare);
  compare->add_option("-m,--models", o.models, "e.g. all, 1-6, tyc0,fhms1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : TYC_ERR_VALIDATION;
  }

  tyc_scenario* sc = nullptr;
  tyc_status st = build_scenario(o, &sc);
  if (st != TYC_OK) {
    tyc_scenario_free(sc);
    return fail(st);
  }

  tyc_run* run = nullptr;
  if (fit->parsed())
    st = tyc_fit_file(o.data.c_str(), sc, &run);
  else if (analyze->parsed())
    st = tyc_analyze(sc, &run);
  else if (simulate->parsed())
    st = tyc_simulate(sc, &run);
  else if (optimize->parsed())
    st = tyc_optimize(sc, &run);
  else
    st = tyc_compare(sc, nullptr, &run);

  int code = 0;
  if (run) {
    // Partial results (e.g. an unconverged sweep) are still written.
    code = emit(run, o, tyc_scenario_out_dir(sc));
  }
  if (st != TYC_OK) code = fail(st);
  tyc_run_free(run);
  tyc_scenario_free(sc);
  return code;
}
