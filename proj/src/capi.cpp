#include "tyc.h"

#include <cmath>
#include <limits>
#include <new>
#include <string>

#include "tyc/errors.hpp"
#include "tyc/scenario.hpp"
#include "tyc/stability.hpp"

struct tyc_scenario {
  tyc::ScenarioConfig config;
};

struct tyc_run {
  tyc::RunOutput output;
};

namespace {

thread_local std::string g_last_error;
thread_local double g_blowup_time = std::numeric_limits<double>::quiet_NaN();

tyc_status status_for(tyc::ErrorKind kind) {
  switch (kind) {
    case tyc::ErrorKind::Validation:
    case tyc::ErrorKind::Parameter:
    case tyc::ErrorKind::GridMismatch:
    case tyc::ErrorKind::UnsupportedModel:
    case tyc::ErrorKind::Parse:
      return TYC_ERR_VALIDATION;
    case tyc::ErrorKind::NegativeState:
    case tyc::ErrorKind::BlowUp:
    case tyc::ErrorKind::Degenerate:
    case tyc::ErrorKind::SingularDerivative:
    case tyc::ErrorKind::FitDiverged:
      return TYC_ERR_NUMERICAL;
    case tyc::ErrorKind::Io:
      return TYC_ERR_IO;
  }
  return TYC_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into status codes and the thread-local message.
template <class F>
tyc_status guarded(F&& body) {
  g_last_error.clear();
  g_blowup_time = std::numeric_limits<double>::quiet_NaN();
  try {
    return body();
  } catch (const tyc::BlowUpError& e) {
    g_last_error = std::string(to_string(e.kind())) + ": " + e.what();
    g_blowup_time = e.last_valid_time();
    return TYC_ERR_NUMERICAL;
  } catch (const tyc::Error& e) {
    g_last_error = std::string(to_string(e.kind())) + ": " + e.what();
    return status_for(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return TYC_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = std::string("internal error: ") + e.what();
    return TYC_ERR_INTERNAL;
  }
}

tyc_status null_argument(const char* name) {
  g_last_error = std::string("validation: ") + name + " must not be NULL";
  return TYC_ERR_VALIDATION;
}

template <class F>
tyc_status make_run(tyc_run** out, F&& produce) {
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto* run = new tyc_run{produce()};
    *out = run;
    if (run->output.status != 0) {
      g_last_error = "numerical: sweep did not converge";
      return static_cast<tyc_status>(run->output.status);
    }
    return TYC_OK;
  });
}

const char* text_or_empty(const tyc_run* run, std::string tyc::RunOutput::*field) {
  return run ? (run->output.*field).c_str() : "";
}

}  // namespace

extern "C" {

const char* tyc_version(void) { return "1.0.0"; }

const char* tyc_last_error(void) { return g_last_error.c_str(); }

double tyc_last_blowup_time(void) { return g_blowup_time; }

tyc_status tyc_scenario_new(tyc_scenario** out) {
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new tyc_scenario{};
    return TYC_OK;
  });
}

tyc_status tyc_scenario_from_string(const char* text, tyc_scenario** out) {
  if (!text) return null_argument("text");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto cfg = tyc::parse_config(text);
    cfg.validate();
    *out = new tyc_scenario{std::move(cfg)};
    return TYC_OK;
  });
}

tyc_status tyc_scenario_from_file(const char* path, tyc_scenario** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto cfg = tyc::load_config(path);
    cfg.validate();
    *out = new tyc_scenario{std::move(cfg)};
    return TYC_OK;
  });
}

tyc_status tyc_scenario_set(tyc_scenario* scenario, const char* key, const char* value) {
  if (!scenario) return null_argument("scenario");
  if (!key || !value) return null_argument("key/value");
  return guarded([&] {
    // Apply to a copy so a rejected value leaves the scenario untouched.
    tyc::ScenarioConfig next = scenario->config;
    next.set(key, value);
    scenario->config = std::move(next);
    return TYC_OK;
  });
}

const char* tyc_scenario_out_dir(const tyc_scenario* scenario) {
  return scenario ? scenario->config.out_dir.c_str() : ".";
}

void tyc_scenario_free(tyc_scenario* scenario) { delete scenario; }

tyc_status tyc_analyze(const tyc_scenario* scenario, tyc_run** out) {
  if (!scenario) return null_argument("scenario");
  return make_run(out, [&] { return tyc::run_analyze(scenario->config); });
}

tyc_status tyc_simulate(const tyc_scenario* scenario, tyc_run** out) {
  if (!scenario) return null_argument("scenario");
  return make_run(out, [&] { return tyc::run_simulate(scenario->config); });
}

tyc_status tyc_optimize(const tyc_scenario* scenario, tyc_run** out) {
  if (!scenario) return null_argument("scenario");
  return make_run(out, [&] { return tyc::run_optimize(scenario->config); });
}

tyc_status tyc_compare(const tyc_scenario* scenario, const char* models, tyc_run** out) {
  if (!scenario) return null_argument("scenario");
  return make_run(out, [&] {
    const auto list = models ? tyc::parse_model_list(models) : scenario->config.compare_models;
    return tyc::run_compare(scenario->config, list);
  });
}

tyc_status tyc_fit_file(const char* data_path, const tyc_scenario* guess, tyc_run** out) {
  if (!data_path) return null_argument("data_path");
  return make_run(out, [&] {
    const auto data = tyc::read_observations_file(data_path);
    return tyc::run_fit(data, guess ? guess->config : tyc::ScenarioConfig{});
  });
}

const char* tyc_run_json(const tyc_run* run) { return text_or_empty(run, &tyc::RunOutput::json); }
const char* tyc_run_csv(const tyc_run* run) { return text_or_empty(run, &tyc::RunOutput::csv); }
const char* tyc_run_text(const tyc_run* run) { return text_or_empty(run, &tyc::RunOutput::text); }
const char* tyc_run_svg(const tyc_run* run) { return text_or_empty(run, &tyc::RunOutput::svg); }
const char* tyc_run_stem(const tyc_run* run) { return text_or_empty(run, &tyc::RunOutput::stem); }

int tyc_run_converged(const tyc_run* run) { return run && run->output.converged ? 1 : 0; }

void tyc_run_free(tyc_run* run) { delete run; }

tyc_status tyc_rhs(int model, const double params[3], const double controls[5], const double state[3],
                   double out[3]) {
  if (!params || !controls || !state || !out) return null_argument("arrays");
  return guarded([&] {
    if (model < 0 || model > 6) throw tyc::ValidationError("model must be 0..6");
    const tyc::LifeParams p{params[0], params[1], params[2]};
    p.validate();
    tyc::ModelSpec spec{tyc::kAllModels[static_cast<std::size_t>(model)], controls[0], controls[1], controls[2],
                        controls[3], controls[4]};
    const tyc::State r = tyc::rhs(spec, p, {state[0], state[1], state[2]});
    out[0] = r.f;
    out[1] = r.m;
    out[2] = r.s;
    return TYC_OK;
  });
}

double tyc_logistic_factor(const double params[3], const double state[3]) {
  if (!params || !state) return std::numeric_limits<double>::quiet_NaN();
  return tyc::logistic_factor({state[0], state[1], state[2]}, {params[0], params[1], params[2]});
}

tyc_status tyc_boundary_eigenvalues(double delta, double re[3], double im[3]) {
  if (!re || !im) return null_argument("re/im");
  return guarded([&] {
    if (!(delta > 0.0 && delta < 1.0)) throw tyc::ValidationError("delta must lie in (0, 1)");
    tyc::LifeParams p;
    p.delta = delta;
    const auto eig = tyc::boundary_eigenvalues(p);
    for (int i = 0; i < 3; ++i) {
      re[i] = eig[static_cast<std::size_t>(i)].real();
      im[i] = eig[static_cast<std::size_t>(i)].imag();
    }
    return TYC_OK;
  });
}

}  // extern "C"
