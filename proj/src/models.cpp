#include "tyc/models.hpp"

#include <cmath>
#include <sstream>

#include "tyc/errors.hpp"

namespace tyc {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Validation: return "validation error";
    case ErrorKind::Parameter: return "parameter error";
    case ErrorKind::NegativeState: return "negative state";
    case ErrorKind::BlowUp: return "blow-up";
    case ErrorKind::GridMismatch: return "grid mismatch";
    case ErrorKind::Degenerate: return "degenerate case";
    case ErrorKind::SingularDerivative: return "singular derivative";
    case ErrorKind::UnsupportedModel: return "unsupported model";
    case ErrorKind::FitDiverged: return "fit diverged";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Io: return "I/O error";
  }
  return "error";
}

void LifeParams::validate() const {
  if (!(std::isfinite(beta) && beta > 0.0)) throw ValidationError("beta must be positive");
  if (!(std::isfinite(delta) && delta > 0.0 && delta < 1.0))
    throw ValidationError("delta must lie in (0, 1)");
  if (!(std::isfinite(cap_k) && cap_k > 0.0)) throw ValidationError("carrying capacity K must be positive");
}

std::string_view model_name(ModelId id) noexcept {
  switch (id) {
    case ModelId::Tyc0: return "tyc0";
    case ModelId::Fhms1: return "fhms1";
    case ModelId::Fhms2: return "fhms2";
    case ModelId::Fhms3: return "fhms3";
    case ModelId::Fhmh4: return "fhmh4";
    case ModelId::Fhmh5: return "fhmh5";
    case ModelId::Fhmh6: return "fhmh6";
  }
  return "?";
}

int model_number(ModelId id) noexcept { return static_cast<int>(id); }

std::optional<ModelId> parse_model_id(std::string_view text) noexcept {
  for (ModelId id : kAllModels) {
    if (text == model_name(id)) return id;
    if (text.size() == 1 && text[0] - '0' == model_number(id)) return id;
  }
  return std::nullopt;
}

bool is_harvesting(ModelId id) noexcept { return id != ModelId::Tyc0; }

int male_sign(ModelId id) noexcept {
  switch (id) {
    case ModelId::Fhms1:
    case ModelId::Fhms2:
    case ModelId::Fhms3: return +1;
    case ModelId::Fhmh4:
    case ModelId::Fhmh5:
    case ModelId::Fhmh6: return -1;
    case ModelId::Tyc0: return 0;
  }
  return 0;
}

HarvestShape harvest_shape(ModelId id) noexcept {
  switch (id) {
    case ModelId::Fhms2:
    case ModelId::Fhmh5: return HarvestShape::Saturating;
    case ModelId::Fhms3:
    case ModelId::Fhmh6: return HarvestShape::Power;
    default: return HarvestShape::Linear;
  }
}

int state_dimension(ModelId id) noexcept { return id == ModelId::Tyc0 ? 3 : 2; }
int control_channels(ModelId id) noexcept { return id == ModelId::Tyc0 ? 1 : 2; }

double Controls::channel(ModelId id, int k) const noexcept {
  if (id == ModelId::Tyc0) return mu;
  return k == 0 ? eta1 : eta2;
}

void Controls::set_channel(ModelId id, int k, double value) noexcept {
  if (id == ModelId::Tyc0)
    mu = value;
  else if (k == 0)
    eta1 = value;
  else
    eta2 = value;
}

void ModelSpec::validate(const LifeParams& params) const {
  auto nonneg = [](double v, const char* name) {
    if (!(std::isfinite(v) && v >= 0.0)) throw ValidationError(std::string(name) + " must be nonnegative");
  };
  nonneg(mu, "mu");
  nonneg(eta1, "eta1");
  nonneg(eta2, "eta2");
  if (harvest_shape(id) == HarvestShape::Saturating) {
    if (!(std::isfinite(d1) && d1 > 0.0)) throw ValidationError("d1 must be positive for saturating harvesting");
    if (!(std::isfinite(d2) && d2 > 0.0)) throw ValidationError("d2 must be positive for saturating harvesting");
  }
  if (male_sign(id) > 0 && eta2 > 0.0 && !(params.delta > eta2)) {
    std::ostringstream os;
    os << "male stocking requires delta > eta2 (delta=" << params.delta << ", eta2=" << eta2 << ")";
    throw ValidationError(os.str());
  }
}

double logistic_factor(const State& state, const LifeParams& params) noexcept {
  return 1.0 - (state.f + state.m + state.s) / params.cap_k;
}

namespace {

double response(HarvestShape shape, double x, double d) noexcept {
  switch (shape) {
    case HarvestShape::Linear: return x;
    case HarvestShape::Saturating: return x / (x + d);
    case HarvestShape::Power: return x * std::sqrt(x);
  }
  return x;
}

double response_prime(HarvestShape shape, double x, double d) noexcept {
  switch (shape) {
    case HarvestShape::Linear: return 1.0;
    case HarvestShape::Saturating: return d / ((x + d) * (x + d));
    case HarvestShape::Power: return 1.5 * std::sqrt(x);
  }
  return 1.0;
}

void require_nonnegative(const State& x) {
  if (x.f < 0.0 || x.m < 0.0 || x.s < 0.0) {
    std::ostringstream os;
    os.precision(17);
    os << "state has a negative component (f=" << x.f << ", m=" << x.m << ", s=" << x.s << ")";
    throw NegativeStateError(os.str());
  }
}

}  // namespace

double harvest_g1(const ModelSpec& spec, double f) noexcept { return response(harvest_shape(spec.id), f, spec.d1); }
double harvest_g2(const ModelSpec& spec, double m) noexcept { return response(harvest_shape(spec.id), m, spec.d2); }
double harvest_g1_prime(const ModelSpec& spec, double f) noexcept {
  return response_prime(harvest_shape(spec.id), f, spec.d1);
}
double harvest_g2_prime(const ModelSpec& spec, double m) noexcept {
  return response_prime(harvest_shape(spec.id), m, spec.d2);
}

State rhs(const ModelSpec& spec, const LifeParams& params, const State& x, const std::optional<Controls>& controls) {
  require_nonnegative(x);
  const Controls u = controls ? *controls : spec.constant_controls();
  if (controls && (u.mu < 0.0 || u.eta1 < 0.0 || u.eta2 < 0.0))
    throw ValidationError("control values must be nonnegative");

  const double beta = params.beta;
  const double delta = params.delta;
  if (spec.id == ModelId::Tyc0) {
    const double l = logistic_factor(x, params);
    return {0.5 * x.f * x.m * beta * l - delta * x.f, (0.5 * x.f * x.m + x.f * x.s) * beta * l - delta * x.m,
            u.mu - delta * x.s};
  }
  const double l = 1.0 - (x.f + x.m) / params.cap_k;
  const double births = 0.5 * x.f * x.m * beta * l;
  return {births - delta * x.f - u.eta1 * harvest_g1(spec, x.f),
          births - delta * x.m + male_sign(spec.id) * u.eta2 * harvest_g2(spec, x.m), 0.0};
}

Mat3 state_jacobian(const ModelSpec& spec, const LifeParams& params, const State& x, const Controls& u) {
  require_nonnegative(x);
  const double beta = params.beta;
  const double delta = params.delta;
  const double k = params.cap_k;
  Mat3 j{};
  if (spec.id == ModelId::Tyc0) {
    const double l = logistic_factor(x, params);
    const double fm_k = 0.5 * x.f * x.m * beta / k;
    const double male_k = (0.5 * x.f * x.m + x.f * x.s) * beta / k;
    j[0] = {0.5 * x.m * beta * l - fm_k - delta, 0.5 * x.f * beta * l - fm_k, -fm_k};
    j[1] = {(0.5 * x.m + x.s) * beta * l - male_k, 0.5 * x.f * beta * l - male_k - delta, x.f * beta * l - male_k};
    j[2] = {0.0, 0.0, -delta};
    return j;
  }
  const double l = 1.0 - (x.f + x.m) / k;
  const double fm_k = 0.5 * x.f * x.m * beta / k;
  const double dbirth_df = 0.5 * x.m * beta * l - fm_k;
  const double dbirth_dm = 0.5 * x.f * beta * l - fm_k;
  j[0] = {dbirth_df - delta - u.eta1 * harvest_g1_prime(spec, x.f), dbirth_dm, 0.0};
  j[1] = {dbirth_df, dbirth_dm - delta + male_sign(spec.id) * u.eta2 * harvest_g2_prime(spec, x.m), 0.0};
  j[2] = {0.0, 0.0, 0.0};
  return j;
}

Vec3 control_sensitivity(const ModelSpec& spec, const State& x, int channel) {
  if (spec.id == ModelId::Tyc0) return {0.0, 0.0, 1.0};
  if (channel == 0) return {-harvest_g1(spec, x.f), 0.0, 0.0};
  return {0.0, male_sign(spec.id) * harvest_g2(spec, x.m), 0.0};
}

}  // namespace tyc
