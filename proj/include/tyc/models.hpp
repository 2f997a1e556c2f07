#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace tyc {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

/// Life-history parameters shared by every model.
struct LifeParams {
  double beta = 0.0057;   ///< birth coefficient, 1/(individual*month)
  double delta = 0.0648;  ///< death rate, 1/month
  double cap_k = 405.0;   ///< carrying capacity, individuals

  /// Throws ValidationError unless 0 < beta, 0 < delta < 1 and cap_k > 0.
  void validate() const;
};

/// The seven population models. Tyc0 is the classical three-variable
/// supermale model; the rest are two-sex harvesting variants where the
/// female term is -eta1*G1(f) and the male term is +eta2*G2(m) (stocking,
/// Fhms*) or -eta2*G2(m) (harvesting, Fhmh*).
enum class ModelId { Tyc0, Fhms1, Fhms2, Fhms3, Fhmh4, Fhmh5, Fhmh6 };

inline constexpr std::array<ModelId, 7> kAllModels = {ModelId::Tyc0,  ModelId::Fhms1, ModelId::Fhms2,
                                                       ModelId::Fhms3, ModelId::Fhmh4, ModelId::Fhmh5,
                                                       ModelId::Fhmh6};

enum class HarvestShape { Linear, Saturating, Power };

std::string_view model_name(ModelId id) noexcept;
/// Accepts "tyc0", "fhms1".. "fhmh6", and the bare digits "0".."6".
std::optional<ModelId> parse_model_id(std::string_view text) noexcept;
int model_number(ModelId id) noexcept;

bool is_harvesting(ModelId id) noexcept;
/// +1 for male stocking (Fhms1-3), -1 for male harvesting (Fhmh4-6), 0 for Tyc0.
int male_sign(ModelId id) noexcept;
HarvestShape harvest_shape(ModelId id) noexcept;
/// 3 for Tyc0 (f, m, s), 2 for the harvesting models.
int state_dimension(ModelId id) noexcept;
/// 1 for Tyc0 (mu), 2 for the harvesting models (eta1, eta2).
int control_channels(ModelId id) noexcept;

/// Control values. Only `mu` is read by Tyc0; only eta1/eta2 by the rest.
struct Controls {
  double mu = 0.0;
  double eta1 = 0.0;
  double eta2 = 0.0;

  double channel(ModelId id, int k) const noexcept;
  void set_channel(ModelId id, int k, double value) noexcept;
};

struct ModelSpec {
  ModelId id = ModelId::Tyc0;
  double mu = 0.0;    ///< supermale introduction rate (Tyc0)
  double eta1 = 0.0;  ///< female removal coefficient
  double eta2 = 0.0;  ///< male stocking/removal coefficient
  double d1 = 1.0;    ///< saturation constant for G1 (Models 2 and 5)
  double d2 = 1.0;    ///< saturation constant for G2 (Models 2 and 5)

  Controls constant_controls() const noexcept { return {mu, eta1, eta2}; }
  /// Checks the sign constraints and, for stocking models, delta > eta2.
  void validate(const LifeParams& params) const;
};

struct State {
  double f = 0.0;
  double m = 0.0;
  double s = 0.0;

  Vec3 as_array() const noexcept { return {f, m, s}; }
  static State from_array(const Vec3& v) noexcept { return {v[0], v[1], v[2]}; }
};

/// 1 - (f+m+s)/K, unclamped. Harvesting models carry s = 0.
double logistic_factor(const State& state, const LifeParams& params) noexcept;

// Harvesting/stocking response functions and their derivatives.
double harvest_g1(const ModelSpec& spec, double f) noexcept;
double harvest_g2(const ModelSpec& spec, double m) noexcept;
double harvest_g1_prime(const ModelSpec& spec, double f) noexcept;
double harvest_g2_prime(const ModelSpec& spec, double m) noexcept;

/// Right-hand side (df/dt, dm/dt, ds/dt). `controls` overrides the
/// constants in `spec`. Throws NegativeStateError on a negative component
/// and ValidationError on a negative control override.
State rhs(const ModelSpec& spec, const LifeParams& params, const State& state,
          const std::optional<Controls>& controls = std::nullopt);

/// Analytic d(rhs)/d(state) at `state`; the s row/column is zero for the
/// harvesting models.
Mat3 state_jacobian(const ModelSpec& spec, const LifeParams& params, const State& state,
                    const Controls& controls);

/// d(rhs)/d(control channel k), as a 3-vector, for k < control_channels().
Vec3 control_sensitivity(const ModelSpec& spec, const State& state, int channel);

}  // namespace tyc
