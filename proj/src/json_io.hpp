#pragma once

#include <json.hpp>

#include "tyc/control.hpp"
#include "tyc/models.hpp"

namespace tyc::detail {

using nlohmann::ordered_json;

inline ordered_json to_json(const LifeParams& p) {
  return {{"beta", p.beta}, {"delta", p.delta}, {"K", p.cap_k}};
}

inline ordered_json to_json(const ModelSpec& s) {
  ordered_json j{{"id", std::string(model_name(s.id))}};
  if (s.id == ModelId::Tyc0) {
    j["mu"] = s.mu;
  } else {
    j["eta1"] = s.eta1;
    j["eta2"] = s.eta2;
    if (harvest_shape(s.id) == HarvestShape::Saturating) {
      j["d1"] = s.d1;
      j["d2"] = s.d2;
    }
  }
  return j;
}

inline ordered_json to_json(const State& x) { return {x.f, x.m, x.s}; }

inline ordered_json to_json(const TimeGrid& g) {
  return {{"t0", g.t0}, {"t_end", g.t_end}, {"n_steps", g.n_steps}, {"dt", g.dt()}};
}

// Defined in control.cpp.
ordered_json sweep_to_json(const SweepResult& r);

}  // namespace tyc::detail
