#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rcdamage/error.hpp"
#include "rcdamage/geometry.hpp"

namespace rcdamage {

/// Ordinal damage state of an RC column.
///   DS0 none, DS1 light (flexural/shear cracks), DS2 moderate (spalling),
///   DS3 severe (core crushing, exposed or buckled/fractured rebar).
enum class DamageState : int { DS0 = 0, DS1 = 1, DS2 = 2, DS3 = 3 };

inline constexpr std::size_t num_damage_states = 4;

inline constexpr std::array<DamageState, num_damage_states> all_damage_states{
    DamageState::DS0, DamageState::DS1, DamageState::DS2, DamageState::DS3};

inline std::string_view to_string(DamageState ds) {
  switch (ds) {
  case DamageState::DS0: return "DS0";
  case DamageState::DS1: return "DS1";
  case DamageState::DS2: return "DS2";
  case DamageState::DS3: return "DS3";
  }
  return "?";
}

inline std::optional<DamageState> parse_damage_state(std::string_view s) {
  for (DamageState ds : all_damage_states)
    if (s == to_string(ds))
      return ds;
  return std::nullopt;
}

inline std::size_t index_of(DamageState ds) { return static_cast<std::size_t>(ds); }

inline constexpr double probability_sum_tolerance = 1e-6;

struct ClassificationOutput {
  std::array<double, num_damage_states> probabilities{};
};

inline void validate(const ClassificationOutput &c, const std::string &where = "classifier output") {
  double sum = 0.0;
  for (std::size_t i = 0; i < num_damage_states; ++i) {
    const double p = c.probabilities[i];
    if (!(p >= 0.0 && p <= 1.0))
      throw input_error(where + ": probability for DS" + std::to_string(i) +
                        " must lie in [0,1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > probability_sum_tolerance)
    throw input_error(where + ": probabilities sum to " + std::to_string(sum) +
                      ", expected 1");
}

/// Most probable state; ties resolve toward the more severe state.
inline DamageState argmax_state(const ClassificationOutput &c) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < num_damage_states; ++i)
    if (c.probabilities[i] >= c.probabilities[best])
      best = i;
  return static_cast<DamageState>(best);
}

struct ComponentAssessment {
  std::string component_id;
  DamageState classifier_state = DamageState::DS0;
  bool steel_detected = false;
  std::vector<BoundingBox> detections;
  DamageState final_state = DamageState::DS0;
};

struct BuildingAssessment {
  bool collapsed = false;
  std::vector<ComponentAssessment> components;
};

/// Classifier decides unless exposed reinforcement is detected, in which case
/// the component is DS3.
inline ComponentAssessment determine_damage_state(const ClassificationOutput &cls,
                                                  std::vector<BoundingBox> dets,
                                                  double det_threshold = 0.5,
                                                  std::string component_id = {}) {
  validate(cls, component_id.empty() ? "classifier output" : component_id);
  if (!(det_threshold >= 0.0 && det_threshold <= 1.0))
    throw input_error("fusion: det_threshold must lie in [0,1]");
  ComponentAssessment a;
  a.component_id = std::move(component_id);
  a.classifier_state = argmax_state(cls);
  for (const auto &d : dets) {
    if (!d.score)
      throw input_error("fusion: detection without score for component '" +
                        a.component_id + "'");
    if (*d.score >= det_threshold)
      a.steel_detected = true;
  }
  a.detections = std::move(dets);
  a.final_state = a.steel_detected ? DamageState::DS3 : a.classifier_state;
  return a;
}

struct ComponentInput {
  std::string component_id;
  ClassificationOutput classification;
  std::vector<BoundingBox> detections;
};

inline BuildingAssessment assess_building(double collapse_prob, double collapse_threshold,
                                          const std::vector<ComponentInput> &components,
                                          double det_threshold = 0.5) {
  if (!(collapse_prob >= 0.0 && collapse_prob <= 1.0))
    throw input_error("building: collapse probability must lie in [0,1]");
  if (!(collapse_threshold >= 0.0 && collapse_threshold <= 1.0))
    throw input_error("building: collapse threshold must lie in [0,1]");
  BuildingAssessment b;
  b.collapsed = collapse_prob >= collapse_threshold;
  if (b.collapsed)
    return b;
  b.components.reserve(components.size());
  for (const auto &c : components)
    b.components.push_back(
        determine_damage_state(c.classification, c.detections, det_threshold, c.component_id));
  return b;
}

/// Collapses several views of one component into the most severe outcome.
inline ComponentAssessment reduce_multiview(const std::vector<ComponentAssessment> &views) {
  if (views.empty())
    throw input_error("multiview: at least one view is required");
  ComponentAssessment out = views.front();
  out.detections.clear();
  for (const auto &v : views) {
    if (v.final_state > out.final_state)
      out.final_state = v.final_state;
    if (v.classifier_state > out.classifier_state)
      out.classifier_state = v.classifier_state;
    out.steel_detected = out.steel_detected || v.steel_detected;
    out.detections.insert(out.detections.end(), v.detections.begin(), v.detections.end());
  }
  return out;
}

} // namespace rcdamage
