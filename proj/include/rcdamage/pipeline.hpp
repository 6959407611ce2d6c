#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "rcdamage/cost_model.hpp"
#include "rcdamage/fusion.hpp"
#include "rcdamage/io_formats.hpp"

namespace rcdamage {

struct FusionThresholds {
  double detection = 0.5;
  double collapse = 0.5;
};

/// Building assessment plus the fragility id of every assessed component,
/// index-aligned with `building.components`.
struct InventoryAssessment {
  BuildingAssessment building;
  std::vector<std::string> fragility_ids;
  std::vector<std::size_t> group_index;

  std::array<std::size_t, num_damage_states> state_counts() const {
    std::array<std::size_t, num_damage_states> n{};
    for (const auto &c : building.components)
      ++n[index_of(c.final_state)];
    return n;
  }
};

/// Runs the damage-state fusion over every component of an inventory. Each
/// view is fused on its own and multiple views reduce to the most severe one.
inline InventoryAssessment assess_inventory(const io::InventoryFile &inv,
                                            const std::filesystem::path &base_dir,
                                            const FusionThresholds &th = {}) {
  if (!(th.collapse >= 0.0 && th.collapse <= 1.0))
    throw input_error("fuse: collapse threshold must lie in [0,1]");
  InventoryAssessment out;
  out.building.collapsed = inv.collapse_probability >= th.collapse;
  if (out.building.collapsed)
    return out;
  for (std::size_t g = 0; g < inv.groups.size(); ++g) {
    const auto &group = inv.groups[g];
    for (const auto &comp : group.components) {
      std::vector<ComponentAssessment> views;
      for (const auto &v : comp.views)
        views.push_back(determine_damage_state(v.classification, io::resolve(v.detections, base_dir),
                                               th.detection, comp.component_id));
      out.building.components.push_back(reduce_multiview(views));
      out.fragility_ids.push_back(group.fragility_id);
      out.group_index.push_back(g);
    }
  }
  return out;
}

/// Performance groups for the cost simulation, one per inventory group, in
/// inventory order.
inline std::vector<PerformanceGroup> performance_groups(const io::InventoryFile &inv,
                                                        const InventoryAssessment &a) {
  std::vector<PerformanceGroup> groups;
  for (const auto &g : inv.groups)
    groups.push_back({g.fragility_id, g.quantity, {}});
  for (std::size_t i = 0; i < a.building.components.size(); ++i)
    groups[a.group_index[i]].component_states.push_back(a.building.components[i].final_state);
  return groups;
}

} // namespace rcdamage
