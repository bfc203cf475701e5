#pragma once

#include "millmass/toolpath.hpp"
#include "millmass/workpiece.hpp"

#include <optional>
#include <string_view>

namespace millmass {

// Built-in paths. Waypoints are laid out on the box (its local frame, top
// face at z = dims.z) and mapped into the machine frame with the box
// placement, so a tilted box gets the same features with a vertical tool.
enum class ScenarioKind
{
    Slot,    // full-width slot, depth 2, length dims.x - 10
    Steps,   // stepped test geometry: slot, widening cut, half-immersion edge cut
    Slab,    // serpentine facing of the whole top to depth 3
    Pocket,  // serpentine pocket with a closing contour, depth 3, 2 mm walls
};

struct ScenarioOptions
{
    double stepover = 8.0;    // mm, between adjacent serpentine passes
    double tool_radius = 5.0;
    double clearance = 5.0;   // retract height above the top face
};

std::optional<ScenarioKind> parse_scenario_kind(std::string_view name);
std::string_view to_string(ScenarioKind kind);

ToolPath make_scenario(ScenarioKind kind, const BoxStock& stock, const ScenarioOptions& options = {});

// Closed-form removed volume of the untilted slot and pocket scenarios.
double slot_volume(const BoxStock& stock, const ScenarioOptions& options = {});
double pocket_volume(const BoxStock& stock, const ScenarioOptions& options = {});

} // namespace millmass
