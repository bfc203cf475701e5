#pragma once

#include "millmass/engagement.hpp"
#include "millmass/mass_model.hpp"
#include "millmass/oracle.hpp"
#include "millmass/tool.hpp"
#include "millmass/workpiece.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace millmass {

enum class MillingMode
{
    Down,
    Up,
};

struct ScenarioConfig
{
    Tool tool;

    Vec3 box_dims{60.0, 60.0, 20.0};
    Vec3 origin;                     // machine position of the box corner (0,0,0)
    double tilt_deg = 0.0;           // [0, 45]
    Vec3 tilt_axis{1.0, 0.0, 0.0};   // normalized on load
    double density = 2.81e-3;        // g/mm^3

    double path_step = 0.5;   // mm
    double dphi_deg = 0.4;    // engagement sampling and arc polygonization, <= 0.5
    double grid = 0.1;        // dexel spacing, mm
    double voxel = 0.05;      // oracle spacing, mm

    MillingMode milling_mode = MillingMode::Down;

    bool oracle_raw_path = false;
    std::uint64_t max_cells = kDefaultMaxCells;

    std::string out_table;
    std::string out_removal;
    std::string out_oracle;
    std::string out_report;

    BoxStock stock() const;
    RunConfig run_config() const;
    // Throws ConfigError naming the offending JSON pointer.
    void validate() const;
    // Effective settings as key=value pairs, in a fixed order.
    std::vector<std::pair<std::string, std::string>> provenance() const;
};

std::string_view to_string(MillingMode m);
RotationSense rotation_sense(MillingMode m);

// Parses a JSON document over the defaults. Unknown keys, wrong types and
// out-of-range values raise ConfigError with the JSON pointer of the field.
ScenarioConfig parse_config(std::string_view json_text);
ScenarioConfig load_config(const std::filesystem::path& file);

// Serializes the effective configuration (round-trips through parse_config).
std::string config_to_json(const ScenarioConfig& cfg);

} // namespace millmass
