#include "millmass/config.hpp"

#include "millmass/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace millmass {

using nlohmann::json;

namespace {

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string fmt(const Vec3& v) { return fmt(v.x) + " " + fmt(v.y) + " " + fmt(v.z); }

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed)
{
    if (!obj.is_object())
        throw ConfigError(path.empty() ? "/" : path, "expected an object");
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key))
            throw ConfigError(path + "/" + key, "unknown key");
}

void read_number(const json& obj, const std::string& path, const char* key, double& out)
{
    if (!obj.contains(key))
        return;
    const json& v = obj.at(key);
    if (!v.is_number())
        throw ConfigError(path + "/" + key, "expected a number");
    out = v.get<double>();
    if (!std::isfinite(out))
        throw ConfigError(path + "/" + key, "must be finite");
}

void read_int(const json& obj, const std::string& path, const char* key, int& out)
{
    if (!obj.contains(key))
        return;
    const json& v = obj.at(key);
    if (!v.is_number_integer())
        throw ConfigError(path + "/" + key, "expected an integer");
    out = v.get<int>();
}

void read_vec3(const json& obj, const std::string& path, const char* key, Vec3& out)
{
    if (!obj.contains(key))
        return;
    const json& v = obj.at(key);
    const std::string p = path + "/" + key;
    if (!v.is_array() || v.size() != 3)
        throw ConfigError(p, "expected an array of three numbers");
    double c[3];
    for (std::size_t i = 0; i < 3; ++i)
    {
        if (!v[i].is_number())
            throw ConfigError(p + "/" + std::to_string(i), "expected a number");
        c[i] = v[i].get<double>();
    }
    out = {c[0], c[1], c[2]};
}

void read_string(const json& obj, const std::string& path, const char* key, std::string& out)
{
    if (!obj.contains(key))
        return;
    const json& v = obj.at(key);
    if (!v.is_string())
        throw ConfigError(path + "/" + key, "expected a string");
    out = v.get<std::string>();
}

void require_positive(double v, const char* path)
{
    if (!(v > 0.0))
        throw ConfigError(path, "must be positive");
}

} // namespace

std::string_view to_string(MillingMode m) { return m == MillingMode::Down ? "down" : "up"; }

RotationSense rotation_sense(MillingMode m)
{
    return m == MillingMode::Down ? RotationSense::Clockwise : RotationSense::CounterClockwise;
}

BoxStock ScenarioConfig::stock() const
{
    BoxStock s;
    s.dims = box_dims;
    s.placement = tilt_transform(tilt_deg, tilt_axis, origin);
    return s;
}

RunConfig ScenarioConfig::run_config() const
{
    RunConfig rc;
    rc.dphi_sample = deg2rad(dphi_deg);
    rc.dphi_polygon = deg2rad(dphi_deg);
    rc.sense = rotation_sense(milling_mode);
    return rc;
}

void ScenarioConfig::validate() const
{
    require_positive(tool.diameter, "/tool/diameter_mm");
    if (tool.flute_count < 1)
        throw ConfigError("/tool/flute_count", "must be at least 1");
    if (!(tool.helix_angle >= 0.0 && tool.helix_angle < 90.0))
        throw ConfigError("/tool/helix_deg", "must be in [0, 90)");
    require_positive(tool.flute_length, "/tool/flute_length_mm");
    require_positive(tool.disk_height, "/tool/disk_height_mm");
    if (tool.disk_height > tool.flute_length)
        throw ConfigError("/tool/disk_height_mm", "must not exceed the flute length");
    if (!(box_dims.x > 0.0 && box_dims.y > 0.0 && box_dims.z > 0.0))
        throw ConfigError("/workpiece/box_mm", "all dimensions must be positive");
    if (!origin.is_finite())
        throw ConfigError("/workpiece/origin_mm", "must be finite");
    if (!(tilt_deg >= 0.0 && tilt_deg <= 45.0))
        throw ConfigError("/workpiece/tilt_deg", "must be in [0, 45]");
    if (std::abs(norm(tilt_axis) - 1.0) > 1e-9)
        throw ConfigError("/workpiece/tilt_axis", "must be a unit vector");
    require_positive(density, "/workpiece/density_g_mm3");
    require_positive(path_step, "/resolution/path_step_mm");
    require_positive(dphi_deg, "/resolution/dphi_deg");
    if (dphi_deg > 0.5)
        throw ConfigError("/resolution/dphi_deg", "must not exceed 0.5");
    require_positive(grid, "/resolution/grid_mm");
    require_positive(voxel, "/resolution/voxel_mm");
    if (max_cells == 0)
        throw ConfigError("/oracle/max_cells", "must be positive");
}

std::vector<std::pair<std::string, std::string>> ScenarioConfig::provenance() const
{
    return {
        {"tool.diameter_mm", fmt(tool.diameter)},
        {"tool.flute_count", std::to_string(tool.flute_count)},
        {"tool.helix_deg", fmt(tool.helix_angle)},
        {"tool.flute_length_mm", fmt(tool.flute_length)},
        {"tool.disk_height_mm", fmt(tool.disk_height)},
        {"workpiece.box_mm", fmt(box_dims)},
        {"workpiece.origin_mm", fmt(origin)},
        {"workpiece.tilt_deg", fmt(tilt_deg)},
        {"workpiece.tilt_axis", fmt(tilt_axis)},
        {"workpiece.density_g_mm3", fmt(density)},
        {"resolution.path_step_mm", fmt(path_step)},
        {"resolution.dphi_deg", fmt(dphi_deg)},
        {"resolution.grid_mm", fmt(grid)},
        {"resolution.voxel_mm", fmt(voxel)},
        {"milling_mode", std::string(to_string(milling_mode))},
        {"oracle.raw_path", oracle_raw_path ? "true" : "false"},
        {"oracle.max_cells", std::to_string(max_cells)},
    };
}

ScenarioConfig parse_config(std::string_view json_text)
{
    json doc;
    try
    {
        doc = json::parse(json_text);
    }
    catch (const json::parse_error& e)
    {
        throw ConfigError("/", std::string("invalid JSON: ") + e.what());
    }

    ScenarioConfig cfg;
    check_keys(doc, "", {"tool", "workpiece", "resolution", "milling_mode", "oracle", "output"});

    if (doc.contains("tool"))
    {
        const json& t = doc["tool"];
        check_keys(t, "/tool", {"diameter_mm", "flute_count", "helix_deg", "flute_length_mm", "disk_height_mm"});
        read_number(t, "/tool", "diameter_mm", cfg.tool.diameter);
        read_int(t, "/tool", "flute_count", cfg.tool.flute_count);
        read_number(t, "/tool", "helix_deg", cfg.tool.helix_angle);
        read_number(t, "/tool", "flute_length_mm", cfg.tool.flute_length);
        read_number(t, "/tool", "disk_height_mm", cfg.tool.disk_height);
    }
    if (doc.contains("workpiece"))
    {
        const json& w = doc["workpiece"];
        check_keys(w, "/workpiece", {"box_mm", "origin_mm", "tilt_deg", "tilt_axis", "density_g_mm3"});
        read_vec3(w, "/workpiece", "box_mm", cfg.box_dims);
        read_vec3(w, "/workpiece", "origin_mm", cfg.origin);
        read_number(w, "/workpiece", "tilt_deg", cfg.tilt_deg);
        read_vec3(w, "/workpiece", "tilt_axis", cfg.tilt_axis);
        read_number(w, "/workpiece", "density_g_mm3", cfg.density);
        const double len = norm(cfg.tilt_axis);
        if (!(len > 1e-12) || !std::isfinite(len))
            throw ConfigError("/workpiece/tilt_axis", "must be a nonzero vector");
        cfg.tilt_axis = cfg.tilt_axis / len;
    }
    if (doc.contains("resolution"))
    {
        const json& r = doc["resolution"];
        check_keys(r, "/resolution", {"path_step_mm", "dphi_deg", "grid_mm", "voxel_mm"});
        read_number(r, "/resolution", "path_step_mm", cfg.path_step);
        read_number(r, "/resolution", "dphi_deg", cfg.dphi_deg);
        read_number(r, "/resolution", "grid_mm", cfg.grid);
        read_number(r, "/resolution", "voxel_mm", cfg.voxel);
    }
    if (doc.contains("milling_mode"))
    {
        std::string mode;
        read_string(doc, "", "milling_mode", mode);
        if (mode == "down")
            cfg.milling_mode = MillingMode::Down;
        else if (mode == "up")
            cfg.milling_mode = MillingMode::Up;
        else
            throw ConfigError("/milling_mode", "expected \"down\" or \"up\"");
    }
    if (doc.contains("oracle"))
    {
        const json& o = doc["oracle"];
        check_keys(o, "/oracle", {"raw_path", "max_cells"});
        if (o.contains("raw_path"))
        {
            if (!o["raw_path"].is_boolean())
                throw ConfigError("/oracle/raw_path", "expected a boolean");
            cfg.oracle_raw_path = o["raw_path"].get<bool>();
        }
        if (o.contains("max_cells"))
        {
            if (!o["max_cells"].is_number_unsigned())
                throw ConfigError("/oracle/max_cells", "expected a positive integer");
            cfg.max_cells = o["max_cells"].get<std::uint64_t>();
        }
    }
    if (doc.contains("output"))
    {
        const json& o = doc["output"];
        check_keys(o, "/output", {"table", "removal", "oracle", "report"});
        read_string(o, "/output", "table", cfg.out_table);
        read_string(o, "/output", "removal", cfg.out_removal);
        read_string(o, "/output", "oracle", cfg.out_oracle);
        read_string(o, "/output", "report", cfg.out_report);
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& file)
{
    std::ifstream in(file);
    if (!in)
        throw ConfigError("/", "cannot open '" + file.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_json(const ScenarioConfig& cfg)
{
    const auto arr = [](const Vec3& v) { return json::array({v.x, v.y, v.z}); };
    json doc;
    doc["tool"] = {{"diameter_mm", cfg.tool.diameter},
                   {"flute_count", cfg.tool.flute_count},
                   {"helix_deg", cfg.tool.helix_angle},
                   {"flute_length_mm", cfg.tool.flute_length},
                   {"disk_height_mm", cfg.tool.disk_height}};
    doc["workpiece"] = {{"box_mm", arr(cfg.box_dims)},
                        {"origin_mm", arr(cfg.origin)},
                        {"tilt_deg", cfg.tilt_deg},
                        {"tilt_axis", arr(cfg.tilt_axis)},
                        {"density_g_mm3", cfg.density}};
    doc["resolution"] = {{"path_step_mm", cfg.path_step},
                         {"dphi_deg", cfg.dphi_deg},
                         {"grid_mm", cfg.grid},
                         {"voxel_mm", cfg.voxel}};
    doc["milling_mode"] = std::string(to_string(cfg.milling_mode));
    doc["oracle"] = {{"raw_path", cfg.oracle_raw_path}, {"max_cells", cfg.max_cells}};
    json out = json::object();
    if (!cfg.out_table.empty())
        out["table"] = cfg.out_table;
    if (!cfg.out_removal.empty())
        out["removal"] = cfg.out_removal;
    if (!cfg.out_oracle.empty())
        out["oracle"] = cfg.out_oracle;
    if (!cfg.out_report.empty())
        out["report"] = cfg.out_report;
    doc["output"] = out;
    return doc.dump(2) + "\n";
}

} // namespace millmass
