#include "millmass/config.hpp"
#include "millmass/errors.hpp"
#include "millmass/mass_model.hpp"
#include "millmass/oracle.hpp"
#include "millmass/scenario.hpp"
#include "millmass/table_io.hpp"
#include "millmass/toolpath.hpp"
#include "millmass/workpiece.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

using namespace millmass;

namespace {

struct Overrides
{
    std::string config;
    std::optional<double> path_step;
    std::optional<double> dphi;
    std::optional<double> grid;
    std::optional<double> voxel;
    std::optional<double> disk_height;
    std::optional<double> tilt_deg;
    std::optional<std::string> mode;
};

void add_common(CLI::App* cmd, Overrides& o)
{
    cmd->add_option("--config", o.config, "JSON configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--path-step", o.path_step, "path resampling step, mm");
    cmd->add_option("--dphi", o.dphi, "engagement angle step, degrees");
    cmd->add_option("--grid", o.grid, "dexel grid spacing, mm");
    cmd->add_option("--voxel", o.voxel, "oracle voxel spacing, mm");
    cmd->add_option("--disk-height", o.disk_height, "tool disk slice height, mm");
    cmd->add_option("--tilt-deg", o.tilt_deg, "workpiece tilt, degrees");
    cmd->add_option("--mode", o.mode, "milling mode")->check(CLI::IsMember({"down", "up"}));
}

ScenarioConfig resolve(const Overrides& o)
{
    ScenarioConfig cfg = o.config.empty() ? ScenarioConfig{} : load_config(o.config);
    if (o.path_step)
        cfg.path_step = *o.path_step;
    if (o.dphi)
        cfg.dphi_deg = *o.dphi;
    if (o.grid)
        cfg.grid = *o.grid;
    if (o.voxel)
        cfg.voxel = *o.voxel;
    if (o.disk_height)
        cfg.tool.disk_height = *o.disk_height;
    if (o.tilt_deg)
        cfg.tilt_deg = *o.tilt_deg;
    if (o.mode)
        cfg.milling_mode = *o.mode == "up" ? MillingMode::Up : MillingMode::Down;
    cfg.validate();
    return cfg;
}

std::ofstream open_out(const std::string& file)
{
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw Error("cannot write '" + file + "'");
    return out;
}

std::string pick(const std::string& flag, const std::string& from_config, const char* what)
{
    if (!flag.empty())
        return flag;
    if (!from_config.empty())
        return from_config;
    throw Error(std::string("no output file for the ") + what + " (use --out or the config output section)");
}

ToolPath load_checked(const std::string& file)
{
    ToolPath path = load_path(file);
    for (const auto& w : path.warnings)
        std::cerr << "millmass: warning: " << w << '\n';
    return path;
}

Provenance provenance_for(const ScenarioConfig& cfg, const std::string& command, const ToolPath& path)
{
    Provenance p{{"command", command}, {"path", path.source}, {"path_points", std::to_string(path.size())}};
    for (auto& kv : cfg.provenance())
        p.push_back(kv);
    return p;
}

int run_simulate(const Overrides& o, const std::string& path_file, const std::string& out_flag,
                 const std::string& removal_flag)
{
    const ScenarioConfig cfg = resolve(o);
    const std::string out_file = pick(out_flag, cfg.out_table, "lookup table");
    const ToolPath raw = load_checked(path_file);
    const ToolPath path = resample(raw, cfg.path_step);

    WorkpieceModel wp = init_workpiece(cfg.stock(), cfg.grid, cfg.density);
    const RunResult res = run_path(wp, cfg.tool, path, cfg.run_config());

    auto out = open_out(out_file);
    write_lookup_csv(out, res.table, provenance_for(cfg, "simulate", raw));
    const std::string removal = removal_flag.empty() ? cfg.out_removal : removal_flag;
    if (!removal.empty())
    {
        auto rout = open_out(removal);
        write_removal_csv(rout, res.records);
    }
    const auto& first = res.table.rows.front();
    const auto& last = res.table.rows.back();
    std::fprintf(stderr, "millmass: %zu steps, removed %.6g mm^3 (%.6g g), model slices %zu, fallback slices %zu\n",
                 res.stats.steps, (first.mass - last.mass) / cfg.density, first.mass - last.mass,
                 res.stats.model_slices, res.stats.fallback_slices);
    return 0;
}

int run_oracle(const Overrides& o, const std::string& path_file, const std::string& out_flag, bool raw_flag,
               std::optional<std::uint64_t> max_cells)
{
    ScenarioConfig cfg = resolve(o);
    if (raw_flag)
        cfg.oracle_raw_path = true;
    if (max_cells)
        cfg.max_cells = *max_cells;
    const std::string out_file = pick(out_flag, cfg.out_oracle, "oracle result");
    const ToolPath raw = load_checked(path_file);
    const ToolPath path = cfg.oracle_raw_path ? raw : resample(raw, cfg.path_step);

    VoxelGrid grid = make_voxel_grid(cfg.stock(), cfg.voxel, cfg.density, cfg.max_cells);
    const OracleResult res = voxel_carve_path(grid, cfg.tool, path);
    auto out = open_out(out_file);
    out << oracle_to_json(res, provenance_for(cfg, "oracle", raw));
    std::fprintf(stderr, "millmass: oracle removed %.6g mm^3 (%.6g g) on %llu cells\n", res.removed_volume,
                 res.removed_mass, static_cast<unsigned long long>(res.cells));
    return 0;
}

int run_compare(const std::string& model_file, const std::string& oracle_file, const std::string& out_file)
{
    std::ifstream tin(model_file);
    if (!tin)
        throw Error("cannot open '" + model_file + "'");
    const LookupTable table = read_lookup_csv(tin);
    std::ifstream oin(oracle_file);
    if (!oin)
        throw Error("cannot open '" + oracle_file + "'");
    std::stringstream ss;
    ss << oin.rdbuf();
    const OracleResult oracle = oracle_from_json(ss.str());

    const CompareReport rep = compare(table, oracle);
    write_report_table(std::cout, rep);
    if (!out_file.empty())
    {
        auto out = open_out(out_file);
        out << report_to_json(rep);
    }
    return 0;
}

int run_scenario(const Overrides& o, const std::string& kind_name, const std::string& out_file,
                 const std::string& config_out, double stepover)
{
    const ScenarioConfig cfg = resolve(o);
    const auto kind = parse_scenario_kind(kind_name);
    if (!kind)
        throw Error("unknown scenario '" + kind_name + "'");
    ScenarioOptions opts;
    opts.stepover = stepover;
    opts.tool_radius = cfg.tool.radius();
    const ToolPath path = make_scenario(*kind, cfg.stock(), opts);
    auto out = open_out(out_file);
    write_path_csv(out, path);
    if (!config_out.empty())
    {
        auto cout = open_out(config_out);
        cout << config_to_json(cfg);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"millmass: workpiece mass and center of mass along milling tool paths"};
    app.require_subcommand(1);

    Overrides sim_o, orc_o, scn_o;
    std::string sim_path, sim_out, sim_removal;
    auto* sim = app.add_subcommand("simulate", "run the mass model and write the lookup table");
    add_common(sim, sim_o);
    sim->add_option("--path", sim_path, "tool path (CSV or G-code)")->required()->check(CLI::ExistingFile);
    sim->add_option("--out", sim_out, "lookup table CSV");
    sim->add_option("--removal", sim_removal, "per-step removal CSV");

    std::string orc_path, orc_out;
    bool orc_raw = false;
    std::optional<std::uint64_t> orc_cells;
    auto* orc = app.add_subcommand("oracle", "carve a voxel grid along the path");
    add_common(orc, orc_o);
    orc->add_option("--path", orc_path, "tool path (CSV or G-code)")->required()->check(CLI::ExistingFile);
    orc->add_option("--out", orc_out, "oracle JSON");
    orc->add_flag("--raw-path", orc_raw, "carve the path without resampling");
    orc->add_option("--max-cells", orc_cells, "voxel cell budget");

    std::string cmp_model, cmp_oracle, cmp_out;
    auto* cmp = app.add_subcommand("compare", "relative errors of the model against the oracle");
    cmp->add_option("--model", cmp_model, "lookup table CSV")->required()->check(CLI::ExistingFile);
    cmp->add_option("--oracle", cmp_oracle, "oracle JSON")->required()->check(CLI::ExistingFile);
    cmp->add_option("--out", cmp_out, "report JSON");

    std::string scn_kind, scn_out, scn_config_out;
    double scn_stepover = 8.0;
    auto* scn = app.add_subcommand("scenario", "write a built-in tool path");
    add_common(scn, scn_o);
    scn->add_option("kind", scn_kind, "slot, steps, slab or pocket")
        ->required()
        ->check(CLI::IsMember({"slot", "steps", "slab", "pocket"}));
    scn->add_option("--out", scn_out, "path CSV")->required();
    scn->add_option("--config-out", scn_config_out, "write the effective configuration");
    scn->add_option("--stepover", scn_stepover, "serpentine stepover, mm")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (sim->parsed())
            return run_simulate(sim_o, sim_path, sim_out, sim_removal);
        if (orc->parsed())
            return run_oracle(orc_o, orc_path, orc_out, orc_raw, orc_cells);
        if (cmp->parsed())
            return run_compare(cmp_model, cmp_oracle, cmp_out);
        if (scn->parsed())
            return run_scenario(scn_o, scn_kind, scn_out, scn_config_out, scn_stepover);
    }
    catch (const std::exception& e)
    {
        std::cerr << "millmass: error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
