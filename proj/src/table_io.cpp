#include "millmass/table_io.hpp"

#include "millmass/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace millmass {

using nlohmann::json;

namespace {

constexpr const char* kLookupHeader = "n,s_mm,x_mm,y_mm,z_mm,m_g,cx_mm,cy_mm,cz_mm,Vr_mm3";

std::string g9(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

double parse_number(const std::string& cell, std::size_t line)
{
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw ParseError(line, "invalid number '" + cell + "'");
    return v;
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
        cells.push_back(cell);
    if (!line.empty() && line.back() == ',')
        cells.emplace_back();
    return cells;
}

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

} // namespace

void write_lookup_csv(std::ostream& out, const LookupTable& table, const Provenance& provenance)
{
    out << "# density_g_mm3=" << g9(table.density) << '\n';
    for (const auto& [k, v] : provenance)
        out << "# " << k << '=' << v << '\n';
    const bool timed = !table.rows.empty() &&
                       std::all_of(table.rows.begin(), table.rows.end(), [](const auto& r) { return r.time.has_value(); });
    out << kLookupHeader << (timed ? ",t_s\n" : "\n");
    for (const auto& r : table.rows)
    {
        out << r.n << ',' << g9(r.s) << ',' << g9(r.position.x) << ',' << g9(r.position.y) << ','
            << g9(r.position.z) << ',' << g9(r.mass) << ',' << g9(r.com.x) << ',' << g9(r.com.y) << ','
            << g9(r.com.z) << ',' << g9(r.removed_volume);
        if (timed)
            out << ',' << g9(*r.time);
        out << '\n';
    }
}

LookupTable read_lookup_csv(std::istream& in)
{
    LookupTable table;
    bool have_density = false;
    bool have_header = false;
    bool timed = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line.front() == '#')
        {
            const auto eq = line.find('=');
            if (eq != std::string::npos && line.compare(0, eq, "# density_g_mm3") == 0)
            {
                table.density = parse_number(line.substr(eq + 1), lineno);
                have_density = true;
            }
            continue;
        }
        if (!have_header)
        {
            if (line == kLookupHeader)
                timed = false;
            else if (line == std::string(kLookupHeader) + ",t_s")
                timed = true;
            else
                throw ParseError(lineno, "unexpected lookup table header");
            have_header = true;
            continue;
        }
        const auto cells = split_csv(line);
        if (cells.size() != (timed ? 11u : 10u))
            throw ParseError(lineno, "wrong number of fields");
        double v[11];
        for (std::size_t k = 0; k < cells.size(); ++k)
            v[k] = parse_number(cells[k], lineno);
        LookupRow r;
        r.n = static_cast<std::size_t>(v[0]);
        r.s = v[1];
        r.position = {v[2], v[3], v[4]};
        r.mass = v[5];
        r.com = {v[6], v[7], v[8]};
        r.removed_volume = v[9];
        if (timed)
            r.time = v[10];
        table.rows.push_back(r);
    }
    if (!have_header)
        throw ParseError(lineno, "missing lookup table header");
    if (!have_density)
        throw ParseError(lineno, "missing '# density_g_mm3=' line");
    return table;
}

void write_removal_csv(std::ostream& out, const std::vector<RemovalRecord>& records)
{
    out << "n,Vr_mm3,crx,cry,crz\n";
    for (const auto& r : records)
    {
        out << r.n << ',' << g9(r.volume);
        if (r.centroid)
            out << ',' << g9(r.centroid->x) << ',' << g9(r.centroid->y) << ',' << g9(r.centroid->z);
        else
            out << ",,,";
        out << '\n';
    }
}

std::string oracle_to_json(const OracleResult& r, const Provenance& provenance)
{
    json doc;
    doc["h_v_mm"] = r.spacing;
    doc["rho"] = r.density;
    doc["cells"] = r.cells;
    doc["V_before_mm3"] = r.volume_before;
    doc["m_before_g"] = r.mass_before;
    doc["dV_mm3"] = r.removed_volume;
    doc["dm_g"] = r.removed_mass;
    doc["c_before_mm"] = vec_json(r.com_before);
    doc["c_after_mm"] = vec_json(r.com_after);
    doc["dc_mm"] = r.com_shift;
    json steps = json::array();
    for (std::size_t n = 0; n < r.step_volume.size(); ++n)
        steps.push_back({{"n", n + 1}, {"dV_mm3", r.step_volume[n]}});
    doc["per_step"] = steps;
    json prov = json::object();
    for (const auto& [k, v] : provenance)
        prov[k] = v;
    doc["provenance"] = prov;
    return doc.dump(2) + "\n";
}

OracleResult oracle_from_json(const std::string& text)
{
    OracleResult r;
    try
    {
        const json doc = json::parse(text);
        r.spacing = doc.at("h_v_mm").get<double>();
        r.density = doc.at("rho").get<double>();
        r.cells = doc.at("cells").get<std::uint64_t>();
        r.volume_before = doc.at("V_before_mm3").get<double>();
        r.mass_before = doc.at("m_before_g").get<double>();
        r.removed_volume = doc.at("dV_mm3").get<double>();
        r.removed_mass = doc.at("dm_g").get<double>();
        r.com_before = vec_from(doc.at("c_before_mm"));
        r.com_after = vec_from(doc.at("c_after_mm"));
        r.com_shift = doc.at("dc_mm").get<double>();
        for (const auto& s : doc.at("per_step"))
            r.step_volume.push_back(s.at("dV_mm3").get<double>());
    }
    catch (const json::exception& e)
    {
        throw ParseError(0, std::string("invalid oracle JSON: ") + e.what());
    }
    return r;
}

std::string report_to_json(const CompareReport& rep)
{
    json doc;
    doc["dm_model_g"] = rep.dm_model;
    doc["dm_oracle_g"] = rep.dm_oracle;
    doc["e_dm"] = finite_or_null(rep.e_dm);
    doc["dc_model_mm"] = rep.dc_model;
    doc["dc_oracle_mm"] = rep.dc_oracle;
    doc["e_dc"] = finite_or_null(rep.e_dc);
    json steps = json::array();
    for (const auto& s : rep.per_step)
        steps.push_back({{"n", s.n}, {"dm_model_g", s.dm_model}, {"dm_oracle_g", s.dm_oracle}, {"residual_g", s.residual}});
    doc["per_step"] = steps;
    return doc.dump(2) + "\n";
}

void write_report_table(std::ostream& out, const CompareReport& rep)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-10s %14s %14s %10s\n", "quantity", "model", "reference", "e");
    out << buf;
    const auto row = [&](const char* name, const char* unit, double m, double r, double e) {
        const std::string label = std::string(name) + " " + unit;
        if (std::isfinite(e))
            std::snprintf(buf, sizeof buf, "%-10s %14.6f %14.6f %9.3f%%\n", label.c_str(), m, r, 100.0 * e);
        else
            std::snprintf(buf, sizeof buf, "%-10s %14.6f %14.6f %10s\n", label.c_str(), m, r, "n/a");
        out << buf;
    };
    row("dm", "g", rep.dm_model, rep.dm_oracle, rep.e_dm);
    row("dc", "mm", rep.dc_model, rep.dc_oracle, rep.e_dc);
}

} // namespace millmass
