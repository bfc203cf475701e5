// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "millmass/errors.hpp"
#include "millmass/mass_model.hpp"
#include "millmass/oracle.hpp"
#include "millmass/parallel.hpp"
#include "millmass/scenario.hpp"
#include "millmass/table_io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace millmass;

namespace {

constexpr double kRho = 2.81e-3;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& name, const std::string& detail)
{
    std::printf("%s %d %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok)
        ++failures;
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct ModelRun
{
    RunResult result;
    double seconds = 0.0;
};

ModelRun run_model(const BoxStock& box, const ToolPath& path, const Tool& tool = {}, double grid = 0.1)
{
    const auto t0 = Clock::now();
    auto wp = init_workpiece(box, grid, kRho);
    ModelRun m{run_path(wp, tool, path), 0.0};
    m.seconds = seconds_since(t0);
    return m;
}

double total_removed(const RunResult& r)
{
    double v = 0.0;
    for (const auto& rec : r.records)
        v += rec.volume;
    return v;
}

void slot_analytic()
{
    BoxStock box;
    const auto path = resample(make_scenario(ScenarioKind::Slot, box), 0.5);
    const auto m = run_model(box, path);
    const double exact = slot_volume(box);
    const double dv = total_removed(m.result);
    const auto& rows = m.result.table.rows;
    const double dm = rows.front().mass - rows.back().mass;
    const double ev = std::abs(dv - exact) / exact;
    const double em = std::abs(dm - kRho * dv) / (kRho * dv);
    const bool ok = ev <= 0.01 && em <= 1e-9 && m.seconds < 10.0;
    report(1, ok, "slot analytic",
           fmt("dV=%.3f mm3 exact=%.3f e=%.3f%% dm=%.5f g rho*dV=%.5f g t=%.2fs (limits 1%%, 10s)", dv, exact,
               100.0 * ev, dm, kRho * dv, m.seconds));
}

void slab_identity()
{
    BoxStock box;
    const auto path = resample(make_scenario(ScenarioKind::Slab, box), 0.5);
    const auto m = run_model(box, path);
    auto grid = make_voxel_grid(box, 0.05, kRho);
    const auto o = voxel_carve_path(grid, Tool{}, path);
    const auto& rows = m.result.table.rows;
    const double zm = rows.back().com.z;
    const double dm = rows.front().mass - rows.back().mass;
    const double edm = std::abs(dm - 30.348) / 30.348;
    const bool ok = std::abs(zm - 8.5) <= 0.05 && std::abs(o.com_after.z - 8.5) <= 0.02 && edm <= 0.01;
    report(2, ok, "slab COM identity",
           fmt("model z=%.4f (8.5+-0.05) oracle z=%.4f (8.5+-0.02) dm=%.4f g (30.348+-1%%, e=%.3f%%)", zm,
               o.com_after.z, dm, 100.0 * edm));
}

void oracle_equivalence(int id, const std::string& name, ScenarioKind kind, double tilt_deg, double limit,
                        double time_limit, bool check_com)
{
    BoxStock box;
    box.placement = tilt_transform(tilt_deg, {1, 0, 0});
    const auto path = resample(make_scenario(kind, box), 0.5);
    const auto t0 = Clock::now();
    const auto m = run_model(box, path);
    auto grid = make_voxel_grid(box, 0.05, kRho);
    const auto o = voxel_carve_path(grid, Tool{}, path);
    const double total = seconds_since(t0);
    const auto c = compare(m.result.table, o);
    bool ok = c.e_dm <= limit && (time_limit <= 0.0 || total < time_limit);
    if (check_com)
        ok = ok && c.e_dc <= limit;
    report(id, ok, name,
           fmt("steps=%zu dm model=%.4f oracle=%.4f e=%.3f%% | dc model=%.4f oracle=%.4f e=%.3f%% | limit %.0f%% | "
               "model %.1fs total %.1fs%s",
               path.size(), c.dm_model, c.dm_oracle, 100.0 * c.e_dm, c.dc_model, c.dc_oracle,
               100.0 * c.e_dc, 100.0 * limit, m.seconds, total,
               time_limit > 0.0 ? fmt(" (limit %.0fs)", time_limit).c_str() : ""));
}

// Random short paths on a small tilted block. Waypoints are laid out on the
// block and mapped to the machine frame, the tool stays vertical.
ToolPath random_path(std::mt19937_64& rng, const BoxStock& box)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Vec3 d = box.dims;
    ToolPath p;
    Vec3 cur{u(rng) * d.x, u(rng) * d.y, d.z + 3.0};
    p.points.push_back({cur, std::nullopt});
    cur.z = d.z - (0.3 + 3.7 * u(rng));
    p.points.push_back({cur, std::nullopt});
    const int moves = 1 + static_cast<int>(u(rng) * 3.0);
    for (int k = 0; k < moves; ++k)
    {
        const double a = kTwoPi * u(rng);
        const double len = 3.0 + 9.0 * u(rng);
        cur.x = std::clamp(cur.x + len * std::cos(a), -4.0, d.x + 4.0);
        cur.y = std::clamp(cur.y + len * std::sin(a), -4.0, d.y + 4.0);
        cur.z = d.z - (0.3 + 3.7 * u(rng));
        p.points.push_back({cur, std::nullopt});
    }
    for (auto& tp : p.points)
        tp.position = box.placement.apply(tp.position);
    collapse_duplicates(p);
    return resample(p, 0.5);
}

// Outer polytope of the dexel solid: for each direction the support value over
// all cell corners. A point outside any of these half-spaces is outside the hull.
struct HullProbe
{
    std::vector<Vec3> dirs;

    HullProbe()
    {
        for (int a = -1; a <= 1; ++a)
            for (int b = -1; b <= 1; ++b)
                for (int c = -1; c <= 1; ++c)
                    if (a || b || c)
                    {
                        const Vec3 v{double(a), double(b), double(c)};
                        dirs.push_back(v / norm(v));
                    }
    }

    // Largest violation of c against the support planes (<= 0 when inside).
    double violation(const WorkpieceModel& wp, const Vec3& c) const
    {
        std::vector<double> support(dirs.size(), -1e300);
        const double hh = 0.5 * wp.grid_spacing();
        for (std::uint32_t col = 0; col < wp.column_count(); ++col)
        {
            const auto& iv = wp.column(col);
            if (iv.empty())
                continue;
            const Vec2 q = wp.column_center(col);
            const double zlo = iv.front().z0;
            const double zhi = iv.back().z1;
            for (std::size_t k = 0; k < dirs.size(); ++k)
            {
                const Vec3& u = dirs[k];
                const double s = q.x * u.x + q.y * u.y + hh * (std::abs(u.x) + std::abs(u.y)) +
                                 (u.z > 0 ? zhi * u.z : zlo * u.z);
                support[k] = std::max(support[k], s);
            }
        }
        double worst = -1e300;
        for (std::size_t k = 0; k < dirs.size(); ++k)
            worst = std::max(worst, dot(c, dirs[k]) - support[k]);
        return worst;
    }
};

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b)
{
    const Vec2 ab = b - a;
    const double l2 = dot(ab, ab);
    const double t = l2 > 0.0 ? std::clamp(dot(p - a, ab) / l2, 0.0, 1.0) : 0.0;
    return norm(p - (a + ab * t));
}

std::string table_bytes(const RunResult& r)
{
    std::ostringstream out;
    write_lookup_csv(out, r.table);
    write_removal_csv(out, r.records);
    return out.str();
}

struct InvariantCounts
{
    int cases = 0;
    int errors = 0;
    int monotonic = 0;
    int engagement = 0;
    int additivity = 0;
    int com_hull = 0;
    int cr_hull = 0;
    int air = 0;
    int determinism = 0;
    int end_face_only = 0;
    int grazing = 0;
    double worst_additivity = 0.0;
    double worst_com = -1e300;
    double worst_cr = 0.0;
    std::string first_error;
};

void invariant_case(std::mt19937_64& rng, InvariantCounts& n, const HullProbe& probe)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    BoxStock box;
    box.dims = {30.0, 30.0, 12.0};
    const double axis_angle = kTwoPi * u(rng);
    box.placement = tilt_transform(30.0 * u(rng), {std::cos(axis_angle), std::sin(axis_angle), 0.0});
    const auto path = random_path(rng, box);
    const Tool tool;
    const double R = tool.radius();
    const double h = 0.1;
    ++n.cases;

    try
    {
        set_worker_count(1);
        auto wp = init_workpiece(box, h, kRho);
        const auto r = run_path(wp, tool, path);
        const auto& rows = r.table.rows;

        // Mass monotonicity, strict exactly on the steps whose swept tool meets
        // material on the board. Peripheral arcs at the slice mid-planes miss
        // end-face cuts and see grazing contacts; those are only counted.
        bool mono = true;
        bool eng = true;
        for (std::size_t k = 1; k < rows.size(); ++k)
        {
            const auto& rec = r.records[k - 1];
            const bool contact = rec.dexel_volume > 0.0;
            if (rows[k].mass > rows[k - 1].mass)
                mono = false;
            if ((rows[k].mass < rows[k - 1].mass) != (rec.volume > 0.0))
                mono = false;
            if ((rec.volume > 0.0) != contact)
                eng = false;
            if (contact && !r.engaged[k - 1])
                ++n.end_face_only;
            if (!contact && r.engaged[k - 1])
                ++n.grazing;
        }
        n.monotonic += !mono;
        n.engagement += !eng;

        // Additivity against the dexel total.
        const double sum = total_removed(r);
        const double dexel = r.stats.dexel_volume;
        const double ea = dexel > 0.0 ? std::abs(sum - dexel) / dexel : (sum == 0.0 ? 0.0 : 1.0);
        n.worst_additivity = std::max(n.worst_additivity, ea);
        n.additivity += ea > 0.02;

        // COM inside the hull of the current solid, and c_r inside the swept hull.
        auto replay = init_workpiece(box, h, kRho);
        bool com_ok = true;
        bool cr_ok = true;
        for (std::size_t k = 0; k + 1 < path.size(); ++k)
        {
            const Vec3 a = path.points[k].position;
            const Vec3 b = path.points[k + 1].position;
            carve_step(replay, tool, a, b, tool.flute_length);
            const auto& rec = r.records[k];
            if (rec.volume > 0.0)
            {
                const double v = probe.violation(replay, rows[k + 1].com);
                n.worst_com = std::max(n.worst_com, v);
                com_ok = com_ok && v <= 0.5 && box.contains(rows[k + 1].com, 0.5);
                if (!rec.centroid)
                {
                    cr_ok = false;
                    continue;
                }
                const Vec3 c = *rec.centroid;
                const double dxy = segment_distance(c.xy(), a.xy(), b.xy()) - R;
                const double dz = std::max(rec.z_low - c.z, c.z - rec.z_high);
                const double over = std::max(dxy, dz);
                n.worst_cr = std::max(n.worst_cr, over);
                cr_ok = cr_ok && over <= 1e-9;
            }
        }
        n.com_hull += !com_ok;
        n.cr_hull += !cr_ok;

        // Air cut: the same path lifted clear of the block leaves every row at the start state.
        ToolPath lifted = path;
        for (auto& tp : lifted.points)
            tp.position.z += 50.0;
        auto air_wp = init_workpiece(box, h, kRho);
        const auto air = run_path(air_wp, tool, lifted);
        bool air_ok = true;
        for (const auto& row : air.table.rows)
            air_ok = air_ok && row.mass == air.table.rows.front().mass && row.com == air.table.rows.front().com &&
                     row.removed_volume == 0.0;
        n.air += !air_ok;

        // Byte-identical output across worker counts.
        set_worker_count(4);
        auto wp4 = init_workpiece(box, h, kRho);
        const auto r4 = run_path(wp4, tool, path);
        set_worker_count(0);
        n.determinism += table_bytes(r) != table_bytes(r4);
    }
    catch (const std::exception& e)
    {
        set_worker_count(0);
        ++n.errors;
        if (n.first_error.empty())
            n.first_error = e.what();
    }
}

void invariant_suite()
{
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20240611);
    const HullProbe probe;
    InvariantCounts n;
    for (int k = 0; k < 200; ++k)
        invariant_case(rng, n, probe);

    // Resolution halving on the slot: path step and disk height.
    BoxStock box;
    const auto coarse = run_model(box, resample(make_scenario(ScenarioKind::Slot, box), 0.5));
    Tool fine_tool;
    fine_tool.disk_height = 0.05;
    const auto fine = run_model(box, resample(make_scenario(ScenarioKind::Slot, box), 0.25), fine_tool);
    const double vc = total_removed(coarse.result);
    const double vf = total_removed(fine.result);
    const double conv = std::abs(vc - vf) / vf;

    const double t = seconds_since(t0);
    const bool ok = n.errors == 0 && n.monotonic == 0 && n.engagement == 0 && n.additivity == 0 &&
                    n.com_hull == 0 && n.cr_hull == 0 && n.air == 0 && n.determinism == 0 && conv < 0.005 &&
                    t < 300.0;
    std::string detail =
        fmt("cases=%d errors=%d monotonic=%d engagement=%d additivity=%d (worst %.3f%%) com_hull=%d (worst %.3f mm) "
            "cr_hull=%d (worst %.2e mm) air=%d determinism=%d | slot halving %.4f%% | t=%.1fs (limit 300s) | "
            "steps cut without mid-plane arcs %d, arcs without cut %d",
            n.cases, n.errors, n.monotonic, n.engagement, n.additivity, 100.0 * n.worst_additivity, n.com_hull,
            n.worst_com, n.cr_hull, n.worst_cr, n.air, n.determinism, 100.0 * conv, t, n.end_face_only, n.grazing);
    if (!n.first_error.empty())
        detail += " | first error: " + n.first_error;
    report(6, ok, "invariant suite", detail);
}

} // namespace

int main()
{
    slot_analytic();
    slab_identity();
    oracle_equivalence(3, "three-axis oracle equivalence", ScenarioKind::Steps, 0.0, 0.05, 300.0, true);
    oracle_equivalence(4, "tilted oracle equivalence", ScenarioKind::Steps, 20.0, 0.10, 0.0, true);
    oracle_equivalence(5, "pocket feasibility", ScenarioKind::Pocket, 0.0, 0.05, 900.0, false);
    invariant_suite();
    std::printf("%s\n", failures == 0 ? "ALL PASS" : fmt("%d FAILED", failures).c_str());
    return failures == 0 ? 0 : 1;
}
