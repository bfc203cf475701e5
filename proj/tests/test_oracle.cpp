#include "millmass/errors.hpp"
#include "millmass/mass_model.hpp"
#include "millmass/oracle.hpp"
#include "millmass/parallel.hpp"
#include "millmass/scenario.hpp"

#include <doctest.h>

using namespace millmass;
using doctest::Approx;

namespace {

ToolPath path_of(std::initializer_list<Vec3> pts)
{
    ToolPath p;
    for (const auto& v : pts)
        p.points.push_back({v, std::nullopt});
    return p;
}

double plunge_volume(double h)
{
    auto g = make_voxel_grid(BoxStock{}, h, 2.81e-3);
    return voxel_carve_path(g, Tool{}, path_of({{30, 30, 25}, {30, 30, 18}})).removed_volume;
}

} // namespace

TEST_CASE("voxel grid covers the box with a one-voxel margin")
{
    const auto g = make_voxel_grid(BoxStock{}, 0.5, 2.81e-3);
    CHECK(g.nx == 122);
    CHECK(g.ny == 122);
    CHECK(g.nz == 42);
    CHECK(g.volume() == Approx(72000.0));
    const Vec3 c = g.centroid();
    CHECK(c.x == Approx(30.0));
    CHECK(c.y == Approx(30.0));
    CHECK(c.z == Approx(10.0));
    CHECK_FALSE(g.test(0, 0, 0));
    CHECK(g.test(1, 1, 1));
    CHECK_FALSE(g.test(121, 60, 20));
}

TEST_CASE("voxel grid of a tilted box")
{
    BoxStock box;
    box.placement = tilt_transform(20.0, {1, 0, 0});
    const auto g = make_voxel_grid(box, 0.25, 2.81e-3);
    CHECK(std::abs(g.volume() - 72000.0) / 72000.0 < 0.005);
    const Vec3 expect = box.placement.apply({30, 30, 10});
    const Vec3 c = g.centroid();
    CHECK(std::abs(c.y - expect.y) < 0.25);
    CHECK(std::abs(c.z - expect.z) < 0.25);

    const auto w = make_voxel_grid(box, 0.25, 2.81e-3, kDefaultMaxCells, GridLayout::Workpiece);
    CHECK(w.volume() == Approx(72000.0));
    const Vec3 cw = w.centroid();
    CHECK(cw.y == Approx(expect.y));
    CHECK(cw.z == Approx(expect.z));
}

TEST_CASE("voxel grid: cell budget and bad input")
{
    CHECK_THROWS_AS(make_voxel_grid(BoxStock{}, 0.05, 2.81e-3, 1'000'000), OutOfMemoryBudget);
    CHECK_THROWS_AS(make_voxel_grid(BoxStock{}, 0.0, 2.81e-3), std::invalid_argument);
}

TEST_CASE("voxel_carve_path: air cut")
{
    auto g = make_voxel_grid(BoxStock{}, 0.25, 2.81e-3);
    const auto r = voxel_carve_path(g, Tool{}, path_of({{-10, -10, 30}, {70, 70, 30}, {70, 70, 21}}));
    CHECK(r.removed_volume == 0.0);
    CHECK(r.com_after == r.com_before);
    CHECK(r.com_shift == 0.0);
    CHECK(r.step_volume.size() == 2);
}

TEST_CASE("voxel_carve_path: plunge cylinder")
{
    const double exact = kPi * 25.0 * 2.0;
    const double v = plunge_volume(0.05);
    CHECK(std::abs(v - exact) / exact < 0.01);
}

TEST_CASE("voxel_carve_path: cylinder error halves with the spacing")
{
    const double exact = kPi * 25.0 * 2.0;
    const double e1 = std::abs(plunge_volume(0.1) - exact);
    const double e2 = std::abs(plunge_volume(0.05) - exact);
    REQUIRE(e2 > 0.0);
    const double ratio = e1 / e2;
    CHECK(ratio >= 1.6);
    CHECK(ratio <= 2.6);
}

TEST_CASE("voxel_carve_path: top slab")
{
    BoxStock box;
    auto g = make_voxel_grid(box, 0.1, 2.81e-3);
    const auto r = voxel_carve_path(g, Tool{}, make_scenario(ScenarioKind::Slab, box));
    CHECK(std::abs(r.com_after.z - 8.5) <= 0.02);
    CHECK(r.removed_volume == Approx(10800.0));
    CHECK(r.removed_mass == Approx(30.348));
}

TEST_CASE("voxel_carve_path: symmetric slot keeps the symmetry plane")
{
    auto g = make_voxel_grid(BoxStock{}, 0.1, 2.81e-3);
    const auto r = voxel_carve_path(g, Tool{}, resample(path_of({{5, 30, 25}, {5, 30, 18}, {55, 30, 18}}), 0.5));
    CHECK(std::abs(r.com_after.y - 30.0) <= 0.1);
    CHECK(std::abs(r.removed_volume - 1157.08) / 1157.08 < 0.01);
    double sum = 0.0;
    for (double v : r.step_volume)
        sum += v;
    CHECK(sum == Approx(r.removed_volume));
}

TEST_CASE("voxel_carve_path: result does not depend on the worker count")
{
    const auto path = resample(make_scenario(ScenarioKind::Steps, BoxStock{}), 0.5);
    auto run = [&](std::size_t workers) {
        set_worker_count(workers);
        auto g = make_voxel_grid(BoxStock{}, 0.2, 2.81e-3);
        return voxel_carve_path(g, Tool{}, path);
    };
    const auto a = run(1);
    const auto b = run(3);
    set_worker_count(0);
    CHECK(a.removed_volume == b.removed_volume);
    CHECK(a.com_after == b.com_after);
    CHECK(a.step_volume == b.step_volume);
}

TEST_CASE("tilted board with a vertical tool matches an inclined sweep through the box")
{
    // Dexel board in the machine frame versus voxels aligned with the box,
    // where the vertical tool becomes an inclined cylinder.
    BoxStock box;
    box.placement = tilt_transform(20.0, {1, 0, 0});
    const auto path = resample(make_scenario(ScenarioKind::Steps, box), 0.5);
    Tool tool;
    auto wp = init_workpiece(box, 0.1, 2.81e-3);
    const double before = wp.dexel_volume();
    for (std::size_t n = 0; n + 1 < path.size(); ++n)
        carve_step(wp, tool, path.points[n].position, path.points[n + 1].position, tool.flute_length);
    const double dexel = before - wp.dexel_volume();

    auto g = make_voxel_grid(box, 0.2, 2.81e-3, kDefaultMaxCells, GridLayout::Workpiece);
    const auto r = voxel_carve_path(g, tool, path);
    CHECK(std::abs(dexel - r.removed_volume) / r.removed_volume < 0.01);
}

TEST_CASE("relative_error and compare")
{
    CHECK(relative_error(1157.0, 1145.0) == Approx(12.0 / 1145.0));
    CHECK(100.0 * relative_error(1157.0, 1145.0) == Approx(1.05).epsilon(0.001));
    CHECK(relative_error(0.0, 0.0) == 0.0);
    CHECK(std::isinf(relative_error(1.0, 0.0)));

    LookupTable t;
    t.density = 2.81e-3;
    LookupRow r0;
    r0.mass = 202.32;
    r0.com = {30, 30, 10};
    LookupRow r1 = r0;
    r1.n = 1;
    r1.mass = 202.32 - 2.81e-3 * 1145.0;
    r1.com = {30, 30, 9.8};
    t.rows = {r0, r1};

    OracleResult o;
    o.density = 2.81e-3;
    o.volume_before = 72000.0;
    o.removed_volume = 1145.0;
    o.removed_mass = 2.81e-3 * 1145.0;
    o.com_before = {30, 30, 10};
    o.com_after = {30, 30, 9.8};
    o.com_shift = 0.2;
    o.step_volume = {1145.0};
    const auto same = compare(t, o);
    CHECK(same.e_dm == Approx(0.0).epsilon(1e-9).scale(1.0));
    CHECK(same.e_dc == Approx(0.0).epsilon(1e-9).scale(1.0));
    REQUIRE(same.per_step.size() == 1);
    CHECK(same.per_step[0].residual == Approx(0.0).scale(1.0));

    t.rows[1].mass = 202.32 - 2.81e-3 * 1157.0;
    CHECK(compare(t, o).e_dm == Approx(12.0 / 1145.0));

    o.step_volume = {600.0, 545.0};
    CHECK(compare(t, o).per_step.empty());

    o.volume_before = 70000.0;
    CHECK_THROWS_AS(compare(t, o), IncompatibleInputs);
}
