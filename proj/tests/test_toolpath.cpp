#include "millmass/errors.hpp"
#include "millmass/toolpath.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace millmass;
using doctest::Approx;

namespace {

ToolPath csv(const std::string& text)
{
    std::istringstream in(text);
    return parse_path_csv(in);
}

ToolPath gcode(const std::string& text)
{
    std::istringstream in(text);
    return parse_path_gcode(in);
}

std::filesystem::path temp_file(const std::string& name, const std::string& content)
{
    const auto p = std::filesystem::temp_directory_path() / ("millmass_" + name);
    std::ofstream(p) << content;
    return p;
}

} // namespace

TEST_CASE("parse_path_csv: two points")
{
    const auto p = csv("x_mm,y_mm,z_mm\n0,0,-2\n50,0,-2\n");
    REQUIRE(p.size() == 2);
    CHECK(p.points[0].position == Vec3{0, 0, -2});
    CHECK(p.points[1].position == Vec3{50, 0, -2});
    CHECK_FALSE(p.points[1].feed);
}

TEST_CASE("parse_path_csv: feeds, comments and duplicates")
{
    const auto p = csv("# exported\nx_mm,y_mm,z_mm,f_mm_min\n\n0,0,5,\n0,0,5,300\n10,0,5,300\r\n");
    REQUIRE(p.size() == 2);
    CHECK(p.points[0].feed == 300.0);
    CHECK(p.points[1].feed == 300.0);
}

TEST_CASE("parse_path_csv: errors carry the line number")
{
    CHECK_THROWS_AS(csv("x,y,z\n0,0,0\n"), ParseError);
    CHECK_THROWS_AS(csv(""), ParseError);
    CHECK_THROWS_AS(csv("x_mm,y_mm,z_mm\n"), ParseError);
    try
    {
        csv("x_mm,y_mm,z_mm\n0,0,0\n1,abc,0\n");
        FAIL("expected ParseError");
    }
    catch (const ParseError& e)
    {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(csv("x_mm,y_mm,z_mm\n0,0\n"), ParseError);
    CHECK_THROWS_AS(csv("x_mm,y_mm,z_mm,f_mm_min\n0,0,0,-5\n"), ParseError);
}

TEST_CASE("parse_path_gcode: G0/G1 with feed")
{
    const auto p = gcode("G0 X0 Y0 Z-2\nG1 X50 Y0 Z-2 F300\n");
    REQUIRE(p.size() == 2);
    CHECK(p.points[0].position == Vec3{0, 0, -2});
    CHECK_FALSE(p.points[0].feed);
    CHECK(p.points[1].position == Vec3{50, 0, -2});
    CHECK(p.points[1].feed == 300.0);
    CHECK(p.warnings.empty());
}

TEST_CASE("parse_path_gcode: modal motion, comments and ignored words")
{
    const auto p = gcode("%\n(program start)\nG90 G21\nT1 M6\nS12000 M3\nG0 Z25\nX10 Y5 ; rapid\nG1 Z18 F200\nX40\n"
                         "G01 Y20\nM30\n%\n");
    REQUIRE(p.size() == 5);
    CHECK(p.points[0].position == Vec3{0, 0, 25});
    CHECK(p.points[1].position == Vec3{10, 5, 25});
    CHECK_FALSE(p.points[1].feed);
    CHECK(p.points[2].position == Vec3{10, 5, 18});
    CHECK(p.points[3].position == Vec3{40, 5, 18});
    CHECK(p.points[3].feed == 200.0);
    CHECK(p.points[4].position == Vec3{40, 20, 18});
    CHECK(p.warnings.size() == 5);  // T1, M6, S12000, M3, M30
}

TEST_CASE("parse_path_gcode: unsupported motion")
{
    CHECK_THROWS_AS(gcode("G0 X0 Y0\nG2 X10 Y0 I5 J0\n"), UnsupportedMotion);
    CHECK_THROWS_AS(gcode("G3 X10 Y0 R5\n"), UnsupportedMotion);
    CHECK_THROWS_AS(gcode("G91\nG1 X1\n"), UnsupportedMotion);
    CHECK_THROWS_AS(gcode("G20\nG1 X1\n"), UnsupportedMotion);
    try
    {
        gcode("G0 X0\nG1 X1\nG2 X2 Y2 I1 J1\n");
        FAIL("expected UnsupportedMotion");
    }
    catch (const UnsupportedMotion& e)
    {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(gcode("M3\n"), ParseError);
    CHECK_THROWS_AS(gcode("G1 X1..2\n"), ParseError);
}

TEST_CASE("load_path dispatches on content")
{
    const auto a = load_path(temp_file("a.csv", "x_mm,y_mm,z_mm\n0,0,-2\n50,0,-2\n"));
    const auto b = load_path(temp_file("b.nc", "G0 X0 Y0 Z-2\nG1 X50 Y0 Z-2 F300\n"));
    REQUIRE(a.size() == 2);
    REQUIRE(b.size() == 2);
    CHECK(a.points[1].position == b.points[1].position);
    CHECK(b.points[1].feed == 300.0);
    CHECK_THROWS_AS(load_path("/nonexistent/path.csv"), ParseError);
}

TEST_CASE("resample")
{
    ToolPath p;
    p.points = {{{0, 0, -2}, std::nullopt}, {{50, 0, -2}, std::nullopt}};
    const auto r = resample(p, 0.5);
    CHECK(r.size() == 101);
    CHECK(r.resample_step == 0.5);
    for (std::size_t i = 1; i < r.size(); ++i)
        CHECK(norm(r.points[i].position - r.points[i - 1].position) <= 0.5 + 1e-12);
    CHECK(r.points.back().position == p.points.back().position);
    CHECK(r.length() == Approx(50.0));

    const auto same = resample(p, 60.0);
    CHECK(same.points == p.points);
    CHECK_THROWS_AS(resample(p, 0.0), std::invalid_argument);
}

TEST_CASE("resample preserves vertices and arc length on random paths")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    std::uniform_real_distribution<double> us(0.05, 3.0);
    for (int k = 0; k < 50; ++k)
    {
        ToolPath p;
        for (int i = 0; i < 6; ++i)
            p.points.push_back({{u(rng), u(rng), u(rng)}, std::nullopt});
        const double step = us(rng);
        const auto r = resample(p, step);
        CHECK(r.length() == Approx(p.length()).epsilon(1e-12));
        std::size_t j = 0;
        for (const auto& v : p.points)
        {
            while (j < r.size() && !(r.points[j].position == v.position))
                ++j;
            CHECK(j < r.size());
        }
        for (std::size_t i = 1; i < r.size(); ++i)
            CHECK(norm(r.points[i].position - r.points[i - 1].position) <= step * (1.0 + 1e-9));
    }
}

TEST_CASE("CSV round trip is bit exact")
{
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int k = 0; k < 20; ++k)
    {
        ToolPath p;
        for (int i = 0; i < 30; ++i)
        {
            ToolPosition tp{{u(rng), u(rng), u(rng) * 1e-7}, std::nullopt};
            if (k % 2 == 0)
                tp.feed = std::abs(u(rng)) + 1.0;
            p.points.push_back(tp);
        }
        std::ostringstream out;
        write_path_csv(out, p);
        std::istringstream in(out.str());
        const auto q = parse_path_csv(in);
        CHECK(q.points == p.points);
    }
}

TEST_CASE("times follow the feed")
{
    ToolPath p;
    p.points = {{{0, 0, 0}, std::nullopt}, {{60, 0, 0}, 600.0}, {{60, 30, 0}, 300.0}};
    const auto t = p.times();
    REQUIRE(t);
    CHECK((*t)[1] == Approx(6.0));
    CHECK((*t)[2] == Approx(12.0));
    p.points[2].feed.reset();
    CHECK_FALSE(p.times());
}
