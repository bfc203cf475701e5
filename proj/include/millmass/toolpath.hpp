#pragma once

#include "millmass/geometry.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace millmass {

struct ToolPosition
{
    Vec3 position;               // tool tip, machine frame, mm
    std::optional<double> feed;  // mm/min

    bool operator==(const ToolPosition&) const = default;
};

struct ToolPath
{
    std::vector<ToolPosition> points;
    std::string source;
    double resample_step = 0.0;  // 0 when not resampled
    std::vector<std::string> warnings;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    double length() const;
    // Cumulative arc length at every point.
    std::vector<double> arc_lengths() const;
    // Cumulative time in seconds when every point after the first has a feed.
    std::optional<std::vector<double>> times() const;
};

// Parses CSV ("x_mm,y_mm,z_mm[,f_mm_min]" header required). Throws ParseError.
ToolPath parse_path_csv(std::istream& in, const std::string& source = "<csv>");

// Parses the G0/G1 subset of G-code (absolute, millimeters). Arc moves throw
// UnsupportedMotion; other words are ignored and recorded as warnings.
ToolPath parse_path_gcode(std::istream& in, const std::string& source = "<gcode>");

// Dispatches on content: a first non-blank line starting with "x_mm" is CSV,
// anything else is G-code. Consecutive duplicate positions are collapsed.
ToolPath load_path(const std::filesystem::path& file);

// Writes CSV with shortest round-trip number formatting.
void write_path_csv(std::ostream& out, const ToolPath& path);

// Inserts linearly interpolated points so no segment exceeds `step`.
// Original vertices are preserved exactly.
ToolPath resample(const ToolPath& path, double step);

// Drops consecutive duplicate positions (keeping the later feed).
void collapse_duplicates(ToolPath& path);

} // namespace millmass
