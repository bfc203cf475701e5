#include "millmass/scenario.hpp"

#include <cmath>
#include <stdexcept>

namespace millmass {

namespace {

class Builder
{
public:
    explicit Builder(const BoxStock& stock) : stock_(stock) {}

    void to(double x, double y, double z) { path_.points.push_back({stock_.placement.apply({x, y, z}), std::nullopt}); }
    ToolPath finish(std::string_view name)
    {
        path_.source = "scenario:" + std::string(name);
        collapse_duplicates(path_);
        return std::move(path_);
    }

private:
    const BoxStock& stock_;
    ToolPath path_;
};

// Evenly spaced pass coordinates from lo to hi, no gap larger than stepover.
std::vector<double> passes(double lo, double hi, double stepover)
{
    const auto gaps = static_cast<int>(std::max(1.0, std::ceil((hi - lo) / stepover - 1e-9)));
    std::vector<double> out;
    for (int k = 0; k <= gaps; ++k)
        out.push_back(lo + (hi - lo) * k / gaps);
    return out;
}

constexpr double kPocketWall = 2.0;
constexpr double kSlotDepth = 2.0;
constexpr double kFaceDepth = 3.0;

} // namespace

std::optional<ScenarioKind> parse_scenario_kind(std::string_view name)
{
    if (name == "slot")
        return ScenarioKind::Slot;
    if (name == "steps")
        return ScenarioKind::Steps;
    if (name == "slab")
        return ScenarioKind::Slab;
    if (name == "pocket")
        return ScenarioKind::Pocket;
    return std::nullopt;
}

std::string_view to_string(ScenarioKind kind)
{
    switch (kind)
    {
    case ScenarioKind::Slot: return "slot";
    case ScenarioKind::Steps: return "steps";
    case ScenarioKind::Slab: return "slab";
    case ScenarioKind::Pocket: return "pocket";
    }
    return "unknown";
}

ToolPath make_scenario(ScenarioKind kind, const BoxStock& stock, const ScenarioOptions& options)
{
    if (!(options.stepover > 0.0) || !(options.tool_radius > 0.0))
        throw std::invalid_argument("stepover and tool radius must be positive");
    if (options.stepover > 2.0 * options.tool_radius)
        throw std::invalid_argument("stepover must not exceed the tool diameter");

    const double r = options.tool_radius;
    const Vec3 d = stock.dims;
    const double top = d.z;
    const double safe = top + options.clearance;
    const double out = r + 3.0;  // approach distance outside the box
    Builder b(stock);

    switch (kind)
    {
    case ScenarioKind::Slot: {
        const double y = 0.5 * d.y;
        b.to(r, y, safe);
        b.to(r, y, top - kSlotDepth);
        b.to(d.x - r, y, top - kSlotDepth);
        break;
    }
    case ScenarioKind::Steps: {
        // Full slot across the box, entering from outside.
        const double y1 = 0.25 * d.y;
        b.to(-out, y1, safe);
        b.to(-out, y1, top - kSlotDepth);
        b.to(d.x + out, y1, top - kSlotDepth);
        b.to(d.x + out, y1, safe);
        // Edge cut whose radial width grows from r/2 to 3r/2.
        b.to(-out, d.y + 0.5 * r, safe);
        b.to(-out, d.y + 0.5 * r, top - kSlotDepth);
        b.to(d.x + out, d.y - 0.5 * r, top - kSlotDepth);
        b.to(d.x + out, d.y - 0.5 * r, safe);
        // Shallow half-immersion cut along the x = dims.x edge, crossing both.
        b.to(d.x, d.y + out, safe);
        b.to(d.x, d.y + out, top - 0.5);
        b.to(d.x, -out, top - 0.5);
        b.to(d.x, -out, safe);
        break;
    }
    case ScenarioKind::Slab: {
        const double z = top - kFaceDepth;
        const double x0 = -(r + 1.0);
        const double x1 = d.x + r + 1.0;
        std::vector<double> ys;
        for (double y = 0.0;; y += options.stepover)
        {
            ys.push_back(y);
            if (y + r >= d.y)
                break;
        }
        b.to(x0, ys.front(), safe);
        b.to(x0, ys.front(), z);
        for (std::size_t k = 0; k < ys.size(); ++k)
        {
            const bool forward = k % 2 == 0;
            b.to(forward ? x0 : x1, ys[k], z);
            b.to(forward ? x1 : x0, ys[k], z);
        }
        b.to((ys.size() % 2 == 1) ? x1 : x0, ys.back(), safe);
        break;
    }
    case ScenarioKind::Pocket: {
        const double z = top - kFaceDepth;
        const double lo = kPocketWall + r;
        const double hx = d.x - kPocketWall - r;
        const double hy = d.y - kPocketWall - r;
        if (hx < lo || hy < lo)
            throw std::invalid_argument("box too small for the pocket scenario");
        const auto ys = passes(lo, hy, options.stepover);
        b.to(lo, ys.front(), safe);
        b.to(lo, ys.front(), z);
        for (std::size_t k = 0; k < ys.size(); ++k)
        {
            const bool forward = k % 2 == 0;
            b.to(forward ? lo : hx, ys[k], z);
            b.to(forward ? hx : lo, ys[k], z);
        }
        // Contour pass removes the scallops left between pass ends.
        const std::array<Vec2, 4> ring{Vec2{lo, lo}, Vec2{hx, lo}, Vec2{hx, hy}, Vec2{lo, hy}};
        const std::size_t start = ys.size() % 2 == 1 ? 2 : 3;
        for (std::size_t k = 1; k <= 4; ++k)
            b.to(ring[(start + k) % 4].x, ring[(start + k) % 4].y, z);
        b.to(ring[start].x, ring[start].y, safe);
        break;
    }
    }
    return b.finish(to_string(kind));
}

double slot_volume(const BoxStock& stock, const ScenarioOptions& options)
{
    const double r = options.tool_radius;
    const double length = stock.dims.x - 2.0 * r;
    return (2.0 * r * length + kPi * r * r) * kSlotDepth;
}

double pocket_volume(const BoxStock& stock, const ScenarioOptions& options)
{
    const double r = options.tool_radius;
    const double sx = stock.dims.x - 2.0 * (kPocketWall + r);
    const double sy = stock.dims.y - 2.0 * (kPocketWall + r);
    return (sx * sy + 2.0 * (sx + sy) * r + kPi * r * r) * kFaceDepth;
}

} // namespace millmass
