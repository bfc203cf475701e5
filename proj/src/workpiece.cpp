#include "millmass/workpiece.hpp"

#include "millmass/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace millmass {

namespace {

// Remnants shorter than this are dropped and booked as removed material.
constexpr double kSliver = 1e-9;

// z range of the vertical line through (x, y) inside the placed box.
std::optional<ZInterval> vertical_clip(const BoxStock& box, double x, double y)
{
    const Vec3 a = box.placement.inverse_apply({x, y, 0.0});
    const Vec3 e = box.placement.inverse_direction({0.0, 0.0, 1.0});
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    const double origin[3] = {a.x, a.y, a.z};
    const double dir[3] = {e.x, e.y, e.z};
    const double ext[3] = {box.dims.x, box.dims.y, box.dims.z};
    for (int k = 0; k < 3; ++k)
    {
        if (std::abs(dir[k]) < 1e-15)
        {
            if (origin[k] < 0.0 || origin[k] > ext[k])
                return std::nullopt;
            continue;
        }
        double t0 = (0.0 - origin[k]) / dir[k];
        double t1 = (ext[k] - origin[k]) / dir[k];
        if (t0 > t1)
            std::swap(t0, t1);
        lo = std::max(lo, t0);
        hi = std::min(hi, t1);
    }
    if (!(hi > lo))
        return std::nullopt;
    return ZInterval{lo, hi};
}

} // namespace

std::array<Vec3, 8> BoxStock::corners() const
{
    std::array<Vec3, 8> out;
    for (int i = 0; i < 8; ++i)
        out[static_cast<std::size_t>(i)] =
            placement.apply({(i & 1) ? dims.x : 0.0, (i & 2) ? dims.y : 0.0, (i & 4) ? dims.z : 0.0});
    return out;
}

bool BoxStock::contains(const Vec3& p, double tol) const
{
    const Vec3 l = placement.inverse_apply(p);
    return l.x >= -tol && l.y >= -tol && l.z >= -tol && l.x <= dims.x + tol && l.y <= dims.y + tol &&
           l.z <= dims.z + tol;
}

double RemovedSet::volume() const
{
    double len = 0.0;
    for (const auto& p : pieces)
        len += p.z1 - p.z0;
    return len * cell_area;
}

std::optional<std::uint32_t> WorkpieceModel::column_at(double x, double y) const
{
    const double fx = std::floor((x - origin_.x) / h_);
    const double fy = std::floor((y - origin_.y) / h_);
    if (fx < 0.0 || fy < 0.0 || fx >= nx_ || fy >= ny_)
        return std::nullopt;
    return static_cast<std::uint32_t>(static_cast<int>(fy) * nx_ + static_cast<int>(fx));
}

Vec2 WorkpieceModel::column_center(std::uint32_t c) const
{
    const int i = static_cast<int>(c) % nx_;
    const int j = static_cast<int>(c) / nx_;
    return {origin_.x + (i + 0.5) * h_, origin_.y + (j + 0.5) * h_};
}

bool WorkpieceModel::solid_at(double x, double y, double z) const
{
    const auto c = column_at(x, y);
    if (!c)
        return false;
    for (const auto& iv : columns_[*c])
    {
        if (z < iv.z0)
            return false;
        if (z <= iv.z1)
            return true;
    }
    return false;
}

double WorkpieceModel::dexel_volume() const
{
    double len = 0.0;
    for (const auto& col : columns_)
        for (const auto& iv : col)
            len += iv.z1 - iv.z0;
    return len * h_ * h_;
}

Vec3 WorkpieceModel::dexel_centroid() const
{
    double len = 0.0;
    Vec3 moment;
    for (std::uint32_t c = 0; c < columns_.size(); ++c)
    {
        const Vec2 xy = column_center(c);
        for (const auto& iv : columns_[c])
        {
            const double l = iv.z1 - iv.z0;
            len += l;
            moment += Vec3{xy.x * l, xy.y * l, 0.5 * (iv.z0 + iv.z1) * l};
        }
    }
    if (len <= 0.0)
        throw DegeneratePolygon("workpiece has no material");
    return moment / len;
}

std::pair<Vec3, Vec3> WorkpieceModel::solid_bounds() const
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    Vec3 lo{inf, inf, inf};
    Vec3 hi{-inf, -inf, -inf};
    for (std::uint32_t c = 0; c < columns_.size(); ++c)
    {
        if (columns_[c].empty())
            continue;
        const Vec2 xy = column_center(c);
        lo.x = std::min(lo.x, xy.x - 0.5 * h_);
        lo.y = std::min(lo.y, xy.y - 0.5 * h_);
        hi.x = std::max(hi.x, xy.x + 0.5 * h_);
        hi.y = std::max(hi.y, xy.y + 0.5 * h_);
        lo.z = std::min(lo.z, columns_[c].front().z0);
        hi.z = std::max(hi.z, columns_[c].back().z1);
    }
    return {lo, hi};
}

void WorkpieceModel::write_csv(std::ostream& os) const
{
    os << "x,y,z0,z1\n";
    char buf[128];
    for (std::uint32_t c = 0; c < columns_.size(); ++c)
    {
        const Vec2 xy = column_center(c);
        for (const auto& iv : columns_[c])
        {
            std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g\n", xy.x, xy.y, iv.z0, iv.z1);
            os << buf;
        }
    }
}

WorkpieceModel init_workpiece(const BoxStock& stock, double grid_spacing, double density)
{
    if (!(stock.dims.x > 0.0 && stock.dims.y > 0.0 && stock.dims.z > 0.0))
        throw std::invalid_argument("box dimensions must be positive");
    if (!(grid_spacing > 0.0))
        throw std::invalid_argument("grid spacing must be positive");
    if (!(density > 0.0))
        throw std::invalid_argument("density must be positive");
    if (!stock.placement.is_valid())
        throw std::invalid_argument("box placement is not a proper rigid frame");
    const double min_dim = std::min({stock.dims.x, stock.dims.y, stock.dims.z});
    if (grid_spacing > min_dim / 10.0)
        throw GridTooCoarse("grid spacing " + std::to_string(grid_spacing) + " mm exceeds min(box)/10 = " +
                            std::to_string(min_dim / 10.0) + " mm");

    WorkpieceModel wp;
    wp.stock_ = stock;
    wp.h_ = grid_spacing;
    wp.density_ = density;

    constexpr double inf = std::numeric_limits<double>::infinity();
    Vec3 lo{inf, inf, inf};
    Vec3 hi{-inf, -inf, -inf};
    for (const auto& c : stock.corners())
    {
        lo = {std::min(lo.x, c.x), std::min(lo.y, c.y), std::min(lo.z, c.z)};
        hi = {std::max(hi.x, c.x), std::max(hi.y, c.y), std::max(hi.z, c.z)};
    }
    wp.origin_ = {lo.x, lo.y};
    wp.nx_ = std::max(1, static_cast<int>(std::ceil((hi.x - lo.x) / grid_spacing - 1e-9)));
    wp.ny_ = std::max(1, static_cast<int>(std::ceil((hi.y - lo.y) / grid_spacing - 1e-9)));
    wp.z_min_ = lo.z;
    wp.z_max_ = hi.z;
    wp.columns_.resize(static_cast<std::size_t>(wp.nx_) * static_cast<std::size_t>(wp.ny_));

    for (std::uint32_t c = 0; c < wp.columns_.size(); ++c)
    {
        const Vec2 xy = wp.column_center(c);
        if (auto iv = vertical_clip(stock, xy.x, xy.y))
            wp.columns_[c].push_back(*iv);
    }
    return wp;
}

std::optional<std::pair<double, double>> capsule_parameter_range(const Vec2& q, const Vec2& a, const Vec2& b,
                                                                 double radius)
{
    const Vec2 v = b - a;
    const Vec2 w = q - a;
    const double vv = dot(v, v);
    if (vv < 1e-24)
    {
        if (dot(w, w) <= radius * radius)
            return std::pair{0.0, 1.0};
        return std::nullopt;
    }
    const double c = cross(w, v);
    const double off2 = radius * radius - c * c / vv;
    if (off2 < 0.0)
        return std::nullopt;
    const double tc = dot(w, v) / vv;
    const double half = std::sqrt(off2 / vv);
    const double t0 = std::max(0.0, tc - half);
    const double t1 = std::min(1.0, tc + half);
    if (t0 > t1)
        return std::nullopt;
    return std::pair{t0, t1};
}

RemovedSet carve_step(WorkpieceModel& wp, const Tool& tool, const Vec3& p_n, const Vec3& p_n1, double depth_limit)
{
    if (norm(p_n1 - p_n) > tool.diameter * (1.0 + 1e-12))
        throw std::invalid_argument("carve_step: step longer than the tool diameter");

    RemovedSet removed;
    removed.cell_area = wp.h_ * wp.h_;
    const double r = tool.radius();
    const Vec2 a = p_n.xy();
    const Vec2 b = p_n1.xy();

    // Quick reject on z: the swept body spans [min tip, max tip + depth_limit].
    if (std::min(p_n.z, p_n1.z) > wp.z_max_ || std::max(p_n.z, p_n1.z) + depth_limit < wp.z_min_)
        return removed;

    const double h = wp.h_;
    const int i0 = std::max(0, static_cast<int>(std::floor((std::min(a.x, b.x) - r - wp.origin_.x) / h)));
    const int i1 = std::min(wp.nx_ - 1, static_cast<int>(std::floor((std::max(a.x, b.x) + r - wp.origin_.x) / h)));
    const int j0 = std::max(0, static_cast<int>(std::floor((std::min(a.y, b.y) - r - wp.origin_.y) / h)));
    const int j1 = std::min(wp.ny_ - 1, static_cast<int>(std::floor((std::max(a.y, b.y) + r - wp.origin_.y) / h)));

    std::vector<ZInterval> kept;
    for (int j = j0; j <= j1; ++j)
    {
        for (int i = i0; i <= i1; ++i)
        {
            const auto col = static_cast<std::uint32_t>(j * wp.nx_ + i);
            auto& intervals = wp.columns_[col];
            if (intervals.empty())
                continue;
            const auto range = capsule_parameter_range(wp.column_center(col), a, b, r);
            if (!range)
                continue;
            const double za = p_n.z + range->first * (p_n1.z - p_n.z);
            const double zb = p_n.z + range->second * (p_n1.z - p_n.z);
            const double cut0 = std::min(za, zb);
            const double cut1 = std::max(za, zb) + depth_limit;

            kept.clear();
            bool touched = false;
            for (const auto& iv : intervals)
            {
                const double o0 = std::max(iv.z0, cut0);
                const double o1 = std::min(iv.z1, cut1);
                if (o1 <= o0)
                {
                    kept.push_back(iv);
                    continue;
                }
                touched = true;
                double r0 = o0;
                double r1 = o1;
                if (o0 - iv.z0 > kSliver)
                    kept.push_back({iv.z0, o0});
                else
                    r0 = iv.z0;
                if (iv.z1 - o1 > kSliver)
                    kept.push_back({o1, iv.z1});
                else
                    r1 = iv.z1;
                removed.pieces.push_back({col, r0, r1});
            }
            if (touched)
                intervals.assign(kept.begin(), kept.end());
        }
    }
    return removed;
}

} // namespace millmass
