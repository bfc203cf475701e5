#pragma once

#include "millmass/geometry.hpp"
#include "millmass/tool.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace millmass {

// Rectangular blank: the local box [0,dims.x] x [0,dims.y] x [0,dims.z] placed
// in the machine frame by `placement`.
struct BoxStock
{
    Vec3 dims{60.0, 60.0, 20.0};
    Frame placement;

    double volume() const { return dims.x * dims.y * dims.z; }
    Vec3 center() const { return placement.apply(dims * 0.5); }
    std::array<Vec3, 8> corners() const;
    // Signed-distance style containment with a tolerance (positive tol enlarges the box).
    bool contains(const Vec3& machine_point, double tol = 0.0) const;
};

struct ZInterval
{
    double z0 = 0.0;
    double z1 = 0.0;
};

// One removed dexel segment of a carve step.
struct RemovedPiece
{
    std::uint32_t column = 0;
    double z0 = 0.0;
    double z1 = 0.0;
};

struct RemovedSet
{
    std::vector<RemovedPiece> pieces;
    double cell_area = 0.0;

    bool empty() const { return pieces.empty(); }
    double volume() const;
};

// Dexel board over machine x/y. Each column holds sorted, disjoint solid z intervals.
class WorkpieceModel
{
public:
    WorkpieceModel() = default;

    double grid_spacing() const { return h_; }
    double density() const { return density_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    Vec2 grid_origin() const { return origin_; }
    const BoxStock& stock() const { return stock_; }

    // Nominal values of the blank, taken from the box definition.
    double initial_volume() const { return stock_.volume(); }
    Vec3 initial_com() const { return stock_.center(); }

    // Column containing the machine point (x, y), if inside the board.
    std::optional<std::uint32_t> column_at(double x, double y) const;
    Vec2 column_center(std::uint32_t column) const;
    const std::vector<ZInterval>& column(std::uint32_t c) const { return columns_[c]; }
    std::size_t column_count() const { return columns_.size(); }

    bool solid_at(double x, double y, double z) const;

    // Lowest and highest material z over the whole board at initialization.
    double z_min() const { return z_min_; }
    double z_max() const { return z_max_; }

    double dexel_volume() const;
    Vec3 dexel_centroid() const;
    // Axis-aligned bounds of the remaining solid cells (cell extents in x/y).
    std::pair<Vec3, Vec3> solid_bounds() const;

    // Debug dump: one "x,y,z0,z1" row per interval.
    void write_csv(std::ostream& os) const;

private:
    friend WorkpieceModel init_workpiece(const BoxStock&, double, double);
    friend RemovedSet carve_step(WorkpieceModel&, const Tool&, const Vec3&, const Vec3&, double);

    BoxStock stock_;
    Vec2 origin_;
    double h_ = 0.1;
    int nx_ = 0;
    int ny_ = 0;
    double density_ = 2.81e-3;
    double z_min_ = 0.0;
    double z_max_ = 0.0;
    std::vector<std::vector<ZInterval>> columns_;
};

// Builds the dexel board for a (possibly tilted) box. Throws GridTooCoarse
// when grid_spacing > min(dims) / 10 and std::invalid_argument on bad input.
WorkpieceModel init_workpiece(const BoxStock& stock, double grid_spacing, double density);

// Subtracts the volume swept by the tool cylinder (axial extent depth_limit
// above the tip) moving from p_n to p_n1. Column membership is decided at the
// column center. Returns exactly what was removed.
RemovedSet carve_step(WorkpieceModel& wp, const Tool& tool, const Vec3& p_n, const Vec3& p_n1, double depth_limit);

// Parameter range [t0, t1] within [0,1] for which the planar point q lies
// within `radius` of a + t (b - a).
std::optional<std::pair<double, double>> capsule_parameter_range(const Vec2& q, const Vec2& a, const Vec2& b,
                                                                 double radius);

} // namespace millmass
