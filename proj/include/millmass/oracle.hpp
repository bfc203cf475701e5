#pragma once

#include "millmass/geometry.hpp"
#include "millmass/mass_model.hpp"
#include "millmass/tool.hpp"
#include "millmass/toolpath.hpp"
#include "millmass/workpiece.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace millmass {

inline constexpr std::uint64_t kDefaultMaxCells = 4'000'000'000ULL;

enum class GridLayout
{
    Machine,    // axis-aligned with the machine frame, covering the placed box
    Workpiece,  // axis-aligned with the box itself
};

// Integer occupancy sums. Index sums keep centroids exact and independent of
// the order in which voxels are visited.
struct VoxelSums
{
    std::uint64_t count = 0;
    std::uint64_t si = 0;
    std::uint64_t sj = 0;
    std::uint64_t sk = 0;

    VoxelSums& operator+=(const VoxelSums& o)
    {
        count += o.count;
        si += o.si;
        sj += o.sj;
        sk += o.sk;
        return *this;
    }
};

// Uniform occupancy grid. Bits are stored per (i, j) column with k fastest,
// 64 voxels per word.
class VoxelGrid
{
public:
    Frame frame;   // grid coordinates -> machine frame
    Vec3 origin;   // grid coordinates of the min corner of voxel (0, 0, 0)
    double spacing = 0.05;
    double density = 2.81e-3;
    int nx = 0;
    int ny = 0;
    int nz = 0;
    int words = 0;  // per column
    std::vector<std::uint64_t> bits;

    std::uint64_t cells() const { return static_cast<std::uint64_t>(nx) * static_cast<std::uint64_t>(ny) * static_cast<std::uint64_t>(nz); }
    bool test(int i, int j, int k) const;
    std::uint64_t* column(int i, int j) { return bits.data() + column_offset(i, j); }
    const std::uint64_t* column(int i, int j) const { return bits.data() + column_offset(i, j); }
    Vec3 voxel_center(int i, int j, int k) const;  // machine frame

    VoxelSums sums() const;
    double voxel_volume() const { return spacing * spacing * spacing; }
    double volume() const;
    // Occupancy centroid in the machine frame; the sums must be non-empty.
    Vec3 centroid(const VoxelSums& s) const;
    Vec3 centroid() const { return centroid(sums()); }

private:
    std::size_t column_offset(int i, int j) const
    {
        return (static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i)) *
               static_cast<std::size_t>(words);
    }
};

// Voxelizes the box: a voxel is occupied when its center lies in the box.
// The grid covers the box bounds plus one voxel on every side. Throws
// OutOfMemoryBudget above max_cells and std::invalid_argument on bad input.
VoxelGrid make_voxel_grid(const BoxStock& stock, double spacing, double density,
                          std::uint64_t max_cells = kDefaultMaxCells, GridLayout layout = GridLayout::Machine);

struct OracleResult
{
    double spacing = 0.0;
    double density = 0.0;
    std::uint64_t cells = 0;
    double volume_before = 0.0;
    double mass_before = 0.0;
    double removed_volume = 0.0;
    double removed_mass = 0.0;
    Vec3 com_before;
    Vec3 com_after;
    double com_shift = 0.0;
    std::vector<double> step_volume;  // per path step, mm^3
};

// Clears every voxel whose center lies in the volume swept by the tool
// cylinder (radius R, axial extent depth_limit above the tip, machine +z
// axis) along each straight step of the path. depth_limit <= 0 uses the
// flute length.
OracleResult voxel_carve_path(VoxelGrid& grid, const Tool& tool, const ToolPath& path, double depth_limit = 0.0);

struct CompareStep
{
    std::size_t n = 0;
    double dm_model = 0.0;   // cumulative, g
    double dm_oracle = 0.0;  // cumulative, g
    double residual = 0.0;   // model - oracle, g
};

struct CompareReport
{
    double dm_model = 0.0;
    double dm_oracle = 0.0;
    double e_dm = 0.0;
    double dc_model = 0.0;
    double dc_oracle = 0.0;
    double e_dc = 0.0;
    std::vector<CompareStep> per_step;  // empty when the step counts differ
};

// |model - ref| / ref; zero when both vanish, infinity when only ref does.
double relative_error(double model, double ref);

// Relative errors of mass loss and center-of-mass displacement. Throws
// IncompatibleInputs when the initial volumes differ by more than 1%.
CompareReport compare(const LookupTable& model, const OracleResult& oracle);

} // namespace millmass
