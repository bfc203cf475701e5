#pragma once

#include "millmass/engagement.hpp"
#include "millmass/geometry.hpp"
#include "millmass/tool.hpp"
#include "millmass/toolpath.hpp"
#include "millmass/workpiece.hpp"

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace millmass {

// Outcome of the per-slice removed-area construction.
enum class AreaStatus
{
    Ok,
    Empty,                 // no engagement at n+1
    NoPreviousEngagement,  // fresh entry: nothing engaged at n for this height
    Unpaired,              // an interval at n+1 has no overlapping partner at n
    FullCircle,            // tool fully surrounded by material
    CoincidentCenters,     // no planar motion between n and n+1
    MeasureMismatch,       // paired interval measures differ by more than the limit
    SelfIntersecting,      // constructed boundary crosses itself away from its corners
    NegativeArea,          // boundary orientation came out inverted
    OutsideSweep,          // net area exceeds 2 R d or its centroid leaves the hull of the two disks
};
inline constexpr std::size_t kAreaStatusCount = 10;
std::string_view to_string(AreaStatus s);

struct AreaOptions
{
    // Crossings closer than this to one of the four corner points are
    // quantization artifacts of the sampled angles and are accepted. mm.
    double corner_tolerance = 0.3;
    // Relative measure difference above which a pair is not trusted.
    double mismatch_limit = 0.2;
};

struct SliceArea
{
    AreaStatus status = AreaStatus::Empty;
    double area = 0.0;              // mm^2
    std::optional<Vec2> centroid;   // absent when area is zero
};

// Removed area of one disk slice between tool circles C_n and C_n1. The region
// is bounded by the engaged arc of C_n1, the exit interpolation line, the
// engaged arc of C_n traversed backwards and the entry interpolation line;
// its signed area (oriented by the spindle sense) is the removed area.
// `dphi` is the polygonization step for the arcs.
SliceArea removed_area_slice(const EngagementArcs& at_n, const EngagementArcs& at_n1, double dphi,
                             const AreaOptions& options = {});

enum class SliceSource
{
    Model,     // closed-form boundary construction
    Dexel,     // measured from the carved dexels (fallback)
    OutOfBand, // removal below or above the slice stack (z motion)
};

struct SliceRemoval
{
    int slice = 0;               // -1 below the stack, slice count above it
    double height = 0.0;         // b_i, mm
    double area = 0.0;           // A_r,n,i, mm^2
    Vec3 centroid;               // machine frame
    SliceSource source = SliceSource::Model;
    AreaStatus status = AreaStatus::Ok;
};

struct StepVolume
{
    double volume = 0.0;
    std::optional<Vec3> centroid;
};

// V = sum A_i b_i and the volume-weighted centroid of the slices.
StepVolume removed_volume_step(std::span<const SliceRemoval> slices);

struct MassState
{
    std::size_t n = 0;
    double mass = 0.0;    // g
    double volume = 0.0;  // mm^3
    Vec3 com;             // machine frame, mm
};

struct RemovalRecord
{
    std::size_t n = 0;  // index of the lookup-table row this removal produces
    double volume = 0.0;
    double mass = 0.0;
    std::optional<Vec3> centroid;
    std::vector<SliceRemoval> per_slice;
    double dexel_volume = 0.0;  // what carve_step actually removed in this step
    double z_low = 0.0;         // machine z range swept by the cutting length
    double z_high = 0.0;
};

MassState initial_state(const WorkpieceModel& wp);

// m_{n+1} = m_n - rho V_r. Throws MassUnderflow when the removal reaches the current mass.
MassState update_mass(const MassState& state, const RemovalRecord& rec, double density);

// c_{n+1} = (c_n V_n - c_r V_r) / V_{n+1}. Throws VolumeUnderflow when V_r >= V_n.
Vec3 update_com(const MassState& state, const RemovalRecord& rec);

struct LookupRow
{
    std::size_t n = 0;
    double s = 0.0;  // arc length, mm
    Vec3 position;
    double mass = 0.0;
    Vec3 com;
    double removed_volume = 0.0;
    std::optional<double> time;  // s, when the path carries feeds
};

struct LookupTable
{
    double density = 0.0;
    std::vector<LookupRow> rows;
};

struct RunConfig
{
    double dphi_sample = deg2rad(0.4);   // engagement sampling step
    double dphi_polygon = deg2rad(0.4);  // arc polygonization step
    RotationSense sense = RotationSense::Clockwise;
    double mismatch_limit = 0.2;
    double depth_limit = 0.0;  // axial cutting extent; <= 0 uses the flute length
};

struct RunStats
{
    std::size_t steps = 0;
    std::size_t model_slices = 0;
    std::size_t fallback_slices = 0;
    std::array<std::size_t, kAreaStatusCount> status_counts{};
    double model_volume = 0.0;     // removed volume attributed to the closed-form construction
    double fallback_volume = 0.0;  // removed volume measured from dexels
    double dexel_volume = 0.0;     // total dexel removal over the run
};

struct RunResult
{
    LookupTable table;
    std::vector<RemovalRecord> records;
    std::vector<bool> engaged;  // per step: any slice engaged at n+1
    RunStats stats;
};

// Simulates the path step by step: engagement on the pre-step material,
// carving, per-slice removed areas, and the mass / center-of-mass recursion.
// The workpiece is modified in place. Errors carry the failing step index.
RunResult run_path(WorkpieceModel& wp, const Tool& tool, const ToolPath& path, const RunConfig& config = {});

} // namespace millmass
