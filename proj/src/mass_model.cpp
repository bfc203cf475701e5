#include "millmass/mass_model.hpp"

#include "millmass/errors.hpp"
#include "millmass/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace millmass {

std::string_view to_string(AreaStatus s)
{
    switch (s)
    {
    case AreaStatus::Ok: return "ok";
    case AreaStatus::Empty: return "empty";
    case AreaStatus::NoPreviousEngagement: return "no_previous_engagement";
    case AreaStatus::Unpaired: return "unpaired";
    case AreaStatus::FullCircle: return "full_circle";
    case AreaStatus::CoincidentCenters: return "coincident_centers";
    case AreaStatus::MeasureMismatch: return "measure_mismatch";
    case AreaStatus::SelfIntersecting: return "self_intersecting";
    case AreaStatus::NegativeArea: return "negative_area";
    case AreaStatus::OutsideSweep: return "outside_sweep";
    }
    return "unknown";
}

namespace {

// Counterclockwise machine-angle arc covering an engagement interval.
struct CcwArc
{
    double start = 0.0;
    double length = 0.0;
};

CcwArc to_ccw(const EngagementArcs& e, const AngularInterval& iv)
{
    if (e.sense == RotationSense::CounterClockwise)
        return {wrap_two_pi(e.machine_angle(iv.phi_in)), iv.measure()};
    return {wrap_two_pi(e.machine_angle(iv.phi_ex)), iv.measure()};
}

double linear_overlap(double a0, double a1, double b0, double b1)
{
    return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

double arc_overlap(const CcwArc& a, const CcwArc& b)
{
    const double d = wrap_two_pi(b.start - a.start);
    return linear_overlap(0.0, a.length, d, d + b.length) + linear_overlap(0.0, a.length, d - kTwoPi, d - kTwoPi + b.length);
}

// True when the machine angle lies on the arc starting at `start` with signed sweep.
bool on_arc(double angle, double start, double sweep, double eps = 1e-9)
{
    const double u = wrap_two_pi((sweep >= 0.0 ? 1.0 : -1.0) * (angle - start));
    return u <= std::abs(sweep) + eps || u >= kTwoPi - eps;
}

struct PairGeometry
{
    Circle2 c0, c1;
    double start0 = 0.0, sweep0 = 0.0;  // arc of C_n, from entry to exit
    double start1 = 0.0, sweep1 = 0.0;  // arc of C_n1, from entry to exit
    Vec2 in0, ex0, in1, ex1;
};

bool crosses_away_from_corners(const PairGeometry& g, double tol)
{
    const std::array<Vec2, 4> corners{g.in0, g.ex0, g.in1, g.ex1};
    const auto near_corner = [&](const Vec2& p) {
        return std::any_of(corners.begin(), corners.end(), [&](const Vec2& c) { return norm(p - c) < tol; });
    };
    const auto angle_on = [](const Circle2& c, const Vec2& p) { return std::atan2(p.y - c.center.y, p.x - c.center.x); };

    for (const Vec2& q : circle_circle_intersections(g.c0, g.c1))
        if (on_arc(angle_on(g.c0, q), g.start0, g.sweep0) && on_arc(angle_on(g.c1, q), g.start1, g.sweep1) &&
            !near_corner(q))
            return true;

    const std::array<std::pair<Vec2, Vec2>, 2> lines{{{g.in0, g.in1}, {g.ex1, g.ex0}}};
    for (const auto& [a, b] : lines)
    {
        if (norm(b - a) < 1e-12)
            continue;
        for (int k = 0; k < 2; ++k)
        {
            const Circle2& c = k == 0 ? g.c0 : g.c1;
            const double start = k == 0 ? g.start0 : g.start1;
            const double sweep = k == 0 ? g.sweep0 : g.sweep1;
            for (const auto& hit : circle_line_intersections(c, a, b))
                if (hit.t > 0.0 && hit.t < 1.0 && on_arc(angle_on(c, hit.point), start, sweep) && !near_corner(hit.point))
                    return true;
        }
    }
    if (const auto x = segment_intersection(g.in0, g.in1, g.ex1, g.ex0); x && !near_corner(*x))
        return true;
    return false;
}

} // namespace

SliceArea removed_area_slice(const EngagementArcs& at_n, const EngagementArcs& at_n1, double dphi,
                             const AreaOptions& options)
{
    SliceArea out;
    if (at_n1.intervals.empty())
        return out;
    if (norm(at_n1.circle.center - at_n.circle.center) < 1e-9)
    {
        out.status = AreaStatus::CoincidentCenters;
        return out;
    }
    if (at_n.intervals.empty())
    {
        out.status = AreaStatus::NoPreviousEngagement;
        return out;
    }

    const double s = sense_sign(at_n1.sense);
    AreaMoments total;
    std::vector<Vec2> loop;
    for (const auto& iv1 : at_n1.intervals)
    {
        if (iv1.full_circle())
        {
            out.status = AreaStatus::FullCircle;
            return out;
        }
        const CcwArc a1 = to_ccw(at_n1, iv1);
        const AngularInterval* partner = nullptr;
        double best = 0.0;
        for (const auto& iv0 : at_n.intervals)
        {
            const double ov = arc_overlap(a1, to_ccw(at_n, iv0));
            if (ov > best)
            {
                best = ov;
                partner = &iv0;
            }
        }
        if (!partner)
        {
            out.status = AreaStatus::Unpaired;
            return out;
        }
        if (partner->full_circle())
        {
            out.status = AreaStatus::FullCircle;
            return out;
        }
        const double m0 = partner->measure();
        const double m1 = iv1.measure();
        if (std::abs(m1 - m0) > options.mismatch_limit * std::max(m0, m1))
        {
            out.status = AreaStatus::MeasureMismatch;
            return out;
        }

        PairGeometry g;
        g.c0 = at_n.circle;
        g.c1 = at_n1.circle;
        g.start0 = at_n.machine_angle(partner->phi_in);
        g.sweep0 = sense_sign(at_n.sense) * m0;
        g.start1 = at_n1.machine_angle(iv1.phi_in);
        g.sweep1 = s * m1;
        g.in0 = g.c0.point_at(g.start0);
        g.ex0 = g.c0.point_at(g.start0 + g.sweep0);
        g.in1 = g.c1.point_at(g.start1);
        g.ex1 = g.c1.point_at(g.start1 + g.sweep1);
        if (crosses_away_from_corners(g, options.corner_tolerance))
        {
            out.status = AreaStatus::SelfIntersecting;
            return out;
        }

        // Arc of C_n1 entry -> exit, then l_ex, arc of C_n exit -> entry, then l_in closes the loop.
        loop = arc_polyline(g.c1, g.start1, g.start1 + g.sweep1, dphi);
        const auto back = arc_polyline(g.c0, g.start0 + g.sweep0, g.start0, dphi);
        loop.insert(loop.end(), back.begin(), back.end());
        AreaMoments am = signed_area_moments(loop);
        am.area *= s;
        am.mx *= s;
        am.my *= s;
        total += am;
    }

    if (total.area < -1e-12)
    {
        out.status = AreaStatus::NegativeArea;
        return out;
    }
    if (total.area < 1e-12)
    {
        out.status = AreaStatus::Ok;
        return out;
    }

    // Lobes of opposite sign can cancel to a plausible total. A valid boundary
    // stays in the hull of both disks minus C_n, of area 2 R d.
    const Vec2 centroid{total.mx / total.area, total.my / total.area};
    const Circle2& c0 = at_n.circle;
    const Circle2& c1 = at_n1.circle;
    const double r = c1.radius;
    const double slack = kPi * r * r * dphi * dphi / 6.0 + 1e-9;
    const Vec2 axis = c1.center - c0.center;
    const double t = std::clamp(dot(centroid - c0.center, axis) / dot(axis, axis), 0.0, 1.0);
    if (total.area > 2.0 * r * norm(axis) + slack || norm(centroid - (c0.center + axis * t)) > r + 1e-9)
    {
        out.status = AreaStatus::OutsideSweep;
        return out;
    }
    out.status = AreaStatus::Ok;
    out.area = total.area;
    out.centroid = centroid;
    return out;
}

StepVolume removed_volume_step(std::span<const SliceRemoval> slices)
{
    StepVolume out;
    Vec3 moment;
    for (const auto& s : slices)
    {
        const double v = s.area * s.height;
        out.volume += v;
        moment += s.centroid * v;
    }
    if (out.volume > 0.0)
        out.centroid = moment / out.volume;
    return out;
}

MassState initial_state(const WorkpieceModel& wp)
{
    MassState s;
    s.volume = wp.initial_volume();
    s.mass = wp.density() * s.volume;
    s.com = wp.initial_com();
    return s;
}

MassState update_mass(const MassState& state, const RemovalRecord& rec, double density)
{
    const double removed = density * rec.volume;
    if (removed >= state.mass)
        throw MassUnderflow("removed mass " + std::to_string(removed) + " g reaches current mass " +
                            std::to_string(state.mass) + " g");
    MassState next = state;
    next.n = rec.n;
    next.mass = state.mass - removed;
    next.volume = state.volume - rec.volume;
    return next;
}

Vec3 update_com(const MassState& state, const RemovalRecord& rec)
{
    if (rec.volume >= state.volume)
        throw VolumeUnderflow("removed volume " + std::to_string(rec.volume) + " mm^3 reaches current volume " +
                              std::to_string(state.volume) + " mm^3");
    if (rec.volume <= 0.0 || !rec.centroid)
        return state.com;
    const double remaining = state.volume - rec.volume;
    return (state.com * state.volume - *rec.centroid * rec.volume) / remaining;
}

namespace {

struct BandAccum
{
    double volume = 0.0;
    Vec3 moment;

    void add(const Vec2& xy, double z0, double z1, double cell_area)
    {
        const double v = (z1 - z0) * cell_area;
        volume += v;
        moment += Vec3{xy.x, xy.y, 0.5 * (z0 + z1)} * v;
    }
};

// Splits the removed dexel pieces into the slice bands of the tool at `tip_z`.
void attribute_removal(const WorkpieceModel& wp, const RemovedSet& removed, double tip_z,
                       std::span<const DiskSlice> slices, std::vector<BandAccum>& bands, BandAccum& below,
                       BandAccum& above)
{
    const double b = slices.front().height();
    const double top = tip_z + slices.back().z_high;
    for (const auto& p : removed.pieces)
    {
        const Vec2 xy = wp.column_center(p.column);
        double z0 = p.z0;
        const double z1 = p.z1;
        if (z0 < tip_z)
        {
            below.add(xy, z0, std::min(z1, tip_z), removed.cell_area);
            z0 = tip_z;
        }
        if (z1 > top)
        {
            above.add(xy, std::max(z0, top), z1, removed.cell_area);
        }
        if (z1 <= z0 || z0 >= top)
            continue;
        auto i = static_cast<std::size_t>(std::max(0.0, std::floor((z0 - tip_z) / b)));
        for (; i < slices.size(); ++i)
        {
            const double lo = tip_z + slices[i].z_low;
            const double hi = tip_z + slices[i].z_high;
            if (lo >= z1)
                break;
            const double o0 = std::max(lo, z0);
            const double o1 = std::min(hi, z1);
            if (o1 > o0)
                bands[i].add(xy, o0, o1, removed.cell_area);
        }
    }
}

SliceRemoval from_band(int slice, double height, const BandAccum& band, SliceSource source, AreaStatus status)
{
    SliceRemoval r;
    r.slice = slice;
    r.height = height;
    r.area = band.volume / height;
    r.centroid = band.moment / band.volume;
    r.source = source;
    r.status = status;
    return r;
}

} // namespace

RunResult run_path(WorkpieceModel& wp, const Tool& tool, const ToolPath& path, const RunConfig& config)
{
    tool.validate();
    const auto slices = disk_slices(tool);
    const double radius = tool.radius();
    const double depth = config.depth_limit > 0.0 ? config.depth_limit : tool.flute_length;
    const double b = tool.disk_height;

    AreaOptions area_opts;
    area_opts.mismatch_limit = config.mismatch_limit;
    // Quantization of the sampled entry/exit points: half a sample along the
    // circle plus one dexel cell, amplified where the two tool circles cross
    // at a shallow angle.
    area_opts.corner_tolerance = std::max(4.0 * (radius * config.dphi_sample + wp.grid_spacing()), 0.1 * radius);

    RunResult result;
    result.table.density = wp.density();
    MassState state = initial_state(wp);

    const auto arc = path.arc_lengths();
    const auto times = path.times();
    LookupRow row0;
    row0.position = path.empty() ? Vec3{} : path.points.front().position;
    row0.mass = state.mass;
    row0.com = state.com;
    if (times)
        row0.time = 0.0;
    result.table.rows.push_back(row0);

    std::optional<StepEngagement> prev;
    double heading = 0.0;
    std::vector<SliceRemoval> slice_out(slices.size());
    std::vector<char> slice_has(slices.size());
    std::vector<BandAccum> bands(slices.size());

    for (std::size_t n = 0; n + 1 < path.size(); ++n)
    {
        const Vec3 p_n = path.points[n].position;
        const Vec3 p_n1 = path.points[n + 1].position;
        try
        {
            heading = feed_heading(p_n, p_n1, heading);
            StepEngagement eng =
                extract_engagement(wp, tool, p_n1, heading, config.sense, config.dphi_sample, static_cast<int>(n));
            const RemovedSet removed = carve_step(wp, tool, p_n, p_n1, depth);

            std::fill(bands.begin(), bands.end(), BandAccum{});
            BandAccum below, above;
            attribute_removal(wp, removed, p_n1.z, slices, bands, below, above);

            std::fill(slice_has.begin(), slice_has.end(), 0);
            parallel_for(slices.size(), [&](std::size_t i) {
                const auto& se = eng.slices[i];
                const BandAccum& band = bands[i];
                const double height = slices[i].height();
                const int idx = slices[i].index;
                const auto fallback = [&](AreaStatus status) {
                    if (band.volume > 0.0)
                    {
                        slice_out[i] = from_band(idx, height, band, SliceSource::Dexel, status);
                        slice_has[i] = 1;
                    }
                };
                if (se.intervals.empty())
                {
                    fallback(AreaStatus::Empty);
                    return;
                }
                // Band reaching below the previous tip (ramp, plunge) or above the
                // previous cutting length: the end face removes a full-disk layer there.
                const bool covered = se.z - 0.5 * height >= p_n.z - 1e-9 && se.z + 0.5 * height <= p_n.z + depth + 1e-9;
                const EngagementArcs arcs_n1 = eng.arcs(i, radius);
                const EngagementArcs* arcs_n = nullptr;
                EngagementArcs prev_arcs;
                if (prev && covered)
                {
                    const double rel = (se.z - prev->position.z) / b - 0.5;
                    const long j = std::lround(rel);
                    if (j >= 0 && static_cast<std::size_t>(j) < slices.size() &&
                        std::abs(prev->slices[static_cast<std::size_t>(j)].z - se.z) <= 0.5 * b + 1e-9)
                    {
                        prev_arcs = prev->arcs(static_cast<std::size_t>(j), radius);
                        arcs_n = &prev_arcs;
                    }
                }
                if (!arcs_n)
                {
                    fallback(AreaStatus::NoPreviousEngagement);
                    return;
                }
                const SliceArea sa = removed_area_slice(*arcs_n, arcs_n1, config.dphi_polygon, area_opts);
                if (sa.status != AreaStatus::Ok)
                {
                    fallback(sa.status);
                    return;
                }
                if (sa.area <= 0.0)
                    return;
                SliceRemoval r;
                r.slice = idx;
                r.height = height;
                r.area = sa.area;
                r.centroid = {sa.centroid->x, sa.centroid->y, se.z};
                r.source = SliceSource::Model;
                r.status = AreaStatus::Ok;
                slice_out[i] = r;
                slice_has[i] = 1;
            });

            RemovalRecord rec;
            rec.n = n + 1;
            rec.dexel_volume = removed.volume();
            rec.z_low = std::min(p_n.z, p_n1.z);
            rec.z_high = std::max(p_n.z, p_n1.z) + depth;
            if (below.volume > 0.0)
                rec.per_slice.push_back(from_band(-1, b, below, SliceSource::OutOfBand, AreaStatus::Ok));
            for (std::size_t i = 0; i < slices.size(); ++i)
            {
                if (!slice_has[i])
                    continue;
                const auto& sr = slice_out[i];
                rec.per_slice.push_back(sr);
                ++result.stats.status_counts[static_cast<std::size_t>(sr.status)];
                if (sr.source == SliceSource::Model)
                {
                    ++result.stats.model_slices;
                    result.stats.model_volume += sr.area * sr.height;
                }
                else
                {
                    ++result.stats.fallback_slices;
                    result.stats.fallback_volume += sr.area * sr.height;
                }
            }
            if (above.volume > 0.0)
                rec.per_slice.push_back(
                    from_band(static_cast<int>(slices.size()), b, above, SliceSource::OutOfBand, AreaStatus::Ok));
            for (const auto& sr : rec.per_slice)
                if (sr.source == SliceSource::OutOfBand)
                    result.stats.fallback_volume += sr.area * sr.height;

            const StepVolume sv = removed_volume_step(rec.per_slice);
            rec.volume = sv.volume;
            rec.mass = wp.density() * sv.volume;
            rec.centroid = sv.centroid;

            const Vec3 com = update_com(state, rec);
            state = update_mass(state, rec, wp.density());
            state.com = com;

            LookupRow row;
            row.n = n + 1;
            row.s = arc[n + 1];
            row.position = p_n1;
            row.mass = state.mass;
            row.com = state.com;
            row.removed_volume = rec.volume;
            if (times)
                row.time = (*times)[n + 1];
            result.table.rows.push_back(row);
            result.engaged.push_back(eng.any());
            result.stats.dexel_volume += rec.dexel_volume;
            result.records.push_back(std::move(rec));
            ++result.stats.steps;
            prev = std::move(eng);
        }
        catch (const MassUnderflow& e)
        {
            throw MassUnderflow("step " + std::to_string(n) + ": " + e.what());
        }
        catch (const VolumeUnderflow& e)
        {
            throw VolumeUnderflow("step " + std::to_string(n) + ": " + e.what());
        }
        catch (const StepError&)
        {
            throw;
        }
        catch (const std::exception& e)
        {
            throw StepError(n, e.what());
        }
    }
    return result;
}

} // namespace millmass
