#pragma once

#include "millmass/geometry.hpp"
#include "millmass/tool.hpp"
#include "millmass/workpiece.hpp"

#include <vector>

namespace millmass {

// Angles phi are measured from the feed direction (phi = 0) in the spindle
// rotation sense. Down milling with a clockwise (M3) spindle puts the
// engagement on the right-hand side of the feed; up milling mirrors it.
enum class RotationSense
{
    Clockwise,
    CounterClockwise,
};

// +1 when phi grows with the mathematical (counterclockwise) angle.
inline double sense_sign(RotationSense s) { return s == RotationSense::CounterClockwise ? 1.0 : -1.0; }

// phi_in lies in [0, 2pi); phi_ex = phi_in + measure, so an interval that
// straddles the feed direction has phi_ex >= 2pi.
struct AngularInterval
{
    double phi_in = 0.0;
    double phi_ex = 0.0;

    double measure() const { return phi_ex - phi_in; }
    bool full_circle() const { return measure() >= kTwoPi - 1e-12; }
};

// Engagement of one tool circle: where it sits, which way phi runs, and the
// engaged arcs.
struct EngagementArcs
{
    Circle2 circle;
    double heading = 0.0;  // machine angle of phi = 0, rad
    RotationSense sense = RotationSense::Clockwise;
    std::vector<AngularInterval> intervals;

    // Machine (counterclockwise from +x) angle of a tool angle phi.
    double machine_angle(double phi) const { return heading + sense_sign(sense) * phi; }
    Vec2 point_at(double phi) const { return circle.point_at(machine_angle(phi)); }
    double total_measure() const;
};

struct SliceEngagement
{
    int step = 0;
    int slice = 0;
    double z = 0.0;               // machine height of the slice mid-plane
    double angular_offset = 0.0;  // helix lag of this slice, rad
    std::vector<AngularInterval> intervals;
};

struct StepEngagement
{
    int step = 0;
    Vec3 position;  // tool tip
    double heading = 0.0;
    RotationSense sense = RotationSense::Clockwise;
    std::vector<SliceEngagement> slices;

    bool any() const;
    EngagementArcs arcs(std::size_t slice, double radius) const;
};

// Feed direction of the move a -> b in the machine x/y plane; `fallback`
// when the move has no planar component.
double feed_heading(const Vec3& a, const Vec3& b, double fallback);

// Samples the tool circle at height z against the material: a sample is
// engaged when the dexel column under it is solid at z. Runs shorter than two
// samples are dropped. Boundaries sit half a sample outside the outermost
// engaged samples.
std::vector<AngularInterval> sample_engagement(const WorkpieceModel& wp, const Circle2& circle, double z,
                                               double heading, RotationSense sense, double dphi_sample);

// Per-slice engagement of the tool at p_n1 against the current (pre-step)
// material. dphi_sample must not exceed 0.5 degrees.
StepEngagement extract_engagement(const WorkpieceModel& wp, const Tool& tool, const Vec3& p_n1, double heading,
                                  RotationSense sense, double dphi_sample, int step = 0);

} // namespace millmass
