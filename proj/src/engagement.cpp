#include "millmass/engagement.hpp"

#include "millmass/parallel.hpp"

#include <cmath>
#include <stdexcept>

namespace millmass {

double EngagementArcs::total_measure() const
{
    double m = 0.0;
    for (const auto& iv : intervals)
        m += iv.measure();
    return m;
}

bool StepEngagement::any() const
{
    for (const auto& s : slices)
        if (!s.intervals.empty())
            return true;
    return false;
}

EngagementArcs StepEngagement::arcs(std::size_t slice, double radius) const
{
    EngagementArcs a;
    a.circle = {position.xy(), radius};
    a.heading = heading;
    a.sense = sense;
    a.intervals = slices.at(slice).intervals;
    return a;
}

double feed_heading(const Vec3& a, const Vec3& b, double fallback)
{
    const Vec2 d = b.xy() - a.xy();
    if (dot(d, d) < 1e-24)
        return fallback;
    return std::atan2(d.y, d.x);
}

std::vector<AngularInterval> sample_engagement(const WorkpieceModel& wp, const Circle2& circle, double z,
                                               double heading, RotationSense sense, double dphi_sample)
{
    const auto n = static_cast<std::size_t>(std::ceil(kTwoPi / dphi_sample - 1e-9));
    const double step = kTwoPi / static_cast<double>(n);
    const double s = sense_sign(sense);

    std::vector<char> engaged(n);
    std::size_t count = 0;
    for (std::size_t k = 0; k < n; ++k)
    {
        const Vec2 p = circle.point_at(heading + s * step * static_cast<double>(k));
        engaged[k] = wp.solid_at(p.x, p.y, z) ? 1 : 0;
        count += static_cast<std::size_t>(engaged[k]);
    }

    std::vector<AngularInterval> out;
    if (count == 0)
        return out;
    if (count == n)
    {
        out.push_back({0.0, kTwoPi});
        return out;
    }

    // Start scanning right after a free sample so wrapped runs stay contiguous.
    std::size_t start = 0;
    while (engaged[start])
        ++start;
    std::size_t k = 0;
    while (k < n)
    {
        const std::size_t idx = (start + k) % n;
        if (!engaged[idx])
        {
            ++k;
            continue;
        }
        const std::size_t first = idx;
        std::size_t len = 0;
        while (k < n && engaged[(start + k) % n])
        {
            ++len;
            ++k;
        }
        if (len < 2)
            continue;
        const double phi_in = wrap_two_pi((static_cast<double>(first) - 0.5) * step);
        out.push_back({phi_in, phi_in + static_cast<double>(len) * step});
    }
    return out;
}

StepEngagement extract_engagement(const WorkpieceModel& wp, const Tool& tool, const Vec3& p_n1, double heading,
                                  RotationSense sense, double dphi_sample, int step)
{
    if (!(dphi_sample > 0.0) || dphi_sample > deg2rad(0.5) + 1e-15)
        throw std::invalid_argument("engagement sampling step must be in (0, 0.5] degrees");

    const auto slices = disk_slices(tool);
    StepEngagement out;
    out.step = step;
    out.position = p_n1;
    out.heading = heading;
    out.sense = sense;
    out.slices.resize(slices.size());

    const Circle2 circle{p_n1.xy(), tool.radius()};
    parallel_for(slices.size(), [&](std::size_t i) {
        auto& se = out.slices[i];
        se.step = step;
        se.slice = slices[i].index;
        se.z = p_n1.z + slices[i].z_mid();
        se.angular_offset = slices[i].angular_offset;
        if (se.z < wp.z_min() || se.z > wp.z_max())
            return;
        se.intervals = sample_engagement(wp, circle, se.z, heading, sense, dphi_sample);
    });
    return out;
}

} // namespace millmass
