#include "millmass/tool.hpp"

#include "millmass/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace millmass {

void Tool::validate() const
{
    if (!(diameter > 0.0))
        throw std::invalid_argument("tool diameter must be > 0");
    if (flute_count < 1)
        throw std::invalid_argument("tool flute_count must be >= 1");
    if (!(helix_angle >= 0.0 && helix_angle < 90.0))
        throw std::invalid_argument("tool helix_angle must be in [0, 90)");
    if (!(disk_height > 0.0))
        throw std::invalid_argument("tool disk_height must be > 0");
    if (!(flute_length >= disk_height))
        throw std::invalid_argument("tool flute_length must be >= disk_height");
}

std::vector<DiskSlice> disk_slices(const Tool& tool)
{
    tool.validate();
    const double b = tool.disk_height;
    const double ratio = tool.flute_length / b;
    auto count = static_cast<int>(std::llround(ratio));
    if (std::abs(ratio - count) > 1e-9 * ratio)
        count = static_cast<int>(std::ceil(ratio));

    const double lag_per_mm = 2.0 * std::tan(deg2rad(tool.helix_angle)) / tool.diameter;
    std::vector<DiskSlice> slices;
    slices.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
    {
        DiskSlice s;
        s.index = i;
        s.z_low = i * b;
        s.z_high = (i + 1 == count) ? tool.flute_length : (i + 1) * b;
        s.angular_offset = s.z_mid() * lag_per_mm;
        slices.push_back(s);
    }
    return slices;
}

double angular_resolution(const Tool& tool)
{
    tool.validate();
    return 2.0 * tool.disk_height * std::tan(deg2rad(tool.helix_angle)) / tool.diameter;
}

} // namespace millmass
