#pragma once

#include <vector>

namespace millmass {

// Flat end mill. The tool axis is machine +z and positions refer to the tip center.
struct Tool
{
    double diameter = 10.0;      // mm
    int flute_count = 2;         // carried for completeness; removal is flute independent
    double helix_angle = 30.0;   // degrees
    double flute_length = 20.0;  // mm
    double disk_height = 0.1;    // mm, axial slice height b

    double radius() const { return 0.5 * diameter; }

    // Throws std::invalid_argument naming the violated field.
    void validate() const;
};

// Axial slice of the cutter in the tool-tip frame.
struct DiskSlice
{
    int index = 0;
    double z_low = 0.0;
    double z_high = 0.0;
    double angular_offset = 0.0;  // helix lag of the edge reference at mid-height, rad

    double height() const { return z_high - z_low; }
    double z_mid() const { return 0.5 * (z_low + z_high); }
};

// Slices tiling [0, flute_length]. When flute_length is not a multiple of the
// disk height the top slice is shorter.
std::vector<DiskSlice> disk_slices(const Tool& tool);

// Helix-induced angular lag of the cutting edge across one disk height, rad.
double angular_resolution(const Tool& tool);

} // namespace millmass
