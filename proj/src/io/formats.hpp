#pragma once

#include <filesystem>
#include <string>

#include "chromoseg/grid.hpp"
#include "chromoseg/instseg.hpp"
#include "chromoseg/orientation.hpp"

namespace chromoseg::io {

// 8-bit grayscale PNG, value v <-> v/255
void write_intensity(const std::filesystem::path& path, const IntensityImage& img);
IntensityImage read_intensity(const std::filesystem::path& path);

// 8-bit grayscale PNG carrying the class codes directly
void write_label_map(const std::filesystem::path& path, const LabelMap& map);
LabelMap read_label_map(const std::filesystem::path& path, int max_code);

// 8-bit grayscale PNG, 0 / 255
void write_mask(const std::filesystem::path& path, const BinaryMask& mask);
BinaryMask read_mask(const std::filesystem::path& path);

// 16-bit grayscale PNG: valid pixel v = round(theta_deg * 100) in
// [0, 18000); invalid sentinel 65535
void write_orientation(const std::filesystem::path& path, const OrientationField& field);
OrientationField read_orientation(const std::filesystem::path& path);

// 8-bit bit-field PNG (pixel = sum of 2^(i-1) over containing instances,
// at most 8 instances) plus a JSON sidecar recording the count
void write_instances(const std::filesystem::path& png_path,
                     const std::filesystem::path& json_path,
                     const instseg::InstanceSet& instances);
instseg::InstanceSet read_instances(const std::filesystem::path& png_path,
                                    const std::filesystem::path& json_path);

} // namespace chromoseg::io
