#pragma once

#include "chromoseg/grid.hpp"
#include "chromoseg/instseg.hpp"
#include "chromoseg/orientation.hpp"
#include "io/png_io.hpp"

namespace chromoseg::io {

// Class overlay. 4-class palette: blue background, green ch1, orange ch2,
// red overlap. 3-class palette: blue background, orange chromosome, green
// overlap.
Rgb8Image render_semantic(const LabelMap& map, int num_classes);

// Hue wheel with hue = 2*theta, so the axial wraparound is seamless;
// invalid pixels render black.
Rgb8Image render_orientation(const OrientationField& field);

// Fixed per-instance palette; pixels shared by several instances blend.
Rgb8Image render_instances(const instseg::InstanceSet& instances);

} // namespace chromoseg::io
