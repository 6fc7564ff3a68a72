#pragma once

#include <vector>

#include "chromoseg/grid.hpp"

namespace chromoseg {

// An axial angle: a line direction in degrees, defined only up to 180.
class AxialAngle {
public:
    explicit AxialAngle(double deg);

    // Wraps any angle in degrees into [0, 180).
    static AxialAngle normalized(double deg);

    double degrees() const { return deg_; }

private:
    double deg_;
};

// The two-channel embedding (cos 2θ, sin 2θ). Codec outputs are unit
// vectors; decoded inputs may have any nonzero magnitude.
struct DoubleAngleVector {
    double d0 = 0.0;
    double d1 = 0.0;
};

DoubleAngleVector encode(AxialAngle theta);

// Half the atan2 of the components, wrapped into [0, 180). Magnitude
// invariant; throws UndefinedValue on the zero vector.
AxialAngle decode(DoubleAngleVector v);

// min(|a-b|, 180-|a-b|), in [0, 90].
double axial_distance(AxialAngle a, AxialAngle b);

// Per-pixel double-angle vectors plus a validity mask. Invalid pixels are
// excluded from all statistics.
class OrientationField {
public:
    OrientationField() = default;
    OrientationField(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }

    const BinaryMask& valid() const { return valid_; }
    bool is_valid(int x, int y) const { return valid_.get(x, y); }

    void set(int x, int y, DoubleAngleVector v);
    void set_angle(int x, int y, AxialAngle theta) { set(x, y, encode(theta)); }
    void set_invalid(int x, int y);

    DoubleAngleVector vec(int x, int y) const;
    AxialAngle angle(int x, int y) const { return decode(vec(x, y)); }

    bool same_size(const OrientationField& o) const {
        return width_ == o.width_ && height_ == o.height_;
    }

private:
    std::size_t idx(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> d0_, d1_;
    BinaryMask valid_;
};

// Circular mean in double-angle space: sums the vectors over the valid
// region pixels and decodes the resultant. Throws UndefinedValue when the
// region has no valid pixel or the resultant cancels to zero.
AxialAngle region_mean_orientation(const OrientationField& field, const BinaryMask& region);

// Mean per-pixel axial distance between the decoded fields over pixels
// valid in both fields and inside the region. Throws UndefinedValue on an
// empty evaluation set.
double field_error(const OrientationField& predicted, const OrientationField& truth,
                   const BinaryMask& region);

} // namespace chromoseg
