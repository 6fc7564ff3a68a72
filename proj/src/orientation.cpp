#include "chromoseg/orientation.hpp"

#include <cmath>

namespace chromoseg {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;
constexpr double kRadToDeg = 180.0 / kPi;
} // namespace

AxialAngle::AxialAngle(double deg) : deg_(deg) {
    if (!(deg >= 0.0 && deg < 180.0))
        throw InvalidInput("AxialAngle: degrees must lie in [0, 180)");
}

AxialAngle AxialAngle::normalized(double deg) {
    double d = std::fmod(deg, 180.0);
    if (d < 0.0) d += 180.0;
    if (d >= 180.0) d = 0.0; // fmod rounding guard
    return AxialAngle(d);
}

DoubleAngleVector encode(AxialAngle theta) {
    const double a = 2.0 * theta.degrees() * kDegToRad;
    return {std::cos(a), std::sin(a)};
}

AxialAngle decode(DoubleAngleVector v) {
    if (v.d0 == 0.0 && v.d1 == 0.0)
        throw UndefinedValue("decode: zero vector has no orientation");
    const double half = 0.5 * std::atan2(v.d1, v.d0) * kRadToDeg;
    return AxialAngle::normalized(half);
}

double axial_distance(AxialAngle a, AxialAngle b) {
    const double d = std::fabs(a.degrees() - b.degrees());
    return std::min(d, 180.0 - d);
}

OrientationField::OrientationField(int width, int height)
    : width_(width), height_(height),
      d0_(static_cast<std::size_t>(width) * height, 0.0),
      d1_(static_cast<std::size_t>(width) * height, 0.0),
      valid_(width, height) {}

void OrientationField::set(int x, int y, DoubleAngleVector v) {
    if (!std::isfinite(v.d0) || !std::isfinite(v.d1))
        throw InvalidInput("OrientationField: components must be finite");
    d0_[idx(x, y)] = v.d0;
    d1_[idx(x, y)] = v.d1;
    valid_.set(x, y);
}

void OrientationField::set_invalid(int x, int y) {
    d0_[idx(x, y)] = 0.0;
    d1_[idx(x, y)] = 0.0;
    valid_.set(x, y, false);
}

DoubleAngleVector OrientationField::vec(int x, int y) const {
    return {d0_[idx(x, y)], d1_[idx(x, y)]};
}

AxialAngle region_mean_orientation(const OrientationField& field, const BinaryMask& region) {
    if (region.width() != field.width() || region.height() != field.height())
        throw InvalidInput("region_mean_orientation: dimension mismatch");
    double s0 = 0.0, s1 = 0.0;
    long long n = 0;
    for (int y = 0; y < field.height(); ++y)
        for (int x = 0; x < field.width(); ++x) {
            if (!region.get(x, y) || !field.is_valid(x, y)) continue;
            const DoubleAngleVector v = field.vec(x, y);
            s0 += v.d0;
            s1 += v.d1;
            ++n;
        }
    if (n == 0)
        throw UndefinedValue("region_mean_orientation: no valid pixels in region");
    // antipodal cancellation leaves only floating-point dust; treat it as
    // undefined rather than decoding noise
    if (std::hypot(s0, s1) <= 1e-9 * static_cast<double>(n))
        throw UndefinedValue("region_mean_orientation: zero resultant");
    return decode({s0, s1});
}

double field_error(const OrientationField& predicted, const OrientationField& truth,
                   const BinaryMask& region) {
    if (!predicted.same_size(truth))
        throw InvalidInput("field_error: field dimension mismatch");
    if (region.width() != truth.width() || region.height() != truth.height())
        throw InvalidInput("field_error: region dimension mismatch");
    double sum = 0.0;
    long long n = 0;
    for (int y = 0; y < truth.height(); ++y)
        for (int x = 0; x < truth.width(); ++x) {
            if (!region.get(x, y)) continue;
            if (!predicted.is_valid(x, y) || !truth.is_valid(x, y)) continue;
            sum += axial_distance(predicted.angle(x, y), truth.angle(x, y));
            ++n;
        }
    if (n == 0)
        throw UndefinedValue("field_error: empty evaluation set");
    return sum / static_cast<double>(n);
}

} // namespace chromoseg
