#pragma once

#include <cstdint>
#include <span>

#include "chromoseg/grid.hpp"
#include "chromoseg/orientation.hpp"
#include "chromoseg/synthgen.hpp"

namespace chromoseg::emulate {

// Controls for corrupting ground-truth layers into network-like
// imperfect predictions.
struct CorruptionProfile {
    double boundary_flip_rate = 0.0;        // per boundary-band pixel
    int boundary_band = 2;                  // pixels from a class boundary
    double orientation_noise_sigma_deg = 0.0;
    double orientation_dropout_rate = 0.0;
    double speckle_rate = 0.0;              // per non-band pixel
    std::uint64_t seed = 0;

    void validate() const;
    bool is_identity() const;
    CorruptionProfile with_seed(std::uint64_t s) const;
};

// Boundary-band pixels flip to a uniformly chosen nearby class with
// probability boundary_flip_rate; elsewhere speckle flips to a random
// class from the map's alphabet. Deterministic in the profile seed.
LabelMap corrupt_semantic(const LabelMap& truth, const CorruptionProfile& profile);

// Binary layers are corrupted as a two-class map.
BinaryMask corrupt_mask(const BinaryMask& truth, const CorruptionProfile& profile);

// Valid pixels get Gaussian angle noise (sigma degrees, re-encoded); with
// probability orientation_dropout_rate the vector is replaced by a random
// one of magnitude <= 1. Validity is preserved.
OrientationField corrupt_orientation(const OrientationField& truth,
                                     const CorruptionProfile& profile);

struct QualityTargets {
    double chromosome_iou = 1.0;      // (0, 1]
    double overlap_iou = 1.0;         // (0, 1]
    double orientation_error_deg = 0.0; // [0, 90)
};

struct CalibrationOutcome {
    CorruptionProfile profile;
    double chromosome_iou = 1.0;
    double overlap_iou = 1.0;
    double orientation_error_deg = 0.0;
};

class CalibrationError : public Error {
public:
    CalibrationError(const std::string& msg, CalibrationOutcome best_found)
        : Error(msg), best(std::move(best_found)) {}
    CalibrationOutcome best;
};

// Coordinate bisection over (flip rate, speckle rate, sigma) until the
// corrupted layers of the calibration batch achieve the targets within
// ±0.03 IOU / ±1 degree. Throws CalibrationError with the best profile
// found when the targets are unreachable.
CalibrationOutcome calibrate_to_quality(std::span<const synthgen::SyntheticSample> batch,
                                        const QualityTargets& targets, std::uint64_t seed);

} // namespace chromoseg::emulate
