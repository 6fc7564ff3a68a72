#include "chromoseg/emulate.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "chromoseg/metrics.hpp"
#include "chromoseg/rng.hpp"

namespace chromoseg::emulate {

void CorruptionProfile::validate() const {
    auto rate_ok = [](double r) { return r >= 0.0 && r <= 1.0; };
    if (!rate_ok(boundary_flip_rate) || !rate_ok(orientation_dropout_rate) ||
        !rate_ok(speckle_rate))
        throw InvalidInput("CorruptionProfile: rates must lie in [0, 1]");
    if (boundary_band < 0)
        throw InvalidInput("CorruptionProfile: boundary band must be >= 0");
    if (orientation_noise_sigma_deg < 0.0)
        throw InvalidInput("CorruptionProfile: sigma must be >= 0");
}

bool CorruptionProfile::is_identity() const {
    return boundary_flip_rate == 0.0 && orientation_noise_sigma_deg == 0.0 &&
           orientation_dropout_rate == 0.0 && speckle_rate == 0.0;
}

CorruptionProfile CorruptionProfile::with_seed(std::uint64_t s) const {
    CorruptionProfile p = *this;
    p.seed = s;
    return p;
}

namespace {

// Chebyshev distance from each pixel to the nearest differing-class pixel,
// clamped to band+1. A pixel belongs to the boundary band when a differing
// class sits within `band` pixels of it.
std::vector<std::uint8_t> band_membership(const LabelMap& map, int band) {
    const int w = map.width();
    const int h = map.height();
    std::vector<std::uint8_t> in_band(map.size(), 0);
    if (band <= 0) return in_band;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::uint8_t own = map.at(x, y);
            bool found = false;
            for (int dy = -band; dy <= band && !found; ++dy)
                for (int dx = -band; dx <= band; ++dx) {
                    const int nx = x + dx;
                    const int ny = y + dy;
                    if (!map.in_bounds(nx, ny)) continue;
                    if (map.at(nx, ny) != own) {
                        found = true;
                        break;
                    }
                }
            if (found) in_band[static_cast<std::size_t>(y) * w + x] = 1;
        }
    return in_band;
}

} // namespace

LabelMap corrupt_semantic(const LabelMap& truth, const CorruptionProfile& profile) {
    profile.validate();
    const int w = truth.width();
    const int h = truth.height();

    std::set<std::uint8_t> alphabet_set(truth.cells().begin(), truth.cells().end());
    const std::vector<std::uint8_t> alphabet(alphabet_set.begin(), alphabet_set.end());

    const auto in_band = band_membership(truth, profile.boundary_band);
    LabelMap out = truth;
    if (alphabet.size() < 2) return out; // nothing to flip to

    Rng rng(derive_seed(profile.seed, 0x5E11));
    std::vector<std::uint8_t> nearby;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const std::uint8_t own = truth.at(x, y);
            if (in_band[i]) {
                if (rng.uniform() >= profile.boundary_flip_rate) continue;
                // classes present within the band radius, excluding our own
                nearby.clear();
                const int b = profile.boundary_band;
                for (int dy = -b; dy <= b; ++dy)
                    for (int dx = -b; dx <= b; ++dx) {
                        const int nx = x + dx;
                        const int ny = y + dy;
                        if (!truth.in_bounds(nx, ny)) continue;
                        const std::uint8_t c = truth.at(nx, ny);
                        if (c != own &&
                            std::find(nearby.begin(), nearby.end(), c) == nearby.end())
                            nearby.push_back(c);
                    }
                std::sort(nearby.begin(), nearby.end());
                out.at(x, y) =
                    nearby[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(nearby.size()) - 1))];
            } else {
                if (rng.uniform() >= profile.speckle_rate) continue;
                // random class from the alphabet, excluding our own
                std::uint8_t pick;
                do {
                    pick = alphabet[static_cast<std::size_t>(
                        rng.uniform_int(0, static_cast<int>(alphabet.size()) - 1))];
                } while (pick == own);
                out.at(x, y) = pick;
            }
        }
    return out;
}

BinaryMask corrupt_mask(const BinaryMask& truth, const CorruptionProfile& profile) {
    LabelMap map(truth.width(), truth.height(), 0);
    for (int y = 0; y < truth.height(); ++y)
        for (int x = 0; x < truth.width(); ++x)
            if (truth.get(x, y)) map.at(x, y) = 1;
    const LabelMap corrupted = corrupt_semantic(map, profile);
    BinaryMask out(truth.width(), truth.height());
    for (int y = 0; y < truth.height(); ++y)
        for (int x = 0; x < truth.width(); ++x)
            if (corrupted.at(x, y) == 1) out.set(x, y);
    return out;
}

OrientationField corrupt_orientation(const OrientationField& truth,
                                     const CorruptionProfile& profile) {
    profile.validate();
    if (profile.orientation_noise_sigma_deg == 0.0 && profile.orientation_dropout_rate == 0.0)
        return truth;

    OrientationField out = truth;
    Rng rng(derive_seed(profile.seed, 0x0713));
    for (int y = 0; y < truth.height(); ++y)
        for (int x = 0; x < truth.width(); ++x) {
            if (!truth.is_valid(x, y)) continue;
            if (profile.orientation_noise_sigma_deg > 0.0) {
                const double theta = decode(truth.vec(x, y)).degrees();
                const double noisy =
                    theta + rng.normal(0.0, profile.orientation_noise_sigma_deg);
                out.set_angle(x, y, AxialAngle::normalized(noisy));
            }
            if (profile.orientation_dropout_rate > 0.0 &&
                rng.uniform() < profile.orientation_dropout_rate) {
                const double ang = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
                const double mag = std::max(1e-6, std::sqrt(rng.uniform()));
                out.set(x, y, {mag * std::cos(ang), mag * std::sin(ang)});
            }
        }
    return out;
}

namespace {

struct BatchTruth {
    std::vector<const synthgen::SyntheticSample*> samples;
    std::vector<BinaryMask> chromosome;
    std::vector<BinaryMask> overlap;
};

BatchTruth make_batch(std::span<const synthgen::SyntheticSample> batch) {
    BatchTruth b;
    for (const auto& s : batch) {
        b.samples.push_back(&s);
        BinaryMask ch(s.semantic3.width(), s.semantic3.height());
        BinaryMask ov(s.semantic3.width(), s.semantic3.height());
        for (int y = 0; y < s.semantic3.height(); ++y)
            for (int x = 0; x < s.semantic3.width(); ++x) {
                if (s.semantic3.at(x, y) == 1) ch.set(x, y);
                if (s.semantic3.at(x, y) == 2) ov.set(x, y);
            }
        b.chromosome.push_back(std::move(ch));
        b.overlap.push_back(std::move(ov));
    }
    return b;
}

// mean chromosome/overlap IOU of the corrupted 3-class maps over the batch
void measure_semantic(const BatchTruth& batch, const CorruptionProfile& profile,
                      std::uint64_t eval_seed, double& chromosome_iou, double& overlap_iou) {
    double sum_ch = 0.0, sum_ov = 0.0;
    for (std::size_t i = 0; i < batch.samples.size(); ++i) {
        const auto& s = *batch.samples[i];
        const LabelMap corrupted =
            corrupt_semantic(s.semantic3, profile.with_seed(derive_seed(eval_seed, i)));
        BinaryMask ch(s.semantic3.width(), s.semantic3.height());
        BinaryMask ov(s.semantic3.width(), s.semantic3.height());
        for (int y = 0; y < corrupted.height(); ++y)
            for (int x = 0; x < corrupted.width(); ++x) {
                if (corrupted.at(x, y) == 1) ch.set(x, y);
                if (corrupted.at(x, y) == 2) ov.set(x, y);
            }
        sum_ch += metrics::iou(ch, batch.chromosome[i]);
        sum_ov += metrics::iou(ov, batch.overlap[i]);
    }
    chromosome_iou = sum_ch / static_cast<double>(batch.samples.size());
    overlap_iou = sum_ov / static_cast<double>(batch.samples.size());
}

double measure_orientation(const BatchTruth& batch, const CorruptionProfile& profile,
                           std::uint64_t eval_seed) {
    double sum = 0.0;
    long long n = 0;
    for (std::size_t i = 0; i < batch.samples.size(); ++i) {
        const auto& s = *batch.samples[i];
        const OrientationField corrupted =
            corrupt_orientation(s.orientation, profile.with_seed(derive_seed(eval_seed, i)));
        const BinaryMask everywhere(s.orientation.width(), s.orientation.height(), true);
        try {
            const double err = field_error(corrupted, s.orientation, everywhere);
            sum += err;
            ++n;
        } catch (const UndefinedValue&) {
            // sample with no valid orientation pixels contributes nothing
        }
    }
    if (n == 0) throw UndefinedValue("calibrate: batch has no valid orientation pixels");
    return sum / static_cast<double>(n);
}

} // namespace

CalibrationOutcome calibrate_to_quality(std::span<const synthgen::SyntheticSample> batch,
                                        const QualityTargets& targets, std::uint64_t seed) {
    if (batch.empty())
        throw InvalidInput("calibrate: empty calibration batch");
    if (!(targets.chromosome_iou > 0.0 && targets.chromosome_iou <= 1.0) ||
        !(targets.overlap_iou > 0.0 && targets.overlap_iou <= 1.0))
        throw InvalidInput("calibrate: IOU targets must lie in (0, 1]");
    if (!(targets.orientation_error_deg >= 0.0 && targets.orientation_error_deg < 90.0))
        throw InvalidInput("calibrate: orientation target must lie in [0, 90)");

    constexpr double kIouTol = 0.03;
    constexpr double kDegTol = 1.0;
    const BatchTruth bt = make_batch(batch);
    const std::uint64_t eval_seed = derive_seed(seed, 0xCA11B);

    auto outcome_for = [&](const CorruptionProfile& p) {
        CalibrationOutcome out;
        out.profile = p;
        out.profile.seed = seed;
        measure_semantic(bt, p, eval_seed, out.chromosome_iou, out.overlap_iou);
        out.orientation_error_deg =
            p.orientation_noise_sigma_deg > 0.0 ? measure_orientation(bt, p, eval_seed) : 0.0;
        return out;
    };

    CorruptionProfile profile;
    profile.seed = seed;

    if (targets.chromosome_iou == 1.0 && targets.overlap_iou == 1.0 &&
        targets.orientation_error_deg == 0.0)
        return outcome_for(profile); // perfect targets, zero noise

    // orientation first: sigma shares no knob with the semantic layers
    if (targets.orientation_error_deg > 0.0) {
        auto err_at = [&](double sigma) {
            CorruptionProfile p = profile;
            p.orientation_noise_sigma_deg = sigma;
            return measure_orientation(bt, p, eval_seed);
        };
        double hi = 2.0;
        double err_hi = err_at(hi);
        while (err_hi < targets.orientation_error_deg && hi < 512.0) {
            hi *= 2.0;
            err_hi = err_at(hi);
        }
        if (err_hi + kDegTol < targets.orientation_error_deg) {
            // wrapped Gaussian noise saturates near 45 degrees
            profile.orientation_noise_sigma_deg = hi;
            throw CalibrationError("calibrate: orientation target unreachable",
                                   outcome_for(profile));
        }
        double lo = 0.0;
        for (int it = 0; it < 28; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (err_at(mid) < targets.orientation_error_deg) lo = mid;
            else hi = mid;
        }
        profile.orientation_noise_sigma_deg = 0.5 * (lo + hi);
    }

    // flip rate chases the chromosome IOU, speckle the overlap IOU; a few
    // Gauss-Seidel rounds absorb their cross-talk
    auto semantic_at = [&](double flip, double speckle, int band, double& ch, double& ov) {
        CorruptionProfile p = profile;
        p.boundary_flip_rate = flip;
        p.speckle_rate = speckle;
        p.boundary_band = band;
        measure_semantic(bt, p, eval_seed, ch, ov);
    };

    CalibrationOutcome best;
    best.profile = profile;
    double best_miss = 1e30;

    for (const int band : {2, 1, 3, 4}) {
        double flip = 0.0, speckle = 0.0;
        for (int round = 0; round < 4; ++round) {
            // chromosome IOU decreases in the flip rate
            double lo = 0.0, hi = 0.9;
            for (int it = 0; it < 22; ++it) {
                const double mid = 0.5 * (lo + hi);
                double ch, ov;
                semantic_at(mid, speckle, band, ch, ov);
                if (ch > targets.chromosome_iou) lo = mid;
                else hi = mid;
            }
            flip = 0.5 * (lo + hi);

            // overlap IOU decreases in the speckle rate
            lo = 0.0;
            hi = 0.08;
            for (int it = 0; it < 22; ++it) {
                const double mid = 0.5 * (lo + hi);
                double ch, ov;
                semantic_at(flip, mid, band, ch, ov);
                if (ov > targets.overlap_iou) lo = mid;
                else hi = mid;
            }
            speckle = 0.5 * (lo + hi);

            double ch, ov;
            semantic_at(flip, speckle, band, ch, ov);
            const double miss = std::max(std::fabs(ch - targets.chromosome_iou),
                                         std::fabs(ov - targets.overlap_iou));
            if (miss < best_miss) {
                best_miss = miss;
                best.profile = profile;
                best.profile.boundary_flip_rate = flip;
                best.profile.speckle_rate = speckle;
                best.profile.boundary_band = band;
                best.chromosome_iou = ch;
                best.overlap_iou = ov;
            }
            if (miss <= kIouTol) {
                CorruptionProfile done = profile;
                done.boundary_flip_rate = flip;
                done.speckle_rate = speckle;
                done.boundary_band = band;
                CalibrationOutcome out = outcome_for(done);
                if (std::fabs(out.orientation_error_deg - targets.orientation_error_deg) <=
                    kDegTol)
                    return out;
            }
        }
    }

    best.orientation_error_deg = best.profile.orientation_noise_sigma_deg > 0.0
                                     ? measure_orientation(bt, best.profile, eval_seed)
                                     : 0.0;
    throw CalibrationError("calibrate: IOU targets unreachable within parameter bounds", best);
}

} // namespace chromoseg::emulate
