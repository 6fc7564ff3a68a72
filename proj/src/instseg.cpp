#include "chromoseg/instseg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>

#include "chromoseg/raster.hpp"

namespace chromoseg::instseg {

namespace {

using raster::dilate;
using raster::label_mask;

std::vector<std::int32_t> distinct_labels(const SegmentImage& segments) {
    std::set<std::int32_t> seen;
    for (std::int32_t v : segments.cells())
        if (v > 0) seen.insert(v);
    return {seen.begin(), seen.end()};
}

// mean orientation of a masked region, or nullopt when no valid pixel or
// the resultant cancels
std::optional<AxialAngle> mean_or_none(const OrientationField& field, const BinaryMask& region) {
    try {
        return region_mean_orientation(field, region);
    } catch (const UndefinedValue&) {
        return std::nullopt;
    }
}

} // namespace

PredictionLayers PredictionLayers::from_semantic(const LabelMap& semantic3,
                                                 OrientationField orientation,
                                                 BinaryMask dilated_overlap) {
    const int w = semantic3.width();
    const int h = semantic3.height();
    PredictionLayers layers;
    layers.background = BinaryMask(w, h);
    layers.chromosome = BinaryMask(w, h);
    layers.overlap = BinaryMask(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            switch (semantic3.at(x, y)) {
                case 0: layers.background.set(x, y); break;
                case 1: layers.chromosome.set(x, y); break;
                case 2: layers.overlap.set(x, y); break;
                default:
                    throw InvalidInput("from_semantic: 3-class map carries a code > 2");
            }
        }
    layers.orientation = std::move(orientation);
    layers.dilated_overlap = std::move(dilated_overlap);
    layers.validate();
    return layers;
}

void PredictionLayers::validate() const {
    const int w = chromosome.width();
    const int h = chromosome.height();
    if (w == 0 || h == 0)
        throw InvalidInput("PredictionLayers: empty layers");
    if (background.width() != w || background.height() != h ||
        overlap.width() != w || overlap.height() != h ||
        dilated_overlap.width() != w || dilated_overlap.height() != h ||
        orientation.width() != w || orientation.height() != h)
        throw InvalidInput("PredictionLayers: layer dimension mismatch");
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int n = (background.get(x, y) ? 1 : 0) + (chromosome.get(x, y) ? 1 : 0) +
                          (overlap.get(x, y) ? 1 : 0);
            if (n != 1)
                throw InvalidInput("PredictionLayers: background/chromosome/overlap must "
                                   "partition the canvas");
        }
}

void SegParams::validate() const {
    if (min_overlap_area < 0 || min_segment_area < 0 || near_overlap_radius < 0 ||
        merge_band_width < 0)
        throw InvalidInput("SegParams: sizes must be non-negative");
    if (!(orientation_merge_threshold_deg >= 0.0 && orientation_merge_threshold_deg <= 90.0))
        throw InvalidInput("SegParams: merge threshold must lie in [0, 90] degrees");
}

BinaryMask clean_overlap(const BinaryMask& overlap, const SegParams& params) {
    return raster::remove_small_components(overlap, params.min_overlap_area,
                                           Connectivity::eight);
}

SegmentImage seed_and_grow(const PredictionLayers& layers, const SegParams& /*params*/,
                           SegDiagnostics* diag) {
    const int w = layers.chromosome.width();
    const int h = layers.chromosome.height();

    if (layers.chromosome.empty()) return SegmentImage(w, h, 0);

    BinaryMask eroded = layers.chromosome;
    eroded.subtract(layers.dilated_overlap);

    SegmentImage segments;
    if (eroded.empty()) {
        // degenerate input: the dilated overlap swallowed the whole
        // chromosome layer, fall back to one seed per component
        segments = raster::connected_components(layers.chromosome, Connectivity::eight);
        if (diag) {
            diag->fallback_component_seeding = true;
            diag->seed_count = raster::label_count(segments);
        }
    } else {
        const DistanceImage dist = raster::distance_transform(eroded);
        const SegmentImage seeds = raster::local_maxima(dist, Connectivity::eight);
        if (diag) diag->seed_count = raster::label_count(seeds);
        segments = raster::grow_segments(seeds, eroded, dist);
        raster::expand_segments(segments, layers.chromosome);

        // chromosome components fully inside the dilated overlap have no
        // seed; label each leftover component on its own
        std::int32_t next = 0;
        for (std::int32_t v : segments.cells()) next = std::max(next, v);
        BinaryMask leftover(w, h);
        bool any = false;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (layers.chromosome.get(x, y) && segments.at(x, y) == 0) {
                    leftover.set(x, y);
                    any = true;
                }
        if (any) {
            const SegmentImage extra = raster::connected_components(leftover, Connectivity::eight);
            int added = 0;
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x)
                    if (extra.at(x, y) > 0) {
                        segments.at(x, y) = next + extra.at(x, y);
                        added = std::max(added, static_cast<int>(extra.at(x, y)));
                    }
            if (diag) diag->unseeded_components = added;
        }
    }

    raster::compact_labels(segments);
    if (diag) diag->segments_after_growth = raster::label_count(segments);
    return segments;
}

SegmentImage orientation_merge(SegmentImage segments, const PredictionLayers& layers,
                               const SegParams& params, SegDiagnostics* diag) {
    const BinaryMask cleaned = clean_overlap(layers.overlap, params);
    const BinaryMask near_overlap =
        dilate(cleaned, params.near_overlap_radius, Connectivity::eight);

    for (;;) {
        const auto labels = distinct_labels(segments);
        std::map<std::int32_t, BinaryMask> masks;
        std::map<std::int32_t, BinaryMask> grown;
        for (std::int32_t l : labels) {
            masks.emplace(l, label_mask(segments, l));
            grown.emplace(l, dilate(masks.at(l), 1, Connectivity::eight));
        }

        bool merged = false;
        for (std::size_t ai = 0; ai < labels.size() && !merged; ++ai) {
            for (std::size_t bi = ai + 1; bi < labels.size() && !merged; ++bi) {
                const std::int32_t a = labels[ai];
                const std::int32_t b = labels[bi];
                BinaryMask neighbouring = grown.at(a) & grown.at(b);
                if (neighbouring.empty()) continue;
                if (neighbouring.intersects(near_overlap)) continue;

                // compare mean orientations over the contact bands, whole
                // segments when a band has no valid pixel
                const BinaryMask band_zone =
                    dilate(neighbouring, params.merge_band_width, Connectivity::eight);
                auto band_mean = [&](std::int32_t label) {
                    auto m = mean_or_none(layers.orientation, masks.at(label) & band_zone);
                    if (!m) m = mean_or_none(layers.orientation, masks.at(label));
                    return m;
                };
                const auto mean_a = band_mean(a);
                const auto mean_b = band_mean(b);
                if (!mean_a || !mean_b) continue;
                if (axial_distance(*mean_a, *mean_b) > params.orientation_merge_threshold_deg)
                    continue;

                for (std::int32_t& v : segments.cells())
                    if (v == b) v = a;
                merged = true;
                if (diag) ++diag->orientation_merges;
            }
        }
        if (!merged) break;
    }
    return segments;
}

SegmentImage remove_small_segments(SegmentImage segments, const SegParams& params,
                                   SegDiagnostics* diag) {
    std::map<std::int32_t, long long> area;
    for (std::int32_t v : segments.cells())
        if (v > 0) ++area[v];
    std::set<std::int32_t> drop;
    for (const auto& [label, a] : area)
        if (a < params.min_segment_area) drop.insert(label);
    if (!drop.empty())
        for (std::int32_t& v : segments.cells())
            if (v > 0 && drop.count(v)) v = 0;
    if (diag) diag->removed_small_segments += static_cast<int>(drop.size());
    return segments;
}

SegmentImage resolve_overlap_adjacency(SegmentImage segments, const PredictionLayers& layers,
                                       const SegParams& params, SegDiagnostics* diag) {
    const BinaryMask cleaned = clean_overlap(layers.overlap, params);
    const SegmentImage regions = raster::connected_components(cleaned, Connectivity::eight);
    const int region_count = raster::label_count(regions);
    if (diag) diag->overlap_regions = region_count;

    auto adjacent_segments = [&](std::int32_t region_label) {
        const BinaryMask region = label_mask(regions, region_label);
        const BinaryMask grown = dilate(region, 1, Connectivity::eight);
        std::set<std::int32_t> out;
        for (int y = 0; y < segments.height(); ++y)
            for (int x = 0; x < segments.width(); ++x)
                if (grown.get(x, y) && segments.at(x, y) > 0) out.insert(segments.at(x, y));
        return out;
    };

    for (std::int32_t region_label = 1; region_label <= region_count; ++region_label) {
        for (;;) {
            const auto adj = adjacent_segments(region_label);
            if (adj.size() <= 2) break;

            // merge the adjacent pair with the most similar whole-segment
            // mean orientation; ties go to the lowest label pair
            std::optional<std::pair<std::int32_t, std::int32_t>> best_pair;
            double best_dist = 0.0;
            std::map<std::int32_t, std::optional<AxialAngle>> means;
            for (std::int32_t l : adj)
                means[l] = mean_or_none(layers.orientation, label_mask(segments, l));
            for (auto ai = adj.begin(); ai != adj.end(); ++ai)
                for (auto bi = std::next(ai); bi != adj.end(); ++bi) {
                    if (!means[*ai] || !means[*bi]) continue;
                    const double d = axial_distance(*means[*ai], *means[*bi]);
                    if (!best_pair || d < best_dist) {
                        best_pair = {*ai, *bi};
                        best_dist = d;
                    }
                }
            if (!best_pair) break; // no orientation evidence to act on

            const auto [lo, hi] = *best_pair;
            for (std::int32_t& v : segments.cells())
                if (v == hi) v = lo;
            if (diag) ++diag->adjacency_merges;
        }
    }
    return segments;
}

InstanceSet attach_overlaps(const SegmentImage& segments, const PredictionLayers& layers,
                            const SegParams& params, SegDiagnostics* diag) {
    const BinaryMask cleaned = clean_overlap(layers.overlap, params);
    const SegmentImage regions = raster::connected_components(cleaned, Connectivity::eight);
    const int region_count = raster::label_count(regions);

    const auto labels = distinct_labels(segments);
    std::map<std::int32_t, std::size_t> index_of;
    InstanceSet out;
    for (std::int32_t l : labels) {
        index_of[l] = out.masks.size();
        out.masks.push_back(label_mask(segments, l));
    }

    for (std::int32_t region_label = 1; region_label <= region_count; ++region_label) {
        const BinaryMask region = label_mask(regions, region_label);
        const BinaryMask grown = dilate(region, 1, Connectivity::eight);
        std::set<std::int32_t> adj;
        for (int y = 0; y < segments.height(); ++y)
            for (int x = 0; x < segments.width(); ++x)
                if (grown.get(x, y) && segments.at(x, y) > 0) adj.insert(segments.at(x, y));

        if (adj.size() != 2 && diag)
            diag->odd_overlaps.push_back({region_label, static_cast<int>(adj.size())});

        if (adj.empty()) {
            // isolated overlap region: keep its pixels as an instance of
            // their own rather than dropping them
            out.masks.push_back(region);
            continue;
        }
        for (std::int32_t l : adj) out.masks[index_of[l]] |= region;
    }
    return out;
}

InstanceSet segment_instances(const PredictionLayers& layers, const SegParams& params,
                              SegDiagnostics* diag) {
    layers.validate();
    params.validate();

    if (layers.chromosome.empty()) return {};

    // the overlap layer is cleaned inside every step that consumes it
    SegmentImage segments = seed_and_grow(layers, params, diag);
    segments = orientation_merge(std::move(segments), layers, params, diag);
    segments = remove_small_segments(std::move(segments), params, diag);
    segments = resolve_overlap_adjacency(std::move(segments), layers, params, diag);
    return attach_overlaps(segments, layers, params, diag);
}

} // namespace chromoseg::instseg
