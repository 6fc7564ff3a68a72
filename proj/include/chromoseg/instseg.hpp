#pragma once

#include <utility>
#include <vector>

#include "chromoseg/grid.hpp"
#include "chromoseg/orientation.hpp"

namespace chromoseg::instseg {

// The five layers a segmentation model would predict. background,
// chromosome and overlap must partition the canvas.
struct PredictionLayers {
    OrientationField orientation;
    BinaryMask dilated_overlap;
    BinaryMask background;
    BinaryMask chromosome;
    BinaryMask overlap;

    static PredictionLayers from_semantic(const LabelMap& semantic3,
                                          OrientationField orientation,
                                          BinaryMask dilated_overlap);
    void validate() const;
};

struct SegParams {
    long long min_overlap_area = 8;
    long long min_segment_area = 12;
    double orientation_merge_threshold_deg = 20.0;
    int near_overlap_radius = 3;
    int merge_band_width = 2;

    void validate() const;
};

// Separated chromosome masks; they may intersect each other only inside
// the overlap layer's region.
struct InstanceSet {
    std::vector<BinaryMask> masks;
};

struct SegDiagnostics {
    int seed_count = 0;
    int segments_after_growth = 0;
    int orientation_merges = 0;
    int removed_small_segments = 0;
    int overlap_regions = 0;
    int adjacency_merges = 0;
    bool fallback_component_seeding = false;
    int unseeded_components = 0;
    // overlap regions whose adjacent-segment count is not 2 after
    // resolution, as (region label, count)
    std::vector<std::pair<int, int>> odd_overlaps;
};

BinaryMask clean_overlap(const BinaryMask& overlap, const SegParams& params);

SegmentImage seed_and_grow(const PredictionLayers& layers, const SegParams& params,
                           SegDiagnostics* diag = nullptr);

SegmentImage orientation_merge(SegmentImage segments, const PredictionLayers& layers,
                               const SegParams& params, SegDiagnostics* diag = nullptr);

SegmentImage remove_small_segments(SegmentImage segments, const SegParams& params,
                                   SegDiagnostics* diag = nullptr);

SegmentImage resolve_overlap_adjacency(SegmentImage segments, const PredictionLayers& layers,
                                       const SegParams& params, SegDiagnostics* diag = nullptr);

InstanceSet attach_overlaps(const SegmentImage& segments, const PredictionLayers& layers,
                            const SegParams& params, SegDiagnostics* diag = nullptr);

// The full pipeline: clean the overlap, seed and grow, merge by
// orientation, drop small segments, resolve overlap adjacency, attach
// overlap regions to their adjacent segments.
InstanceSet segment_instances(const PredictionLayers& layers, const SegParams& params,
                              SegDiagnostics* diag = nullptr);

} // namespace chromoseg::instseg
