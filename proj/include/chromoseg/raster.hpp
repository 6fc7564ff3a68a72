#pragma once

#include "chromoseg/grid.hpp"

namespace chromoseg::raster {

// Labels connected components of the set pixels. Labels are 1..K in
// first-encounter row-major scan order; background stays 0.
SegmentImage connected_components(const BinaryMask& mask, Connectivity connectivity);

// Number of distinct nonzero labels.
int label_count(const SegmentImage& segments);

// Morphological dilation by `radius` unit steps of the structuring element
// implied by the connectivity (4 = plus / Manhattan ball, 8 = square /
// Chebyshev ball). radius 0 is the identity.
BinaryMask dilate(const BinaryMask& mask, int radius, Connectivity connectivity);

// Exact Euclidean distance from every in-mask pixel to the nearest
// out-of-mask pixel center; pixels beyond the image border count as
// out-of-mask. Zero outside the mask.
DistanceImage distance_transform(const BinaryMask& mask);

// Labeled plateaus of pixels whose distance is positive and >= all
// neighbors' distances. Each connected plateau becomes one seed segment,
// labeled in first-encounter row-major order.
SegmentImage local_maxima(const DistanceImage& dist, Connectivity connectivity);

// Keeps only components whose area is >= min_area.
BinaryMask remove_small_components(const BinaryMask& mask, long long min_area,
                                   Connectivity connectivity);

// Seeded growth over descending integer distance levels, with the
// barely-a-maximum merge rule: when two segments become adjacent at level L
// and the smaller segment's peak distance is <= L + 1, they merge (the
// surviving label is the lower one). Ties for a contested pixel within one
// synchronous growth round go to the lower label. Fills every pixel of
// `allowed` reachable from a seed; connected components of `allowed`
// without a seed keep label 0.
SegmentImage grow_segments(const SegmentImage& seeds, const BinaryMask& allowed,
                           const DistanceImage& dist);

// Grows existing segments by synchronous unit dilation (8-connectivity)
// clipped to `allowed`, without any merging, until stable. Contested pixels
// go to the lower label.
void expand_segments(SegmentImage& segments, const BinaryMask& allowed);

// Renumbers nonzero labels to a contiguous 1..K range, preserving the
// first-encounter row-major order.
void compact_labels(SegmentImage& segments);

// Mask of pixels carrying the given label.
BinaryMask label_mask(const SegmentImage& segments, std::int32_t label);

} // namespace chromoseg::raster
