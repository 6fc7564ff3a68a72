#pragma once

#include <map>
#include <string>
#include <vector>

#include "chromoseg/grid.hpp"
#include "chromoseg/instseg.hpp"

namespace chromoseg::metrics {

// Jaccard index |a ∩ b| / |a ∪ b|; two empty masks score 1.
double iou(const BinaryMask& a, const BinaryMask& b);

struct SemanticReport {
    std::map<int, double> per_class_iou; // keys 0..3
    double average_iou = 0.0;
    double merged_ch_iou = 0.0; // IOU of the ch1 ∪ ch2 regions, swap-invariant
    bool swapped = false;       // whether scoring used the ch1/ch2-swapped prediction
};

// Scores a 4-class prediction under both ch1/ch2 labelings and keeps the
// one with the higher average IOU.
SemanticReport semantic_report(const LabelMap& pred, const LabelMap& truth);

struct InstanceReport {
    std::vector<double> per_truth_iou;
    double mean_best_match_iou = 0.0;
    int unmatched_predictions = 0; // predictions that were no truth's best match
};

// For each truth mask, the best IOU over all predictions; extra
// predictions are ignored. Throws UndefinedValue on an empty truth set.
InstanceReport instance_report(const instseg::InstanceSet& pred,
                               const instseg::InstanceSet& truth);

// Per-layer IOUs plus the orientation error over jointly-valid pixels.
// Keys: background_iou, chromosome_iou, overlap_iou, dilated_overlap_iou,
// orientation_error_deg.
std::map<std::string, double> layer_report(const instseg::PredictionLayers& pred,
                                           const instseg::PredictionLayers& truth);

} // namespace chromoseg::metrics
