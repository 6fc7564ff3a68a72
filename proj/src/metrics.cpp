#include "chromoseg/metrics.hpp"

#include <algorithm>

namespace chromoseg::metrics {

double iou(const BinaryMask& a, const BinaryMask& b) {
    if (!a.same_size(b)) throw InvalidInput("iou: dimension mismatch");
    long long inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool pa = a.get_index(i);
        const bool pb = b.get_index(i);
        inter += pa && pb;
        uni += pa || pb;
    }
    if (uni == 0) return 1.0; // nothing to find, nothing found
    return static_cast<double>(inter) / static_cast<double>(uni);
}

namespace {

// per-class intersection/union counts for a 4-class map, with an optional
// ch1/ch2 swap applied to the prediction
struct ClassCounts {
    long long inter[4] = {0, 0, 0, 0};
    long long uni[4] = {0, 0, 0, 0};
};

ClassCounts count_classes(const LabelMap& pred, const LabelMap& truth, bool swap_ch) {
    ClassCounts c;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        int p = pred[i];
        const int t = truth[i];
        if (swap_ch) {
            if (p == 1) p = 2;
            else if (p == 2) p = 1;
        }
        for (int k = 0; k < 4; ++k) {
            c.inter[k] += p == k && t == k;
            c.uni[k] += p == k || t == k;
        }
    }
    return c;
}

double average_of(const ClassCounts& c) {
    double sum = 0.0;
    for (int k = 0; k < 4; ++k)
        sum += c.uni[k] == 0 ? 1.0 : static_cast<double>(c.inter[k]) / c.uni[k];
    return sum / 4.0;
}

} // namespace

SemanticReport semantic_report(const LabelMap& pred, const LabelMap& truth) {
    if (!pred.same_size(truth)) throw InvalidInput("semantic_report: dimension mismatch");
    for (std::uint8_t v : pred.cells())
        if (v > 3) throw InvalidInput("semantic_report: prediction carries a code > 3");
    for (std::uint8_t v : truth.cells())
        if (v > 3) throw InvalidInput("semantic_report: truth carries a code > 3");

    const ClassCounts identity = count_classes(pred, truth, false);
    const ClassCounts swapped = count_classes(pred, truth, true);
    const double avg_id = average_of(identity);
    const double avg_sw = average_of(swapped);

    SemanticReport report;
    report.swapped = avg_sw > avg_id;
    const ClassCounts& used = report.swapped ? swapped : identity;
    for (int k = 0; k < 4; ++k)
        report.per_class_iou[k] =
            used.uni[k] == 0 ? 1.0 : static_cast<double>(used.inter[k]) / used.uni[k];
    report.average_iou = report.swapped ? avg_sw : avg_id;

    long long minter = 0, muni = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool p = pred[i] == 1 || pred[i] == 2;
        const bool t = truth[i] == 1 || truth[i] == 2;
        minter += p && t;
        muni += p || t;
    }
    report.merged_ch_iou = muni == 0 ? 1.0 : static_cast<double>(minter) / muni;
    return report;
}

InstanceReport instance_report(const instseg::InstanceSet& pred,
                               const instseg::InstanceSet& truth) {
    if (truth.masks.empty())
        throw UndefinedValue("instance_report: empty truth set");

    InstanceReport report;
    std::vector<bool> matched(pred.masks.size(), false);
    double sum = 0.0;
    for (const BinaryMask& t : truth.masks) {
        double best = 0.0;
        int best_idx = -1;
        for (std::size_t i = 0; i < pred.masks.size(); ++i) {
            const double v = iou(pred.masks[i], t);
            if (v > best) {
                best = v;
                best_idx = static_cast<int>(i);
            }
        }
        if (best_idx >= 0) matched[best_idx] = true;
        report.per_truth_iou.push_back(best);
        sum += best;
    }
    report.mean_best_match_iou = sum / static_cast<double>(truth.masks.size());
    for (bool m : matched)
        if (!m) ++report.unmatched_predictions;
    return report;
}

std::map<std::string, double> layer_report(const instseg::PredictionLayers& pred,
                                           const instseg::PredictionLayers& truth) {
    if (pred.chromosome.width() != truth.chromosome.width() ||
        pred.chromosome.height() != truth.chromosome.height())
        throw InvalidInput("layer_report: dimension mismatch");
    std::map<std::string, double> out;
    out["background_iou"] = iou(pred.background, truth.background);
    out["chromosome_iou"] = iou(pred.chromosome, truth.chromosome);
    out["overlap_iou"] = iou(pred.overlap, truth.overlap);
    out["dilated_overlap_iou"] = iou(pred.dilated_overlap, truth.dilated_overlap);
    const BinaryMask everywhere(pred.chromosome.width(), pred.chromosome.height(), true);
    out["orientation_error_deg"] = field_error(pred.orientation, truth.orientation, everywhere);
    return out;
}

} // namespace chromoseg::metrics
