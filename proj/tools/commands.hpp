#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace chromoseg::cli {

struct GenerateOptions {
    std::string out_dir;
    std::uint64_t seed = 1;
    std::vector<int> splits = {8, 2, 2};      // samples per train/val/test
    int pairs = -1;                           // optional total, must match splits
    std::vector<int> bank_splits = {8, 4, 4}; // procedural source shapes per split
    std::vector<int> canvas = {128, 128};
    std::string rule = "length_wise";
    double touch_fraction = 0.10;
    double min_separation_deg = 0.0;
    double cluster_fraction = 0.0;
    int cluster_max = 2;
};

struct CorruptOptions {
    std::string dataset_dir;
    std::string out_dir; // defaults to dataset_dir
    std::uint64_t seed = 1;
    std::string profile_file;
    // flag overrides for individual profile fields; negative = keep
    double flip_rate = -1.0;
    int band = -1;
    double sigma_deg = -1.0;
    double dropout = -1.0;
    double speckle = -1.0;
    bool calibrate = false;
    double target_chromosome_iou = 0.883;
    double target_overlap_iou = 0.586;
    double target_orientation_error_deg = 5.2;
};

struct SegmentOptions {
    std::string dataset_dir;
    std::string out_dir; // defaults to dataset_dir
    bool use_truth = false;
    long long min_overlap_area = 8;
    long long min_segment_area = 12;
    double merge_threshold_deg = 20.0;
    int near_overlap_radius = 3;
    int merge_band_width = 2;
};

struct EvaluateOptions {
    std::string dataset_dir;
    std::string pred_dir; // defaults to dataset_dir
    std::string report_file;
};

struct RenderOptions {
    std::string semantic_file;
    int classes = 0; // 0 = infer from the map's maximum code
    std::string orientation_file;
    std::string instances_file;
    std::string instances_meta_file;
    std::string out_file;
};

int run_generate(const GenerateOptions& opt);
int run_corrupt(const CorruptOptions& opt);
int run_segment(const SegmentOptions& opt);
int run_evaluate(const EvaluateOptions& opt);
int run_render(const RenderOptions& opt);

} // namespace chromoseg::cli
