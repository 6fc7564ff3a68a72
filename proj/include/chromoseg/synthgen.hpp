#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chromoseg/grid.hpp"
#include "chromoseg/orientation.hpp"
#include "chromoseg/rng.hpp"

namespace chromoseg::synthgen {

enum class Split { train = 0, val = 1, test = 2 };

const char* split_name(Split s);
Split split_from_name(const std::string& name);

// One annotated source chromosome: a tight crop with body mask and a
// per-pixel axial orientation field valid exactly on the body.
struct SourceShape {
    std::string id;
    Split split = Split::train;
    IntensityImage intensity;
    BinaryMask body;
    OrientationField orientation;
    double axis_length_px = 0.0; // medial axis length
};

// Geometry and banding of a procedural shape. The medial axis is a
// constant-curvature arc of the given length; orientation at every body
// pixel is the tangent at the nearest axis point.
struct ShapeParams {
    double length_px = 60.0;           // 20..120
    double width_px = 9.0;             // 4..16, <= length
    double curvature_deg_per_px = 0.0; // |curvature| * length <= 180
    double base_angle_deg = 0.0;       // tangent direction at the axis midpoint
    double band_period_px = 14.0;
    double band_phase_deg = 0.0;
    double band_contrast = 0.22;       // 0..0.45
    double base_intensity = 0.55;      // 0.2..0.75
    double texture_jitter = 0.03;

    void validate() const;
};

SourceShape procedural_shape(std::uint64_t seed, const ShapeParams& params,
                             std::string id = "shape", Split split = Split::train);

ShapeParams random_shape_params(Rng& rng);

struct BankCounts {
    int train = 8;
    int val = 4;
    int test = 4;
};

// Self-sufficient stand-in for a file-ingested bank of annotated
// chromosomes; ids are "<split>-<index>".
std::vector<SourceShape> make_procedural_bank(std::uint64_t seed, const BankCounts& counts);

// Rigid placement: rotate by rotation_deg about the crop center, then
// translate the center to canvas point (tx, ty).
struct Pose {
    double rotation_deg = 0.0;
    double tx = 0.0;
    double ty = 0.0;
};

struct CanvasSize {
    int width = 128;
    int height = 128;
};

enum class AssignmentRule { length_wise, orientation_wise, position_wise, random_order };

const char* rule_name(AssignmentRule r);
AssignmentRule rule_from_name(const std::string& name);

struct Provenance {
    std::vector<std::string> source_ids;
    std::vector<Pose> poses;
    std::vector<double> axis_lengths_px;
    std::uint64_t seed = 0;
    bool touch_pair = false;
};

// A composed sample with every target layer the model of the pipeline
// would be trained on. semantic4 is present only for pairs (0x0 grid
// otherwise). Instance masks include their overlap pixels.
struct SyntheticSample {
    IntensityImage image;
    LabelMap semantic4;          // 0 bg, 1 ch1, 2 ch2, 3 overlap
    LabelMap semantic3;          // 0 bg, 1 chromosome, 2 overlap
    BinaryMask dilated_overlap;
    OrientationField orientation; // valid only on unique-chromosome pixels
    std::vector<BinaryMask> instances;
    Provenance provenance;

    BinaryMask overlap_mask() const; // semantic3 == 2
};

SyntheticSample compose_pair(const SourceShape& a, const SourceShape& b,
                             Pose pose_a, Pose pose_b, CanvasSize canvas,
                             std::uint64_t seed);

// 2..5 shapes; rejects any pixel covered by three or more bodies and any
// shape not touching the rest of the cluster.
SyntheticSample compose_cluster(const std::vector<const SourceShape*>& shapes,
                                const std::vector<Pose>& poses, CanvasSize canvas,
                                std::uint64_t seed);

// Relabels semantic4 (and reorders instances/provenance to match) so that
// ch1 is the longer / more vertical / rightmost chromosome, or a fair coin.
SyntheticSample assign_classes(SyntheticSample sample, AssignmentRule rule, std::uint64_t seed);

struct SampleCounts {
    int train = 0;
    int val = 0;
    int test = 0;

    int total() const { return train + val + test; }
    int for_split(Split s) const;
};

struct GenOptions {
    CanvasSize canvas;
    double touch_fraction = 0.10;         // pairs posed to touch without overlapping
    double min_axial_separation_deg = 0.0;
    double max_overlap_fraction = 0.60;   // of the smaller body
    int max_pose_retries = 400;
    double cluster_fraction = 0.0;        // samples composed as 3..cluster_max clusters
    int cluster_max = 2;
};

struct ManifestRecord {
    std::string id; // "s0000"
    Split split = Split::train;
    std::vector<std::string> source_ids;
    std::vector<Pose> poses;
    std::uint64_t sample_seed = 0;
    bool touch_pair = false;
    int instance_count = 2;
};

struct Manifest {
    int schema_version = 1;
    std::uint64_t master_seed = 0;
    AssignmentRule rule = AssignmentRule::length_wise;
    CanvasSize canvas;
    std::vector<ManifestRecord> records;
};

struct Dataset {
    Manifest manifest;
    std::vector<SyntheticSample> samples;
};

// Pairs for a split are drawn only from that split's shapes; every sample
// is a pure function of (master_seed, split, index).
Dataset build_dataset(const std::vector<SourceShape>& bank, const SampleCounts& counts,
                      AssignmentRule rule, const GenOptions& options,
                      std::uint64_t master_seed);

} // namespace chromoseg::synthgen
