#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>

#include <nlohmann/json.hpp>

#include "chromoseg/emulate.hpp"
#include "chromoseg/instseg.hpp"
#include "chromoseg/metrics.hpp"
#include "chromoseg/synthgen.hpp"
#include "io/formats.hpp"
#include "io/manifest.hpp"
#include "io/png_io.hpp"
#include "io/render.hpp"

namespace chromoseg::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace chromoseg::synthgen;

// reports carry floats at six significant digits
double sig6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::strtod(buf, nullptr);
}

json profile_to_json(const emulate::CorruptionProfile& p) {
    json j;
    j["boundary_flip_rate"] = p.boundary_flip_rate;
    j["boundary_band"] = p.boundary_band;
    j["orientation_noise_sigma_deg"] = p.orientation_noise_sigma_deg;
    j["orientation_dropout_rate"] = p.orientation_dropout_rate;
    j["speckle_rate"] = p.speckle_rate;
    j["seed"] = p.seed;
    return j;
}

emulate::CorruptionProfile profile_from_json(const json& j, const std::string& where) {
    emulate::CorruptionProfile p;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "boundary_flip_rate") p.boundary_flip_rate = value.get<double>();
            else if (key == "boundary_band") p.boundary_band = value.get<int>();
            else if (key == "orientation_noise_sigma_deg") p.orientation_noise_sigma_deg = value.get<double>();
            else if (key == "orientation_dropout_rate") p.orientation_dropout_rate = value.get<double>();
            else if (key == "speckle_rate") p.speckle_rate = value.get<double>();
            else if (key == "seed") p.seed = value.get<std::uint64_t>();
            else throw ConfigError(where + ": unknown profile key '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw IoError(where + ": " + e.what());
    }
    p.validate();
    return p;
}

struct LoadedSample {
    ManifestRecord rec;
    io::SampleFiles files;
};

std::vector<LoadedSample> list_samples(const Manifest& manifest) {
    std::vector<LoadedSample> out;
    for (const auto& rec : manifest.records)
        out.push_back({rec, io::sample_file_names(rec.id, rec.instance_count == 2)});
    return out;
}

void require_exists(const fs::path& p) {
    if (!fs::exists(p)) throw IoError(p.string() + ": file listed in manifest is missing");
}

instseg::PredictionLayers load_layers(const fs::path& dir, const io::SampleFiles& files,
                                      bool pred_side) {
    const fs::path sem = dir / (pred_side ? files.pred_semantic3 : files.semantic3);
    const fs::path ori = dir / (pred_side ? files.pred_orientation : files.orientation);
    const fs::path dil = dir / (pred_side ? files.pred_dilated_overlap : files.dilated_overlap);
    require_exists(sem);
    require_exists(ori);
    require_exists(dil);
    return instseg::PredictionLayers::from_semantic(io::read_label_map(sem, 2),
                                                    io::read_orientation(ori),
                                                    io::read_mask(dil));
}

} // namespace

int run_generate(const GenerateOptions& opt) {
    if (opt.out_dir.empty()) throw ConfigError("generate: --out is required");
    if (opt.splits.size() != 3) throw ConfigError("generate: --splits needs train,val,test");
    if (opt.bank_splits.size() != 3)
        throw ConfigError("generate: --bank-splits needs train,val,test");
    if (opt.canvas.size() != 2) throw ConfigError("generate: --canvas needs width,height");
    const int total = opt.splits[0] + opt.splits[1] + opt.splits[2];
    if (opt.pairs >= 0 && opt.pairs != total)
        throw ConfigError("generate: --pairs disagrees with the sum of --splits");

    BankCounts bank_counts{opt.bank_splits[0], opt.bank_splits[1], opt.bank_splits[2]};
    const auto bank = make_procedural_bank(derive_seed(opt.seed, 0xBA2E), bank_counts);

    GenOptions gen;
    gen.canvas = {opt.canvas[0], opt.canvas[1]};
    gen.touch_fraction = opt.touch_fraction;
    gen.min_axial_separation_deg = opt.min_separation_deg;
    gen.cluster_fraction = opt.cluster_fraction;
    gen.cluster_max = opt.cluster_max;

    const SampleCounts counts{opt.splits[0], opt.splits[1], opt.splits[2]};
    const Dataset dataset =
        build_dataset(bank, counts, rule_from_name(opt.rule), gen, opt.seed);
    io::write_dataset(opt.out_dir, dataset);
    std::cout << "generated " << dataset.samples.size() << " samples into " << opt.out_dir
              << "\n";
    return 0;
}

int run_corrupt(const CorruptOptions& opt) {
    if (opt.dataset_dir.empty()) throw ConfigError("corrupt: --dataset is required");
    const fs::path dataset_dir = opt.dataset_dir;
    const fs::path out_dir = opt.out_dir.empty() ? dataset_dir : fs::path(opt.out_dir);
    const Manifest manifest = io::read_manifest(dataset_dir / "manifest.json");
    const auto samples = list_samples(manifest);

    emulate::CorruptionProfile profile;
    if (!opt.profile_file.empty()) {
        json j;
        try {
            j = json::parse(io::read_text(opt.profile_file));
        } catch (const json::exception& e) {
            throw IoError(opt.profile_file + ": " + e.what());
        }
        profile = profile_from_json(j, opt.profile_file);
    }
    if (opt.calibrate) {
        // calibrate on the held-out val split, or everything when there is
        // no val split in the manifest
        auto load_for_calibration = [&](const LoadedSample& s) {
            SyntheticSample sample;
            sample.semantic3 = io::read_label_map(dataset_dir / s.files.semantic3, 2);
            sample.orientation = io::read_orientation(dataset_dir / s.files.orientation);
            return sample;
        };
        std::vector<SyntheticSample> batch;
        for (const auto& s : samples)
            if (s.rec.split == Split::val) batch.push_back(load_for_calibration(s));
        if (batch.empty())
            for (const auto& s : samples) batch.push_back(load_for_calibration(s));
        const emulate::QualityTargets targets{opt.target_chromosome_iou, opt.target_overlap_iou,
                                              opt.target_orientation_error_deg};
        const auto outcome =
            emulate::calibrate_to_quality(batch, targets, derive_seed(opt.seed, 0xCA11));
        profile = outcome.profile;
        std::cout << "calibrated profile: flip " << profile.boundary_flip_rate << ", band "
                  << profile.boundary_band << ", speckle " << profile.speckle_rate
                  << ", sigma " << profile.orientation_noise_sigma_deg << " (achieved ch "
                  << outcome.chromosome_iou << ", ov " << outcome.overlap_iou << ", err "
                  << outcome.orientation_error_deg << " deg)\n";
    }
    if (opt.flip_rate >= 0.0) profile.boundary_flip_rate = opt.flip_rate;
    if (opt.band >= 0) profile.boundary_band = opt.band;
    if (opt.sigma_deg >= 0.0) profile.orientation_noise_sigma_deg = opt.sigma_deg;
    if (opt.dropout >= 0.0) profile.orientation_dropout_rate = opt.dropout;
    if (opt.speckle >= 0.0) profile.speckle_rate = opt.speckle;
    profile.seed = opt.seed;
    profile.validate();

    std::error_code ec;
    fs::create_directories(out_dir / "samples", ec);
    if (ec) throw IoError((out_dir / "samples").string() + ": cannot create: " + ec.message());

    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        const std::uint64_t base = derive_seed(opt.seed, i);

        const LabelMap sem3 = io::read_label_map(dataset_dir / s.files.semantic3, 2);
        io::write_label_map(out_dir / s.files.pred_semantic3,
                            emulate::corrupt_semantic(sem3, profile.with_seed(derive_seed(base, 1))));
        if (!s.files.semantic4.empty() && fs::exists(dataset_dir / s.files.semantic4)) {
            const LabelMap sem4 = io::read_label_map(dataset_dir / s.files.semantic4, 3);
            io::write_label_map(out_dir / s.files.pred_semantic4,
                                emulate::corrupt_semantic(sem4, profile.with_seed(derive_seed(base, 2))));
        }
        const BinaryMask dil = io::read_mask(dataset_dir / s.files.dilated_overlap);
        io::write_mask(out_dir / s.files.pred_dilated_overlap,
                       emulate::corrupt_mask(dil, profile.with_seed(derive_seed(base, 3))));
        const OrientationField ori = io::read_orientation(dataset_dir / s.files.orientation);
        io::write_orientation(out_dir / s.files.pred_orientation,
                              emulate::corrupt_orientation(ori, profile.with_seed(derive_seed(base, 4))));
    }

    io::write_text_atomic(out_dir / "profile.json", profile_to_json(profile).dump(2) + "\n");
    std::cout << "corrupted " << samples.size() << " samples into " << out_dir.string() << "\n";
    return 0;
}

int run_segment(const SegmentOptions& opt) {
    if (opt.dataset_dir.empty()) throw ConfigError("segment: --dataset is required");
    const fs::path dataset_dir = opt.dataset_dir;
    const fs::path out_dir = opt.out_dir.empty() ? dataset_dir : fs::path(opt.out_dir);
    const Manifest manifest = io::read_manifest(dataset_dir / "manifest.json");

    instseg::SegParams params;
    params.min_overlap_area = opt.min_overlap_area;
    params.min_segment_area = opt.min_segment_area;
    params.orientation_merge_threshold_deg = opt.merge_threshold_deg;
    params.near_overlap_radius = opt.near_overlap_radius;
    params.merge_band_width = opt.merge_band_width;
    params.validate();

    std::error_code ec;
    fs::create_directories(out_dir / "samples", ec);
    if (ec) throw IoError((out_dir / "samples").string() + ": cannot create: " + ec.message());

    for (const auto& s : list_samples(manifest)) {
        const instseg::PredictionLayers layers =
            opt.use_truth ? load_layers(dataset_dir, s.files, false)
                          : load_layers(out_dir, s.files, true);
        instseg::SegDiagnostics diag;
        const instseg::InstanceSet instances = instseg::segment_instances(layers, params, &diag);

        io::write_instances(out_dir / s.files.pred_instances,
                            out_dir / s.files.pred_instances_meta, instances);
        // extend the sidecar with diagnostics
        json meta;
        meta["schema_version"] = 1;
        meta["count"] = static_cast<int>(instances.masks.size());
        json d;
        d["seed_count"] = diag.seed_count;
        d["segments_after_growth"] = diag.segments_after_growth;
        d["orientation_merges"] = diag.orientation_merges;
        d["removed_small_segments"] = diag.removed_small_segments;
        d["overlap_regions"] = diag.overlap_regions;
        d["adjacency_merges"] = diag.adjacency_merges;
        d["fallback_component_seeding"] = diag.fallback_component_seeding;
        d["unseeded_components"] = diag.unseeded_components;
        json odd = json::array();
        for (const auto& [region, count] : diag.odd_overlaps)
            odd.push_back({{"region", region}, {"adjacent_segments", count}});
        d["odd_overlaps"] = std::move(odd);
        meta["diagnostics"] = std::move(d);
        io::write_text_atomic(out_dir / s.files.pred_instances_meta, meta.dump(2) + "\n");
    }
    std::cout << "segmented " << manifest.records.size() << " samples into "
              << out_dir.string() << "\n";
    return 0;
}

int run_evaluate(const EvaluateOptions& opt) {
    if (opt.dataset_dir.empty()) throw ConfigError("evaluate: --dataset is required");
    if (opt.report_file.empty()) throw ConfigError("evaluate: --out is required");
    const fs::path dataset_dir = opt.dataset_dir;
    const fs::path pred_dir = opt.pred_dir.empty() ? dataset_dir : fs::path(opt.pred_dir);
    const Manifest manifest = io::read_manifest(dataset_dir / "manifest.json");

    json sample_reports = json::array();
    std::map<std::string, std::pair<double, int>> sums; // metric -> (sum, n)
    auto accumulate = [&](const std::string& key, double v) {
        auto& [sum, n] = sums[key];
        sum += v;
        ++n;
    };

    bool anything = false;
    for (const auto& s : list_samples(manifest)) {
        json r;
        r["id"] = s.rec.id;
        r["split"] = split_name(s.rec.split);

        if (!s.files.semantic4.empty() && fs::exists(pred_dir / s.files.pred_semantic4)) {
            const LabelMap truth4 = io::read_label_map(dataset_dir / s.files.semantic4, 3);
            const LabelMap pred4 = io::read_label_map(pred_dir / s.files.pred_semantic4, 3);
            const auto rep = metrics::semantic_report(pred4, truth4);
            json sj;
            sj["average_iou"] = sig6(rep.average_iou);
            sj["merged_ch_iou"] = sig6(rep.merged_ch_iou);
            sj["swapped"] = rep.swapped;
            json per;
            static const char* kClassNames[4] = {"background", "ch1", "ch2", "overlap"};
            for (const auto& [cls, v] : rep.per_class_iou) per[kClassNames[cls]] = sig6(v);
            sj["per_class_iou"] = std::move(per);
            r["semantic"] = std::move(sj);
            accumulate("mean_average_iou", rep.average_iou);
            accumulate("mean_merged_ch_iou", rep.merged_ch_iou);
            anything = true;
        }

        if (fs::exists(pred_dir / s.files.pred_semantic3)) {
            const auto truth = load_layers(dataset_dir, s.files, false);
            const auto pred = load_layers(pred_dir, s.files, true);
            const auto rep = metrics::layer_report(pred, truth);
            json lj;
            for (const auto& [k, v] : rep) {
                lj[k] = sig6(v);
                accumulate("mean_" + k, v);
            }
            r["layers"] = std::move(lj);
            anything = true;
        }

        if (fs::exists(pred_dir / s.files.pred_instances)) {
            const auto truth = io::read_instances(dataset_dir / s.files.instances,
                                                  dataset_dir / s.files.instances_meta);
            const auto pred = io::read_instances(pred_dir / s.files.pred_instances,
                                                 pred_dir / s.files.pred_instances_meta);
            const auto rep = metrics::instance_report(pred, truth);
            json ij;
            ij["mean_best_match_iou"] = sig6(rep.mean_best_match_iou);
            ij["unmatched_predictions"] = rep.unmatched_predictions;
            json per = json::array();
            for (double v : rep.per_truth_iou) per.push_back(sig6(v));
            ij["per_truth_iou"] = std::move(per);
            ij["predicted_count"] = static_cast<int>(pred.masks.size());
            r["instance"] = std::move(ij);
            accumulate("mean_best_match_iou", rep.mean_best_match_iou);
            accumulate("instance_count_accuracy",
                       pred.masks.size() == truth.masks.size() ? 1.0 : 0.0);
            anything = true;
        }

        sample_reports.push_back(std::move(r));
    }
    if (!anything)
        throw IoError("evaluate: no prediction files found under " + pred_dir.string());

    json root;
    root["schema_version"] = 1;
    root["samples"] = std::move(sample_reports);
    json agg;
    for (const auto& [key, sn] : sums) {
        agg[key] = sig6(sn.first / sn.second);
        agg[key + "_count"] = sn.second;
    }
    root["aggregate"] = std::move(agg);
    io::write_text_atomic(opt.report_file, root.dump(2) + "\n");
    std::cout << "report written to " << opt.report_file << "\n";
    return 0;
}

int run_render(const RenderOptions& opt) {
    if (opt.out_file.empty()) throw ConfigError("render: --out is required");
    const int inputs = (opt.semantic_file.empty() ? 0 : 1) +
                       (opt.orientation_file.empty() ? 0 : 1) +
                       (opt.instances_file.empty() ? 0 : 1);
    if (inputs != 1)
        throw ConfigError("render: give exactly one of --semantic, --orientation, --instances");

    io::Rgb8Image img;
    if (!opt.semantic_file.empty()) {
        const LabelMap map = io::read_label_map(opt.semantic_file, 3);
        int classes = opt.classes;
        if (classes == 0) {
            std::uint8_t mx = 0;
            for (std::uint8_t v : map.cells()) mx = std::max(mx, v);
            classes = mx >= 3 ? 4 : 3;
        }
        img = io::render_semantic(map, classes);
    } else if (!opt.orientation_file.empty()) {
        img = io::render_orientation(io::read_orientation(opt.orientation_file));
    } else {
        if (opt.instances_meta_file.empty())
            throw ConfigError("render: --instances needs --meta with the sidecar JSON");
        img = io::render_instances(
            io::read_instances(opt.instances_file, opt.instances_meta_file));
    }
    io::write_rgb8(opt.out_file, img);
    std::cout << "rendered " << opt.out_file << "\n";
    return 0;
}

} // namespace chromoseg::cli
