#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "chromoseg/errors.hpp"
#include "commands.hpp"

namespace {

using namespace chromoseg::cli;

// CLI11 config reader for flat JSON files mirroring the flags; flags given
// on the command line take precedence, unknown keys are rejected.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App* app, bool, bool, std::string) const override {
        nlohmann::json j;
        for (const CLI::Option* opt : app->get_options({})) {
            if (!opt->get_configurable() || opt->get_single_name().empty()) continue;
            if (opt->count() > 0) j[opt->get_single_name()] = opt->results().front();
        }
        return j.dump(2) + "\n";
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        nlohmann::json j;
        try {
            input >> j;
        } catch (const nlohmann::json::exception& e) {
            throw CLI::FileError(std::string("config is not valid JSON: ") + e.what());
        }
        if (!j.is_object()) throw CLI::FileError("config root must be a JSON object");
        std::vector<CLI::ConfigItem> items;
        for (const auto& [key, value] : j.items()) {
            CLI::ConfigItem item;
            item.name = key;
            if (value.is_array()) {
                for (const auto& v : value)
                    item.inputs.push_back(v.is_string() ? v.get<std::string>() : v.dump());
            } else if (value.is_string()) {
                item.inputs.push_back(value.get<std::string>());
            } else {
                item.inputs.push_back(value.dump());
            }
            items.push_back(std::move(item));
        }
        return items;
    }
};

void add_config_option(CLI::App* cmd) {
    cmd->config_formatter(std::make_shared<JsonConfig>());
    cmd->set_config("--config", "", "JSON config file mirroring the flags; flags override");
    cmd->allow_config_extras(false);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthetic overlapping-chromosome pipeline: generation, prediction "
                 "emulation, orientation-based instance separation, and evaluation"};
    app.require_subcommand(1);

    GenerateOptions gen;
    CLI::App* cg = app.add_subcommand("generate", "Generate a synthetic dataset");
    cg->add_option("--out", gen.out_dir, "Output dataset directory")->required();
    cg->add_option("--seed", gen.seed, "Master seed");
    cg->add_option("--splits", gen.splits, "Sample counts per train,val,test")->delimiter(',');
    cg->add_option("--pairs", gen.pairs, "Total sample count (must match --splits)");
    cg->add_option("--bank-splits", gen.bank_splits,
                   "Procedural source-shape counts per train,val,test")->delimiter(',');
    cg->add_option("--canvas", gen.canvas, "Canvas width,height")->delimiter(',');
    cg->add_option("--rule", gen.rule,
                   "Class-assignment rule: length_wise|orientation_wise|position_wise|random");
    cg->add_option("--touch-fraction", gen.touch_fraction,
                   "Fraction of pairs posed to touch without overlapping");
    cg->add_option("--min-separation", gen.min_separation_deg,
                   "Minimum axial separation between the two chromosomes, degrees");
    cg->add_option("--cluster-fraction", gen.cluster_fraction,
                   "Fraction of samples composed as clusters of 3+");
    cg->add_option("--cluster-max", gen.cluster_max, "Largest cluster size (2..5)");
    add_config_option(cg);

    CorruptOptions cor;
    CLI::App* cc = app.add_subcommand("corrupt",
                                      "Emulate imperfect predictions from ground truth");
    cc->add_option("--dataset", cor.dataset_dir, "Dataset directory")->required();
    cc->add_option("--out", cor.out_dir, "Output directory (default: dataset)");
    cc->add_option("--seed", cor.seed, "Corruption seed");
    cc->add_option("--profile", cor.profile_file, "Corruption profile JSON");
    cc->add_option("--flip-rate", cor.flip_rate, "Boundary flip probability");
    cc->add_option("--band", cor.band, "Boundary band width, px");
    cc->add_option("--sigma", cor.sigma_deg, "Orientation noise sigma, degrees");
    cc->add_option("--dropout", cor.dropout, "Orientation dropout probability");
    cc->add_option("--speckle", cor.speckle, "Speckle probability");
    cc->add_flag("--calibrate", cor.calibrate,
                 "Search a profile achieving the target metrics on the val split");
    cc->add_option("--target-chromosome-iou", cor.target_chromosome_iou);
    cc->add_option("--target-overlap-iou", cor.target_overlap_iou);
    cc->add_option("--target-orientation-error", cor.target_orientation_error_deg);
    add_config_option(cc);

    SegmentOptions seg;
    CLI::App* cs = app.add_subcommand("segment", "Separate chromosome instances");
    cs->add_option("--dataset", seg.dataset_dir, "Dataset directory")->required();
    cs->add_option("--out", seg.out_dir, "Output directory (default: dataset)");
    cs->add_flag("--use-truth", seg.use_truth, "Segment the ground-truth layers instead of "
                                               "predictions");
    cs->add_option("--min-overlap-area", seg.min_overlap_area);
    cs->add_option("--min-segment-area", seg.min_segment_area);
    cs->add_option("--merge-threshold", seg.merge_threshold_deg,
                   "Orientation merge threshold, degrees");
    cs->add_option("--near-overlap-radius", seg.near_overlap_radius);
    cs->add_option("--merge-band", seg.merge_band_width);
    add_config_option(cs);

    EvaluateOptions ev;
    CLI::App* ce = app.add_subcommand("evaluate", "Score predictions against ground truth");
    ce->add_option("--dataset", ev.dataset_dir, "Dataset directory with ground truth")
        ->required();
    ce->add_option("--pred", ev.pred_dir, "Prediction directory (default: dataset)");
    ce->add_option("--out", ev.report_file, "Report JSON path")->required();
    add_config_option(ce);

    RenderOptions ren;
    CLI::App* cr = app.add_subcommand("render", "Render a layer as a color PNG");
    cr->add_option("--semantic", ren.semantic_file, "Class map PNG");
    cr->add_option("--classes", ren.classes, "Palette: 3 or 4 (default: infer)");
    cr->add_option("--orientation", ren.orientation_file, "Orientation PNG");
    cr->add_option("--instances", ren.instances_file, "Instance bit-field PNG");
    cr->add_option("--meta", ren.instances_meta_file, "Instance sidecar JSON");
    cr->add_option("--out", ren.out_file, "Output PNG")->required();
    add_config_option(cr);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (cg->parsed()) return run_generate(gen);
        if (cc->parsed()) return run_corrupt(cor);
        if (cs->parsed()) return run_segment(seg);
        if (ce->parsed()) return run_evaluate(ev);
        if (cr->parsed()) return run_render(ren);
    } catch (const chromoseg::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const chromoseg::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
