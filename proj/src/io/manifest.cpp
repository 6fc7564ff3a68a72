#include "io/manifest.hpp"

#include <nlohmann/json.hpp>

#include "io/formats.hpp"
#include "io/png_io.hpp"

namespace chromoseg::io {

namespace {
using nlohmann::json;
using namespace chromoseg::synthgen;
}

SampleFiles sample_file_names(const std::string& id, bool has_semantic4) {
    SampleFiles f;
    const std::string base = "samples/" + id;
    f.image = base + "_image.png";
    f.semantic3 = base + "_semantic3.png";
    if (has_semantic4) f.semantic4 = base + "_semantic4.png";
    f.dilated_overlap = base + "_dilated_overlap.png";
    f.orientation = base + "_orientation.png";
    f.instances = base + "_instances.png";
    f.instances_meta = base + "_instances.json";
    f.pred_semantic3 = base + "_pred_semantic3.png";
    if (has_semantic4) f.pred_semantic4 = base + "_pred_semantic4.png";
    f.pred_dilated_overlap = base + "_pred_dilated_overlap.png";
    f.pred_orientation = base + "_pred_orientation.png";
    f.pred_instances = base + "_pred_instances.png";
    f.pred_instances_meta = base + "_pred_instances.json";
    return f;
}

void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
    json root;
    root["schema_version"] = manifest.schema_version;
    root["master_seed"] = manifest.master_seed;
    root["rule"] = rule_name(manifest.rule);
    root["canvas"] = {{"width", manifest.canvas.width}, {"height", manifest.canvas.height}};
    json samples = json::array();
    for (const auto& rec : manifest.records) {
        json r;
        r["id"] = rec.id;
        r["split"] = split_name(rec.split);
        r["source_ids"] = rec.source_ids;
        json poses = json::array();
        for (const auto& p : rec.poses)
            poses.push_back({{"rotation_deg", p.rotation_deg}, {"tx", p.tx}, {"ty", p.ty}});
        r["poses"] = std::move(poses);
        r["sample_seed"] = rec.sample_seed;
        r["touch_pair"] = rec.touch_pair;
        r["instance_count"] = rec.instance_count;
        const SampleFiles files = sample_file_names(rec.id, rec.instance_count == 2);
        json fj;
        fj["image"] = files.image;
        fj["semantic3"] = files.semantic3;
        if (!files.semantic4.empty()) fj["semantic4"] = files.semantic4;
        fj["dilated_overlap"] = files.dilated_overlap;
        fj["orientation"] = files.orientation;
        fj["instances"] = files.instances;
        fj["instances_meta"] = files.instances_meta;
        r["files"] = std::move(fj);
        samples.push_back(std::move(r));
    }
    root["samples"] = std::move(samples);
    write_text_atomic(path, root.dump(2) + "\n");
}

Manifest read_manifest(const std::filesystem::path& path) {
    json root;
    try {
        root = json::parse(read_text(path));
    } catch (const json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
    try {
        Manifest m;
        m.schema_version = root.at("schema_version").get<int>();
        if (m.schema_version != 1)
            throw IoError(path.string() + ": unsupported schema version " +
                          std::to_string(m.schema_version));
        m.master_seed = root.at("master_seed").get<std::uint64_t>();
        m.rule = rule_from_name(root.at("rule").get<std::string>());
        m.canvas.width = root.at("canvas").at("width").get<int>();
        m.canvas.height = root.at("canvas").at("height").get<int>();
        for (const auto& r : root.at("samples")) {
            ManifestRecord rec;
            rec.id = r.at("id").get<std::string>();
            rec.split = split_from_name(r.at("split").get<std::string>());
            rec.source_ids = r.at("source_ids").get<std::vector<std::string>>();
            for (const auto& p : r.at("poses"))
                rec.poses.push_back({p.at("rotation_deg").get<double>(),
                                     p.at("tx").get<double>(), p.at("ty").get<double>()});
            rec.sample_seed = r.at("sample_seed").get<std::uint64_t>();
            rec.touch_pair = r.at("touch_pair").get<bool>();
            rec.instance_count = r.at("instance_count").get<int>();
            m.records.push_back(std::move(rec));
        }
        return m;
    } catch (const json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

void write_dataset(const std::filesystem::path& dir, const Dataset& dataset) {
    std::error_code ec;
    std::filesystem::create_directories(dir / "samples", ec);
    if (ec) throw IoError((dir / "samples").string() + ": cannot create: " + ec.message());

    for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
        const SyntheticSample& s = dataset.samples[i];
        const ManifestRecord& rec = dataset.manifest.records[i];
        const SampleFiles files = sample_file_names(rec.id, s.semantic4.width() > 0);
        write_intensity(dir / files.image, s.image);
        write_label_map(dir / files.semantic3, s.semantic3);
        if (s.semantic4.width() > 0) write_label_map(dir / files.semantic4, s.semantic4);
        write_mask(dir / files.dilated_overlap, s.dilated_overlap);
        write_orientation(dir / files.orientation, s.orientation);
        write_instances(dir / files.instances, dir / files.instances_meta,
                        instseg::InstanceSet{s.instances});
        (void)i;
    }
    write_manifest(dir / "manifest.json", dataset.manifest);
}

} // namespace chromoseg::io
