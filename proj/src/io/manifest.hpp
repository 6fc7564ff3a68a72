#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "chromoseg/synthgen.hpp"

namespace chromoseg::io {

// Relative file paths of one sample's layers inside a dataset directory.
struct SampleFiles {
    std::string image;
    std::string semantic3;
    std::string semantic4; // empty for clusters
    std::string dilated_overlap;
    std::string orientation;
    std::string instances;
    std::string instances_meta;

    // prediction-side counterparts written by `corrupt` / `segment`
    std::string pred_semantic3;
    std::string pred_semantic4;
    std::string pred_dilated_overlap;
    std::string pred_orientation;
    std::string pred_instances;
    std::string pred_instances_meta;
};

SampleFiles sample_file_names(const std::string& id, bool has_semantic4);

void write_manifest(const std::filesystem::path& path, const synthgen::Manifest& manifest);
synthgen::Manifest read_manifest(const std::filesystem::path& path);

// Writes every layer of a dataset plus manifest.json under `dir`.
void write_dataset(const std::filesystem::path& dir, const synthgen::Dataset& dataset);

} // namespace chromoseg::io
