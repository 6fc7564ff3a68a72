#include "io/formats.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "io/png_io.hpp"

namespace chromoseg::io {

namespace {
using nlohmann::json;
}

void write_intensity(const std::filesystem::path& path, const IntensityImage& img) {
    Gray8Image out{img.width(), img.height(), {}};
    out.pixels.resize(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) {
        const float v = std::clamp(img[i], 0.0f, 1.0f);
        out.pixels[i] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
    }
    write_gray8(path, out);
}

IntensityImage read_intensity(const std::filesystem::path& path) {
    const Gray8Image in = read_gray8(path);
    IntensityImage img(in.width, in.height, 0.0f);
    for (std::size_t i = 0; i < img.size(); ++i)
        img[i] = static_cast<float>(in.pixels[i]) / 255.0f;
    return img;
}

void write_label_map(const std::filesystem::path& path, const LabelMap& map) {
    Gray8Image out{map.width(), map.height(), {map.cells().begin(), map.cells().end()}};
    write_gray8(path, out);
}

LabelMap read_label_map(const std::filesystem::path& path, int max_code) {
    const Gray8Image in = read_gray8(path);
    LabelMap map(in.width, in.height, 0);
    for (std::size_t i = 0; i < map.size(); ++i) {
        if (in.pixels[i] > max_code)
            throw IoError(path.string() + ": label code " + std::to_string(in.pixels[i]) +
                          " exceeds the allowed maximum " + std::to_string(max_code));
        map[i] = in.pixels[i];
    }
    return map;
}

void write_mask(const std::filesystem::path& path, const BinaryMask& mask) {
    Gray8Image out{mask.width(), mask.height(), {}};
    out.pixels.resize(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i)
        out.pixels[i] = mask.get_index(i) ? 255 : 0;
    write_gray8(path, out);
}

BinaryMask read_mask(const std::filesystem::path& path) {
    const Gray8Image in = read_gray8(path);
    BinaryMask mask(in.width, in.height);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (in.pixels[i] != 0 && in.pixels[i] != 255)
            throw IoError(path.string() + ": mask pixel value " +
                          std::to_string(in.pixels[i]) + " is neither 0 nor 255");
        mask.set_index(i, in.pixels[i] == 255);
    }
    return mask;
}

void write_orientation(const std::filesystem::path& path, const OrientationField& field) {
    Gray16Image out{field.width(), field.height(), {}};
    out.pixels.assign(static_cast<std::size_t>(field.width()) * field.height(), 65535);
    for (int y = 0; y < field.height(); ++y)
        for (int x = 0; x < field.width(); ++x) {
            if (!field.is_valid(x, y)) continue;
            const double theta = decode(field.vec(x, y)).degrees();
            long code = std::lround(theta * 100.0);
            if (code >= 18000) code = 0; // 179.995..180 wraps to the axial 0
            out.pixels[static_cast<std::size_t>(y) * field.width() + x] =
                static_cast<std::uint16_t>(code);
        }
    write_gray16(path, out);
}

OrientationField read_orientation(const std::filesystem::path& path) {
    const Gray16Image in = read_gray16(path);
    OrientationField field(in.width, in.height);
    for (int y = 0; y < in.height; ++y)
        for (int x = 0; x < in.width; ++x) {
            const std::uint16_t v = in.pixels[static_cast<std::size_t>(y) * in.width + x];
            if (v == 65535) continue; // invalid sentinel
            if (v >= 18000)
                throw IoError(path.string() + ": orientation code " + std::to_string(v) +
                              " outside [0, 18000)");
            field.set_angle(x, y, AxialAngle(v / 100.0));
        }
    return field;
}

void write_instances(const std::filesystem::path& png_path,
                     const std::filesystem::path& json_path,
                     const instseg::InstanceSet& instances) {
    const int n = static_cast<int>(instances.masks.size());
    if (n > 8)
        throw IoError(png_path.string() + ": the instance bit-field format holds at most 8 "
                      "instances, got " + std::to_string(n));
    int w = 0, h = 0;
    if (n > 0) {
        w = instances.masks[0].width();
        h = instances.masks[0].height();
    }
    for (const auto& m : instances.masks)
        if (m.width() != w || m.height() != h)
            throw IoError(png_path.string() + ": instance masks disagree on dimensions");

    Gray8Image out{std::max(w, 1), std::max(h, 1), {}};
    out.pixels.assign(static_cast<std::size_t>(out.width) * out.height, 0);
    for (int i = 0; i < n; ++i)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (instances.masks[i].get(x, y))
                    out.pixels[static_cast<std::size_t>(y) * w + x] |=
                        static_cast<std::uint8_t>(1u << i);
    write_gray8(png_path, out);

    json meta;
    meta["schema_version"] = 1;
    meta["count"] = n;
    write_text_atomic(json_path, meta.dump(2) + "\n");
}

instseg::InstanceSet read_instances(const std::filesystem::path& png_path,
                                    const std::filesystem::path& json_path) {
    json meta;
    try {
        meta = json::parse(read_text(json_path));
    } catch (const json::exception& e) {
        throw IoError(json_path.string() + ": " + e.what());
    }
    if (!meta.contains("count") || !meta["count"].is_number_integer())
        throw IoError(json_path.string() + ": missing integer field 'count'");
    const int n = meta["count"].get<int>();
    if (n < 0 || n > 8)
        throw IoError(json_path.string() + ": instance count must lie in [0, 8]");

    const Gray8Image in = read_gray8(png_path);
    instseg::InstanceSet set;
    for (int i = 0; i < n; ++i) {
        BinaryMask m(in.width, in.height);
        for (int y = 0; y < in.height; ++y)
            for (int x = 0; x < in.width; ++x)
                if (in.pixels[static_cast<std::size_t>(y) * in.width + x] & (1u << i))
                    m.set(x, y);
        set.masks.push_back(std::move(m));
    }
    const std::uint8_t limit = n >= 8 ? 255 : static_cast<std::uint8_t>((1u << n) - 1);
    for (std::uint8_t v : in.pixels)
        if (v > limit)
            throw IoError(png_path.string() + ": bit-field references an instance beyond the "
                          "declared count");
    return set;
}

} // namespace chromoseg::io
