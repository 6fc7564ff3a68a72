#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace chromoseg::io {

struct Gray8Image {
    int width = 0, height = 0;
    std::vector<std::uint8_t> pixels;
};

struct Gray16Image {
    int width = 0, height = 0;
    std::vector<std::uint16_t> pixels;
};

struct Rgb8Image {
    int width = 0, height = 0;
    std::vector<std::uint8_t> pixels; // interleaved RGB
};

Gray8Image read_gray8(const std::filesystem::path& path);
Gray16Image read_gray16(const std::filesystem::path& path);

// All writes are whole-file atomic: a temp file is renamed into place.
void write_gray8(const std::filesystem::path& path, const Gray8Image& img);
void write_gray16(const std::filesystem::path& path, const Gray16Image& img);
void write_rgb8(const std::filesystem::path& path, const Rgb8Image& img);

// Atomic small-text write used for JSON sidecars.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

} // namespace chromoseg::io
