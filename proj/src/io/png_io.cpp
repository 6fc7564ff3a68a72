#include "io/png_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <png.h>

#include "chromoseg/errors.hpp"

namespace chromoseg::io {

namespace {

struct PngErrorState {
    std::string message;
};

void error_handler(png_structp png, png_const_charp msg) {
    auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
    if (state && state->message.empty()) state->message = msg;
    longjmp(png_jmpbuf(png), 1);
}

void warning_handler(png_structp, png_const_charp) {}

[[noreturn]] void fail(const std::filesystem::path& path, FILE* f, const std::string& what) {
    const long offset = f ? std::ftell(f) : -1;
    std::ostringstream oss;
    oss << path.string();
    if (offset >= 0) oss << " at byte " << offset;
    oss << ": " << what;
    if (f) std::fclose(f);
    throw IoError(oss.str());
}

struct ReadResult {
    int width = 0, height = 0, bit_depth = 0;
    std::vector<std::uint8_t> bytes; // raw rows, host-endian after swap
};

ReadResult read_gray_png(const std::filesystem::path& path, int expected_depth) {
    FILE* f = std::fopen(path.string().c_str(), "rb");
    if (!f) throw IoError(path.string() + ": cannot open for reading");

    unsigned char sig[8];
    if (std::fread(sig, 1, 8, f) != 8 || png_sig_cmp(sig, 0, 8) != 0)
        fail(path, f, "not a PNG file (bad signature)");

    PngErrorState err;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err,
                                             error_handler, warning_handler);
    if (!png) fail(path, f, "libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        fail(path, f, "libpng init failed");
    }

    ReadResult out;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, f, err.message.empty() ? "malformed PNG stream" : err.message);
    }

    png_init_io(png, f);
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    out.width = static_cast<int>(png_get_image_width(png, info));
    out.height = static_cast<int>(png_get_image_height(png, info));
    out.bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);
    if (color_type != PNG_COLOR_TYPE_GRAY)
        png_error(png, "expected a grayscale PNG");
    if (out.bit_depth != expected_depth)
        png_error(png, expected_depth == 8 ? "expected an 8-bit grayscale PNG"
                                           : "expected a 16-bit grayscale PNG");
    if (out.bit_depth == 16 && std::endian::native == std::endian::little)
        png_set_swap(png);
    png_read_update_info(png, info);

    const std::size_t row_bytes = png_get_rowbytes(png, info);
    out.bytes.assign(row_bytes * out.height, 0);
    rows.resize(out.height);
    for (int y = 0; y < out.height; ++y) rows[y] = out.bytes.data() + row_bytes * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(f);
    return out;
}

void write_png(const std::filesystem::path& path, int width, int height, int bit_depth,
               int color_type, const std::uint8_t* bytes, std::size_t row_bytes) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    FILE* f = std::fopen(tmp.string().c_str(), "wb");
    if (!f) throw IoError(tmp.string() + ": cannot open for writing");

    PngErrorState err;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err,
                                              error_handler, warning_handler);
    if (!png) fail(tmp, f, "libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        fail(tmp, f, "libpng init failed");
    }

    std::vector<png_const_bytep> rows(height);
    for (int y = 0; y < height; ++y) rows[y] = bytes + row_bytes * y;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(tmp, f, err.message.empty() ? "PNG encode failed" : err.message);
    }

    png_init_io(png, f);
    png_set_compression_level(png, 6); // pinned so reruns emit identical bytes
    png_set_IHDR(png, info, width, height, bit_depth, color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (bit_depth == 16 && std::endian::native == std::endian::little)
        png_set_swap(png);
    for (int y = 0; y < height; ++y)
        png_write_row(png, const_cast<png_bytep>(rows[y]));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(f);

    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError(path.string() + ": rename failed: " + ec.message());
}

} // namespace

Gray8Image read_gray8(const std::filesystem::path& path) {
    ReadResult r = read_gray_png(path, 8);
    Gray8Image img;
    img.width = r.width;
    img.height = r.height;
    img.pixels = std::move(r.bytes);
    return img;
}

Gray16Image read_gray16(const std::filesystem::path& path) {
    ReadResult r = read_gray_png(path, 16);
    Gray16Image img;
    img.width = r.width;
    img.height = r.height;
    img.pixels.resize(static_cast<std::size_t>(r.width) * r.height);
    std::memcpy(img.pixels.data(), r.bytes.data(), img.pixels.size() * 2);
    return img;
}

void write_gray8(const std::filesystem::path& path, const Gray8Image& img) {
    write_png(path, img.width, img.height, 8, PNG_COLOR_TYPE_GRAY, img.pixels.data(),
              static_cast<std::size_t>(img.width));
}

void write_gray16(const std::filesystem::path& path, const Gray16Image& img) {
    write_png(path, img.width, img.height, 16, PNG_COLOR_TYPE_GRAY,
              reinterpret_cast<const std::uint8_t*>(img.pixels.data()),
              static_cast<std::size_t>(img.width) * 2);
}

void write_rgb8(const std::filesystem::path& path, const Rgb8Image& img) {
    write_png(path, img.width, img.height, 8, PNG_COLOR_TYPE_RGB, img.pixels.data(),
              static_cast<std::size_t>(img.width) * 3);
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError(tmp.string() + ": cannot open for writing");
        out << text;
        if (!out) throw IoError(tmp.string() + ": write failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError(path.string() + ": rename failed: " + ec.message());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string() + ": cannot open for reading");
    std::ostringstream oss;
    oss << in.rdbuf();
    return oss.str();
}

} // namespace chromoseg::io
