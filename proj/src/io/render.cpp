#include "io/render.hpp"

#include <cmath>

namespace chromoseg::io {

namespace {

struct Rgb {
    std::uint8_t r, g, b;
};

Rgb hsv_to_rgb(double hue_deg, double s, double v) {
    const double h = std::fmod(std::fmod(hue_deg, 360.0) + 360.0, 360.0) / 60.0;
    const int i = static_cast<int>(h) % 6;
    const double f = h - std::floor(h);
    const double p = v * (1.0 - s);
    const double q = v * (1.0 - s * f);
    const double t = v * (1.0 - s * (1.0 - f));
    double r = 0, g = 0, b = 0;
    switch (i) {
        case 0: r = v; g = t; b = p; break;
        case 1: r = q; g = v; b = p; break;
        case 2: r = p; g = v; b = t; break;
        case 3: r = p; g = q; b = v; break;
        case 4: r = t; g = p; b = v; break;
        case 5: r = v; g = p; b = q; break;
    }
    auto u8 = [](double x) { return static_cast<std::uint8_t>(std::lround(x * 255.0)); };
    return {u8(r), u8(g), u8(b)};
}

constexpr Rgb kPalette4[4] = {
    {38, 70, 200},   // background, blue
    {70, 190, 80},   // ch1, green
    {255, 150, 40},  // ch2, orange
    {220, 50, 50},   // overlap, red
};

constexpr Rgb kPalette3[3] = {
    {38, 70, 200},   // background, blue
    {255, 150, 40},  // chromosome, orange
    {70, 190, 80},   // overlap, green
};

constexpr Rgb kInstancePalette[8] = {
    {230, 90, 40}, {60, 170, 220}, {120, 200, 70}, {210, 170, 40},
    {170, 90, 210}, {80, 200, 170}, {220, 110, 160}, {150, 150, 150},
};

} // namespace

Rgb8Image render_semantic(const LabelMap& map, int num_classes) {
    if (num_classes != 3 && num_classes != 4)
        throw InvalidInput("render_semantic: palette exists for 3 or 4 classes only");
    Rgb8Image out{map.width(), map.height(), {}};
    out.pixels.resize(map.size() * 3);
    for (std::size_t i = 0; i < map.size(); ++i) {
        const int code = map[i];
        if (code >= num_classes)
            throw IoError("render_semantic: class code " + std::to_string(code) +
                          " exceeds the palette");
        const Rgb c = num_classes == 4 ? kPalette4[code] : kPalette3[code];
        out.pixels[i * 3] = c.r;
        out.pixels[i * 3 + 1] = c.g;
        out.pixels[i * 3 + 2] = c.b;
    }
    return out;
}

Rgb8Image render_orientation(const OrientationField& field) {
    Rgb8Image out{field.width(), field.height(), {}};
    out.pixels.assign(static_cast<std::size_t>(field.width()) * field.height() * 3, 0);
    for (int y = 0; y < field.height(); ++y)
        for (int x = 0; x < field.width(); ++x) {
            if (!field.is_valid(x, y)) continue;
            const double theta = decode(field.vec(x, y)).degrees();
            const Rgb c = hsv_to_rgb(2.0 * theta, 1.0, 1.0);
            const std::size_t i = (static_cast<std::size_t>(y) * field.width() + x) * 3;
            out.pixels[i] = c.r;
            out.pixels[i + 1] = c.g;
            out.pixels[i + 2] = c.b;
        }
    return out;
}

Rgb8Image render_instances(const instseg::InstanceSet& instances) {
    if (instances.masks.empty())
        throw InvalidInput("render_instances: empty instance set");
    const int w = instances.masks[0].width();
    const int h = instances.masks[0].height();
    Rgb8Image out{w, h, {}};
    out.pixels.assign(static_cast<std::size_t>(w) * h * 3, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            int r = 0, g = 0, b = 0, n = 0;
            for (std::size_t i = 0; i < instances.masks.size(); ++i) {
                if (!instances.masks[i].get(x, y)) continue;
                const Rgb c = kInstancePalette[i % 8];
                r += c.r;
                g += c.g;
                b += c.b;
                ++n;
            }
            if (n == 0) continue;
            const std::size_t idx = (static_cast<std::size_t>(y) * w + x) * 3;
            out.pixels[idx] = static_cast<std::uint8_t>(r / n);
            out.pixels[idx + 1] = static_cast<std::uint8_t>(g / n);
            out.pixels[idx + 2] = static_cast<std::uint8_t>(b / n);
        }
    return out;
}

} // namespace chromoseg::io
