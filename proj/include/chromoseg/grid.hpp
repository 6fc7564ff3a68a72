#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "chromoseg/errors.hpp"

namespace chromoseg {

// Row-major 2-D value grid. Pixel (x, y) lives at index y * width + x.
template <typename T>
class Grid {
public:
    Grid() = default;

    Grid(int width, int height, T fill = T{})
        : width_(width), height_(height) {
        if (width < 1 || height < 1)
            throw InvalidInput("Grid dimensions must be at least 1x1");
        cells_.assign(static_cast<std::size_t>(width) * height, fill);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return cells_.size(); }

    bool in_bounds(int x, int y) const {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }

    T& at(int x, int y) { return cells_[idx(x, y)]; }
    const T& at(int x, int y) const { return cells_[idx(x, y)]; }

    T& operator[](std::size_t i) { return cells_[i]; }
    const T& operator[](std::size_t i) const { return cells_[i]; }

    std::span<T> row(int y) { return {cells_.data() + idx(0, y), static_cast<std::size_t>(width_)}; }
    std::span<const T> row(int y) const { return {cells_.data() + idx(0, y), static_cast<std::size_t>(width_)}; }

    std::vector<T>& cells() { return cells_; }
    const std::vector<T>& cells() const { return cells_; }

    template <typename U>
    bool same_size(const Grid<U>& other) const {
        return width_ == other.width() && height_ == other.height();
    }

    bool operator==(const Grid& other) const = default;

private:
    std::size_t idx(int x, int y) const {
        return static_cast<std::size_t>(y) * width_ + x;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> cells_;
};

using IntensityImage = Grid<float>;        // grayscale values in [0,1]
using LabelMap = Grid<std::uint8_t>;       // small class codes, 0 = background
using SegmentImage = Grid<std::int32_t>;   // segment labels, 0 = unassigned
using DistanceImage = Grid<double>;        // Euclidean pixel distances

// Per-pixel boolean raster with set algebra.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool fill = false)
        : grid_(width, height, fill ? std::uint8_t{1} : std::uint8_t{0}) {}

    int width() const { return grid_.width(); }
    int height() const { return grid_.height(); }
    bool in_bounds(int x, int y) const { return grid_.in_bounds(x, y); }

    bool get(int x, int y) const { return grid_.at(x, y) != 0; }
    void set(int x, int y, bool v = true) { grid_.at(x, y) = v ? 1 : 0; }

    bool get_index(std::size_t i) const { return grid_[i] != 0; }
    void set_index(std::size_t i, bool v = true) { grid_[i] = v ? 1 : 0; }
    std::size_t size() const { return grid_.size(); }

    long long count() const {
        long long n = 0;
        for (std::uint8_t b : grid_.cells()) n += b;
        return n;
    }

    bool empty() const { return count() == 0; }

    template <typename U>
    bool same_size(const Grid<U>& other) const { return grid_.same_size(other); }
    bool same_size(const BinaryMask& other) const {
        return width() == other.width() && height() == other.height();
    }

    BinaryMask& operator&=(const BinaryMask& o) { return apply(o, [](bool a, bool b) { return a && b; }); }
    BinaryMask& operator|=(const BinaryMask& o) { return apply(o, [](bool a, bool b) { return a || b; }); }
    BinaryMask& subtract(const BinaryMask& o) { return apply(o, [](bool a, bool b) { return a && !b; }); }

    friend BinaryMask operator&(BinaryMask a, const BinaryMask& b) { return a &= b; }
    friend BinaryMask operator|(BinaryMask a, const BinaryMask& b) { return a |= b; }
    friend BinaryMask minus(BinaryMask a, const BinaryMask& b) { return a.subtract(b); }

    bool intersects(const BinaryMask& o) const {
        require_same_size(o);
        for (std::size_t i = 0; i < size(); ++i)
            if (grid_[i] && o.grid_[i]) return true;
        return false;
    }

    bool is_subset_of(const BinaryMask& o) const {
        require_same_size(o);
        for (std::size_t i = 0; i < size(); ++i)
            if (grid_[i] && !o.grid_[i]) return false;
        return true;
    }

    bool operator==(const BinaryMask& other) const = default;

private:
    template <typename F>
    BinaryMask& apply(const BinaryMask& o, F f) {
        require_same_size(o);
        for (std::size_t i = 0; i < size(); ++i)
            grid_[i] = f(grid_[i] != 0, o.grid_[i] != 0) ? 1 : 0;
        return *this;
    }

    void require_same_size(const BinaryMask& o) const {
        if (!same_size(o))
            throw InvalidInput("BinaryMask dimension mismatch");
    }

    Grid<std::uint8_t> grid_;
};

enum class Connectivity { four = 4, eight = 8 };

inline std::span<const std::array<int, 2>> neighbor_offsets(Connectivity c) {
    static constexpr std::array<std::array<int, 2>, 8> offsets = {{
        {1, 0}, {-1, 0}, {0, 1}, {0, -1},
        {1, 1}, {1, -1}, {-1, 1}, {-1, -1},
    }};
    return {offsets.data(), c == Connectivity::four ? std::size_t{4} : std::size_t{8}};
}

} // namespace chromoseg
