#include "chromoseg/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <vector>

namespace chromoseg::raster {

namespace {

constexpr std::int64_t kFar = std::numeric_limits<std::int32_t>::max();

int resolve(std::vector<int>& parent, int a) {
    while (parent[a] != a) {
        parent[a] = parent[parent[a]];
        a = parent[a];
    }
    return a;
}

} // namespace

SegmentImage connected_components(const BinaryMask& mask, Connectivity connectivity) {
    const int w = mask.width();
    const int h = mask.height();
    SegmentImage labels(w, h, 0);
    const auto offsets = neighbor_offsets(connectivity);
    std::vector<std::pair<int, int>> stack;
    std::int32_t next = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.get(x, y) || labels.at(x, y) != 0) continue;
            ++next;
            labels.at(x, y) = next;
            stack.push_back({x, y});
            while (!stack.empty()) {
                auto [cx, cy] = stack.back();
                stack.pop_back();
                for (const auto& off : offsets) {
                    const int nx = cx + off[0];
                    const int ny = cy + off[1];
                    if (!mask.in_bounds(nx, ny)) continue;
                    if (!mask.get(nx, ny) || labels.at(nx, ny) != 0) continue;
                    labels.at(nx, ny) = next;
                    stack.push_back({nx, ny});
                }
            }
        }
    }
    return labels;
}

int label_count(const SegmentImage& segments) {
    std::set<std::int32_t> seen;
    for (std::int32_t v : segments.cells())
        if (v > 0) seen.insert(v);
    return static_cast<int>(seen.size());
}

BinaryMask dilate(const BinaryMask& mask, int radius, Connectivity connectivity) {
    if (radius < 0) throw InvalidInput("dilate: radius must be >= 0");
    const int w = mask.width();
    const int h = mask.height();
    BinaryMask out = mask;
    if (radius == 0) return out;
    // multi-source BFS; step distance equals the Manhattan/Chebyshev metric
    // ball because the grid is rectangular
    const auto offsets = neighbor_offsets(connectivity);
    std::vector<std::pair<int, int>> frontier;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (mask.get(x, y)) frontier.push_back({x, y});
    std::vector<std::pair<int, int>> next;
    for (int step = 0; step < radius && !frontier.empty(); ++step) {
        next.clear();
        for (const auto& [cx, cy] : frontier) {
            for (const auto& off : offsets) {
                const int nx = cx + off[0];
                const int ny = cy + off[1];
                if (!out.in_bounds(nx, ny) || out.get(nx, ny)) continue;
                out.set(nx, ny);
                next.push_back({nx, ny});
            }
        }
        frontier.swap(next);
    }
    return out;
}

DistanceImage distance_transform(const BinaryMask& mask) {
    const int w = mask.width();
    const int h = mask.height();

    // column pass: vertical distance to the nearest background cell,
    // with virtual background rows at y = -1 and y = h
    Grid<std::int64_t> vert(w, h, 0);
    for (int x = 0; x < w; ++x) {
        std::int64_t d = 1; // virtual background just above the grid
        for (int y = 0; y < h; ++y) {
            d = mask.get(x, y) ? d : 0;
            vert.at(x, y) = d;
            ++d;
        }
        d = 1;
        for (int y = h - 1; y >= 0; --y) {
            d = mask.get(x, y) ? d : 0;
            vert.at(x, y) = std::min(vert.at(x, y), d);
            ++d;
        }
    }

    // row pass: lower envelope of parabolas (x - q)^2 + vert(q, y)^2,
    // plus virtual zero-height parabolas at q = -1 and q = w for the
    // off-grid columns
    DistanceImage out(w, h, 0.0);
    const int m = w + 2; // sites: -1, 0..w-1, w
    std::vector<double> f(m);
    std::vector<int> v(m);
    std::vector<double> z(m + 1);
    for (int y = 0; y < h; ++y) {
        auto site_x = [&](int i) { return i - 1; };
        for (int i = 0; i < m; ++i) {
            const int q = site_x(i);
            if (q < 0 || q >= w) {
                f[i] = 0.0;
            } else {
                const std::int64_t g = vert.at(q, y);
                f[i] = static_cast<double>(g) * static_cast<double>(g);
            }
        }
        int k = 0;
        v[0] = 0;
        z[0] = -std::numeric_limits<double>::infinity();
        z[1] = std::numeric_limits<double>::infinity();
        for (int i = 1; i < m; ++i) {
            const double qi = site_x(i);
            double s;
            for (;;) {
                const double qk = site_x(v[k]);
                s = ((f[i] + qi * qi) - (f[v[k]] + qk * qk)) / (2.0 * (qi - qk));
                if (s > z[k]) break;
                --k;
            }
            ++k;
            v[k] = i;
            z[k] = s;
            z[k + 1] = std::numeric_limits<double>::infinity();
        }
        k = 0;
        for (int x = 0; x < w; ++x) {
            if (!mask.get(x, y)) continue;
            while (z[k + 1] < x) ++k;
            const double q = site_x(v[k]);
            const double d2 = (x - q) * (x - q) + f[v[k]];
            out.at(x, y) = std::sqrt(d2);
        }
    }
    return out;
}

SegmentImage local_maxima(const DistanceImage& dist, Connectivity connectivity) {
    const int w = dist.width();
    const int h = dist.height();
    BinaryMask peaks(w, h);
    const auto offsets = neighbor_offsets(connectivity);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double d = dist.at(x, y);
            if (d <= 0.0) continue;
            bool ok = true;
            for (const auto& off : offsets) {
                const int nx = x + off[0];
                const int ny = y + off[1];
                if (!dist.in_bounds(nx, ny)) continue;
                if (dist.at(nx, ny) > d) {
                    ok = false;
                    break;
                }
            }
            if (ok) peaks.set(x, y);
        }
    }
    // adjacent selected pixels necessarily share the same value, so the
    // components of the selection are exactly the plateaus
    return connected_components(peaks, connectivity);
}

BinaryMask remove_small_components(const BinaryMask& mask, long long min_area,
                                   Connectivity connectivity) {
    if (min_area < 0) throw InvalidInput("remove_small_components: min_area must be >= 0");
    const SegmentImage labels = connected_components(mask, connectivity);
    std::vector<long long> area;
    for (std::int32_t v : labels.cells()) {
        if (v <= 0) continue;
        if (static_cast<std::size_t>(v) >= area.size()) area.resize(v + 1, 0);
        ++area[v];
    }
    BinaryMask out(mask.width(), mask.height());
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x) {
            const std::int32_t v = labels.at(x, y);
            if (v > 0 && area[v] >= min_area) out.set(x, y);
        }
    return out;
}

SegmentImage grow_segments(const SegmentImage& seeds, const BinaryMask& allowed,
                           const DistanceImage& dist) {
    if (!allowed.same_size(seeds) || !allowed.same_size(dist))
        throw InvalidInput("grow_segments: dimension mismatch");
    const int w = allowed.width();
    const int h = allowed.height();

    std::int32_t max_label = 0;
    double max_dist = 0.0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::int32_t s = seeds.at(x, y);
            if (s > 0 && !allowed.get(x, y))
                throw InvalidInput("grow_segments: seed pixel outside allowed region");
            max_label = std::max(max_label, s);
            if (allowed.get(x, y)) max_dist = std::max(max_dist, dist.at(x, y));
        }

    SegmentImage segments = seeds;
    if (max_label == 0) return segments;

    std::vector<int> parent(max_label + 1);
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<double> peak(max_label + 1, 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::int32_t s = segments.at(x, y);
            if (s > 0) peak[s] = std::max(peak[s], dist.at(x, y));
        }

    const auto offsets = neighbor_offsets(Connectivity::eight);
    std::vector<std::pair<int, int>> updates;

    for (int level = static_cast<int>(std::ceil(max_dist)); level >= 0; --level) {
        // synchronous unit dilations until the >= level area is filled
        for (;;) {
            updates.clear();
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    if (segments.at(x, y) != 0) continue;
                    if (!allowed.get(x, y) || dist.at(x, y) < level) continue;
                    std::int32_t best = 0;
                    for (const auto& off : offsets) {
                        const int nx = x + off[0];
                        const int ny = y + off[1];
                        if (!segments.in_bounds(nx, ny)) continue;
                        const std::int32_t s = segments.at(nx, ny);
                        if (s > 0) {
                            const std::int32_t r = resolve(parent, s);
                            if (best == 0 || r < best) best = r;
                        }
                    }
                    if (best > 0) {
                        segments.at(x, y) = -best; // staged until the round ends
                        updates.push_back({x, y});
                    }
                }
            if (updates.empty()) break;
            for (const auto& [x, y] : updates) segments.at(x, y) = -segments.at(x, y);
        }

        // merge adjacent segments whose smaller peak barely clears this level
        for (;;) {
            std::set<std::pair<std::int32_t, std::int32_t>> adjacent;
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    const std::int32_t a = segments.at(x, y);
                    if (a <= 0) continue;
                    const std::int32_t ra = resolve(parent, a);
                    for (const auto& off : offsets) {
                        const int nx = x + off[0];
                        const int ny = y + off[1];
                        if (!segments.in_bounds(nx, ny)) continue;
                        const std::int32_t b = segments.at(nx, ny);
                        if (b <= 0) continue;
                        const std::int32_t rb = resolve(parent, b);
                        if (ra != rb) adjacent.insert({std::min(ra, rb), std::max(ra, rb)});
                    }
                }
            bool merged = false;
            for (const auto& [a, b] : adjacent) {
                const std::int32_t ra = resolve(parent, a);
                const std::int32_t rb = resolve(parent, b);
                if (ra == rb) continue;
                if (std::min(peak[ra], peak[rb]) <= level + 1.0) {
                    const std::int32_t lo = std::min(ra, rb);
                    const std::int32_t hi = std::max(ra, rb);
                    parent[hi] = lo;
                    peak[lo] = std::max(peak[lo], peak[hi]);
                    merged = true;
                }
            }
            if (!merged) break;
        }
    }

    // survivors keep their original seed label, so the output label set is
    // a subset of the seed labels
    for (std::int32_t& v : segments.cells())
        if (v > 0) v = resolve(parent, v);
    return segments;
}

void expand_segments(SegmentImage& segments, const BinaryMask& allowed) {
    if (!allowed.same_size(segments))
        throw InvalidInput("expand_segments: dimension mismatch");
    const int w = allowed.width();
    const int h = allowed.height();
    const auto offsets = neighbor_offsets(Connectivity::eight);
    std::vector<std::pair<int, int>> updates;
    for (;;) {
        updates.clear();
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                if (segments.at(x, y) != 0 || !allowed.get(x, y)) continue;
                std::int32_t best = 0;
                for (const auto& off : offsets) {
                    const int nx = x + off[0];
                    const int ny = y + off[1];
                    if (!segments.in_bounds(nx, ny)) continue;
                    const std::int32_t s = segments.at(nx, ny);
                    if (s > 0 && (best == 0 || s < best)) best = s;
                }
                if (best > 0) {
                    segments.at(x, y) = -best;
                    updates.push_back({x, y});
                }
            }
        if (updates.empty()) break;
        for (const auto& [x, y] : updates) segments.at(x, y) = -segments.at(x, y);
    }
}

void compact_labels(SegmentImage& segments) {
    // first-encounter order, not numeric order
    std::map<std::int32_t, std::int32_t> remap;
    std::int32_t next = 0;
    for (std::int32_t& v : segments.cells()) {
        if (v <= 0) continue;
        auto it = remap.find(v);
        if (it == remap.end()) it = remap.emplace(v, ++next).first;
        v = it->second;
    }
}

BinaryMask label_mask(const SegmentImage& segments, std::int32_t label) {
    BinaryMask out(segments.width(), segments.height());
    for (int y = 0; y < segments.height(); ++y)
        for (int x = 0; x < segments.width(); ++x)
            if (segments.at(x, y) == label) out.set(x, y);
    return out;
}

} // namespace chromoseg::raster
