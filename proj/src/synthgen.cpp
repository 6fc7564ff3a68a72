#include "chromoseg/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "chromoseg/raster.hpp"

namespace chromoseg::synthgen {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct AxisSample {
    double x, y;
    double heading_deg;
};

// Constant-curvature arc sampled every 0.25 px of arc length, centered on
// the midpoint, heading base_angle_deg at s = 0.
std::vector<AxisSample> sample_axis(const ShapeParams& p) {
    const double ds = 0.25;
    const int n = std::max(2, static_cast<int>(std::lround(p.length_px / ds)) + 1);
    std::vector<AxisSample> out(n);
    const double phi0 = p.base_angle_deg * kPi / 180.0;
    const double k = p.curvature_deg_per_px * kPi / 180.0; // rad per px
    for (int i = 0; i < n; ++i) {
        const double s = -p.length_px / 2.0 + p.length_px * i / (n - 1);
        const double phi = phi0 + k * s;
        double x, y;
        if (std::fabs(k) < 1e-12) {
            x = s * std::cos(phi0);
            y = s * std::sin(phi0);
        } else {
            x = (std::sin(phi) - std::sin(phi0)) / k;
            y = -(std::cos(phi) - std::cos(phi0)) / k;
        }
        out[i] = {x, y, phi * 180.0 / kPi};
    }
    return out;
}

} // namespace

const char* split_name(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::test: return "test";
    }
    return "train";
}

Split split_from_name(const std::string& name) {
    if (name == "train") return Split::train;
    if (name == "val") return Split::val;
    if (name == "test") return Split::test;
    throw InvalidInput("unknown split name: " + name);
}

const char* rule_name(AssignmentRule r) {
    switch (r) {
        case AssignmentRule::length_wise: return "length_wise";
        case AssignmentRule::orientation_wise: return "orientation_wise";
        case AssignmentRule::position_wise: return "position_wise";
        case AssignmentRule::random_order: return "random";
    }
    return "length_wise";
}

AssignmentRule rule_from_name(const std::string& name) {
    if (name == "length_wise") return AssignmentRule::length_wise;
    if (name == "orientation_wise") return AssignmentRule::orientation_wise;
    if (name == "position_wise") return AssignmentRule::position_wise;
    if (name == "random") return AssignmentRule::random_order;
    throw InvalidInput("unknown assignment rule: " + name);
}

void ShapeParams::validate() const {
    if (!(length_px >= 20.0 && length_px <= 120.0))
        throw InvalidInput("ShapeParams: length must lie in [20, 120] px");
    if (!(width_px >= 4.0 && width_px <= 16.0))
        throw InvalidInput("ShapeParams: width must lie in [4, 16] px");
    if (width_px > length_px)
        throw InvalidInput("ShapeParams: width must not exceed length");
    if (std::fabs(curvature_deg_per_px) * length_px > 180.0 + 1e-9)
        throw InvalidInput("ShapeParams: total turn must not exceed 180 degrees");
    if (!(band_period_px > 1.0))
        throw InvalidInput("ShapeParams: band period must exceed 1 px");
    if (!(band_contrast >= 0.0 && band_contrast <= 0.45))
        throw InvalidInput("ShapeParams: band contrast must lie in [0, 0.45]");
    if (!(base_intensity >= 0.2 && base_intensity <= 0.75))
        throw InvalidInput("ShapeParams: base intensity must lie in [0.2, 0.75]");
    if (!(texture_jitter >= 0.0 && texture_jitter <= 0.1))
        throw InvalidInput("ShapeParams: texture jitter must lie in [0, 0.1]");
}

SourceShape procedural_shape(std::uint64_t seed, const ShapeParams& params,
                             std::string id, Split split) {
    params.validate();
    const auto axis = sample_axis(params);
    const double half_width = params.width_px / 2.0;
    const double margin = half_width + 2.0;

    double min_x = axis[0].x, max_x = axis[0].x;
    double min_y = axis[0].y, max_y = axis[0].y;
    for (const auto& a : axis) {
        min_x = std::min(min_x, a.x);
        max_x = std::max(max_x, a.x);
        min_y = std::min(min_y, a.y);
        max_y = std::max(max_y, a.y);
    }
    const double org_x = min_x - margin;
    const double org_y = min_y - margin;
    const int gw = static_cast<int>(std::ceil(max_x + margin - org_x)) + 1;
    const int gh = static_cast<int>(std::ceil(max_y + margin - org_y)) + 1;

    BinaryMask body(gw, gh);
    IntensityImage intensity(gw, gh, 0.0f);
    OrientationField orient(gw, gh);

    // nearest axis sample, coarse-to-fine
    const int n = static_cast<int>(axis.size());
    const int stride = 8;
    for (int iy = 0; iy < gh; ++iy) {
        for (int ix = 0; ix < gw; ++ix) {
            const double px = org_x + ix;
            const double py = org_y + iy;
            int best = 0;
            double best_d2 = 1e30;
            for (int i = 0; i < n; i += stride) {
                const double dx = px - axis[i].x;
                const double dy = py - axis[i].y;
                const double d2 = dx * dx + dy * dy;
                if (d2 < best_d2) {
                    best_d2 = d2;
                    best = i;
                }
            }
            const int lo = std::max(0, best - stride);
            const int hi = std::min(n - 1, best + stride);
            for (int i = lo; i <= hi; ++i) {
                const double dx = px - axis[i].x;
                const double dy = py - axis[i].y;
                const double d2 = dx * dx + dy * dy;
                if (d2 < best_d2) {
                    best_d2 = d2;
                    best = i;
                }
            }
            const double d = std::sqrt(best_d2);
            if (d > half_width) continue;

            body.set(ix, iy);
            orient.set_angle(ix, iy, AxialAngle::normalized(axis[best].heading_deg));

            const double s = params.length_px * best / (n - 1); // arc position from one end
            const double banding =
                params.band_contrast * std::sin(2.0 * kPi * s / params.band_period_px +
                                                params.band_phase_deg * kPi / 180.0);
            const double falloff = 1.0 - 0.3 * (d / half_width) * (d / half_width);
            const double jitter = params.texture_jitter * hash_noise(seed, ix, iy);
            const double v = std::clamp(params.base_intensity * falloff + banding + jitter, 0.05, 1.0);
            intensity.at(ix, iy) = static_cast<float>(v);
        }
    }

    // tight crop to the body
    int cx0 = gw, cy0 = gh, cx1 = -1, cy1 = -1;
    for (int y = 0; y < gh; ++y)
        for (int x = 0; x < gw; ++x)
            if (body.get(x, y)) {
                cx0 = std::min(cx0, x);
                cy0 = std::min(cy0, y);
                cx1 = std::max(cx1, x);
                cy1 = std::max(cy1, y);
            }
    const int cw = cx1 - cx0 + 1;
    const int ch = cy1 - cy0 + 1;
    SourceShape shape;
    shape.id = std::move(id);
    shape.split = split;
    shape.body = BinaryMask(cw, ch);
    shape.intensity = IntensityImage(cw, ch, 0.0f);
    shape.orientation = OrientationField(cw, ch);
    for (int y = 0; y < ch; ++y)
        for (int x = 0; x < cw; ++x) {
            if (!body.get(cx0 + x, cy0 + y)) continue;
            shape.body.set(x, y);
            shape.intensity.at(x, y) = intensity.at(cx0 + x, cy0 + y);
            shape.orientation.set(x, y, orient.vec(cx0 + x, cy0 + y));
        }
    shape.axis_length_px = params.length_px;
    return shape;
}

ShapeParams random_shape_params(Rng& rng) {
    ShapeParams p;
    p.length_px = rng.uniform(30.0, 110.0);
    p.width_px = rng.uniform(5.0, std::min(14.0, p.length_px / 2.5));
    // mostly gently bent bodies, a minority nearly straight
    const double turn = rng.uniform() < 0.3 ? rng.uniform(-15.0, 15.0)
                                            : rng.uniform(-75.0, 75.0);
    p.curvature_deg_per_px = turn / p.length_px;
    p.base_angle_deg = rng.uniform(0.0, 180.0);
    p.band_period_px = rng.uniform(9.0, 22.0);
    p.band_phase_deg = rng.uniform(0.0, 360.0);
    p.band_contrast = rng.uniform(0.12, 0.32);
    p.base_intensity = rng.uniform(0.4, 0.7);
    return p;
}

std::vector<SourceShape> make_procedural_bank(std::uint64_t seed, const BankCounts& counts) {
    std::vector<SourceShape> bank;
    const Split splits[3] = {Split::train, Split::val, Split::test};
    const int per_split[3] = {counts.train, counts.val, counts.test};
    for (int s = 0; s < 3; ++s) {
        for (int i = 0; i < per_split[s]; ++i) {
            const std::uint64_t shape_seed = derive_seed(seed, 0x100u + s, i);
            Rng rng(shape_seed);
            const ShapeParams params = random_shape_params(rng);
            std::string id = std::string(split_name(splits[s])) + "-" + std::to_string(i);
            bank.push_back(procedural_shape(derive_seed(shape_seed, 1), params,
                                            std::move(id), splits[s]));
        }
    }
    return bank;
}

namespace {

struct PlacedShape {
    BinaryMask body;
    IntensityImage intensity;
    OrientationField orientation;
};

bool pose_fits(const SourceShape& s, const Pose& pose, CanvasSize canvas) {
    const double cx = (s.body.width() - 1) / 2.0;
    const double cy = (s.body.height() - 1) / 2.0;
    const double r = pose.rotation_deg * kPi / 180.0;
    const double cr = std::cos(r), sr = std::sin(r);
    const double corners[4][2] = {
        {-0.5, -0.5},
        {s.body.width() - 0.5, -0.5},
        {-0.5, s.body.height() - 0.5},
        {s.body.width() - 0.5, s.body.height() - 0.5},
    };
    for (const auto& c : corners) {
        const double dx = c[0] - cx;
        const double dy = c[1] - cy;
        const double px = cr * dx - sr * dy + pose.tx;
        const double py = sr * dx + cr * dy + pose.ty;
        if (px < 1.0 || py < 1.0 || px > canvas.width - 2.0 || py > canvas.height - 2.0)
            return false;
    }
    return true;
}

BinaryMask place_body(const SourceShape& s, const Pose& pose, CanvasSize canvas) {
    BinaryMask out(canvas.width, canvas.height);
    const double cx = (s.body.width() - 1) / 2.0;
    const double cy = (s.body.height() - 1) / 2.0;
    const double r = pose.rotation_deg * kPi / 180.0;
    const double cr = std::cos(r), sr = std::sin(r);
    for (int y = 0; y < canvas.height; ++y)
        for (int x = 0; x < canvas.width; ++x) {
            const double vx = x - pose.tx;
            const double vy = y - pose.ty;
            const int qx = static_cast<int>(std::lround(cr * vx + sr * vy + cx));
            const int qy = static_cast<int>(std::lround(-sr * vx + cr * vy + cy));
            if (s.body.in_bounds(qx, qy) && s.body.get(qx, qy)) out.set(x, y);
        }
    return out;
}

PlacedShape place_shape(const SourceShape& s, const Pose& pose, CanvasSize canvas) {
    if (!pose_fits(s, pose, canvas))
        throw GenerationError("pose places shape " + s.id + " outside the canvas");
    PlacedShape placed;
    placed.body = BinaryMask(canvas.width, canvas.height);
    placed.intensity = IntensityImage(canvas.width, canvas.height, 0.0f);
    placed.orientation = OrientationField(canvas.width, canvas.height);

    const double cx = (s.body.width() - 1) / 2.0;
    const double cy = (s.body.height() - 1) / 2.0;
    const double r = pose.rotation_deg * kPi / 180.0;
    const double cr = std::cos(r), sr = std::sin(r);
    for (int y = 0; y < canvas.height; ++y)
        for (int x = 0; x < canvas.width; ++x) {
            const double vx = x - pose.tx;
            const double vy = y - pose.ty;
            const double qx = cr * vx + sr * vy + cx;
            const double qy = -sr * vx + cr * vy + cy;
            const int nx = static_cast<int>(std::lround(qx));
            const int ny = static_cast<int>(std::lround(qy));
            if (!s.body.in_bounds(nx, ny) || !s.body.get(nx, ny)) continue;

            placed.body.set(x, y);
            // masks and labels stay crisp via nearest neighbor; the
            // orientation is rotated analytically
            const double theta = decode(s.orientation.vec(nx, ny)).degrees();
            placed.orientation.set_angle(x, y, AxialAngle::normalized(theta + pose.rotation_deg));

            // bilinear intensity, out-of-crop texels read as 0
            const int x0 = static_cast<int>(std::floor(qx));
            const int y0 = static_cast<int>(std::floor(qy));
            const double fx = qx - x0;
            const double fy = qy - y0;
            auto texel = [&](int tx, int ty) -> double {
                return s.intensity.in_bounds(tx, ty) ? s.intensity.at(tx, ty) : 0.0;
            };
            const double v = (1 - fx) * (1 - fy) * texel(x0, y0) +
                             fx * (1 - fy) * texel(x0 + 1, y0) +
                             (1 - fx) * fy * texel(x0, y0 + 1) +
                             fx * fy * texel(x0 + 1, y0 + 1);
            placed.intensity.at(x, y) = static_cast<float>(v);
        }
    return placed;
}

SyntheticSample compose_from_placed(std::vector<PlacedShape> placed,
                                    const std::vector<const SourceShape*>& shapes,
                                    const std::vector<Pose>& poses, CanvasSize canvas,
                                    std::uint64_t seed) {
    const int n = static_cast<int>(placed.size());
    const int w = canvas.width;
    const int h = canvas.height;

    Grid<std::uint8_t> coverage(w, h, 0);
    for (const auto& p : placed)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (p.body.get(x, y)) ++coverage.at(x, y);
    for (std::uint8_t c : coverage.cells())
        if (c > 2)
            throw GenerationError("composition covers a pixel with three or more bodies");

    // contact graph must be connected (pairs: intersect or touch)
    std::vector<BinaryMask> dilated(n);
    for (int i = 0; i < n; ++i) dilated[i] = raster::dilate(placed[i].body, 1, Connectivity::eight);
    std::vector<int> comp(n);
    std::iota(comp.begin(), comp.end(), 0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (dilated[i].intersects(placed[j].body)) {
                const int a = std::min(comp[i], comp[j]);
                const int b = std::max(comp[i], comp[j]);
                for (int& c : comp)
                    if (c == b) c = a;
            }
    for (int c : comp)
        if (c != comp[0])
            throw GenerationError(n == 2 ? "bodies neither intersect nor touch"
                                         : "cluster contact graph is not connected");

    SyntheticSample sample;
    sample.image = IntensityImage(w, h, 0.0f);
    sample.semantic3 = LabelMap(w, h, 0);
    sample.orientation = OrientationField(w, h);
    if (n == 2) sample.semantic4 = LabelMap(w, h, 0);

    BinaryMask overlap(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int c = coverage.at(x, y);
            if (c == 0) continue;
            double sum = 0.0;
            int only = -1;
            for (int i = 0; i < n; ++i)
                if (placed[i].body.get(x, y)) {
                    sum += placed[i].intensity.at(x, y);
                    only = i;
                }
            sample.image.at(x, y) = static_cast<float>(sum / c);
            if (c >= 2) {
                overlap.set(x, y);
                sample.semantic3.at(x, y) = 2;
                if (n == 2) sample.semantic4.at(x, y) = 3;
            } else {
                sample.semantic3.at(x, y) = 1;
                if (n == 2) sample.semantic4.at(x, y) = only == 0 ? 1 : 2;
                sample.orientation.set(x, y, placed[only].orientation.vec(x, y));
            }
        }

    // dilate the true overlap by two pixels, plus the near-contact seam so
    // that touching-but-not-overlapping bodies stay separable
    sample.dilated_overlap = raster::dilate(overlap, 2, Connectivity::eight);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            sample.dilated_overlap |= dilated[i] & dilated[j];

    sample.instances.reserve(n);
    for (auto& p : placed) sample.instances.push_back(std::move(p.body));

    sample.provenance.seed = seed;
    sample.provenance.poses = poses;
    for (const SourceShape* s : shapes) {
        sample.provenance.source_ids.push_back(s->id);
        sample.provenance.axis_lengths_px.push_back(s->axis_length_px);
    }
    return sample;
}

} // namespace

BinaryMask SyntheticSample::overlap_mask() const {
    BinaryMask out(semantic3.width(), semantic3.height());
    for (int y = 0; y < semantic3.height(); ++y)
        for (int x = 0; x < semantic3.width(); ++x)
            if (semantic3.at(x, y) == 2) out.set(x, y);
    return out;
}

SyntheticSample compose_pair(const SourceShape& a, const SourceShape& b,
                             Pose pose_a, Pose pose_b, CanvasSize canvas,
                             std::uint64_t seed) {
    std::vector<PlacedShape> placed;
    placed.push_back(place_shape(a, pose_a, canvas));
    placed.push_back(place_shape(b, pose_b, canvas));
    return compose_from_placed(std::move(placed), {&a, &b}, {pose_a, pose_b}, canvas, seed);
}

SyntheticSample compose_cluster(const std::vector<const SourceShape*>& shapes,
                                const std::vector<Pose>& poses, CanvasSize canvas,
                                std::uint64_t seed) {
    if (shapes.size() < 2 || shapes.size() > 5)
        throw InvalidInput("compose_cluster: cluster size must lie in [2, 5]");
    if (shapes.size() != poses.size())
        throw InvalidInput("compose_cluster: one pose per shape required");
    std::vector<PlacedShape> placed;
    placed.reserve(shapes.size());
    for (std::size_t i = 0; i < shapes.size(); ++i)
        placed.push_back(place_shape(*shapes[i], poses[i], canvas));
    return compose_from_placed(std::move(placed), shapes, poses, canvas, seed);
}

namespace {

double centroid_x(const BinaryMask& m) {
    double sx = 0.0;
    long long n = 0;
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x)
            if (m.get(x, y)) {
                sx += x;
                ++n;
            }
    return n ? sx / n : 0.0;
}

} // namespace

SyntheticSample assign_classes(SyntheticSample sample, AssignmentRule rule, std::uint64_t seed) {
    if (sample.instances.size() != 2)
        throw InvalidInput("assign_classes: sample must hold exactly 2 instances");
    if (sample.semantic4.width() == 0)
        throw InvalidInput("assign_classes: sample lacks a 4-class map");

    int winner = 0;
    switch (rule) {
        case AssignmentRule::length_wise: {
            const auto& len = sample.provenance.axis_lengths_px;
            if (len.size() == 2 && len[0] != len[1]) {
                winner = len[0] >= len[1] ? 0 : 1;
            } else {
                const long long a0 = sample.instances[0].count();
                const long long a1 = sample.instances[1].count();
                winner = a0 >= a1 ? 0 : 1;
            }
            break;
        }
        case AssignmentRule::orientation_wise: {
            const AxialAngle vertical(90.0);
            const double d0 = axial_distance(
                region_mean_orientation(sample.orientation, sample.instances[0]), vertical);
            const double d1 = axial_distance(
                region_mean_orientation(sample.orientation, sample.instances[1]), vertical);
            winner = d0 <= d1 ? 0 : 1;
            break;
        }
        case AssignmentRule::position_wise:
            winner = centroid_x(sample.instances[0]) >= centroid_x(sample.instances[1]) ? 0 : 1;
            break;
        case AssignmentRule::random_order: {
            Rng rng(derive_seed(seed, 0xA551));
            winner = rng.coin() ? 1 : 0;
            break;
        }
    }

    if (winner == 1) {
        for (std::uint8_t& v : sample.semantic4.cells()) {
            if (v == 1) v = 2;
            else if (v == 2) v = 1;
        }
        std::swap(sample.instances[0], sample.instances[1]);
        auto& prov = sample.provenance;
        if (prov.source_ids.size() == 2) std::swap(prov.source_ids[0], prov.source_ids[1]);
        if (prov.poses.size() == 2) std::swap(prov.poses[0], prov.poses[1]);
        if (prov.axis_lengths_px.size() == 2)
            std::swap(prov.axis_lengths_px[0], prov.axis_lengths_px[1]);
    }
    return sample;
}

int SampleCounts::for_split(Split s) const {
    switch (s) {
        case Split::train: return train;
        case Split::val: return val;
        case Split::test: return test;
    }
    return 0;
}

namespace {

struct PoseSampler {
    const std::vector<const SourceShape*>& shapes; // one split's shapes
    const std::vector<double>& mean_deg;           // matching mean orientations
    const GenOptions& opts;

    // half-extents of the rotated crop, for translation bounds
    static void rotated_extent(const SourceShape& s, double rot_deg, double& hx, double& hy) {
        const double r = rot_deg * kPi / 180.0;
        const double cr = std::fabs(std::cos(r)), sr = std::fabs(std::sin(r));
        const double w2 = s.body.width() / 2.0 + 0.5;
        const double h2 = s.body.height() / 2.0 + 0.5;
        hx = cr * w2 + sr * h2;
        hy = sr * w2 + cr * h2;
    }

    bool sample_translation(const SourceShape& s, double rot, Rng& rng, Pose& pose) const {
        double hx, hy;
        rotated_extent(s, rot, hx, hy);
        const double x0 = hx + 1.0, x1 = opts.canvas.width - 2.0 - hx;
        const double y0 = hy + 1.0, y1 = opts.canvas.height - 2.0 - hy;
        if (x0 >= x1 || y0 >= y1) return false;
        pose = {rot, rng.uniform(x0, x1), rng.uniform(y0, y1)};
        return true;
    }

    bool separation_ok(int i, int j, double rot_a, double rot_b) const {
        if (opts.min_axial_separation_deg <= 0.0) return true;
        const AxialAngle a = AxialAngle::normalized(mean_deg[i] + rot_a);
        const AxialAngle b = AxialAngle::normalized(mean_deg[j] + rot_b);
        return axial_distance(a, b) >= opts.min_axial_separation_deg;
    }
};

SyntheticSample generate_pair_sample(const PoseSampler& ps, Rng& rng, bool touch,
                                     std::uint64_t sample_seed) {
    const auto& shapes = ps.shapes;
    const GenOptions& opts = ps.opts;
    const CanvasSize canvas = opts.canvas;
    static constexpr int kDirs[8][2] = {{1, 0},  {-1, 0}, {0, 1},  {0, -1},
                                        {1, 1},  {1, -1}, {-1, 1}, {-1, -1}};

    for (int attempt = 0; attempt < opts.max_pose_retries; ++attempt) {
        const int i = static_cast<int>(rng.uniform_int(0, static_cast<int>(shapes.size()) - 1));
        int j = static_cast<int>(rng.uniform_int(0, static_cast<int>(shapes.size()) - 2));
        if (j >= i) ++j;
        const double rot_a = rng.uniform(0.0, 360.0);
        const double rot_b = rng.uniform(0.0, 360.0);
        if (!ps.separation_ok(i, j, rot_a, rot_b)) continue;

        Pose pose_a;
        if (!ps.sample_translation(*shapes[i], rot_a, rng, pose_a)) continue;

        // bias the second body toward the first so intersections are common
        const double reach = 0.45 * (std::hypot(shapes[i]->body.width(), shapes[i]->body.height()) +
                                     std::hypot(shapes[j]->body.width(), shapes[j]->body.height())) / 2.0;
        const double ang = rng.uniform(0.0, 2.0 * kPi);
        const double rad = rng.uniform(0.0, reach);
        Pose pose_b{rot_b, pose_a.tx + rad * std::cos(ang), pose_a.ty + rad * std::sin(ang)};
        if (!pose_fits(*shapes[j], pose_b, canvas)) continue;

        const BinaryMask body_a = place_body(*shapes[i], pose_a, canvas);
        BinaryMask body_b = place_body(*shapes[j], pose_b, canvas);
        const BinaryMask inter = body_a & body_b;
        const long long inter_area = inter.count();
        if (inter_area == 0) continue;
        const long long min_area = std::min(body_a.count(), body_b.count());
        if (inter_area > static_cast<long long>(opts.max_overlap_fraction * min_area)) continue;

        if (touch) {
            // slide the second body along a unit direction until the
            // intersection empties; one step past the last contact leaves
            // the bodies 8-adjacent
            const int d = static_cast<int>(rng.uniform_int(0, 7));
            const int dx = kDirs[d][0], dy = kDirs[d][1];
            Pose pose_t = pose_b;
            bool placed_ok = false;
            for (int step = 0; step < canvas.width + canvas.height; ++step) {
                pose_t.tx += dx;
                pose_t.ty += dy;
                if (!pose_fits(*shapes[j], pose_t, canvas)) break;
                body_b = place_body(*shapes[j], pose_t, canvas);
                if (!body_a.intersects(body_b)) {
                    placed_ok = true;
                    break;
                }
            }
            if (!placed_ok) continue;
            if (!raster::dilate(body_a, 1, Connectivity::eight).intersects(body_b)) continue;
            pose_b = pose_t;
        }

        SyntheticSample sample =
            compose_pair(*shapes[i], *shapes[j], pose_a, pose_b, canvas, sample_seed);
        sample.provenance.touch_pair = touch;
        return sample;
    }
    throw GenerationError("pair pose sampling exhausted its retry budget");
}

SyntheticSample generate_cluster_sample(const PoseSampler& ps, Rng& rng, int n,
                                        std::uint64_t sample_seed) {
    const auto& shapes = ps.shapes;
    const GenOptions& opts = ps.opts;
    const CanvasSize canvas = opts.canvas;

    for (int attempt = 0; attempt < opts.max_pose_retries; ++attempt) {
        // n distinct shapes
        std::vector<int> idx(shapes.size());
        std::iota(idx.begin(), idx.end(), 0);
        for (int k = 0; k < n; ++k) {
            const int pick = k + static_cast<int>(rng.uniform_int(0, static_cast<int>(idx.size()) - 1 - k));
            std::swap(idx[k], idx[pick]);
        }

        std::vector<Pose> poses;
        std::vector<BinaryMask> bodies;
        Grid<std::uint8_t> coverage(canvas.width, canvas.height, 0);
        bool failed = false;
        for (int k = 0; k < n && !failed; ++k) {
            const SourceShape& s = *shapes[idx[k]];
            bool placed = false;
            for (int t = 0; t < 40; ++t) {
                const double rot = rng.uniform(0.0, 360.0);
                Pose pose;
                if (k == 0) {
                    if (!ps.sample_translation(s, rot, rng, pose)) continue;
                } else {
                    const int anchor = static_cast<int>(rng.uniform_int(0, k - 1));
                    const SourceShape& as = *shapes[idx[anchor]];
                    const double reach =
                        0.45 * (std::hypot(as.body.width(), as.body.height()) +
                                std::hypot(s.body.width(), s.body.height())) / 2.0;
                    const double ang = rng.uniform(0.0, 2.0 * kPi);
                    const double rad = rng.uniform(0.0, reach);
                    pose = {rot, poses[anchor].tx + rad * std::cos(ang),
                            poses[anchor].ty + rad * std::sin(ang)};
                    if (!pose_fits(s, pose, canvas)) continue;
                }
                BinaryMask body = place_body(s, pose, canvas);
                if (k > 0) {
                    bool touches = false;
                    const BinaryMask grown = raster::dilate(body, 1, Connectivity::eight);
                    for (const auto& other : bodies)
                        if (grown.intersects(other)) {
                            touches = true;
                            break;
                        }
                    if (!touches) continue;
                    bool triple = false;
                    long long inter_total = 0;
                    for (int y = 0; y < canvas.height && !triple; ++y)
                        for (int x = 0; x < canvas.width; ++x) {
                            if (!body.get(x, y)) continue;
                            if (coverage.at(x, y) >= 2) {
                                triple = true;
                                break;
                            }
                            if (coverage.at(x, y) == 1) ++inter_total;
                        }
                    if (triple) continue;
                    if (inter_total > static_cast<long long>(opts.max_overlap_fraction * body.count()))
                        continue;
                }
                for (int y = 0; y < canvas.height; ++y)
                    for (int x = 0; x < canvas.width; ++x)
                        if (body.get(x, y)) ++coverage.at(x, y);
                poses.push_back(pose);
                bodies.push_back(std::move(body));
                placed = true;
                break;
            }
            if (!placed) failed = true;
        }
        if (failed) continue;

        std::vector<const SourceShape*> chosen;
        for (int k = 0; k < n; ++k) chosen.push_back(shapes[idx[k]]);
        try {
            return compose_cluster(chosen, poses, canvas, sample_seed);
        } catch (const GenerationError&) {
            continue; // e.g. disconnected contact graph via an unlucky chain
        }
    }
    throw GenerationError("cluster pose sampling exhausted its retry budget");
}

} // namespace

Dataset build_dataset(const std::vector<SourceShape>& bank, const SampleCounts& counts,
                      AssignmentRule rule, const GenOptions& options,
                      std::uint64_t master_seed) {
    if (options.cluster_max < 2 || options.cluster_max > 5)
        throw ConfigError("build_dataset: cluster_max must lie in [2, 5]");
    if (options.touch_fraction < 0.0 || options.touch_fraction > 1.0 ||
        options.cluster_fraction < 0.0 || options.cluster_fraction > 1.0)
        throw ConfigError("build_dataset: fractions must lie in [0, 1]");

    const Split splits[3] = {Split::train, Split::val, Split::test};

    std::vector<std::vector<const SourceShape*>> by_split(3);
    std::vector<std::vector<double>> mean_by_split(3);
    for (const SourceShape& s : bank) {
        const int si = static_cast<int>(s.split);
        by_split[si].push_back(&s);
        mean_by_split[si].push_back(region_mean_orientation(s.orientation, s.body).degrees());
    }
    for (int si = 0; si < 3; ++si)
        if (counts.for_split(splits[si]) > 0 && by_split[si].size() < 2)
            throw ConfigError(std::string("build_dataset: split '") + split_name(splits[si]) +
                              "' needs at least 2 source shapes");

    Dataset ds;
    ds.manifest.master_seed = master_seed;
    ds.manifest.rule = rule;
    ds.manifest.canvas = options.canvas;

    int global_index = 0;
    for (int si = 0; si < 3; ++si) {
        const int want = counts.for_split(splits[si]);
        const PoseSampler ps{by_split[si], mean_by_split[si], options};
        for (int k = 0; k < want; ++k, ++global_index) {
            const std::uint64_t sample_seed = derive_seed(master_seed, 0x5000u + si, k);
            Rng rng(sample_seed);

            const bool cluster = options.cluster_fraction > 0.0 && options.cluster_max >= 3 &&
                                 by_split[si].size() >= 3 &&
                                 rng.uniform() < options.cluster_fraction;
            SyntheticSample sample;
            if (cluster) {
                const int n = std::min<int>(options.cluster_max,
                                            static_cast<int>(by_split[si].size()));
                const int pick = static_cast<int>(rng.uniform_int(3, n));
                sample = generate_cluster_sample(ps, rng, pick, sample_seed);
            } else {
                const bool touch = rng.uniform() < options.touch_fraction;
                sample = generate_pair_sample(ps, rng, touch, sample_seed);
                sample = assign_classes(std::move(sample), rule, derive_seed(sample_seed, 7));
            }

            char idbuf[16];
            std::snprintf(idbuf, sizeof idbuf, "s%04d", global_index);
            ManifestRecord rec;
            rec.id = idbuf;
            rec.split = splits[si];
            rec.source_ids = sample.provenance.source_ids;
            rec.poses = sample.provenance.poses;
            rec.sample_seed = sample_seed;
            rec.touch_pair = sample.provenance.touch_pair;
            rec.instance_count = static_cast<int>(sample.instances.size());
            ds.manifest.records.push_back(std::move(rec));
            ds.samples.push_back(std::move(sample));
        }
    }
    return ds;
}

} // namespace chromoseg::synthgen
