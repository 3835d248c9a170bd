#include "phasematch/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "phasematch/error.hpp"
#include "phasematch/rng.hpp"

namespace phasematch {

void Transform2D::apply(double x, double y, double cx, double cy, double& out_x,
                        double& out_y) const {
    const double rx = x - cx, ry = y - cy;
    const double c = std::cos(theta), s = std::sin(theta);
    out_x = scale * (c * rx - s * ry) + cx + dx;
    out_y = scale * (s * rx + c * ry) + cy + dy;
}

bool Transform2D::is_identity() const {
    return dx == 0.0 && dy == 0.0 && theta == 0.0 && scale == 1.0;
}

void save_transform(const Transform2D& t, const std::string& path) {
    std::ofstream out(path);
    if (!out) raise(Err::IoFailure, "cannot write: " + path);
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "# phasematch transform\ntranslation %.9g %.9g\nrotation %.9g\nscale %.9g\n",
                  t.dx, t.dy, t.theta, t.scale);
    out << buf;
    if (!out) raise(Err::IoFailure, "write failed: " + path);
}

Transform2D load_transform(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Err::FileNotFound, "no such file: " + path);
    Transform2D t;
    std::string line;
    bool saw_translation = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "translation") {
            if (!(ss >> t.dx >> t.dy)) raise(Err::CorruptHeader, "bad transform line: " + path);
            saw_translation = true;
        } else if (key == "rotation") {
            ss >> t.theta;
        } else if (key == "scale") {
            ss >> t.scale;
        }
    }
    if (!saw_translation) raise(Err::CorruptHeader, "transform file missing translation: " + path);
    return t;
}

const char* split_name(SplitTag tag) {
    switch (tag) {
        case SplitTag::Train: return "train";
        case SplitTag::Val: return "val";
        case SplitTag::Test: return "test";
        case SplitTag::None: break;
    }
    return "none";
}

SplitTag split_from_name(const std::string& name) {
    if (name == "train") return SplitTag::Train;
    if (name == "val") return SplitTag::Val;
    if (name == "test") return SplitTag::Test;
    return SplitTag::None;
}

void SynthParams::validate() const {
    if (image_size < 64 || texture_corr_len <= 0.0 || target_count < 0 ||
        target_min_size <= 0.0 || target_max_size < target_min_size || gamma_lo <= 0.0 ||
        gamma_hi < gamma_lo || sigmoid_gain_lo <= 0.0 || sigmoid_gain_hi < sigmoid_gain_lo ||
        speckle_var < 0.0 || skew_amp < 0.0 || skew_amp > 1.0 || clutter_count < 0 ||
        std::abs(dx) > 24.0 || std::abs(dy) > 24.0)
        raise(Err::InvalidSynthParams, "bad synthetic scene parameters");
}

namespace {

struct SceneTarget {
    double cx, cy;    // canvas coords
    double r1, r2;    // ellipse radii
    double alpha;     // ellipse orientation
    double height;    // body amplitude
};

constexpr int kCanvasMargin = 32;

// Correlated texture: white noise smoothed by a forward+backward
// single-pole filter along rows then columns.
std::vector<double> make_texture(int canvas, double corr_len, Rng& rng) {
    std::vector<double> field(static_cast<std::size_t>(canvas) * canvas);
    for (double& v : field) v = rng.normal();

    const double a = std::exp(-1.0 / corr_len);
    auto smooth_rows = [&](std::vector<double>& f) {
        for (int y = 0; y < canvas; ++y) {
            double* row = f.data() + static_cast<std::size_t>(y) * canvas;
            for (int x = 1; x < canvas; ++x) row[x] += a * (row[x - 1] - row[x]);
            for (int x = canvas - 2; x >= 0; --x) row[x] += a * (row[x + 1] - row[x]);
        }
    };
    auto smooth_cols = [&](std::vector<double>& f) {
        for (int x = 0; x < canvas; ++x) {
            for (int y = 1; y < canvas; ++y) {
                const std::size_t i = static_cast<std::size_t>(y) * canvas + x;
                f[i] += a * (f[i - canvas] - f[i]);
            }
            for (int y = canvas - 2; y >= 0; --y) {
                const std::size_t i = static_cast<std::size_t>(y) * canvas + x;
                f[i] += a * (f[i + canvas] - f[i]);
            }
        }
    };
    smooth_rows(field);
    smooth_cols(field);

    double mean = 0.0;
    for (double v : field) mean += v;
    mean /= static_cast<double>(field.size());
    double var = 0.0;
    for (double v : field) var += (v - mean) * (v - mean);
    var /= static_cast<double>(field.size());
    const double sigma = std::sqrt(std::max(var, 1e-12));
    for (double& v : field) v = 0.5 + 0.065 * (v - mean) / sigma;
    return field;
}

double sample_bilinear(const std::vector<double>& field, int canvas, double x, double y) {
    x = std::clamp(x, 0.0, static_cast<double>(canvas - 1));
    y = std::clamp(y, 0.0, static_cast<double>(canvas - 1));
    const int x0 = static_cast<int>(x), y0 = static_cast<int>(y);
    const int x1 = std::min(x0 + 1, canvas - 1), y1 = std::min(y0 + 1, canvas - 1);
    const double fx = x - x0, fy = y - y0;
    const double v00 = field[static_cast<std::size_t>(y0) * canvas + x0];
    const double v10 = field[static_cast<std::size_t>(y0) * canvas + x1];
    const double v01 = field[static_cast<std::size_t>(y1) * canvas + x0];
    const double v11 = field[static_cast<std::size_t>(y1) * canvas + x1];
    return (1 - fy) * ((1 - fx) * v00 + fx * v10) + fy * ((1 - fx) * v01 + fx * v11);
}

// Scene intensity at canvas point p for a given shadow direction. Each
// target is a sigmoid-edged elliptical plateau whose outline stays put
// across views; the view-dependent parts are the interior brightness skew
// toward the sound source and the dark lobe cast down-shadow, well
// outside the body.
double scene_value(const std::vector<double>& texture, int canvas,
                   const std::vector<SceneTarget>& targets, double shadow_dir, double skew_amp,
                   double px, double py) {
    double v = sample_bilinear(texture, canvas, px, py);
    const double sdx = std::cos(shadow_dir), sdy = std::sin(shadow_dir);
    for (const auto& t : targets) {
        const double rx = px - t.cx, ry = py - t.cy;
        const double r_bar = 0.5 * (t.r1 + t.r2);
        if (rx * rx + ry * ry > 49.0 * r_bar * r_bar) continue;

        const double ca = std::cos(t.alpha), sa = std::sin(t.alpha);
        const double u = ca * rx + sa * ry, w = -sa * rx + ca * ry;
        // rotated-rectangle plateau with a ~1.5 px soft edge; the four
        // vertices give the detector sharp, view-stable corners
        const double d_out = std::max(std::abs(u) - t.r1, std::abs(w) - t.r2);
        const double body = 1.0 / (1.0 + std::exp(d_out / 0.8));
        v += t.height * body;

        // insonified-side skew, confined to the body interior: the side
        // facing the sound source (opposite the shadow) is brighter
        const double along = (rx * sdx + ry * sdy) / r_bar;
        v -= skew_amp * body * std::tanh(along);

        // shadow lobe beyond the body outline
        const double cx2 = rx - 2.4 * r_bar * sdx, cy2 = ry - 2.4 * r_bar * sdy;
        const double par = cx2 * sdx + cy2 * sdy;
        const double perp = -cx2 * sdy + cy2 * sdx;
        const double sp = 1.6 * r_bar, sq = 0.8 * r_bar;
        v -= 0.36 * (1.0 - body) *
             std::exp(-(par * par) / (2.0 * sp * sp) - (perp * perp) / (2.0 * sq * sq));
    }
    return v;
}

// Transient bright dots, independent per view: present in one image of
// the pair and absent in the other.
struct ClutterDot {
    double cx, cy, radius, amp;
};

std::vector<ClutterDot> make_clutter(int count, int n, Rng& rng) {
    std::vector<ClutterDot> dots;
    dots.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        ClutterDot d;
        d.cx = rng.uniform(0.03, 0.97) * n;
        d.cy = rng.uniform(0.03, 0.97) * n;
        d.radius = rng.uniform(1.2, 2.2);
        d.amp = rng.uniform(0.22, 0.38);
        dots.push_back(d);
    }
    return dots;
}

double clutter_value(const std::vector<ClutterDot>& dots, double px, double py) {
    double v = 0.0;
    for (const auto& d : dots) {
        const double rx = px - d.cx, ry = py - d.cy;
        const double r2 = rx * rx + ry * ry;
        if (r2 > 16.0 * d.radius * d.radius) continue;
        v += d.amp * std::exp(-r2 / (2.0 * d.radius * d.radius));
    }
    return v;
}

double apply_speckle(double v, double variance, Rng& rng) {
    const double gain = 1.0 + std::sqrt(variance) * rng.normal();
    return v * std::max(gain, 0.0);
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Monotone nonlinear remap: normalized sigmoid followed by gamma.
double remap(double v, double gain, double gamma) {
    const double lo = sigmoid(-0.5 * gain), hi = sigmoid(0.5 * gain);
    const double s = (sigmoid(gain * (v - 0.5)) - lo) / (hi - lo);
    return std::pow(std::clamp(s, 0.0, 1.0), gamma);
}

} // namespace

AlignedPair synth_pair(const SynthParams& params, std::uint64_t seed) {
    params.validate();
    const int n = params.image_size;
    const int canvas = n + 2 * kCanvasMargin;

    Rng rng_scene(substream_seed(seed, 1));
    Rng rng_speckle_a(substream_seed(seed, 2));
    Rng rng_speckle_b(substream_seed(seed, 3));
    Rng rng_clutter_a(substream_seed(seed, 4));
    Rng rng_clutter_b(substream_seed(seed, 5));

    const std::vector<double> texture = make_texture(canvas, params.texture_corr_len, rng_scene);

    std::vector<SceneTarget> targets;
    targets.reserve(static_cast<std::size_t>(params.target_count));
    for (int i = 0; i < params.target_count; ++i) {
        SceneTarget t;
        t.cx = kCanvasMargin + rng_scene.uniform(0.12, 0.88) * n;
        t.cy = kCanvasMargin + rng_scene.uniform(0.12, 0.88) * n;
        t.r1 = rng_scene.uniform(params.target_min_size, params.target_max_size);
        t.r2 = rng_scene.uniform(params.target_min_size, params.target_max_size);
        t.alpha = rng_scene.uniform(0.0, M_PI);
        t.height = rng_scene.uniform(0.30, 0.48);
        targets.push_back(t);
    }

    const auto clutter_a = make_clutter(params.clutter_count, n, rng_clutter_a);
    const auto clutter_b = make_clutter(params.clutter_count, n, rng_clutter_b);

    const double gamma_b = rng_scene.uniform(params.gamma_lo, params.gamma_hi);
    const double gain_b = rng_scene.uniform(params.sigmoid_gain_lo, params.sigmoid_gain_hi);
    const double shadow_b =
        params.reverse_shadow ? params.shadow_dir_a + M_PI : params.shadow_dir_a;

    AlignedPair pair;
    pair.transform = {params.dx, params.dy, params.theta, 1.0};
    pair.provenance = "synthetic";
    pair.img_a = GrayImage(n, n);
    pair.img_b = GrayImage(n, n);

    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            double v = scene_value(texture, canvas, targets, params.shadow_dir_a,
                                   params.skew_amp, x + kCanvasMargin, y + kCanvasMargin);
            v += clutter_value(clutter_a, x, y);
            v = apply_speckle(v, params.speckle_var, rng_speckle_a);
            pair.img_a.at(x, y) = std::clamp(v, 0.0, 1.0);
        }
    }

    // view B sees the scene point that maps onto each B pixel
    const double cx = 0.5 * (n - 1), cy = 0.5 * (n - 1);
    const double cth = std::cos(-params.theta), sth = std::sin(-params.theta);
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            const double qx = x - cx - params.dx, qy = y - cy - params.dy;
            const double ax = cth * qx - sth * qy + cx;
            const double ay = sth * qx + cth * qy + cy;
            double v = scene_value(texture, canvas, targets, shadow_b, params.skew_amp,
                                   ax + kCanvasMargin, ay + kCanvasMargin);
            v += clutter_value(clutter_b, x, y);
            v = apply_speckle(v, params.speckle_var, rng_speckle_b);
            pair.img_b.at(x, y) = std::clamp(remap(std::clamp(v, 0.0, 1.0), gain_b, gamma_b),
                                             0.0, 1.0);
        }
    }
    return pair;
}

std::vector<SampleRecord> slice_positive(const AlignedPair& pair, int size, int stride,
                                         int pair_id) {
    if (stride < 1) raise(Err::InvalidArgument, "stride must be >= 1");
    if (size != 16 && size != 32 && size != 64)
        raise(Err::InvalidArgument, "patch size must be 16, 32 or 64");

    const int half = size / 2;
    const double cax = 0.5 * (pair.img_a.width - 1), cay = 0.5 * (pair.img_a.height - 1);
    std::vector<SampleRecord> out;
    int window_id = 0;
    for (int y0 = 0; y0 + size <= pair.img_a.height; y0 += stride) {
        for (int x0 = 0; x0 + size <= pair.img_a.width; x0 += stride, ++window_id) {
            const int acx = x0 + half, acy = y0 + half;
            double bx, by;
            pair.transform.apply(acx, acy, cax, cay, bx, by);
            const int bcx = static_cast<int>(std::lround(bx));
            const int bcy = static_cast<int>(std::lround(by));
            if (bcx - half < 0 || bcy - half < 0 || bcx + half > pair.img_b.width ||
                bcy + half > pair.img_b.height)
                continue;
            SampleRecord rec;
            rec.patch_a = extract_patch(pair.img_a, acx, acy, size);
            rec.patch_b = extract_patch(pair.img_b, bcx, bcy, size);
            rec.label = 1;
            rec.size = size;
            rec.pair_id = pair_id;
            rec.group = window_id;
            out.push_back(std::move(rec));
        }
    }
    if (out.empty()) raise(Err::NoValidWindows, "no window fits inside both images");
    return out;
}

std::vector<SampleRecord> make_negatives(const std::vector<SampleRecord>& positives,
                                         std::uint64_t seed) {
    if (positives.size() < 2)
        raise(Err::CannotDerange, "need at least 2 positives to build negatives");
    Rng rng(seed);
    const std::vector<std::size_t> perm = rng.cyclic_permutation(positives.size());
    std::vector<SampleRecord> out;
    out.reserve(positives.size());
    for (std::size_t i = 0; i < positives.size(); ++i) {
        SampleRecord rec = positives[i];
        rec.patch_b = positives[perm[i]].patch_b;
        rec.label = -1;
        out.push_back(std::move(rec));
    }
    return out;
}

namespace {

Patch flip_h(const Patch& p) {
    Patch out = p;
    for (int y = 0; y < p.size; ++y)
        for (int x = 0; x < p.size; ++x) out.at(x, y) = p.at(p.size - 1 - x, y);
    return out;
}

Patch flip_v(const Patch& p) {
    Patch out = p;
    for (int y = 0; y < p.size; ++y)
        for (int x = 0; x < p.size; ++x) out.at(x, y) = p.at(x, p.size - 1 - y);
    return out;
}

Patch rotate90(const Patch& p) {
    Patch out = p;
    for (int y = 0; y < p.size; ++y)
        for (int x = 0; x < p.size; ++x) out.at(x, y) = p.at(y, p.size - 1 - x);
    return out;
}

Patch gamma_map(const Patch& p, double gamma) {
    Patch out = p;
    for (double& v : out.pixels) v = std::clamp(std::pow(std::clamp(v, 0.0, 1.0), gamma), 0.0, 1.0);
    return out;
}

} // namespace

std::vector<SampleRecord> augment(const std::vector<SampleRecord>& records,
                                  const AugmentOps& ops, std::uint64_t seed) {
    if (ops.gamma_lo <= 0.0 || ops.gamma_hi < ops.gamma_lo)
        raise(Err::InvalidArgument, "gamma jitter range must satisfy 0 < lo <= hi");

    const bool jitter = ops.gamma_hi > ops.gamma_lo;
    Rng rng(seed);
    std::vector<SampleRecord> out = records;

    using PatchOp = Patch (*)(const Patch&);
    std::vector<PatchOp> geo;
    if (ops.hflip) geo.push_back(&flip_h);
    if (ops.vflip) geo.push_back(&flip_v);
    if (ops.rot90) geo.push_back(&rotate90);

    for (PatchOp op : geo) {
        for (const auto& rec : records) {
            SampleRecord copy = rec;
            copy.patch_a = op(rec.patch_a);
            copy.patch_b = op(rec.patch_b);
            if (jitter) {
                copy.patch_a = gamma_map(copy.patch_a, rng.uniform(ops.gamma_lo, ops.gamma_hi));
                copy.patch_b = gamma_map(copy.patch_b, rng.uniform(ops.gamma_lo, ops.gamma_hi));
            }
            out.push_back(std::move(copy));
        }
    }
    return out;
}

void split_records(std::vector<SampleRecord>& records, double train_ratio, double val_ratio,
                   double test_ratio, std::uint64_t seed) {
    if (train_ratio <= 0.0 || val_ratio <= 0.0 || test_ratio <= 0.0 ||
        std::abs(train_ratio + val_ratio + test_ratio - 1.0) > 1e-9)
        raise(Err::BadRatios, "split ratios must be positive and sum to 1");

    // group key = (pair_id, group); first-appearance order, then shuffled
    std::vector<std::pair<int, int>> keys;
    std::map<std::pair<int, int>, std::size_t> seen;
    for (const auto& rec : records) {
        const std::pair<int, int> key{rec.pair_id, rec.group};
        if (seen.emplace(key, keys.size()).second) keys.push_back(key);
    }
    Rng rng(seed);
    rng.shuffle(keys);

    const std::size_t n = keys.size();
    std::size_t n_train = static_cast<std::size_t>(std::llround(train_ratio * static_cast<double>(n)));
    std::size_t n_val = static_cast<std::size_t>(std::llround(val_ratio * static_cast<double>(n)));
    n_train = std::min(n_train, n);
    n_val = std::min(n_val, n - n_train);

    std::map<std::pair<int, int>, SplitTag> tag_of;
    for (std::size_t i = 0; i < n; ++i) {
        SplitTag tag = i < n_train            ? SplitTag::Train
                       : i < n_train + n_val  ? SplitTag::Val
                                              : SplitTag::Test;
        tag_of[keys[i]] = tag;
    }
    for (auto& rec : records) rec.split = tag_of[{rec.pair_id, rec.group}];
}

void save_manifest(const Manifest& manifest, const std::string& path) {
    std::ofstream out(path);
    if (!out) raise(Err::IoFailure, "cannot write: " + path);
    out << "# phasematch-manifest v1\n";
    out << "# seed " << manifest.seed << "\n";
    out << "# size " << manifest.size << "\n";
    for (const auto& [k, v] : manifest.params) out << "# param " << k << " " << v << "\n";
    out << "# columns label size ax ay bx by pair_id split\n";
    for (const auto& rec : manifest.records) {
        out << rec.label << " " << rec.size << " " << rec.patch_a.cx << " " << rec.patch_a.cy
            << " " << rec.patch_b.cx << " " << rec.patch_b.cy << " " << rec.pair_id << " "
            << split_name(rec.split) << "\n";
    }
    if (!out) raise(Err::IoFailure, "write failed: " + path);

    std::ofstream blob(path + ".blob", std::ios::binary);
    if (!blob) raise(Err::IoFailure, "cannot write: " + path + ".blob");
    auto put_patch = [&](const Patch& p) {
        std::vector<unsigned char> raw(p.pixels.size() * 4);
        for (std::size_t i = 0; i < p.pixels.size(); ++i) {
            const float f = static_cast<float>(p.pixels[i]);
            std::uint32_t bits;
            std::memcpy(&bits, &f, 4);
            for (int k = 0; k < 4; ++k)
                raw[i * 4 + static_cast<std::size_t>(k)] =
                    static_cast<unsigned char>((bits >> (8 * k)) & 0xFF);
        }
        blob.write(reinterpret_cast<const char*>(raw.data()),
                   static_cast<std::streamsize>(raw.size()));
    };
    for (const auto& rec : manifest.records) {
        put_patch(rec.patch_a);
        put_patch(rec.patch_b);
    }
    if (!blob) raise(Err::IoFailure, "write failed: " + path + ".blob");
}

Manifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Err::FileNotFound, "no such file: " + path);

    Manifest m;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ss(line.substr(1));
            std::string key;
            ss >> key;
            if (key == "seed") ss >> m.seed;
            else if (key == "size") ss >> m.size;
            else if (key == "param") {
                std::string k, v;
                ss >> k;
                std::getline(ss, v);
                if (!v.empty() && v.front() == ' ') v.erase(0, 1);
                m.params.emplace_back(k, v);
            }
            continue;
        }
        std::istringstream ss(line);
        SampleRecord rec;
        std::string split;
        int ax, ay, bx, by;
        if (!(ss >> rec.label >> rec.size >> ax >> ay >> bx >> by >> rec.pair_id >> split))
            raise(Err::CorruptHeader, "bad manifest record line: " + path);
        rec.patch_a.size = rec.patch_b.size = rec.size;
        rec.patch_a.cx = ax;
        rec.patch_a.cy = ay;
        rec.patch_b.cx = bx;
        rec.patch_b.cy = by;
        rec.split = split_from_name(split);
        rec.group = static_cast<int>(m.records.size());
        m.records.push_back(std::move(rec));
    }

    const std::string blob_path = path + ".blob";
    if (!std::filesystem::exists(blob_path))
        raise(Err::FileNotFound, "manifest blob missing: " + blob_path);
    std::ifstream blob(blob_path, std::ios::binary);
    if (!blob) raise(Err::IoFailure, "cannot open: " + blob_path);

    auto get_patch = [&](Patch& p) {
        const std::size_t n = static_cast<std::size_t>(p.size) * p.size;
        std::vector<unsigned char> raw(n * 4);
        blob.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (static_cast<std::size_t>(blob.gcount()) != raw.size())
            raise(Err::CorruptHeader, "manifest blob truncated: " + blob_path);
        p.pixels.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::uint32_t bits = 0;
            for (int k = 0; k < 4; ++k)
                bits |= static_cast<std::uint32_t>(raw[i * 4 + static_cast<std::size_t>(k)])
                        << (8 * k);
            float f;
            std::memcpy(&f, &bits, 4);
            p.pixels[i] = static_cast<double>(f);
        }
    };
    for (auto& rec : m.records) {
        get_patch(rec.patch_a);
        get_patch(rec.patch_b);
    }
    return m;
}

std::vector<LabeledPair> to_labeled_pairs(const Manifest& manifest, SplitTag tag) {
    std::vector<LabeledPair> out;
    for (const auto& rec : manifest.records) {
        if (rec.split != tag) continue;
        out.push_back({rec.patch_a, rec.patch_b, rec.label});
    }
    return out;
}

double pearson_correlation(const GrayImage& a, const GrayImage& b) {
    if (a.size() != b.size()) raise(Err::DimensionMismatch, "images differ in size");
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a.pixels[i];
        mb += b.pixels[i];
    }
    ma /= n;
    mb /= n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a.pixels[i] - ma, db = b.pixels[i] - mb;
        cov += da * db;
        va += da * da;
        vb += db * db;
    }
    const double denom = std::sqrt(va * vb);
    return denom > 0.0 ? cov / denom : 0.0;
}

} // namespace phasematch
