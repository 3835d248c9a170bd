#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phasematch/image.hpp"
#include "phasematch/net.hpp"

namespace phasematch {

// Maps view-A pixel coordinates to view-B pixel coordinates:
// p_B = scale * R(theta) * (p_A - c_A) + c_A + (dx, dy), rotation about the
// A-image center. For synthetic pairs this is exact ground truth.
struct Transform2D {
    double dx = 0.0;
    double dy = 0.0;
    double theta = 0.0;
    double scale = 1.0;

    void apply(double x, double y, double cx, double cy, double& out_x, double& out_y) const;
    bool is_identity() const;
};

void save_transform(const Transform2D& t, const std::string& path);
Transform2D load_transform(const std::string& path);

struct AlignedPair {
    GrayImage img_a;
    GrayImage img_b;
    Transform2D transform;
    std::string provenance = "synthetic";
};

enum class SplitTag { None, Train, Val, Test };

const char* split_name(SplitTag tag);
SplitTag split_from_name(const std::string& name);

struct SampleRecord {
    Patch patch_a;
    Patch patch_b;
    int label = 1; // +1 match, -1 non-match
    int size = 0;
    int pair_id = 0;
    int group = 0; // source window id; a positive and its negative share it
    SplitTag split = SplitTag::None;
};

struct Manifest {
    std::uint64_t seed = 0;
    int size = 0;
    std::vector<std::pair<std::string, std::string>> params; // free-form header entries
    std::vector<SampleRecord> records;
};

// Synthetic sonar-like scene: correlated seabed texture, elliptical
// targets with an insonified highlight and a directional shadow,
// multiplicative speckle. View B reuses the scene geometry with the
// shadow direction reversed (when requested), an independent monotone
// intensity remap (sigmoid then gamma) and independent speckle.
struct SynthParams {
    int image_size = 256;
    double texture_corr_len = 9.0;
    int target_count = 26;
    double target_min_size = 6.0;  // ellipse radius range, px
    double target_max_size = 14.0;
    double shadow_dir_a = 0.0; // radians
    bool reverse_shadow = true;
    double gamma_lo = 0.6;
    double gamma_hi = 1.6;
    double sigmoid_gain_lo = 6.0;
    double sigmoid_gain_hi = 11.0;
    double speckle_var = 0.007;
    double skew_amp = 0.24; // insonified-side contrast skew strength
    int clutter_count = 22; // per-view transient bright dots (biologics, bubbles)
    double dx = 0.0; // ground-truth offset of view B
    double dy = 0.0;
    double theta = 0.0;

    void validate() const;
};

AlignedPair synth_pair(const SynthParams& params, std::uint64_t seed);

// Aligned slicing: every stride-spaced size x size window fully inside A
// whose transformed center also admits a full window in B becomes one
// positive record.
std::vector<SampleRecord> slice_positive(const AlignedPair& pair, int size, int stride,
                                         int pair_id = 0);

// B-side patches permuted by a seeded cyclic permutation (no fixed
// points), labels flipped to -1. Counts match the input.
std::vector<SampleRecord> make_negatives(const std::vector<SampleRecord>& positives,
                                         std::uint64_t seed);

struct AugmentOps {
    bool hflip = false;
    bool vflip = false;
    bool rot90 = false;
    double gamma_lo = 1.0; // gamma jitter range for augmented copies
    double gamma_hi = 1.0;
};

// Originals plus one transformed copy per enabled geometric op. Geometric
// ops act identically on both patches; gamma jitter (if the range is
// non-degenerate) is drawn independently per patch of each copy.
std::vector<SampleRecord> augment(const std::vector<SampleRecord>& records,
                                  const AugmentOps& ops, std::uint64_t seed);

// Seeded shuffle of source groups, then contiguous partition. Records of
// one group always land in the same split.
void split_records(std::vector<SampleRecord>& records, double train_ratio, double val_ratio,
                   double test_ratio, std::uint64_t seed);

// Manifest text file plus a `<path>.blob` sidecar holding patch pixels as
// little-endian float32, record order, patch_a then patch_b.
void save_manifest(const Manifest& manifest, const std::string& path);
Manifest load_manifest(const std::string& path);

// Records of one split as net training pairs.
std::vector<LabeledPair> to_labeled_pairs(const Manifest& manifest, SplitTag tag);

double pearson_correlation(const GrayImage& a, const GrayImage& b);

} // namespace phasematch
