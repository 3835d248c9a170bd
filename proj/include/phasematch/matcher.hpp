#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phasematch/image.hpp"
#include "phasematch/net.hpp"
#include "phasematch/phase_congruency.hpp"

namespace phasematch {

enum class GeomModel { Translation, Similarity };
enum class DescriptorKind { Net, Ncc };

struct MatcherConfig {
    int patch_size = 32;
    double score_threshold = 0.0;
    bool mutual_best = true;
    double search_radius = -1.0; // Chebyshev px between mapped keypoints; < 0 = all pairs
    double coarse_dx = 0.0;      // prior alignment used only for radius gating
    double coarse_dy = 0.0;
    GeomModel model = GeomModel::Translation;
    int consensus_iters = 500;
    double inlier_tol = 2.0;
    int min_inliers = 4;
    std::uint64_t seed = 7;
    DescriptorKind descriptor = DescriptorKind::Net;
};

struct MatchCandidate {
    int ia = 0;
    int ib = 0;
    double score = 0.0;
};

// x_B = scale * R(theta) * x_A + (dx, dy), about the origin.
struct TransformEstimate {
    double dx = 0.0;
    double dy = 0.0;
    double theta = 0.0;
    double scale = 1.0;

    void apply(double x, double y, double& out_x, double& out_y) const;
};

struct MatchedPair {
    int ia = 0;
    int ib = 0;
    double score = 0.0;
    bool inlier = false;
};

struct MatchResult {
    std::vector<MatchedPair> accepted; // selected matches, inlier flags from consensus
    TransformEstimate transform;
    int inlier_count = 0;
    double mean_residual = 0.0;
    double max_residual = 0.0;
    int n_kps_a = 0;
    int n_kps_b = 0;
    int n_candidates = 0;
    int n_selected = 0;
};

struct StageTimings {
    double detect_ms = 0.0;
    double score_ms = 0.0;
    double select_ms = 0.0;
    double consensus_ms = 0.0;
};

// Normalized cross-correlation of two standardized patches, in [-1, 1].
// The in-repo intensity-correlation baseline.
double ncc_score(const Patch& a, const Patch& b);

// Scores every keypoint pair within the (coarse-aligned) search radius.
// Candidates are emitted in (ia, ib) order regardless of worker count.
std::vector<MatchCandidate> score_candidates(const GrayImage& img_a, const GrayImage& img_b,
                                             const std::vector<Keypoint>& kps_a,
                                             const std::vector<Keypoint>& kps_b,
                                             const NetSpec& spec, const NetworkParams& params,
                                             const MatcherConfig& cfg);

// Threshold then (optionally) mutual-best filtering; ties break toward the
// lower B index, then the lower A index. The result is injective on both
// sides.
std::vector<MatchCandidate> select_matches(const std::vector<MatchCandidate>& candidates,
                                           const MatcherConfig& cfg);

// Seeded random-sample consensus over the selected matches, least-squares
// refit on the winning inlier set.
MatchResult consensus_filter(const std::vector<MatchCandidate>& matches,
                             const std::vector<Keypoint>& kps_a,
                             const std::vector<Keypoint>& kps_b, const MatcherConfig& cfg);

// Full Algorithm-1 style pipeline: PC keypoints on both images, network
// (or NCC) scoring, selection, consensus filtering.
MatchResult match_pipeline(const GrayImage& img_a, const GrayImage& img_b, const NetSpec& spec,
                           const NetworkParams& params, const MatcherConfig& cfg,
                           const BankParams& bank_params, const DetectConfig& detect_cfg,
                           std::vector<Keypoint>* out_kps_a = nullptr,
                           std::vector<Keypoint>* out_kps_b = nullptr,
                           StageTimings* timings = nullptr);

// Text export: `ax ay bx by score inlier` lines plus transform/count footer.
void save_matches(const MatchResult& result, const std::vector<Keypoint>& kps_a,
                  const std::vector<Keypoint>& kps_b, const std::string& path);

struct MatchFile {
    struct Row {
        double ax, ay, bx, by, score;
        int inlier;
    };
    std::vector<Row> rows;
    TransformEstimate transform;
    GeomModel model = GeomModel::Translation;
    int n_kps_a = 0, n_kps_b = 0, n_candidates = 0, n_selected = 0, n_inliers = 0;
};

MatchFile load_matches(const std::string& path);

} // namespace phasematch
