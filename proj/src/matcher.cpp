#include "phasematch/matcher.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "phasematch/error.hpp"
#include "phasematch/parallel.hpp"
#include "phasematch/rng.hpp"

namespace phasematch {

void TransformEstimate::apply(double x, double y, double& out_x, double& out_y) const {
    const double c = std::cos(theta), s = std::sin(theta);
    out_x = scale * (c * x - s * y) + dx;
    out_y = scale * (s * x + c * y) + dy;
}

double ncc_score(const Patch& a, const Patch& b) {
    if (a.size != b.size) raise(Err::ShapeMismatch, "patch sizes differ");
    const Patch sa = standardize(a);
    const Patch sb = standardize(b);
    double dot = 0.0;
    for (std::size_t i = 0; i < sa.pixels.size(); ++i) dot += sa.pixels[i] * sb.pixels[i];
    return dot / static_cast<double>(sa.pixels.size());
}

std::vector<MatchCandidate> score_candidates(const GrayImage& img_a, const GrayImage& img_b,
                                             const std::vector<Keypoint>& kps_a,
                                             const std::vector<Keypoint>& kps_b,
                                             const NetSpec& spec, const NetworkParams& params,
                                             const MatcherConfig& cfg) {
    if (cfg.descriptor == DescriptorKind::Net && spec.input_size != cfg.patch_size)
        raise(Err::ModelShapeMismatch, "model input size does not match matcher patch size");

    std::vector<MatchCandidate> cands;
    for (std::size_t ia = 0; ia < kps_a.size(); ++ia) {
        const double ax = kps_a[ia].x + cfg.coarse_dx;
        const double ay = kps_a[ia].y + cfg.coarse_dy;
        for (std::size_t ib = 0; ib < kps_b.size(); ++ib) {
            if (cfg.search_radius >= 0.0) {
                const double d = std::max(std::abs(kps_b[ib].x - ax), std::abs(kps_b[ib].y - ay));
                if (d > cfg.search_radius) continue;
            }
            cands.push_back({static_cast<int>(ia), static_cast<int>(ib), 0.0});
        }
    }

    const int n = static_cast<int>(cands.size());
    const int nthreads = thread_count();
    std::exception_ptr failure = nullptr; // exceptions may not cross the parallel region
#pragma omp parallel for schedule(static) num_threads(nthreads)
    for (int i = 0; i < n; ++i) {
        try {
            auto& c = cands[static_cast<std::size_t>(i)];
            const Keypoint& ka = kps_a[static_cast<std::size_t>(c.ia)];
            const Keypoint& kb = kps_b[static_cast<std::size_t>(c.ib)];
            const Patch pa = extract_patch(img_a, ka.x, ka.y, cfg.patch_size);
            const Patch pb = extract_patch(img_b, kb.x, kb.y, cfg.patch_size);
            c.score = cfg.descriptor == DescriptorKind::Net
                          ? forward_two_channel(spec, params, pa, pb)
                          : ncc_score(pa, pb);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return cands;
}

std::vector<MatchCandidate> select_matches(const std::vector<MatchCandidate>& candidates,
                                           const MatcherConfig& cfg) {
    std::vector<MatchCandidate> passed;
    for (const auto& c : candidates)
        if (c.score > cfg.score_threshold) passed.push_back(c);
    if (!cfg.mutual_best) return passed;

    int max_a = -1, max_b = -1;
    for (const auto& c : passed) {
        max_a = std::max(max_a, c.ia);
        max_b = std::max(max_b, c.ib);
    }

    // ties break toward the lower B index (for A's best) and the lower A
    // index (for B's best)
    std::vector<int> best_b_of_a(static_cast<std::size_t>(max_a + 1), -1);
    std::vector<double> best_score_a(static_cast<std::size_t>(max_a + 1),
                                     -std::numeric_limits<double>::infinity());
    std::vector<int> best_a_of_b(static_cast<std::size_t>(max_b + 1), -1);
    std::vector<double> best_score_b(static_cast<std::size_t>(max_b + 1),
                                     -std::numeric_limits<double>::infinity());
    for (const auto& c : passed) {
        const auto a = static_cast<std::size_t>(c.ia);
        const auto b = static_cast<std::size_t>(c.ib);
        if (c.score > best_score_a[a] || (c.score == best_score_a[a] && c.ib < best_b_of_a[a])) {
            best_score_a[a] = c.score;
            best_b_of_a[a] = c.ib;
        }
        if (c.score > best_score_b[b] || (c.score == best_score_b[b] && c.ia < best_a_of_b[b])) {
            best_score_b[b] = c.score;
            best_a_of_b[b] = c.ia;
        }
    }

    std::vector<MatchCandidate> out;
    for (const auto& c : passed) {
        if (best_b_of_a[static_cast<std::size_t>(c.ia)] == c.ib &&
            best_a_of_b[static_cast<std::size_t>(c.ib)] == c.ia)
            out.push_back(c);
    }
    return out;
}

namespace {

TransformEstimate fit_translation(const std::vector<MatchCandidate>& matches,
                                  const std::vector<Keypoint>& kps_a,
                                  const std::vector<Keypoint>& kps_b,
                                  const std::vector<std::size_t>& idx) {
    TransformEstimate t;
    double sx = 0.0, sy = 0.0;
    for (std::size_t i : idx) {
        sx += kps_b[static_cast<std::size_t>(matches[i].ib)].x -
              kps_a[static_cast<std::size_t>(matches[i].ia)].x;
        sy += kps_b[static_cast<std::size_t>(matches[i].ib)].y -
              kps_a[static_cast<std::size_t>(matches[i].ia)].y;
    }
    t.dx = sx / static_cast<double>(idx.size());
    t.dy = sy / static_cast<double>(idx.size());
    return t;
}

// Least-squares 2-D similarity via the complex closed form
// b = s*e^{i theta} * a + t.
bool fit_similarity(const std::vector<MatchCandidate>& matches,
                    const std::vector<Keypoint>& kps_a, const std::vector<Keypoint>& kps_b,
                    const std::vector<std::size_t>& idx, TransformEstimate& out) {
    double max_ar = 0.0, may = 0.0, mbx = 0.0, mby = 0.0;
    for (std::size_t i : idx) {
        max_ar += kps_a[static_cast<std::size_t>(matches[i].ia)].x;
        may += kps_a[static_cast<std::size_t>(matches[i].ia)].y;
        mbx += kps_b[static_cast<std::size_t>(matches[i].ib)].x;
        mby += kps_b[static_cast<std::size_t>(matches[i].ib)].y;
    }
    const double n = static_cast<double>(idx.size());
    max_ar /= n;
    may /= n;
    mbx /= n;
    mby /= n;

    double num_re = 0.0, num_im = 0.0, den = 0.0;
    for (std::size_t i : idx) {
        const double ar = kps_a[static_cast<std::size_t>(matches[i].ia)].x - max_ar;
        const double ai = kps_a[static_cast<std::size_t>(matches[i].ia)].y - may;
        const double br = kps_b[static_cast<std::size_t>(matches[i].ib)].x - mbx;
        const double bi = kps_b[static_cast<std::size_t>(matches[i].ib)].y - mby;
        num_re += br * ar + bi * ai;
        num_im += bi * ar - br * ai;
        den += ar * ar + ai * ai;
    }
    if (den < 1e-12) return false;

    const double sre = num_re / den, sim = num_im / den;
    out.scale = std::sqrt(sre * sre + sim * sim);
    out.theta = std::atan2(sim, sre);
    out.dx = mbx - (sre * max_ar - sim * may);
    out.dy = mby - (sim * max_ar + sre * may);
    return out.scale > 1e-12;
}

double residual_px(const TransformEstimate& t, const MatchCandidate& m,
                   const std::vector<Keypoint>& kps_a, const std::vector<Keypoint>& kps_b) {
    double px, py;
    t.apply(kps_a[static_cast<std::size_t>(m.ia)].x, kps_a[static_cast<std::size_t>(m.ia)].y, px,
            py);
    const double ex = px - kps_b[static_cast<std::size_t>(m.ib)].x;
    const double ey = py - kps_b[static_cast<std::size_t>(m.ib)].y;
    return std::sqrt(ex * ex + ey * ey);
}

} // namespace

MatchResult consensus_filter(const std::vector<MatchCandidate>& matches,
                             const std::vector<Keypoint>& kps_a,
                             const std::vector<Keypoint>& kps_b, const MatcherConfig& cfg) {
    const std::size_t minimal = cfg.model == GeomModel::Translation ? 1 : 2;
    if (matches.size() < minimal)
        raise(Err::InsufficientMatches, "not enough matches to fit the geometric model");
    if (cfg.consensus_iters < 1 || cfg.inlier_tol <= 0.0)
        raise(Err::InvalidArgument, "consensus needs iterations >= 1 and tolerance > 0");

    Rng rng(cfg.seed);
    const std::size_t n = matches.size();

    std::size_t best_count = 0;
    TransformEstimate best_t;
    for (int it = 0; it < cfg.consensus_iters; ++it) {
        std::vector<std::size_t> sample;
        sample.push_back(static_cast<std::size_t>(rng.below(n)));
        if (minimal == 2) {
            const std::size_t second = static_cast<std::size_t>(rng.below(n));
            if (second == sample[0]) continue;
            sample.push_back(second);
        }

        TransformEstimate t;
        if (cfg.model == GeomModel::Translation) {
            t = fit_translation(matches, kps_a, kps_b, sample);
        } else if (!fit_similarity(matches, kps_a, kps_b, sample, t)) {
            continue;
        }

        std::size_t count = 0;
        for (const auto& m : matches)
            if (residual_px(t, m, kps_a, kps_b) <= cfg.inlier_tol) ++count;
        if (count > best_count) {
            best_count = count;
            best_t = t;
        }
    }

    if (best_count < std::max<std::size_t>(minimal, static_cast<std::size_t>(cfg.min_inliers)))
        raise(Err::NoConsensus, "consensus below the minimum inlier count");

    // refit on the winning inlier set, then report inliers under the refit
    std::vector<std::size_t> inlier_idx;
    for (std::size_t i = 0; i < n; ++i)
        if (residual_px(best_t, matches[i], kps_a, kps_b) <= cfg.inlier_tol)
            inlier_idx.push_back(i);

    TransformEstimate refit = best_t;
    if (cfg.model == GeomModel::Translation) {
        refit = fit_translation(matches, kps_a, kps_b, inlier_idx);
    } else {
        fit_similarity(matches, kps_a, kps_b, inlier_idx, refit);
    }

    MatchResult result;
    result.transform = refit;
    result.n_selected = static_cast<int>(n);
    double res_sum = 0.0;
    for (const auto& m : matches) {
        const double r = residual_px(refit, m, kps_a, kps_b);
        const bool inl = r <= cfg.inlier_tol;
        result.accepted.push_back({m.ia, m.ib, m.score, inl});
        if (inl) {
            ++result.inlier_count;
            res_sum += r;
            result.max_residual = std::max(result.max_residual, r);
        }
    }
    if (result.inlier_count < std::max(static_cast<int>(minimal), cfg.min_inliers))
        raise(Err::NoConsensus, "refit dropped the consensus below the minimum inlier count");
    result.mean_residual = res_sum / static_cast<double>(result.inlier_count);
    return result;
}

MatchResult match_pipeline(const GrayImage& img_a, const GrayImage& img_b, const NetSpec& spec,
                           const NetworkParams& params, const MatcherConfig& cfg,
                           const BankParams& bank_params, const DetectConfig& detect_cfg,
                           std::vector<Keypoint>* out_kps_a, std::vector<Keypoint>* out_kps_b,
                           StageTimings* timings) {
    if (img_a.width < 64 || img_a.height < 64 || img_b.width < 64 || img_b.height < 64)
        raise(Err::InvalidArgument, "pipeline needs images of at least 64x64");

    using clock = std::chrono::steady_clock;
    auto ms_since = [](clock::time_point t0) {
        return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    };

    DetectConfig det = detect_cfg;
    det.border = std::max(det.border, cfg.patch_size / 2 + 1);

    auto t0 = clock::now();
    const LogGaborBank bank_a = build_bank(bank_params, img_a.width, img_a.height);
    const PCMaps maps_a = compute_pc_maps(img_a, bank_a, true);
    const std::vector<Keypoint> kps_a = detect_keypoints(maps_a, det);

    const LogGaborBank bank_b =
        (img_b.width == img_a.width && img_b.height == img_a.height)
            ? bank_a
            : build_bank(bank_params, img_b.width, img_b.height);
    const PCMaps maps_b = compute_pc_maps(img_b, bank_b, true);
    const std::vector<Keypoint> kps_b = detect_keypoints(maps_b, det);
    if (timings) timings->detect_ms = ms_since(t0);

    if (out_kps_a) *out_kps_a = kps_a;
    if (out_kps_b) *out_kps_b = kps_b;
    if (kps_a.empty() || kps_b.empty())
        raise(Err::NoKeypoints, "keypoint detection returned nothing on one side");

    t0 = clock::now();
    const auto candidates = score_candidates(img_a, img_b, kps_a, kps_b, spec, params, cfg);
    if (timings) timings->score_ms = ms_since(t0);

    t0 = clock::now();
    const auto selected = select_matches(candidates, cfg);
    if (timings) timings->select_ms = ms_since(t0);

    t0 = clock::now();
    MatchResult result = consensus_filter(selected, kps_a, kps_b, cfg);
    if (timings) timings->consensus_ms = ms_since(t0);

    result.n_kps_a = static_cast<int>(kps_a.size());
    result.n_kps_b = static_cast<int>(kps_b.size());
    result.n_candidates = static_cast<int>(candidates.size());
    result.n_selected = static_cast<int>(selected.size());
    return result;
}

void save_matches(const MatchResult& result, const std::vector<Keypoint>& kps_a,
                  const std::vector<Keypoint>& kps_b, const std::string& path) {
    std::ofstream out(path);
    if (!out) raise(Err::IoFailure, "cannot write: " + path);
    out << "# ax ay bx by score inlier\n";
    char buf[192];
    for (const auto& m : result.accepted) {
        const Keypoint& ka = kps_a[static_cast<std::size_t>(m.ia)];
        const Keypoint& kb = kps_b[static_cast<std::size_t>(m.ib)];
        std::snprintf(buf, sizeof(buf), "%d %d %d %d %.9g %d\n", ka.x, ka.y, kb.x, kb.y, m.score,
                      m.inlier ? 1 : 0);
        out << buf;
    }
    std::snprintf(buf, sizeof(buf), "# transform %.9g %.9g %.9g %.9g\n", result.transform.dx,
                  result.transform.dy, result.transform.theta, result.transform.scale);
    out << buf;
    std::snprintf(buf, sizeof(buf), "# counts kps_a %d kps_b %d candidates %d selected %d inliers %d\n",
                  result.n_kps_a, result.n_kps_b, result.n_candidates, result.n_selected,
                  result.inlier_count);
    out << buf;
    std::snprintf(buf, sizeof(buf), "# residual mean %.9g max %.9g\n", result.mean_residual,
                  result.max_residual);
    out << buf;
    if (!out) raise(Err::IoFailure, "write failed: " + path);
}

MatchFile load_matches(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Err::FileNotFound, "no such file: " + path);
    MatchFile mf;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ss(line.substr(1));
            std::string key;
            ss >> key;
            if (key == "transform") {
                ss >> mf.transform.dx >> mf.transform.dy >> mf.transform.theta >>
                    mf.transform.scale;
            } else if (key == "counts") {
                std::string name;
                while (ss >> name) {
                    int v;
                    if (!(ss >> v)) break;
                    if (name == "kps_a") mf.n_kps_a = v;
                    else if (name == "kps_b") mf.n_kps_b = v;
                    else if (name == "candidates") mf.n_candidates = v;
                    else if (name == "selected") mf.n_selected = v;
                    else if (name == "inliers") mf.n_inliers = v;
                }
            }
            continue;
        }
        std::istringstream ss(line);
        MatchFile::Row row{};
        if (!(ss >> row.ax >> row.ay >> row.bx >> row.by >> row.score >> row.inlier))
            raise(Err::CorruptHeader, "bad match line: " + path);
        mf.rows.push_back(row);
    }
    return mf;
}

} // namespace phasematch
