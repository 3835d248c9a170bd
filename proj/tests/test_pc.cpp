#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "phasematch/error.hpp"
#include "phasematch/phase_congruency.hpp"
#include "phasematch/rng.hpp"

using namespace phasematch;

namespace {

// Brute-force maximization over the mean phase angle on a uniform grid.
// Independent of the closed form under test.
double pc_grid_oracle(const FourierComponentSet& comps, double step) {
    double best = -1.0;
    double amp_sum = 0.0;
    for (const auto& c : comps.components) amp_sum += c.amplitude;
    if (amp_sum <= 0.0) return 0.0;
    for (double phi_bar = 0.0; phi_bar < 2.0 * M_PI; phi_bar += step) {
        double acc = 0.0;
        for (const auto& c : comps.components) acc += c.amplitude * std::cos(c.phase - phi_bar);
        best = std::max(best, acc / amp_sum);
    }
    return std::max(best, 0.0);
}

FourierComponentSet random_components(Rng& rng, int max_n) {
    FourierComponentSet set;
    const int n = rng.range(1, max_n);
    for (int i = 0; i < n; ++i)
        set.components.push_back({rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0 * M_PI)});
    return set;
}

GrayImage smooth_random_image(int w, int h, std::uint64_t seed, double lo, double hi) {
    Rng rng(seed);
    GrayImage img(w, h);
    for (double& v : img.pixels) v = rng.uniform();
    // box blur a few times so the image has structure at several scales
    for (int pass = 0; pass < 3; ++pass) {
        GrayImage tmp = img;
        for (int y = 1; y < h - 1; ++y)
            for (int x = 1; x < w - 1; ++x) {
                double acc = 0.0;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) acc += tmp.at(x + dx, y + dy);
                img.at(x, y) = acc / 9.0;
            }
    }
    double mn = 1e9, mx = -1e9;
    for (double v : img.pixels) {
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    for (double& v : img.pixels) v = lo + (hi - lo) * (v - mn) / (mx - mn);
    return img;
}

} // namespace

TEST_CASE("eval_pc_point: perfectly in-phase components give 1") {
    FourierComponentSet set;
    set.components = {{1.0, 0.7}, {2.5, 0.7}, {0.3, 0.7}};
    CHECK(eval_pc_point(set) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("eval_pc_point: exact cancellation gives 0") {
    FourierComponentSet set;
    set.components = {{1.0, 0.0}, {1.0, M_PI}};
    CHECK(eval_pc_point(set) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("eval_pc_point matches the grid-search oracle on the spec pair") {
    FourierComponentSet set;
    set.components = {{1.0, 0.0}, {0.5, M_PI / 2.0}};
    const double closed = eval_pc_point(set);
    const double grid = pc_grid_oracle(set, 1e-4);
    CHECK(std::abs(closed - grid) < 1e-3);
}

TEST_CASE("eval_pc_point matches the grid-search oracle on random sets") {
    Rng rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const FourierComponentSet set = random_components(rng, 16);
        CHECK(std::abs(eval_pc_point(set) - pc_grid_oracle(set, 1e-4)) < 1e-3);
    }
}

TEST_CASE("eval_pc_point rejects empty or invalid sets") {
    CHECK_THROWS_AS(eval_pc_point(FourierComponentSet{}), Error);
    FourierComponentSet bad;
    bad.components = {{-1.0, 0.0}};
    CHECK_THROWS_AS(eval_pc_point(bad), Error);
}

TEST_CASE("synth_signal: single harmonic is a pure sinusoid") {
    SyntheticSignalSpec spec;
    spec.f0 = 2.0;
    spec.amplitudes = {1.0};
    std::vector<double> t(64);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i) / 64.0;
    const auto f = synth_signal(spec, t);
    for (std::size_t i = 0; i < t.size(); ++i)
        CHECK(f[i] == doctest::Approx(std::sin(2.0 * M_PI * 2.0 * t[i])).epsilon(1e-12));
}

TEST_CASE("synth_signal: zero amplitudes give the zero signal") {
    SyntheticSignalSpec spec;
    spec.f0 = 1.0;
    spec.amplitudes = {0.0, 0.0, 0.0};
    std::vector<double> t(32, 0.37);
    for (double v : synth_signal(spec, t)) CHECK(v == 0.0);
}

TEST_CASE("synth_signal: odd-harmonic series approximates a square wave") {
    SyntheticSignalSpec spec;
    spec.f0 = 1.0;
    const int N = 49;
    for (int n = 1; n <= N; ++n) spec.amplitudes.push_back(n % 2 == 1 ? 1.0 / n : 0.0);

    std::vector<double> t(512);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i) / 512.0;
    const auto f = synth_signal(spec, t);

    // away from the jumps, |4/pi * f - sign| is bounded by the Dirichlet
    // tail estimate 2 / (N * |sin(2 pi f0 t)|)
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double s = std::sin(2.0 * M_PI * t[i]);
        if (std::abs(s) < 0.2) continue;
        const double approx = 4.0 / M_PI * f[i];
        const double bound = 2.0 / (static_cast<double>(N) * std::abs(s));
        CHECK(std::abs(approx - (s > 0 ? 1.0 : -1.0)) <= bound);
    }
}

TEST_CASE("pc_profile_1d: global maximum sits at the step") {
    Rng rng(11);
    BankParams params;
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 256;
        const int step_at = rng.range(32, 224);
        std::vector<double> signal(n, 0.0);
        for (int i = step_at; i < n; ++i) signal[i] = 1.0;

        const auto pc = pc_profile_1d(signal, params);
        int argmax = 0;
        for (int i = 1; i < n; ++i)
            if (pc[static_cast<std::size_t>(i)] > pc[static_cast<std::size_t>(argmax)]) argmax = i;
        CHECK(std::abs(argmax - step_at) <= 1);
    }
}

TEST_CASE("pc_profile_1d: triangular wave peaks and troughs are local maxima") {
    const int n = 256, period = 64;
    std::vector<double> signal(n);
    for (int i = 0; i < n; ++i) {
        const int phase = i % period;
        signal[i] = phase < period / 2 ? phase : period - phase; // peak at 32k+32? see below
    }
    // peaks at i % 64 == 32, troughs at i % 64 == 0 (interior ones only)
    BankParams params;
    const auto pc = pc_profile_1d(signal, params);

    auto is_local_max_near = [&](int idx) {
        // some index within +-2 of idx beats its +-4 neighborhood
        for (int c = idx - 2; c <= idx + 2; ++c) {
            if (c < 4 || c >= n - 4) continue;
            bool ok = true;
            for (int d = -4; d <= 4 && ok; ++d) {
                if (d == 0) continue;
                if (pc[static_cast<std::size_t>(c + d)] > pc[static_cast<std::size_t>(c)])
                    ok = false;
            }
            if (ok) return true;
        }
        return false;
    };
    for (int peak = 32; peak < n - 8; peak += period) CHECK(is_local_max_near(peak));
    for (int trough = 64; trough < n - 8; trough += period) CHECK(is_local_max_near(trough));
}

TEST_CASE("pc_profile_1d: constant signal has no congruency") {
    const std::vector<double> signal(128, 0.42);
    for (double v : pc_profile_1d(signal, BankParams{})) CHECK(std::abs(v) <= 1e-6);
}

TEST_CASE("pc_profile_1d rejects short signals") {
    try {
        pc_profile_1d(std::vector<double>(63, 0.0), BankParams{});
        FAIL("expected SignalTooShort");
    } catch (const Error& e) {
        CHECK(e.code() == Err::SignalTooShort);
    }
}

TEST_CASE("build_bank: default bank has 24 zero-DC filters") {
    const LogGaborBank bank = build_bank(BankParams{}, 64, 48);
    CHECK(bank.filters.size() == 24);
    for (const auto& f : bank.filters) {
        CHECK(f.size() == 64u * 48u);
        CHECK(f[0] == 0.0); // DC bin
        for (double g : f) {
            CHECK(g >= 0.0);
            CHECK(std::isfinite(g));
        }
    }
}

TEST_CASE("build_bank rejects bad parameters") {
    BankParams p;
    p.n_orientations = 1;
    try {
        build_bank(p, 64, 64);
        FAIL("expected InvalidBankParams");
    } catch (const Error& e) {
        CHECK(e.code() == Err::InvalidBankParams);
    }
    CHECK_THROWS_AS(build_bank(BankParams{}, 16, 64), Error);
}

TEST_CASE("compute_pc_maps: constant image yields zero maps") {
    const GrayImage img(64, 64, 0.6);
    const LogGaborBank bank = build_bank(BankParams{}, 64, 64);
    const PCMaps maps = compute_pc_maps(img, bank, true);
    for (const auto& pc : maps.per_orientation)
        for (double v : pc) CHECK(std::abs(v) <= 1e-6);
    for (double v : maps.max_moment) CHECK(std::abs(v) <= 1e-6);
    for (double v : maps.min_moment) CHECK(std::abs(v) <= 1e-6);
}

TEST_CASE("compute_pc_maps: affine intensity maps leave PC unchanged") {
    const GrayImage img = smooth_random_image(64, 64, 31, 0.25, 0.6);
    const LogGaborBank bank = build_bank(BankParams{}, 64, 64);
    const PCMaps base = compute_pc_maps(img, bank, false);

    for (auto [a, b] : {std::pair{0.5, 0.2}, std::pair{1.5, 0.05}, std::pair{0.3, 0.4}}) {
        GrayImage mapped = img;
        for (double& v : mapped.pixels) v = a * v + b;
        for (double v : mapped.pixels) REQUIRE((v >= 0.0 && v <= 1.0));
        const PCMaps got = compute_pc_maps(mapped, bank, false);
        for (int o = 0; o < base.n_orientations; ++o)
            for (std::size_t i = 0; i < base.per_orientation[o].size(); ++i)
                CHECK(std::abs(got.per_orientation[o][i] - base.per_orientation[o][i]) <= 1e-6);

        DetectConfig cfg;
        cfg.border = 8;
        cfg.threshold = -1.0;
        const auto kps_base = detect_keypoints(base, cfg);
        const auto kps_got = detect_keypoints(got, cfg);
        REQUIRE(kps_base.size() == kps_got.size());
        for (std::size_t i = 0; i < kps_base.size(); ++i) {
            CHECK(kps_base[i].x == kps_got[i].x);
            CHECK(kps_base[i].y == kps_got[i].y);
        }
    }
}

TEST_CASE("compute_pc_maps: moment invariants hold on a random image") {
    const GrayImage img = smooth_random_image(64, 64, 77, 0.1, 0.9);
    const BankParams params;
    const LogGaborBank bank = build_bank(params, 64, 64);
    const PCMaps maps = compute_pc_maps(img, bank, true);
    for (const auto& pc : maps.per_orientation)
        for (double v : pc) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    for (std::size_t i = 0; i < maps.min_moment.size(); ++i) {
        CHECK(maps.min_moment[i] >= -1e-12);
        CHECK(maps.min_moment[i] <= maps.max_moment[i] + 1e-12);
        CHECK(maps.max_moment[i] <= params.n_orientations + 1e-9);
    }
}

TEST_CASE("compute_pc_maps: bright rectangle corners dominate the min moment") {
    GrayImage img(128, 128, 0.1);
    const int x0 = 40, x1 = 88, y0 = 48, y1 = 80;
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) img.at(x, y) = 0.9;

    const LogGaborBank bank = build_bank(BankParams{}, 128, 128);
    const PCMaps maps = compute_pc_maps(img, bank, false);

    const auto maxima =
        reference::nms_exhaustive(maps.min_moment, 128, 128, 5, 0.0, 8, KeypointKind::Corner);
    REQUIRE(maxima.size() >= 4);

    const int corners[4][2] = {{x0, y0}, {x1 - 1, y0}, {x0, y1 - 1}, {x1 - 1, y1 - 1}};
    bool corner_hit[4] = {false, false, false, false};
    for (int i = 0; i < 4; ++i) {
        for (int c = 0; c < 4; ++c) {
            const double d = std::max(std::abs(maxima[static_cast<std::size_t>(i)].x - corners[c][0]),
                                      std::abs(maxima[static_cast<std::size_t>(i)].y - corners[c][1]));
            if (d <= 3.0) corner_hit[c] = true;
        }
    }
    for (bool hit : corner_hit) CHECK(hit);
}

TEST_CASE("compute_pc_maps rejects dimension mismatch") {
    const LogGaborBank bank = build_bank(BankParams{}, 64, 64);
    try {
        compute_pc_maps(GrayImage(32, 64, 0.5), bank, true);
        FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == Err::DimensionMismatch);
    }
}

namespace {

PCMaps fixture_maps(int w, int h) {
    PCMaps maps;
    maps.width = w;
    maps.height = h;
    maps.n_orientations = 0;
    maps.max_moment.assign(static_cast<std::size_t>(w) * h, 0.0);
    maps.min_moment.assign(static_cast<std::size_t>(w) * h, 0.0);
    return maps;
}

} // namespace

TEST_CASE("detect_keypoints: empty maps give an empty list") {
    const PCMaps maps = fixture_maps(64, 64);
    DetectConfig cfg;
    cfg.threshold = 0.05;
    cfg.border = 2;
    CHECK(detect_keypoints(maps, cfg).empty());
}

TEST_CASE("detect_keypoints: one isolated spike gives exactly one keypoint") {
    PCMaps maps = fixture_maps(64, 64);
    maps.min_moment[40 * 64 + 40] = 0.5;
    maps.max_moment[40 * 64 + 40] = 0.5;
    DetectConfig cfg;
    cfg.threshold = 0.1;
    cfg.border = 2;
    const auto kps = detect_keypoints(maps, cfg);
    REQUIRE(kps.size() == 1);
    CHECK(kps[0].x == 40);
    CHECK(kps[0].y == 40);
    CHECK(kps[0].strength == 0.5);
    CHECK(kps[0].kind == KeypointKind::Corner);
}

TEST_CASE("detect_keypoints: NMS keeps the stronger of two close spikes") {
    PCMaps maps = fixture_maps(64, 64);
    maps.min_moment[30 * 64 + 30] = 0.5;
    maps.min_moment[30 * 64 + 32] = 0.8;
    DetectConfig cfg;
    cfg.threshold = 0.1;
    cfg.nms_radius = 5;
    cfg.border = 2;
    const auto kps = detect_keypoints(maps, cfg);
    REQUIRE(kps.size() == 1);
    CHECK(kps[0].x == 32);
    CHECK(kps[0].strength == 0.8);
}

TEST_CASE("detect_keypoints agrees with the exhaustive NMS oracle") {
    Rng rng(404);
    PCMaps maps = fixture_maps(48, 40);
    for (double& v : maps.min_moment) v = rng.uniform();
    DetectConfig cfg;
    cfg.threshold = 0.5;
    cfg.nms_radius = 3;
    cfg.border = 4;
    cfg.max_count = 10000;

    const auto got = detect_keypoints(maps, cfg);
    const auto expect =
        reference::nms_exhaustive(maps.min_moment, 48, 40, 3, 0.5, 4, KeypointKind::Corner);
    REQUIRE(got.size() == expect.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].x == expect[i].x);
        CHECK(got[i].y == expect[i].y);
        CHECK(got[i].strength == expect[i].strength);
    }
}

TEST_CASE("detect_keypoints output is sorted and NMS-separated") {
    Rng rng(505);
    PCMaps maps = fixture_maps(64, 64);
    for (double& v : maps.min_moment) v = rng.uniform();
    DetectConfig cfg;
    cfg.threshold = 0.2;
    cfg.nms_radius = 4;
    cfg.border = 4;
    cfg.max_count = 20;
    const auto kps = detect_keypoints(maps, cfg);
    CHECK(kps.size() <= 20);
    for (std::size_t i = 1; i < kps.size(); ++i) CHECK(kps[i - 1].strength >= kps[i].strength);
    for (std::size_t i = 0; i < kps.size(); ++i)
        for (std::size_t j = i + 1; j < kps.size(); ++j) {
            const int d = std::max(std::abs(kps[i].x - kps[j].x), std::abs(kps[i].y - kps[j].y));
            CHECK(d > cfg.nms_radius);
        }
}

TEST_CASE("keypoint text roundtrip") {
    std::vector<Keypoint> kps = {{10, 20, 0.75, KeypointKind::Corner},
                                 {30, 40, 0.25, KeypointKind::Edge}};
    const std::string path =
        (std::filesystem::temp_directory_path() / "pm_kps.txt").string();
    save_keypoints(kps, path);
    const auto back = load_keypoints(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].x == 10);
    CHECK(back[0].strength == 0.75);
    CHECK(back[1].kind == KeypointKind::Edge);
}
