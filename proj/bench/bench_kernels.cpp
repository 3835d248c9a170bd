// Timing comparison of the OpenMP kernels against their serial execution
// (worker count 1). Every kernel promises bit-identical output for any
// worker count, which is verified here alongside the timings.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "phasematch/fft.hpp"
#include "phasematch/matcher.hpp"
#include "phasematch/net.hpp"
#include "phasematch/parallel.hpp"
#include "phasematch/phase_congruency.hpp"
#include "phasematch/rng.hpp"

using namespace phasematch;
using clock_type = std::chrono::steady_clock;

namespace {

double ms_of(clock_type::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

GrayImage random_image(int w, int h, std::uint64_t seed) {
    GrayImage img(w, h);
    Rng rng(seed);
    for (double& v : img.pixels) v = rng.uniform();
    return img;
}

Patch random_patch(int size, Rng& rng) {
    Patch p;
    p.size = size;
    p.pixels.resize(static_cast<std::size_t>(size) * size);
    for (double& v : p.pixels) v = rng.uniform();
    return p;
}

struct Row {
    std::string name;
    double serial_ms;
    double parallel_ms;
    bool identical;
};

void print_rows(const std::vector<Row>& rows, int workers) {
    std::printf("%-34s %12s %12s %9s %10s\n", "kernel", "serial ms", "parallel ms", "speedup",
                "identical");
    for (const auto& r : rows) {
        std::printf("%-34s %12.1f %12.1f %8.2fx %10s\n", r.name.c_str(), r.serial_ms,
                    r.parallel_ms, r.serial_ms / r.parallel_ms, r.identical ? "yes" : "NO");
    }
    std::printf("(parallel runs used %d worker(s))\n", workers);
}

} // namespace

int main() {
    const int workers = hardware_threads();
    std::vector<Row> rows;

    { // 2-D FFT, 512x512
        const int n = 512;
        std::vector<cd> input(static_cast<std::size_t>(n) * n);
        Rng rng(1);
        for (auto& v : input) v = cd(rng.uniform(-1, 1), rng.uniform(-1, 1));

        set_thread_count(1);
        auto serial = input;
        auto t0 = clock_type::now();
        fft_2d(serial, n, n, false);
        const double serial_ms = ms_of(t0);

        set_thread_count(workers);
        auto parallel = input;
        t0 = clock_type::now();
        fft_2d(parallel, n, n, false);
        rows.push_back({"fft_2d 512x512", serial_ms, ms_of(t0), serial == parallel});
    }

    { // naive DFT reference vs FFT, 1-D
        const std::size_t n = 2048;
        std::vector<cd> input(n);
        Rng rng(2);
        for (auto& v : input) v = cd(rng.uniform(-1, 1), rng.uniform(-1, 1));

        auto t0 = clock_type::now();
        const auto slow = reference::naive_dft(input, false);
        const double slow_ms = ms_of(t0);

        auto fast = input;
        t0 = clock_type::now();
        fft(fast, false);
        const double fast_ms = ms_of(t0);
        double max_diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) max_diff = std::max(max_diff, std::abs(fast[i] - slow[i]));
        rows.push_back({"fft vs naive DFT reference, n=2048", slow_ms, fast_ms, max_diff < 1e-6});
    }

    { // phase congruency maps, 256x256
        const GrayImage img = random_image(256, 256, 3);
        const LogGaborBank bank = build_bank(BankParams{}, 256, 256);

        set_thread_count(1);
        auto t0 = clock_type::now();
        const PCMaps serial = compute_pc_maps(img, bank, true);
        const double serial_ms = ms_of(t0);

        set_thread_count(workers);
        t0 = clock_type::now();
        const PCMaps parallel = compute_pc_maps(img, bank, true);
        bool same = serial.min_moment == parallel.min_moment &&
                    serial.max_moment == parallel.max_moment;
        for (int o = 0; o < serial.n_orientations; ++o)
            same = same && serial.per_orientation[o] == parallel.per_orientation[o];
        rows.push_back({"compute_pc_maps 256x256", serial_ms, ms_of(t0), same});
    }

    { // batch gradient, default 32x32 two-channel net
        const NetSpec spec = NetSpec::two_channel_default(32);
        const NetworkParams params = init_params(spec, 4);
        Rng rng(5);
        std::vector<LabeledPair> batch;
        for (int i = 0; i < 32; ++i)
            batch.push_back({random_patch(32, rng), random_patch(32, rng), i % 2 == 0 ? 1 : -1});

        set_thread_count(1);
        auto t0 = clock_type::now();
        const auto serial = backward(spec, params, batch, LossKind::Hinge);
        const double serial_ms = ms_of(t0);

        set_thread_count(workers);
        t0 = clock_type::now();
        const auto parallel = backward(spec, params, batch, LossKind::Hinge);
        bool same = serial.second == parallel.second;
        for (std::size_t t = 0; t < serial.first.tensors.size(); ++t)
            same = same && serial.first.tensors[t] == parallel.first.tensors[t];
        rows.push_back({"backward batch=32 (32x32 net)", serial_ms, ms_of(t0), same});
    }

    { // candidate scoring
        const GrayImage img_a = random_image(256, 256, 6);
        const GrayImage img_b = random_image(256, 256, 7);
        const NetSpec spec = NetSpec::two_channel_default(32);
        const NetworkParams params = init_params(spec, 8);
        Rng rng(9);
        std::vector<Keypoint> kps_a, kps_b;
        for (int i = 0; i < 24; ++i) {
            kps_a.push_back({rng.range(20, 230), rng.range(20, 230), 1.0, KeypointKind::Corner});
            kps_b.push_back({rng.range(20, 230), rng.range(20, 230), 1.0, KeypointKind::Corner});
        }
        MatcherConfig cfg;
        cfg.patch_size = 32;

        set_thread_count(1);
        auto t0 = clock_type::now();
        const auto serial = score_candidates(img_a, img_b, kps_a, kps_b, spec, params, cfg);
        const double serial_ms = ms_of(t0);

        set_thread_count(workers);
        t0 = clock_type::now();
        const auto parallel = score_candidates(img_a, img_b, kps_a, kps_b, spec, params, cfg);
        bool same = serial.size() == parallel.size();
        for (std::size_t i = 0; same && i < serial.size(); ++i)
            same = serial[i].score == parallel[i].score;
        rows.push_back({"score_candidates 24x24 keypoints", serial_ms, ms_of(t0), same});
    }

    set_thread_count(0);
    print_rows(rows, workers);

    for (const auto& r : rows)
        if (!r.identical) return 1;
    return 0;
}
