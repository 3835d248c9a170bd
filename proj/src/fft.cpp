#include "phasematch/fft.hpp"

#include <cmath>
#include <map>

#include "phasematch/error.hpp"
#include "phasematch/parallel.hpp"

namespace phasematch {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Iterative radix-2 Cooley-Tukey, in place, n a power of two.
void fft_pow2(std::vector<cd>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
        const cd wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cd w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                cd u = a[i + k];
                cd v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        const double inv_n = 1.0 / static_cast<double>(n);
        for (cd& x : a) x *= inv_n;
    }
}

// Precomputed chirp tables for one Bluestein length/direction. Cached
// thread-locally: rows and columns of one image reuse the same plan, and
// per-thread copies avoid locking inside parallel regions.
struct BluesteinPlan {
    std::size_t m = 0;
    std::vector<cd> chirp;     // e^{sign*i*pi*k^2/n}
    std::vector<cd> chirp_fft; // FFT of the padded conjugate chirp
};

const BluesteinPlan& bluestein_plan(std::size_t n, bool inverse) {
    thread_local std::map<std::pair<std::size_t, bool>, BluesteinPlan> cache;
    auto& plan = cache[{n, inverse}];
    if (plan.m != 0) return plan;

    plan.m = next_pow2(2 * n - 1);
    const double sign = inverse ? 1.0 : -1.0;
    plan.chirp.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        // angle = sign * pi * k^2 / n, with k^2 reduced mod 2n to keep
        // the argument small for large k
        const std::size_t k2 = (k * k) % (2 * n);
        const double ang = sign * M_PI * static_cast<double>(k2) / static_cast<double>(n);
        plan.chirp[k] = cd(std::cos(ang), std::sin(ang));
    }
    plan.chirp_fft.assign(plan.m, cd(0.0, 0.0));
    plan.chirp_fft[0] = std::conj(plan.chirp[0]);
    for (std::size_t k = 1; k < n; ++k)
        plan.chirp_fft[k] = plan.chirp_fft[plan.m - k] = std::conj(plan.chirp[k]);
    fft_pow2(plan.chirp_fft, false);
    return plan;
}

// Bluestein's chirp-z transform for arbitrary n, built on a power-of-two
// convolution.
void fft_bluestein(std::vector<cd>& a, bool inverse) {
    const std::size_t n = a.size();
    const BluesteinPlan& plan = bluestein_plan(n, inverse);
    const std::size_t m = plan.m;

    std::vector<cd> x(m, cd(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * plan.chirp[k];

    fft_pow2(x, false);
    for (std::size_t i = 0; i < m; ++i) x[i] *= plan.chirp_fft[i];
    fft_pow2(x, true);

    for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * plan.chirp[k];
    if (inverse) {
        const double inv_n = 1.0 / static_cast<double>(n);
        for (cd& v : a) v *= inv_n;
    }
}

} // namespace

void fft(std::vector<cd>& data, bool inverse) {
    if (data.empty()) raise(Err::InvalidArgument, "fft of empty vector");
    if (data.size() == 1) return;
    if (is_pow2(data.size()))
        fft_pow2(data, inverse);
    else
        fft_bluestein(data, inverse);
}

void fft_2d(std::vector<cd>& data, int width, int height, bool inverse) {
    if (width < 1 || height < 1 ||
        data.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        raise(Err::DimensionMismatch, "fft_2d: buffer does not match width*height");

    const int nthreads = thread_count();

#pragma omp parallel for schedule(static) num_threads(nthreads)
    for (int y = 0; y < height; ++y) {
        std::vector<cd> row(data.begin() + static_cast<std::size_t>(y) * width,
                            data.begin() + static_cast<std::size_t>(y + 1) * width);
        fft(row, inverse);
        std::copy(row.begin(), row.end(), data.begin() + static_cast<std::size_t>(y) * width);
    }

#pragma omp parallel for schedule(static) num_threads(nthreads)
    for (int x = 0; x < width; ++x) {
        std::vector<cd> col(static_cast<std::size_t>(height));
        for (int y = 0; y < height; ++y) col[y] = data[static_cast<std::size_t>(y) * width + x];
        fft(col, inverse);
        for (int y = 0; y < height; ++y) data[static_cast<std::size_t>(y) * width + x] = col[y];
    }
}

namespace reference {

std::vector<cd> naive_dft(const std::vector<cd>& data, bool inverse) {
    const std::size_t n = data.size();
    const double sign = inverse ? 2.0 : -2.0;
    std::vector<cd> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cd acc(0.0, 0.0);
        for (std::size_t t = 0; t < n; ++t) {
            const double ang = sign * M_PI * static_cast<double>(k * t) / static_cast<double>(n);
            acc += data[t] * cd(std::cos(ang), std::sin(ang));
        }
        out[k] = inverse ? acc / static_cast<double>(n) : acc;
    }
    return out;
}

} // namespace reference

} // namespace phasematch
