#include "phasematch/phase_congruency.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "phasematch/error.hpp"
#include "phasematch/fft.hpp"
#include "phasematch/parallel.hpp"

namespace phasematch {

namespace {

constexpr double kAmpEpsilon = 1e-3;   // amplitude-sum guard, in unit-sigma image units
constexpr double kFlatSigma = 1e-9;    // below this the input is treated as featureless
constexpr double kSpreadCutoff = 0.4;  // minimum fractional scale spread of a real feature
constexpr double kSpreadGain = 10.0;

// Standardizes a pixel buffer to zero mean / unit sigma. A flat input maps
// to exact zeros so that downstream FFTs carry no round-off energy.
std::vector<double> standardize_signal(const std::vector<double>& data) {
    const std::size_t n = data.size();
    double mean = 0.0;
    for (double v : data) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : data) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    const double sigma = std::sqrt(var);

    std::vector<double> out(n, 0.0);
    if (sigma < kFlatSigma) return out;
    for (std::size_t i = 0; i < n; ++i) out[i] = (data[i] - mean) / sigma;
    return out;
}

double median_of(std::vector<double> v) {
    const std::size_t n = v.size();
    auto mid = v.begin() + n / 2;
    std::nth_element(v.begin(), mid, v.end());
    if (n % 2 == 1) return *mid;
    double hi = *mid;
    double lo = *std::max_element(v.begin(), mid);
    return 0.5 * (lo + hi);
}

// Rayleigh-model noise threshold from the median of the smallest-scale
// amplitude, extrapolated over the scale geometric series.
double noise_threshold(const std::vector<double>& smallest_scale_amp, const BankParams& p) {
    const double tau = median_of(smallest_scale_amp) / std::sqrt(std::log(4.0));
    const double inv_mult = 1.0 / p.scale_mult;
    const double total_tau =
        tau * (1.0 - std::pow(inv_mult, p.n_scales)) / (1.0 - inv_mult);
    const double noise_mean = total_tau * std::sqrt(M_PI / 2.0);
    const double noise_sigma = total_tau * std::sqrt((4.0 - M_PI) / 2.0);
    return noise_mean + p.noise_k * noise_sigma;
}

void validate_bank_params(const BankParams& p) {
    if (p.n_scales < 2 || p.n_orientations < 3 || p.min_wavelength < 2.0 ||
        p.scale_mult <= 1.0 || p.sigma_ratio <= 0.0 || p.sigma_ratio >= 1.0)
        raise(Err::InvalidBankParams,
              "bank needs n_scales >= 2, n_orientations >= 3, min_wavelength >= 2, "
              "scale_mult > 1, sigma_ratio in (0,1)");
}

double log_gabor_radial(double f, double f0, double sigma_ratio) {
    if (f <= 0.0) return 0.0;
    const double num = std::log(f / f0);
    const double den = std::log(sigma_ratio);
    double g = std::exp(-(num * num) / (2.0 * den * den));
    // high-order low-pass keeps the spectrum corners out of the smallest scales
    g /= 1.0 + std::pow(f / 0.45, 30.0);
    return g;
}

} // namespace

double eval_pc_point(const FourierComponentSet& comps) {
    if (comps.components.empty())
        raise(Err::InvalidArgument, "component set must be non-empty");
    double re = 0.0, im = 0.0, amp = 0.0;
    for (const auto& c : comps.components) {
        if (!(c.amplitude >= 0.0) || !std::isfinite(c.amplitude) || !std::isfinite(c.phase))
            raise(Err::InvalidArgument, "amplitudes must be finite and non-negative");
        re += c.amplitude * std::cos(c.phase);
        im += c.amplitude * std::sin(c.phase);
        amp += c.amplitude;
    }
    return std::sqrt(re * re + im * im) / (amp + 1e-12);
}

std::vector<double> synth_signal(const SyntheticSignalSpec& spec, const std::vector<double>& t) {
    if (spec.f0 <= 0.0 || spec.amplitudes.empty())
        raise(Err::InvalidArgument, "signal spec needs f0 > 0 and at least one amplitude");
    std::vector<double> out(t.size(), 0.0);
    for (std::size_t i = 0; i < t.size(); ++i) {
        double acc = 0.0;
        for (std::size_t n = 0; n < spec.amplitudes.size(); ++n) {
            const double phase =
                2.0 * M_PI * static_cast<double>(n + 1) * spec.f0 * t[i] + spec.phase0;
            acc += spec.amplitudes[n] * std::sin(phase);
        }
        out[i] = acc;
    }
    return out;
}

LogGaborBank build_bank(const BankParams& params, int width, int height) {
    validate_bank_params(params);
    if (width < 32 || height < 32)
        raise(Err::InvalidBankParams, "bank dims must be at least 32x32");

    LogGaborBank bank;
    bank.params = params;
    bank.width = width;
    bank.height = height;
    bank.filters.assign(
        static_cast<std::size_t>(params.n_scales) * params.n_orientations,
        std::vector<double>(static_cast<std::size_t>(width) * height, 0.0));

    const double theta_sigma = (M_PI / params.n_orientations) / params.angle_sigma_ratio;
    const int nthreads = thread_count();
    const int total = params.n_scales * params.n_orientations;

#pragma omp parallel for schedule(static) num_threads(nthreads)
    for (int idx = 0; idx < total; ++idx) {
        const int s = idx / params.n_orientations;
        const int o = idx % params.n_orientations;
        const double wavelength = params.min_wavelength * std::pow(params.scale_mult, s);
        const double f0 = 1.0 / wavelength;
        const double theta0 = o * M_PI / params.n_orientations;
        const double c0 = std::cos(theta0), s0 = std::sin(theta0);
        auto& gain = bank.filters[static_cast<std::size_t>(idx)];

        for (int v = 0; v < height; ++v) {
            const double fy = (v <= height / 2 ? v : v - height) / static_cast<double>(height);
            for (int u = 0; u < width; ++u) {
                const double fx = (u <= width / 2 ? u : u - width) / static_cast<double>(width);
                const double f = std::sqrt(fx * fx + fy * fy);
                if (f <= 0.0) continue; // DC stays 0
                const double radial = log_gabor_radial(f, f0, params.sigma_ratio);
                // wrapped angular distance; the Gaussian spread keeps the
                // filter one-sided, giving a quadrature pair
                const double ang = std::atan2(-fy, fx);
                const double ds = std::sin(ang) * c0 - std::cos(ang) * s0;
                const double dc = std::cos(ang) * c0 + std::sin(ang) * s0;
                const double dtheta = std::abs(std::atan2(ds, dc));
                const double spread = std::exp(-(dtheta * dtheta) / (2.0 * theta_sigma * theta_sigma));
                gain[static_cast<std::size_t>(v) * width + u] = radial * spread;
            }
        }
    }
    return bank;
}

PCMaps compute_pc_maps(const GrayImage& img, const LogGaborBank& bank, bool noise_comp) {
    if (img.width != bank.width || img.height != bank.height)
        raise(Err::DimensionMismatch, "image dims do not match bank dims");

    const int w = img.width, h = img.height;
    const std::size_t n = static_cast<std::size_t>(w) * h;
    const BankParams& p = bank.params;

    const std::vector<double> norm = standardize_signal(img.pixels);
    std::vector<cd> spectrum(n);
    for (std::size_t i = 0; i < n; ++i) spectrum[i] = cd(norm[i], 0.0);
    fft_2d(spectrum, w, h, false);

    PCMaps maps;
    maps.width = w;
    maps.height = h;
    maps.n_orientations = p.n_orientations;
    maps.per_orientation.assign(p.n_orientations, std::vector<double>(n, 0.0));
    maps.max_moment.assign(n, 0.0);
    maps.min_moment.assign(n, 0.0);

    const int nthreads = thread_count();

    // Orientations are independent; inside one orientation the scales are
    // accumulated in fixed order, so the output does not depend on the
    // worker count.
#pragma omp parallel for schedule(static) num_threads(nthreads)
    for (int o = 0; o < p.n_orientations; ++o) {
        std::vector<double> sum_even(n, 0.0), sum_odd(n, 0.0), sum_amp(n, 0.0), max_amp(n, 0.0);
        std::vector<std::vector<double>> even_by_scale(static_cast<std::size_t>(p.n_scales)),
            odd_by_scale(static_cast<std::size_t>(p.n_scales));
        std::vector<cd> response(n);

        for (int s = 0; s < p.n_scales; ++s) {
            const auto& gain = bank.filter(s, o);
            for (std::size_t i = 0; i < n; ++i) response[i] = spectrum[i] * gain[i];
            fft_2d(response, w, h, true);
            auto& evens = even_by_scale[static_cast<std::size_t>(s)];
            auto& odds = odd_by_scale[static_cast<std::size_t>(s)];
            evens.resize(n);
            odds.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double e = response[i].real();
                const double od = response[i].imag();
                const double amp = std::sqrt(e * e + od * od);
                evens[i] = e;
                odds[i] = od;
                sum_even[i] += e;
                sum_odd[i] += od;
                sum_amp[i] += amp;
                max_amp[i] = std::max(max_amp[i], amp);
            }
        }
        const std::vector<double>& smallest_even = even_by_scale[0];
        const std::vector<double>& smallest_odd = odd_by_scale[0];

        double T = 0.0;
        if (noise_comp) {
            std::vector<double> smallest_amp(n);
            for (std::size_t i = 0; i < n; ++i)
                smallest_amp[i] =
                    std::sqrt(smallest_even[i] * smallest_even[i] + smallest_odd[i] * smallest_odd[i]);
            T = noise_threshold(smallest_amp, p);
        }

        // phase-deviation energy against the amplitude-weighted mean
        // phasor: cos term minus |sin| term per scale. Sharper peaks than
        // the plain phasor-sum magnitude, which matters for localization.
        auto& pc = maps.per_orientation[o];
        for (std::size_t i = 0; i < n; ++i) {
            const double xenergy =
                std::sqrt(sum_even[i] * sum_even[i] + sum_odd[i] * sum_odd[i]) + 1e-12;
            const double mean_e = sum_even[i] / xenergy;
            const double mean_o = sum_odd[i] / xenergy;
            double energy = 0.0;
            for (int s = 0; s < p.n_scales; ++s) {
                const double e = even_by_scale[static_cast<std::size_t>(s)][i];
                const double od = odd_by_scale[static_cast<std::size_t>(s)][i];
                energy += e * mean_e + od * mean_o - std::abs(e * mean_o - od * mean_e);
            }
            energy = std::max(energy - T, 0.0);
            // frequency-spread weighting: responses confined to a single
            // scale (distant coherent tails) are not real features
            const double spread =
                sum_amp[i] / ((max_amp[i] + kAmpEpsilon) * static_cast<double>(p.n_scales));
            const double weight = 1.0 / (1.0 + std::exp(kSpreadGain * (kSpreadCutoff - spread)));
            pc[i] = weight * energy / (sum_amp[i] + kAmpEpsilon);
        }
    }

#pragma omp parallel for schedule(static) num_threads(nthreads)
    for (int row = 0; row < h; ++row) {
        for (int col = 0; col < w; ++col) {
            const std::size_t i = static_cast<std::size_t>(row) * w + col;
            double a = 0.0, b = 0.0, c = 0.0;
            for (int o = 0; o < p.n_orientations; ++o) {
                const double theta = o * M_PI / p.n_orientations;
                const double pcv = maps.per_orientation[o][i];
                const double pc_cos = pcv * std::cos(theta);
                const double pc_sin = pcv * std::sin(theta);
                a += pc_cos * pc_cos;
                b += 2.0 * pc_cos * pc_sin;
                c += pc_sin * pc_sin;
            }
            const double root = std::sqrt(b * b + (a - c) * (a - c));
            maps.max_moment[i] = 0.5 * (c + a + root);
            maps.min_moment[i] = 0.5 * (c + a - root);
        }
    }
    return maps;
}

std::vector<double> pc_profile_1d(const std::vector<double>& signal, const BankParams& params) {
    if (signal.size() < 64) raise(Err::SignalTooShort, "pc_profile_1d needs >= 64 samples");
    if (params.n_scales < 2 || params.min_wavelength < 2.0 || params.scale_mult <= 1.0 ||
        params.sigma_ratio <= 0.0 || params.sigma_ratio >= 1.0)
        raise(Err::InvalidBankParams, "bad 1-D bank params");

    const std::size_t nsig = signal.size();
    const std::vector<double> norm = standardize_signal(signal);

    // pad both ends with half-cosine ramps onto the (zero) mean: the
    // periodic wrap stays smooth and, unlike mirroring, no copy of the
    // boundary-adjacent structure is created next to the retained range
    const std::size_t margin = 96;
    const std::size_t next = nsig + 2 * margin;
    std::vector<cd> spectrum(next, cd(0.0, 0.0));
    for (std::size_t i = 0; i < nsig; ++i) spectrum[margin + i] = cd(norm[i], 0.0);
    for (std::size_t i = 0; i < margin; ++i) {
        const double t = static_cast<double>(i + 1) / static_cast<double>(margin + 1);
        const double blend = 0.5 * (1.0 - std::cos(M_PI * t));
        spectrum[margin - 1 - i] = cd(norm.front() * (1.0 - blend), 0.0);
        spectrum[margin + nsig + i] = cd(norm.back() * (1.0 - blend), 0.0);
    }
    fft(spectrum, false);

    std::vector<double> sum_even(next, 0.0), sum_odd(next, 0.0), sum_amp(next, 0.0);
    std::vector<cd> response(next);
    for (int s = 0; s < params.n_scales; ++s) {
        const double wavelength = params.min_wavelength * std::pow(params.scale_mult, s);
        const double f0 = 1.0 / wavelength;
        for (std::size_t k = 0; k < next; ++k) {
            // one-sided gain: positive frequencies only, so the inverse
            // transform is the analytic (even + i*odd) response
            double g = 0.0;
            if (k >= 1 && k < next / 2) {
                const double f = static_cast<double>(k) / static_cast<double>(next);
                g = log_gabor_radial(f, f0, params.sigma_ratio);
            }
            response[k] = spectrum[k] * g;
        }
        fft(response, true);
        for (std::size_t i = 0; i < next; ++i) {
            const double e = response[i].real();
            const double od = response[i].imag();
            sum_even[i] += e;
            sum_odd[i] += od;
            sum_amp[i] += std::sqrt(e * e + od * od);
        }
    }

    std::vector<double> pc(nsig, 0.0);
    for (std::size_t i = 0; i < nsig; ++i) {
        const std::size_t j = margin + i;
        const double energy = std::sqrt(sum_even[j] * sum_even[j] + sum_odd[j] * sum_odd[j]);
        pc[i] = energy / (sum_amp[j] + kAmpEpsilon);
    }
    return pc;
}

double auto_threshold(const std::vector<double>& map) {
    double mean = 0.0;
    for (double v : map) mean += v;
    mean /= static_cast<double>(map.size());
    double var = 0.0;
    for (double v : map) var += (v - mean) * (v - mean);
    var /= static_cast<double>(map.size());
    return mean + std::sqrt(var);
}

namespace {

void detect_on_map(const std::vector<double>& map, int w, int h, const DetectConfig& cfg,
                   double threshold, KeypointKind kind, std::vector<Keypoint>& out) {
    const int r = cfg.nms_radius;
    const int lo_x = std::max(cfg.border, 0), hi_x = w - std::max(cfg.border, 0);
    const int lo_y = std::max(cfg.border, 0), hi_y = h - std::max(cfg.border, 0);
    for (int y = lo_y; y < hi_y; ++y) {
        for (int x = lo_x; x < hi_x; ++x) {
            const double v = map[static_cast<std::size_t>(y) * w + x];
            if (v < threshold) continue;
            bool is_max = true;
            for (int dy = -r; dy <= r && is_max; ++dy) {
                const int yy = y + dy;
                if (yy < 0 || yy >= h) continue;
                for (int dx = -r; dx <= r; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int xx = x + dx;
                    if (xx < 0 || xx >= w) continue;
                    if (map[static_cast<std::size_t>(yy) * w + xx] >= v) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max) out.push_back({x, y, v, kind});
        }
    }
}

void sort_keypoints(std::vector<Keypoint>& kps) {
    std::sort(kps.begin(), kps.end(), [](const Keypoint& a, const Keypoint& b) {
        if (a.strength != b.strength) return a.strength > b.strength;
        if (a.y != b.y) return a.y < b.y;
        if (a.x != b.x) return a.x < b.x;
        return a.kind < b.kind;
    });
}

} // namespace

std::vector<Keypoint> detect_keypoints(const PCMaps& maps, const DetectConfig& cfg) {
    if (cfg.nms_radius < 1) raise(Err::InvalidArgument, "nms_radius must be >= 1");

    std::vector<Keypoint> kps;
    if (cfg.corners) {
        const double t = cfg.threshold >= 0.0 ? cfg.threshold : auto_threshold(maps.min_moment);
        detect_on_map(maps.min_moment, maps.width, maps.height, cfg, t, KeypointKind::Corner, kps);
    }
    if (cfg.edges) {
        const double t = cfg.threshold >= 0.0 ? cfg.threshold : auto_threshold(maps.max_moment);
        detect_on_map(maps.max_moment, maps.width, maps.height, cfg, t, KeypointKind::Edge, kps);
    }
    sort_keypoints(kps);
    if (cfg.max_count >= 0 && kps.size() > static_cast<std::size_t>(cfg.max_count))
        kps.resize(static_cast<std::size_t>(cfg.max_count));
    return kps;
}

void save_keypoints(const std::vector<Keypoint>& kps, const std::string& path) {
    std::ofstream out(path);
    if (!out) raise(Err::IoFailure, "cannot write: " + path);
    out << "# x y strength kind\n";
    char buf[128];
    for (const auto& k : kps) {
        std::snprintf(buf, sizeof(buf), "%d %d %.9g %s\n", k.x, k.y, k.strength,
                      k.kind == KeypointKind::Corner ? "corner" : "edge");
        out << buf;
    }
    if (!out) raise(Err::IoFailure, "write failed: " + path);
}

std::vector<Keypoint> load_keypoints(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Err::FileNotFound, "no such file: " + path);
    std::vector<Keypoint> kps;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        Keypoint k;
        std::string kind;
        if (!(ss >> k.x >> k.y >> k.strength >> kind))
            raise(Err::CorruptHeader, "bad keypoint line in " + path);
        k.kind = kind == "edge" ? KeypointKind::Edge : KeypointKind::Corner;
        kps.push_back(k);
    }
    return kps;
}

GrayImage map_to_image(const std::vector<double>& map, int width, int height) {
    GrayImage img(width, height);
    double lo = std::numeric_limits<double>::max();
    double hi = std::numeric_limits<double>::lowest();
    for (double v : map) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi - lo;
    for (std::size_t i = 0; i < map.size(); ++i)
        img.pixels[i] = span > 0.0 ? (map[i] - lo) / span : 0.0;
    return img;
}

namespace reference {

std::vector<Keypoint> nms_exhaustive(const std::vector<double>& map, int width, int height,
                                     int radius, double threshold, int border,
                                     KeypointKind kind) {
    std::vector<Keypoint> out;
    for (int y = border; y < height - border; ++y) {
        for (int x = border; x < width - border; ++x) {
            const double v = map[static_cast<std::size_t>(y) * width + x];
            if (v < threshold) continue;
            bool is_max = true;
            for (int yy = 0; yy < height && is_max; ++yy) {
                for (int xx = 0; xx < width; ++xx) {
                    if (xx == x && yy == y) continue;
                    if (std::max(std::abs(xx - x), std::abs(yy - y)) > radius) continue;
                    if (map[static_cast<std::size_t>(yy) * width + xx] >= v) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max) out.push_back({x, y, v, kind});
        }
    }
    sort_keypoints(out);
    return out;
}

} // namespace reference

} // namespace phasematch
