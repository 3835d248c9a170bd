#pragma once

#include <string>
#include <vector>

#include "phasematch/image.hpp"

namespace phasematch {

// One Fourier term: amplitude A_n and phase angle phi_n at a point.
struct FourierComponent {
    double amplitude = 0.0;
    double phase = 0.0;
};

struct FourierComponentSet {
    std::vector<FourierComponent> components;
};

// Closed form of the phase-congruency maximum over the mean phase angle:
// |sum_n A_n e^{i phi_n}| / (sum_n A_n + 1e-12). Returns a value in [0,1];
// 1 means all components perfectly in phase.
double eval_pc_point(const FourierComponentSet& comps);

// Harmonic series f(t) = sum_{n=1..N} A_n sin(2 pi n f0 t + phase0).
struct SyntheticSignalSpec {
    double f0 = 1.0;
    double phase0 = 0.0;
    std::vector<double> amplitudes; // A_1 .. A_N
};

std::vector<double> synth_signal(const SyntheticSignalSpec& spec, const std::vector<double>& t);

// Log-Gabor bank parameters. Defaults follow the RIFT lineage.
struct BankParams {
    int n_scales = 4;
    int n_orientations = 6;
    double min_wavelength = 3.0;
    double scale_mult = 2.1;
    double sigma_ratio = 0.55;     // radial bandwidth on the log-frequency axis
    double angle_sigma_ratio = 1.3; // angular sigma = (pi/n_orient) / this
    double noise_k = 2.0;           // noise floor = mean + k*sigma of estimated noise energy
};

// Frequency-domain gains, one per (scale, orientation), DC bin exactly 0.
struct LogGaborBank {
    BankParams params;
    int width = 0;
    int height = 0;
    // filters[s * n_orientations + o], each width*height, row-major
    std::vector<std::vector<double>> filters;

    const std::vector<double>& filter(int scale, int orient) const {
        return filters[static_cast<std::size_t>(scale) * params.n_orientations + orient];
    }
};

LogGaborBank build_bank(const BankParams& params, int width, int height);

// Per-orientation phase congruency plus the RIFT-style moment maps.
struct PCMaps {
    int width = 0;
    int height = 0;
    int n_orientations = 0;
    std::vector<std::vector<double>> per_orientation; // each width*height, values in [0,1]
    std::vector<double> max_moment;                   // M
    std::vector<double> min_moment;                   // m
};

// Phase congruency per orientation from even/odd quadrature energy summed
// over scales, normalized by total amplitude. The image is standardized
// (zero mean, unit sigma) first, which makes the result invariant to
// affine intensity maps a*I + b up to floating-point noise. With
// noise_comp set, a noise floor estimated from the smallest-scale
// amplitude median is subtracted from the energy (floored at 0).
PCMaps compute_pc_maps(const GrayImage& img, const LogGaborBank& bank, bool noise_comp = true);

// 1-D phase congruency profile over a signal (length >= 64), via a 1-D
// log-Gabor bank on the mirror-extended signal. Values in [0,1].
std::vector<double> pc_profile_1d(const std::vector<double>& signal, const BankParams& params);

enum class KeypointKind { Corner, Edge };

struct Keypoint {
    int x = 0;
    int y = 0;
    double strength = 0.0;
    KeypointKind kind = KeypointKind::Corner;
};

struct DetectConfig {
    int nms_radius = 5;
    double threshold = -1.0; // < 0: auto (mean + stddev of the moment map)
    int max_count = 500;
    int border = 17;         // must cover the downstream patch half-size
    bool corners = true;     // detect on the min-moment map
    bool edges = false;      // detect on the max-moment map
};

// Strict local maxima of the selected moment map(s) within the NMS radius
// (Chebyshev), at least `border` px from every image edge, strength >=
// threshold, sorted by descending strength and truncated to max_count.
std::vector<Keypoint> detect_keypoints(const PCMaps& maps, const DetectConfig& cfg);

double auto_threshold(const std::vector<double>& map);

// Text export: one `x y strength kind` line per keypoint.
void save_keypoints(const std::vector<Keypoint>& kps, const std::string& path);
std::vector<Keypoint> load_keypoints(const std::string& path);

// Linear rescale of an arbitrary map onto [0,1] for raster export.
GrayImage map_to_image(const std::vector<double>& map, int width, int height);

namespace reference {

// Exhaustive NMS over the whole map, no shortcuts. Serial oracle for
// detect_keypoints.
std::vector<Keypoint> nms_exhaustive(const std::vector<double>& map, int width, int height,
                                     int radius, double threshold, int border,
                                     KeypointKind kind);

} // namespace reference

} // namespace phasematch
