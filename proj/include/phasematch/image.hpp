#pragma once

#include <string>
#include <vector>

namespace phasematch {

// Single-channel raster, row-major, intensities in [0,1]. 8-bit
// quantization happens only at the file boundary.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return pixels.size(); }
};

// Square window cut from an image, remembering where it came from.
struct Patch {
    int size = 0;
    int cx = 0;
    int cy = 0;
    std::vector<double> pixels;

    double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * size + x]; }
    double& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * size + x]; }
};

// PGM I/O. P5 (binary) and P2 (ASCII) with maxval <= 65535 are accepted;
// stored values are mapped linearly onto [0,1]. save_gray quantizes to
// 8-bit P5 (or P2 when ascii is set).
GrayImage load_gray(const std::string& path);
void save_gray(const GrayImage& img, const std::string& path, bool ascii = false);

// Window centered at (cx,cy) covering [c - size/2, c + size/2 - 1] on both
// axes. The window must lie fully inside the image: callers reject
// keypoints near the border instead of padding with fabricated data.
Patch extract_patch(const GrayImage& img, int cx, int cy, int size);

// Zero-mean / unit-variance remap, sigma clamped at 1e-6 so constant
// patches map to all zeros.
Patch standardize(const Patch& patch);

// Patch as a stand-alone raster, e.g. for debugging dumps via save_gray.
GrayImage patch_to_image(const Patch& patch);

} // namespace phasematch
