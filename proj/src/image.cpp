#include "phasematch/image.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "phasematch/error.hpp"

namespace phasematch {

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
    std::string tok;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c)) {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    return tok;
}

long parse_dim(const std::string& tok, const std::string& path) {
    if (tok.empty()) raise(Err::CorruptHeader, "truncated PGM header: " + path);
    for (char c : tok) {
        if (!std::isdigit(static_cast<unsigned char>(c)))
            raise(Err::CorruptHeader, "bad PGM header field '" + tok + "': " + path);
    }
    return std::stol(tok);
}

} // namespace

GrayImage load_gray(const std::string& path) {
    if (!std::filesystem::exists(path))
        raise(Err::FileNotFound, "no such file: " + path);

    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Err::IoFailure, "cannot open: " + path);

    std::string magic = next_token(in);
    if (magic != "P5" && magic != "P2")
        raise(Err::UnsupportedFormat, "not an 8/16-bit grayscale PGM (P2/P5): " + path);

    long w = parse_dim(next_token(in), path);
    long h = parse_dim(next_token(in), path);
    long maxval = parse_dim(next_token(in), path);
    if (w < 1 || h < 1 || maxval < 1 || maxval > 65535)
        raise(Err::CorruptHeader, "bad PGM dimensions/maxval: " + path);

    GrayImage img(static_cast<int>(w), static_cast<int>(h));
    const std::size_t n = img.size();
    const double scale = 1.0 / static_cast<double>(maxval);

    if (magic == "P5") {
        const int bytes = maxval > 255 ? 2 : 1;
        std::vector<unsigned char> raw(n * bytes);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (static_cast<std::size_t>(in.gcount()) != raw.size())
            raise(Err::CorruptHeader, "PGM pixel data truncated: " + path);
        for (std::size_t i = 0; i < n; ++i) {
            long v = bytes == 1 ? raw[i] : (raw[2 * i] << 8 | raw[2 * i + 1]);
            img.pixels[i] = static_cast<double>(v) * scale;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            long v = parse_dim(next_token(in), path);
            if (v > maxval) raise(Err::CorruptHeader, "PGM sample above maxval: " + path);
            img.pixels[i] = static_cast<double>(v) * scale;
        }
    }
    return img;
}

void save_gray(const GrayImage& img, const std::string& path, bool ascii) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Err::IoFailure, "cannot write: " + path);

    auto quantize = [](double v) {
        double c = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
        return static_cast<int>(std::lround(c * 255.0));
    };

    out << (ascii ? "P2" : "P5") << "\n" << img.width << " " << img.height << "\n255\n";
    if (ascii) {
        for (int y = 0; y < img.height; ++y) {
            for (int x = 0; x < img.width; ++x)
                out << quantize(img.at(x, y)) << (x + 1 == img.width ? '\n' : ' ');
        }
    } else {
        std::vector<unsigned char> raw(img.size());
        for (std::size_t i = 0; i < img.size(); ++i)
            raw[i] = static_cast<unsigned char>(quantize(img.pixels[i]));
        out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    }
    if (!out) raise(Err::IoFailure, "write failed: " + path);
}

Patch extract_patch(const GrayImage& img, int cx, int cy, int size) {
    if (size < 8 || size % 2 != 0)
        raise(Err::InvalidArgument, "patch size must be even and >= 8");
    const int half = size / 2;
    const int x0 = cx - half;
    const int y0 = cy - half;
    if (x0 < 0 || y0 < 0 || x0 + size > img.width || y0 + size > img.height)
        raise(Err::OutOfBounds, "patch window crosses the image edge");

    Patch p;
    p.size = size;
    p.cx = cx;
    p.cy = cy;
    p.pixels.resize(static_cast<std::size_t>(size) * size);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
            p.pixels[static_cast<std::size_t>(y) * size + x] = img.at(x0 + x, y0 + y);
    return p;
}

GrayImage patch_to_image(const Patch& patch) {
    GrayImage img(patch.size, patch.size);
    img.pixels = patch.pixels;
    return img;
}

Patch standardize(const Patch& patch) {
    const std::size_t n = patch.pixels.size();
    double mean = 0.0;
    for (double v : patch.pixels) mean += v;
    mean /= static_cast<double>(n);

    double var = 0.0;
    for (double v : patch.pixels) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    const double sigma = std::sqrt(var);

    Patch out = patch;
    if (sigma < 1e-12) {
        // constant up to rounding: the deviations are noise, not signal
        for (double& v : out.pixels) v = 0.0;
        return out;
    }
    const double denom = std::max(sigma, 1e-6);
    for (double& v : out.pixels) v = (v - mean) / denom;
    return out;
}

} // namespace phasematch
