#include "phasematch/viz.hpp"

#include <cmath>
#include <cstdlib>

namespace phasematch {

void draw_line(GrayImage& img, int x0, int y0, int x1, int y1, double value) {
    int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
        if (x0 >= 0 && x0 < img.width && y0 >= 0 && y0 < img.height) img.at(x0, y0) = value;
        if (x0 == x1 && y0 == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

GrayImage render_matches(const GrayImage& img_a, const GrayImage& img_b,
                         const std::vector<Keypoint>& kps_a, const std::vector<Keypoint>& kps_b,
                         const MatchResult& result) {
    GrayImage canvas(img_a.width + img_b.width, std::max(img_a.height, img_b.height));
    for (int y = 0; y < img_a.height; ++y)
        for (int x = 0; x < img_a.width; ++x) canvas.at(x, y) = img_a.at(x, y);
    for (int y = 0; y < img_b.height; ++y)
        for (int x = 0; x < img_b.width; ++x) canvas.at(img_a.width + x, y) = img_b.at(x, y);

    for (const auto& m : result.accepted) {
        if (!m.inlier) continue;
        const Keypoint& ka = kps_a[static_cast<std::size_t>(m.ia)];
        const Keypoint& kb = kps_b[static_cast<std::size_t>(m.ib)];
        draw_line(canvas, ka.x, ka.y, img_a.width + kb.x, kb.y, 1.0);
    }
    return canvas;
}

} // namespace phasematch
