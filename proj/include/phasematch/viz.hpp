#pragma once

#include "phasematch/image.hpp"
#include "phasematch/matcher.hpp"

namespace phasematch {

// A and B side by side on one canvas of (width_a + width_b) x
// max(height_a, height_b), with a white segment per inlier match.
GrayImage render_matches(const GrayImage& img_a, const GrayImage& img_b,
                         const std::vector<Keypoint>& kps_a, const std::vector<Keypoint>& kps_b,
                         const MatchResult& result);

void draw_line(GrayImage& img, int x0, int y0, int x1, int y1, double value);

} // namespace phasematch
