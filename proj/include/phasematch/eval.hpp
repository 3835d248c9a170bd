#pragma once

#include <map>
#include <string>
#include <vector>

#include "phasematch/dataset.hpp"
#include "phasematch/matcher.hpp"
#include "phasematch/phase_congruency.hpp"

namespace phasematch {

struct PairMetrics {
    std::string pair_id;
    double precision = 0.0; // final matches within tolerance of ground truth
    bool no_matches = false;
    double recall_proxy = 0.0;   // inliers / keypoints detected on A
    double repeatability = -1.0; // -1 when keypoint files are unavailable
    int n_final = 0;
    int n_inliers = 0;
    double translation_err = -1.0; // |estimated - ground truth|, translation case
};

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
    double threshold = 0.0;
};

struct EvalReport {
    std::vector<PairMetrics> pairs;
    double median_precision = 0.0;
    double median_recall_proxy = 0.0;
    double median_repeatability = -1.0;
    double median_inliers = 0.0;
    std::vector<RocPoint> roc;
    double auc = -1.0; // -1 when no labeled manifest was scored
    std::map<std::string, double> runtimes_ms;
};

// Residual of one correspondence under the ground-truth transform
// (rotation about the A-image center).
double gt_residual(const Transform2D& gt, double ax, double ay, double bx, double by,
                   double center_x, double center_y);

// Precision/recall metrics of one match file against ground truth. The
// final matches are the consensus inliers when any exist, otherwise all
// accepted rows.
PairMetrics evaluate_pair(const MatchFile& mf, const Transform2D& gt, double tolerance,
                          double center_x, double center_y);

// Fraction of A keypoints with a B keypoint within `radius` px of their
// ground-truth mapped position.
double repeatability(const std::vector<Keypoint>& kps_a, const std::vector<Keypoint>& kps_b,
                     const Transform2D& gt, double radius, double center_x, double center_y);

// ROC curve over (score, label) pairs, swept over score thresholds, plus
// the rank-statistic AUC (ties count half).
std::vector<RocPoint> roc_points(const std::vector<std::pair<double, int>>& scored);
double roc_auc(const std::vector<std::pair<double, int>>& scored);

double median(std::vector<double> values);

void finalize_report(EvalReport& report);
void write_report_json(const EvalReport& report, const std::string& path);
void write_report_csv(const EvalReport& report, const std::string& path);

} // namespace phasematch
