#include "phasematch/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "phasematch/error.hpp"

namespace phasematch {

double gt_residual(const Transform2D& gt, double ax, double ay, double bx, double by,
                   double center_x, double center_y) {
    double px, py;
    gt.apply(ax, ay, center_x, center_y, px, py);
    return std::hypot(px - bx, py - by);
}

PairMetrics evaluate_pair(const MatchFile& mf, const Transform2D& gt, double tolerance,
                          double center_x, double center_y) {
    PairMetrics pm;
    pm.n_inliers = mf.n_inliers;

    std::vector<const MatchFile::Row*> final_rows;
    for (const auto& row : mf.rows)
        if (mf.n_inliers == 0 || row.inlier) final_rows.push_back(&row);

    pm.n_final = static_cast<int>(final_rows.size());
    if (final_rows.empty()) {
        pm.no_matches = true;
        pm.precision = 0.0;
    } else {
        int good = 0;
        for (const auto* row : final_rows)
            if (gt_residual(gt, row->ax, row->ay, row->bx, row->by, center_x, center_y) <=
                tolerance)
                ++good;
        pm.precision = static_cast<double>(good) / static_cast<double>(final_rows.size());
    }

    if (mf.n_kps_a > 0)
        pm.recall_proxy = static_cast<double>(mf.n_inliers) / static_cast<double>(mf.n_kps_a);

    if (gt.theta == 0.0 && gt.scale == 1.0)
        pm.translation_err = std::hypot(mf.transform.dx - gt.dx, mf.transform.dy - gt.dy);
    return pm;
}

double repeatability(const std::vector<Keypoint>& kps_a, const std::vector<Keypoint>& kps_b,
                     const Transform2D& gt, double radius, double center_x, double center_y) {
    if (kps_a.empty()) return 0.0;
    int hit = 0;
    for (const auto& ka : kps_a) {
        double px, py;
        gt.apply(ka.x, ka.y, center_x, center_y, px, py);
        for (const auto& kb : kps_b) {
            if (std::hypot(px - kb.x, py - kb.y) <= radius) {
                ++hit;
                break;
            }
        }
    }
    return static_cast<double>(hit) / static_cast<double>(kps_a.size());
}

std::vector<RocPoint> roc_points(const std::vector<std::pair<double, int>>& scored) {
    std::size_t n_pos = 0, n_neg = 0;
    for (const auto& [s, label] : scored) (label > 0 ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0)
        raise(Err::InvalidArgument, "ROC needs both positive and negative labels");

    std::vector<std::pair<double, int>> sorted = scored;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });

    std::vector<RocPoint> points;
    points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        // advance over a tie block so the curve is threshold-consistent
        const double s = sorted[i].first;
        while (i < sorted.size() && sorted[i].first == s) {
            (sorted[i].second > 0 ? tp : fp)++;
            ++i;
        }
        points.push_back({static_cast<double>(fp) / static_cast<double>(n_neg),
                          static_cast<double>(tp) / static_cast<double>(n_pos), s});
    }
    return points;
}

double roc_auc(const std::vector<std::pair<double, int>>& scored) {
    // Mann-Whitney statistic: P(score_pos > score_neg) + 0.5 P(equal)
    std::size_t n_pos = 0, n_neg = 0;
    for (const auto& [s, label] : scored) (label > 0 ? n_pos : n_neg)++;
    if (n_pos == 0 || n_neg == 0)
        raise(Err::InvalidArgument, "AUC needs both positive and negative labels");

    std::vector<std::pair<double, int>> sorted = scored;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    double wins = 0.0;
    std::size_t i = 0;
    std::size_t neg_below = 0;
    while (i < sorted.size()) {
        const double s = sorted[i].first;
        std::size_t tie_pos = 0, tie_neg = 0;
        while (i < sorted.size() && sorted[i].first == s) {
            (sorted[i].second > 0 ? tie_pos : tie_neg)++;
            ++i;
        }
        wins += static_cast<double>(tie_pos) *
                (static_cast<double>(neg_below) + 0.5 * static_cast<double>(tie_neg));
        neg_below += tie_neg;
    }
    return wins / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    if (values.size() % 2 == 1) return values[mid];
    const double hi = values[mid];
    const double lo = *std::max_element(values.begin(), values.begin() + mid);
    return 0.5 * (lo + hi);
}

void finalize_report(EvalReport& report) {
    std::vector<double> prec, recall, rep, inl;
    for (const auto& pm : report.pairs) {
        prec.push_back(pm.precision);
        recall.push_back(pm.recall_proxy);
        inl.push_back(pm.n_inliers);
        if (pm.repeatability >= 0.0) rep.push_back(pm.repeatability);
    }
    report.median_precision = median(prec);
    report.median_recall_proxy = median(recall);
    report.median_inliers = median(inl);
    report.median_repeatability = rep.empty() ? -1.0 : median(rep);
}

void write_report_json(const EvalReport& report, const std::string& path) {
    nlohmann::json j;
    j["median_precision"] = report.median_precision;
    j["median_recall_proxy"] = report.median_recall_proxy;
    j["median_repeatability"] = report.median_repeatability;
    j["median_inliers"] = report.median_inliers;
    j["pairs"] = nlohmann::json::array();
    for (const auto& pm : report.pairs) {
        nlohmann::json p;
        p["pair_id"] = pm.pair_id;
        p["precision"] = pm.precision;
        p["no_matches"] = pm.no_matches;
        p["recall_proxy"] = pm.recall_proxy;
        p["repeatability"] = pm.repeatability;
        p["n_final"] = pm.n_final;
        p["n_inliers"] = pm.n_inliers;
        p["translation_err"] = pm.translation_err;
        j["pairs"].push_back(p);
    }
    if (report.auc >= 0.0) {
        j["auc"] = report.auc;
        j["roc"] = nlohmann::json::array();
        for (const auto& pt : report.roc)
            j["roc"].push_back({{"fpr", pt.fpr}, {"tpr", pt.tpr}, {"threshold", pt.threshold}});
    }
    if (!report.runtimes_ms.empty()) {
        for (const auto& [k, v] : report.runtimes_ms) j["runtimes_ms"][k] = v;
    }
    std::ofstream out(path);
    if (!out) raise(Err::IoFailure, "cannot write: " + path);
    out << j.dump(2) << "\n";
    if (!out) raise(Err::IoFailure, "write failed: " + path);
}

void write_report_csv(const EvalReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) raise(Err::IoFailure, "cannot write: " + path);
    out << "pair_id,precision,no_matches,recall_proxy,repeatability,n_final,n_inliers,"
           "translation_err\n";
    char buf[256];
    for (const auto& pm : report.pairs) {
        std::snprintf(buf, sizeof(buf), "%s,%.9g,%d,%.9g,%.9g,%d,%d,%.9g\n", pm.pair_id.c_str(),
                      pm.precision, pm.no_matches ? 1 : 0, pm.recall_proxy, pm.repeatability,
                      pm.n_final, pm.n_inliers, pm.translation_err);
        out << buf;
    }
    if (!out) raise(Err::IoFailure, "write failed: " + path);
}

} // namespace phasematch
