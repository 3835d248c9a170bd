// phasematch: synthesize sonar-like pairs, detect phase-congruency
// keypoints, build patch datasets, train the 2-channel similarity net,
// match image pairs and evaluate the results.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "phasematch/dataset.hpp"
#include "phasematch/error.hpp"
#include "phasematch/eval.hpp"
#include "phasematch/matcher.hpp"
#include "phasematch/net.hpp"
#include "phasematch/parallel.hpp"
#include "phasematch/phase_congruency.hpp"
#include "phasematch/rng.hpp"
#include "phasematch/viz.hpp"

namespace fs = std::filesystem;
using namespace phasematch;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitPipeline = 4;

struct DetectorFlags {
    BankParams bank;
    DetectConfig detect;
    bool noise_comp = true;
    std::string kind = "corner";

    void add_to(CLI::App* cmd) {
        cmd->add_option("--scales", bank.n_scales, "log-Gabor scales");
        cmd->add_option("--orients", bank.n_orientations, "log-Gabor orientations");
        cmd->add_option("--min-wavelength", bank.min_wavelength, "smallest filter wavelength, px");
        cmd->add_option("--mult", bank.scale_mult, "scale multiplier between filters");
        cmd->add_option("--sigma-ratio", bank.sigma_ratio, "radial bandwidth ratio");
        cmd->add_flag_callback("--no-noise-comp", [this] { noise_comp = false; },
                               "disable the noise floor subtraction");
        cmd->add_option("--nms-radius", detect.nms_radius, "non-maximum suppression radius, px");
        cmd->add_option("--kp-threshold", detect.threshold,
                        "keypoint strength threshold (default: map mean + stddev)");
        cmd->add_option("--max-kp", detect.max_count, "keep at most this many keypoints");
        cmd->add_option("--border", detect.border, "reject keypoints this close to the edge");
        cmd->add_option("--kind", kind, "keypoint source map: corner|edge|both")
            ->check(CLI::IsMember({"corner", "edge", "both"}));
    }

    DetectConfig config() const {
        DetectConfig cfg = detect;
        cfg.corners = kind == "corner" || kind == "both";
        cfg.edges = kind == "edge" || kind == "both";
        return cfg;
    }
};

SynthParams load_synth_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Err::FileNotFound, "no such params file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        raise(Err::InvalidSynthParams, std::string("bad params JSON: ") + e.what());
    }
    SynthParams p;
    p.image_size = j.value("image_size", p.image_size);
    p.texture_corr_len = j.value("texture_corr_len", p.texture_corr_len);
    p.target_count = j.value("target_count", p.target_count);
    p.target_min_size = j.value("target_min_size", p.target_min_size);
    p.target_max_size = j.value("target_max_size", p.target_max_size);
    p.shadow_dir_a = j.value("shadow_dir_a", p.shadow_dir_a);
    p.reverse_shadow = j.value("reverse_shadow", p.reverse_shadow);
    p.gamma_lo = j.value("gamma_lo", p.gamma_lo);
    p.gamma_hi = j.value("gamma_hi", p.gamma_hi);
    p.sigmoid_gain_lo = j.value("sigmoid_gain_lo", p.sigmoid_gain_lo);
    p.sigmoid_gain_hi = j.value("sigmoid_gain_hi", p.sigmoid_gain_hi);
    p.speckle_var = j.value("speckle_var", p.speckle_var);
    p.dx = j.value("dx", p.dx);
    p.dy = j.value("dy", p.dy);
    p.theta = j.value("theta", p.theta);
    p.skew_amp = j.value("skew_amp", p.skew_amp);
    p.clutter_count = j.value("clutter_count", p.clutter_count);
    return p;
}

std::string pair_stem(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "pair_%03d", index);
    return buf;
}

int cmd_synth(const std::string& out_dir, int count, std::uint64_t seed,
              const std::string& params_file, int jitter_translation) {
    SynthParams params;
    if (!params_file.empty()) params = load_synth_params(params_file);
    fs::create_directories(out_dir);

    for (int i = 0; i < count; ++i) {
        SynthParams p = params;
        const std::uint64_t pair_seed = substream_seed(seed, static_cast<std::uint64_t>(i));
        if (jitter_translation > 0) {
            Rng rng(substream_seed(pair_seed, 91));
            p.dx = rng.range(-jitter_translation, jitter_translation);
            p.dy = rng.range(-jitter_translation, jitter_translation);
        }
        const AlignedPair pair = synth_pair(p, pair_seed);
        const std::string stem = (fs::path(out_dir) / pair_stem(i)).string();
        save_gray(pair.img_a, stem + "_a.pgm");
        save_gray(pair.img_b, stem + "_b.pgm");
        save_transform(pair.transform, stem + "_gt.txt");
    }
    std::cout << "wrote " << count << " pair(s) to " << out_dir << "\n";
    return 0;
}

int cmd_detect(const std::string& image, const std::string& out, const DetectorFlags& flags,
               const std::string& dump_maps) {
    const GrayImage img = load_gray(image);
    const LogGaborBank bank = build_bank(flags.bank, img.width, img.height);
    const PCMaps maps = compute_pc_maps(img, bank, flags.noise_comp);
    const auto kps = detect_keypoints(maps, flags.config());
    save_keypoints(kps, out);
    if (!dump_maps.empty()) {
        save_gray(map_to_image(maps.min_moment, maps.width, maps.height), dump_maps + "_mmin.pgm");
        save_gray(map_to_image(maps.max_moment, maps.width, maps.height), dump_maps + "_mmax.pgm");
    }
    std::cout << "detected " << kps.size() << " keypoint(s)\n";
    return 0;
}

std::vector<std::string> list_pair_stems(const std::string& pairs_dir) {
    std::vector<std::string> stems;
    if (!fs::is_directory(pairs_dir)) raise(Err::FileNotFound, "no such dir: " + pairs_dir);
    for (const auto& entry : fs::directory_iterator(pairs_dir)) {
        const std::string name = entry.path().filename().string();
        const auto pos = name.rfind("_a.pgm");
        if (pos == std::string::npos || pos + 6 != name.size()) continue;
        stems.push_back((entry.path().parent_path() / name.substr(0, pos)).string());
    }
    std::sort(stems.begin(), stems.end());
    return stems;
}

int cmd_build_dataset(const std::string& pairs_dir, int size, int stride,
                      const std::vector<double>& ratios, std::uint64_t seed,
                      const std::string& out, const std::string& augment_ops,
                      const std::vector<double>& gamma_jitter, bool cross_pair_negatives) {
    if (ratios.size() != 3) raise(Err::BadRatios, "need exactly three ratios");
    const auto stems = list_pair_stems(pairs_dir);
    if (stems.empty()) raise(Err::FileNotFound, "no *_a.pgm pairs in " + pairs_dir);

    std::vector<SampleRecord> records;
    std::vector<SampleRecord> all_positives;
    for (std::size_t i = 0; i < stems.size(); ++i) {
        AlignedPair pair;
        pair.img_a = load_gray(stems[i] + "_a.pgm");
        pair.img_b = load_gray(stems[i] + "_b.pgm");
        pair.transform = load_transform(stems[i] + "_gt.txt");
        auto pos = slice_positive(pair, size, stride, static_cast<int>(i));
        records.insert(records.end(), pos.begin(), pos.end());
        if (cross_pair_negatives) {
            all_positives.insert(all_positives.end(), pos.begin(), pos.end());
        } else {
            auto neg = make_negatives(pos, substream_seed(seed, 1000 + i));
            records.insert(records.end(), neg.begin(), neg.end());
        }
    }
    if (cross_pair_negatives) {
        // derange the pooled B sides so negatives can pair patches from
        // different scenes
        auto neg = make_negatives(all_positives, substream_seed(seed, 999));
        records.insert(records.end(), neg.begin(), neg.end());
    }
    split_records(records, ratios[0], ratios[1], ratios[2], seed);

    if (!augment_ops.empty()) {
        AugmentOps ops;
        ops.hflip = augment_ops.find("hflip") != std::string::npos;
        ops.vflip = augment_ops.find("vflip") != std::string::npos;
        ops.rot90 = augment_ops.find("rot90") != std::string::npos;
        if (gamma_jitter.size() == 2) {
            ops.gamma_lo = gamma_jitter[0];
            ops.gamma_hi = gamma_jitter[1];
        }
        // only training records are augmented; copies keep the group tag
        std::vector<SampleRecord> train_part, rest;
        for (auto& r : records) (r.split == SplitTag::Train ? train_part : rest).push_back(r);
        train_part = augment(train_part, ops, substream_seed(seed, 7));
        records = std::move(train_part);
        records.insert(records.end(), rest.begin(), rest.end());
    }

    Manifest manifest;
    manifest.seed = seed;
    manifest.size = size;
    manifest.params.emplace_back("pairs", std::to_string(stems.size()));
    manifest.params.emplace_back("stride", std::to_string(stride));
    char rbuf[64];
    std::snprintf(rbuf, sizeof(rbuf), "%g %g %g", ratios[0], ratios[1], ratios[2]);
    manifest.params.emplace_back("ratios", rbuf);
    if (!augment_ops.empty()) manifest.params.emplace_back("augment", augment_ops);
    manifest.records = std::move(records);
    save_manifest(manifest, out);

    std::size_t n_train = 0, n_val = 0, n_test = 0;
    for (const auto& r : manifest.records) {
        if (r.split == SplitTag::Train) ++n_train;
        if (r.split == SplitTag::Val) ++n_val;
        if (r.split == SplitTag::Test) ++n_test;
    }
    std::cout << "manifest: " << manifest.records.size() << " records (train " << n_train
              << ", val " << n_val << ", test " << n_test << ")\n";
    return 0;
}

int cmd_train(const std::string& manifest_path, const std::string& out_model,
              const std::string& history_path, TrainConfig cfg, const std::string& loss_name,
              bool no_swap) {
    cfg.loss = loss_name == "logistic" ? LossKind::Logistic : LossKind::Hinge;
    cfg.swap_augment = !no_swap;

    const Manifest manifest = load_manifest(manifest_path);
    const auto train_set = to_labeled_pairs(manifest, SplitTag::Train);
    const auto val_set = to_labeled_pairs(manifest, SplitTag::Val);
    if (train_set.empty() || val_set.empty())
        raise(Err::EmptyDataset, "manifest lacks train or val records");

    const NetSpec spec = NetSpec::two_channel_default(manifest.size);
    const TrainResult result = train(train_set, val_set, spec, cfg);
    save_model(result.params, spec, out_model);

    if (!history_path.empty()) {
        std::ofstream out(history_path);
        if (!out) raise(Err::IoFailure, "cannot write: " + history_path);
        out << "epoch,train_loss,val_loss,val_acc,lr\n";
        char buf[160];
        for (const auto& e : result.history) {
            std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g,%.9g\n", e.epoch, e.train_loss,
                          e.val_loss, e.val_acc, e.lr);
            out << buf;
        }
    }
    const auto& last = result.history.back();
    std::cout << "trained " << result.history.size() << " epoch(s); final val_acc "
              << last.val_acc << "\n";
    return 0;
}

int cmd_match(const std::string& image_a, const std::string& image_b, const std::string& model,
              const std::string& out_prefix, MatcherConfig cfg, const DetectorFlags& flags,
              const std::string& descriptor, const std::string& geom) {
    cfg.descriptor = descriptor == "ncc" ? DescriptorKind::Ncc : DescriptorKind::Net;
    cfg.model = geom == "similarity" ? GeomModel::Similarity : GeomModel::Translation;

    NetSpec spec;
    NetworkParams params;
    if (cfg.descriptor == DescriptorKind::Net) {
        if (model.empty()) raise(Err::InvalidArgument, "--model is required for --descriptor net");
        std::tie(params, spec) = load_model(model);
        cfg.patch_size = spec.input_size;
    } else {
        spec = NetSpec::two_channel_default(cfg.patch_size);
        params = zero_params(spec);
    }

    const GrayImage img_a = load_gray(image_a);
    const GrayImage img_b = load_gray(image_b);

    std::vector<Keypoint> kps_a, kps_b;
    StageTimings timings;
    const MatchResult result = match_pipeline(img_a, img_b, spec, params, cfg, flags.bank,
                                              flags.config(), &kps_a, &kps_b, &timings);

    save_matches(result, kps_a, kps_b, out_prefix + "_matches.txt");
    save_keypoints(kps_a, out_prefix + "_kps_a.txt");
    save_keypoints(kps_b, out_prefix + "_kps_b.txt");
    save_gray(render_matches(img_a, img_b, kps_a, kps_b, result), out_prefix + "_vis.pgm");

    std::printf("keypoints %d/%d, candidates %d, selected %d, inliers %d\n", result.n_kps_a,
                result.n_kps_b, result.n_candidates, result.n_selected, result.inlier_count);
    std::printf("transform: dx %.3f dy %.3f theta %.4f scale %.4f\n", result.transform.dx,
                result.transform.dy, result.transform.theta, result.transform.scale);
    std::printf("timings ms: detect %.1f score %.1f select %.1f consensus %.1f\n",
                timings.detect_ms, timings.score_ms, timings.select_ms, timings.consensus_ms);
    return 0;
}

int cmd_eval(const std::string& matches_dir, const std::string& pairs_dir,
             const std::string& manifest_path, const std::string& model_path, double tolerance,
             const std::string& out_json, const std::string& out_csv) {
    using clock = std::chrono::steady_clock;
    EvalReport report;

    if (!matches_dir.empty()) {
        if (pairs_dir.empty())
            raise(Err::MissingGroundTruth, "--pairs-dir with *_gt.txt is required for match eval");
        const auto t0 = clock::now();
        std::vector<std::string> stems;
        for (const auto& entry : fs::directory_iterator(matches_dir)) {
            const std::string name = entry.path().filename().string();
            const auto pos = name.rfind("_matches.txt");
            if (pos == std::string::npos || pos + 12 != name.size()) continue;
            stems.push_back(name.substr(0, pos));
        }
        std::sort(stems.begin(), stems.end());
        if (stems.empty()) raise(Err::FileNotFound, "no *_matches.txt in " + matches_dir);

        for (const auto& stem : stems) {
            const std::string gt_path = (fs::path(pairs_dir) / (stem + "_gt.txt")).string();
            if (!fs::exists(gt_path))
                raise(Err::MissingGroundTruth, "missing ground truth: " + gt_path);
            const Transform2D gt = load_transform(gt_path);
            const MatchFile mf =
                load_matches((fs::path(matches_dir) / (stem + "_matches.txt")).string());

            const GrayImage img_a = load_gray((fs::path(pairs_dir) / (stem + "_a.pgm")).string());
            PairMetrics pm = evaluate_pair(mf, gt, tolerance, 0.5 * (img_a.width - 1),
                                           0.5 * (img_a.height - 1));
            pm.pair_id = stem;

            const std::string ka = (fs::path(matches_dir) / (stem + "_kps_a.txt")).string();
            const std::string kb = (fs::path(matches_dir) / (stem + "_kps_b.txt")).string();
            if (fs::exists(ka) && fs::exists(kb))
                pm.repeatability =
                    repeatability(load_keypoints(ka), load_keypoints(kb), gt, tolerance,
                                  0.5 * (img_a.width - 1), 0.5 * (img_a.height - 1));
            report.pairs.push_back(pm);
        }
        report.runtimes_ms["match_eval"] =
            std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    }

    if (!manifest_path.empty()) {
        if (model_path.empty()) raise(Err::InvalidArgument, "--model is required with --manifest");
        const auto t0 = clock::now();
        const Manifest manifest = load_manifest(manifest_path);
        const auto [params, spec] = load_model(model_path);

        auto test_set = to_labeled_pairs(manifest, SplitTag::Test);
        if (test_set.empty()) test_set = to_labeled_pairs(manifest, SplitTag::None);
        if (test_set.empty()) raise(Err::EmptyDataset, "manifest has no test records");
        if (spec.input_size != manifest.size)
            raise(Err::ModelShapeMismatch, "model input size does not match the manifest");

        const int n = static_cast<int>(test_set.size());
        std::vector<std::pair<double, int>> scored(static_cast<std::size_t>(n));
        const int nthreads = thread_count();
#pragma omp parallel for schedule(static) num_threads(nthreads)
        for (int i = 0; i < n; ++i) {
            const auto& s = test_set[static_cast<std::size_t>(i)];
            scored[static_cast<std::size_t>(i)] = {forward_two_channel(spec, params, s.a, s.b),
                                                   s.label};
        }
        report.roc = roc_points(scored);
        report.auc = roc_auc(scored);
        report.runtimes_ms["roc_scoring"] =
            std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    }

    if (report.pairs.empty() && report.auc < 0.0)
        raise(Err::InvalidArgument, "nothing to evaluate: pass --matches-dir and/or --manifest");

    finalize_report(report);
    write_report_json(report, out_json);
    if (!out_csv.empty()) write_report_csv(report, out_csv);

    std::printf("pairs %zu, median precision %.3f, median inliers %.1f",
                report.pairs.size(), report.median_precision, report.median_inliers);
    if (report.auc >= 0.0) std::printf(", AUC %.4f", report.auc);
    std::printf("\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"phase-congruency keypoints + 2-channel similarity network image matching"};
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads, "worker threads (1 = fully serial)");

    // synth
    auto* synth = app.add_subcommand("synth", "generate synthetic sonar-like aligned pairs");
    std::string synth_out, synth_params;
    int synth_count = 10, synth_jitter = 0;
    std::uint64_t synth_seed = 1;
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--count", synth_count, "pairs to generate");
    synth->add_option("--seed", synth_seed, "master seed");
    synth->add_option("--params", synth_params, "JSON file with scene parameters");
    synth->add_option("--jitter-translation", synth_jitter,
                      "draw an integer ground-truth offset in [-R, R] per pair");

    // detect
    auto* detect = app.add_subcommand("detect", "detect phase-congruency keypoints");
    std::string det_image, det_out, det_dump;
    DetectorFlags det_flags;
    detect->add_option("--image", det_image, "input PGM")->required();
    detect->add_option("--out", det_out, "keypoint text file")->required();
    detect->add_option("--dump-maps", det_dump, "also write moment map rasters with this prefix");
    det_flags.add_to(detect);

    // build-dataset
    auto* build = app.add_subcommand("build-dataset", "slice aligned pairs into labeled samples");
    std::string bd_pairs, bd_out, bd_augment;
    int bd_size = 32, bd_stride = 16;
    std::uint64_t bd_seed = 1;
    std::vector<double> bd_ratios{0.7, 0.15, 0.15};
    std::vector<double> bd_gamma;
    build->add_option("--pairs", bd_pairs, "directory with pair_*_{a,b}.pgm and *_gt.txt")
        ->required();
    build->add_option("--out", bd_out, "manifest path (blob sidecar is <out>.blob)")->required();
    build->add_option("--size", bd_size, "patch size: 16, 32 or 64");
    build->add_option("--stride", bd_stride, "slicing stride, px");
    build->add_option("--ratios", bd_ratios, "train val test ratios")->expected(3);
    build->add_option("--seed", bd_seed, "master seed");
    build->add_option("--augment", bd_augment, "comma list of hflip,vflip,rot90 for train records");
    build->add_option("--gamma-jitter", bd_gamma, "gamma jitter range lo hi for augmented copies")
        ->expected(2);
    bool bd_cross = false;
    build->add_flag("--cross-pair-negatives", bd_cross,
                    "derange B patches across all pairs instead of within each pair");

    // train
    auto* tr = app.add_subcommand("train", "train the 2-channel similarity network");
    std::string tr_manifest, tr_model, tr_history, tr_loss = "hinge";
    TrainConfig tr_cfg;
    bool tr_noswap = false;
    tr->add_option("--manifest", tr_manifest, "dataset manifest")->required();
    tr->add_option("--out", tr_model, "output model file")->required();
    tr->add_option("--history", tr_history, "per-epoch CSV");
    tr->add_option("--epochs", tr_cfg.epochs, "training epochs");
    tr->add_option("--batch", tr_cfg.batch_size, "minibatch size");
    tr->add_option("--lr", tr_cfg.base_lr, "base learning rate");
    tr->add_option("--lr-decay-factor", tr_cfg.lr_decay_factor, "step decay factor");
    tr->add_option("--lr-decay-period", tr_cfg.lr_decay_period, "epochs between decays");
    tr->add_option("--weight-decay", tr_cfg.weight_decay, "L2 weight decay");
    tr->add_option("--seed", tr_cfg.seed, "init/shuffle seed");
    tr->add_option("--loss", tr_loss, "hinge|logistic")
        ->check(CLI::IsMember({"hinge", "logistic"}));
    tr->add_flag("--no-swap-augment", tr_noswap, "do not also feed channel-swapped pairs");

    // match
    auto* match = app.add_subcommand("match", "match two images end to end");
    std::string m_image_a, m_image_b, m_model, m_out, m_descriptor = "net",
                m_geom = "translation";
    MatcherConfig m_cfg;
    DetectorFlags m_flags;
    match->add_option("--image-a", m_image_a, "first image")->required();
    match->add_option("--image-b", m_image_b, "second image")->required();
    match->add_option("--model", m_model, "trained model (required for net descriptor)");
    match->add_option("--out", m_out, "output prefix")->required();
    match->add_option("--descriptor", m_descriptor, "net|ncc")
        ->check(CLI::IsMember({"net", "ncc"}));
    match->add_option("--patch-size", m_cfg.patch_size, "patch size for the ncc descriptor");
    match->add_option("--score-threshold", m_cfg.score_threshold, "minimum similarity score");
    bool m_nomutual = false;
    match->add_flag("--no-mutual", m_nomutual, "keep every above-threshold candidate");
    match->add_option("--radius", m_cfg.search_radius,
                      "Chebyshev search radius, px (-1 = all pairs)");
    match->add_option("--coarse-dx", m_cfg.coarse_dx, "prior x offset for radius gating");
    match->add_option("--coarse-dy", m_cfg.coarse_dy, "prior y offset for radius gating");
    match->add_option("--geom", m_geom, "translation|similarity")
        ->check(CLI::IsMember({"translation", "similarity"}));
    match->add_option("--iters", m_cfg.consensus_iters, "consensus iterations");
    match->add_option("--tol", m_cfg.inlier_tol, "inlier tolerance, px");
    match->add_option("--min-inliers", m_cfg.min_inliers, "minimum consensus size");
    match->add_option("--seed", m_cfg.seed, "consensus sampling seed");
    m_flags.add_to(match);

    // eval
    auto* ev = app.add_subcommand("eval", "evaluate matches and/or a labeled manifest");
    std::string e_matches, e_pairs, e_manifest, e_model, e_json = "report.json", e_csv;
    double e_tol = 2.0;
    ev->add_option("--matches-dir", e_matches, "directory with *_matches.txt from `match`");
    ev->add_option("--pairs-dir", e_pairs, "directory with *_gt.txt (and *_a.pgm) ground truth");
    ev->add_option("--manifest", e_manifest, "labeled manifest for ROC/AUC");
    ev->add_option("--model", e_model, "model for ROC scoring");
    ev->add_option("--tolerance", e_tol, "ground-truth residual tolerance, px");
    ev->add_option("--out-json", e_json, "JSON report path");
    ev->add_option("--out-csv", e_csv, "CSV report path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return kExitUsage;
    }

    set_thread_count(threads);

    try {
        if (synth->parsed())
            return cmd_synth(synth_out, synth_count, synth_seed, synth_params, synth_jitter);
        if (detect->parsed()) return cmd_detect(det_image, det_out, det_flags, det_dump);
        if (build->parsed())
            return cmd_build_dataset(bd_pairs, bd_size, bd_stride, bd_ratios, bd_seed, bd_out,
                                     bd_augment, bd_gamma, bd_cross);
        if (tr->parsed())
            return cmd_train(tr_manifest, tr_model, tr_history, tr_cfg, tr_loss, tr_noswap);
        if (match->parsed()) {
            m_cfg.mutual_best = !m_nomutual;
            return cmd_match(m_image_a, m_image_b, m_model, m_out, m_cfg, m_flags, m_descriptor,
                             m_geom);
        }
        if (ev->parsed())
            return cmd_eval(e_matches, e_pairs, e_manifest, e_model, e_tol, e_json, e_csv);
    } catch (const Error& e) {
        std::cerr << "error [" << err_name(e.code()) << "]: " << e.what() << "\n";
        return is_input_error(e.code()) ? kExitInput : kExitPipeline;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPipeline;
    }
    return kExitUsage;
}
