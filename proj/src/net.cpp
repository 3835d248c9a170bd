#include "phasematch/net.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "phasematch/error.hpp"
#include "phasematch/parallel.hpp"
#include "phasematch/rng.hpp"

namespace phasematch {

Tensor Tensor::zeros(std::vector<int> shape) {
    Tensor t;
    t.shape = std::move(shape);
    std::size_t n = 1;
    for (int d : t.shape) n *= static_cast<std::size_t>(d);
    t.data.assign(n, 0.0);
    return t;
}

NetSpec NetSpec::two_channel_default(int input_size) {
    NetSpec spec;
    spec.input_size = input_size;
    spec.in_channels = 2;
    spec.blocks = {{2, 32, 5}, {32, 64, 5}};
    spec.validate();
    return spec;
}

NetSpec NetSpec::siamese_default(int input_size) {
    NetSpec spec;
    spec.input_size = input_size;
    spec.in_channels = 1;
    spec.blocks = {{1, 32, 5}, {32, 64, 5}};
    spec.validate();
    return spec;
}

int NetSpec::spatial_after_blocks() const {
    int side = input_size;
    for (const auto& b : blocks) side = (side - b.kernel + 1) / 2;
    return side;
}

int NetSpec::flat_features() const {
    return blocks.back().out_ch * spatial_after_blocks() * spatial_after_blocks();
}

void NetSpec::validate() const {
    if (in_channels != 1 && in_channels != 2)
        raise(Err::ShapeMismatch, "net input must have 1 or 2 channels");
    if (blocks.empty()) raise(Err::ShapeMismatch, "net needs at least one conv block");
    if (blocks.front().in_ch != in_channels)
        raise(Err::ShapeMismatch, "first conv in_ch must equal net in_channels");
    int side = input_size;
    int ch = in_channels;
    for (const auto& b : blocks) {
        if (b.in_ch != ch) raise(Err::ShapeMismatch, "conv block channel chain broken");
        if (b.kernel < 1 || b.kernel > side)
            raise(Err::ShapeMismatch, "conv kernel larger than its input");
        side = (side - b.kernel + 1) / 2;
        if (side < 1) raise(Err::ShapeMismatch, "spatial size collapsed below 1");
        ch = b.out_ch;
    }
}

std::size_t NetworkParams::total_count() const {
    std::size_t n = 0;
    for (const auto& t : tensors) n += t.data.size();
    return n;
}

namespace {

ParamTensor make_param(std::vector<int> shape) {
    ParamTensor t;
    t.shape = std::move(shape);
    std::size_t n = 1;
    for (int d : t.shape) n *= static_cast<std::size_t>(d);
    t.data.assign(n, 0.0f);
    return t;
}

} // namespace

NetworkParams zero_params(const NetSpec& spec) {
    spec.validate();
    NetworkParams p;
    for (const auto& b : spec.blocks) {
        p.tensors.push_back(make_param({b.out_ch, b.in_ch, b.kernel, b.kernel}));
        p.tensors.push_back(make_param({b.out_ch}));
    }
    p.tensors.push_back(make_param({1, spec.flat_features()}));
    p.tensors.push_back(make_param({1}));
    return p;
}

NetworkParams init_params(const NetSpec& spec, std::uint64_t seed) {
    NetworkParams p = zero_params(spec);
    Rng rng(seed);
    for (std::size_t i = 0; i + 1 < p.tensors.size(); i += 2) {
        auto& w = p.tensors[i];
        int fan_in, fan_out;
        if (w.shape.size() == 4) {
            fan_in = w.shape[1] * w.shape[2] * w.shape[3];
            fan_out = w.shape[0] * w.shape[2] * w.shape[3];
        } else {
            fan_in = w.shape[1];
            fan_out = w.shape[0];
        }
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        for (float& v : w.data) v = static_cast<float>(rng.uniform(-bound, bound));
        // biases stay zero
    }
    return p;
}

Gradients Gradients::zeros_like(const NetworkParams& params) {
    Gradients g;
    g.tensors.reserve(params.tensors.size());
    for (const auto& t : params.tensors) g.tensors.emplace_back(t.data.size(), 0.0);
    return g;
}

Tensor make_input(const NetSpec& spec, const Patch& a, const Patch& b) {
    if (a.size != spec.input_size || b.size != spec.input_size)
        raise(Err::ShapeMismatch, "patch size does not match net input size");
    const Patch sa = standardize(a);
    const Patch sb = standardize(b);
    Tensor t = Tensor::zeros({2, spec.input_size, spec.input_size});
    const std::size_t plane = sa.pixels.size();
    std::copy(sa.pixels.begin(), sa.pixels.end(), t.data.begin());
    std::copy(sb.pixels.begin(), sb.pixels.end(), t.data.begin() + plane);
    return t;
}

namespace {

struct LayerCache {
    Tensor input;            // [C, H, W] input to the conv
    Tensor conv_out;         // pre-relu conv output [O, Hc, Wc]
    Tensor pool_out;         // post relu+pool [O, Hp, Wp]
    std::vector<int> argmax; // flat index into conv_out per pool element
};

struct ForwardCache {
    std::vector<LayerCache> layers;
    std::vector<double> flat;
    double score = 0.0;
};

void conv_forward(const ConvBlockSpec& b, const ParamTensor& w, const ParamTensor& bias,
                  const Tensor& in, Tensor& out) {
    const int hin = in.shape[1], win = in.shape[2];
    const int hc = hin - b.kernel + 1, wc = win - b.kernel + 1;
    out = Tensor::zeros({b.out_ch, hc, wc});
    const int k = b.kernel;
    for (int oc = 0; oc < b.out_ch; ++oc) {
        double* optr = out.data.data() + static_cast<std::size_t>(oc) * hc * wc;
        const float bv = bias.data[oc];
        for (int y = 0; y < hc; ++y)
            for (int x = 0; x < wc; ++x) optr[y * wc + x] = bv;
        for (int ic = 0; ic < b.in_ch; ++ic) {
            const double* iptr = in.data.data() + static_cast<std::size_t>(ic) * hin * win;
            const float* wptr =
                w.data.data() + (static_cast<std::size_t>(oc) * b.in_ch + ic) * k * k;
            for (int ky = 0; ky < k; ++ky) {
                for (int kx = 0; kx < k; ++kx) {
                    const double wv = wptr[ky * k + kx];
                    for (int y = 0; y < hc; ++y) {
                        const double* irow = iptr + (y + ky) * win + kx;
                        double* orow = optr + y * wc;
                        for (int x = 0; x < wc; ++x) orow[x] += wv * irow[x];
                    }
                }
            }
        }
    }
}

// relu then 2x2/2 max pool, recording the argmax for backprop
void pool_forward(const Tensor& conv_out, Tensor& pool_out, std::vector<int>& argmax) {
    const int ch = conv_out.shape[0], hc = conv_out.shape[1], wc = conv_out.shape[2];
    const int hp = hc / 2, wp = wc / 2;
    pool_out = Tensor::zeros({ch, hp, wp});
    argmax.assign(pool_out.count(), 0);
    for (int c = 0; c < ch; ++c) {
        const double* cptr = conv_out.data.data() + static_cast<std::size_t>(c) * hc * wc;
        double* pptr = pool_out.data.data() + static_cast<std::size_t>(c) * hp * wp;
        int* aptr = argmax.data() + static_cast<std::size_t>(c) * hp * wp;
        for (int y = 0; y < hp; ++y) {
            for (int x = 0; x < wp; ++x) {
                double best = -1.0;
                int best_idx = (2 * y) * wc + 2 * x;
                for (int dy = 0; dy < 2; ++dy) {
                    for (int dx = 0; dx < 2; ++dx) {
                        const int idx = (2 * y + dy) * wc + (2 * x + dx);
                        const double v = std::max(cptr[idx], 0.0);
                        if (v > best) {
                            best = v;
                            best_idx = idx;
                        }
                    }
                }
                pptr[y * wp + x] = best;
                aptr[y * wp + x] = static_cast<int>(static_cast<std::size_t>(c) * hc * wc) + best_idx;
            }
        }
    }
}

double forward_cached(const NetSpec& spec, const NetworkParams& params, const Tensor& input,
                      ForwardCache* cache) {
    Tensor cur = input;
    ForwardCache local;
    ForwardCache& fc = cache ? *cache : local;
    fc.layers.clear();
    for (std::size_t bi = 0; bi < spec.blocks.size(); ++bi) {
        LayerCache layer;
        layer.input = cur;
        conv_forward(spec.blocks[bi], params.tensors[2 * bi], params.tensors[2 * bi + 1],
                     layer.input, layer.conv_out);
        pool_forward(layer.conv_out, layer.pool_out, layer.argmax);
        cur = layer.pool_out;
        fc.layers.push_back(std::move(layer));
    }

    fc.flat = cur.data;
    const auto& fw = params.tensors[params.tensors.size() - 2];
    const auto& fb = params.tensors[params.tensors.size() - 1];
    if (fc.flat.size() != fw.data.size())
        raise(Err::ShapeMismatch, "flattened features do not match fc width");
    double score = fb.data[0];
    for (std::size_t i = 0; i < fc.flat.size(); ++i)
        score += static_cast<double>(fw.data[i]) * fc.flat[i];
    fc.score = score;
    return score;
}

void check_params_match(const NetSpec& spec, const NetworkParams& params) {
    if (params.tensors.size() != 2 * spec.blocks.size() + 2)
        raise(Err::ShapeMismatch, "parameter tensor count does not match spec");
}

// Backprop from d(loss)/d(score) into per-parameter gradients.
void backprop_sample(const NetSpec& spec, const NetworkParams& params, const ForwardCache& fc,
                     double dscore, Gradients& grads) {
    const std::size_t nt = params.tensors.size();
    const auto& fw = params.tensors[nt - 2];

    auto& gfw = grads.tensors[nt - 2];
    auto& gfb = grads.tensors[nt - 1];
    gfb[0] += dscore;
    std::vector<double> dflat(fc.flat.size());
    for (std::size_t i = 0; i < fc.flat.size(); ++i) {
        gfw[i] += dscore * fc.flat[i];
        dflat[i] = dscore * static_cast<double>(fw.data[i]);
    }

    std::vector<double> dcur = std::move(dflat);
    for (int bi = static_cast<int>(spec.blocks.size()) - 1; bi >= 0; --bi) {
        const auto& layer = fc.layers[static_cast<std::size_t>(bi)];
        const auto& b = spec.blocks[static_cast<std::size_t>(bi)];
        const auto& w = params.tensors[2 * static_cast<std::size_t>(bi)];
        auto& gw = grads.tensors[2 * static_cast<std::size_t>(bi)];
        auto& gb = grads.tensors[2 * static_cast<std::size_t>(bi) + 1];

        // pool backward: route to argmax, then relu mask
        std::vector<double> dconv(layer.conv_out.count(), 0.0);
        for (std::size_t j = 0; j < dcur.size(); ++j) {
            const int src = layer.argmax[j];
            if (layer.conv_out.data[static_cast<std::size_t>(src)] > 0.0)
                dconv[static_cast<std::size_t>(src)] += dcur[j];
        }

        // conv backward
        const int hin = layer.input.shape[1], win = layer.input.shape[2];
        const int hc = layer.conv_out.shape[1], wc = layer.conv_out.shape[2];
        const int k = b.kernel;
        std::vector<double> dinput(layer.input.count(), 0.0);
        for (int oc = 0; oc < b.out_ch; ++oc) {
            const double* dptr = dconv.data() + static_cast<std::size_t>(oc) * hc * wc;
            double gb_acc = 0.0;
            for (int i = 0; i < hc * wc; ++i) gb_acc += dptr[i];
            gb[static_cast<std::size_t>(oc)] += gb_acc;
            for (int ic = 0; ic < b.in_ch; ++ic) {
                const double* iptr =
                    layer.input.data.data() + static_cast<std::size_t>(ic) * hin * win;
                double* diptr = dinput.data() + static_cast<std::size_t>(ic) * hin * win;
                const float* wptr =
                    w.data.data() + (static_cast<std::size_t>(oc) * b.in_ch + ic) * k * k;
                double* gwptr =
                    gw.data() + (static_cast<std::size_t>(oc) * b.in_ch + ic) * k * k;
                for (int ky = 0; ky < k; ++ky) {
                    for (int kx = 0; kx < k; ++kx) {
                        const double wv = wptr[ky * k + kx];
                        double gw_acc = 0.0;
                        for (int y = 0; y < hc; ++y) {
                            const double* drow = dptr + y * wc;
                            const double* irow = iptr + (y + ky) * win + kx;
                            double* dirow = diptr + (y + ky) * win + kx;
                            for (int x = 0; x < wc; ++x) {
                                gw_acc += drow[x] * irow[x];
                                dirow[x] += drow[x] * wv;
                            }
                        }
                        gwptr[ky * k + kx] += gw_acc;
                    }
                }
            }
        }
        dcur = std::move(dinput);
    }
}

double loss_dscore(double score, int label, LossKind kind) {
    const double y = static_cast<double>(label);
    if (kind == LossKind::Hinge) return y * score < 1.0 ? -y : 0.0;
    // d/ds ln(1 + e^{-ys}) = -y / (1 + e^{ys})
    return -y / (1.0 + std::exp(y * score));
}

} // namespace

double forward(const NetSpec& spec, const NetworkParams& params, const Tensor& input) {
    check_params_match(spec, params);
    return forward_cached(spec, params, input, nullptr);
}

double forward_two_channel(const NetSpec& spec, const NetworkParams& params, const Patch& a,
                           const Patch& b) {
    check_params_match(spec, params);
    return forward_cached(spec, params, make_input(spec, a, b), nullptr);
}

std::vector<double> siamese_embed(const NetSpec& spec, const NetworkParams& params,
                                  const Patch& patch) {
    check_params_match(spec, params);
    if (spec.in_channels != 1)
        raise(Err::ShapeMismatch, "siamese branch needs a 1-channel spec");
    if (patch.size != spec.input_size)
        raise(Err::ShapeMismatch, "patch size does not match net input size");

    const Patch sp = standardize(patch);
    Tensor cur = Tensor::zeros({1, spec.input_size, spec.input_size});
    std::copy(sp.pixels.begin(), sp.pixels.end(), cur.data.begin());

    for (std::size_t bi = 0; bi < spec.blocks.size(); ++bi) {
        Tensor conv_out, pool_out;
        std::vector<int> argmax;
        conv_forward(spec.blocks[bi], params.tensors[2 * bi], params.tensors[2 * bi + 1], cur,
                     conv_out);
        pool_forward(conv_out, pool_out, argmax);
        cur = std::move(pool_out);
    }
    return cur.data;
}

double siamese_distance(const std::vector<double>& d1, const std::vector<double>& d2) {
    if (d1.size() != d2.size())
        raise(Err::LengthMismatch, "descriptor lengths differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < d1.size(); ++i) {
        const double d = d1[i] - d2[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

double loss_value(double score, int label, LossKind kind) {
    if (label != 1 && label != -1) raise(Err::InvalidArgument, "label must be +1 or -1");
    const double y = static_cast<double>(label);
    if (kind == LossKind::Hinge) return std::max(0.0, 1.0 - y * score);
    const double z = -y * score;
    // stable log1p(exp(z))
    return z > 30.0 ? z : std::log1p(std::exp(z));
}

std::pair<Gradients, double> backward(const NetSpec& spec, const NetworkParams& params,
                                      const std::vector<LabeledPair>& batch, LossKind kind) {
    check_params_match(spec, params);
    if (batch.empty()) raise(Err::EmptyDataset, "backward over empty batch");

    const int n = static_cast<int>(batch.size());
    std::vector<Gradients> per_sample(static_cast<std::size_t>(n));
    std::vector<double> losses(static_cast<std::size_t>(n), 0.0);
    const int nthreads = thread_count();
    std::exception_ptr failure = nullptr; // exceptions may not cross the parallel region

#pragma omp parallel for schedule(static) num_threads(nthreads)
    for (int i = 0; i < n; ++i) {
        try {
            const auto& s = batch[static_cast<std::size_t>(i)];
            ForwardCache fc;
            const Tensor input = make_input(spec, s.a, s.b);
            const double score = forward_cached(spec, params, input, &fc);
            losses[static_cast<std::size_t>(i)] = loss_value(score, s.label, kind);
            per_sample[static_cast<std::size_t>(i)] = Gradients::zeros_like(params);
            backprop_sample(spec, params, fc, loss_dscore(score, s.label, kind),
                            per_sample[static_cast<std::size_t>(i)]);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    // fixed-order reduction keeps the result independent of thread count
    Gradients total = Gradients::zeros_like(params);
    double loss_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        loss_sum += losses[static_cast<std::size_t>(i)];
        for (std::size_t t = 0; t < total.tensors.size(); ++t) {
            auto& dst = total.tensors[t];
            const auto& src = per_sample[static_cast<std::size_t>(i)].tensors[t];
            for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
        }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto& t : total.tensors)
        for (double& v : t) v *= inv_n;
    return {std::move(total), loss_sum * inv_n};
}

namespace {

double evaluate(const NetSpec& spec, const NetworkParams& params,
                const std::vector<LabeledPair>& set, LossKind kind, double* accuracy) {
    const int n = static_cast<int>(set.size());
    std::vector<double> scores(static_cast<std::size_t>(n));
    const int nthreads = thread_count();
    std::exception_ptr failure = nullptr;
#pragma omp parallel for schedule(static) num_threads(nthreads)
    for (int i = 0; i < n; ++i) {
        try {
            const auto& s = set[static_cast<std::size_t>(i)];
            scores[static_cast<std::size_t>(i)] =
                forward_cached(spec, params, make_input(spec, s.a, s.b), nullptr);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    double loss_sum = 0.0;
    int correct = 0;
    for (int i = 0; i < n; ++i) {
        const auto& s = set[static_cast<std::size_t>(i)];
        const double score = scores[static_cast<std::size_t>(i)];
        loss_sum += loss_value(score, s.label, kind);
        const int pred = score > 0.0 ? 1 : -1;
        if (pred == s.label) ++correct;
    }
    if (accuracy) *accuracy = static_cast<double>(correct) / static_cast<double>(n);
    return loss_sum / static_cast<double>(n);
}

} // namespace

TrainResult train(const std::vector<LabeledPair>& train_set,
                  const std::vector<LabeledPair>& val_set, const NetSpec& spec,
                  const TrainConfig& config) {
    spec.validate();
    if (train_set.empty() || val_set.empty())
        raise(Err::EmptyDataset, "train and validation sets must be non-empty");
    if (config.base_lr <= 0.0 || config.lr_decay_factor <= 0.0 || config.lr_decay_factor > 1.0 ||
        config.lr_decay_period < 1 || config.batch_size < 1 || config.epochs < 1)
        raise(Err::InvalidArgument, "bad training configuration");
    for (const auto& s : train_set)
        if (s.a.size != spec.input_size || s.b.size != spec.input_size)
            raise(Err::ShapeMismatch, "training sample size does not match spec");
    for (const auto& s : val_set)
        if (s.a.size != spec.input_size || s.b.size != spec.input_size)
            raise(Err::ShapeMismatch, "validation sample size does not match spec");

    NetworkParams params = init_params(spec, config.seed);
    Rng shuffle_rng(substream_seed(config.seed, 5));

    TrainResult result;
    result.params = params;
    double best_acc = -1.0;

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const double lr =
            config.base_lr * std::pow(config.lr_decay_factor, epoch / config.lr_decay_period);
        shuffle_rng.shuffle(order);

        double epoch_loss_sum = 0.0;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
            std::vector<LabeledPair> batch;
            batch.reserve((stop - start) * (config.swap_augment ? 2 : 1));
            for (std::size_t i = start; i < stop; ++i) batch.push_back(train_set[order[i]]);
            if (config.swap_augment) {
                for (std::size_t i = start; i < stop; ++i) {
                    const auto& s = train_set[order[i]];
                    batch.push_back({s.b, s.a, s.label});
                }
            }

            auto [grads, mean_loss] = backward(spec, params, batch, config.loss);
            epoch_loss_sum += mean_loss * static_cast<double>(batch.size());
            seen += batch.size();

            for (std::size_t t = 0; t < params.tensors.size(); ++t) {
                auto& w = params.tensors[t].data;
                const auto& g = grads.tensors[t];
                for (std::size_t j = 0; j < w.size(); ++j) {
                    const double step =
                        g[j] + config.weight_decay * static_cast<double>(w[j]);
                    w[j] = static_cast<float>(static_cast<double>(w[j]) - lr * step);
                }
            }
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.lr = lr;
        stats.train_loss = epoch_loss_sum / static_cast<double>(seen);
        stats.val_loss = evaluate(spec, params, val_set, config.loss, &stats.val_acc);
        result.history.push_back(stats);

        if (stats.val_acc > best_acc) {
            best_acc = stats.val_acc;
            result.params = params;
        }
    }
    return result;
}

bool predict(const NetSpec& spec, const NetworkParams& params, const Patch& a, const Patch& b,
             double threshold) {
    return forward_two_channel(spec, params, a, b) > threshold;
}

std::uint32_t crc32(const unsigned char* data, std::size_t len) {
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t crc = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < len; ++i) crc = table[(crc ^ data[i]) & 0xFFu] ^ (crc >> 8);
    return crc ^ 0xFFFFFFFFu;
}

namespace {

constexpr char kMagic[4] = {'P', 'M', 'N', 'T'};
constexpr std::uint8_t kVersion = 1;

void put_u16(std::ofstream& out, std::uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v & 0xFF),
                          static_cast<unsigned char>(v >> 8)};
    out.write(reinterpret_cast<char*>(b), 2);
}

void put_u32(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<char*>(b), 4);
}

struct Reader {
    std::ifstream in;
    std::string path;

    unsigned char get_u8(Err on_eof) {
        int c = in.get();
        if (c == EOF) raise(on_eof, "unexpected end of model file: " + path);
        return static_cast<unsigned char>(c);
    }
    std::uint16_t get_u16(Err on_eof) {
        const std::uint16_t lo = get_u8(on_eof);
        const std::uint16_t hi = get_u8(on_eof);
        return static_cast<std::uint16_t>(lo | (hi << 8));
    }
    std::uint32_t get_u32(Err on_eof) {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(get_u8(on_eof)) << (8 * i);
        return v;
    }
};

} // namespace

void save_model(const NetworkParams& params, const NetSpec& spec, const std::string& path) {
    spec.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Err::IoFailure, "cannot write: " + path);

    out.write(kMagic, 4);
    out.put(static_cast<char>(kVersion));
    out.put(static_cast<char>(spec.in_channels));
    put_u16(out, static_cast<std::uint16_t>(spec.input_size));
    put_u16(out, static_cast<std::uint16_t>(spec.blocks.size()));
    for (const auto& b : spec.blocks) {
        put_u16(out, static_cast<std::uint16_t>(b.in_ch));
        put_u16(out, static_cast<std::uint16_t>(b.out_ch));
        put_u16(out, static_cast<std::uint16_t>(b.kernel));
    }

    std::vector<unsigned char> blob;
    blob.reserve(params.total_count() * 4);
    for (const auto& t : params.tensors) {
        for (float v : t.data) {
            std::uint32_t bits;
            std::memcpy(&bits, &v, 4);
            for (int i = 0; i < 4; ++i)
                blob.push_back(static_cast<unsigned char>((bits >> (8 * i)) & 0xFF));
        }
    }
    put_u32(out, static_cast<std::uint32_t>(params.total_count()));
    out.write(reinterpret_cast<const char*>(blob.data()), static_cast<std::streamsize>(blob.size()));
    put_u32(out, crc32(blob.data(), blob.size()));
    if (!out) raise(Err::IoFailure, "write failed: " + path);
}

std::pair<NetworkParams, NetSpec> load_model(const std::string& path) {
    if (!std::filesystem::exists(path)) raise(Err::FileNotFound, "no such file: " + path);
    Reader r{std::ifstream(path, std::ios::binary), path};
    if (!r.in) raise(Err::IoFailure, "cannot open: " + path);

    char magic[4];
    r.in.read(magic, 4);
    if (r.in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0)
        raise(Err::CorruptHeader, "not a phasematch model file: " + path);
    const unsigned char version = r.get_u8(Err::CorruptHeader);
    if (version != kVersion)
        raise(Err::VersionMismatch, "unsupported model version " + std::to_string(version));

    NetSpec spec;
    spec.in_channels = r.get_u8(Err::CorruptHeader);
    spec.input_size = r.get_u16(Err::CorruptHeader);
    const int n_blocks = r.get_u16(Err::CorruptHeader);
    for (int i = 0; i < n_blocks; ++i) {
        ConvBlockSpec b;
        b.in_ch = r.get_u16(Err::CorruptHeader);
        b.out_ch = r.get_u16(Err::CorruptHeader);
        b.kernel = r.get_u16(Err::CorruptHeader);
        spec.blocks.push_back(b);
    }
    try {
        spec.validate();
    } catch (const Error&) {
        raise(Err::CorruptHeader, "model spec descriptor is inconsistent: " + path);
    }

    NetworkParams params = zero_params(spec);
    const std::uint32_t declared = r.get_u32(Err::CorruptHeader);
    if (declared != params.total_count())
        raise(Err::CorruptHeader, "parameter count does not match spec: " + path);

    std::vector<unsigned char> blob(static_cast<std::size_t>(declared) * 4);
    r.in.read(reinterpret_cast<char*>(blob.data()), static_cast<std::streamsize>(blob.size()));
    if (static_cast<std::size_t>(r.in.gcount()) != blob.size())
        raise(Err::ChecksumMismatch, "model parameter blob truncated: " + path);
    const std::uint32_t stored_crc = r.get_u32(Err::ChecksumMismatch);
    if (stored_crc != crc32(blob.data(), blob.size()))
        raise(Err::ChecksumMismatch, "model checksum mismatch: " + path);

    std::size_t off = 0;
    for (auto& t : params.tensors) {
        for (float& v : t.data) {
            std::uint32_t bits = 0;
            for (int i = 0; i < 4; ++i)
                bits |= static_cast<std::uint32_t>(blob[off + static_cast<std::size_t>(i)])
                        << (8 * i);
            std::memcpy(&v, &bits, 4);
            off += 4;
        }
    }
    return {std::move(params), spec};
}

} // namespace phasematch
