#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phasematch/image.hpp"

namespace phasematch {

// Dense numeric array. Activations and gradients are double; trainable
// parameters are float32 so the model file round-trips bit-exactly.
struct Tensor {
    std::vector<int> shape;
    std::vector<double> data;

    static Tensor zeros(std::vector<int> shape);
    std::size_t count() const { return data.size(); }
};

struct ConvBlockSpec {
    int in_ch = 0;
    int out_ch = 0;
    int kernel = 0;
};

// conv (valid, stride 1) -> relu -> 2x2 max pool blocks, then a fully
// connected layer to one score.
struct NetSpec {
    int input_size = 32;
    int in_channels = 2; // 2: two-channel head, 1: siamese branch
    std::vector<ConvBlockSpec> blocks;

    static NetSpec two_channel_default(int input_size);
    static NetSpec siamese_default(int input_size);

    int spatial_after_blocks() const;
    int flat_features() const;
    void validate() const;
};

struct ParamTensor {
    std::vector<int> shape;
    std::vector<float> data;
};

// Layer parameters in declaration order:
// conv0.W [out,in,k,k], conv0.b [out], conv1.W, conv1.b, ..., fc.W [1,flat], fc.b [1]
struct NetworkParams {
    std::vector<ParamTensor> tensors;
    std::size_t total_count() const;
};

// Uniform init in +-sqrt(6 / (fan_in + fan_out)), seeded.
NetworkParams init_params(const NetSpec& spec, std::uint64_t seed);
NetworkParams zero_params(const NetSpec& spec);

// Gradient buffers matching a NetworkParams layout.
struct Gradients {
    std::vector<std::vector<double>> tensors;

    static Gradients zeros_like(const NetworkParams& params);
};

// Stacks two patches as one 2-channel input, standardizing each.
Tensor make_input(const NetSpec& spec, const Patch& a, const Patch& b);

// Raw forward pass over a prepared input tensor.
double forward(const NetSpec& spec, const NetworkParams& params, const Tensor& input);

// Similarity score of a patch pair; > 0 reads as "match". Patches are
// standardized internally (idempotent if already standardized).
double forward_two_channel(const NetSpec& spec, const NetworkParams& params,
                           const Patch& a, const Patch& b);

// Descriptor from a single-channel branch: conv blocks then flatten.
std::vector<double> siamese_embed(const NetSpec& spec, const NetworkParams& params,
                                  const Patch& patch);

// Euclidean distance between descriptors.
double siamese_distance(const std::vector<double>& d1, const std::vector<double>& d2);

enum class LossKind { Hinge, Logistic };

// hinge: max(0, 1 - label*score); logistic: ln(1 + e^{-label*score})
double loss_value(double score, int label, LossKind kind);

struct LabeledPair {
    Patch a;
    Patch b;
    int label = 1; // +1 match, -1 non-match
};

// Mean loss over the batch and its exact gradient w.r.t. every parameter.
// Per-sample gradients are computed independently (possibly in parallel)
// and reduced in sample order, so the result does not depend on the
// worker count.
std::pair<Gradients, double> backward(const NetSpec& spec, const NetworkParams& params,
                                      const std::vector<LabeledPair>& batch, LossKind kind);

struct TrainConfig {
    int epochs = 20;
    int batch_size = 32;
    double base_lr = 0.01;
    double lr_decay_factor = 0.5; // step decay
    int lr_decay_period = 5;
    double weight_decay = 0.0;
    std::uint64_t seed = 1;
    LossKind loss = LossKind::Hinge;
    bool swap_augment = true; // also feed (b,a) for every (a,b)
};

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_acc = 0.0;
    double lr = 0.0;
};

struct TrainResult {
    NetworkParams params; // snapshot with the best validation accuracy
    std::vector<EpochStats> history;
};

TrainResult train(const std::vector<LabeledPair>& train_set,
                  const std::vector<LabeledPair>& val_set, const NetSpec& spec,
                  const TrainConfig& config);

bool predict(const NetSpec& spec, const NetworkParams& params, const Patch& a, const Patch& b,
             double threshold = 0.0);

// Model file: magic, version, spec descriptor, float32 little-endian
// parameter blob in declaration order, CRC32 of the blob.
void save_model(const NetworkParams& params, const NetSpec& spec, const std::string& path);
std::pair<NetworkParams, NetSpec> load_model(const std::string& path);

std::uint32_t crc32(const unsigned char* data, std::size_t len);

} // namespace phasematch
