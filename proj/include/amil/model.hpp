#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "amil/bags.hpp"
#include "amil/matrix.hpp"
#include "amil/rng.hpp"

namespace amil::net {

enum class HeadKind : std::uint32_t {
    BinarySigmoid = 0,
    MultiClassSoftmax = 1,
    ParamBinary = 2, // binary head over (event features, theta) inputs
};

// Fixed embedding topology: input normalization, n_hidden dense layers of
// hidden_width units (dense -> batch norm -> ELU -> dropout), mean pooling
// across the events-in-bag axis, then the head.
struct Topology {
    int input_dim = 1; // includes the appended theta slot for ParamBinary
    int hidden_width = 64;
    int n_hidden = 3;
    HeadKind head = HeadKind::BinarySigmoid;
    int n_classes = 1; // softmax width; ignored by sigmoid heads
    double dropout_rate = 0.1;
    double l2 = 1e-3;
    double bn_eps = 1e-3;
    double bn_momentum = 0.99;

    int head_out() const noexcept { return head == HeadKind::MultiClassSoftmax ? n_classes : 1; }
    int event_dim() const noexcept { return head == HeadKind::ParamBinary ? input_dim - 1 : input_dim; }
};

// Trainable parameter count for the topology (batch-norm scale/shift included,
// running statistics and the input normalizer excluded).
std::size_t param_count(const Topology& topo);

struct Normalizer {
    std::vector<double> mean, stdev;

    void adapt(const Matrix& events);
    void apply(Matrix& events) const;
    bool adapted() const noexcept { return !mean.empty(); }
};

struct HeadOutput {
    std::vector<double> logits;
    std::vector<double> probs;
};

// Offsets of the parameter blocks inside the flat parameter vector. The block
// order is the checkpoint serialization order.
struct ParamLayout {
    struct Block {
        std::size_t offset = 0, size = 0;
    };
    struct Layer {
        Block w, b, gamma, beta;
    };
    std::vector<Layer> layers;
    Block head_w, head_b;
    std::size_t total = 0;

    struct Running {
        Block mean, var;
    };
    std::vector<Running> running;
    std::size_t running_total = 0;
};

ParamLayout make_layout(const Topology& topo);

class BagModel {
public:
    BagModel(Topology topo, std::uint64_t init_seed);

    const Topology& topology() const noexcept { return topo_; }
    const ParamLayout& layout() const noexcept { return layout_; }

    std::span<double> params() noexcept { return params_; }
    std::span<const double> params() const noexcept { return params_; }
    std::span<double> running() noexcept { return running_; }
    std::span<const double> running() const noexcept { return running_; }

    Normalizer& norm() noexcept { return norm_; }
    const Normalizer& norm() const noexcept { return norm_; }

    std::span<const double> block(const ParamLayout::Block& b) const {
        return {params_.data() + b.offset, b.size};
    }
    std::span<double> block(const ParamLayout::Block& b) {
        return {params_.data() + b.offset, b.size};
    }

private:
    Topology topo_;
    ParamLayout layout_;
    std::vector<double> params_;
    std::vector<double> running_;
    Normalizer norm_;
};

// Per-event embeddings after the hidden stack. Training mode normalizes with
// the batch statistics of `events` and applies dropout when a stream is given;
// the model's running statistics are not touched.
Matrix embed(const BagModel& model, const Matrix& events, bool training = false,
             rng::Stream* dropout = nullptr);

// Arithmetic mean over the events axis (the pooled summary vector).
std::vector<double> pool(const Matrix& embeddings);

HeadOutput head_forward(const BagModel& model, std::span<const double> pooled);

HeadOutput forward(const BagModel& model, const data::Bag& bag, bool training = false,
                   rng::Stream* dropout = nullptr);
// ParamBinary forward: theta is appended to every event row before embedding.
HeadOutput forward(const BagModel& model, const data::Bag& bag, double theta,
                   bool training = false, rng::Stream* dropout = nullptr);

// Probability that the bag kinematics match theta (ParamBinary head only).
double predict_pnn(const BagModel& model, const data::Bag& bag, double theta);

// Events matrix with theta appended as the last column.
Matrix append_theta(const Matrix& events, double theta);

} // namespace amil::net
