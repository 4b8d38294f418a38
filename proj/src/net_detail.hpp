#pragma once

// Internals shared by the forward pass and the hand-written backward pass.

#include <cstdint>
#include <vector>

#include "amil/matrix.hpp"
#include "amil/model.hpp"

namespace amil::net::detail {

struct LayerCache {
    Matrix xhat;                    // batch-normalized, pre scale/shift
    std::vector<double> inv_sigma;  // 1/sqrt(var + eps) per feature
    std::vector<std::uint8_t> keep; // dropout keep mask, empty when inactive
};

struct StackCache {
    Matrix x_norm; // normalizer-applied input, the first layer's input
    std::vector<LayerCache> layers;
};

// Runs the hidden stack over raw events. Training mode uses the batch
// statistics of `events`; running statistics are updated only when
// `update_running` is set (the model is mutated through the const_cast-free
// caller in that case).
Matrix run_stack(const BagModel& model, const Matrix& events, bool training,
                 rng::Stream* dropout, StackCache* cache, double* running_mut);

// Recomputes a layer's output (post ELU and dropout) from its cache.
Matrix layer_output(const BagModel& model, int layer, const LayerCache& cache);

void check_events_shape(const BagModel& model, const Matrix& events);

} // namespace amil::net::detail
