#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "amil/errors.hpp"
#include "amil/families.hpp"
#include "amil/matrix.hpp"
#include "amil/model.hpp"

namespace amil::net {

enum class LossKind : std::uint32_t { BinaryCE = 0, CategoricalCE = 1 };

struct TrainSchedule {
    double initial_lr = 1e-3;
    double min_lr = 1e-4;
    double lr_reduction_factor = 0.31622776601683794; // sqrt(1/10)
    int patience = 10;
    std::size_t batch_events = 80000; // batch size rule: floor(batch_events / N_B) bags
    LossKind loss = LossKind::BinaryCE;
    bool dynamic_bags = true;
    int max_epochs = 500;
};

std::size_t batch_size_for(const TrainSchedule& schedule, std::size_t bag_size);

// A batch of bags stacked into one events matrix; offsets delimit the bags.
struct BagBatch {
    Matrix events;                     // [total_events x input_dim], un-normalized
    std::vector<std::size_t> offsets;  // n_bags + 1 entries
    std::vector<double> labels;        // 0/1, or the class index for softmax heads

    std::size_t n_bags() const noexcept { return offsets.empty() ? 0 : offsets.size() - 1; }
};

struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad;
};

// Mean loss over the batch plus the L2 kernel penalty, with the gradient for
// every trainable parameter. Dropout masks are drawn from `dropout_key`, so a
// repeated call with the same key sees the identical stochastic configuration.
// Batch-norm running statistics are updated unless update_running is false.
LossGrad loss_and_grad(BagModel& model, const BagBatch& batch, std::uint64_t dropout_key,
                       bool update_running = true);

// Mean loss in eval mode (running statistics, no dropout), L2 included.
double eval_loss(const BagModel& model, const BagBatch& batch, LossKind loss);

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double lr = 0.0;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
    int best_epoch = -1;
    double best_val = std::numeric_limits<double>::infinity();
};

class TrainingDivergedError : public Error {
public:
    TrainingDivergedError(const std::string& msg, TrainHistory history)
        : Error(msg), history_(std::move(history)) {}
    const TrainHistory& history() const noexcept { return history_; }

private:
    TrainHistory history_;
};

// Learning-rate reduction and early stopping against a validation monitor.
// The LR drops by `factor` after `patience` epochs without improvement
// (floored at min_lr); training stops after 2*patience stale epochs counted
// from the later of the last improvement and the last reduction.
class ScheduleTracker {
public:
    explicit ScheduleTracker(const TrainSchedule& schedule);

    struct Decision {
        bool improved = false;
        bool reduced_lr = false;
        bool stop = false;
    };
    Decision observe(double val_loss);

    double lr() const noexcept { return lr_; }
    double best() const noexcept { return best_; }

private:
    double lr_, min_lr_, factor_;
    int patience_;
    double best_ = std::numeric_limits<double>::infinity();
    int wait_lr_ = 0;
    int wait_stop_ = 0;
};

// One pool of events sharing a label (and, for ParamBinary, a paired theta).
// Bags drawn from a cell take n_signal_per_bag events from `events` plus
// n_background_per_bag events from `background` when contamination is on.
struct TrainCell {
    Matrix events;
    Matrix background; // empty when the cell is uncontaminated
    double label = 0.0;
    double paired_theta = 0.0;
    bool has_theta = false;
};

struct TrainData {
    std::vector<TrainCell> cells;
    std::size_t n_signal_per_bag = 1;
    std::size_t n_background_per_bag = 0;

    std::size_t bag_size() const noexcept { return n_signal_per_bag + n_background_per_bag; }
};

// Materializes one epoch's bags as batches. Exposed for tests.
std::vector<BagBatch> epoch_batches(const TrainData& data, const Topology& topo,
                                    std::size_t batch_size, std::uint64_t bag_seed);

// Adapts the model normalizer, then runs the schedule: dynamic re-bagging per
// epoch, Adam updates, LR reduction and early stopping on validation loss,
// best-validation weights restored on return.
TrainHistory train(BagModel& model, const TrainData& train_data, const TrainData& val_data,
                   const TrainSchedule& schedule, std::uint64_t seed);

// Symmetric parameterized-classifier training set over a theta grid that must
// contain {0, +-0.1, +-0.2}: positives (B_theta, theta); negatives (B_0, theta)
// for theta != 0 and, for theta = 0, bags from a 20/20/30/30 mixture of
// +-0.2/+-0.1 kinematics. Positive and negative event totals are equal.
TrainData build_pnn_training_set(const data::EventFamily& family,
                                 std::span<const double> theta_grid,
                                 std::size_t events_per_class, std::uint64_t seed);

// Same construction from caller-provided event pools (one per grid theta).
TrainData build_pnn_cells(std::span<const Matrix> pools, std::span<const double> theta_grid,
                          std::uint64_t seed);

} // namespace amil::net
