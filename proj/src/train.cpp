#include "amil/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "amil/rng.hpp"

namespace amil::net {

std::size_t batch_size_for(const TrainSchedule& schedule, std::size_t bag_size) {
    if (bag_size < 1) throw InvalidParameterError("bag size must be >= 1");
    return std::max<std::size_t>(1, schedule.batch_events / bag_size);
}

ScheduleTracker::ScheduleTracker(const TrainSchedule& schedule)
    : lr_(schedule.initial_lr), min_lr_(schedule.min_lr),
      factor_(schedule.lr_reduction_factor), patience_(schedule.patience) {
    if (!(factor_ > 0.0 && factor_ < 1.0))
        throw InvalidSpecError("lr_reduction_factor must lie in (0,1)");
    if (patience_ < 1) throw InvalidSpecError("patience must be >= 1");
}

ScheduleTracker::Decision ScheduleTracker::observe(double val_loss) {
    Decision d;
    if (val_loss < best_) {
        best_ = val_loss;
        wait_lr_ = 0;
        wait_stop_ = 0;
        d.improved = true;
        return d;
    }
    ++wait_lr_;
    ++wait_stop_;
    if (wait_lr_ >= patience_ && lr_ > min_lr_) {
        lr_ = std::max(min_lr_, lr_ * factor_);
        wait_lr_ = 0;
        wait_stop_ = 0; // the stop window restarts at the last reduction
        d.reduced_lr = true;
    }
    d.stop = wait_stop_ >= 2 * patience_;
    return d;
}

namespace {

struct BagRef {
    std::size_t cell = 0;
    std::size_t index = 0; // bag index within the cell's epoch permutation
};

void validate_data(const TrainData& data) {
    if (data.cells.empty()) throw InsufficientDataError("no training cells");
    if (data.n_signal_per_bag < 1) throw InvalidParameterError("n_signal_per_bag must be >= 1");
    for (const auto& cell : data.cells) {
        if (cell.events.rows() < data.n_signal_per_bag)
            throw InsufficientDataError("a cell holds fewer events than one bag");
        if (data.n_background_per_bag > 0 && cell.background.rows() < data.n_background_per_bag)
            throw InsufficientDataError("a cell holds fewer background events than one bag");
    }
}

std::size_t cell_bags(const TrainData& data, const TrainCell& cell) {
    std::size_t n = cell.events.rows() / data.n_signal_per_bag;
    if (data.n_background_per_bag > 0)
        n = std::min(n, cell.background.rows() / data.n_background_per_bag);
    return n;
}

} // namespace

std::vector<BagBatch> epoch_batches(const TrainData& data, const Topology& topo,
                                    std::size_t batch_size, std::uint64_t bag_seed) {
    validate_data(data);
    const bool pnn = topo.head == HeadKind::ParamBinary;
    const std::size_t event_dim =
        data.cells.front().events.cols() + (pnn ? 1 : 0);
    if (static_cast<int>(event_dim) != topo.input_dim)
        throw ShapeError("training data does not match the model input width");

    // Per-cell event permutations for this epoch.
    std::vector<std::vector<std::size_t>> sig_perm(data.cells.size());
    std::vector<std::vector<std::size_t>> bg_perm(data.cells.size());
    std::vector<BagRef> refs;
    for (std::size_t c = 0; c < data.cells.size(); ++c) {
        rng::Stream s(bag_seed, "epoch-signal", c);
        sig_perm[c] = rng::shuffled_indices(data.cells[c].events.rows(), s);
        if (data.n_background_per_bag > 0) {
            rng::Stream sb(bag_seed, "epoch-background", c);
            bg_perm[c] = rng::shuffled_indices(data.cells[c].background.rows(), sb);
        }
        const std::size_t n = cell_bags(data, data.cells[c]);
        for (std::size_t b = 0; b < n; ++b) refs.push_back({c, b});
    }
    if (refs.empty()) throw InsufficientDataError("no bags could be formed");

    rng::Stream order_stream(bag_seed, "epoch-order");
    const auto order = rng::shuffled_indices(refs.size(), order_stream);

    const std::size_t bag_rows = data.bag_size();
    std::vector<BagBatch> batches;
    for (std::size_t start = 0; start < refs.size(); start += batch_size) {
        const std::size_t count = std::min(batch_size, refs.size() - start);
        BagBatch batch;
        batch.events = Matrix(count * bag_rows, event_dim);
        batch.offsets.resize(count + 1);
        batch.labels.resize(count);
        for (std::size_t b = 0; b < count; ++b) {
            const BagRef ref = refs[order[start + b]];
            const TrainCell& cell = data.cells[ref.cell];
            batch.offsets[b] = b * bag_rows;
            batch.labels[b] = cell.label;
            const std::size_t row0 = b * bag_rows;
            const std::size_t ecols = cell.events.cols();
            for (std::size_t i = 0; i < data.n_signal_per_bag; ++i) {
                const std::size_t src = sig_perm[ref.cell][ref.index * data.n_signal_per_bag + i];
                std::memcpy(batch.events.row(row0 + i), cell.events.row(src),
                            ecols * sizeof(double));
            }
            for (std::size_t i = 0; i < data.n_background_per_bag; ++i) {
                const std::size_t src =
                    bg_perm[ref.cell][ref.index * data.n_background_per_bag + i];
                std::memcpy(batch.events.row(row0 + data.n_signal_per_bag + i),
                            cell.background.row(src), ecols * sizeof(double));
            }
            if (pnn)
                for (std::size_t i = 0; i < bag_rows; ++i)
                    batch.events(row0 + i, ecols) = cell.paired_theta;
        }
        batch.offsets[count] = count * bag_rows;
        batches.push_back(std::move(batch));
    }
    return batches;
}

namespace {

Matrix adapt_sample(const TrainData& data, bool pnn) {
    std::size_t rows = 0;
    for (const auto& cell : data.cells) rows += cell.events.rows() + cell.background.rows();
    const std::size_t cols = data.cells.front().events.cols() + (pnn ? 1 : 0);
    Matrix out(rows, cols);
    std::size_t r = 0;
    for (const auto& cell : data.cells) {
        for (std::size_t i = 0; i < cell.events.rows(); ++i, ++r) {
            std::memcpy(out.row(r), cell.events.row(i), cell.events.cols() * sizeof(double));
            if (pnn) out(r, cols - 1) = cell.paired_theta;
        }
        for (std::size_t i = 0; i < cell.background.rows(); ++i, ++r) {
            std::memcpy(out.row(r), cell.background.row(i), cell.background.cols() * sizeof(double));
            if (pnn) out(r, cols - 1) = cell.paired_theta;
        }
    }
    return out;
}

} // namespace

TrainHistory train(BagModel& model, const TrainData& train_data, const TrainData& val_data,
                   const TrainSchedule& schedule, std::uint64_t seed) {
    validate_data(train_data);
    validate_data(val_data);
    const Topology& topo = model.topology();
    if ((schedule.loss == LossKind::CategoricalCE) != (topo.head == HeadKind::MultiClassSoftmax))
        throw InvalidSpecError("loss kind does not match the model head");

    const bool pnn = topo.head == HeadKind::ParamBinary;
    model.norm().adapt(adapt_sample(train_data, pnn));

    const std::size_t batch_size = batch_size_for(schedule, train_data.bag_size());
    const auto val_batches =
        epoch_batches(val_data, topo, batch_size, rng::derive(seed, "val-bags"));

    ScheduleTracker tracker(schedule);
    AdamState adam(model.params().size());
    TrainHistory history;
    std::vector<double> best_params, best_running;

    for (int epoch = 0; epoch < schedule.max_epochs; ++epoch) {
        const std::uint64_t bag_seed =
            rng::derive(seed, "rebag", schedule.dynamic_bags ? static_cast<std::uint64_t>(epoch) : 0);
        const auto batches = epoch_batches(train_data, topo, batch_size, bag_seed);

        double train_loss = 0.0;
        for (std::size_t i = 0; i < batches.size(); ++i) {
            LossGrad lg;
            try {
                lg = loss_and_grad(model, batches[i],
                                   rng::derive(seed, "dropout-batch",
                                               static_cast<std::uint64_t>(epoch) * 1000003 + i));
                adam.step(model.params(), lg.grad, tracker.lr());
            } catch (const InvalidValueError& e) {
                throw TrainingDivergedError(std::string("training diverged: ") + e.what(),
                                            std::move(history));
            }
            train_loss += lg.loss;
        }
        train_loss /= static_cast<double>(batches.size());

        double val_loss = 0.0;
        std::size_t val_bags = 0;
        for (const auto& vb : val_batches) {
            val_loss += eval_loss(model, vb, schedule.loss) * static_cast<double>(vb.n_bags());
            val_bags += vb.n_bags();
        }
        val_loss /= static_cast<double>(val_bags);
        if (!std::isfinite(val_loss))
            throw TrainingDivergedError("validation loss is not finite", std::move(history));

        const auto decision = tracker.observe(val_loss);
        history.epochs.push_back({epoch, train_loss, val_loss, tracker.lr()});
        if (decision.improved) {
            history.best_epoch = epoch;
            history.best_val = val_loss;
            best_params.assign(model.params().begin(), model.params().end());
            best_running.assign(model.running().begin(), model.running().end());
        }
        if (decision.stop) break;
    }

    if (!best_params.empty()) {
        std::copy(best_params.begin(), best_params.end(), model.params().begin());
        std::copy(best_running.begin(), best_running.end(), model.running().begin());
    }
    return history;
}

namespace {

constexpr double kGridEps = 1e-9;

std::ptrdiff_t grid_index(std::span<const double> grid, double theta) {
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (std::abs(grid[i] - theta) < kGridEps) return static_cast<std::ptrdiff_t>(i);
    return -1;
}

Matrix take_shuffled_rows(const Matrix& pool, std::size_t count, rng::Stream& stream) {
    const auto idx = rng::shuffled_indices(pool.rows(), stream);
    Matrix out(count, pool.cols());
    for (std::size_t i = 0; i < count; ++i)
        std::memcpy(out.row(i), pool.row(idx[i]), pool.cols() * sizeof(double));
    return out;
}

} // namespace

TrainData build_pnn_cells(std::span<const Matrix> pools, std::span<const double> theta_grid,
                          std::uint64_t seed) {
    if (pools.size() != theta_grid.size())
        throw InvalidGridError("one event pool per grid point required");
    const std::ptrdiff_t i_zero = grid_index(theta_grid, 0.0);
    const std::ptrdiff_t i_p1 = grid_index(theta_grid, 0.1);
    const std::ptrdiff_t i_m1 = grid_index(theta_grid, -0.1);
    const std::ptrdiff_t i_p2 = grid_index(theta_grid, 0.2);
    const std::ptrdiff_t i_m2 = grid_index(theta_grid, -0.2);
    if (i_zero < 0 || i_p1 < 0 || i_m1 < 0 || i_p2 < 0 || i_m2 < 0)
        throw InvalidGridError("theta grid must contain 0, +-0.1 and +-0.2");

    TrainData data;
    // Positives: each pool paired with its own theta.
    for (std::size_t k = 0; k < pools.size(); ++k) {
        TrainCell cell;
        cell.events = pools[k];
        cell.label = 1.0;
        cell.paired_theta = theta_grid[k];
        cell.has_theta = true;
        data.cells.push_back(std::move(cell));
    }
    // Negatives: reference kinematics paired with every non-zero theta.
    const std::size_t n = pools[static_cast<std::size_t>(i_zero)].rows();
    for (std::size_t k = 0; k < pools.size(); ++k) {
        if (static_cast<std::ptrdiff_t>(k) == i_zero) continue;
        TrainCell cell;
        cell.events = pools[static_cast<std::size_t>(i_zero)];
        cell.label = 0.0;
        cell.paired_theta = theta_grid[k];
        cell.has_theta = true;
        data.cells.push_back(std::move(cell));
    }
    // Negatives for theta = 0: near-zero kinematics mixture, 20% each from
    // +-0.2 and 30% each from +-0.1 of the positive pool size.
    {
        const std::size_t n_p2 = static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(n)));
        const std::size_t n_m2 = n_p2;
        const std::size_t n_p1 = static_cast<std::size_t>(std::llround(0.3 * static_cast<double>(n)));
        const std::size_t n_m1 = n - n_p2 - n_m2 - n_p1;
        const std::ptrdiff_t src[4] = {i_p2, i_m2, i_p1, i_m1};
        const std::size_t cnt[4] = {n_p2, n_m2, n_p1, n_m1};
        Matrix mix(n, pools[0].cols());
        std::size_t r = 0;
        for (int s = 0; s < 4; ++s) {
            const Matrix& pool = pools[static_cast<std::size_t>(src[s])];
            if (pool.rows() < cnt[s])
                throw InsufficientDataError("mixture source pool too small");
            rng::Stream stream(seed, "pnn-mixture", static_cast<std::uint64_t>(s));
            const Matrix rows = take_shuffled_rows(pool, cnt[s], stream);
            for (std::size_t i = 0; i < cnt[s]; ++i, ++r)
                std::memcpy(mix.row(r), rows.row(i), mix.cols() * sizeof(double));
        }
        TrainCell cell;
        cell.events = std::move(mix);
        cell.label = 0.0;
        cell.paired_theta = 0.0;
        cell.has_theta = true;
        data.cells.push_back(std::move(cell));
    }
    return data;
}

TrainData build_pnn_training_set(const data::EventFamily& family,
                                 std::span<const double> theta_grid,
                                 std::size_t events_per_class, std::uint64_t seed) {
    if (events_per_class < 1) throw InvalidParameterError("events_per_class must be >= 1");
    std::vector<Matrix> pools;
    pools.reserve(theta_grid.size());
    for (std::size_t k = 0; k < theta_grid.size(); ++k)
        pools.push_back(
            data::sample_events(family, theta_grid[k], events_per_class, rng::derive(seed, "pnn-pool", k))
                .features);
    return build_pnn_cells(pools, theta_grid, rng::derive(seed, "pnn-negatives"));
}

} // namespace amil::net
