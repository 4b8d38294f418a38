#include "amil/bags.hpp"

#include <cmath>
#include <cstring>

#include "amil/errors.hpp"
#include "amil/rng.hpp"

namespace amil::data {

namespace {

void copy_row(Matrix& dst, std::size_t dst_row, const Matrix& src, std::size_t src_row) {
    std::memcpy(dst.row(dst_row), src.row(src_row), src.cols() * sizeof(double));
}

EventSet take_rows(const EventSet& src, const std::vector<std::size_t>& idx,
                   std::size_t begin, std::size_t count, std::uint64_t seed) {
    EventSet out{src.family, src.theta, seed, Matrix(count, src.features.cols())};
    for (std::size_t i = 0; i < count; ++i)
        copy_row(out.features, i, src.features, idx[begin + i]);
    return out;
}

} // namespace

std::vector<Bag> make_bags(const EventSet& events, std::size_t n_b, std::uint64_t shuffle_seed) {
    if (n_b < 1) throw InvalidParameterError("bag size must be >= 1");
    if (events.size() < n_b)
        throw InsufficientDataError("fewer events than the requested bag size");

    rng::Stream stream(shuffle_seed, "make-bags");
    const auto idx = rng::shuffled_indices(events.size(), stream);
    const std::size_t n_bags = events.size() / n_b;
    const std::size_t cols = events.features.cols();

    std::vector<Bag> bags;
    bags.reserve(n_bags);
    for (std::size_t b = 0; b < n_bags; ++b) {
        Bag bag{Matrix(n_b, cols), events.theta, static_cast<int>(n_b), 0};
        for (std::size_t i = 0; i < n_b; ++i)
            copy_row(bag.events, i, events.features, idx[b * n_b + i]);
        bags.push_back(std::move(bag));
    }
    return bags;
}

std::size_t background_per_bag(double c_bkgrd, std::size_t n_signal_per_bag) {
    if (!(c_bkgrd >= 0.0))
        throw InvalidParameterError("background contamination must be >= 0");
    // Ties round half up (llround rounds half away from zero; c_bkgrd >= 0).
    return static_cast<std::size_t>(std::llround(c_bkgrd * static_cast<double>(n_signal_per_bag)));
}

std::vector<Bag> contaminate(const EventSet& signal, const EventSet& background, double c_bkgrd,
                             std::size_t n_signal_per_bag, std::uint64_t seed) {
    if (n_signal_per_bag < 1) throw InvalidParameterError("n_signal_per_bag must be >= 1");
    if (signal.features.cols() != background.features.cols() && c_bkgrd > 0.0)
        throw ShapeError("signal and background dimensionality differ");

    const std::size_t n_bg = background_per_bag(c_bkgrd, n_signal_per_bag);
    const std::size_t n_bags = signal.size() / n_signal_per_bag;
    if (n_bags < 1) throw InsufficientDataError("not enough signal events for one bag");
    if (background.size() < n_bags * n_bg)
        throw InsufficientDataError("not enough background events for the requested contamination");

    rng::Stream sig_stream(seed, "contaminate-signal");
    rng::Stream bg_stream(seed, "contaminate-background");
    rng::Stream pos_stream(seed, "contaminate-positions");
    const auto sig_idx = rng::shuffled_indices(signal.size(), sig_stream);
    const auto bg_idx = rng::shuffled_indices(background.size(), bg_stream);

    const std::size_t bag_size = n_signal_per_bag + n_bg;
    const std::size_t cols = signal.features.cols();

    std::vector<Bag> bags;
    bags.reserve(n_bags);
    for (std::size_t b = 0; b < n_bags; ++b) {
        Bag bag{Matrix(bag_size, cols), signal.theta,
                static_cast<int>(n_signal_per_bag), static_cast<int>(n_bg)};
        const auto order = rng::shuffled_indices(bag_size, pos_stream);
        for (std::size_t i = 0; i < bag_size; ++i) {
            const std::size_t slot = order[i];
            if (i < n_signal_per_bag)
                copy_row(bag.events, slot, signal.features, sig_idx[b * n_signal_per_bag + i]);
            else
                copy_row(bag.events, slot, background.features, bg_idx[b * n_bg + (i - n_signal_per_bag)]);
        }
        bags.push_back(std::move(bag));
    }
    return bags;
}

EventSplit split(const EventSet& events, const SplitSpec& spec) {
    if (!(spec.test_frac > 0.0 && spec.test_frac < 1.0) ||
        !(spec.val_frac > 0.0 && spec.val_frac < 1.0) ||
        !(spec.test_frac + spec.val_frac < 1.0))
        throw InvalidSpecError("split fractions must lie in (0,1) and sum below 1");

    const std::size_t n = events.size();
    const auto n_test = static_cast<std::size_t>(std::llround(spec.test_frac * static_cast<double>(n)));
    const auto n_val =
        static_cast<std::size_t>(std::llround(spec.val_frac * static_cast<double>(n - n_test)));
    if (n_test < 1 || n_val < 1 || n_test + n_val >= n)
        throw InvalidSpecError("split would leave an empty partition");

    rng::Stream stream(spec.seed, "split");
    const auto idx = rng::shuffled_indices(n, stream);
    EventSplit out;
    out.test = take_rows(events, idx, 0, n_test, rng::derive(spec.seed, "split-test"));
    out.val = take_rows(events, idx, n_test, n_val, rng::derive(spec.seed, "split-val"));
    out.train = take_rows(events, idx, n_test + n_val, n - n_test - n_val,
                          rng::derive(spec.seed, "split-train"));
    return out;
}

} // namespace amil::data
