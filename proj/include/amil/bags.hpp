#pragma once

#include <cstdint>
#include <vector>

#include "amil/families.hpp"
#include "amil/matrix.hpp"

namespace amil::data {

// A fixed-size set of events sharing one hypothesis label.
struct Bag {
    Matrix events; // [n x total_dim]
    double theta_label = 0.0;
    int n_signal = 0;
    int n_background = 0;

    std::size_t size() const noexcept { return events.rows(); }
};

struct SplitSpec {
    double test_frac = 0.2;
    double val_frac = 0.2; // applied to the remainder after the test cut
    std::uint64_t seed = 0;
};

struct EventSplit {
    EventSet train, val, test;
};

// Groups floor(n / n_b) disjoint bags of n_b events each; leftovers are
// discarded. A different shuffle_seed regroups the same events differently.
std::vector<Bag> make_bags(const EventSet& events, std::size_t n_b, std::uint64_t shuffle_seed);

// Bags of exactly n_signal_per_bag signal events plus
// round(c_bkgrd * n_signal_per_bag) background events, positions shuffled.
std::vector<Bag> contaminate(const EventSet& signal, const EventSet& background, double c_bkgrd,
                             std::size_t n_signal_per_bag, std::uint64_t seed);

std::size_t background_per_bag(double c_bkgrd, std::size_t n_signal_per_bag);

// Disjoint event-level partition: test first, then train/val from the rest.
EventSplit split(const EventSet& events, const SplitSpec& spec);

} // namespace amil::data
