#pragma once

#include <cstdint>
#include <span>

#include "amil/matrix.hpp"

namespace amil::data {

enum class FamilyKind : std::uint32_t {
    GaussShift = 0,  // Normal(theta, 1) on the first coordinate
    GaussLogVar = 1, // Normal(0, exp(theta)) on the first coordinate
};

// A parameterized event family with a tractable likelihood. Only the first
// coordinate depends on theta; the remaining dim-1 coordinates and all
// nuisance coordinates are independent standard normals.
struct EventFamily {
    FamilyKind kind = FamilyKind::GaussShift;
    int dim = 1;
    int nuisance_dims = 0;

    int total_dim() const noexcept { return dim + nuisance_dims; }
};

struct EventSet {
    EventFamily family;
    double theta = 0.0;
    std::uint64_t seed = 0;
    Matrix features; // [n x total_dim]

    std::size_t size() const noexcept { return features.rows(); }
};

// i.i.d. sample of n events at parameter theta; bit-identical for identical
// (family, theta, n, seed).
EventSet sample_events(const EventFamily& family, double theta, std::size_t n, std::uint64_t seed);

// Theta-independent standard-normal events with the same dimensionality as
// `family`; used as background contamination.
EventSet sample_background(const EventFamily& family, std::size_t n, std::uint64_t seed);

double log_density(const EventFamily& family, std::span<const double> x, double theta);

// Exact log p(x|theta1) - log p(x|theta0).
double true_llr(const EventFamily& family, std::span<const double> x, double theta1, double theta0);

// Exact score d/dtheta log p(x|theta).
double true_score(const EventFamily& family, std::span<const double> x, double theta);

// Exact per-event Fisher information.
double true_fisher(const EventFamily& family, double theta);

} // namespace amil::data
