#include "amil/families.hpp"

#include <cmath>
#include <numbers>

#include "amil/errors.hpp"
#include "amil/rng.hpp"

namespace amil::data {

namespace {

constexpr double kLogSqrt2Pi = 0.9189385332046727; // ln sqrt(2*pi)

void check_family(const EventFamily& family) {
    if (family.dim < 1) throw InvalidParameterError("event family needs dim >= 1");
    if (family.nuisance_dims < 0) throw InvalidParameterError("nuisance_dims must be non-negative");
}

void check_theta(double theta) {
    if (!std::isfinite(theta)) throw InvalidParameterError("theta must be finite");
}

void check_event(const EventFamily& family, std::span<const double> x) {
    if (static_cast<int>(x.size()) != family.total_dim())
        throw ShapeError("event dimensionality does not match family");
    for (double v : x)
        if (!std::isfinite(v)) throw InvalidValueError("event feature is not finite");
}

} // namespace

EventSet sample_events(const EventFamily& family, double theta, std::size_t n, std::uint64_t seed) {
    check_family(family);
    check_theta(theta);
    if (n < 1) throw InvalidParameterError("sample_events needs n >= 1");

    EventSet set{family, theta, seed, Matrix(n, family.total_dim())};
    rng::Stream stream(seed, "events");
    const int d = family.total_dim();
    const double scale = family.kind == FamilyKind::GaussLogVar ? std::exp(0.5 * theta) : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        double* row = set.features.row(i);
        for (int j = 0; j < d; ++j) row[j] = stream.next_normal();
        if (family.kind == FamilyKind::GaussShift)
            row[0] += theta;
        else
            row[0] *= scale;
    }
    return set;
}

EventSet sample_background(const EventFamily& family, std::size_t n, std::uint64_t seed) {
    EventFamily standard{FamilyKind::GaussShift, family.dim, family.nuisance_dims};
    EventSet set = sample_events(standard, 0.0, n, seed);
    set.family = family; // keep the caller's dimensional bookkeeping
    return set;
}

double log_density(const EventFamily& family, std::span<const double> x, double theta) {
    check_family(family);
    check_theta(theta);
    check_event(family, x);

    double lp = 0.0;
    if (family.kind == FamilyKind::GaussShift) {
        const double r = x[0] - theta;
        lp += -0.5 * r * r - kLogSqrt2Pi;
    } else {
        lp += -0.5 * x[0] * x[0] * std::exp(-theta) - 0.5 * theta - kLogSqrt2Pi;
    }
    for (std::size_t j = 1; j < x.size(); ++j)
        lp += -0.5 * x[j] * x[j] - kLogSqrt2Pi;
    return lp;
}

double true_llr(const EventFamily& family, std::span<const double> x, double theta1, double theta0) {
    check_family(family);
    check_theta(theta1);
    check_theta(theta0);
    check_event(family, x);

    // Coordinates beyond the first are theta-independent and cancel exactly.
    if (family.kind == FamilyKind::GaussShift)
        return (theta1 - theta0) * x[0] - 0.5 * (theta1 * theta1 - theta0 * theta0);
    return 0.5 * x[0] * x[0] * (std::exp(-theta0) - std::exp(-theta1)) - 0.5 * (theta1 - theta0);
}

double true_score(const EventFamily& family, std::span<const double> x, double theta) {
    check_family(family);
    check_theta(theta);
    check_event(family, x);

    if (family.kind == FamilyKind::GaussShift) return x[0] - theta;
    return 0.5 * x[0] * x[0] * std::exp(-theta) - 0.5;
}

double true_fisher(const EventFamily& family, double theta) {
    check_family(family);
    check_theta(theta);
    return family.kind == FamilyKind::GaussShift ? 1.0 : 0.5;
}

} // namespace amil::data
