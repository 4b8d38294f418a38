#include "amil/estimators.hpp"

#include <cmath>
#include <set>

#include "amil/errors.hpp"

namespace amil::stats {

double sample_mean(std::span<const double> xs) {
    if (xs.empty()) throw InsufficientDataError("mean of empty sample");
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) throw InsufficientDataError("variance needs at least 2 values");
    const double m = sample_mean(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - m) * (x - m);
    return acc / static_cast<double>(xs.size() - 1);
}

double mle_fisher(std::span<const double> theta_hats) {
    const double v = sample_variance(theta_hats);
    if (v == 0.0)
        throw InfiniteInformationError("zero variance across pseudo-experiments");
    return 1.0 / v;
}

double calibration_constant(double i_mle, double i_curv_mean) {
    if (!(i_mle > 0.0) || !(i_curv_mean > 0.0))
        throw InvalidParameterError("calibration needs positive information estimates");
    return i_mle / i_curv_mean;
}

BiasCorrection bias_correct(std::span<const double> theta_hats, double theta_true) {
    if (theta_hats.size() < 2) throw InsufficientDataError("bias correction needs >= 2 values");
    BiasCorrection out;
    out.bias_hat = sample_mean(theta_hats) - theta_true;
    out.corrected.reserve(theta_hats.size());
    for (double t : theta_hats) out.corrected.push_back(t - out.bias_hat);
    return out;
}

Interval confidence_interval(const ParabolaFit& fit, double c_cicc) {
    if (!(c_cicc > 0.0)) throw InvalidParameterError("c_cicc must be > 0");
    if (!(fit.i_curv > 0.0)) throw NonConvexFitError("cannot build an interval from a non-convex fit");
    const double halfwidth = 1.0 / std::sqrt(c_cicc * fit.i_curv);
    return {fit.theta_hat - halfwidth, fit.theta_hat + halfwidth};
}

CoverageReport coverage(std::span<const Interval> intervals, double theta_true) {
    if (intervals.empty()) throw InsufficientDataError("coverage of no intervals");
    CoverageReport report;
    report.intervals.assign(intervals.begin(), intervals.end());
    report.hits.reserve(intervals.size());
    std::size_t n_hit = 0;
    for (const auto& iv : intervals) {
        if (!(std::isfinite(iv.lo) && std::isfinite(iv.hi)) || !(iv.lo < iv.hi))
            throw InvalidValueError("malformed confidence interval");
        const bool hit = theta_true >= iv.lo && theta_true <= iv.hi;
        report.hits.push_back(hit);
        n_hit += hit ? 1 : 0;
    }
    report.coverage = static_cast<double>(n_hit) / static_cast<double>(intervals.size());
    return report;
}

Snr snr(double mu_eta, double sigma_eta, std::size_t n) {
    if (!(sigma_eta > 0.0)) throw InvalidParameterError("sigma must be > 0");
    if (n < 1) throw InvalidParameterError("n must be >= 1");
    const double e = std::abs(mu_eta) / sigma_eta;
    return {e, std::sqrt(static_cast<double>(n)) * e};
}

double effective_fisher(double i_true_dataset, double i_bag, double sigma2_eps,
                        double delta_theta) {
    if (!(i_bag > 0.0)) throw InvalidParameterError("bag information must be > 0");
    if (delta_theta == 0.0) throw InvalidParameterError("delta_theta must be non-zero");
    if (!(sigma2_eps >= 0.0)) throw InvalidParameterError("sigma2_eps must be >= 0");
    return i_true_dataset / (1.0 + sigma2_eps / (i_bag * delta_theta * delta_theta));
}

double fit_error_variance_model(std::span<const std::pair<double, double>> points,
                                double i_true_dataset, double i_true_1, double delta_theta) {
    if (points.size() < 2) throw DegenerateDesignError("ansatz fit needs >= 2 points");
    std::set<double> distinct;
    for (const auto& [n_b, i_eff] : points) distinct.insert(n_b);
    if (distinct.size() < 2)
        throw DegenerateDesignError("ansatz fit needs >= 2 distinct bag sizes");
    if (!(i_true_dataset > 0.0) || !(i_true_1 > 0.0) || delta_theta == 0.0)
        throw InvalidParameterError("invalid ansatz fit inputs");

    // Invert I_eff = I_true / (1 + s/(N_B I_1 dtheta^2)) per point, then
    // regress s on sqrt(N_B) through the origin.
    double sxy = 0.0, sxx = 0.0;
    for (const auto& [n_b, i_eff] : points) {
        if (!(i_eff > 0.0)) throw InvalidParameterError("effective information must be > 0");
        const double s = (i_true_dataset / i_eff - 1.0) * n_b * i_true_1 * delta_theta * delta_theta;
        const double x = std::sqrt(n_b);
        sxy += x * s;
        sxx += x * x;
    }
    return sxy / sxx;
}

} // namespace amil::stats
