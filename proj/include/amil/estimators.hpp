#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "amil/fit.hpp"

namespace amil::stats {

double sample_mean(std::span<const double> xs);
// Unbiased (n-1) sample variance; the convention used throughout.
double sample_variance(std::span<const double> xs);

// I_MLE = 1 / Var(theta_hat) over pseudo-experiments.
double mle_fisher(std::span<const double> theta_hats);

// c_cicc = I_MLE / mean I_curv.
double calibration_constant(double i_mle, double i_curv_mean);

struct BiasCorrection {
    std::vector<double> corrected; // theta_hat - bias_hat, mean exactly theta_true
    double bias_hat = 0.0;
};
BiasCorrection bias_correct(std::span<const double> theta_hats, double theta_true);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// 1-sigma interval of the calibrated profile: theta_hat +- 1/sqrt(c * i_curv).
Interval confidence_interval(const ParabolaFit& fit, double c_cicc);

struct CoverageReport {
    std::vector<Interval> intervals;
    std::vector<bool> hits;
    double coverage = 0.0;
    double target = 0.683;
};
// Fraction of intervals containing theta_true; boundary counts as covered.
CoverageReport coverage(std::span<const Interval> intervals, double theta_true);

struct Snr {
    double event = 0.0; // |mu|/sigma
    double bag = 0.0;   // sqrt(n) |mu|/sigma
};
Snr snr(double mu_eta, double sigma_eta, std::size_t n);

// I_eff = I_true / (1 + sigma2_eps / (I_bag * dtheta^2)).
double effective_fisher(double i_true_dataset, double i_bag, double sigma2_eps,
                        double delta_theta);

// Fits sigma2_eps(N_B) = C * sqrt(N_B) through the origin after inverting the
// effective-information relation per point. Points are (N_B, dataset I_eff)
// measured on chunks carrying i_true_dataset = chunk_events * i_true_1.
double fit_error_variance_model(std::span<const std::pair<double, double>> points,
                                double i_true_dataset, double i_true_1, double delta_theta);

struct CalibrationRecord {
    double i_mle = 0.0;
    double i_curv_mean = 0.0;
    double c_cicc = 1.0;
    double bias_hat = 0.0;
    int n_pseudo = 0;
    std::uint64_t seed = 0;
};

} // namespace amil::stats
