#pragma once

#include "amil/llr.hpp"

namespace amil::stats {

// Local quadratic fit of -2*LLR around its grid minimum, so the curvature
// coefficient is the Fisher information directly.
struct ParabolaFit {
    double theta_hat = 0.0;
    double i_curv = 0.0;
    double fit_mse = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    int n_fit_points = 0;
    bool vertex_in_window = true; // false flags fits excluded from aggregates
};

// Unweighted least squares of -2*llr ~ a*(theta - theta_hat)^2 + c over the
// grid points within +-window_halfwidth of the grid argmin.
ParabolaFit parabola_fit(const LLRProfile& profile, double window_halfwidth);

// +-0.4 around the minimum; widened to +-0.7 for event-level (n_b = 1) fits.
double default_window_halfwidth(std::size_t n_b);

} // namespace amil::stats
