#include "amil/fit.hpp"

#include <cmath>

#include "amil/errors.hpp"

namespace amil::stats {

double default_window_halfwidth(std::size_t n_b) {
    return n_b == 1 ? 0.7 : 0.4;
}

ParabolaFit parabola_fit(const LLRProfile& profile, double window_halfwidth) {
    if (!(window_halfwidth > 0.0)) throw InvalidParameterError("window halfwidth must be > 0");
    const std::size_t n = profile.theta_grid.size();
    if (n != profile.llr.size() || n == 0) throw ShapeError("malformed profile");

    // Grid argmin of -2*LLR (i.e. argmax of LLR).
    std::size_t i_min = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (-2.0 * profile.llr[i] < -2.0 * profile.llr[i_min]) i_min = i;
    const double center = profile.theta_grid[i_min];

    std::vector<double> ts, ys;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(profile.theta_grid[i] - center) <= window_halfwidth + 1e-12) {
            ts.push_back(profile.theta_grid[i] - center); // shifted for conditioning
            ys.push_back(-2.0 * profile.llr[i]);
        }
    }
    if (ts.size() < 3)
        throw InsufficientPointsError("parabola fit needs at least 3 points in the window");

    // Normal equations for y = a t^2 + b t + c.
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    double sy = 0, sty = 0, st2y = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double t = ts[i], t2 = t * t;
        s0 += 1.0;
        s1 += t;
        s2 += t2;
        s3 += t2 * t;
        s4 += t2 * t2;
        sy += ys[i];
        sty += t * ys[i];
        st2y += t2 * ys[i];
    }
    // Solve the 3x3 system [s4 s3 s2; s3 s2 s1; s2 s1 s0] [a b c]^T = [st2y sty sy]^T.
    const double d = s4 * (s2 * s0 - s1 * s1) - s3 * (s3 * s0 - s1 * s2) + s2 * (s3 * s1 - s2 * s2);
    if (d == 0.0) throw DegenerateDesignError("singular design in parabola fit");
    const double a = (st2y * (s2 * s0 - s1 * s1) - s3 * (sty * s0 - sy * s1) +
                      s2 * (sty * s1 - sy * s2)) / d;
    const double b = (s4 * (sty * s0 - sy * s1) - st2y * (s3 * s0 - s1 * s2) +
                      s2 * (s3 * sy - s2 * sty)) / d;
    const double c = (s4 * (s2 * sy - s1 * sty) - s3 * (s3 * sy - s2 * sty) +
                      st2y * (s3 * s1 - s2 * s2)) / d;

    if (!(a > 0.0)) throw NonConvexFitError("fitted parabola is not convex");

    ParabolaFit fit;
    fit.theta_hat = center - b / (2.0 * a);
    fit.i_curv = a;
    fit.n_fit_points = static_cast<int>(ts.size());
    fit.window_lo = center - window_halfwidth;
    fit.window_hi = center + window_halfwidth;
    fit.vertex_in_window = fit.theta_hat >= fit.window_lo && fit.theta_hat <= fit.window_hi;

    double mse = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double pred = a * ts[i] * ts[i] + b * ts[i] + c;
        const double r = pred - ys[i];
        mse += r * r;
    }
    fit.fit_mse = mse / static_cast<double>(ts.size());
    return fit;
}

} // namespace amil::stats
