#pragma once

// Measurements on library output shared by unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <vector>

#include "implosion/profile.hpp"
#include "implosion/series.hpp"

namespace measure {

// Relative mismatch between the series derivative and the ODE right-hand side at y.
inline double series_ode_residual(const implosion::CoeffTable& t, double y) {
    implosion::SeriesValue v = implosion::eval(t, y);
    implosion::Derivatives d = implosion::rhs(t.params, {y, v.rho, v.omega});
    double r = std::abs(v.drho_dy - d.drho_dy) / std::abs(d.drho_dy);
    double w = std::abs(v.domega_dy - d.domega_dy) / std::abs(d.domega_dy);
    return std::max(r, w);
}

// Least-squares slope of log(residual) against log(y) at `points` log-spaced y in [lo, hi].
inline double residual_slope(const implosion::CoeffTable& t, double lo, double hi, int points) {
    std::vector<double> xs, ys;
    for (int i = 0; i < points; ++i) {
        double y = lo * std::pow(hi / lo, double(i) / (points - 1));
        xs.push_back(std::log(y));
        ys.push_back(std::log(series_ode_residual(t, y)));
    }
    double mx = 0, my = 0;
    for (int i = 0; i < points; ++i) {
        mx += xs[i] / points;
        my += ys[i] / points;
    }
    double sxy = 0, sxx = 0;
    for (int i = 0; i < points; ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxy / sxx;
}

// Plain trapezoid of 4 pi y^3 rho in log y over the samples.
inline double trapezoid_mass(const std::vector<implosion::ProfileSample>& s) {
    double m = 0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        double h = std::log(s[i].state.y / s[i - 1].state.y);
        auto f = [](const implosion::ProfileSample& p) {
            return 4 * std::numbers::pi * std::pow(p.state.y, 3) * p.state.rho;
        };
        m += 0.5 * h * (f(s[i - 1]) + f(s[i]));
    }
    return m;
}

}  // namespace measure
