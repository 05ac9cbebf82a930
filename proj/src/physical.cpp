#include "implosion/physical.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

// Boost 1.74 pchip.hpp calls isnan unqualified
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

namespace implosion {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

FarField far_field(const Params& p) {
    double g = p.gamma(), alpha = p.alpha();
    if (g == alpha) throw DomainError("far field undefined for gamma = alpha");
    double md = p.mass_denominator();
    double d43 = std::fma(-3.0, g, 4.0);
    double base = 2.0 * std::numbers::pi * (2.0 - g) * (2.0 - g) / ((g - alpha) * md);
    FarField ff;
    ff.rho_amplitude = std::pow(base, -md / ((2.0 - g) * d43)) * std::pow(2.0 - g, alpha / d43);
    ff.rho_exponent = (2.0 - alpha) / (g - 2.0);
    ff.p_amplitude = base * ff.rho_amplitude * ff.rho_amplitude;
    ff.p_exponent = 2.0 * (g - alpha) / (g - 2.0);
    ff.omega = 2.0 - g;
    return ff;
}

double far_field_density(const FarField& ff, double y) {
    return ff.rho_amplitude * std::pow(y, ff.rho_exponent);
}

ProfileState far_field_state(const FarField& ff, double y) {
    return {y, far_field_density(ff, y), ff.omega};
}

double velocity(const Params& p, const ProfileState& s) {
    if (s.y == 0) return 0.0;
    return 2.0 * s.y * (s.omega - (2.0 - p.gamma())) / (2.0 - p.alpha());
}

double mass(const Params& p, const ProfileState& s) {
    return 4.0 * std::numbers::pi * s.y * s.y * s.y * s.rho * s.omega / p.mass_denominator();
}

ProfileState profile_at(const Solution& sol, double y) {
    const auto& smp = sol.profile.samples;
    if (!(y >= 0)) throw RangeError("y must be nonnegative (got " + fmt(y) + ")");
    if (y == 0) return {0.0, sol.table.params.sonic.rho0, sol.table.params.sonic.omega0};
    if (smp.empty() || y <= smp.front().state.y) {
        SeriesValue v = eval(sol.table, y);
        return {y, v.rho, v.omega};
    }
    double y_last = smp.back().state.y;
    // admit roundoff in y = r/(-t)^(1/b) at the last sample
    if (y > y_last && y <= y_last * (1 + 1e-12)) y = y_last;
    if (y > y_last)
        throw RangeError("y = " + fmt(y) + " lies beyond the computed profile (y_max = " + fmt(y_last) +
                         "); rerun solve with --ymax >= " + fmt(y));
    std::vector<double> s(smp.size()), rho(smp.size()), omega(smp.size());
    for (std::size_t i = 0; i < smp.size(); ++i) {
        s[i] = std::log(smp[i].state.y);
        rho[i] = smp[i].state.rho;
        omega[i] = smp[i].state.omega;
    }
    double x = std::log(y);
    if (y == y_last) return {y, rho.back(), omega.back()};
    if (smp.size() < 4) {
        std::size_t k = static_cast<std::size_t>(std::upper_bound(s.begin(), s.end(), x) - s.begin()) - 1;
        double w = (x - s[k]) / (s[k + 1] - s[k]);
        return {y, (1 - w) * rho[k] + w * rho[k + 1], (1 - w) * omega[k] + w * omega[k + 1]};
    }
    // endpoint slopes in log y come from the ODE
    const ProfileSample& a = smp.front();
    const ProfileSample& b = smp.back();
    std::vector<double> s2 = s;
    boost::math::interpolators::pchip<std::vector<double>> rho_at(
        std::move(s), std::move(rho), a.state.y * a.deriv.drho_dy, b.state.y * b.deriv.drho_dy);
    boost::math::interpolators::pchip<std::vector<double>> omega_at(
        std::move(s2), std::move(omega), a.state.y * a.deriv.domega_dy, b.state.y * b.deriv.domega_dy);
    return {y, rho_at(x), omega_at(x)};
}

PhysicalSample physical_fields(const Params& p, const Solution& sol, double t, double r) {
    if (!(t < 0)) throw DomainError("physical fields need t < 0 (got " + fmt(t) + ")");
    if (!(r >= 0)) throw DomainError("physical fields need r >= 0 (got " + fmt(r) + ")");
    const ScalingIndices& ix = p.idx;
    double tau = -t;
    PhysicalSample out;
    out.t = t;
    out.r = r;
    out.y = r / std::pow(tau, 1.0 / ix.b);
    ProfileState s = profile_at(sol, out.y);
    double pressure = 0;
    if (out.y > 0) pressure = aux(p, s).p;
    out.rho_tilde = std::pow(tau, ix.a1 / ix.b) * s.rho;
    out.u_tilde = std::pow(tau, ix.a2 / ix.b) * velocity(p, s);
    out.p_tilde = std::pow(tau, ix.a3 / ix.b) * pressure;
    out.mass = std::pow(tau, (ix.a1 + 3.0) / ix.b) * mass(p, s);
    return out;
}

}  // namespace implosion
