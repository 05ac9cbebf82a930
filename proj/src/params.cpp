#include "implosion/params.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace implosion {

namespace {

bool same_value(double a, double b) {
    return std::abs(a - b) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(b);
}

void check_n(int n) {
    if (n < 4)
        throw ValidationError("n>=4", "n must be at least 4: the regularity index n(gamma, alpha) lies in (2, inf) and must be an even integer");
    if (n % 2 != 0)
        throw ValidationError("n-even", "n must be even: smoothness at the sonic origin requires an even regularity index (odd n admits no smooth solution)");
}

void check_gamma(double gamma) {
    if (!std::isfinite(gamma))
        throw ValidationError("gamma-finite", "gamma must be a finite number");
    if (gamma <= kLowerGamma)
        throw ValidationError("gamma>4/3", "gamma must exceed 4/3: no smooth self-similar implosion exists for gamma <= 4/3 (alpha would be <= 0, violating mass supercriticality)");
    if (gamma >= 2.0)
        throw ValidationError("gamma<2", "gamma must be below 2");
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

bool GammaN::first_band() const {
    return gamma > kFirstBandLow && gamma < kFirstBandHigh;
}

bool GammaN::global_band() const {
    if (n != 4 && n != 6) return false;
    return gamma > std::max(kFirstBandLow, (10.0 + n) / 9.0) && gamma < kFirstBandHigh;
}

double derive_alpha(double gamma, int n) {
    check_n(n);
    check_gamma(gamma);
    double denom = n - 3.0 * (2.0 - gamma);
    return n * std::fma(3.0, gamma, -4.0) / denom;
}

double regularity_index(double gamma, double alpha) {
    return 3.0 * (2.0 - gamma) * alpha / (std::fma(-3.0, gamma, 4.0) + alpha);
}

ScalingIndices scaling_indices(double gamma, double alpha) {
    if (!(alpha > std::fma(3.0, gamma, -4.0) && alpha < gamma))
        throw ValidationError("alpha-range", "alpha must lie in (3gamma-4, gamma); got alpha = " + fmt(alpha));
    ScalingIndices s;
    s.alpha = alpha;
    s.a1 = (alpha - 2.0) / (2.0 - gamma);
    s.a2 = (2.0 * (1.0 - gamma) + alpha) / (2.0 * (2.0 - gamma));
    s.a3 = 2.0 * (alpha - gamma) / (2.0 - gamma);
    s.b = (2.0 - alpha) / (2.0 * (2.0 - gamma));
    return s;
}

SonicData sonic_data(double gamma, int n) {
    derive_alpha(gamma, n);  // throws on invalid (gamma, n)
    if (same_value(gamma, kFirstBandHigh))
        throw ValidationError("gamma!=11/6", "gamma = 11/6 is a singular band endpoint: the bootstrap constant m0 has denominator 11-6gamma");
    if (same_value(gamma, kFirstBandLow))
        throw ValidationError("gamma!=19/12", "gamma = 19/12 is a singular band endpoint: the order-2 coefficient matrix is singular there");
    SonicData s;
    s.rho0 = 1.0 / (6.0 * std::numbers::pi);
    s.omega0 = std::fma(3.0, gamma, -4.0) * (2.0 - gamma) / (n - 3.0 * (2.0 - gamma));
    s.p0 = std::pow(s.rho0, gamma) * std::pow(s.rho0 * s.omega0, n / 3.0);
    s.m0 = 3.0 * (n + 1.0) * n / (2.0 * (gamma - 1.0) * (11.0 - 6.0 * gamma)) * s.rho0 * s.omega0;
    return s;
}

Params make_params(double gamma, int n) {
    Params p;
    p.gn = {gamma, n};
    double alpha = derive_alpha(gamma, n);
    p.idx = scaling_indices(gamma, alpha);
    p.sonic = sonic_data(gamma, n);
    return p;
}

bool Diagnostics::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

const ConstraintCheck* Diagnostics::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

Diagnostics validate(double gamma, int n, int order) {
    Diagnostics d;
    d.gamma = gamma;
    d.n = n;
    d.checks.push_back({"n-even", n >= 4 && n % 2 == 0, "n = " + std::to_string(n) + " must be an even integer >= 4"});
    bool gamma_ok = std::isfinite(gamma) && gamma > kLowerGamma && gamma < 2.0;
    d.checks.push_back({"gamma-range", gamma_ok, "gamma = " + fmt(gamma) + " must lie in (4/3, 2)"});

    // alpha from the forward formula is defined whenever n != 3(2-gamma)
    double denom = n - 3.0 * (2.0 - gamma);
    if (denom != 0.0 && std::isfinite(gamma)) {
        double alpha = n * std::fma(3.0, gamma, -4.0) / denom;
        d.checks.push_back({"alpha-range", alpha > 3.0 * gamma - 4.0 && alpha < gamma,
                            "alpha = " + fmt(alpha) + " must lie in (3gamma-4, gamma)"});
        d.checks.push_back({"mass-supercritical", gamma < (4.0 + alpha) / 3.0,
                            "gamma must be below (4+alpha)/3 = " + fmt((4.0 + alpha) / 3.0)});
    } else {
        d.checks.push_back({"alpha-range", false, "n = 3(2-gamma): alpha undefined"});
        d.checks.push_back({"mass-supercritical", false, "alpha undefined"});
    }
    double tenplus = (10.0 + n) / 9.0;
    d.checks.push_back({"A-positivity", gamma >= tenplus, "gamma must be >= (10+n)/9 = " + fmt(tenplus)});

    GammaN gn{gamma, n};
    d.first_band = gn.first_band();
    d.global_band = gn.global_band() && d.checks[0].pass;
    for (int m = 1; m <= order; ++m)
        d.degenerate_gammas.emplace_back(m, kLowerGamma + 1.0 / (2.0 * m));
    return d;
}

double parse_gamma(const std::string& text) {
    auto parse_number = [&](std::string_view s) {
        double v = 0;
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
            throw ValidationError("gamma-syntax", "cannot parse gamma from '" + text + "'");
        return v;
    };
    auto slash = text.find('/');
    if (slash == std::string::npos) return parse_number(text);
    std::string_view sv(text);
    double num = parse_number(sv.substr(0, slash));
    double den = parse_number(sv.substr(slash + 1));
    if (den == 0.0) throw ValidationError("gamma-syntax", "zero denominator in gamma '" + text + "'");
    return num / den;
}

}  // namespace implosion
