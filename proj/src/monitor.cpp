#include "implosion/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <numbers>

#include "implosion/physical.hpp"

namespace implosion {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// |lhs - sum(terms)| relative to the larger of |lhs| and the summed term magnitudes
double relative_residual(double lhs, std::initializer_list<double> terms) {
    double sum = 0, mag = 0;
    for (double t : terms) {
        sum += t;
        mag += std::abs(t);
    }
    double scale = std::max(std::abs(lhs), mag);
    return scale > 0 ? std::abs(lhs - sum) / scale : 0.0;
}

// (1 - alpha/2)^2 written through (gamma, n)
double k_factor(const Params& p) {
    double g = p.gamma();
    int n = p.n();
    double v = 3.0 * (2.0 - g) * (n - 2.0) / (2.0 * (n - 3.0 * (2.0 - g)));
    return v * v;
}

double pressure_exponent(const Params& p) {
    return (2.0 - p.gamma()) * p.alpha() / p.mass_denominator();
}

double minus_g_factor(const Params& p) {
    double g = p.gamma();
    int n = p.n();
    return 3.0 * (n - 2.0) * (n - 2.0) * g * (g - 1.0) * (11.0 - 6.0 * g) / (2.0 * (3.0 * g - 4.0) * (3.0 * g - 4.0));
}

}  // namespace

FlagStatus FlagValue::status() const {
    if (margin < -1e-12 * scale) return FlagStatus::violated;
    if (std::abs(margin) <= 1e-12 * scale) return FlagStatus::marginal;
    return FlagStatus::holds;
}

BootstrapFlags bootstrap(const Params& p, const ProfileState& s, const Derivatives& d) {
    const SonicData& sd = p.sonic;
    int n = p.n();
    AuxValues a = aux(p, s);
    double R = sd.rho0 - s.rho, Om = s.omega - sd.omega0;
    BootstrapFlags f;
    f.b0 = {-d.drho_dy, s.rho / s.y};
    f.b025 = {s.rho, sd.rho0};
    f.b05 = {Om, sd.omega0};
    double t1 = s.y * s.y * s.omega * R, t2 = sd.m0 * a.p / s.rho;
    f.b1 = {t1 - t2, std::abs(t1) + std::abs(t2)};
    double u1 = (n + 1.0) / (n - 2.0) * sd.rho0 * Om, u2 = sd.omega0 * R;
    f.b3 = {u1 - u2, std::abs(u1) + std::abs(u2)};
    return f;
}

CoefficientBundle coefficients(const Params& p, const ProfileState& s) {
    const SonicData& sd = p.sonic;
    double g = p.gamma();
    int n = p.n();
    double K = k_factor(p);
    double w0 = sd.omega0, r0 = sd.rho0, m0 = sd.m0;
    double grav = 4.0 * std::numbers::pi / (3.0 * w0);
    CoefficientBundle c;
    c.A = 4.0 * w0 + (2.0 - g) * (n - 6.0 * (g - 1.0)) / (2.0 * (n - 3.0 * (2.0 - g))) - grav * K * r0;
    c.B = grav * K * w0 - n * w0 * K / m0;
    c.C = 2.0;
    c.D = grav * K;
    AuxValues a = aux(p, s);
    double R = r0 - s.rho;
    c.E = K * n * w0 / (m0 * s.y * s.y * s.omega) * (s.y * s.y * s.omega * R - m0 * a.p / s.rho);
    c.g0_margin = -a.G / (s.y * s.y * s.omega);
    return c;
}

IdentityResiduals identity_residuals(const Params& p, const ProfileState& s, const Derivatives& d) {
    const SonicData& sd = p.sonic;
    double g = p.gamma();
    int n = p.n();
    double r0 = sd.rho0, w0 = sd.omega0, m0 = sd.m0;
    double y = s.y, rho = s.rho, w = s.omega;
    double R = r0 - rho, Om = w - w0;
    double lr = d.drho_dy / rho;  // rho'/rho
    AuxValues a = aux(p, s);
    IdentityResiduals out;

    {
        double lhs = (n + 1.0) / (n - 2.0) * r0 * d.domega_dy + w0 * d.drho_dy;
        double X = (n + 1.0) / (n - 2.0) * r0 * Om - w0 * R;
        double c = 3.0 * w0 / ((n - 2.0) * y);
        out.b3_identity = relative_residual(
            lhs, {-lr * X, -3.0 / y * X, -c * y * lr * r0, -c * y * lr * 2.0 * (n - 2.0) * R / 3.0, -c * (n - 2.0) * R});
    }
    {
        double ep = pressure_exponent(p);
        double dp = a.p * (g * lr + ep * (3.0 / y + lr + d.domega_dy / w));
        double lhs = 2.0 * y * w * R + y * y * d.domega_dy * R - y * y * w * d.drho_dy -
                     m0 * (dp / rho - a.p * d.drho_dy / (rho * rho));
        double relw = (3.0 * w0 - 3.0 * w) / (y * w);
        double pr = a.p / rho;
        out.b1_identity = relative_residual(
            lhs, {2.0 * y * w * R, y * y * w * relw * R, -y * y * w * lr * R, -y * y * rho * w * lr,
                  -m0 * (g - 1.0) * lr * pr, -m0 * (n / 3.0) * relw * pr, -m0 * (n / y) * pr});
    }
    {
        CoefficientBundle c = coefficients(p, s);
        double lhs = -y * lr;
        double f = -y * y / a.G;
        out.rhoprime_identity =
            relative_residual(lhs, {f * c.A * Om, f * c.B * R, f * c.C * Om * Om, f * c.D * R * Om, f * c.E});
        out.ab_slack = c.A * Om + c.B * R - (n - 2.0) * (w0 * w0 / r0) * R;
    }
    return out;
}

double entropy_residual(const Params& p, const ProfileState& s, const Derivatives& d) {
    double lr = d.drho_dy / s.rho, lw = d.domega_dy / s.omega;
    double g = p.gamma();
    double pp = g * lr + pressure_exponent(p) * (3.0 / s.y + lr + lw);
    double src = (2.0 - g) * p.alpha() / (s.y * s.omega);
    double scale = std::max({std::abs(pp), std::abs(g * lr), std::abs(src)});
    return scale > 0 ? std::abs(pp - g * lr - src) / scale : 0.0;
}

double omega_upper_bound(const Params& p) {
    double g = p.gamma();
    int n = p.n();
    double w0 = p.sonic.omega0, c1 = p.c1();
    double cc = minus_g_factor(p) / ((n + 1.0) * n) * w0;
    // -3(w - w0)(w - cc) + 2w^2 + c1 w + c1(2 - gamma) = -w^2 + B w + C
    double B = 3.0 * (w0 + cc) + c1;
    double C = -3.0 * w0 * cc + c1 * (2.0 - g);
    return 0.5 * (B + std::sqrt(B * B + 4.0 * C));
}

SupersonicMargin supersonic_margin(const Params& p, const std::vector<ProfileSample>& traj,
                                   std::optional<double> delta) {
    SupersonicMargin m;
    m.omega_upper_bound = omega_upper_bound(p);
    if (traj.empty()) return m;
    m.delta = delta.value_or(traj.size() > 1 ? traj[1].state.y : traj.front().state.y);
    m.g0_estimate = kInf;
    m.omega_upper_observed = -kInf;
    m.lower_bound_slack = kInf;
    int n = p.n();
    double w0 = p.sonic.omega0, r0 = p.sonic.rho0;
    double bracket = 1.0 - minus_g_factor(p) / (n * (2.0 * n - 1.0));
    for (const auto& smp : traj) {
        const ProfileState& s = smp.state;
        m.omega_upper_observed = std::max(m.omega_upper_observed, s.omega);
        if (s.y < m.delta) continue;
        AuxValues a = aux(p, s);
        double ratio = -a.G / (s.y * s.y * s.omega);
        m.g0_estimate = std::min(m.g0_estimate, ratio);
        BootstrapFlags f = bootstrap(p, s, rhs(p, s, a));
        if (f.b1.margin > 0 && f.b3.margin > 0) {
            double R = r0 - s.rho;
            double bound = (2.0 * n - 1.0) / (n + 1.0) * (w0 / r0) * R * bracket;
            m.lower_bound_slack = std::min(m.lower_bound_slack, ratio - bound);
        }
    }
    return m;
}

double q2_value(double g, int n) {
    double m = n - 2.0, s = 3.0 * g - 4.0;
    return (g - 1.0) * m - 2.0 * m * m / ((n + 1.0) * (n + 1.0)) + m * m / (2.0 * s * s) + 4.0 * m / (n + 1.0) -
           (n - 1.0);
}

double q3_value(double g, int n) {
    double m = n - 2.0, s = 3.0 * g - 4.0;
    return m * m / (2.0 * s * s) + 4.0 * m / (n + 1.0) - (n - 1.0) + (2.0 * (g - 1.0) - 1.0) * m / (n + 1.0) +
           (g - 1.0) * m * m / (2.0 * s * s);
}

StructuralRecord structural_positivity(const Params& p) {
    double g = p.gamma();
    int n = p.n();
    StructuralRecord r;
    for (std::size_t i = 0; i < kQuadraticPoints.size(); ++i) {
        double x = kQuadraticPoints[i];
        r.quadratic[i] = -g * (n - 2.0) * (n - 2.0) / (n + 1.0) * x * x + (n - 2.0) * (2.0 * n / 3.0 - g) * x + n;
    }
    r.q2 = q2_value(g, n);
    r.q3 = q3_value(g, n);
    r.S = 6 * g * (g - 1) * (11 - 6 * g) - 3.0 * n * (12 * g * g - 34 * g + 21) +
          double(n) * n * (36 * g * g * g - 30 * g * g - 132 * g + 133);
    r.T = 12 * g * (g - 1) * (11 - 6 * g) - double(n) * (144 * g * g - 402 * g + 259) +
          double(n) * n * (72 * g * g * g - 132 * g * g - 66 * g + 133);
    r.combination = 9.0 * n * (2 * n - 1) * r.S - 9.0 * n * (n + 1) * r.T;
    return r;
}

AsymptoticsRecord asymptotics(const Params& p, const std::vector<ProfileSample>& traj) {
    if (traj.size() < 2 || traj.back().state.y < 100.0)
        throw DomainError("asymptotics needs a trajectory reaching y >= 100");
    const ProfileState& last = traj.back().state;
    std::size_t j = 0;
    for (std::size_t i = 0; i < traj.size(); ++i)
        if (traj[i].state.y <= last.y / 10.0 * (1 + 1e-12)) j = i;
    const ProfileState& first = traj[j].state;
    double span = std::log(last.y / first.y);
    AsymptoticsRecord a;
    a.rho_ratio = last.rho / p.sonic.rho0;
    a.last_decade_slope = std::log(last.rho / first.rho) / span;
    a.omega_log_slope = std::log(last.omega / first.omega) / span;
    FarField ff = far_field(p);
    a.far_field_slope = ff.rho_exponent;
    a.far_field_ratio_min = kInf;
    a.far_field_ratio_max = -kInf;
    a.rho_decreasing_last_decade = true;
    for (std::size_t i = j; i < traj.size(); ++i) {
        double ratio = traj[i].state.rho / far_field_density(ff, traj[i].state.y);
        a.far_field_ratio_min = std::min(a.far_field_ratio_min, ratio);
        a.far_field_ratio_max = std::max(a.far_field_ratio_max, ratio);
        if (i > j && !(traj[i].state.rho < traj[i - 1].state.rho)) a.rho_decreasing_last_decade = false;
    }
    return a;
}

double b1_leading_coefficient(const CoeffTable& t) {
    const Params& p = t.params;
    const SonicData& sd = p.sonic;
    double g = p.gamma();
    int n = p.n();
    double r0 = sd.rho0, w0 = sd.omega0;
    double r1 = t.rhobar.at(1), r2 = t.rhobar.at(2), w1 = t.omegabar.at(1);
    // y^2 omega R - m0 p/rho expanded to order x^2 (times y^2); order x cancels
    double mp = sd.m0 * sd.p0 / r0;
    return -w0 * r2 - w1 * r1 - mp * ((g - 1.0 + n / 3.0) * r1 / r0 + (n / 3.0) * w1 / w0);
}

double b3_leading_coefficient(const CoeffTable& t) {
    const Params& p = t.params;
    int n = p.n();
    return (n + 1.0) / (n - 2.0) * p.sonic.rho0 * t.omegabar.at(2) + p.sonic.omega0 * t.rhobar.at(2);
}

bool VerificationReport::pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::vector<std::string> VerificationReport::failed() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
        if (!c.pass) out.push_back(c.name);
    return out;
}

std::vector<double> quadrature_mass(const Params& p, const std::vector<ProfileSample>& traj, const CoeffTable& table) {
    std::vector<double> m(traj.size());
    if (traj.empty()) return m;
    m[0] = mass_integral(table, traj[0].state.y);
    auto f = [](const ProfileSample& s) {
        double y = s.state.y;
        return 4.0 * std::numbers::pi * y * y * y * s.state.rho;
    };
    auto fs = [](const ProfileSample& s) {
        double y = s.state.y;
        return 4.0 * std::numbers::pi * y * y * y * (3.0 * s.state.rho + y * s.deriv.drho_dy);
    };
    (void)p;
    for (std::size_t i = 1; i < traj.size(); ++i) {
        double h = std::log(traj[i].state.y / traj[i - 1].state.y);
        double piece = 0.5 * h * (f(traj[i - 1]) + f(traj[i])) + h * h / 12.0 * (fs(traj[i - 1]) - fs(traj[i]));
        m[i] = m[i - 1] + piece;
    }
    return m;
}

VerificationReport verify(const Params& p, const std::vector<ProfileState>& states, const CoeffTable& table) {
    VerificationReport rep;
    rep.params = p;
    rep.samples = states.size();
    auto add = [&](std::string name, bool pass, double value, std::string detail) {
        rep.checks.push_back({std::move(name), pass, value, std::move(detail)});
    };
    if (states.size() < 2) {
        add("samples", false, static_cast<double>(states.size()), "need at least two samples");
        return rep;
    }
    rep.y0 = states.front().y;

    std::vector<ProfileSample> traj;
    traj.reserve(states.size());
    bool defined = true;
    double first_bad = 0;
    for (const auto& s : states) {
        ProfileSample smp;
        smp.state = s;
        try {
            smp.aux = aux(p, s);
            smp.deriv = rhs(p, s, smp.aux);
        } catch (const std::exception&) {
            if (defined) first_bad = s.y;
            defined = false;
            continue;
        }
        traj.push_back(smp);
    }
    add("rhs_defined", defined, first_bad,
        defined ? "right-hand side finite at every sample" : "state outside the domain or sonic at y = first value");
    if (!defined) return rep;

    for (auto& fs : rep.flags) fs = {kInf, 0, 0, 0};
    rep.min_minus_G = kInf;
    rep.min_ab_slack = kInf;
    rep.min_rhoprime_bound_slack = kInf;
    rep.min_flux_deficit_increment = kInf;
    rep.rho_monotone = true;
    std::vector<double> qm = quadrature_mass(p, traj, table);
    const SonicData& sd = p.sonic;
    int n = p.n();
    double prev_e = 0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const ProfileSample& smp = traj[i];
        const ProfileState& s = smp.state;
        rep.min_minus_G = std::min(rep.min_minus_G, -smp.aux.G / (s.y * s.y * s.omega * s.omega));

        if (i > 0) {
            BootstrapFlags f = bootstrap(p, s, smp.deriv);
            auto all = f.all();
            for (std::size_t k = 0; k < all.size(); ++k) {
                FlagSummary& fs = rep.flags[k];
                if (all[k]->margin < fs.min_margin) {
                    fs.min_margin = all[k]->margin;
                    fs.argmin_y = s.y;
                }
                FlagStatus st = all[k]->status();
                if (st == FlagStatus::violated) ++fs.violated;
                if (st == FlagStatus::marginal) ++fs.marginal;
            }
            if (!(s.rho < traj[i - 1].state.rho)) rep.rho_monotone = false;
        }

        IdentityResiduals r = identity_residuals(p, s, smp.deriv);
        rep.max_identity.b3_identity = std::max(rep.max_identity.b3_identity, r.b3_identity);
        rep.max_identity.b1_identity = std::max(rep.max_identity.b1_identity, r.b1_identity);
        rep.max_identity.rhoprime_identity = std::max(rep.max_identity.rhoprime_identity, r.rhoprime_identity);
        BootstrapFlags f = bootstrap(p, s, smp.deriv);
        if (f.b3.margin >= 0) rep.min_ab_slack = std::min(rep.min_ab_slack, r.ab_slack);

        rep.max_mass_residual = std::max(rep.max_mass_residual, std::abs(qm[i] - smp.aux.mass) / smp.aux.mass);
        rep.max_entropy_residual = std::max(rep.max_entropy_residual, entropy_residual(p, s, smp.deriv));

        double e = sd.rho0 * sd.omega0 - s.rho * s.omega;
        if (i == 0)
            rep.min_flux_deficit_increment = std::min(rep.min_flux_deficit_increment, e);
        else
            rep.min_flux_deficit_increment = std::min(rep.min_flux_deficit_increment, e - prev_e);
        prev_e = e;

        double R = sd.rho0 - s.rho, Om = s.omega - sd.omega0;
        CoefficientBundle c = coefficients(p, s);
        double lhs = (-smp.aux.G / (s.y * s.y)) * (-s.y * smp.deriv.drho_dy / s.rho);
        double rhs_bound = (n - 2.0) * (sd.omega0 * sd.omega0 / sd.rho0) * R + 2.0 * Om * Om + c.D * R * Om;
        rep.min_rhoprime_bound_slack = std::min(rep.min_rhoprime_bound_slack, lhs - rhs_bound);
    }

    rep.supersonic = supersonic_margin(p, traj);
    rep.structural = structural_positivity(p);
    try {
        rep.asymptotics = asymptotics(p, traj);
    } catch (const DomainError& e) {
        rep.asymptotics_note = e.what();
    }

    for (std::size_t k = 0; k < rep.flags.size(); ++k) {
        const FlagSummary& fs = rep.flags[k];
        add(std::string("bootstrap_") + kFlagNames[k], fs.min_margin > 0, fs.min_margin,
            "margin strictly positive for every sample after the first");
    }
    add("supersonic_G", rep.min_minus_G > 0, rep.min_minus_G, "G < 0 at every sample");
    add("identity_b3", rep.max_identity.b3_identity <= kIdentityTol, rep.max_identity.b3_identity,
        "max relative residual <= 1e-10");
    add("identity_b1", rep.max_identity.b1_identity <= kIdentityTol, rep.max_identity.b1_identity,
        "max relative residual <= 1e-10");
    add("identity_rhoprime", rep.max_identity.rhoprime_identity <= kIdentityTol,
        rep.max_identity.rhoprime_identity, "max relative residual <= 1e-10");
    add("ab_bound", rep.min_ab_slack >= 0, rep.min_ab_slack, "A Omega + B R >= (n-2)(omega0^2/rho0) R where b3 holds");
    add("mass_identity", rep.max_mass_residual <= kMassTol, rep.max_mass_residual,
        "quadrature vs closed-form mass, max relative mismatch <= 1e-6");
    add("entropy_identity", rep.max_entropy_residual <= kEntropyTol, rep.max_entropy_residual,
        "max relative residual <= 1e-8");
    add("flux_deficit_monotone", rep.min_flux_deficit_increment >= 0, rep.min_flux_deficit_increment,
        "rho0 omega0 - rho omega nonnegative and nondecreasing");
    add("rhoprime_bound", rep.min_rhoprime_bound_slack > 0, rep.min_rhoprime_bound_slack,
        "(-G/y^2)(-y rho'/rho) exceeds its lower bound");
    add("g0_positive", rep.supersonic.g0_estimate > 0 && std::isfinite(rep.supersonic.g0_estimate),
        rep.supersonic.g0_estimate, "min (-G)/(y^2 omega) over y >= delta");
    add("omega_upper", rep.supersonic.omega_upper_observed < rep.supersonic.omega_upper_bound,
        rep.supersonic.omega_upper_observed, "max omega below the supersonic bound");
    add("minus_g_lower_bound", rep.supersonic.lower_bound_slack >= 0, rep.supersonic.lower_bound_slack,
        "(-G)/(y^2 omega) above its bootstrap lower bound");
    add("rho_monotone", rep.rho_monotone, 0, "rho strictly decreasing across the grid");

    const StructuralRecord& st = rep.structural;
    double qmin = *std::min_element(st.quadratic.begin(), st.quadratic.end());
    add("structural_quadratic", qmin >= 0, qmin, "quadratic bound >= 0 at sampled x");
    add("structural_q2", st.q2 > 0, st.q2, "q2 > 0");
    add("structural_q3", st.q3 > 0, st.q3, "q3 > 0");
    add("structural_ST", st.combination > 0, st.combination, "9n(2n-1)S - 9n(n+1)T > 0");

    if (rep.asymptotics) {
        const AsymptoticsRecord& a = *rep.asymptotics;
        add("decay_slope", a.last_decade_slope < 0 && a.rho_decreasing_last_decade, a.last_decade_slope,
            "last-decade log slope of rho negative");
    }
    return rep;
}

}  // namespace implosion
