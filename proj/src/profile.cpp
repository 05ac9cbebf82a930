#include "implosion/profile.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace implosion {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

using Vec = std::array<double, 2>;

// Dormand-Prince 5(4) tableau with Hairer's dense-output coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

enum class StageStatus { ok, sonic, nonfinite, domain };

// Right-hand side in s = log y: d/ds = y d/dy.
struct LogRhs {
    const Params& params;

    StageStatus operator()(double s, const Vec& u, Vec& du) const {
        if (!std::isfinite(u[0]) || !std::isfinite(u[1])) return StageStatus::nonfinite;
        if (u[0] <= 0 || u[1] <= 0) return StageStatus::domain;
        double y = std::exp(s);
        try {
            Derivatives d = rhs(params, {y, u[0], u[1]});
            du = {y * d.drho_dy, y * d.domega_dy};
        } catch (const SonicProximityError&) {
            return StageStatus::sonic;
        }
        if (!std::isfinite(du[0]) || !std::isfinite(du[1])) return StageStatus::nonfinite;
        return StageStatus::ok;
    }
};

struct DenseStep {
    double s0 = 0, h = 0;
    std::array<Vec, 5> r{};

    Vec at(double s) const {
        double th = (s - s0) / h, th1 = 1.0 - th;
        Vec out;
        for (int i = 0; i < 2; ++i)
            out[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
        return out;
    }
};

// Step underflow below this value of -G/(y^2 omega^2) is reported as a sonic hit.
constexpr double kSonicRatio = 1e-3;

// G + floor changes sign where the flow turns sonic.
double sonic_indicator(const Params& p, double s, const Vec& u) {
    double y = std::exp(s);
    AuxValues a = aux(p, {y, u[0], u[1]});
    return a.G + 1e-14 * y * y * u[1] * u[1];
}

// Bisect on the dense output for the first root of f in (lo, hi].
template <class F>
double bisect(const DenseStep& d, double lo, double hi, F f) {
    double flo = f(lo, d.at(lo));
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid, d.at(mid));
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return hi;
}

}  // namespace

AuxValues aux(const Params& params, const ProfileState& s) {
    if (!(s.y > 0) || !(s.rho > 0) || !(s.omega > 0))
        throw DomainError("aux needs y, rho, omega > 0 (got y = " + fmt(s.y) + ", rho = " + fmt(s.rho) +
                          ", omega = " + fmt(s.omega) + ")");
    double g = params.gamma(), alpha = params.alpha();
    double md = params.mass_denominator();
    double hd = params.half_defect_sq();
    double c1 = params.c1();
    double y = s.y, r = s.rho, w = s.omega;
    AuxValues a;
    a.p = std::pow(r, g) * std::pow(y * y * y * r * w, (2.0 - g) * alpha / md);
    a.h = 2.0 * w * w + c1 * w + c1 * (2.0 - g) - 4.0 * std::numbers::pi / md * hd * r * w;
    a.q = (2.0 - g) * alpha * hd * a.p / (y * r * w);
    a.G = g * hd * a.p / r - y * y * w * w;
    a.u = 2.0 * y * (w - (2.0 - g)) / (2.0 - alpha);
    a.mass = 4.0 * std::numbers::pi * y * y * y * r * w / md;
    return a;
}

Derivatives rhs(const Params& params, const ProfileState& s, const AuxValues& a) {
    double floor = 1e-14 * s.y * s.y * s.omega * s.omega;
    if (std::abs(a.G) < floor)
        throw SonicProximityError("sonic point reached at y = " + fmt(s.y) + " (|G| = " + fmt(std::abs(a.G)) + ")");
    double ratio = (s.y * a.h - a.q) / a.G;
    Derivatives d;
    d.drho_dy = s.rho * ratio;
    d.domega_dy = (params.mass_denominator() - 3.0 * s.omega) / s.y - s.omega * ratio;
    return d;
}

Derivatives rhs(const Params& params, const ProfileState& s) {
    return rhs(params, s, aux(params, s));
}

Handoff handoff(const CoeffTable& table, double rel_tol) {
    if (!table.radius) throw SeriesError("handoff needs a table with a radius estimate (order >= 10)");
    double nu = *table.radius;
    Handoff h;
    h.order = table.order;
    h.radius = nu;
    if (std::isinf(nu))
        throw SeriesError("series terminates: radius estimate is infinite, no natural handoff scale");

    auto excess = [&](double y) {
        SeriesValue v = eval(table, y);
        return std::max(v.rho_tail / std::abs(v.rho), v.omega_tail / std::abs(v.omega)) - rel_tol;
    };
    double hi = 0.5 * nu;
    double y0 = hi;
    if (excess(hi) > 0) {
        double lo = 1e-6 * nu;
        if (excess(lo) > 0)
            throw SeriesError("series order " + std::to_string(table.order) +
                              " too low: tail exceeds rel_tol even at y = " + fmt(lo));
        // bisection in log y; the tail grows monotonically with y
        for (int it = 0; it < 200; ++it) {
            double mid = std::sqrt(lo * hi);
            if (excess(mid) > 0)
                hi = mid;
            else
                lo = mid;
            if (hi / lo - 1 < 1e-14) break;
        }
        y0 = lo;
    }
    SeriesValue v = eval(table, y0);
    h.y0 = y0;
    h.state = {y0, v.rho, v.omega};
    if (!(aux(table.params, h.state).G < 0))
        throw SeriesError("handoff point y0 = " + fmt(y0) + " is not supersonic (G >= 0)");
    return h;
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::reached_ymax: return "reached_ymax";
        case Termination::sonic_hit: return "sonic_hit";
        case Termination::rho_floor: return "rho_floor";
        case Termination::nonfinite: return "nonfinite";
        case Termination::invariant_violation: return "invariant_violation";
        case Termination::step_failure: return "step_failure";
    }
    return "unknown";
}

bool is_success(Termination t) {
    return t == Termination::reached_ymax || t == Termination::rho_floor;
}

ProfileResult integrate(const Params& params, const ProfileState& start, double y_max, const Controls& ctl) {
    if (!(start.y > 0)) throw DomainError("integration needs y0 > 0");
    if (!(y_max > start.y)) throw DomainError("y_max must exceed y0");
    if (!(aux(params, start).G < 0)) throw DomainError("integration must start at a supersonic state (G < 0)");

    ProfileResult res;
    LogRhs f{params};
    const double s_end = std::log(y_max);
    const double ds_grid = std::log(10.0) / ctl.points_per_decade;
    double s = std::log(start.y);
    const double s_start = s;
    Vec u{start.rho, start.omega};

    auto record = [&](double sv, const Vec& uv) {
        double yv = sv == s_end ? y_max : (sv == s_start ? start.y : std::exp(sv));
        ProfileState st{yv, uv[0], uv[1]};
        ProfileSample smp;
        smp.state = st;
        smp.aux = aux(params, st);
        smp.deriv = rhs(params, st, smp.aux);
        res.samples.push_back(smp);
    };
    record(s, u);
    long next_grid = 1;
    bool final_recorded = false;
    // grid points closer than a tiny fraction of the spacing to s_end collapse onto it
    auto grid_s = [&](long k) {
        double raw = s_start + k * ds_grid;
        return raw >= s_end - 1e-9 * ds_grid ? s_end : raw;
    };

    Vec k1, k2, k3, k4, k5, k6, k7;
    if (f(s, u, k1) != StageStatus::ok) {
        res.termination = Termination::nonfinite;
        res.note = "right-hand side invalid at the start";
        return res;
    }

    const double safe = 0.9, beta = 0.04, expo1 = 0.2 - beta * 0.75;
    const double facc1 = 1.0 / 0.2, facc2 = 1.0 / 10.0;
    double facold = 1e-4;
    double h = std::min(1e-3, s_end - s);
    bool last_rejected = false;
    StageStatus last_failure = StageStatus::ok;

    while (s < s_end) {
        if (res.accepted_steps + res.rejected_steps >= ctl.max_steps) {
            res.termination = Termination::step_failure;
            res.note = "step budget exhausted";
            return res;
        }
        if (h < 1e-14) {
            switch (last_failure) {
                case StageStatus::sonic:
                    res.termination = Termination::sonic_hit;
                    break;
                case StageStatus::nonfinite:
                    res.termination = Termination::nonfinite;
                    break;
                case StageStatus::domain:
                    res.termination = Termination::invariant_violation;
                    break;
                default:
                    res.termination = Termination::step_failure;
            }
            res.note = "step size underflow at y = " + fmt(std::exp(s));
            // the only finite-y singularity of the system is G = 0
            if (res.termination == Termination::step_failure) {
                double y = std::exp(s);
                double ratio = -aux(params, {y, u[0], u[1]}).G / (y * y * u[1] * u[1]);
                if (ratio < kSonicRatio) {
                    res.termination = Termination::sonic_hit;
                    res.note += " with -G/(y^2 omega^2) = " + fmt(ratio) + ": singular approach to a sonic point";
                }
            }
            return res;
        }
        if (s + h > s_end) h = s_end - s;

        Vec y2, y3, y4, y5, y6, y7;
        StageStatus st = StageStatus::ok;
        auto stage = [&](double ss, const Vec& yy, Vec& kk) {
            if (st == StageStatus::ok) st = f(ss, yy, kk);
        };
        for (int i = 0; i < 2; ++i) y2[i] = u[i] + h * a21 * k1[i];
        stage(s + c2 * h, y2, k2);
        for (int i = 0; i < 2; ++i) y3[i] = u[i] + h * (a31 * k1[i] + a32 * k2[i]);
        stage(s + c3 * h, y3, k3);
        for (int i = 0; i < 2; ++i) y4[i] = u[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        stage(s + c4 * h, y4, k4);
        for (int i = 0; i < 2; ++i) y5[i] = u[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        stage(s + c5 * h, y5, k5);
        for (int i = 0; i < 2; ++i)
            y6[i] = u[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        stage(s + h, y6, k6);
        for (int i = 0; i < 2; ++i)
            y7[i] = u[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        stage(s + h, y7, k7);

        if (st != StageStatus::ok) {
            last_failure = st;
            h *= 0.25;
            ++res.rejected_steps;
            last_rejected = true;
            continue;
        }

        double err = 0;
        for (int i = 0; i < 2; ++i) {
            double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            double sc = ctl.rel_tol * std::max(std::abs(u[i]), std::abs(y7[i])) + 1e-300;
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / 2);
        double fac11 = std::pow(err, expo1);
        double fac = fac11 / std::pow(facold, beta);
        fac = std::max(facc2, std::min(facc1, fac / safe));

        if (err > 1.0) {
            h /= std::min(facc1, fac11 / safe);
            ++res.rejected_steps;
            last_rejected = true;
            last_failure = StageStatus::ok;
            continue;
        }

        DenseStep d;
        d.s0 = s;
        d.h = h;
        for (int i = 0; i < 2; ++i) {
            double ydiff = y7[i] - u[i];
            double bspl = h * k1[i] - ydiff;
            d.r[0][i] = u[i];
            d.r[1][i] = ydiff;
            d.r[2][i] = bspl;
            d.r[3][i] = ydiff - h * k7[i] - bspl;
            d.r[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
        }
        double s_new = (s + h >= s_end) ? s_end : s + h;

        // events on the accepted step, earliest first
        double s_stop = s_new;
        Termination stop = Termination::reached_ymax;
        bool stopping = false;
        if (sonic_indicator(params, s_new, y7) >= 0) {
            s_stop = bisect(d, s, s_new, [&](double sv, const Vec& uv) { return sonic_indicator(params, sv, uv); });
            stop = Termination::sonic_hit;
            stopping = true;
        }
        if (y7[0] < ctl.rho_floor) {
            double sf = bisect(d, s, s_new, [&](double, const Vec& uv) { return uv[0] - ctl.rho_floor; });
            if (!stopping || sf < s_stop) {
                s_stop = sf;
                stop = Termination::rho_floor;
            }
            stopping = true;
        }

        // dense samples strictly before a stop, on or before the step end otherwise
        while (!final_recorded && grid_s(next_grid) <= s_new) {
            double sg = grid_s(next_grid);
            if (stopping && sg >= s_stop) break;
            Vec ug = (sg == s_new) ? y7 : d.at(sg);
            if (ug[1] <= 0) {
                res.termination = Termination::invariant_violation;
                res.note = "omega left (0, inf) at y = " + fmt(std::exp(sg));
                return res;
            }
            try {
                record(sg, ug);
            } catch (const SonicProximityError&) {
                res.termination = Termination::sonic_hit;
                res.note = "sonic point at y = " + fmt(std::exp(sg));
                return res;
            } catch (const DomainError&) {
                res.termination = Termination::invariant_violation;
                res.note = "state left the physical domain at y = " + fmt(std::exp(sg));
                return res;
            }
            ++next_grid;
            if (sg == s_end) final_recorded = true;
        }

        if (stopping) {
            res.termination = stop;
            res.note = std::string(stop == Termination::sonic_hit ? "G reached 0" : "rho fell below the floor") +
                       " at y = " + fmt(std::exp(s_stop));
            return res;
        }
        for (double v : y7) {
            if (!std::isfinite(v)) {
                res.termination = Termination::nonfinite;
                res.note = "non-finite state at y = " + fmt(std::exp(s_new));
                return res;
            }
        }

        ++res.accepted_steps;
        s = s_new;
        u = y7;
        k1 = k7;
        facold = std::max(err, 1e-4);
        double hnew = h / fac;
        if (last_rejected) hnew = std::min(hnew, h);
        last_rejected = false;
        last_failure = StageStatus::ok;
        h = hnew;
    }
    res.termination = Termination::reached_ymax;
    return res;
}

Solution solve(const Params& params, int order, double y_max, const Controls& controls) {
    Solution sol;
    sol.table = build(params, order);
    Handoff h = handoff(sol.table, controls.rel_tol);
    sol.profile = integrate(params, h.state, y_max, controls);
    sol.profile.handoff = h;
    return sol;
}

}  // namespace implosion
