// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>

#include "implosion/cli.hpp"
#include "implosion/monitor.hpp"
#include "implosion/physical.hpp"
#include "implosion/profile.hpp"
#include "implosion/series.hpp"
#include "measure.hpp"
#include "oracles.hpp"

using namespace implosion;

namespace {

struct Result {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

const std::array<std::pair<double, int>, 3> kCases{{{5.0 / 3.0, 4}, {1.7, 4}, {1.8, 6}}};

std::string case_name(double g, int n) {
    return "(" + (g == 5.0 / 3.0 ? std::string("5/3") : sci(g)) + "," + std::to_string(n) + ")";
}

Params raw_params(double g, int n) {
    Params p;
    p.gn = {g, n};
    p.idx = scaling_indices(g, derive_alpha(g, n));
    p.sonic.rho0 = oracle::rho0();
    p.sonic.omega0 = oracle::omega0(g, n);
    return p;
}

// Solutions for the criterion-7 cases, shared by criteria 7 to 10.
struct CaseRun {
    double gamma;
    int n;
    int exit_code;
    double seconds;
    Solution sol;
    VerificationReport rep;
};

std::vector<CaseRun>& case_runs() {
    static std::vector<CaseRun> runs = [] {
        std::vector<CaseRun> out;
        auto dir = std::filesystem::temp_directory_path() / "implosion_acceptance";
        std::filesystem::create_directories(dir);
        for (auto [g, n] : kCases) {
            auto t0 = std::chrono::steady_clock::now();
            std::ostringstream o, e;
            std::string gamma = g == 5.0 / 3.0 ? "5/3" : sci(g);
            std::string tag = "case_" + std::to_string(out.size());
            int code = cli::run({"solve", "--gamma", gamma, "--n", std::to_string(n), "--out",
                                 (dir / (tag + ".csv")).string(), "--report", (dir / (tag + ".json")).string()},
                                o, e);
            double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            Params p = make_params(g, n);
            Solution sol = solve(p, 30, 1e3);
            std::vector<ProfileState> states;
            for (const auto& s : sol.profile.samples) states.push_back(s.state);
            VerificationReport rep = verify(p, states, sol.table);
            out.push_back({g, n, code, secs, std::move(sol), std::move(rep)});
        }
        return out;
    }();
    return runs;
}

Result criterion1() {
    Result r;
    SonicData sd = sonic_data(5.0 / 3.0, 4);
    double e_rho = oracle::rel(sd.rho0, 1.0 / (6.0 * std::numbers::pi));
    double e_omega = oracle::rel(sd.omega0, 1.0 / 9.0);
    r.require(e_rho <= 1e-14, "rho0");
    r.require(e_omega <= 1e-14, "omega0");
    r.note("rel err rho0 " + sci(e_rho) + ", omega0 " + sci(e_omega));
    return r;
}

Result criterion2() {
    Result r;
    double worst = 0;
    for (double g : oracle::first_band_grid(20)) {
        Params p = make_params(g, 4);
        CoeffTable t = build(p, 2);
        double a = 2.0 * p.sonic.omega0 * t.rhobar[1], b = 5.0 * p.sonic.rho0 * t.omegabar[1];
        worst = std::max(worst, std::abs(a + b) / (std::abs(a) + std::abs(b)));
    }
    r.require(worst <= 1e-12, "first-order relation");
    r.note("max rel residual " + sci(worst) + " on 20 gammas");
    return r;
}

Result criterion3() {
    Result r;
    double worst = 0;
    for (double g : oracle::first_band_grid(20)) {
        CoeffTable t = build(make_params(g, 4), 2);
        worst = std::max({worst, oracle::rel(t.rhobar[2], oracle::rho2(g, 4)),
                          oracle::rel(t.omegabar[2], oracle::omega2(g, 4))});
    }
    r.require(worst <= 1e-10, "second-order closed form");
    r.note("max rel err " + sci(worst) + " on 20 gammas");
    return r;
}

Result criterion4() {
    Result r;
    double worst = 0;
    for (double g : oracle::first_band_grid(20))
        for (int M = 2; M <= 50; ++M)
            worst = std::max(worst, oracle::rel(matrix_AM(make_params(g, 4), M).det(), oracle::det_AM(g, 4, M)));
    r.require(worst <= 1e-12, "determinant closed form");
    double spot = matrix_AM(make_params(5.0 / 3.0, 4), 2).det();
    r.require(oracle::rel(spot, -2.0 / 2187.0) <= 1e-12, "det A_2(5/3,4) = -2/2187");
    int detected = 0, tried = 0;
    for (int M : {2, 3, 4}) {
        double gres = 4.0 / 3.0 + 1.0 / (2.0 * M);
        for (double dg : {-1e-10, 0.0, 1e-10}) {
            ++tried;
            try {
                matrix_AM(raw_params(gres + dg, 4), M);
            } catch (const ResonanceError& e) {
                if (e.order() == M) ++detected;
            }
        }
    }
    r.require(detected == tried, "resonance detection");
    r.note("max rel err " + sci(worst) + " for M=2..50, det A_2 = " + sci(spot) + ", resonances " +
           std::to_string(detected) + "/" + std::to_string(tried));
    return r;
}

Result criterion5() {
    Result r;
    CoeffTable t = build(make_params(5.0 / 3.0, 4), 30);
    double nu = *t.radius;
    double res = measure::series_ode_residual(t, 0.5 * nu);
    double slope = measure::residual_slope(t, 0.65 * nu, 0.9 * nu, 12);
    r.require(res <= 1e-8, "residual at 0.5 radius");
    r.require(slope > 10, "log-log slope");
    r.note("residual " + sci(res) + " at y=" + sci(0.5 * nu) + ", slope " + sci(slope) + " on [0.65,0.9] radius");
    return r;
}

Result criterion6() {
    Result r;
    double worst_static = 0, worst_run = 0;
    for (auto [g, n] : kCases) {
        Params p = make_params(g, n);
        FarField ff = far_field(p);
        for (double y : {1.0, 10.0, 100.0}) {
            ProfileState s = far_field_state(ff, y);
            Derivatives d = rhs(p, s);
            double exact = ff.rho_exponent * s.rho / y;
            double e = std::max(std::abs(d.drho_dy - exact) / std::abs(exact),
                                std::abs(d.domega_dy) / ((p.mass_denominator() + 3 * s.omega) / y));
            worst_static = std::max(worst_static, e);
        }
        ProfileResult run = integrate(p, far_field_state(ff, 100.0), 1e3);
        r.require(run.termination == Termination::reached_ymax, "far-field run " + case_name(g, n));
        for (const auto& s : run.samples)
            worst_run = std::max({worst_run, oracle::rel(s.state.rho, far_field_density(ff, s.state.y)),
                                  oracle::rel(s.state.omega, ff.omega)});
    }
    r.require(worst_static <= 1e-12, "rhs on far field");
    r.require(worst_run <= 1e-7, "one-decade run");
    r.note("rhs residual " + sci(worst_static) + ", decade [100,1e3] drift " + sci(worst_run));
    return r;
}

Result criterion7() {
    Result r;
    for (const CaseRun& c : case_runs()) {
        std::string tag = case_name(c.gamma, c.n);
        const ProfileResult& pr = c.sol.profile;
        r.require(c.exit_code == 0, tag + " solve exit " + std::to_string(c.exit_code));
        r.require(pr.termination == Termination::reached_ymax && pr.samples.back().state.y == 1e3,
                  tag + " termination");
        r.require(c.seconds < 10, tag + " runtime");
        double minf = 1e300;
        bool ok = true;
        for (std::size_t i = 0; i < pr.samples.size(); ++i) {
            const ProfileSample& s = pr.samples[i];
            ok = ok && s.aux.G < 0 && s.state.rho > 0;
            if (i == 0) continue;
            BootstrapFlags f = bootstrap(c.sol.table.params, s.state, s.deriv);
            for (const FlagValue* v : f.all()) minf = std::min(minf, v->margin);
        }
        r.require(ok && minf > 0, tag + " flags");
        r.note(tag + " " + std::to_string(pr.samples.size()) + " samples, min flag margin " + sci(minf) + ", " +
               sci(c.seconds) + " s");
    }
    return r;
}

Result criterion8() {
    Result r;
    for (const CaseRun& c : case_runs()) {
        const IdentityResiduals& m = c.rep.max_identity;
        double worst = std::max({m.b3_identity, m.b1_identity, m.rhoprime_identity});
        r.require(worst <= 1e-10, case_name(c.gamma, c.n));
        r.note(case_name(c.gamma, c.n) + " max " + sci(worst));
    }
    return r;
}

Result criterion9() {
    Result r;
    for (const CaseRun& c : case_runs()) {
        r.require(c.rep.max_mass_residual <= 1e-6, case_name(c.gamma, c.n) + " mass");
        r.require(c.rep.max_entropy_residual <= 1e-8, case_name(c.gamma, c.n) + " entropy");
        r.note(case_name(c.gamma, c.n) + " mass " + sci(c.rep.max_mass_residual) + ", entropy " +
               sci(c.rep.max_entropy_residual));
    }
    return r;
}

Result criterion10() {
    Result r;
    for (const CaseRun& c : case_runs()) {
        std::string tag = case_name(c.gamma, c.n);
        r.require(c.rep.rho_monotone, tag + " monotone");
        r.require(c.rep.asymptotics.has_value(), tag + " asymptotics");
        if (!c.rep.asymptotics) continue;
        const AsymptoticsRecord& a = *c.rep.asymptotics;
        r.require(a.last_decade_slope < 0, tag + " slope");
        if (c.gamma == 5.0 / 3.0) r.require(a.rho_ratio <= 1e-4, tag + " rho(1e3)/rho0");
        r.note(tag + " rho(1e3)/rho0 " + sci(a.rho_ratio) + ", slope " + sci(a.last_decade_slope) +
               " (far field " + sci(a.far_field_slope) + ")");
    }
    return r;
}

Result criterion11() {
    Result r;
    double q2 = q2_value(11.0 / 6.0, 4);
    r.require(std::abs(q2 - 188.0 / 225.0) <= 1e-14, "q2(11/6,4) = 188/225");
    int points = 0;
    double min_q = 1e300;
    for (int n : {4, 6}) {
        double lo = std::max(19.0 / 12.0, (10.0 + n) / 9.0);
        for (int i = 1; i <= 50; ++i) {
            double g = lo + (11.0 / 6.0 - lo) * i / 51.0;
            StructuralRecord s = structural_positivity(make_params(g, n));
            ++points;
            for (double q : s.quadratic) min_q = std::min(min_q, q);
            r.require(s.q2 > 0 && s.q3 > 0, "q2,q3 at gamma " + sci(g) + " n " + std::to_string(n));
        }
    }
    r.require(min_q >= 0, "quadratic bound");
    r.note("q2(11/6,4) - 188/225 = " + sci(q2 - 188.0 / 225.0) + ", " + std::to_string(points) +
           " band points, min quadratic " + sci(min_q));
    return r;
}

Result criterion12() {
    Result r;
    struct Case {
        std::vector<std::string> args;
        std::string reason;
    };
    for (const Case& c : {Case{{"solve", "--gamma", "1.2", "--n", "4"}, "gamma must exceed 4/3"},
                          Case{{"solve", "--gamma", "1.75", "--n", "5"}, "n must be even"},
                          Case{{"solve", "--gamma", "1.5", "--n", "4", "--order", "3"}, "resonance"},
                          Case{{"solve", "--gamma", "1.5", "--n", "4"}, "resonance"}}) {
        std::ostringstream o, e;
        int code = cli::run(c.args, o, e);
        std::string label = c.args[2] + "/" + c.args[4] + (c.args.size() > 5 ? "/order " + c.args[6] : "");
        r.require(code != 0, label + " exit");
        r.require(e.str().find(c.reason) != std::string::npos, label + " reason");
        r.note(label + " exit " + std::to_string(code));
    }
    return r;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Result()>>> criteria{
        {"boundary data", criterion1},          {"first-order relation", criterion2},
        {"second-order closed form", criterion3}, {"determinant oracle", criterion4},
        {"series-ODE consistency", criterion5},  {"far-field exactness", criterion6},
        {"global trajectory", criterion7},       {"identity residuals", criterion8},
        {"mass and entropy identities", criterion9}, {"decay", criterion10},
        {"structural positivity", criterion11},  {"selection-principle rejection", criterion12}};
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto t0 = std::chrono::steady_clock::now();
        Result r;
        try {
            r = criteria[i].second();
        } catch (const std::exception& e) {
            r.pass = false;
            r.note(std::string("exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!r.pass) ++failures;
        std::printf("criterion %2zu %-30s %s  [%.2fs] %s\n", i + 1, criteria[i].first.c_str(), r.pass ? "PASS" : "FAIL",
                    secs, r.detail.c_str());
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
