#include "implosion/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "implosion/monitor.hpp"
#include "implosion/params.hpp"
#include "implosion/physical.hpp"
#include "implosion/profile.hpp"
#include "implosion/profile_io.hpp"
#include "implosion/report.hpp"
#include "implosion/series.hpp"

namespace implosion::cli {

namespace {

// Carries an exit code out of a subcommand after its message is printed.
struct Exit {
    int code;
};

[[noreturn]] void fail(std::ostream& err, int code, const std::string& msg) {
    err << "error: " << msg << '\n';
    throw Exit{code};
}

Params checked_params(const RunConfig& c, std::ostream& err) {
    try {
        return make_params(c.gamma, c.n);
    } catch (const ValidationError& e) {
        fail(err, kExitUsage, "[" + e.constraint() + "] " + e.what());
    }
}

double checked_gamma(const std::string& text, std::ostream& err) {
    try {
        return parse_gamma(text);
    } catch (const ValidationError& e) {
        fail(err, kExitUsage, "[" + e.constraint() + "] " + e.what());
    }
}

CoeffTable checked_build(const Params& p, int order, std::ostream& err) {
    try {
        return build(p, order);
    } catch (const ResonanceError& e) {
        fail(err, kExitFailure, std::string("[resonance] ") + e.what());
    } catch (const SeriesError& e) {
        fail(err, kExitFailure, std::string("[series] ") + e.what());
    }
}

Controls controls_for(const RunConfig& c) {
    Controls ctl;
    ctl.rel_tol = c.rel_tol;
    return ctl;
}

void check_solve_config(const RunConfig& c, std::ostream& err) {
    if (c.order < 1) fail(err, kExitUsage, "--order must be >= 1");
    if (!(c.ymax > 0)) fail(err, kExitUsage, "--ymax must be positive");
    if (!(c.rel_tol > 0) || !(c.rel_tol < 1)) fail(err, kExitUsage, "--rel-tol must lie in (0, 1)");
}

// Runs after the build so a resonance at low order is still diagnosed.
void check_solve_order(const RunConfig& c, std::ostream& err) {
    if (c.order < 10) fail(err, kExitUsage, "--order must be >= 10 for a solve (radius estimate needs it)");
}

void check_band(const Params& p, bool force, std::ostream& err) {
    if (p.gn.global_band() || force) return;
    std::ostringstream msg;
    msg << "[band] (gamma = " << format_double(p.gamma()) << ", n = " << p.n()
        << ") lies outside the global-theorem band (n in {4, 6}, max(19/12, (10+n)/9) < gamma < 11/6); "
        << "pass --force to integrate anyway";
    fail(err, kExitUsage, msg.str());
}

// Series, handoff and integration with the configured controls.
Solution run_pipeline(const Params& p, const RunConfig& c, std::ostream& err) {
    Solution sol;
    sol.table = checked_build(p, c.order, err);
    Handoff h;
    try {
        h = handoff(sol.table, c.rel_tol);
    } catch (const SeriesError& e) {
        fail(err, kExitFailure, std::string("[handoff] ") + e.what());
    }
    if (!(c.ymax > h.y0)) fail(err, kExitUsage, "--ymax must exceed the handoff point y0 = " + format_double(h.y0));
    sol.profile = integrate(p, h.state, c.ymax, controls_for(c));
    sol.profile.handoff = h;
    return sol;
}

void add_termination_check(VerificationReport& rep, const ProfileResult& run, double ymax) {
    bool ok = run.termination == Termination::reached_ymax;
    rep.checks.insert(rep.checks.begin(),
                      Check{"termination", ok, run.samples.empty() ? 0.0 : run.samples.back().state.y,
                            std::string(to_string(run.termination)) + (run.note.empty() ? "" : ": " + run.note) +
                                " (target y_max = " + format_double(ymax) + ")"});
}

void write_json(const std::string& path, const nlohmann::json& j, std::ostream& err) {
    std::ofstream f(path);
    if (!f) fail(err, kExitUsage, "cannot open " + path + " for writing");
    f << j.dump(2) << '\n';
}

void print_failed(const VerificationReport& rep, std::ostream& err) {
    for (const Check& c : rep.checks)
        if (!c.pass) err << "check failed: " << c.name << " (value " << format_double(c.value) << "; " << c.detail << ")\n";
}

int cmd_solve(const RunConfig& c, std::ostream& out, std::ostream& err) {
    check_solve_config(c, err);
    Params p = checked_params(c, err);
    checked_build(p, c.order, err);
    check_solve_order(c, err);
    check_band(p, c.force, err);
    Solution sol = run_pipeline(p, c, err);
    const ProfileResult& run = sol.profile;

    {
        std::ofstream f(c.out_profile);
        if (!f) fail(err, kExitUsage, "cannot open " + c.out_profile + " for writing");
        write_profile(f, p, run.samples);
    }
    std::vector<ProfileState> states;
    states.reserve(run.samples.size());
    for (const auto& s : run.samples) states.push_back(s.state);
    VerificationReport rep = verify(p, states, sol.table);
    add_termination_check(rep, run, c.ymax);
    write_json(c.out_report, report_json(rep, config_json(c, controls_for(c)), run), err);

    out << "gamma=" << format_double(p.gamma()) << " n=" << p.n() << " y0=" << format_double(run.handoff.y0)
        << " termination=" << to_string(run.termination) << " samples=" << run.samples.size()
        << " verdict=" << (rep.pass() ? "pass" : "fail") << '\n';
    if (run.termination == Termination::sonic_hit || run.termination == Termination::invariant_violation) {
        err << "error: integration stopped: " << to_string(run.termination) << ": " << run.note << '\n';
        return kExitFailure;
    }
    if (!rep.pass()) {
        print_failed(rep, err);
        return kExitFailure;
    }
    return kExitPass;
}

int cmd_coeffs(const RunConfig& c, const std::string& out_path, std::ostream& out, std::ostream& err) {
    if (c.order < 1) fail(err, kExitUsage, "--order must be >= 1");
    Params p = checked_params(c, err);
    CoeffTable t = checked_build(p, c.order, err);
    std::ofstream file;
    std::ostream* dst = &out;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) fail(err, kExitUsage, "cannot open " + out_path + " for writing");
        dst = &file;
    }
    *dst << "M,rhobar,omegabar,Qbar,Pbar,Wbar\n";
    for (std::size_t m = 0; m < t.rhobar.size(); ++m) {
        auto at = [&](const Coeffs& v) { return m < v.size() ? v[m] : 0.0; };
        *dst << m << ',' << format_double(t.rhobar[m]) << ',' << format_double(at(t.omegabar)) << ','
             << format_double(at(t.qbar)) << ',' << format_double(at(t.pbar)) << ',' << format_double(at(t.wbar))
             << '\n';
    }
    return kExitPass;
}

struct ScanRow {
    double gamma = 0;
    bool first_band = false;
    bool global_band = false;
    int rho1_sign = 0, omega1_sign = 0, b1_sign = 0, b3_sign = 0;
    std::array<double, 5> min_flags{};
    std::string termination;
    std::string error;
};

int sign_of(double v) { return (v > 0) - (v < 0); }

ScanRow scan_point(double gamma, int n) {
    ScanRow row;
    row.gamma = gamma;
    GammaN gn{gamma, n};
    row.first_band = gn.first_band();
    row.global_band = gn.global_band();
    row.min_flags.fill(std::numeric_limits<double>::quiet_NaN());
    try {
        Params p = make_params(gamma, n);
        CoeffTable t = build(p, 30);
        row.rho1_sign = sign_of(t.rhobar.at(1));
        row.omega1_sign = sign_of(t.omegabar.at(1));
        row.b1_sign = sign_of(b1_leading_coefficient(t));
        row.b3_sign = sign_of(b3_leading_coefficient(t));
        Handoff h = handoff(t, 1e-10);
        ProfileResult r = integrate(p, h.state, 10.0);
        row.termination = to_string(r.termination);
        row.min_flags.fill(std::numeric_limits<double>::infinity());
        for (std::size_t i = 1; i < r.samples.size(); ++i) {
            BootstrapFlags f = bootstrap(p, r.samples[i].state, r.samples[i].deriv);
            auto all = f.all();
            for (std::size_t k = 0; k < all.size(); ++k) row.min_flags[k] = std::min(row.min_flags[k], all[k]->margin);
        }
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + "\"";
}

unsigned thread_count(std::size_t jobs) {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("IMPLOSION_THREADS")) {
        long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

int cmd_scan(double gmin, double gmax, int steps, int n, bool force, const std::string& out_path, std::ostream& out,
             std::ostream& err) {
    if (steps < 1) fail(err, kExitUsage, "--steps must be >= 1");
    if (!(gmin <= gmax)) fail(err, kExitUsage, "--gamma-min must not exceed --gamma-max");
    if (!(gmin > kLowerGamma) || !(gmax < 2.0)) fail(err, kExitUsage, "scan range must lie inside (4/3, 2)");
    if (!force && (!(gmin > kFirstBandLow) || !(gmax < kFirstBandHigh)))
        fail(err, kExitUsage, "scan range leaves the first band (19/12, 11/6); pass --force to scan it anyway");

    std::vector<double> grid(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i)
        grid[static_cast<std::size_t>(i)] = steps == 1 ? gmin : gmin + (gmax - gmin) * i / (steps - 1);
    std::vector<ScanRow> rows(grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < grid.size();) rows[i] = scan_point(grid[i], n);
    };
    std::vector<std::thread> pool;
    unsigned nt = thread_count(grid.size());
    for (unsigned i = 0; i < nt; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    std::ofstream file;
    std::ostream* dst = &out;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) fail(err, kExitUsage, "cannot open " + out_path + " for writing");
        dst = &file;
    }
    *dst << "gamma,n,first_band,global_band,rho1_sign,omega1_sign,b1_lead_sign,b3_lead_sign,"
            "min_b0,min_b025,min_b05,min_b1,min_b3,termination,error\n";
    for (const ScanRow& r : rows) {
        *dst << format_double(r.gamma) << ',' << n << ',' << r.first_band << ',' << r.global_band << ','
             << r.rho1_sign << ',' << r.omega1_sign << ',' << r.b1_sign << ',' << r.b3_sign;
        for (double v : r.min_flags) *dst << ',' << format_double(v);
        *dst << ',' << r.termination << ',' << csv_quote(r.error) << '\n';
    }
    return kExitPass;
}

int cmd_verify(const std::string& path, const std::string& report_path, std::ostream& out, std::ostream& err) {
    std::ifstream f(path);
    if (!f) fail(err, kExitUsage, "cannot open " + path);
    ProfileFile pf;
    try {
        pf = read_profile(f);
    } catch (const ParseError& e) {
        fail(err, kExitUsage, std::string("[parse] ") + path + ": " + e.what());
    }
    RunConfig c;
    c.gamma = pf.gamma;
    c.gamma_text = format_double(pf.gamma);
    c.n = pf.n;
    Params p = checked_params(c, err);
    if (std::abs(pf.alpha - p.alpha()) > 1e-12 * std::abs(p.alpha()))
        fail(err, kExitUsage, "[parse] header alpha = " + format_double(pf.alpha) +
                                  " does not match the alpha derived from (gamma, n) = " + format_double(p.alpha()));
    for (std::size_t i = 1; i < pf.states.size(); ++i)
        if (!(pf.states[i].y > pf.states[i - 1].y))
            fail(err, kExitUsage, "[parse] y column is not strictly increasing at row " + std::to_string(i + 1));
    CoeffTable t = checked_build(p, 30, err);
    VerificationReport rep = verify(p, pf.states, t);
    if (!report_path.empty()) {
        nlohmann::json cfg = {{"source", path}, {"series_order", 30}};
        write_json(report_path, report_json(rep, cfg, std::nullopt), err);
    }
    out << path << ": samples=" << rep.samples << " verdict=" << (rep.pass() ? "pass" : "fail") << '\n';
    if (!rep.pass()) {
        print_failed(rep, err);
        return kExitFailure;
    }
    return kExitPass;
}

int cmd_fields(const RunConfig& c, double t, const std::vector<double>& radii, std::ostream& out, std::ostream& err) {
    check_solve_config(c, err);
    if (!(t < 0)) fail(err, kExitUsage, "--t must be negative");
    Params p = checked_params(c, err);
    checked_build(p, c.order, err);
    check_solve_order(c, err);
    check_band(p, c.force, err);
    Solution sol = run_pipeline(p, c, err);
    if (!is_success(sol.profile.termination))
        fail(err, kExitFailure, std::string("integration stopped: ") + to_string(sol.profile.termination));
    std::vector<PhysicalSample> rows;
    for (double r : radii) {
        try {
            rows.push_back(physical_fields(p, sol, t, r));
        } catch (const RangeError& e) {
            fail(err, kExitUsage, std::string("[range] ") + e.what());
        } catch (const DomainError& e) {
            fail(err, kExitUsage, e.what());
        }
    }
    out << "t,r,y,rho_tilde,u_tilde,p_tilde,mass\n";
    for (const auto& s : rows)
        out << format_double(s.t) << ',' << format_double(s.r) << ',' << format_double(s.y) << ','
            << format_double(s.rho_tilde) << ',' << format_double(s.u_tilde) << ',' << format_double(s.p_tilde)
            << ',' << format_double(s.mass) << '\n';
    return kExitPass;
}

void add_run_options(CLI::App* sub, RunConfig& c) {
    sub->add_option("--gamma", c.gamma_text, "adiabatic index, decimal or p/q")->required();
    sub->add_option("--n", c.n, "regularity index, even and >= 4")->required();
    sub->add_option("--order", c.order, "series order")->capture_default_str();
    sub->add_option("--ymax", c.ymax, "outer end of the integration")->capture_default_str();
    sub->add_option("--rel-tol", c.rel_tol, "relative tolerance for the handoff and integrator")->capture_default_str();
    sub->add_flag("--force", c.force, "integrate outside the global-theorem band");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Self-similar implosion profiles for the non-isentropic Euler-Poisson system"};
    app.require_subcommand(1);

    RunConfig solve_cfg;
    auto* solve = app.add_subcommand("solve", "build the series, integrate outward, write profile and report");
    add_run_options(solve, solve_cfg);
    solve->add_option("--out", solve_cfg.out_profile, "profile CSV path")->capture_default_str();
    solve->add_option("--report", solve_cfg.out_report, "verification report JSON path")->capture_default_str();

    RunConfig coeff_cfg;
    std::string coeff_out;
    auto* coeffs = app.add_subcommand("coeffs", "dump the series coefficient table as CSV");
    coeffs->add_option("--gamma", coeff_cfg.gamma_text, "adiabatic index, decimal or p/q")->required();
    coeffs->add_option("--n", coeff_cfg.n, "regularity index")->required();
    coeffs->add_option("--order", coeff_cfg.order, "series order")->capture_default_str();
    coeffs->add_option("--out", coeff_out, "CSV path (default standard output)");

    double gmin = 0, gmax = 0;
    int steps = 25, scan_n = 4;
    bool scan_force = false;
    std::string scan_out;
    auto* scan = app.add_subcommand("scan", "summarise series signs and short runs across a gamma grid");
    scan->add_option("--gamma-min", gmin, "first grid gamma")->required();
    scan->add_option("--gamma-max", gmax, "last grid gamma")->required();
    scan->add_option("--steps", steps, "grid points, endpoints included")->capture_default_str();
    scan->add_option("--n", scan_n, "regularity index")->capture_default_str();
    scan->add_flag("--force", scan_force, "allow ranges outside the first band");
    scan->add_option("--out", scan_out, "CSV path (default standard output)");

    std::string verify_path, verify_report;
    auto* ver = app.add_subcommand("verify", "rerun every monitor check on a stored profile CSV");
    ver->add_option("profile", verify_path, "profile CSV written by solve")->required();
    ver->add_option("--report", verify_report, "write a verification report JSON here");

    RunConfig field_cfg;
    double field_t = -1;
    std::vector<double> field_r;
    auto* fields = app.add_subcommand("fields", "evaluate physical fields at time t and radii r");
    add_run_options(fields, field_cfg);
    fields->add_option("--t", field_t, "time, negative")->required();
    fields->add_option("--r", field_r, "one or more radii")->required();

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitPass;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitPass;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (*solve) {
            solve_cfg.gamma = checked_gamma(solve_cfg.gamma_text, err);
            return cmd_solve(solve_cfg, out, err);
        }
        if (*coeffs) {
            coeff_cfg.gamma = checked_gamma(coeff_cfg.gamma_text, err);
            return cmd_coeffs(coeff_cfg, coeff_out, out, err);
        }
        if (*scan) return cmd_scan(gmin, gmax, steps, scan_n, scan_force, scan_out, out, err);
        if (*ver) return cmd_verify(verify_path, verify_report, out, err);
        if (*fields) {
            field_cfg.gamma = checked_gamma(field_cfg.gamma_text, err);
            return cmd_fields(field_cfg, field_t, field_r, out, err);
        }
    } catch (const Exit& e) {
        return e.code;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace implosion::cli
