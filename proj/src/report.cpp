#include "implosion/report.hpp"

#include <cmath>

namespace implosion {

namespace {

using nlohmann::json;

// JSON has no infinities; non-finite values become null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json state_json(const ProfileState& s) { return {{"y", num(s.y)}, {"rho", num(s.rho)}, {"omega", num(s.omega)}}; }

}  // namespace

json config_json(const RunConfig& c, const Controls& ctl) {
    return {{"gamma_input", c.gamma_text},
            {"order", c.order},
            {"ymax", c.ymax},
            {"rel_tol", c.rel_tol},
            {"out_profile", c.out_profile},
            {"out_report", c.out_report},
            {"force", c.force},
            {"points_per_decade", ctl.points_per_decade},
            {"rho_floor", ctl.rho_floor},
            {"max_steps", ctl.max_steps},
            {"pressure_scale", 1.0}};
}

json report_json(const VerificationReport& r, const json& config, const std::optional<ProfileResult>& run) {
    const Params& p = r.params;
    json out;
    out["params"] = {{"gamma", p.gamma()},
                     {"n", p.n()},
                     {"alpha", p.alpha()},
                     {"a1", p.idx.a1},
                     {"a2", p.idx.a2},
                     {"a3", p.idx.a3},
                     {"b", p.idx.b},
                     {"rho0", p.sonic.rho0},
                     {"omega0", p.sonic.omega0},
                     {"p0", p.sonic.p0},
                     {"m0", p.sonic.m0},
                     {"first_band", p.gn.first_band()},
                     {"global_band", p.gn.global_band()},
                     {"config", config}};

    json handoff = {{"y0", num(r.y0)}};
    if (run) {
        const Handoff& h = run->handoff;
        handoff["y0"] = num(h.y0);
        handoff["order"] = h.order;
        handoff["radius"] = num(h.radius);
        handoff["state"] = state_json(h.state);
        handoff["integration"] = {{"termination", to_string(run->termination)},
                                  {"note", run->note},
                                  {"samples", run->samples.size()},
                                  {"accepted_steps", run->accepted_steps},
                                  {"rejected_steps", run->rejected_steps},
                                  {"y_end", run->samples.empty() ? json(nullptr) : num(run->samples.back().state.y)}};
    }
    out["handoff"] = handoff;

    json flags = json::object();
    for (std::size_t k = 0; k < r.flags.size(); ++k) {
        const FlagSummary& f = r.flags[k];
        flags[kFlagNames[k]] = {{"min_margin", num(f.min_margin)},
                                {"argmin_y", num(f.argmin_y)},
                                {"violated", f.violated},
                                {"marginal", f.marginal}};
    }
    flags["min_minus_G_over_y2omega2"] = num(r.min_minus_G);
    out["flags_summary"] = flags;

    out["identities"] = {{"b3_identity", num(r.max_identity.b3_identity)},
                         {"b1_identity", num(r.max_identity.b1_identity)},
                         {"rhoprime_identity", num(r.max_identity.rhoprime_identity)},
                         {"min_ab_slack", num(r.min_ab_slack)},
                         {"mass", num(r.max_mass_residual)},
                         {"entropy", num(r.max_entropy_residual)},
                         {"min_flux_deficit_increment", num(r.min_flux_deficit_increment)},
                         {"min_rhoprime_bound_slack", num(r.min_rhoprime_bound_slack)}};

    const SupersonicMargin& s = r.supersonic;
    out["supersonic"] = {{"g0", num(s.g0_estimate)},
                         {"delta", num(s.delta)},
                         {"omega_upper", num(s.omega_upper_bound)},
                         {"omega_max_observed", num(s.omega_upper_observed)},
                         {"minus_g_lower_bound_slack", num(s.lower_bound_slack)}};

    const StructuralRecord& st = r.structural;
    json quad = json::array();
    for (std::size_t i = 0; i < st.quadratic.size(); ++i)
        quad.push_back({{"x", kQuadraticPoints[i]}, {"value", st.quadratic[i]}});
    out["structural"] = {{"q2", st.q2}, {"q3", st.q3},         {"S", st.S},
                         {"T", st.T},   {"combination", st.combination}, {"quadratic", quad}};

    if (r.asymptotics) {
        const AsymptoticsRecord& a = *r.asymptotics;
        out["asymptotics"] = {{"rho_ratio", num(a.rho_ratio)},
                              {"last_decade_slope", num(a.last_decade_slope)},
                              {"far_field_slope", num(a.far_field_slope)},
                              {"far_field_ratio_min", num(a.far_field_ratio_min)},
                              {"far_field_ratio_max", num(a.far_field_ratio_max)},
                              {"omega_log_slope", num(a.omega_log_slope)},
                              {"rho_decreasing_last_decade", a.rho_decreasing_last_decade}};
    } else {
        out["asymptotics"] = {{"note", r.asymptotics_note}};
    }

    json checks = json::array();
    for (const Check& c : r.checks)
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"value", num(c.value)}, {"detail", c.detail}});
    out["verdict"] = {{"pass", r.pass()}, {"checks", checks}, {"failed", r.failed()}};
    return out;
}

}  // namespace implosion
