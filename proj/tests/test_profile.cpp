#include <cmath>

#include "doctest.h"
#include "implosion/profile.hpp"
#include "measure.hpp"
#include "oracles.hpp"

using namespace implosion;

namespace {

const Params kRef = make_params(5.0 / 3.0, 4);

// omega at which G vanishes for fixed (y, rho); G decreases in omega here
double sonic_omega(const Params& p, double y, double rho) {
    double lo = 1e-6, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (aux(p, {y, rho, mid}).G > 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("aux and rhs match the reference system") {
    oracle::Gen gen(11);
    for (int trial = 0; trial < 200; ++trial) {
        double g = gen.first_band_gamma();
        int n = gen.even(4, 8);
        Params p = make_params(g, n);
        ProfileState s{gen.uniform(0.1, 50), gen.uniform(1e-4, 0.05), gen.uniform(0.05, 0.4)};
        oracle::OdeValue ref = oracle::ode(g, n, s.y, s.rho, s.omega);
        if (std::abs(ref.G) < 1e-6 * s.y * s.y * s.omega * s.omega) continue;
        AuxValues a = aux(p, s);
        Derivatives d = rhs(p, s);
        CHECK(oracle::rel(a.p, ref.p) < 1e-12);
        CHECK(std::abs(a.G - ref.G) < 1e-12 * (std::abs(ref.G) + s.y * s.y * s.omega * s.omega));
        CHECK(oracle::rel(d.drho_dy, ref.drho) < 1e-9);
        CHECK(oracle::rel(d.domega_dy, ref.domega) < 1e-9);
    }
}

TEST_CASE("aux rejects states outside the physical domain") {
    CHECK_THROWS_AS(aux(kRef, {1.0, 0.0, 0.1}), DomainError);
    CHECK_THROWS_AS(aux(kRef, {1.0, 0.05, -0.1}), DomainError);
    CHECK_THROWS_AS(aux(kRef, {0.0, 0.05, 0.1}), DomainError);
}

TEST_CASE("rhs refuses sonic states") {
    double w = sonic_omega(kRef, 1.0, kRef.sonic.rho0);
    CHECK_THROWS_AS(rhs(kRef, {1.0, kRef.sonic.rho0, w}), SonicProximityError);
    CHECK_NOTHROW(rhs(kRef, {1.0, kRef.sonic.rho0, 2 * w}));
}

TEST_CASE("velocity and mass entries of aux") {
    AuxValues a = aux(kRef, {2.0, 0.03, 2.0 - kRef.gamma()});
    CHECK(a.u == 0.0);
    CHECK(a.mass == doctest::Approx(4 * std::numbers::pi * 8 * 0.03 * (2.0 - kRef.gamma()) / kRef.mass_denominator()).epsilon(1e-14));
}

TEST_CASE("truncated series satisfies the ODE to roundoff at half the radius") {
    CoeffTable t = build(kRef, 30);
    double nu = *t.radius;
    CHECK(measure::series_ode_residual(t, 0.5 * nu) <= 1e-8);
    CHECK(measure::residual_slope(t, 0.65 * nu, 0.9 * nu, 12) > 10);
}

TEST_CASE("handoff keeps the tail under tolerance") {
    oracle::Gen gen(17);
    for (int trial = 0; trial < 10; ++trial) {
        double g = gen.first_band_gamma();
        int n = gen.even(4, 6);
        CoeffTable t = build(make_params(g, n), 30);
        Handoff h = handoff(t, 1e-10);
        CHECK(h.y0 <= 0.5 * h.radius);
        SeriesValue v = eval(t, h.y0);
        CHECK(v.rho_tail / v.rho <= 1e-10 * (1 + 1e-9));
        CHECK(v.omega_tail / v.omega <= 1e-10 * (1 + 1e-9));
        CHECK(aux(t.params, h.state).G < 0);
    }
    CoeffTable ref = build(kRef, 30);
    CHECK(handoff(ref, 1e-10).y0 == 0.5 * *ref.radius);
    CHECK_THROWS_AS(handoff(build(kRef, 5), 1e-10), SeriesError);
}

TEST_CASE("reference trajectory reaches y_max on the dense grid") {
    Solution sol = solve(kRef, 30, 1e3);
    const ProfileResult& r = sol.profile;
    REQUIRE(r.termination == Termination::reached_ymax);
    REQUIRE(r.samples.size() > 100);
    CHECK(r.samples.front().state.y == r.handoff.y0);
    CHECK(r.samples.back().state.y == 1e3);
    double step = std::log(10.0) / 64;
    for (std::size_t i = 1; i + 1 < r.samples.size(); ++i) {
        double gap = std::log(r.samples[i].state.y / r.samples[i - 1].state.y);
        CHECK(std::abs(gap - step) < 1e-9);
    }
    for (const auto& s : r.samples) {
        CHECK(s.aux.G < 0);
        CHECK(s.state.rho > 0);
    }
    CHECK(r.samples.back().state.rho / kRef.sonic.rho0 == doctest::Approx(6.384e-5).epsilon(1e-3));
}

TEST_CASE("integration converges under tolerance refinement") {
    Solution coarse = solve(kRef, 30, 1e3);
    Controls fine;
    fine.rel_tol = 1e-12;
    ProfileResult r = integrate(kRef, coarse.profile.handoff.state, 1e3, fine);
    REQUIRE(r.termination == Termination::reached_ymax);
    const ProfileState& a = coarse.profile.samples.back().state;
    const ProfileState& b = r.samples.back().state;
    CHECK(oracle::rel(a.rho, b.rho) < 1e-7);
    CHECK(oracle::rel(a.omega, b.omega) < 1e-7);
}

TEST_CASE("first-band trajectories stay supersonic with decreasing density") {
    oracle::Gen gen(23);
    for (int trial = 0; trial < 8; ++trial) {
        int n = gen.even(4, 6);
        double lo = std::max(19.0 / 12.0, (10.0 + n) / 9.0);
        double g = gen.uniform(lo + 1e-3, 11.0 / 6.0 - 1e-3);
        Solution sol = solve(make_params(g, n), 30, 50.0);
        CAPTURE(g);
        CAPTURE(n);
        REQUIRE(sol.profile.termination == Termination::reached_ymax);
        const auto& s = sol.profile.samples;
        for (std::size_t i = 1; i < s.size(); ++i) {
            CHECK(s[i].aux.G < 0);
            CHECK(s[i].state.rho < s[i - 1].state.rho);
            CHECK(s[i].state.omega > sol.table.params.sonic.omega0);
        }
    }
}

TEST_CASE("density floor stops the run as a success") {
    Controls c;
    c.rho_floor = 1e-3;
    Solution sol = solve(kRef, 30, 1e3, c);
    CHECK(sol.profile.termination == Termination::rho_floor);
    CHECK(is_success(sol.profile.termination));
    CHECK(sol.profile.samples.back().state.rho >= 1e-3);
    CHECK(sol.profile.samples.back().state.y < 1e3);
}

TEST_CASE("trajectories outside the first band end at a sonic point") {
    for (double g : {1.57, 1.84}) {
        Solution sol = solve(make_params(g, 4), 30, 1e3);
        CAPTURE(g);
        CHECK(sol.profile.termination == Termination::sonic_hit);
        CHECK_FALSE(is_success(sol.profile.termination));
        CHECK(sol.profile.samples.back().state.y < 20);
    }
}

TEST_CASE("integrate validates its inputs") {
    CoeffTable t = build(kRef, 30);
    Handoff h = handoff(t, 1e-10);
    CHECK_THROWS_AS(integrate(kRef, h.state, h.y0), DomainError);
    CHECK_THROWS_AS(integrate(kRef, {1.0, kRef.sonic.rho0, 1e-6}, 10.0), DomainError);
    CHECK_THROWS_AS(integrate(kRef, {0.0, kRef.sonic.rho0, 0.2}, 10.0), DomainError);
}

TEST_CASE("termination names") {
    CHECK(std::string(to_string(Termination::reached_ymax)) == "reached_ymax");
    CHECK(std::string(to_string(Termination::sonic_hit)) == "sonic_hit");
    CHECK(is_success(Termination::reached_ymax));
    CHECK_FALSE(is_success(Termination::invariant_violation));
    CHECK_FALSE(is_success(Termination::step_failure));
}
