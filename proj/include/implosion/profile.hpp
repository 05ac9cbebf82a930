#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "implosion/params.hpp"
#include "implosion/series.hpp"

namespace implosion {

struct ProfileState {
    double y = 0;
    double rho = 0;
    double omega = 0;
};

struct AuxValues {
    double p = 0;
    double h = 0;
    double q = 0;
    double G = 0;
    double u = 0;
    double mass = 0;
};

struct Derivatives {
    double drho_dy = 0;
    double domega_dy = 0;
};

class SonicProximityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

AuxValues aux(const Params& params, const ProfileState& s);
// |G| below 1e-14 y^2 omega^2 raises SonicProximityError.
Derivatives rhs(const Params& params, const ProfileState& s);
Derivatives rhs(const Params& params, const ProfileState& s, const AuxValues& a);

struct Handoff {
    double y0 = 0;
    int order = 0;
    double radius = 0;
    ProfileState state;
};

// Largest y <= radius/2 whose relative series tail is within rel_tol.
Handoff handoff(const CoeffTable& table, double rel_tol);

enum class Termination { reached_ymax, sonic_hit, rho_floor, nonfinite, invariant_violation, step_failure };

const char* to_string(Termination t);
// rho_floor counts as success: rho -> 0 is the expected physics.
bool is_success(Termination t);

struct Controls {
    double rel_tol = 1e-10;
    int points_per_decade = 64;
    double rho_floor = 1e-12;
    long max_steps = 1000000;
};

struct ProfileSample {
    ProfileState state;
    AuxValues aux;
    Derivatives deriv;
};

struct ProfileResult {
    std::vector<ProfileSample> samples;
    Termination termination = Termination::step_failure;
    std::string note;
    Handoff handoff;
    long accepted_steps = 0;
    long rejected_steps = 0;
};

ProfileResult integrate(const Params& params, const ProfileState& start, double y_max,
                        const Controls& controls = {});

// Series, handoff and outward integration in one call.
struct Solution {
    CoeffTable table;
    ProfileResult profile;
};

Solution solve(const Params& params, int order, double y_max, const Controls& controls = {});

}  // namespace implosion
