#pragma once

#include <stdexcept>
#include <vector>

#include "implosion/params.hpp"
#include "implosion/profile.hpp"

namespace implosion {

struct FarField {
    double rho_amplitude = 0;
    double rho_exponent = 0;
    double p_amplitude = 0;
    double p_exponent = 0;
    double omega = 0;
};

// Exact power-law solution with omega = 2 - gamma. Throws DomainError when gamma = alpha.
FarField far_field(const Params& params);
double far_field_density(const FarField& ff, double y);
ProfileState far_field_state(const FarField& ff, double y);

// Inverts the relative velocity; zero at y = 0.
double velocity(const Params& params, const ProfileState& s);
// Enclosed mass 4 pi y^3 rho omega / (4 - 3 gamma + alpha); zero at y = 0.
double mass(const Params& params, const ProfileState& s);

class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

struct PhysicalSample {
    double t = 0;
    double r = 0;
    double y = 0;
    double rho_tilde = 0;
    double u_tilde = 0;
    double p_tilde = 0;
    double mass = 0;
};

// Self-similar profile at y: series below the first sample, monotone cubic in log y above.
// Throws RangeError above the last sample.
ProfileState profile_at(const Solution& solution, double y);

PhysicalSample physical_fields(const Params& params, const Solution& solution, double t, double r);

}  // namespace implosion
