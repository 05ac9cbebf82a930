#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "implosion/params.hpp"
#include "implosion/profile.hpp"
#include "implosion/series.hpp"

namespace implosion {

enum class FlagStatus { holds, marginal, violated };

struct FlagValue {
    double margin = 0;
    // |margin| <= 1e-12 * scale counts as marginal
    double scale = 0;
    FlagStatus status() const;
};

struct BootstrapFlags {
    // rho' < 0, rho > 0, omega > omega0, b1, b3
    FlagValue b0, b025, b05, b1, b3;
    std::array<const FlagValue*, 5> all() const { return {&b0, &b025, &b05, &b1, &b3}; }
};

inline constexpr std::array<const char*, 5> kFlagNames{"b0", "b025", "b05", "b1", "b3"};

BootstrapFlags bootstrap(const Params& params, const ProfileState& s, const Derivatives& d);

struct CoefficientBundle {
    double A = 0, B = 0, C = 2, D = 0, E = 0;
    // (-G)/(y^2 omega) at the state
    double g0_margin = 0;
};

CoefficientBundle coefficients(const Params& params, const ProfileState& s);

struct IdentityResiduals {
    double b3_identity = 0;
    double b1_identity = 0;
    double rhoprime_identity = 0;
    // A*Omega + B*R - (n-2)(omega0^2/rho0) R
    double ab_slack = 0;
};

IdentityResiduals identity_residuals(const Params& params, const ProfileState& s, const Derivatives& d);

// Relative residual of p'/p - gamma rho'/rho - (2-gamma)alpha/(y omega) with p' from the closure.
double entropy_residual(const Params& params, const ProfileState& s, const Derivatives& d);

// Largest root of the quadratic bounding omega in the supersonic argument.
double omega_upper_bound(const Params& params);

struct SupersonicMargin {
    double g0_estimate = 0;
    double omega_upper_observed = 0;
    double omega_upper_bound = 0;
    double delta = 0;
    // min over samples (where b1, b3 hold) of (-G)/(y^2 omega) minus its lower bound
    double lower_bound_slack = 0;
};

// delta defaults to the first sample after the handoff.
SupersonicMargin supersonic_margin(const Params& params, const std::vector<ProfileSample>& traj,
                                   std::optional<double> delta = std::nullopt);

struct StructuralRecord {
    std::array<double, 5> quadratic{};
    double q2 = 0, q3 = 0;
    double S = 0, T = 0;
    double combination = 0;
};

inline constexpr std::array<double, 5> kQuadraticPoints{0.0, 0.25, 0.5, 0.75, 1.0};

StructuralRecord structural_positivity(const Params& params);
double q2_value(double gamma, int n);
double q3_value(double gamma, int n);

struct AsymptoticsRecord {
    double rho_ratio = 0;
    double last_decade_slope = 0;
    double far_field_slope = 0;
    double far_field_ratio_min = 0;
    double far_field_ratio_max = 0;
    double omega_log_slope = 0;
    bool rho_decreasing_last_decade = false;
};

// Throws DomainError when the trajectory stops before y = 100.
AsymptoticsRecord asymptotics(const Params& params, const std::vector<ProfileSample>& traj);

// Leading small-y coefficients of the b1 and b3 margins, in powers of x^2 = y^(2(n-2)).
double b1_leading_coefficient(const CoeffTable& table);
double b3_leading_coefficient(const CoeffTable& table);

struct FlagSummary {
    double min_margin = 0;
    double argmin_y = 0;
    int violated = 0;
    int marginal = 0;
};

struct Check {
    std::string name;
    bool pass = false;
    double value = 0;
    std::string detail;
};

struct VerificationReport {
    Params params;
    double y0 = 0;
    std::size_t samples = 0;
    std::array<FlagSummary, 5> flags{};
    double min_minus_G = 0;
    IdentityResiduals max_identity{};
    double min_ab_slack = 0;
    double max_mass_residual = 0;
    double max_entropy_residual = 0;
    // rho0 omega0 - rho omega: first value, then smallest step-to-step increment
    double min_flux_deficit_increment = 0;
    double min_rhoprime_bound_slack = 0;
    bool rho_monotone = false;
    SupersonicMargin supersonic;
    StructuralRecord structural;
    std::optional<AsymptoticsRecord> asymptotics;
    std::string asymptotics_note;
    std::vector<Check> checks;

    bool pass() const;
    std::vector<std::string> failed() const;
};

inline constexpr double kIdentityTol = 1e-10;
inline constexpr double kMassTol = 1e-6;
inline constexpr double kEntropyTol = 1e-8;

// Mass from the corrected trapezoid in log y, with the series below the first sample.
std::vector<double> quadrature_mass(const Params& params, const std::vector<ProfileSample>& traj,
                                    const CoeffTable& table);

// Runs every check on stored (y, rho, omega) samples. Auxiliaries and
// derivatives are recomputed here, never taken from the samples.
VerificationReport verify(const Params& params, const std::vector<ProfileState>& states, const CoeffTable& table);

}  // namespace implosion
