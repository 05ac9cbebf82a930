#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace implosion {

// Thrown when (gamma, n) violates a hard constraint. constraint() is a short
// machine-readable tag, what() the human explanation.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string constraint, const std::string& message)
        : std::invalid_argument(message), constraint_(std::move(constraint)) {}
    const std::string& constraint() const noexcept { return constraint_; }

private:
    std::string constraint_;
};

struct GammaN {
    double gamma = 0;
    int n = 0;

    // gamma in (19/12, 11/6)
    bool first_band() const;
    // n in {4, 6} and max(19/12, (10+n)/9) < gamma < 11/6
    bool global_band() const;
};

struct ScalingIndices {
    double alpha = 0;
    double a1 = 0;
    double a2 = 0;
    double a3 = 0;
    double b = 0;
};

struct SonicData {
    double rho0 = 0;
    double omega0 = 0;
    double p0 = 0;
    double m0 = 0;
};

// Everything downstream modules need, derived once from (gamma, n).
struct Params {
    GammaN gn;
    ScalingIndices idx;
    SonicData sonic;

    double gamma() const { return gn.gamma; }
    int n() const { return gn.n; }
    double alpha() const { return idx.alpha; }
    // 4 - 3 gamma + alpha
    double mass_denominator() const { return std::fma(-3.0, gn.gamma, 4.0) + idx.alpha; }
    // gamma - 1 - alpha/2
    double c1() const { return gn.gamma - 1.0 - 0.5 * idx.alpha; }
    // (1 - alpha/2)^2
    double half_defect_sq() const { return (1.0 - 0.5 * idx.alpha) * (1.0 - 0.5 * idx.alpha); }
};

inline constexpr double kLowerGamma = 4.0 / 3.0;
inline constexpr double kFirstBandLow = 19.0 / 12.0;
inline constexpr double kFirstBandHigh = 11.0 / 6.0;

// Inverse of n(gamma, alpha) = 3(2-gamma)alpha/(4-3gamma+alpha).
double derive_alpha(double gamma, int n);
double regularity_index(double gamma, double alpha);

ScalingIndices scaling_indices(double gamma, double alpha);
SonicData sonic_data(double gamma, int n);

// Hard validation plus all derived quantities; throws ValidationError.
Params make_params(double gamma, int n);

struct ConstraintCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct Diagnostics {
    double gamma = 0;
    int n = 0;
    std::vector<ConstraintCheck> checks;
    bool first_band = false;
    bool global_band = false;
    // (M, 4/3 + 1/(2M)) for M = 1..order
    std::vector<std::pair<int, double>> degenerate_gammas;

    bool all_pass() const;
    const ConstraintCheck* find(const std::string& name) const;
};

Diagnostics validate(double gamma, int n, int order = 30);

// Accepts "1.6666666666666667" or "5/3".
double parse_gamma(const std::string& text);

}  // namespace implosion
