#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "implosion/params.hpp"

namespace implosion {

using Coeffs = std::vector<double>;

// A_M is (nearly) singular: gamma sits on the resonance 4/3 + 1/(2M).
class ResonanceError : public std::runtime_error {
public:
    ResonanceError(int order, double gamma_res, const std::string& message)
        : std::runtime_error(message), order_(order), gamma_res_(gamma_res) {}
    int order() const noexcept { return order_; }
    double resonant_gamma() const noexcept { return gamma_res_; }

private:
    int order_;
    double gamma_res_;
};

class SeriesError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Taylor coefficients in x = y^(n-2) at the sonic origin.
struct CoeffTable {
    Params params;
    int order = 0;
    Coeffs rhobar;
    Coeffs omegabar;
    Coeffs qbar;
    Coeffs pbar;
    Coeffs wbar;
    // set by build when order >= 10
    std::optional<double> radius;
};

// Cauchy products through the common length of the inputs.
Coeffs round_product(const Coeffs& a, const Coeffs& b);
Coeffs round_product(const Coeffs& a, const Coeffs& b, const Coeffs& c);

// Order-M convolution omitting every term that carries an index equal to M.
double square_product(const Coeffs& a, const Coeffs& b, int order);
double square_product(const Coeffs& a, const Coeffs& b, const Coeffs& c, int order);

// Order-M Taylor coefficient of (sum a_k x^k)^exponent, by partitions of M.
double power_coefficient(const Coeffs& a, double exponent, int order);

double faa_di_bruno_P(const CoeffTable& table, int order);
double faa_di_bruno_W(const CoeffTable& table, int order);
double q_coeff(const CoeffTable& table, int order);

struct Matrix2 {
    double a11 = 0, a12 = 0, a21 = 0, a22 = 0;
    double det() const { return a11 * a22 - a12 * a21; }
};

// Entries of A_M without the singularity check.
Matrix2 assemble_AM(const Params& params, int order);
// As assemble_AM, but throws ResonanceError when A_M is numerically singular.
Matrix2 matrix_AM(const Params& params, int order);
// |det| relative to |a11 a22| + |a12 a21|; the near-singular test uses this.
double relative_det(const Matrix2& a);
inline constexpr double kResonanceThreshold = 1e-8;

struct SourcePair {
    double f = 0;
    double g = 0;
};

// Needs rho/omega through order-1 and Q through order.
SourcePair source_terms(const CoeffTable& table, int order);

CoeffTable build(const Params& params, int order);

// Reciprocal of the top-half geometric-mean root-test rate, in the x variable.
// Returns +inf when every usable coefficient vanishes.
double root_test_radius(const Coeffs& a, const Coeffs& b);
// Radius in y: x_rad^(1/(n-2)).
double radius_estimate(const CoeffTable& table);

struct SeriesValue {
    double rho = 0;
    double omega = 0;
    double drho_dy = 0;
    double domega_dy = 0;
    // magnitude of the last retained term
    double rho_tail = 0;
    double omega_tail = 0;
};

// Throws SeriesError when y is beyond the table's estimated radius.
SeriesValue eval(const CoeffTable& table, double y);

// Integral over [0, y] of 4 pi z^2 rho(z), term by term.
double mass_integral(const CoeffTable& table, double y);

}  // namespace implosion
