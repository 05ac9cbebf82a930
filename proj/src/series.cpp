#include "implosion/series.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "implosion/kahan.hpp"

namespace implosion {

namespace {

double at(const Coeffs& a, int i) {
    return (i >= 0 && i < static_cast<int>(a.size())) ? a[i] : 0.0;
}

void require_same_length(std::size_t a, std::size_t b) {
    if (a != b) throw std::invalid_argument("coefficient sequences differ in length");
}

// Walks the partitions of `rem` with parts <= kmax, accumulating
// prod a_k^m_k / m_k! together with the part count.
struct PartitionWalker {
    const Coeffs& a;
    const std::vector<double>& weight;  // falling(e, j) * a0^(e-j)
    KahanSum acc;

    void walk(int rem, int kmax, int parts, double term) {
        if (rem == 0) {
            acc.add(weight[parts] * term);
            return;
        }
        for (int k = std::min(kmax, rem); k >= 1; --k) {
            if (a[k] == 0.0) continue;
            double t = term;
            for (int m = 1; m * k <= rem; ++m) {
                t *= a[k] / m;
                walk(rem - m * k, k - 1, parts + m, t);
            }
        }
    }
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

Coeffs round_product(const Coeffs& a, const Coeffs& b) {
    require_same_length(a.size(), b.size());
    Coeffs out(a.size());
    for (std::size_t m = 0; m < a.size(); ++m) {
        KahanSum s;
        for (std::size_t i = 0; i <= m; ++i) s += a[i] * b[m - i];
        out[m] = s.value();
    }
    return out;
}

Coeffs round_product(const Coeffs& a, const Coeffs& b, const Coeffs& c) {
    require_same_length(a.size(), b.size());
    require_same_length(a.size(), c.size());
    Coeffs out(a.size());
    for (std::size_t m = 0; m < a.size(); ++m) {
        KahanSum s;
        for (std::size_t i = 0; i <= m; ++i)
            for (std::size_t j = 0; i + j <= m; ++j) s += a[i] * b[j] * c[m - i - j];
        out[m] = s.value();
    }
    return out;
}

double square_product(const Coeffs& a, const Coeffs& b, int order) {
    if (order < 1) throw std::invalid_argument("square_product needs order >= 1");
    KahanSum s;
    for (int i = 1; i < order; ++i) {
        int j = order - i;
        if (i >= static_cast<int>(a.size()) || j >= static_cast<int>(b.size()))
            throw std::invalid_argument("square_product: insufficient coefficients");
        s += a[i] * b[j];
    }
    return s.value();
}

double square_product(const Coeffs& a, const Coeffs& b, const Coeffs& c, int order) {
    if (order < 1) throw std::invalid_argument("square_product needs order >= 1");
    KahanSum s;
    for (int i = 0; i < order; ++i) {
        for (int j = 0; i + j <= order; ++j) {
            int k = order - i - j;
            if (j == order || k == order) continue;
            if (i >= static_cast<int>(a.size()) || j >= static_cast<int>(b.size()) ||
                k >= static_cast<int>(c.size()))
                throw std::invalid_argument("square_product: insufficient coefficients");
            s += a[i] * b[j] * c[k];
        }
    }
    return s.value();
}

double power_coefficient(const Coeffs& a, double exponent, int order) {
    if (order < 0) throw std::invalid_argument("power_coefficient needs order >= 0");
    if (static_cast<int>(a.size()) <= order)
        throw std::invalid_argument("power_coefficient: insufficient coefficients");
    double a0 = a[0];
    if (order == 0) return std::pow(a0, exponent);
    // weight[j] = e(e-1)...(e-j+1) a0^(e-j)
    std::vector<double> weight(order + 1);
    double falling = 1.0;
    double a0pow = std::pow(a0, exponent);
    for (int j = 0; j <= order; ++j) {
        weight[j] = falling * a0pow;
        falling *= exponent - j;
        a0pow /= a0;
    }
    PartitionWalker w{a, weight, {}};
    w.walk(order, order, 0, 1.0);
    return w.acc.value();
}

double faa_di_bruno_P(const CoeffTable& table, int order) {
    return power_coefficient(table.rhobar, table.params.gamma(), order);
}

double faa_di_bruno_W(const CoeffTable& table, int order) {
    std::size_t len = order + 1;
    if (table.rhobar.size() < len || table.omegabar.size() < len)
        throw std::invalid_argument("faa_di_bruno_W: insufficient coefficients");
    Coeffs r(table.rhobar.begin(), table.rhobar.begin() + len);
    Coeffs w(table.omegabar.begin(), table.omegabar.begin() + len);
    return power_coefficient(round_product(r, w), table.params.n() / 3.0 - 1.0, order);
}

double q_coeff(const CoeffTable& table, int order) {
    if (order == 0) return 0.0;
    if (static_cast<int>(table.pbar.size()) < order || static_cast<int>(table.wbar.size()) < order)
        throw std::invalid_argument("q_coeff: P and W needed through order-1");
    const Params& p = table.params;
    double gamma = p.gamma();
    KahanSum s;
    for (int i = 1; i <= order; ++i) s += table.pbar[i - 1] * table.wbar[order - i];
    return (2.0 - gamma) * p.alpha() * p.half_defect_sq() * s.value();
}

Matrix2 assemble_AM(const Params& p, int order) {
    if (order < 1) throw std::invalid_argument("matrix_AM needs order >= 1");
    double r0 = p.sonic.rho0, w0 = p.sonic.omega0;
    double k = 2.0 / 9.0 * p.half_defect_sq();
    double c1 = p.c1();
    double lead = order * (p.n() - 2.0) * w0 * w0;
    Matrix2 a;
    a.a11 = lead - k;
    a.a12 = 4.0 * r0 * w0 + c1 * r0 - k * r0 / w0;
    a.a21 = -k * w0 / r0;
    a.a22 = -lead + w0 * w0 + c1 * w0 - k;
    return a;
}

double relative_det(const Matrix2& a) {
    double scale = std::abs(a.a11 * a.a22) + std::abs(a.a12 * a.a21);
    return scale > 0 ? std::abs(a.det()) / scale : 0.0;
}

Matrix2 matrix_AM(const Params& p, int order) {
    Matrix2 a = assemble_AM(p, order);
    if (relative_det(a) <= kResonanceThreshold) {
        double gres = kLowerGamma + 1.0 / (2.0 * order);
        throw ResonanceError(order, gres,
                             "coefficient matrix A_" + std::to_string(order) + " is singular at gamma = " +
                                 fmt(p.gamma()) + ": resonance gamma = 4/3 + 1/(2M) = " + fmt(gres) +
                                 " with M = " + std::to_string(order) + " (relative det " +
                                 fmt(relative_det(a)) + ")");
    }
    return a;
}

SourcePair source_terms(const CoeffTable& t, int order) {
    const int M = order;
    if (M < 1) throw std::invalid_argument("source_terms needs order >= 1");
    if (static_cast<int>(t.rhobar.size()) < M || static_cast<int>(t.omegabar.size()) < M ||
        static_cast<int>(t.qbar.size()) < M + 1)
        throw std::invalid_argument("source_terms: table too shallow for order " + std::to_string(M));

    const Params& p = t.params;
    double gamma = p.gamma(), alpha = p.alpha();
    int n = p.n();
    double r0 = t.rhobar[0], w0 = t.omegabar[0];
    double k = 2.0 / 9.0 * p.half_defect_sq();
    double c1 = p.c1();
    double gq = (n - 2.0) * gamma / ((2.0 - gamma) * alpha);
    double gw = 3.0 * gamma / ((2.0 - gamma) * alpha);

    // work on copies padded with the unknown order-M entries set to zero
    Coeffs r(t.rhobar.begin(), t.rhobar.begin() + M), w(t.omegabar.begin(), t.omegabar.begin() + M);
    r.push_back(0.0);
    w.push_back(0.0);
    const Coeffs& q = t.qbar;
    Coeffs w2 = round_product(w, w);

    KahanSum f, g;
    f -= 2.0 * square_product(r, w, w, M);
    f -= c1 * square_product(r, w, M);
    f += k * square_product(r, r, w, M) / (r0 * w0);

    g -= 3.0 * w0 * square_product(w, w, M);
    g += square_product(w, w, w, M);
    g -= c1 * square_product(w, w, M);
    g += k * square_product(r, w, w, M) / (r0 * w0);

    for (int i = 0; i <= M; ++i) {
        for (int j = 0; i + j <= M; ++j) {
            double qk = q[M - i - j];
            if (qk == 0.0 || j == 0) continue;
            f += (i + 1) * gq * at(r, i + 1) * w[j - 1] * qk;
            g -= (i + 1) * gq * at(w, i + 1) * w[j - 1] * qk;
        }
    }
    for (int i = 0; i <= M; ++i) {
        f += r[i] * q[M - i];
        g += w[i] * q[M - i];
        g -= gw * (w2[i] - w0 * w[i]) * q[M - i];
    }
    for (int i = 0; i < M - 1; ++i) {
        int j = M - i;
        f -= (i + 1) * (n - 2.0) * r[i + 1] * w2[j - 1];
        g += (i + 1) * (n - 2.0) * w[i + 1] * w2[j - 1];
    }
    return {f.value(), g.value()};
}

namespace {

void append_power_terms(CoeffTable& t, int M) {
    t.pbar.push_back(faa_di_bruno_P(t, M));
    t.wbar.push_back(faa_di_bruno_W(t, M));
}

}  // namespace

CoeffTable build(const Params& params, int order) {
    if (order < 1) throw std::invalid_argument("build needs order >= 1");
    CoeffTable t;
    t.params = params;
    const SonicData& s = params.sonic;
    double gamma = params.gamma();
    int n = params.n();

    t.rhobar = {s.rho0};
    t.omegabar = {s.omega0};
    t.qbar = {0.0};
    append_power_terms(t, 0);

    // first order from the closed forms; A_1 is not guaranteed invertible
    double lead = 3.0 * (n + 1.0) * n / (2.0 * (gamma - 1.0) * (11.0 - 6.0 * gamma));
    t.qbar.push_back(q_coeff(t, 1));
    t.rhobar.push_back(-lead * s.p0);
    t.omegabar.push_back(lead * (n - 2.0) / (n + 1.0) * (s.omega0 / s.rho0) * s.p0);
    append_power_terms(t, 1);

    int tiny_run = 0;
    int last = order;
    for (int M = 2; M <= order; ++M) {
        t.qbar.push_back(q_coeff(t, M));
        SourcePair src = source_terms(t, M);
        Matrix2 a = matrix_AM(params, M);
        double det = a.det();
        double rM = (a.a22 * src.f - a.a12 * src.g) / det;
        double wM = (a.a11 * src.g - a.a21 * src.f) / det;
        if (!std::isfinite(rM) || !std::isfinite(wM))
            throw SeriesError("non-finite Taylor coefficient at order " + std::to_string(M));
        t.rhobar.push_back(rM);
        t.omegabar.push_back(wM);
        append_power_terms(t, M);

        tiny_run = (std::abs(rM) < 1e-300 && std::abs(wM) < 1e-300) ? tiny_run + 1 : 0;
        if (tiny_run == 5) {
            last = M - 5;
            break;
        }
    }
    for (Coeffs* c : {&t.rhobar, &t.omegabar, &t.qbar, &t.pbar, &t.wbar}) c->resize(last + 1);
    t.order = last;
    if (t.order >= 10) t.radius = radius_estimate(t);
    return t;
}

double root_test_radius(const Coeffs& a, const Coeffs& b) {
    int top = static_cast<int>(std::min(a.size(), b.size())) - 1;
    if (top < 1) throw std::invalid_argument("root_test_radius needs at least two coefficients");
    int start = std::max(1, (top + 1) / 2);
    double log_sum = 0.0;
    int count = 0;
    for (int m = start; m <= top; ++m) {
        for (double c : {a[m], b[m]}) {
            if (c == 0.0 || !std::isfinite(c)) continue;
            log_sum += std::log(std::abs(c)) / m;
            ++count;
        }
    }
    if (count == 0) return std::numeric_limits<double>::infinity();
    return std::exp(-log_sum / count);
}

double radius_estimate(const CoeffTable& t) {
    if (t.order < 10) throw std::invalid_argument("radius_estimate needs a table of order >= 10");
    double xr = root_test_radius(t.rhobar, t.omegabar);
    if (std::isinf(xr)) return xr;
    return std::pow(xr, 1.0 / (t.params.n() - 2.0));
}

SeriesValue eval(const CoeffTable& t, double y) {
    if (y < 0) throw SeriesError("series evaluation needs y >= 0");
    if (t.radius && !(y < *t.radius))
        throw SeriesError("y = " + fmt(y) + " is outside the estimated radius of convergence " + fmt(*t.radius));
    int n = t.params.n();
    double x = std::pow(y, n - 2);
    int N = t.order;
    SeriesValue v;
    double r = 0, w = 0, dr = 0, dw = 0;
    for (int m = N; m >= 0; --m) {
        r = r * x + t.rhobar[m];
        w = w * x + t.omegabar[m];
        if (m >= 1) {
            dr = dr * x + m * t.rhobar[m];
            dw = dw * x + m * t.omegabar[m];
        }
    }
    double chain = (n - 2.0) * std::pow(y, n - 3);
    v.rho = r;
    v.omega = w;
    v.drho_dy = dr * chain;
    v.domega_dy = dw * chain;
    double xN = std::pow(x, N);
    v.rho_tail = std::abs(t.rhobar[N]) * xN;
    v.omega_tail = std::abs(t.omegabar[N]) * xN;
    return v;
}

double mass_integral(const CoeffTable& t, double y) {
    int n = t.params.n();
    KahanSum s;
    for (int m = 0; m <= t.order; ++m) {
        double e = m * (n - 2.0) + 3.0;
        s += t.rhobar[m] * std::pow(y, e) / e;
    }
    return 4.0 * std::numbers::pi * s.value();
}

}  // namespace implosion
