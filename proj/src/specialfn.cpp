#include "elcoinv/specialfn.hpp"

#include "elcoinv/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace elcoinv {

namespace {

constexpr long double euler_gamma = 0.5772156649015328606065120900824024310421L;
constexpr int max_hankel_order = 3;
// Series/asymptotic switch. The ascending series is run in 80-bit extended
// precision, so the ~1e5 cancellation at x = 16 still leaves ~14 good digits;
// the asymptotic tail at x = 16 truncates near e^{-2x} ~ 1e-14.
constexpr double series_cutoff = 16.0;

long double factorial(int n) {
    long double f = 1.0L;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

// Ascending power series J_n(x) = sum_k (-1)^k (x/2)^{n+2k} / (k! (n+k)!).
long double bessel_j_series(int n, long double x) {
    const long double h = 0.5L * x;
    const long double q = h * h;
    long double term = std::pow(h, n) / factorial(n);
    long double sum = term;
    for (int k = 1; k <= 200; ++k) {
        term *= -q / (static_cast<long double>(k) * (n + k));
        sum += term;
        if (std::abs(term) < 1e-22L * std::abs(sum) && k > 4) break;
    }
    return sum;
}

double bessel_j_small(int n, double x) {
    return static_cast<double>(bessel_j_series(n, x));
}

// Ascending series for integer-order Y_n combining the log term, the finite
// negative-power sum, and the digamma-weighted power series.
double bessel_y_small(int n, double x) {
    const long double h = 0.5L * x;
    const long double q = h * h;
    const long double log_half_x = std::log(h);

    long double finite = 0.0L;
    long double hpow = std::pow(h, -n);
    for (int k = 0; k < n; ++k) {
        finite += factorial(n - 1 - k) / factorial(k) * hpow;
        hpow *= q;
    }

    // psi(k+1) + psi(n+k+1), advanced incrementally with harmonic numbers.
    long double p1 = -euler_gamma;
    long double p2 = -euler_gamma;
    for (int m = 1; m <= n; ++m) p2 += 1.0L / m;

    long double base = std::pow(h, n) / factorial(n);  // (x/2)^{n+2k} / (k!(n+k)!)
    long double sum = base * (p1 + p2);
    for (int k = 1; k <= 200; ++k) {
        base *= -q / (static_cast<long double>(k) * (n + k));
        p1 += 1.0L / k;
        p2 += 1.0L / (n + k);
        const long double term = base * (p1 + p2);
        sum += term;
        if (std::abs(term) < 1e-22L * std::abs(sum) && k > 4) break;
    }

    const long double jn_log = 2.0L * log_half_x * bessel_j_series(n, x);
    return static_cast<double>((jn_log - finite - sum) / static_cast<long double>(pi));
}

// Large-argument expansion H^(1)_n(x) ~ sqrt(2/(pi x)) e^{i(x - n pi/2 - pi/4)}
// * sum_k i^k a_k(n) / x^k, truncated at the smallest term.
Complex hankel1_asymptotic(int n, double x) {
    using CL = std::complex<long double>;
    const long double xl = x;
    const long double fourn2 = 4.0L * n * n;
    const CL il(0.0L, 1.0L);
    CL term(1.0L, 0.0L);
    CL sum = term;
    long double prev_mag = 1.0L;
    for (int k = 1; k <= 60; ++k) {
        const long double odd = 2.0L * k - 1.0L;
        term *= il * ((fourn2 - odd * odd) / (8.0L * k * xl));
        const long double mag = std::abs(term);
        if (mag >= prev_mag) break;  // asymptotic tail started growing
        sum += term;
        prev_mag = mag;
        if (mag < 1e-22L * std::abs(sum)) break;
    }
    const long double phase = xl - 0.5L * n * static_cast<long double>(pi) - 0.25L * static_cast<long double>(pi);
    const CL out = std::sqrt(2.0L / (static_cast<long double>(pi) * xl)) *
                   CL(std::cos(phase), std::sin(phase)) * sum;
    return {static_cast<double>(out.real()), static_cast<double>(out.imag())};
}

} // namespace

Complex hankel1(int order, double x) {
    if (order < 0 || order > max_hankel_order)
        throw std::domain_error("hankel1: order must be in 0..3");
    if (!(x > 0.0))
        throw std::domain_error("hankel1: argument must be positive");
    if (x < series_cutoff)
        return {bessel_j_small(order, x), bessel_y_small(order, x)};
    return hankel1_asymptotic(order, x);
}

Complex PhiDerivs::entry(int n1, int n2) const {
    if (n1 < 0 || n2 < 0 || n1 + n2 > 3)
        throw std::domain_error("PhiDerivs::entry: derivative order must be in 0..3");
    const double d1 = d.x(), d2 = d.y();
    switch (n1 * 4 + n2) {
        case 0: return value;                                 // (0,0)
        case 4: return B * d1;                                // (1,0)
        case 1: return B * d2;                                // (0,1)
        case 8: return C * d1 * d1 + B;                       // (2,0)
        case 5: return C * d1 * d2;                           // (1,1)
        case 2: return C * d2 * d2 + B;                       // (0,2)
        case 12: return D * d1 * d1 * d1 + 3.0 * C * d1;      // (3,0)
        case 9: return D * d1 * d1 * d2 + C * d2;             // (2,1)
        case 6: return D * d1 * d2 * d2 + C * d1;             // (1,2)
        case 3: return D * d2 * d2 * d2 + 3.0 * C * d2;       // (0,3)
        default: throw std::domain_error("PhiDerivs::entry: bad multi-index");
    }
}

PhiDerivs phi_derivs(double k, const Vec2& x, const Vec2& y, int max_order, Complex scale) {
    if (!(k > 0.0)) throw std::domain_error("phi_derivs: wavenumber must be positive");
    if (max_order < 0 || max_order > 3)
        throw std::domain_error("phi_derivs: max_order must be in 0..3");

    PhiDerivs out;
    out.k = k;
    out.d = x - y;
    out.r = out.d.norm();
    if (out.r < 1e-14)
        throw GeometryError("phi_derivs: evaluation at (nearly) coincident points");

    const double z = k * out.r;
    const Complex h0 = hankel1(0, z);
    const Complex h1 = hankel1(1, z);

    const Complex f0 = scale * h0;
    const Complex f1 = -scale * k * h1;
    const Complex f2 = -scale * k * k * (h0 - h1 / z);
    const Complex f3 = scale * k * k * k * (h1 + h0 / z - 2.0 * h1 / (z * z));

    out.value = f0;
    out.B = f1 / out.r;
    out.C = (f2 - out.B) / (out.r * out.r);
    out.D = (f3 - 3.0 * out.C * out.r) / (out.r * out.r * out.r);
    return out;
}

} // namespace elcoinv
