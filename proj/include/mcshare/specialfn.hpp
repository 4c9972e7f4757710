#pragma once

// Special functions behind the analytic success-probability formulas.

#include <cfloat>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mcshare/quadrature.hpp"

namespace mcshare {

namespace detail {

// I0 power series; fine below the switch point.
inline double bessel_i0_series(double x)
{
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int t = 1; t < 500; ++t) {
        term *= q / (static_cast<double>(t) * t);
        sum += term;
        if (term < 1e-17 * sum)
            break;
    }
    return sum;
}

// sum_k [(2k-1)!!]^2 / (k! (8x)^k), the bracket of the large-x expansion
// I0(x) ~ e^x / sqrt(2 pi x) * [...].
inline double bessel_i0_asymptotic_bracket(double x)
{
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double next = term * (2.0 * k - 1) * (2.0 * k - 1) / (8.0 * k * x);
        if (next > term)
            break; // divergent tail of the asymptotic series
        term = next;
        sum += term;
        if (term < 1e-17 * sum)
            break;
    }
    return sum;
}

} // namespace detail

/// Power series / asymptotic form switch point for I0.
inline constexpr double kBesselSwitch = 30.0;

/// e^{-x} I0(x), finite for every x >= 0.
inline double bessel_i0_scaled(double x)
{
    x = std::fabs(x);
    if (x < kBesselSwitch)
        return std::exp(-x) * detail::bessel_i0_series(x);
    return detail::bessel_i0_asymptotic_bracket(x) / std::sqrt(2.0 * M_PI * x);
}

/// Modified Bessel function of the first kind, order zero. Overflows to +inf
/// past x ~ 713; use bessel_i0_scaled there.
inline double bessel_i0(double x)
{
    x = std::fabs(x);
    if (x < kBesselSwitch)
        return detail::bessel_i0_series(x);
    return std::exp(x) * bessel_i0_scaled(x);
}

/// log|r| and sign of a real number; sign == 0 encodes an exact zero.
struct SignedLog {
    double log_abs = 0.0;
    int sign = 1;
};

/// Gamma(a+1)/Gamma(a-n+1) evaluated as the falling factorial a(a-1)...(a-n+1).
struct GammaRatioTerm {
    double numerator_arg = 0.0;   // a + 1
    double denominator_arg = 0.0; // a - n + 1
    double value = 0.0;
};

namespace detail {

// True when a - n + 1 is a non-positive integer, i.e. 1/Gamma(a-n+1) == 0.
// `a` comes from 2q/alpha and may be off an integer by a few ulps.
inline bool reciprocal_gamma_pole(double a, int n)
{
    const double r = std::round(a);
    return r >= 0 && std::fabs(a - r) <= 64 * DBL_EPSILON * std::fmax(1.0, a) && n > r;
}

inline void require_gamma_args(double a, int n)
{
    if (!(a >= 0) || n < 0)
        throw std::domain_error("gamma_ratio: need a >= 0 and n >= 0");
}

} // namespace detail

/// Log-magnitude form of gamma_ratio; used by the truncated series where
/// the raw ratio reaches ~1e100.
inline SignedLog log_gamma_ratio(double a, int n)
{
    detail::require_gamma_args(a, n);
    if (detail::reciprocal_gamma_pole(a, n))
        return {-std::numeric_limits<double>::infinity(), 0};
    SignedLog out{0.0, 1};
    for (int k = 0; k < n; ++k) {
        const double d = a - k;
        if (d < 0)
            out.sign = -out.sign;
        out.log_abs += std::log(std::fabs(d));
    }
    return out;
}

/// Gamma(a+1)/Gamma(a-n+1) for a >= 0, n >= 0. Exactly zero at the
/// reciprocal-Gamma poles; throws std::overflow_error past DBL_MAX.
inline double gamma_ratio(double a, int n)
{
    detail::require_gamma_args(a, n);
    if (detail::reciprocal_gamma_pole(a, n))
        return 0.0;
    double prod = 1.0;
    for (int k = 0; k < n; ++k)
        prod *= a - k;
    if (!std::isfinite(prod))
        throw std::overflow_error("gamma_ratio: result exceeds double range");
    return prod;
}

inline GammaRatioTerm gamma_ratio_term(double a, int n)
{
    return {a + 1.0, a - n + 1.0, gamma_ratio(a, n)};
}

/// rho(theta, alpha) = theta^{2/alpha} * int_{theta^{-2/alpha}}^inf dx / (1 + x^{alpha/2})
/// by quadrature, after x = theta^{-2/alpha} / w:
///   rho = theta * int_0^1 w^{alpha/2 - 2} / (1 + theta w^{alpha/2}) dw.
/// Absolute error <= 1e-10 or QuadratureError.
inline double rho_quadrature(double theta, double alpha)
{
    if (!(theta > 0) || !(alpha > 2))
        throw std::domain_error("rho: need theta > 0 and alpha > 2");
    const double half = 0.5 * alpha;
    auto f = [=](double w) { return std::pow(w, half - 2.0) / (1.0 + theta * std::pow(w, half)); };
    auto r = quad::tanh_sinh(f, 0.0, 1.0, 1e-14);
    r.value *= theta;
    r.error *= theta;
    quad::require(r, 1e-10, "rho");
    return r.value;
}

/// Interference exponent rho(theta, alpha) of the PPP Laplace transform.
/// Closed form at alpha = 4: sqrt(theta) (pi/2 - atan(1/sqrt(theta))),
/// written as sqrt(theta) atan(sqrt(theta)) to avoid cancellation at small theta.
inline double rho(double theta, double alpha)
{
    if (!(theta > 0) || !(alpha > 2))
        throw std::domain_error("rho: need theta > 0 and alpha > 2");
    if (alpha == 4.0) {
        const double s = std::sqrt(theta);
        return s * std::atan(s);
    }
    return rho_quadrature(theta, alpha);
}

/// beta(delta) = (2 pi / delta) / sin(2 pi / delta); pole at delta = 2.
inline double beta_delta(double delta)
{
    if (!(delta > 2))
        throw std::domain_error("beta_delta: pole at delta = 2 (need delta > 2)");
    const double x = 2.0 * M_PI / delta;
    if (x == 0.0)
        return 1.0;
    return x / std::sin(x);
}

namespace detail {

// Marcum Q1 via the Poisson mixture of Gamma tails:
//   Q1(a, b) = sum_j Pois(j; a^2/2) * P[Pois(b^2/2) <= j].
inline double marcum_q1_logspace(double mu, double y)
{
    const double lmu = std::log(mu);
    const double ly = std::log(y);
    const double sd = std::sqrt(mu);
    const int jmax = static_cast<int>(mu + 14 * sd + 50);
    double q = 0.0;
    double cdf = 0.0;
    for (int j = 0; j <= jmax; ++j) {
        cdf += std::exp(-y + j * ly - std::lgamma(j + 1.0));
        q += std::exp(-mu + j * lmu - std::lgamma(j + 1.0)) * std::fmin(cdf, 1.0);
    }
    return q;
}

} // namespace detail

/// Generalized Marcum Q function of order one, Q1(a, b), for a, b >= 0.
/// For Rician power h normalized to mean K+1, P[h > y] = Q1(sqrt(2K), sqrt(2y)).
inline double marcum_q1(double a, double b)
{
    if (!(a >= 0) || !(b >= 0))
        throw std::domain_error("marcum_q1: need a >= 0 and b >= 0");
    const double mu = 0.5 * a * a;
    const double y = 0.5 * b * b;
    if (y == 0.0)
        return 1.0;
    if (mu == 0.0)
        return std::exp(-y);
    if (mu > 600.0 || y > 600.0)
        return std::fmin(1.0, detail::marcum_q1_logspace(mu, y));

    // Recurrence form; both Poisson pmfs stay representable here.
    const double sd = std::sqrt(mu);
    const int jmax = static_cast<int>(mu + 14 * sd + 50);
    double w = std::exp(-mu); // Pois(j; mu)
    double p = std::exp(-y);  // Pois(j; y)
    double cdf = p;
    double q = w * cdf;
    for (int j = 1; j <= jmax; ++j) {
        w *= mu / j;
        p *= y / j;
        cdf += p;
        q += w * std::fmin(cdf, 1.0);
        if (j > mu && w < 1e-18)
            break;
    }
    return std::fmin(1.0, q);
}

} // namespace mcshare
