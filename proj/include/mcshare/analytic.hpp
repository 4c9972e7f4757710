#pragma once

// Analytic performance of the shared DL-BH / DL-AL sub-channel: backhaul
// success probability p1, access-link success probability p2 and the
// backhaul ergodic rate.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "mcshare/model.hpp"
#include "mcshare/quadrature.hpp"
#include "mcshare/specialfn.hpp"

namespace mcshare {

/// Laplace transform of the MeNB interference at the tagged MC:
/// exp(-pi r^2 lambda_c rho(theta, alpha_i)).
inline double laplace_ic(double theta, double r, const SystemParams& p)
{
    return std::exp(-M_PI * r * r * p.lambda_c * rho(theta, p.alpha_i));
}

/// Laplace transform of the AL-antenna leakage into the BH antenna.
inline double laplace_io(double theta, double r, const SystemParams& p)
{
    return 1.0 / (1.0 + p.epsilon * theta * std::pow(r / p.x_d, p.alpha_i) * power_ratio(p));
}

// --- backhaul success probability -----------------------------------------

struct P1Intermediates {
    double z_factor = 0.0; // pi lambda_c (1 + rho)
    double y_factor = 0.0; // epsilon theta (P_o/P_c) / x_d^alpha_i
    double quadrature_error = 0.0;
};

struct P1Result {
    double value = 0.0;
    P1Intermediates detail;
};

/// Leakage-free limit Y = 0: p1 = 1 / (1 + rho(theta, alpha_i)); lambda_c cancels.
inline double p1_closed_no_al(double theta, const SystemParams& p) { return 1.0 / (1.0 + rho(theta, p.alpha_i)); }

/// Absolute error target for both p1 quadrature paths.
inline constexpr double kP1Tolerance = 1e-10;

namespace detail {

// In u = r sqrt(Z) the integral becomes
//   p1 = 2c int_0^inf u e^{-u^2} / (1 + y' u^alpha) du,
// with c = pi lambda_c / Z = 1/(1+rho) and y' = Y / Z^{alpha/2}.
struct P1Scaled {
    double c;
    double y;
    double alpha;
    P1Intermediates inter;
};

template <class RhoFn>
P1Scaled p1_scaled(double theta, const SystemParams& p, RhoFn&& rho_fn)
{
    if (!(theta > 0))
        throw std::domain_error("p1: theta must be > 0");
    const double r = rho_fn(theta, p.alpha_i);
    if (!(1.0 + r > 0))
        throw std::domain_error("p1: 1 + rho must be positive (integral diverges)");
    P1Scaled s;
    s.inter.z_factor = M_PI * p.lambda_c * (1.0 + r);
    s.inter.y_factor = p.epsilon * theta * power_ratio(p) / std::pow(p.x_d, p.alpha_i);
    s.c = 1.0 / (1.0 + r);
    s.y = s.inter.y_factor / std::pow(s.inter.z_factor, 0.5 * p.alpha_i);
    s.alpha = p.alpha_i;
    return s;
}

inline double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

} // namespace detail

/// p1 by quadrature on [0, R_cut], R_cut chosen so the dropped tail is below 1e-10.
template <class RhoFn>
P1Result p1_success_direct_with(double theta, const SystemParams& p, RhoFn&& rho_fn)
{
    auto s = detail::p1_scaled(theta, p, rho_fn);
    // tail <= c e^{-U^2}
    const double u_cut = std::sqrt(std::log(std::max(s.c, 1e-300) / 1e-11));
    auto f = [&](double u) { return u * std::exp(-u * u) / (1.0 + s.y * std::pow(u, s.alpha)); };
    auto r = quad::gauss_kronrod(f, 0.0, u_cut);
    r.value *= 2.0 * s.c;
    r.error = 2.0 * s.c * r.error + s.c * std::exp(-u_cut * u_cut);
    quad::require(r, kP1Tolerance, "p1_success (direct)");
    s.inter.quadrature_error = r.error;
    return {detail::clamp01(r.value), s.inter};
}

/// p1 via the tangent substitution r = tan(pi d / 2) on d in (0, 1), applied
/// to the scaled radius so the integrand mass sits in the middle of (0, 1).
template <class RhoFn>
P1Result p1_success_with(double theta, const SystemParams& p, RhoFn&& rho_fn)
{
    auto s = detail::p1_scaled(theta, p, rho_fn);
    auto f = [&](double d) {
        const double t = std::tan(0.5 * M_PI * d);
        if (t * t > 745.0)
            return 0.0;
        const double sec2 = 1.0 + t * t;
        return t * sec2 * std::exp(-t * t) / (1.0 + s.y * std::pow(t, s.alpha));
    };
    auto r = quad::gauss_kronrod(f, 0.0, 1.0);
    r.value *= M_PI * s.c;
    r.error *= M_PI * s.c;
    quad::require(r, kP1Tolerance, "p1_success (tan substitution)");
    s.inter.quadrature_error = r.error;
    return {detail::clamp01(r.value), s.inter};
}

struct DefaultRho {
    double operator()(double theta, double alpha) const { return rho(theta, alpha); }
};

inline P1Result p1_success_detail(double theta, const SystemParams& p) { return p1_success_with(theta, p, DefaultRho{}); }

inline P1Result p1_success_direct(double theta, const SystemParams& p)
{
    return p1_success_direct_with(theta, p, DefaultRho{});
}

/// DL-BH success probability P[SIR_1 > theta].
inline double p1_success(double theta, const SystemParams& p) { return p1_success_detail(theta, p).value; }

// --- access-link success probability -------------------------------------

/// X = lambda_c pi (eps l^alpha_o)^{2/alpha_i} (P_c/P_o)^{2/alpha_i} beta(alpha_i),
/// evaluated at access distance `l`.
inline double x_factor_at(const SystemParams& p, double l)
{
    const double d = 2.0 / p.alpha_i;
    return p.lambda_c * M_PI * std::pow(p.epsilon * std::pow(l, p.alpha_o), d) * std::pow(1.0 / power_ratio(p), d) *
           beta_delta(p.alpha_i);
}

inline double x_factor(const SystemParams& p) { return x_factor_at(p, p.l); }

struct P2Intermediates {
    double x_factor = 0.0;
    int j_terms = 0;
    int q_terms = 0;
    double largest_term = 0.0;
    double raw_value = 0.0; // before clamping to [0, 1]
};

struct P2Result {
    double value = 0.0;
    P2Intermediates detail;
};

class SignificanceLoss : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// largest_term / |result| above this is reported as loss of significance.
inline constexpr double kSignificanceLimit = 1e12;

namespace detail {

inline void check_theta(double theta)
{
    if (!(theta > 0))
        throw std::domain_error("p2: theta must be > 0");
}

// log(K^j e^{-K} / j!), -inf when K = 0 and j > 0.
inline double log_poisson_weight(double k, int j)
{
    if (k == 0.0)
        return j == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return j * std::log(k) - k - std::lgamma(j + 1.0);
}

} // namespace detail

/// Truncated double series for p2 with the interference factor X given
/// directly:
///   sum_{j<=J} sum_{m<=j} K^j (-theta)^{j-m} / (e^K j! (j-m)!)
///     sum_{q<=Q} (-1)^q X^q / q! theta^{2q/alpha_i - (j-m)} Gamma(2q/alpha_i+1)/Gamma(2q/alpha_i-(j-m)+1).
/// Terms are accumulated as log-magnitude and sign.
inline P2Result p2_series_from_x(double theta, double x, double k, double alpha_i, int j_trunc, int q_trunc)
{
    detail::check_theta(theta);
    if (!(x >= 0) || !(k >= 0) || !(alpha_i > 2) || j_trunc < 1 || q_trunc < 1)
        throw std::domain_error("p2_series: invalid arguments");

    const double delta = 2.0 / alpha_i;
    // The theta powers combine to theta^{2q/alpha_i}; u = X theta^{2/alpha_i}.
    const double u = x * std::pow(theta, delta);
    const double log_u = std::log(u);

    // inner[n] = (-1)^n / n! sum_q (-u)^q / q! * Gamma ratio(q delta, n)
    std::vector<double> inner(j_trunc + 1, 0.0);
    std::vector<double> inner_peak(j_trunc + 1, 0.0);
    for (int n = 0; n <= j_trunc; ++n) {
        const double log_nfact = std::lgamma(n + 1.0);
        double sum = 0.0;
        double peak = 0.0;
        for (int q = 0; q <= q_trunc; ++q) {
            if (u == 0.0 && q > 0)
                break;
            const auto g = log_gamma_ratio(q * delta, n);
            if (g.sign == 0)
                continue;
            const double log_mag = (q > 0 ? q * log_u : 0.0) - std::lgamma(q + 1.0) + g.log_abs - log_nfact;
            const double mag = std::exp(log_mag);
            const int sign = g.sign * ((q + n) % 2 == 0 ? 1 : -1);
            sum += sign * mag;
            peak = std::max(peak, mag);
        }
        inner[n] = sum;
        inner_peak[n] = peak;
    }

    P2Result out;
    out.detail.x_factor = x;
    out.detail.j_terms = j_trunc;
    out.detail.q_terms = q_trunc;
    double total = 0.0;
    double largest = 0.0;
    for (int j = 0; j <= j_trunc; ++j) {
        const double lw = detail::log_poisson_weight(k, j);
        if (!std::isfinite(lw))
            continue;
        const double w = std::exp(lw);
        double row = 0.0;
        double row_peak = 0.0;
        for (int n = 0; n <= j; ++n) {
            row += inner[n];
            row_peak = std::max(row_peak, inner_peak[n]);
        }
        total += w * row;
        largest = std::max(largest, w * row_peak);
    }
    out.detail.largest_term = largest;
    out.detail.raw_value = total;
    if (largest > kSignificanceLimit * std::fabs(total)) {
        std::ostringstream msg;
        msg << "p2_series: loss of significance (largest term " << largest << ", result " << total << ")";
        throw SignificanceLoss(msg.str());
    }
    out.value = detail::clamp01(total);
    return out;
}

/// Averages f(l) over the access-distance model: f(l) in fixed mode, the
/// mean over l ~ U[0.5, l] in uniform mode.
template <class F>
double average_over_access_distance(const SystemParams& p, F&& f)
{
    if (p.l_mode == AccessDistanceMode::fixed)
        return f(p.l);
    auto r = quad::gauss_kronrod(f, kMinAccessDistance, p.l, 1e-12, 20);
    quad::require(r, 1e-9 * (p.l - kMinAccessDistance), "access-distance average");
    return r.value / (p.l - kMinAccessDistance);
}

/// DL-AL success probability P[SIR_2 > theta] from the full truncated series.
inline P2Result p2_series_detail(double theta, const SystemParams& p)
{
    if (p.l_mode == AccessDistanceMode::fixed)
        return p2_series_from_x(theta, x_factor(p), p.k_factor, p.alpha_i, p.j_trunc, p.q_trunc);
    P2Result last;
    double largest = 0.0;
    const double raw = average_over_access_distance(p, [&](double l) {
        last = p2_series_from_x(theta, x_factor_at(p, l), p.k_factor, p.alpha_i, p.j_trunc, p.q_trunc);
        largest = std::max(largest, last.detail.largest_term);
        return last.detail.raw_value;
    });
    P2Result out = last;
    out.detail.x_factor = x_factor(p);
    out.detail.largest_term = largest;
    out.detail.raw_value = raw;
    out.value = detail::clamp01(raw);
    return out;
}

inline double p2_series(double theta, const SystemParams& p) { return p2_series_detail(theta, p).value; }

/// The published "simplified" closed-series form
///   exp(-X theta^{2/alpha_i}) sum_j sum_m K^j (-1)^{j-m} / (e^K j! (j-m)!) sum_q Gamma ratio(2q/alpha_i, j-m),
/// evaluated verbatim for comparison only. Not clamped.
inline double p2_series_simplified_from_x(double theta, double x, double k, double alpha_i, int j_trunc, int q_trunc)
{
    detail::check_theta(theta);
    const double delta = 2.0 / alpha_i;
    std::vector<double> inner(j_trunc + 1, 0.0);
    for (int n = 0; n <= j_trunc; ++n) {
        const double log_nfact = std::lgamma(n + 1.0);
        double sum = 0.0;
        for (int q = 0; q <= q_trunc; ++q) {
            const auto g = log_gamma_ratio(q * delta, n);
            if (g.sign != 0)
                sum += g.sign * std::exp(g.log_abs - log_nfact);
        }
        inner[n] = (n % 2 == 0 ? 1.0 : -1.0) * sum;
    }
    double total = 0.0;
    for (int j = 0; j <= j_trunc; ++j) {
        const double lw = detail::log_poisson_weight(k, j);
        if (!std::isfinite(lw))
            continue;
        double row = 0.0;
        for (int n = 0; n <= j; ++n)
            row += inner[n];
        total += std::exp(lw) * row;
    }
    return std::exp(-x * std::pow(theta, delta)) * total;
}

inline double p2_series_simplified(double theta, const SystemParams& p)
{
    return average_over_access_distance(p, [&](double l) {
        return p2_series_simplified_from_x(theta, x_factor_at(p, l), p.k_factor, p.alpha_i, p.j_trunc, p.q_trunc);
    });
}

// --- backhaul ergodic rate -------------------------------------------------

struct RateIntermediates {
    double f_factor = 0.0; // P_o eps / (P_c x_d^4)
    double integral_value = 0.0;
    double est_error = 0.0;
};

inline constexpr double kRateTolerance = 1e-6;

namespace detail {

// Integrand of the rate integral with w = 1/sigma - 1 passed directly
// (avoids cancellation in 1/sigma - 1 as sigma -> 1); excludes the 1/sigma^2
// factor, which is the Jacobian of w -> sigma.
inline double ergodic_rate_integrand_w(double g, double w, double leak)
{
    if (!(g > 0) || !(w >= 0))
        return 0.0;
    const double t = 1.0 / g - 1.0;
    if (t > 700.0)
        return 0.0;
    const double theta = std::expm1(t);
    const double exponent = theta > 0 ? w * (1.0 + rho(theta, 4.0)) : w;
    if (exponent > 745.0)
        return 0.0;
    return std::exp(-exponent) / (g * g * (1.0 + w * w * leak * theta));
}

} // namespace detail

/// Integrand of the ergodic rate over (g, sigma) in (0,1)^2, where
/// t = 1/g - 1 is the log-rate threshold and pi lambda_c r^2 = 1/sigma - 1.
/// `leak` is F / (lambda_c pi)^2. Extended by 0 where it underflows.
inline double ergodic_rate_integrand(double g, double sigma, double leak)
{
    if (!(sigma > 0) || !(sigma <= 1))
        return 0.0;
    return detail::ergodic_rate_integrand_w(g, 1.0 / sigma - 1.0, leak) / (sigma * sigma);
}

/// Backhaul ergodic rate E[ln(1 + SIR_1)] in nats/s/Hz; alpha_i must be 4.
inline RateIntermediates ergodic_rate_bh(const SystemParams& p)
{
    if (p.alpha_i != 4.0)
        throw std::invalid_argument("ergodic_rate_bh: only alpha_i = 4 is supported");
    RateIntermediates out;
    out.f_factor = power_ratio(p) * p.epsilon / std::pow(p.x_d, 4.0);
    const double leak = out.f_factor / std::pow(p.lambda_c * M_PI, 2.0);

    double worst_inner = 0.0;
    auto outer = [&](double g) {
        const double t = 1.0 / g - 1.0;
        if (!(g > 0) || t > 700.0)
            return 0.0;
        // The sigma-integrand is packed against sigma = 1 with width ~ 1/(1 + rho).
        // Integrate piecewise in w = 1/sigma - 1, between breakpoints graded on that scale.
        const double theta = std::expm1(t);
        const double scale = 1.0 / (1.0 + (theta > 0 ? rho(theta, 4.0) : 0.0));
        double value = 0.0;
        double error = 0.0;
        double v_lo = 0.0;
        for (double v_hi = 0.125; v_lo < 745.0; v_hi *= 2.0) {
            // v = w / scale; d sigma = -sigma^2 dw cancels the 1/sigma^2 of the integrand
            auto piece = quad::gauss_kronrod(
                [&](double v) { return scale * detail::ergodic_rate_integrand_w(g, v * scale, leak); }, v_lo, v_hi,
                1e-12, 12);
            value += piece.value;
            error += piece.error;
            v_lo = v_hi;
        }
        worst_inner = std::max(worst_inner, error);
        return value;
    };
    auto r = quad::gauss_kronrod(outer, 0.0, 1.0, 1e-10, 15);
    r.error += worst_inner;
    out.integral_value = r.value;
    out.est_error = r.error;
    quad::require(r, kRateTolerance, "ergodic_rate_bh");
    return out;
}

} // namespace mcshare
