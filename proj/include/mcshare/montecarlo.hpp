#pragma once

// Monte Carlo simulator for the tagged mobile cell: PPP MeNB deployments,
// fading draws, per-link SIR and the success / rate estimators.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "mcshare/model.hpp"
#include "mcshare/parallel.hpp"
#include "mcshare/rng.hpp"
#include "mcshare/specialfn.hpp"

namespace mcshare {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// One PPP realization seen from the tagged MC at the window center.
struct Deployment {
    std::vector<double> interferer_distances; // every MeNB but the serving one
    double serving_distance = 0.0;             // nearest MeNB
    double window_half_width = 0.0;
    int redraws = 0; // empty-window redraws while sampling
};

/// Per-realization channel gains. BH-side and MUE-side draws are independent.
struct FadingDraw {
    double h_serving = 0.0;                // serving MeNB -> BH antenna, Exp(1)
    std::vector<double> h_interferers;     // interfering MeNBs -> BH antenna, Exp(1)
    double h_al_to_bh = 0.0;               // AL antenna -> BH antenna leakage, Exp(1)
    double h_al = 0.0;                     // AL antenna -> MUE, Rician power with mean K+1
    double h_mue_serving = 0.0;            // serving MeNB -> MUE, Exp(1)
    std::vector<double> h_mue_interferers; // other MeNBs -> MUE, Exp(1)
    double access_distance = 0.0;          // AL antenna -> MUE, meters
};

/// Binomial success-probability estimate.
struct SuccessEstimate {
    double p_hat = 0.0;
    long n = 0;
    double ci95_halfwidth = 0.0;

    static SuccessEstimate from_counts(long successes, long n)
    {
        if (n <= 0)
            throw std::invalid_argument("SuccessEstimate: n must be positive");
        const double p = static_cast<double>(successes) / static_cast<double>(n);
        return {p, n, 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
    }
};

/// Sample mean with a normal-approximation 95% half-width.
struct MeanEstimate {
    double mean = 0.0;
    long n = 0;
    double ci95_halfwidth = 0.0;
};

enum class Link { bh, al };

struct McOptions {
    unsigned threads = 0; // 0: hardware concurrency; never changes results
};

// --- sampling ----------------------------------------------------------------

/// Homogeneous PPP on [-hw, hw]^2. An empty draw is repeated and counted in
/// *redraws (if given).
template <class Rng>
std::vector<Point> sample_ppp(double lambda, double half_width, Rng& rng, int* redraws = nullptr)
{
    if (!(lambda > 0) || !(half_width > 0))
        throw std::invalid_argument("sample_ppp: need lambda > 0 and half_width > 0");
    const double mean = lambda * 4.0 * half_width * half_width;
    std::poisson_distribution<long> count(mean);
    std::uniform_real_distribution<double> coord(-half_width, half_width);
    long n = count(rng);
    while (n == 0) {
        if (redraws)
            ++*redraws;
        n = count(rng);
    }
    std::vector<Point> pts(static_cast<std::size_t>(n));
    for (auto& p : pts) {
        p.x = coord(rng);
        p.y = coord(rng);
    }
    return pts;
}

/// Nearest point to the origin serves; the rest interfere.
inline Deployment deployment_from_points(std::span<const Point> points, double half_width)
{
    if (points.empty())
        throw std::invalid_argument("deployment_from_points: no points");
    Deployment d;
    d.window_half_width = half_width;
    std::vector<double> dist(points.size());
    std::transform(points.begin(), points.end(), dist.begin(),
                   [](const Point& p) { return std::hypot(p.x, p.y); });
    const auto nearest = std::min_element(dist.begin(), dist.end()) - dist.begin();
    d.serving_distance = dist[nearest];
    d.interferer_distances.reserve(dist.size() - 1);
    for (std::size_t i = 0; i < dist.size(); ++i)
        if (static_cast<std::ptrdiff_t>(i) != nearest)
            d.interferer_distances.push_back(dist[i]);
    return d;
}

template <class Rng>
Deployment realize_network(const SystemParams& p, Rng& rng)
{
    int redraws = 0;
    const auto pts = sample_ppp(p.lambda_c, p.area_half_width, rng, &redraws);
    auto d = deployment_from_points(pts, p.area_half_width);
    d.redraws = redraws;
    return d;
}

/// Rician power gain (sqrt(K) + X)^2 + Y^2 with X, Y ~ N(0, 1/2): LOS power K,
/// scattered power 1, mean K + 1.
template <class Rng>
double sample_rician_gain(double k_factor, Rng& rng)
{
    if (!(k_factor >= 0))
        throw std::invalid_argument("sample_rician_gain: K must be >= 0");
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    const double x = std::sqrt(k_factor) + n(rng);
    const double y = n(rng);
    return x * x + y * y;
}

template <class Rng>
double sample_access_distance(const SystemParams& p, Rng& rng)
{
    if (p.l_mode == AccessDistanceMode::fixed)
        return p.l;
    return std::uniform_real_distribution<double>(kMinAccessDistance, p.l)(rng);
}

template <class Rng>
FadingDraw draw_fading(const Deployment& d, const SystemParams& p, Rng& rng)
{
    std::exponential_distribution<double> exp1(1.0);
    FadingDraw f;
    f.h_serving = exp1(rng);
    f.h_interferers.resize(d.interferer_distances.size());
    for (auto& h : f.h_interferers)
        h = exp1(rng);
    f.h_al_to_bh = exp1(rng);
    f.h_al = sample_rician_gain(p.k_factor, rng);
    f.h_mue_serving = exp1(rng);
    f.h_mue_interferers.resize(d.interferer_distances.size());
    for (auto& h : f.h_mue_interferers)
        h = exp1(rng);
    f.access_distance = sample_access_distance(p, rng);
    return f;
}

// --- SIR ---------------------------------------------------------------------

namespace detail {

inline double pathloss(double r, double alpha)
{
    if (alpha == 4.0) {
        const double r2 = r * r;
        return 1.0 / (r2 * r2);
    }
    return std::pow(r, -alpha);
}

inline double ratio_or_inf(double signal, double denom)
{
    if (denom <= 0.0)
        return std::numeric_limits<double>::infinity();
    return signal / denom;
}

} // namespace detail

/// Epsilon-free pieces of both SIRs for one realization. A sweep over epsilon
/// reuses them, so every epsilon sees the same deployments and gains.
struct LinkComponents {
    double bh_signal = 0.0;       // P_c r^{-a} h
    double bh_interference = 0.0; // sum over interfering MeNBs at the BH antenna
    double bh_leak = 0.0;         // P_o X_d^{-a} h_o, scaled by epsilon in the SIR
    double al_signal = 0.0;       // P_o l^{-alpha_o} h_al
    double al_interference = 0.0; // sum over all MeNBs at the MUE, scaled by epsilon

    double sir_bh(double epsilon) const { return detail::ratio_or_inf(bh_signal, bh_interference + epsilon * bh_leak); }
    double sir_al(double epsilon) const { return detail::ratio_or_inf(al_signal, epsilon * al_interference); }
};

/// Sum of P_c r^{-alpha_i} h over all MeNBs seen by the MUE (serving included).
inline double mue_interference(const Deployment& d, const FadingDraw& f, const SystemParams& p)
{
    double sum = f.h_mue_serving * detail::pathloss(d.serving_distance, p.alpha_i);
    for (std::size_t i = 0; i < d.interferer_distances.size(); ++i)
        sum += f.h_mue_interferers[i] * detail::pathloss(d.interferer_distances[i], p.alpha_i);
    return dbm_to_linear(p.p_c_dbm) * sum;
}

inline LinkComponents link_components(const Deployment& d, const FadingDraw& f, const SystemParams& p)
{
    const double pc = dbm_to_linear(p.p_c_dbm);
    const double po = dbm_to_linear(p.p_o_dbm);
    LinkComponents c;
    c.bh_signal = pc * detail::pathloss(d.serving_distance, p.alpha_i) * f.h_serving;
    double ic = 0.0;
    for (std::size_t i = 0; i < d.interferer_distances.size(); ++i)
        ic += f.h_interferers[i] * detail::pathloss(d.interferer_distances[i], p.alpha_i);
    c.bh_interference = pc * ic;
    c.bh_leak = po * detail::pathloss(p.x_d, p.alpha_i) * f.h_al_to_bh;
    c.al_signal = po * std::pow(f.access_distance, -p.alpha_o) * f.h_al;
    c.al_interference = mue_interference(d, f, p);
    return c;
}

/// Backhaul SIR: P_c r^{-a} h / (I_C + eps P_o X_d^{-a} h_o). +inf when the
/// denominator vanishes.
inline double sir_bh(const Deployment& d, const FadingDraw& f, const SystemParams& p)
{
    return link_components(d, f, p).sir_bh(p.epsilon);
}

/// Access-link SIR: P_o l^{-alpha_o} h_al / (eps I_c). +inf when eps I_c = 0.
inline double sir_al(const Deployment& d, const FadingDraw& f, const SystemParams& p)
{
    return link_components(d, f, p).sir_al(p.epsilon);
}

// --- estimators --------------------------------------------------------------

/// Per-realization SIR components, in realization-index order.
struct Realizations {
    std::vector<LinkComponents> items;
    long redraws = 0;

    std::vector<double> sirs(Link link, double epsilon) const
    {
        std::vector<double> out(items.size());
        for (std::size_t i = 0; i < items.size(); ++i)
            out[i] = link == Link::bh ? items[i].sir_bh(epsilon) : items[i].sir_al(epsilon);
        return out;
    }
};

/// Draws n_runs realizations; realization i uses substream (seed, network, i).
/// epsilon is not used.
inline Realizations simulate_links(const SystemParams& p, const McOptions& opt = {})
{
    if (p.n_runs < 1)
        throw std::invalid_argument("simulate_links: n_runs must be >= 1");
    const auto n = static_cast<std::size_t>(p.n_runs);
    Realizations out;
    out.items.resize(n);
    std::vector<int> redraws(n, 0);
    parallel_for(n, opt.threads, [&](std::size_t i) {
        auto rng = make_engine(p.seed, StreamDomain::network, i);
        const auto d = realize_network(p, rng);
        const auto f = draw_fading(d, p, rng);
        out.items[i] = link_components(d, f, p);
        redraws[i] = d.redraws;
    });
    out.redraws = std::accumulate(redraws.begin(), redraws.end(), 0L);
    return out;
}

/// Fraction of samples with SIR > theta, per theta.
inline std::vector<SuccessEstimate> success_from_samples(std::span<const double> sirs, std::span<const double> thetas)
{
    std::vector<SuccessEstimate> out;
    out.reserve(thetas.size());
    for (double theta : thetas) {
        long hits = 0;
        for (double s : sirs)
            hits += s > theta ? 1 : 0;
        out.push_back(SuccessEstimate::from_counts(hits, static_cast<long>(sirs.size())));
    }
    return out;
}

inline void require_runs(const SystemParams& p, int minimum, const char* what)
{
    if (p.n_runs < minimum)
        throw std::invalid_argument(std::string(what) + ": n_runs must be >= " + std::to_string(minimum));
}

/// Success probability of one link on a grid of linear thresholds; one
/// deployment serves every theta.
inline std::vector<SuccessEstimate> estimate_success(Link link, std::span<const double> thetas, const SystemParams& p,
                                                     const McOptions& opt = {})
{
    require_runs(p, 100, "estimate_success");
    return success_from_samples(simulate_links(p, opt).sirs(link, p.epsilon), thetas);
}

/// Mean and 95% half-width of a sample, accumulated in index order.
inline MeanEstimate mean_estimate(std::span<const double> xs)
{
    if (xs.empty())
        throw std::invalid_argument("mean_estimate: empty sample");
    const double n = static_cast<double>(xs.size());
    double sum = 0.0;
    for (double x : xs)
        sum += x;
    const double mean = sum / n;
    double ss = 0.0;
    for (double x : xs)
        ss += (x - mean) * (x - mean);
    const double sd = xs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    return {mean, static_cast<long>(xs.size()), 1.96 * sd / std::sqrt(n)};
}

/// Ergodic backhaul rate E[ln(1 + SIR_1)] in nats/s/Hz.
inline MeanEstimate rate_from_samples(std::span<const double> sir_bh)
{
    std::vector<double> rates(sir_bh.size());
    std::transform(sir_bh.begin(), sir_bh.end(), rates.begin(), [](double s) { return std::log1p(s); });
    return mean_estimate(rates);
}

inline MeanEstimate estimate_ergodic_rate(const SystemParams& p, const McOptions& opt = {})
{
    require_runs(p, 1000, "estimate_ergodic_rate");
    return rate_from_samples(simulate_links(p, opt).sirs(Link::bh, p.epsilon));
}

/// Normalized MUE interference I'_c = I_c / (P_o l^{-alpha_o}) per sample,
/// drawn from substreams (seed, hybrid, i), independent of simulate_links.
inline std::vector<double> normalized_mue_interference(const SystemParams& p, long n_samples, const McOptions& opt = {})
{
    if (n_samples < 1)
        throw std::invalid_argument("normalized_mue_interference: n_samples must be >= 1");
    const auto n = static_cast<std::size_t>(n_samples);
    const double po = dbm_to_linear(p.p_o_dbm);
    std::vector<double> out(n);
    parallel_for(n, opt.threads, [&](std::size_t i) {
        auto rng = make_engine(p.seed, StreamDomain::hybrid, i);
        const auto d = realize_network(p, rng);
        const auto f = draw_fading(d, p, rng);
        out[i] = mue_interference(d, f, p) / (po * std::pow(f.access_distance, -p.alpha_o));
    });
    return out;
}

/// Mean of the exact Rician tail Q1(sqrt(2K), sqrt(2 theta eps I'_c)) over the samples.
inline MeanEstimate rician_tail_average(std::span<const double> normalized, double theta, double epsilon, double k_factor)
{
    const double a = std::sqrt(2.0 * k_factor);
    std::vector<double> q(normalized.size());
    std::transform(normalized.begin(), normalized.end(), q.begin(),
                   [&](double i) { return marcum_q1(a, std::sqrt(2.0 * theta * epsilon * i)); });
    return mean_estimate(q);
}

/// Semi-analytic p2: the Rician tail averaged over sampled MUE interference.
inline std::vector<MeanEstimate> p2_hybrid(std::span<const double> thetas, const SystemParams& p, long n_samples,
                                           const McOptions& opt = {})
{
    if (n_samples < 1000)
        throw std::invalid_argument("p2_hybrid: n_samples must be >= 1000");
    const auto samples = normalized_mue_interference(p, n_samples, opt);
    std::vector<MeanEstimate> out;
    out.reserve(thetas.size());
    for (double theta : thetas)
        out.push_back(rician_tail_average(samples, theta, p.epsilon, p.k_factor));
    return out;
}

} // namespace mcshare
