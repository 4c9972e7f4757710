#pragma once

// Goodness-of-fit helpers for the distributional checks on the simulator.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace mcshare::stats {

/// One-sample Kolmogorov-Smirnov statistic sup |F_n - F|.
template <class Cdf>
double ks_statistic(std::span<const double> sample, Cdf&& cdf)
{
    if (sample.empty())
        throw std::invalid_argument("ks_statistic: empty sample");
    std::vector<double> xs(sample.begin(), sample.end());
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

/// Asymptotic KS critical value, sqrt(-ln(alpha/2)/2) / sqrt(n).
/// 1.6276 at alpha = 0.01; adequate for n >= 100.
inline double ks_critical(std::size_t n, double alpha = 0.01)
{
    return std::sqrt(-0.5 * std::log(0.5 * alpha)) / std::sqrt(static_cast<double>(n));
}

struct DispersionTest {
    double index = 0.0;   // sample variance / sample mean
    double p_value = 0.0; // two-sided, chi^2 with n-1 dof
};

/// Poisson dispersion test: (n-1) s^2 / mean ~ chi^2(n-1) for Poisson counts.
inline DispersionTest poisson_dispersion(std::span<const double> counts)
{
    if (counts.size() < 2)
        throw std::invalid_argument("poisson_dispersion: need at least two counts");
    const double n = static_cast<double>(counts.size());
    double mean = 0.0;
    for (double c : counts)
        mean += c;
    mean /= n;
    double ss = 0.0;
    for (double c : counts)
        ss += (c - mean) * (c - mean);
    const double stat = ss / mean;
    boost::math::chi_squared chi(n - 1.0);
    const double lower = boost::math::cdf(chi, stat);
    return {stat / (n - 1.0), std::min(1.0, 2.0 * std::min(lower, 1.0 - lower))};
}

/// Empirical P[X > y].
inline double empirical_ccdf(std::span<const double> sample, double y)
{
    const auto hits = std::count_if(sample.begin(), sample.end(), [y](double x) { return x > y; });
    return static_cast<double>(hits) / static_cast<double>(sample.size());
}

} // namespace mcshare::stats
