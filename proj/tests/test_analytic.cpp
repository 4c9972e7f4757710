#include <cmath>

#include <gtest/gtest.h>

#include "mcshare/analytic.hpp"

using namespace mcshare;

// Reference values from tests/oracles/reference_values.py (mpmath).

namespace {

SystemParams with_eps(double eps)
{
    SystemParams p;
    p.epsilon = eps;
    return p;
}

} // namespace

TEST(Laplace, InterferenceTransform)
{
    const SystemParams p;
    EXPECT_NEAR(laplace_ic(1.0, 100.0, p), 0.862393111875769971, 1e-14);
    EXPECT_NEAR(laplace_ic(1.0, 1e-9, p), 1.0, 1e-15);
    EXPECT_GT(laplace_ic(1.0, 100.0, p), laplace_ic(1.0, 200.0, p));
    EXPECT_GT(laplace_ic(1.0, 100.0, p), laplace_ic(2.0, 100.0, p));
}

TEST(Laplace, LeakageTransform)
{
    const SystemParams p;
    EXPECT_NEAR(laplace_io(1.0, 500.0, p), 0.001582385280801721, 1e-16);
    EXPECT_NEAR(laplace_io(1.0, p.x_d, p), 1.0 / (1.0 + p.epsilon * power_ratio(p)), 1e-15);
    EXPECT_EQ(laplace_io(5.0, 300.0, without_leakage(p)), 1.0);
}

TEST(P1, ClosedFormWithoutLeakage)
{
    const SystemParams p;
    EXPECT_NEAR(p1_closed_no_al(1.0, p), 0.560099153511557376, 1e-14);
    EXPECT_NEAR(p1_closed_no_al(10.0, p), 0.200049610280541484, 1e-14);
    auto sparse = p;
    sparse.lambda_c = 1e-6;
    EXPECT_EQ(p1_closed_no_al(3.0, p), p1_closed_no_al(3.0, sparse));
}

TEST(P1, QuadratureMatchesClosedFormWithoutLeakage)
{
    const auto p = without_leakage(SystemParams{});
    for (double e = -2.0; e <= 2.0; e += 0.1) {
        const double theta = std::pow(10.0, e);
        EXPECT_NEAR(p1_success(theta, p), p1_closed_no_al(theta, p), 1e-10) << theta;
        EXPECT_NEAR(p1_success_direct(theta, p).value, p1_closed_no_al(theta, p), 1e-10) << theta;
    }
}

TEST(P1, ReferenceValuesWithLeakage)
{
    EXPECT_NEAR(p1_success(1.0, with_eps(0.1)), 0.185756257319946552, 1e-10);
    EXPECT_NEAR(p1_success(1.0, with_eps(0.5)), 0.101287693845811098, 1e-10);
    auto p = with_eps(0.1);
    p.lambda_c = 1e-6;
    EXPECT_NEAR(p1_success(0.1, p), 0.126119391557503807, 1e-10);
}

TEST(P1, LeakageIsNotNegligibleAtDefaults)
{
    // Y r^4 ~ 16 at the typical serving distance, so p1 sits far below 1/(1+rho).
    const auto d = p1_success_detail(1.0, SystemParams{});
    EXPECT_NEAR(d.detail.y_factor, 0.1 * power_ratio(SystemParams{}) / 625.0, 1e-20);
    EXPECT_GT(p1_closed_no_al(1.0, SystemParams{}) - d.value, 0.3);
}

TEST(P1, TwoPathsAgree)
{
    for (double eps : {0.01, 0.1, 0.5, 1.0})
        for (double lambda : {1e-6, 3e-6, 6e-6})
            for (double db = -20.0; db <= 20.0; db += 2.5) {
                auto p = with_eps(eps);
                p.lambda_c = lambda;
                const double theta = db_to_linear(db);
                EXPECT_NEAR(p1_success(theta, p), p1_success_direct(theta, p).value, 1e-8)
                    << eps << " " << lambda << " " << db;
            }
}

TEST(P1, Limits)
{
    EXPECT_NEAR(p1_success(1e-9, SystemParams{}), 1.0, 1e-4);
    EXPECT_THROW(p1_success(0.0, SystemParams{}), std::domain_error);
}

TEST(P1, JointPowerScalingInvariance)
{
    auto a = SystemParams{};
    auto b = a;
    b.p_c_dbm += 13.0;
    b.p_o_dbm += 13.0;
    for (double theta : {0.1, 1.0, 10.0}) {
        EXPECT_NEAR(p1_success(theta, a), p1_success(theta, b), 1e-12);
        EXPECT_NEAR(p2_series(theta, a), p2_series(theta, b), 1e-12);
    }
    EXPECT_NEAR(ergodic_rate_bh(a).integral_value, ergodic_rate_bh(b).integral_value, 1e-9);
}

TEST(XFactor, Defaults)
{
    const SystemParams p;
    EXPECT_NEAR(x_factor(p), 0.0448568194949189480, 1e-15);
    EXPECT_NEAR(x_factor(with_eps(0.8)), 0.126874244989272447, 1e-14);
    auto dense = p;
    dense.lambda_c *= 2;
    EXPECT_NEAR(x_factor(dense), 2 * x_factor(p), 1e-15);
    EXPECT_LT(x_factor(with_eps(1e-12)), 1e-6);
}

TEST(P2, KZeroCollapsesToExponential)
{
    for (double x : {0.0, 0.01, 0.0449, 0.3, 1.0})
        for (double e = -2.0; e <= 1.0; e += 0.1) {
            const double theta = std::pow(10.0, e);
            const auto r = p2_series_from_x(theta, x, 0.0, 4.0, 70, 70);
            EXPECT_NEAR(r.detail.raw_value, std::exp(-x * std::sqrt(theta)), 1e-10) << x << " " << theta;
        }
    auto p = SystemParams{};
    p.k_factor = 0.0;
    EXPECT_NEAR(p2_series(1.0, p), 0.956134371835160941, 1e-12);
}

TEST(P2, MatchesLevyOracleAtAlphaFour)
{
    // Independent oracle: at alpha_i = 4 the normalized interference is Levy
    // distributed, p2 = int f_h(h) erfc(X sqrt(theta) / (2 sqrt(h))) dh.
    const SystemParams p;
    EXPECT_NEAR(p2_series(0.1, p), 0.993406852257960204, 1e-9);
    EXPECT_NEAR(p2_series(1.0, p), 0.979244390365393799, 1e-9);
    EXPECT_NEAR(p2_series(10.0, p), 0.935315240396848707, 1e-9);
    EXPECT_NEAR(p2_series(0.1, with_eps(0.8)), 0.981422632862314307, 1e-9);
    EXPECT_NEAR(p2_series(10.0, with_eps(0.8)), 0.824428474820962921, 1e-9);
}

TEST(P2, TruncationStable)
{
    for (double eps : {0.1, 0.5, 1.0})
        for (double db = -20.0; db <= 20.0; db += 5.0) {
            auto a = with_eps(eps);
            auto b = a;
            b.j_trunc = b.q_trunc = 90;
            const double theta = db_to_linear(db);
            EXPECT_NEAR(p2_series(theta, a), p2_series(theta, b), 1e-9) << eps << " " << db;
        }
}

TEST(P2, Diagnostics)
{
    const auto r = p2_series_detail(1.0, SystemParams{});
    EXPECT_EQ(r.detail.j_terms, 70);
    EXPECT_EQ(r.detail.q_terms, 70);
    EXPECT_NEAR(r.detail.x_factor, 0.0448568194949189480, 1e-15);
    EXPECT_GT(r.detail.largest_term, 0.0);
    EXPECT_LT(r.detail.largest_term, kSignificanceLimit * std::fabs(r.detail.raw_value));
    EXPECT_EQ(r.value, std::clamp(r.detail.raw_value, 0.0, 1.0));
}

TEST(P2, SmallThresholdGivesOne)
{
    EXPECT_NEAR(p2_series(1e-10, SystemParams{}), 1.0, 1e-4);
}

TEST(P2, UniformAccessDistanceAverages)
{
    auto p = SystemParams{};
    p.l_mode = AccessDistanceMode::uniform;
    // closer users see a stronger signal
    EXPECT_GT(p2_series(1.0, p), p2_series(1.0, SystemParams{}));
    auto k0 = p;
    k0.k_factor = 0.0;
    // K = 0: average of exp(-X(l) sqrt(theta)) over l ~ U[0.5, 8]
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double l = 0.5 + 7.5 * (i + 0.5) / n;
        sum += std::exp(-x_factor_at(k0, l) * std::sqrt(2.0));
    }
    EXPECT_NEAR(p2_series(2.0, k0), sum / n, 1e-8);
}

TEST(P2Simplified, DiffersFromFullSeries)
{
    const SystemParams p;
    const double s = p2_series_simplified(1.0, p);
    EXPECT_TRUE(std::isfinite(s));
    EXPECT_GT(std::fabs(s - p2_series(1.0, p)), 0.01);
    // the prefactor tends to 1 for a vanishing threshold
    EXPECT_NEAR(p2_series_simplified(1e-14, p) / p2_series_simplified_from_x(1e-14, 0.0, 2.0, 4.0, 70, 70), 1.0, 1e-6);
}

TEST(P2Simplified, KZeroHasOnlyTheExponentialPrefactor)
{
    // K = 0: only j = m = 0 survives and sum_q Gamma ratio(2q/alpha, 0) = Q + 1.
    const double x = 0.2, theta = 3.0;
    const double v = p2_series_simplified_from_x(theta, x, 0.0, 4.0, 70, 70);
    EXPECT_NEAR(v, 71.0 * std::exp(-x * std::sqrt(theta)), 1e-12);
}

TEST(Rate, NoLeakage)
{
    const auto r = ergodic_rate_bh(without_leakage(SystemParams{}));
    EXPECT_NEAR(r.integral_value, 1.48898762466582957, 1e-8);
    EXPECT_LE(r.est_error, kRateTolerance);
    EXPECT_EQ(r.f_factor, 0.0);
}

TEST(Rate, WithLeakage)
{
    EXPECT_NEAR(ergodic_rate_bh(with_eps(0.1)).integral_value, 0.521268199916747782, 1e-8);
    EXPECT_NEAR(ergodic_rate_bh(with_eps(0.4)).integral_value, 0.318322327781711213, 1e-8);
    EXPECT_NEAR(ergodic_rate_bh(with_eps(0.8)).integral_value, 0.242477126120117181, 1e-8);
    auto sparse = with_eps(0.1);
    sparse.lambda_c = 1e-6;
    EXPECT_NEAR(ergodic_rate_bh(sparse).integral_value, 0.128544082837608645, 1e-8);
}

TEST(Rate, IntegrandAtSigmaOne)
{
    // w = 1/sigma - 1 = 0: exponent and leakage term vanish
    for (double g : {0.2, 0.5, 0.9})
        EXPECT_NEAR(ergodic_rate_integrand(g, 1.0, 0.37), 1.0 / (g * g), 1e-15);
    EXPECT_EQ(ergodic_rate_integrand(1e-4, 0.5, 0.0), 0.0);
}

TEST(Rate, RequiresAlphaFour)
{
    auto p = SystemParams{};
    p.alpha_i = 3.5;
    EXPECT_THROW(ergodic_rate_bh(p), std::invalid_argument);
}
