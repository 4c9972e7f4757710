#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "mcshare/analytic.hpp"
#include "mcshare/montecarlo.hpp"
#include "mcshare/stats.hpp"

using namespace mcshare;

namespace {

SystemParams small_run(int runs)
{
    SystemParams p;
    p.n_runs = runs;
    return p;
}

} // namespace

TEST(Ppp, MeanCountOverFullWindow)
{
    // 40 x 40 km at 6e-6 per m^2
    const double hw = 20000.0, lambda = 6e-6;
    const double mean = lambda * 4 * hw * hw;
    EXPECT_NEAR(mean, 9600.0, 1e-9);
    std::vector<double> counts;
    for (int i = 0; i < 200; ++i) {
        auto rng = make_engine(7, StreamDomain::ppp, i);
        counts.push_back(static_cast<double>(sample_ppp(lambda, hw, rng).size()));
    }
    double avg = 0.0;
    for (double c : counts)
        avg += c;
    avg /= counts.size();
    EXPECT_LT(std::fabs(avg - mean), 3.0 * std::sqrt(mean / counts.size()));
    const auto disp = stats::poisson_dispersion(counts);
    EXPECT_GT(disp.p_value, 0.01) << "dispersion index " << disp.index;
}

TEST(Ppp, PointsInsideWindow)
{
    auto rng = make_engine(1, StreamDomain::ppp, 0);
    for (const auto& pt : sample_ppp(1e-4, 500.0, rng)) {
        EXPECT_LE(std::fabs(pt.x), 500.0);
        EXPECT_LE(std::fabs(pt.y), 500.0);
    }
}

TEST(Ppp, EmptyDrawsAreRedrawnAndCounted)
{
    int redraws = 0;
    auto rng = make_engine(3, StreamDomain::ppp, 0);
    // mean count 0.04
    const auto pts = sample_ppp(1e-8, 1000.0, rng, &redraws);
    EXPECT_FALSE(pts.empty());
    EXPECT_GT(redraws, 0);
}

TEST(Deployment, SinglePointServes)
{
    const std::vector<Point> one{{3.0, 4.0}};
    const auto d = deployment_from_points(one, 10.0);
    EXPECT_EQ(d.serving_distance, 5.0);
    EXPECT_TRUE(d.interferer_distances.empty());
    EXPECT_THROW(deployment_from_points(std::vector<Point>{}, 1.0), std::invalid_argument);
}

TEST(Deployment, NearestServesOthersInterfere)
{
    const SystemParams p;
    auto rng = make_engine(11, StreamDomain::network, 0);
    const auto d = realize_network(p, rng);
    EXPECT_GT(d.serving_distance, 0.0);
    for (double r : d.interferer_distances) {
        EXPECT_GE(r, d.serving_distance);
        EXPECT_LE(r, std::sqrt(2.0) * p.area_half_width);
    }
}

TEST(Deployment, ServingDistanceLaw)
{
    const SystemParams p;
    const std::size_t n = 4000;
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto rng = make_engine(5, StreamDomain::ppp, i);
        r[i] = realize_network(p, rng).serving_distance;
    }
    const double d = stats::ks_statistic(r, [&](double x) { return -std::expm1(-p.lambda_c * M_PI * x * x); });
    EXPECT_LT(d, stats::ks_critical(n));
    std::nth_element(r.begin(), r.begin() + n / 2, r.end());
    const double median = std::sqrt(std::log(2.0) / (p.lambda_c * M_PI));
    EXPECT_NEAR(median, 191.8, 0.05);
    EXPECT_NEAR(r[n / 2] / median, 1.0, 0.05);
}

TEST(Rician, KZeroIsExponential)
{
    const std::size_t n = 100000;
    std::vector<double> h(n);
    auto rng = make_engine(9, StreamDomain::rician, 0);
    for (auto& x : h)
        x = sample_rician_gain(0.0, rng);
    EXPECT_LT(stats::ks_statistic(h, [](double y) { return -std::expm1(-y); }), stats::ks_critical(n));
}

TEST(Rician, MeanIsKPlusOne)
{
    const std::size_t n = 1000000;
    auto rng = make_engine(10, StreamDomain::rician, 0);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        sum += sample_rician_gain(2.0, rng);
    EXPECT_NEAR(sum / n / 3.0, 1.0, 0.01);
    EXPECT_THROW(sample_rician_gain(-1.0, rng), std::invalid_argument);
}

TEST(Rician, CcdfMatchesMarcumQ)
{
    const std::size_t n = 100000;
    const double k = 2.0;
    std::vector<double> h(n);
    auto rng = make_engine(12, StreamDomain::rician, 0);
    for (auto& x : h)
        x = sample_rician_gain(k, rng);
    for (int j = 1; j <= 20; ++j) {
        const double y = 0.5 * j;
        const double q = marcum_q1(std::sqrt(2 * k), std::sqrt(2 * y));
        EXPECT_LE(std::fabs(stats::empirical_ccdf(h, y) - q), 3.0 * std::sqrt(q * (1 - q) / n)) << y;
    }
}

TEST(Sir, EmptyInterferenceIsInfinite)
{
    auto p = without_leakage(SystemParams{});
    Deployment d;
    d.serving_distance = 100.0;
    FadingDraw f;
    f.h_serving = 1.0;
    f.h_al = 1.0;
    f.h_mue_serving = 1.0;
    f.access_distance = p.l;
    EXPECT_TRUE(std::isinf(sir_bh(d, f, p)));
    EXPECT_TRUE(std::isinf(sir_al(d, f, p)));
    p.epsilon = 0.1;
    f.h_al_to_bh = 1.0;
    EXPECT_TRUE(std::isfinite(sir_bh(d, f, p)));
}

TEST(Sir, SymmetricInterfererGivesOne)
{
    const auto p = without_leakage(SystemParams{});
    Deployment d;
    d.serving_distance = 250.0;
    d.interferer_distances = {250.0};
    FadingDraw f;
    f.h_serving = 0.7;
    f.h_interferers = {0.7};
    f.h_mue_interferers = {1.0};
    f.access_distance = p.l;
    EXPECT_DOUBLE_EQ(sir_bh(d, f, p), 1.0);
}

TEST(Sir, AccessLinkIncludesServingCellAndScalesWithPowers)
{
    SystemParams p;
    Deployment d;
    d.serving_distance = 100.0;
    d.interferer_distances = {300.0};
    FadingDraw f;
    f.h_serving = 1.0;
    f.h_interferers = {1.0};
    f.h_al_to_bh = 1.0;
    f.h_al = 2.0;
    f.h_mue_serving = 0.5;
    f.h_mue_interferers = {1.5};
    f.access_distance = 8.0;
    const double pc = dbm_to_linear(p.p_c_dbm), po = dbm_to_linear(p.p_o_dbm);
    const double ic = pc * (0.5 * std::pow(100.0, -4) + 1.5 * std::pow(300.0, -4));
    EXPECT_NEAR(sir_al(d, f, p) / (po * std::pow(8.0, -3.5) * 2.0 / (p.epsilon * ic)), 1.0, 1e-12);
    auto q = p;
    q.p_c_dbm += 3.0103;
    q.p_o_dbm += 3.0103;
    EXPECT_NEAR(sir_al(d, f, q) / sir_al(d, f, p), 1.0, 1e-12);
    EXPECT_NEAR(sir_bh(d, f, q) / sir_bh(d, f, p), 1.0, 1e-12);
}

TEST(Estimators, SuccessCi)
{
    const auto e = SuccessEstimate::from_counts(50, 100);
    EXPECT_EQ(e.p_hat, 0.5);
    EXPECT_NEAR(e.ci95_halfwidth, 0.098, 1e-12);
    EXPECT_THROW(SuccessEstimate::from_counts(0, 0), std::invalid_argument);
}

TEST(Estimators, LeakFreeBackhaulMatchesClosedForm)
{
    const auto p = without_leakage(small_run(5000));
    const std::vector<double> grid{db_to_linear(-10), 1.0, db_to_linear(10)};
    const auto est = estimate_success(Link::bh, grid, p);
    for (std::size_t i = 0; i < grid.size(); ++i)
        EXPECT_LE(std::fabs(est[i].p_hat - p1_closed_no_al(grid[i], p)), 2 * est[i].ci95_halfwidth) << i;
}

TEST(Estimators, BackhaulWithLeakageMatchesQuadrature)
{
    auto p = small_run(4000);
    p.epsilon = 0.5;
    const std::vector<double> grid{db_to_linear(-10), 1.0, db_to_linear(5)};
    const auto est = estimate_success(Link::bh, grid, p);
    for (std::size_t i = 0; i < grid.size(); ++i)
        EXPECT_LE(std::fabs(est[i].p_hat - p1_success(grid[i], p)), std::max(0.02, 2 * est[i].ci95_halfwidth)) << i;
}

TEST(Estimators, CiShrinksWithRootN)
{
    const std::vector<double> grid{1.0};
    const auto a = estimate_success(Link::bh, grid, without_leakage(small_run(100)))[0];
    const auto b = estimate_success(Link::bh, grid, without_leakage(small_run(10000)))[0];
    EXPECT_NEAR(a.ci95_halfwidth / b.ci95_halfwidth, 10.0, 1.5);
    EXPECT_THROW(estimate_success(Link::bh, grid, small_run(99)), std::invalid_argument);
}

TEST(Estimators, DeterministicAcrossRunsAndThreads)
{
    const auto p = small_run(600);
    const std::vector<double> grid{0.1, 1.0, 10.0};
    const auto a = estimate_success(Link::al, grid, p, {1});
    const auto b = estimate_success(Link::al, grid, p, {1});
    const auto c = estimate_success(Link::al, grid, p, {7});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_EQ(a[i].p_hat, b[i].p_hat);
        EXPECT_EQ(a[i].p_hat, c[i].p_hat);
        EXPECT_EQ(a[i].ci95_halfwidth, c[i].ci95_halfwidth);
    }
    const auto r1 = estimate_ergodic_rate(small_run(1000), {1});
    const auto r2 = estimate_ergodic_rate(small_run(1000), {5});
    EXPECT_EQ(r1.mean, r2.mean);
}

TEST(Estimators, ErgodicRateFiniteAndDecreasingInEpsilon)
{
    const auto sims = simulate_links(small_run(10000));
    double prev = std::numeric_limits<double>::infinity();
    for (double eps : {0.1, 0.4, 0.8}) {
        const auto sirs = sims.sirs(Link::bh, eps);
        EXPECT_TRUE(std::all_of(sirs.begin(), sirs.end(), [](double s) { return std::isfinite(s) && s >= 0; }));
        const auto r = rate_from_samples(sirs);
        EXPECT_TRUE(std::isfinite(r.mean));
        EXPECT_LT(r.mean, prev);
        prev = r.mean;
    }
    EXPECT_THROW(estimate_ergodic_rate(small_run(999)), std::invalid_argument);
}

TEST(Estimators, LeakFreeRateMatchesQuadrature)
{
    auto p = without_leakage(small_run(10000));
    const auto mc = estimate_ergodic_rate(p);
    const double quad = ergodic_rate_bh(p).integral_value;
    EXPECT_LE(std::fabs(mc.mean - quad), 2.5 * mc.ci95_halfwidth) << mc.mean << " vs " << quad;
}

TEST(Estimators, EpsilonSweepReusesRealizations)
{
    auto p = small_run(200);
    const auto sims = simulate_links(p);
    p.epsilon = 0.3;
    for (std::size_t i = 0; i < 200; i += 37) {
        auto rng = make_engine(p.seed, StreamDomain::network, i);
        const auto d = realize_network(p, rng);
        const auto f = draw_fading(d, p, rng);
        EXPECT_EQ(sims.items[i].sir_bh(0.3), sir_bh(d, f, p));
        EXPECT_EQ(sims.items[i].sir_al(0.3), sir_al(d, f, p));
    }
}

TEST(Hybrid, KZeroEstimatesLaplaceTransform)
{
    auto p = small_run(5000);
    p.k_factor = 0.0;
    const std::vector<double> grid{0.1, 1.0, 10.0};
    const auto h = p2_hybrid(grid, p, 5000);
    for (std::size_t i = 0; i < grid.size(); ++i)
        EXPECT_LE(std::fabs(h[i].mean - std::exp(-x_factor(p) * std::sqrt(grid[i]))),
                  std::max(0.005, 2 * h[i].ci95_halfwidth))
            << grid[i];
}

TEST(Hybrid, SmallThresholdAndGuards)
{
    const auto p = small_run(1000);
    const std::vector<double> grid{1e-12};
    EXPECT_NEAR(p2_hybrid(grid, p, 1000)[0].mean, 1.0, 1e-5);
    EXPECT_THROW(p2_hybrid(grid, p, 999), std::invalid_argument);
}

TEST(Hybrid, AgreesWithAccessLinkSimulation)
{
    const auto p = small_run(5000);
    const std::vector<double> grid{0.1, 1.0, 10.0};
    const auto h = p2_hybrid(grid, p, 5000);
    const auto mc = estimate_success(Link::al, grid, p);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double combined = std::hypot(h[i].ci95_halfwidth, mc[i].ci95_halfwidth);
        EXPECT_LE(std::fabs(h[i].mean - mc[i].p_hat), std::max(0.01, 2 * combined)) << grid[i];
    }
}

TEST(Window, DoublingHalfWidthIsStable)
{
    auto a = without_leakage(small_run(3000));
    auto b = a;
    b.area_half_width *= 2.0;
    const std::vector<double> grid{1.0};
    const auto ea = estimate_success(Link::bh, grid, a)[0];
    const auto eb = estimate_success(Link::bh, grid, b)[0];
    // independent realizations: compare on the two-sample scale
    EXPECT_LE(std::fabs(ea.p_hat - eb.p_hat), 2 * std::hypot(ea.ci95_halfwidth, eb.ci95_halfwidth));
}

TEST(Stats, KsDetectsWrongLaw)
{
    std::vector<double> u(2000);
    auto rng = make_engine(1, StreamDomain::rician, 99);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (auto& x : u)
        x = U(rng);
    EXPECT_LT(stats::ks_statistic(u, [](double x) { return x; }), stats::ks_critical(u.size()));
    EXPECT_GT(stats::ks_statistic(u, [](double x) { return x * x; }), stats::ks_critical(u.size()));
    EXPECT_NEAR(stats::ks_critical(10000), 1.6276 / 100.0, 1e-5);
}
