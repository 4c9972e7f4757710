#pragma once

// Figure sweeps: analytic curves next to Monte Carlo estimates, emitted as
// CSV tables with `#` metadata lines.

#include <cstdio>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcshare/analytic.hpp"
#include "mcshare/model.hpp"
#include "mcshare/montecarlo.hpp"

namespace mcshare {

inline constexpr const char* kToolVersion = "mcshare 1.0.0";

enum class FigureId { fig2, fig3, fig4, fig5, fig6, custom };

inline const char* figure_name(FigureId id)
{
    switch (id) {
    case FigureId::fig2: return "fig2";
    case FigureId::fig3: return "fig3";
    case FigureId::fig4: return "fig4";
    case FigureId::fig5: return "fig5";
    case FigureId::fig6: return "fig6";
    case FigureId::custom: return "custom";
    }
    return "?";
}

inline std::optional<FigureId> parse_figure(const std::string& name)
{
    for (auto id : {FigureId::fig2, FigureId::fig3, FigureId::fig4, FigureId::fig5, FigureId::fig6, FigureId::custom})
        if (name == figure_name(id))
            return id;
    return std::nullopt;
}

struct SweepSpec {
    FigureId figure = FigureId::fig2;
    RawParams overrides;          // applied over the defaults
    SirThresholdGrid theta_grid;  // swept axis of `custom`
    std::string output_dir = ".";
};

/// One CSV: metadata lines (written with a "# " prefix), fixed columns, rows.
struct Table {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add_row(std::vector<double> row)
    {
        if (row.size() != columns.size())
            throw std::logic_error("Table: row width does not match the schema");
        rows.push_back(std::move(row));
    }
};

inline std::string format_real(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline std::string to_csv(const Table& t)
{
    std::string out;
    for (const auto& [k, v] : t.metadata)
        out += "# " + k + ": " + v + "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        out += (i ? "," : "") + t.columns[i];
    out += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out += (i ? "," : "") + format_real(row[i]);
        out += "\n";
    }
    return out;
}

/// Column names per figure; fixed so downstream scripts can rely on them.
inline std::vector<std::string> figure_columns(FigureId id)
{
    switch (id) {
    case FigureId::fig2: return {"theta_db", "epsilon", "analytic_p1", "mc_p1", "mc_ci95", "n"};
    case FigureId::fig3: return {"theta_db", "lambda_c", "analytic_p1", "mc_p1", "mc_ci95", "n"};
    case FigureId::fig4:
        return {"epsilon", "analytic_p1", "mc_p1", "mc_p1_ci95", "analytic_p2", "mc_p2", "mc_p2_ci95", "n"};
    case FigureId::fig5:
        return {"epsilon", "lambda_c", "analytic_rate", "analytic_rate_err", "mc_rate", "mc_ci95", "n"};
    case FigureId::fig6:
        return {"epsilon",   "theta_db", "analytic_p2", "simplified_p2", "hybrid_p2",
                "hybrid_ci95", "mc_p2",  "mc_ci95",     "n"};
    case FigureId::custom:
        return {"theta_db", "analytic_p1", "mc_p1", "mc_p1_ci95", "analytic_p2", "mc_p2", "mc_p2_ci95", "n"};
    }
    return {};
}

// --- grids -------------------------------------------------------------------

/// step, 2 step, ..., count * step.
inline std::vector<double> multiples(int count, double step)
{
    std::vector<double> out;
    for (int i = 1; i <= count; ++i)
        out.push_back(step * i);
    return out;
}

inline std::vector<double> fig2_epsilons() { return {0.1, 0.2, 0.4, 0.6, 0.8, 1.0}; }
inline std::vector<double> fig4_epsilons() { return multiples(10, 0.1); }
inline std::vector<double> fine_epsilons() { return multiples(20, 0.05); }
inline std::vector<double> lambda_set() { return {1e-6, 3e-6, 6e-6}; }
inline std::vector<double> fig6_theta_db() { return {-10.0, 0.0, 10.0}; }
inline constexpr double kFig4ThetaDb = -10.0;

inline SirThresholdGrid figure_theta_grid() { return {-20.0, 20.0, 1.0}; }

inline std::vector<double> to_linear(const std::vector<double>& db)
{
    std::vector<double> out;
    for (double x : db)
        out.push_back(db_to_linear(x));
    return out;
}

// --- runners -----------------------------------------------------------------

namespace detail {

inline SystemParams with(SystemParams p, double epsilon)
{
    p.epsilon = epsilon;
    return p;
}

inline SystemParams at_density(SystemParams p, double lambda_c)
{
    p.lambda_c = lambda_c;
    return validate(p);
}

inline void base_metadata(Table& t, FigureId id, const SystemParams& p)
{
    t.metadata = {
        {"tool", kToolVersion},
        {"figure", figure_name(id)},
        {"seed", std::to_string(p.seed)},
        {"runs", std::to_string(p.n_runs)},
        {"window_half_width_m", format_real(p.area_half_width)},
        {"access_distance",
         p.l_mode == AccessDistanceMode::fixed ? "fixed l=" + format_real(p.l)
                                               : "uniform on [" + format_real(kMinAccessDistance) + ", " +
                                                     format_real(p.l) + "]"},
    };
    std::string params;
    for (const auto& [k, v] : to_raw(p))
        params += (params.empty() ? "" : " ") + k + "=" + v;
    t.metadata.emplace_back("params", params);
}

} // namespace detail

/// Runs one figure sweep. Swept axes override the corresponding fields of
/// `base`; every other field is taken from it as-is.
inline Table run_figure(const SweepSpec& spec, const McOptions& opt = {})
{
    const SystemParams base = validate(apply_raw(SystemParams{}, spec.overrides));
    require_runs(base, 100, "run_figure");
    Table t;
    detail::base_metadata(t, spec.figure, base);
    t.columns = figure_columns(spec.figure);
    long redraws = 0;
    const double n = base.n_runs;

    switch (spec.figure) {
    case FigureId::fig2: {
        const auto db = figure_theta_grid().db_values();
        const auto lin = to_linear(db);
        const auto sims = simulate_links(base, opt);
        redraws += sims.redraws;
        for (double eps : fig2_epsilons()) {
            const auto p = validate(detail::with(base, eps));
            const auto mc = success_from_samples(sims.sirs(Link::bh, eps), lin);
            for (std::size_t i = 0; i < db.size(); ++i)
                t.add_row({db[i], eps, p1_success(lin[i], p), mc[i].p_hat, mc[i].ci95_halfwidth, n});
        }
        t.metadata.emplace_back("plot", "x=theta_db y=analytic_p1,mc_p1 group=epsilon");
        break;
    }
    case FigureId::fig3: {
        const auto db = figure_theta_grid().db_values();
        const auto lin = to_linear(db);
        for (double lambda : lambda_set()) {
            const auto p = detail::at_density(base, lambda);
            const auto sims = simulate_links(p, opt);
            redraws += sims.redraws;
            const auto mc = success_from_samples(sims.sirs(Link::bh, p.epsilon), lin);
            for (std::size_t i = 0; i < db.size(); ++i)
                t.add_row({db[i], lambda, p1_success(lin[i], p), mc[i].p_hat, mc[i].ci95_halfwidth, n});
        }
        t.metadata.emplace_back("plot", "x=theta_db y=analytic_p1,mc_p1 group=lambda_c");
        break;
    }
    case FigureId::fig4: {
        const double theta = db_to_linear(kFig4ThetaDb);
        const std::vector<double> grid{theta};
        const auto sims = simulate_links(base, opt);
        redraws += sims.redraws;
        for (double eps : fig4_epsilons()) {
            const auto p = validate(detail::with(base, eps));
            const auto bh = success_from_samples(sims.sirs(Link::bh, eps), grid)[0];
            const auto al = success_from_samples(sims.sirs(Link::al, eps), grid)[0];
            t.add_row({eps, p1_success(theta, p), bh.p_hat, bh.ci95_halfwidth, p2_series(theta, p), al.p_hat,
                       al.ci95_halfwidth, n});
        }
        t.metadata.emplace_back("theta_db", format_real(kFig4ThetaDb));
        t.metadata.emplace_back("plot", "x=epsilon y=analytic_p1,mc_p1,analytic_p2,mc_p2 group=none");
        break;
    }
    case FigureId::fig5: {
        require_runs(base, 1000, "fig5");
        for (double lambda : lambda_set()) {
            const auto pl = detail::at_density(base, lambda);
            const auto sims = simulate_links(pl, opt);
            redraws += sims.redraws;
            for (double eps : fine_epsilons()) {
                const auto rate = ergodic_rate_bh(detail::with(pl, eps));
                const auto mc = rate_from_samples(sims.sirs(Link::bh, eps));
                t.add_row({eps, lambda, rate.integral_value, rate.est_error, mc.mean, mc.ci95_halfwidth, n});
            }
        }
        t.metadata.emplace_back("units", "nats/s/Hz");
        t.metadata.emplace_back("plot", "x=epsilon y=analytic_rate,mc_rate group=lambda_c");
        break;
    }
    case FigureId::fig6: {
        const auto sims = simulate_links(base, opt);
        redraws += sims.redraws;
        const auto interference = normalized_mue_interference(base, base.n_runs, opt);
        for (double eps : fine_epsilons()) {
            const auto p = validate(detail::with(base, eps));
            const auto al = sims.sirs(Link::al, eps);
            for (double db : fig6_theta_db()) {
                const double theta = db_to_linear(db);
                const auto mc = success_from_samples(al, std::vector<double>{theta})[0];
                const auto hyb = rician_tail_average(interference, theta, eps, p.k_factor);
                t.add_row({eps, db, p2_series(theta, p), p2_series_simplified(theta, p), hyb.mean, hyb.ci95_halfwidth,
                           mc.p_hat, mc.ci95_halfwidth, n});
            }
        }
        t.metadata.emplace_back("k_factor_note",
                                "K is linear (k_factor=" + format_real(base.k_factor) +
                                    "); reading K as 2 dB gives linear 1.585, rerun with --k 1.585 to compare");
        t.metadata.emplace_back("plot", "x=epsilon y=analytic_p2,hybrid_p2,mc_p2 group=theta_db");
        break;
    }
    case FigureId::custom: {
        const auto db = spec.theta_grid.db_values();
        const auto lin = to_linear(db);
        const auto sims = simulate_links(base, opt);
        redraws += sims.redraws;
        const auto bh = success_from_samples(sims.sirs(Link::bh, base.epsilon), lin);
        const auto al = success_from_samples(sims.sirs(Link::al, base.epsilon), lin);
        for (std::size_t i = 0; i < db.size(); ++i)
            t.add_row({db[i], p1_success(lin[i], base), bh[i].p_hat, bh[i].ci95_halfwidth, p2_series(lin[i], base),
                       al[i].p_hat, al[i].ci95_halfwidth, n});
        t.metadata.emplace_back("plot", "x=theta_db y=analytic_p1,mc_p1,analytic_p2,mc_p2 group=none");
        break;
    }
    }
    t.metadata.emplace_back("redraws", std::to_string(redraws));
    return t;
}

} // namespace mcshare
