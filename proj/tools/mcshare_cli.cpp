// Command-line front end: point evaluations, figure sweeps, plots and the
// acceptance suite.
//
// Exit codes: 0 ok, 1 a validation check failed, 2 invalid input,
// 3 numerical or I/O failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcshare/analytic.hpp"
#include "mcshare/experiments.hpp"
#include "mcshare/model.hpp"
#include "mcshare/montecarlo.hpp"
#include "mcshare/plot.hpp"
#include "mcshare/validation.hpp"

namespace fs = std::filesystem;
using namespace mcshare;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kInvalidInput = 2, kInfrastructure = 3 };

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string config;
    std::vector<std::string> sets;
    std::string out = ".";
    bool out_given = false;
    std::optional<std::uint64_t> seed;
    std::optional<int> runs;
    unsigned threads = 0;
    std::string format = "kv";
    double theta_db = 0.0;
    std::optional<double> epsilon;
    std::optional<double> k;
    std::optional<double> lambda;
    std::string link = "bh";
    std::string figure;
    std::string csv_path;
    bool no_plot = false;
    double theta_min = -20.0, theta_max = 20.0, theta_step = 1.0;
};

// Config file, then --set pairs, then the dedicated flags.
RawParams collect_raw(const Options& o)
{
    RawParams raw;
    if (!o.config.empty())
        raw = load_config(o.config);
    for (const auto& kv : o.sets) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw InputError("--set expects key=value, got '" + kv + "'");
        std::string key = kv.substr(0, eq);
        if (key == "runs")
            key = "n_runs";
        raw[key] = kv.substr(eq + 1);
    }
    auto put = [&](const char* key, double v) { raw[key] = format_real(v); };
    if (o.seed)
        raw["seed"] = std::to_string(*o.seed);
    if (o.runs)
        raw["n_runs"] = std::to_string(*o.runs);
    if (o.k)
        put("k_factor", *o.k);
    if (o.lambda)
        put("lambda_c", *o.lambda);
    if (o.epsilon && *o.epsilon != 0.0)
        raw["epsilon"] = format_real(*o.epsilon);
    return raw;
}

// --epsilon 0 selects the leakage-free limit, which validation alone rejects.
SystemParams point_params(const Options& o)
{
    auto p = validate(collect_raw(o));
    if (o.epsilon && *o.epsilon == 0.0)
        p = without_leakage(p);
    return p;
}

void emit(const Options& o, const std::vector<std::pair<std::string, std::string>>& kv)
{
    if (o.format == "csv") {
        for (std::size_t i = 0; i < kv.size(); ++i)
            std::cout << (i ? "," : "") << kv[i].first;
        std::cout << "\n";
        for (std::size_t i = 0; i < kv.size(); ++i)
            std::cout << (i ? "," : "") << kv[i].second;
        std::cout << "\n";
        return;
    }
    for (std::size_t i = 0; i < kv.size(); ++i)
        std::cout << (i ? " " : "") << kv[i].first << "=" << kv[i].second;
    std::cout << "\n";
}

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text))
        throw std::runtime_error("cannot write " + path.string());
}

std::string read_file(const fs::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw InputError("cannot read " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path ensure_dir(const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());
    return fs::path(dir);
}

int cmd_p1(const Options& o)
{
    const auto p = point_params(o);
    const auto r = p1_success_detail(db_to_linear(o.theta_db), p);
    emit(o, {{"p1", format_real(r.value)},
             {"theta_db", format_real(o.theta_db)},
             {"epsilon", format_real(p.epsilon)},
             {"z_factor", format_real(r.detail.z_factor)},
             {"y_factor", format_real(r.detail.y_factor)},
             {"quad_error", format_real(r.detail.quadrature_error)}});
    return kOk;
}

int cmd_p2(const Options& o)
{
    const auto p = point_params(o);
    const double theta = db_to_linear(o.theta_db);
    const auto r = p2_series_detail(theta, p);
    emit(o, {{"p2", format_real(r.value)},
             {"p2_simplified", format_real(p2_series_simplified(theta, p))},
             {"theta_db", format_real(o.theta_db)},
             {"epsilon", format_real(p.epsilon)},
             {"k_factor", format_real(p.k_factor)},
             {"x_factor", format_real(r.detail.x_factor)},
             {"raw", format_real(r.detail.raw_value)},
             {"largest_term", format_real(r.detail.largest_term)}});
    return kOk;
}

int cmd_rate(const Options& o)
{
    const auto p = point_params(o);
    const auto r = ergodic_rate_bh(p);
    emit(o, {{"rate", format_real(r.integral_value)},
             {"est_error", format_real(r.est_error)},
             {"f_factor", format_real(r.f_factor)},
             {"epsilon", format_real(p.epsilon)},
             {"units", "nats/s/Hz"}});
    return kOk;
}

int cmd_mc(const Options& o)
{
    const auto p = point_params(o);
    Link link;
    if (o.link == "bh")
        link = Link::bh;
    else if (o.link == "al")
        link = Link::al;
    else
        throw InputError("--link must be bh or al");
    require_runs(p, 100, "mc");
    const auto sims = simulate_links(p, {o.threads});
    const double theta = db_to_linear(o.theta_db);
    const auto est = success_from_samples(sims.sirs(link, p.epsilon), std::vector<double>{theta})[0];
    emit(o, {{"p_hat", format_real(est.p_hat)},
             {"ci95", format_real(est.ci95_halfwidth)},
             {"n", std::to_string(est.n)},
             {"link", o.link},
             {"theta_db", format_real(o.theta_db)},
             {"epsilon", format_real(p.epsilon)},
             {"seed", std::to_string(p.seed)},
             {"redraws", std::to_string(sims.redraws)}});
    return kOk;
}

int cmd_figure(const Options& o)
{
    auto id = parse_figure(o.figure);
    if (!id)
        throw InputError("unknown figure '" + o.figure + "' (fig2..fig6, custom)");
    if (o.format != "csv" && o.format != "kv")
        throw InputError("--format must be csv");
    if (o.epsilon && *o.epsilon == 0.0)
        throw InputError("figure sweeps need epsilon > 0");
    SweepSpec spec;
    spec.figure = *id;
    spec.overrides = collect_raw(o);
    spec.theta_grid = {o.theta_min, o.theta_max, o.theta_step};
    spec.output_dir = o.out;
    spec.theta_grid.db_values(); // reject a bad grid before any work
    const auto csv = to_csv(run_figure(spec, {o.threads}));
    const auto dir = ensure_dir(o.out);
    const auto csv_path = dir / (std::string(figure_name(*id)) + ".csv");
    write_file(csv_path, csv);
    std::cout << "csv=" << csv_path.string();
    if (!o.no_plot) {
        const auto svg_path = dir / (std::string(figure_name(*id)) + ".svg");
        write_file(svg_path, render_svg(csv));
        std::cout << " svg=" << svg_path.string();
    }
    std::cout << "\n";
    return kOk;
}

int cmd_plot(const Options& o)
{
    const fs::path in(o.csv_path);
    const auto svg = render_svg(read_file(in));
    // next to the CSV unless --out is given
    const auto dir = o.out_given ? ensure_dir(o.out) : in.parent_path();
    const auto out = dir / in.filename().replace_extension(".svg");
    write_file(out, svg);
    std::cout << "svg=" << out.string() << "\n";
    return kOk;
}

int cmd_validate(const Options& o)
{
    AcceptanceOptions opt;
    opt.threads = o.threads;
    if (o.seed)
        opt.seed = *o.seed;
    const auto report = run_acceptance(opt);
    std::string text;
    for (const auto& c : report.checks)
        text += format_check(c) + "\n";
    for (const auto& r : report.reports)
        text += format_report(r) + "\n";
    text += std::string("overall ") + (report.passed() ? "PASS" : "FAIL") + "\n";
    std::cout << text;
    write_file(ensure_dir(o.out) / "validate.txt", text);
    return report.passed() ? kOk : kCheckFailed;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Shared-spectrum mobile-cell backhaul/access analysis and simulation"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;

    app.add_option("--config", o.config, "key=value parameter file")->check(CLI::ExistingFile);
    app.add_option("--set", o.sets, "override one parameter, key=value (repeatable)");
    app.add_option("--out", o.out, "output directory")->each([&o](const std::string&) { o.out_given = true; });
    app.add_option("--seed", o.seed, "master seed");
    app.add_option("--runs", o.runs, "Monte Carlo realizations");
    app.add_option("--threads", o.threads, "worker threads, 0 = all cores (never changes results)");
    app.add_option("--format", o.format, "kv or csv")->check(CLI::IsMember({"kv", "csv"}));
    app.add_option("--theta-db", o.theta_db, "SIR threshold in dB");
    app.add_option("--epsilon", o.epsilon, "penetration factor; 0 selects the leakage-free limit");
    app.add_option("--k", o.k, "Rician K-factor (linear)");
    app.add_option("--lambda", o.lambda, "MeNB density, points/m^2");
    app.add_option("--link", o.link, "bh or al (mc only)");
    app.add_flag("--no-plot", o.no_plot, "skip the SVG plot");
    app.add_option("--theta-min", o.theta_min, "custom sweep: first threshold, dB");
    app.add_option("--theta-max", o.theta_max, "custom sweep: last threshold, dB");
    app.add_option("--theta-step", o.theta_step, "custom sweep: step, dB");

    auto* p1 = app.add_subcommand("p1", "backhaul success probability");
    auto* p2 = app.add_subcommand("p2", "access-link success probability");
    auto* rate = app.add_subcommand("rate", "backhaul ergodic rate");
    auto* mc = app.add_subcommand("mc", "Monte Carlo success estimate");
    auto* figure = app.add_subcommand("figure", "run a figure sweep, write CSV and SVG");
    figure->add_option("id", o.figure, "fig2 | fig3 | fig4 | fig5 | fig6 | custom")->required();
    auto* plot = app.add_subcommand("plot", "re-render the SVG of a figure CSV");
    plot->add_option("csv", o.csv_path, "figure CSV")->required();
    auto* val = app.add_subcommand("validate", "run the acceptance suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInvalidInput;
    }

    try {
        if (*p1) return cmd_p1(o);
        if (*p2) return cmd_p2(o);
        if (*rate) return cmd_rate(o);
        if (*mc) return cmd_mc(o);
        if (*figure) return cmd_figure(o);
        if (*plot) return cmd_plot(o);
        if (*val) return cmd_validate(o);
    } catch (const InvalidParams& e) {
        for (const auto& v : e.violations())
            std::cerr << "error: " << v.field << ": " << v.message << "\n";
        return kInvalidInput;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return kInfrastructure;
    }
    return kInvalidInput;
}
