#pragma once

// System parameters for the shared-spectrum mobile-cell model, their
// validation, unit conversions and the flat key=value config format.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcshare {

/// How the AL-antenna to MUE distance is chosen.
enum class AccessDistanceMode { fixed, uniform };

/// Lower end of the access distance in uniform mode, meters.
inline constexpr double kMinAccessDistance = 0.5;

/// All physical and numerical constants of the model. Powers in dBm,
/// distances in meters, densities in points/m^2, everything else linear.
struct SystemParams {
    double lambda_c = 6e-6;
    double p_c_dbm = 45.0;
    double p_o_dbm = 3.0;
    double alpha_i = 4.0;
    double alpha_o = 3.5;
    double epsilon = 0.1;
    double x_d = 5.0;
    double l = 8.0;
    AccessDistanceMode l_mode = AccessDistanceMode::fixed;
    double k_factor = 2.0;
    int j_trunc = 70;
    int q_trunc = 70;
    double area_half_width = 10000.0;
    int n_runs = 5000;
    std::uint64_t seed = 20180101;

    bool operator==(const SystemParams&) const = default;
};

struct Violation {
    std::string field;
    std::string message;
};

class InvalidParams : public std::invalid_argument {
public:
    explicit InvalidParams(std::vector<Violation> violations)
        : std::invalid_argument(summarize(violations)), violations_(std::move(violations))
    {
    }

    const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    static std::string summarize(const std::vector<Violation>& v)
    {
        std::string out = "invalid parameters:";
        for (const auto& e : v)
            out += " " + e.field + " (" + e.message + ");";
        return out;
    }

    std::vector<Violation> violations_;
};

/// Unparsed key -> value pairs, e.g. from a config file or --set options.
using RawParams = std::map<std::string, std::string>;

inline double dbm_to_linear(double p_dbm) { return std::pow(10.0, (p_dbm - 30.0) / 10.0); }

inline double linear_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

/// P_o / P_c. Only this ratio enters the SIR formulas.
inline double power_ratio(double p_c_dbm, double p_o_dbm) { return std::pow(10.0, (p_o_dbm - p_c_dbm) / 10.0); }

inline double power_ratio(const SystemParams& p) { return power_ratio(p.p_c_dbm, p.p_o_dbm); }

/// Smallest admissible simulation half-width: ten mean nearest-neighbour distances.
inline double min_half_width(double lambda_c) { return 10.0 / std::sqrt(M_PI * lambda_c); }

inline std::vector<Violation> check_invariants(const SystemParams& p)
{
    std::vector<Violation> v;
    auto require = [&v](bool ok, const char* field, std::string msg) {
        if (!ok)
            v.push_back({field, std::move(msg)});
    };
    auto finite = [](double x) { return std::isfinite(x); };

    require(finite(p.lambda_c) && p.lambda_c > 0, "lambda_c", "must be > 0");
    require(finite(p.p_c_dbm), "p_c_dbm", "must be finite");
    require(finite(p.p_o_dbm), "p_o_dbm", "must be finite");
    require(finite(p.alpha_i) && p.alpha_i > 2, "alpha_i", "must be > 2");
    require(finite(p.alpha_o) && p.alpha_o > 0, "alpha_o", "must be > 0");
    require(finite(p.epsilon) && p.epsilon > 0 && p.epsilon <= 1, "epsilon", "must satisfy 0 < epsilon <= 1");
    require(finite(p.x_d) && p.x_d > 0, "x_d", "must be > 0");
    require(finite(p.l) && p.l > 0, "l", "must be > 0");
    if (p.l_mode == AccessDistanceMode::uniform)
        require(p.l > kMinAccessDistance, "l", "must be > 0.5 in uniform mode");
    require(finite(p.k_factor) && p.k_factor >= 0, "k_factor", "must be >= 0");
    require(p.j_trunc >= 1, "j_trunc", "must be >= 1");
    require(p.q_trunc >= 1, "q_trunc", "must be >= 1");
    require(p.n_runs >= 1, "n_runs", "must be >= 1");
    if (finite(p.lambda_c) && p.lambda_c > 0) {
        std::ostringstream msg;
        msg << "must be >= 10/sqrt(pi*lambda_c) = " << min_half_width(p.lambda_c);
        require(finite(p.area_half_width) && p.area_half_width >= min_half_width(p.lambda_c), "area_half_width",
                msg.str());
    }
    return v;
}

/// Checks every invariant; throws InvalidParams listing all violations.
inline SystemParams validate(const SystemParams& p)
{
    auto v = check_invariants(p);
    if (!v.empty())
        throw InvalidParams(std::move(v));
    return p;
}

namespace detail {

inline double parse_real(const std::string& key, const std::string& text, std::vector<Violation>& errors)
{
    try {
        std::size_t used = 0;
        double x = std::stod(text, &used);
        if (used == text.size())
            return x;
    } catch (const std::exception&) {
    }
    errors.push_back({key, "not a number: '" + text + "'"});
    return 0.0;
}

inline long long parse_integer(const std::string& key, const std::string& text, std::vector<Violation>& errors)
{
    try {
        std::size_t used = 0;
        long long x = std::stoll(text, &used);
        if (used == text.size())
            return x;
    } catch (const std::exception&) {
    }
    errors.push_back({key, "not an integer: '" + text + "'"});
    return 0;
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& text, std::vector<Violation>& errors)
{
    try {
        std::size_t used = 0;
        if (!text.empty() && text[0] != '-') {
            auto x = std::stoull(text, &used);
            if (used == text.size())
                return x;
        }
    } catch (const std::exception&) {
    }
    errors.push_back({key, "not an unsigned 64-bit integer: '" + text + "'"});
    return 0;
}

inline std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace detail

/// Field names accepted in config files and --set.
inline const std::vector<std::string>& param_keys()
{
    static const std::vector<std::string> keys = {
        "lambda_c", "p_c_dbm", "p_o_dbm", "alpha_i",  "alpha_o",  "epsilon",         "x_d",    "l",
        "l_mode",   "k_factor", "j_trunc", "q_trunc", "area_half_width", "n_runs", "seed"};
    return keys;
}

/// Applies raw key/value pairs on top of `base` without checking invariants.
inline SystemParams apply_raw(SystemParams p, const RawParams& raw)
{
    std::vector<Violation> errors;
    for (const auto& [key, value] : raw) {
        if (key == "lambda_c") p.lambda_c = detail::parse_real(key, value, errors);
        else if (key == "p_c_dbm") p.p_c_dbm = detail::parse_real(key, value, errors);
        else if (key == "p_o_dbm") p.p_o_dbm = detail::parse_real(key, value, errors);
        else if (key == "alpha_i") p.alpha_i = detail::parse_real(key, value, errors);
        else if (key == "alpha_o") p.alpha_o = detail::parse_real(key, value, errors);
        else if (key == "epsilon") p.epsilon = detail::parse_real(key, value, errors);
        else if (key == "x_d") p.x_d = detail::parse_real(key, value, errors);
        else if (key == "l") p.l = detail::parse_real(key, value, errors);
        else if (key == "k_factor") p.k_factor = detail::parse_real(key, value, errors);
        else if (key == "area_half_width") p.area_half_width = detail::parse_real(key, value, errors);
        else if (key == "j_trunc") p.j_trunc = static_cast<int>(detail::parse_integer(key, value, errors));
        else if (key == "q_trunc") p.q_trunc = static_cast<int>(detail::parse_integer(key, value, errors));
        else if (key == "n_runs") p.n_runs = static_cast<int>(detail::parse_integer(key, value, errors));
        else if (key == "seed") p.seed = detail::parse_u64(key, value, errors);
        else if (key == "l_mode") {
            if (value == "fixed")
                p.l_mode = AccessDistanceMode::fixed;
            else if (value == "uniform")
                p.l_mode = AccessDistanceMode::uniform;
            else
                errors.push_back({key, "must be 'fixed' or 'uniform'"});
        } else
            errors.push_back({key, "unknown key"});
    }
    if (!errors.empty())
        throw InvalidParams(std::move(errors));
    return p;
}

/// Inverse of apply_raw: every field as key/value text that parses back exactly.
inline RawParams to_raw(const SystemParams& p)
{
    auto real = [](double x) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return std::string(buf);
    };
    return {{"lambda_c", real(p.lambda_c)},
            {"p_c_dbm", real(p.p_c_dbm)},
            {"p_o_dbm", real(p.p_o_dbm)},
            {"alpha_i", real(p.alpha_i)},
            {"alpha_o", real(p.alpha_o)},
            {"epsilon", real(p.epsilon)},
            {"x_d", real(p.x_d)},
            {"l", real(p.l)},
            {"l_mode", p.l_mode == AccessDistanceMode::fixed ? "fixed" : "uniform"},
            {"k_factor", real(p.k_factor)},
            {"j_trunc", std::to_string(p.j_trunc)},
            {"q_trunc", std::to_string(p.q_trunc)},
            {"area_half_width", real(p.area_half_width)},
            {"n_runs", std::to_string(p.n_runs)},
            {"seed", std::to_string(p.seed)}};
}

/// Parses raw values over the defaults and validates the result.
inline SystemParams validate(const RawParams& raw) { return validate(apply_raw(SystemParams{}, raw)); }

/// The epsilon -> 0 limit (no AL leakage). Not reachable through validate,
/// which requires epsilon > 0; used for the leakage-free reference curves.
inline SystemParams without_leakage(SystemParams p)
{
    p.epsilon = 0.0;
    return p;
}

/// Parses `key=value` lines; `#` starts a comment. Unknown or repeated keys throw.
inline RawParams parse_config(const std::string& text)
{
    RawParams raw;
    std::vector<Violation> errors;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back({"line " + std::to_string(lineno), "expected key=value"});
            continue;
        }
        auto key = detail::trim(line.substr(0, eq));
        auto value = detail::trim(line.substr(eq + 1));
        bool known = false;
        for (const auto& k : param_keys())
            known = known || k == key;
        if (!known)
            errors.push_back({key, "unknown key (line " + std::to_string(lineno) + ")"});
        else if (!raw.emplace(key, value).second)
            errors.push_back({key, "duplicate key (line " + std::to_string(lineno) + ")"});
    }
    if (!errors.empty())
        throw InvalidParams(std::move(errors));
    return raw;
}

inline RawParams load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot read config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

/// SIR thresholds in dB, expanded to a grid.
struct SirThresholdGrid {
    double theta_db_min = -20.0;
    double theta_db_max = 20.0;
    double theta_db_step = 1.0;

    std::vector<double> db_values() const
    {
        if (!(theta_db_step > 0) || theta_db_min > theta_db_max)
            throw std::invalid_argument("SirThresholdGrid: need step > 0 and min <= max");
        std::vector<double> out;
        const auto n = static_cast<long>(std::floor((theta_db_max - theta_db_min) / theta_db_step + 1e-9));
        for (long i = 0; i <= n; ++i)
            out.push_back(theta_db_min + static_cast<double>(i) * theta_db_step);
        return out;
    }

    std::vector<double> linear_values() const
    {
        auto v = db_values();
        for (auto& x : v)
            x = db_to_linear(x);
        return v;
    }
};

} // namespace mcshare
