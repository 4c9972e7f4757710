#pragma once

// Minimal SVG line/marker plots rendered from the CSV text alone, so a plot
// can always be regenerated from its table.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcshare {

struct CsvData {
    std::map<std::string, std::string> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const
    {
        auto it = std::find(columns.begin(), columns.end(), name);
        if (it == columns.end())
            throw std::invalid_argument("csv: no column '" + name + "'");
        return static_cast<std::size_t>(it - columns.begin());
    }
};

inline std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep))
        out.push_back(item);
    return out;
}

inline CsvData parse_csv(const std::string& text)
{
    CsvData d;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (line[0] == '#') {
            auto colon = line.find(": ");
            if (colon != std::string::npos && line.size() > 2)
                d.metadata[line.substr(2, colon - 2)] = line.substr(colon + 2);
            continue;
        }
        if (d.columns.empty()) {
            d.columns = split(line, ',');
            continue;
        }
        std::vector<double> row;
        for (const auto& cell : split(line, ','))
            row.push_back(std::stod(cell));
        if (row.size() != d.columns.size())
            throw std::invalid_argument("csv: ragged row");
        d.rows.push_back(std::move(row));
    }
    if (d.columns.empty())
        throw std::invalid_argument("csv: missing header");
    return d;
}

namespace detail {

inline std::string num(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

inline std::string escape_xml(const std::string& s)
{
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

// Roughly five round tick values covering [lo, hi].
inline std::vector<double> ticks(double lo, double hi)
{
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    std::vector<double> out;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step)
        out.push_back(std::fabs(v) < 1e-12 * span ? 0.0 : v);
    return out;
}

} // namespace detail

/// Renders the table according to its `plot` metadata line:
///   x=<col> y=<col>[,<col>...] group=<col>|none
/// mc_* and hybrid_* columns are drawn as markers, the rest as lines.
inline std::string render_svg(const std::string& csv_text)
{
    const auto d = parse_csv(csv_text);
    auto spec_it = d.metadata.find("plot");
    if (spec_it == d.metadata.end())
        throw std::invalid_argument("csv: no plot metadata");
    std::map<std::string, std::string> spec;
    for (const auto& kv : split(spec_it->second, ' ')) {
        auto eq = kv.find('=');
        if (eq != std::string::npos)
            spec[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    const std::size_t xc = d.column(spec.at("x"));
    std::vector<std::size_t> ycs;
    for (const auto& name : split(spec.at("y"), ','))
        ycs.push_back(d.column(name));
    const bool grouped = spec.count("group") && spec.at("group") != "none";
    const std::size_t gc = grouped ? d.column(spec.at("group")) : 0;

    std::vector<double> groups;
    for (const auto& r : d.rows) {
        const double g = grouped ? r[gc] : 0.0;
        if (std::find(groups.begin(), groups.end(), g) == groups.end())
            groups.push_back(g);
    }

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& r : d.rows) {
        x0 = std::min(x0, r[xc]);
        x1 = std::max(x1, r[xc]);
        for (auto c : ycs)
            if (std::isfinite(r[c])) {
                y0 = std::min(y0, r[c]);
                y1 = std::max(y1, r[c]);
            }
    }
    if (!(x1 > x0)) {
        x0 -= 1.0;
        x1 += 1.0;
    }
    if (!(y1 > y0)) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;

    const double W = 720, H = 460, L = 70, R = 190, T = 30, B = 50;
    const double pw = W - L - R, ph = H - T - B;
    auto sx = [&](double x) { return L + (x - x0) / (x1 - x0) * pw; };
    auto sy = [&](double y) { return T + (y1 - y) / (y1 - y0) * ph; };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
    static const char* dashes[] = {"", "6,3", "2,3", "8,3,2,3"};

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (auto f = d.metadata.find("figure"); f != d.metadata.end())
        o << "<text x=\"" << L << "\" y=\"18\" font-size=\"13\">" << detail::escape_xml(f->second) << "</text>\n";
    o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double v : detail::ticks(x0, x1)) {
        o << "<line x1=\"" << detail::num(sx(v)) << "\" y1=\"" << T + ph << "\" x2=\"" << detail::num(sx(v)) << "\" y2=\""
          << T + ph + 5 << "\" stroke=\"black\"/>";
        o << "<text x=\"" << detail::num(sx(v)) << "\" y=\"" << T + ph + 18 << "\" text-anchor=\"middle\">"
          << detail::num(v) << "</text>\n";
    }
    for (double v : detail::ticks(y0, y1)) {
        o << "<line x1=\"" << L - 5 << "\" y1=\"" << detail::num(sy(v)) << "\" x2=\"" << L << "\" y2=\""
          << detail::num(sy(v)) << "\" stroke=\"black\"/>";
        o << "<text x=\"" << L - 8 << "\" y=\"" << detail::num(sy(v) + 4) << "\" text-anchor=\"end\">"
          << detail::num(v) << "</text>\n";
    }
    o << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
      << detail::escape_xml(d.columns[xc]) << "</text>\n";

    int legend_row = 0;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const char* color = palette[gi % 7];
        for (std::size_t yi = 0; yi < ycs.size(); ++yi) {
            const std::string& name = d.columns[ycs[yi]];
            const bool markers = name.rfind("mc_", 0) == 0 || name.rfind("hybrid_", 0) == 0;
            std::vector<std::pair<double, double>> pts;
            for (const auto& r : d.rows)
                if ((!grouped || r[gc] == groups[gi]) && std::isfinite(r[ycs[yi]]))
                    pts.emplace_back(sx(r[xc]), sy(r[ycs[yi]]));
            if (markers) {
                for (const auto& [px, py] : pts)
                    o << "<circle cx=\"" << detail::num(px) << "\" cy=\"" << detail::num(py)
                      << "\" r=\"2.5\" fill=\"none\" stroke=\"" << color << "\"/>";
                o << "\n";
            } else {
                o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
                if (*dashes[yi % 4])
                    o << " stroke-dasharray=\"" << dashes[yi % 4] << "\"";
                o << " points=\"";
                for (const auto& [px, py] : pts)
                    o << detail::num(px) << "," << detail::num(py) << " ";
                o << "\"/>\n";
            }
            std::string label = name;
            if (grouped)
                label += " " + d.columns[gc] + "=" + detail::num(groups[gi]);
            const double ly = T + 10 + 14 * legend_row++;
            const double lx = L + pw + 12;
            if (markers)
                o << "<circle cx=\"" << lx + 10 << "\" cy=\"" << ly - 4 << "\" r=\"2.5\" fill=\"none\" stroke=\"" << color
                  << "\"/>";
            else
                o << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 20 << "\" y2=\"" << ly - 4
                  << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>";
            o << "<text x=\"" << lx + 26 << "\" y=\"" << ly << "\">" << detail::escape_xml(label) << "</text>\n";
        }
    }
    o << "</svg>\n";
    return o.str();
}

} // namespace mcshare
