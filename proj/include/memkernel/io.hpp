#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "memkernel/errors.hpp"
#include "memkernel/operators.hpp"
#include "memkernel/properties.hpp"

namespace memkernel {

namespace detail {

/// All numeric text output carries 9 significant digits.
inline std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

}  // namespace detail

/// CSV contract: header "x,value", one row per grid point, LF line endings.
inline void emit_csv(const SolutionField& field, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    out << "x,value\n";
    for (std::size_t i = 0; i < field.grid.size(); ++i)
        out << detail::fmt9(field.grid[i]) << ',' << detail::fmt9(field.values[i]) << '\n';
    if (!out) throw io_error("write failure on '" + path + "'");
}

inline SolutionField load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path + "' for reading");
    std::string line;
    if (!std::getline(in, line) || (line != "x,value" && line != "x,value\r"))
        throw io_error("'" + path + "': expected header 'x,value'");
    SolutionField field;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw io_error("'" + path + "': malformed row '" + line + "'");
        try {
            field.grid.push_back(std::stod(line.substr(0, comma)));
            field.values.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw io_error("'" + path + "': unparsable row '" + line + "'");
        }
    }
    return field;
}

inline nlohmann::json to_json(const SolutionField& field) {
    nlohmann::json j;
    j["meta"] = {{"kernel", field.meta.kernel_id},
                 {"ic", field.meta.ic},
                 {"v0", field.meta.v0},
                 {"B", field.meta.tp.B},
                 {"mu", field.meta.tp.mu},
                 {"a", field.meta.tp.a},
                 {"t", field.meta.t},
                 {"equation", field.meta.equation == Equation::gfpe ? "gfpe" : "gdwe"}};
    j["x"] = field.grid;
    j["value"] = field.values;
    return j;
}

inline nlohmann::json to_json(const VerificationReport& rep) {
    nlohmann::json j;
    j["identity"] = rep.identity;
    j["samples"] = rep.samples;
    j["max_abs_residual"] = rep.max_abs_residual;
    j["tolerance"] = rep.tolerance;
    j["pass"] = rep.pass;
    return j;
}

inline void emit_json(const nlohmann::json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
    if (!out) throw io_error("write failure on '" + path + "'");
}

/// Minimal single-panel SVG plot: one polyline per series, axes and legend.
struct SvgSeries {
    std::string label;
    const std::vector<double>* x;
    const std::vector<double>* y;
};

inline void emit_svg(const std::vector<SvgSeries>& series, const std::string& path,
                     const std::string& title = "") {
    if (series.empty()) throw parameter_error("emit_svg: no series");
    const int W = 800, H = 500, ml = 70, mr = 160, mt = 40, mb = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series) {
        for (double v : *s.x) { xmin = std::min(xmin, v); xmax = std::max(xmax, v); }
        for (double v : *s.y) { ymin = std::min(ymin, v); ymax = std::max(ymax, v); }
    }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    const double ypad = 0.05 * std::max(ymax - ymin, 1e-12);
    ymin -= ypad;
    ymax += ypad;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto py = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };

    static const char* colors[] = {"#000000", "#1f6fb4", "#d62728", "#2ca02c", "#9467bd"};
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty())
        svg << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
            << title << "</text>\n";
    // axes
    svg << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\""
        << H - mb << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
        << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 5; ++k) {
        const double xv = xmin + k * (xmax - xmin) / 5.0;
        const double yv = ymin + k * (ymax - ymin) / 5.0;
        svg << "<line x1=\"" << px(xv) << "\" y1=\"" << H - mb << "\" x2=\"" << px(xv) << "\" y2=\""
            << H - mb + 5 << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << px(xv) << "\" y=\"" << H - mb + 20
            << "\" text-anchor=\"middle\" font-size=\"11\">" << detail::fmt9(xv) << "</text>\n";
        svg << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(yv) << "\" x2=\"" << ml << "\" y2=\""
            << py(yv) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << ml - 8 << "\" y=\"" << py(yv) + 4
            << "\" text-anchor=\"end\" font-size=\"11\">" << detail::fmt9(yv) << "</text>\n";
    }
    int ci = 0;
    for (const auto& s : series) {
        const char* color = colors[ci % 5];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x->size(); ++i)
            svg << px((*s.x)[i]) << ',' << py((*s.y)[i]) << ' ';
        svg << "\"/>\n";
        svg << "<line x1=\"" << W - mr + 12 << "\" y1=\"" << mt + 18 * ci + 10 << "\" x2=\""
            << W - mr + 36 << "\" y2=\"" << mt + 18 * ci + 10 << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << W - mr + 42 << "\" y=\"" << mt + 18 * ci + 14
            << "\" font-size=\"12\">" << s.label << "</text>\n";
        ++ci;
    }
    svg << "</svg>\n";

    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    out << svg.str();
    if (!out) throw io_error("write failure on '" + path + "'");
}

}  // namespace memkernel
