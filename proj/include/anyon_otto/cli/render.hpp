#pragma once

// CSV, JSON and SVG renderings of cycle reports and sweep tables.

#include "anyon_otto/otto.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace anyon_otto::cli {

/// One output row. Efficiencies never travel without their regime.
struct ResultRow {
    double value = 0.0;
    std::optional<CycleReport> report;
    std::string error;
    double wall_seconds = 0.0;
};

[[nodiscard]] inline std::vector<ResultRow> to_rows(const std::vector<SweepRow>& sweep)
{
    std::vector<ResultRow> rows;
    rows.reserve(sweep.size());
    for (const auto& s : sweep) {
        rows.push_back({s.value, s.report, s.error, s.wall_seconds});
    }
    return rows;
}

/// 17 significant digits; "nan", "inf", "-inf" for non-finite values.
[[nodiscard]] inline std::string fmt17(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Short human-readable form for terminal output.
[[nodiscard]] inline std::string fmt_short(double v)
{
    if (!std::isfinite(v)) {
        return fmt17(v);
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace detail {

// Keeps free text inside one CSV field.
[[nodiscard]] inline std::string csv_field(std::string_view s)
{
    std::string out(s);
    for (auto& ch : out) {
        if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') {
            ch = ch == ',' ? ';' : ' ';
        }
    }
    return out;
}

[[nodiscard]] inline nlohmann::json json_number(double v)
{
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

[[nodiscard]] inline std::string xml_escape(std::string_view s)
{
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out += ch;
        }
    }
    return out;
}

} // namespace detail

inline constexpr std::string_view kCsvColumns = "efficiency,regime,q_in,q_out,w_out,oracle_residual,error";

inline void write_sweep_csv(std::ostream& out, std::string_view param, const std::vector<ResultRow>& rows)
{
    out << param << ',' << kCsvColumns << '\n';
    for (const auto& row : rows) {
        out << fmt17(row.value) << ',';
        if (row.report) {
            const auto& r = *row.report;
            out << fmt17(r.efficiency) << ',' << to_string(r.regime) << ',' << fmt17(r.q_in) << ','
                << fmt17(r.q_out) << ',' << fmt17(r.w_out) << ',' << fmt17(r.oracle_residual) << ',';
        } else {
            out << "nan,error,nan,nan,nan,nan,";
        }
        out << detail::csv_field(row.error) << '\n';
    }
}

inline void write_cycle_csv(std::ostream& out, const OttoCycleSpec& spec, const CycleReport& r)
{
    out << "medium,beta_h,beta_l,control_hot,control_cold," << kCsvColumns << '\n';
    out << to_string(spec.medium) << ',' << fmt17(spec.beta_h) << ',' << fmt17(spec.beta_l) << ','
        << fmt17(spec.control_hot) << ',' << fmt17(spec.control_cold) << ',' << fmt17(r.efficiency) << ','
        << to_string(r.regime) << ',' << fmt17(r.q_in) << ',' << fmt17(r.q_out) << ',' << fmt17(r.w_out) << ','
        << fmt17(r.oracle_residual) << ",\n";
}

[[nodiscard]] inline nlohmann::json spec_json(const OttoCycleSpec& s)
{
    nlohmann::json j;
    j["medium"] = std::string(to_string(s.medium));
    j["beta_h"] = s.beta_h;
    j["beta_l"] = s.beta_l;
    j["control_hot"] = s.control_hot;
    j["control_cold"] = s.control_cold;
    switch (s.medium) {
    case Medium::ring:
        j["eps0_h"] = s.eps0_hot;
        j["eps0_l"] = s.eps0_cold;
        break;
    case Medium::cs_volume:
        j["alpha"] = s.alpha;
        break;
    case Medium::cs_coupling:
        j["length"] = s.length;
        break;
    }
    j["energy_offset"] = s.energy_offset;
    j["tail_tol"] = s.tail_tol;
    return j;
}

[[nodiscard]] inline nlohmann::json report_json(const CycleReport& r)
{
    nlohmann::json j;
    j["efficiency"] = detail::json_number(r.efficiency);
    j["regime"] = std::string(to_string(r.regime));
    j["q_in"] = detail::json_number(r.q_in);
    j["q_out"] = detail::json_number(r.q_out);
    j["w_out"] = detail::json_number(r.w_out);
    j["oracle_residual"] = detail::json_number(r.oracle_residual);
    j["entropy"] = {r.entropy_a, r.entropy_b, r.entropy_c, r.entropy_d};
    j["levels"] = r.labels.size();
    j["tail_bound"] = r.tail_bound;
    return j;
}

/// JSON numbers use the shortest representation that parses back to the same double.
[[nodiscard]] inline nlohmann::json sweep_json(const OttoCycleSpec& tmpl, std::string_view param,
                                               const std::vector<ResultRow>& rows)
{
    nlohmann::json j;
    j["spec"] = spec_json(tmpl);
    j["sweep"] = std::string(param);
    j["rows"] = nlohmann::json::array();
    for (const auto& row : rows) {
        nlohmann::json r = row.report ? report_json(*row.report) : nlohmann::json::object();
        r["value"] = detail::json_number(row.value);
        r["wall_seconds"] = row.wall_seconds;
        if (!row.report) {
            r["regime"] = "error";
            r["efficiency"] = nullptr;
        }
        r["error"] = row.error.empty() ? nlohmann::json(nullptr) : nlohmann::json(row.error);
        j["rows"].push_back(std::move(r));
    }
    return j;
}

[[nodiscard]] inline std::string_view regime_colour(std::string_view regime) noexcept
{
    if (regime == "engine") {
        return "#1f77b4";
    }
    if (regime == "refrigerator") {
        return "#2ca02c";
    }
    if (regime == "heater") {
        return "#ff7f0e";
    }
    if (regime == "accelerator") {
        return "#9467bd";
    }
    if (regime == "reversed-engine") {
        return "#8c564b";
    }
    return "#7f7f7f";
}

/// Efficiency against the swept parameter, one marker per row coloured by
/// regime. Self-contained: inline styles only.
inline void write_sweep_svg(std::ostream& out, std::string_view param, const std::vector<ResultRow>& rows)
{
    constexpr double W = 760, H = 480, left = 80, right = 170, top = 40, bottom = 60;
    const double pw = W - left - right;
    const double ph = H - top - bottom;

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    std::size_t failed = 0;
    for (const auto& row : rows) {
        xmin = std::min(xmin, row.value);
        xmax = std::max(xmax, row.value);
        if (row.report && std::isfinite(row.report->efficiency)) {
            ymin = std::min(ymin, row.report->efficiency);
            ymax = std::max(ymax, row.report->efficiency);
        } else {
            ++failed;
        }
    }
    if (!(xmin <= xmax)) {
        xmin = 0.0;
        xmax = 1.0;
    }
    if (!(ymin <= ymax)) {
        ymin = 0.0;
        ymax = 1.0;
    }
    if (xmax == xmin) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymax == ymin) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

    const std::string name = detail::xml_escape(param);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
        << W << ' ' << H << "\" style=\"font-family:sans-serif;font-size:12px\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" style=\"fill:#ffffff\"/>\n"
        << "<text x=\"" << left + pw / 2 << "\" y=\"24\" style=\"text-anchor:middle;font-size:15px\">efficiency η vs "
        << name << "</text>\n";

    // axes, ticks and grid
    out << "<g style=\"stroke:#000000;stroke-width:1\">\n"
        << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
        << "\"/>\n"
        << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph << "\"/>\n"
        << "</g>\n";
    constexpr int ticks = 5;
    for (int k = 0; k <= ticks; ++k) {
        const double xv = xmin + (xmax - xmin) * k / ticks;
        const double yv = ymin + (ymax - ymin) * k / ticks;
        out << "<line x1=\"" << sx(xv) << "\" y1=\"" << top + ph << "\" x2=\"" << sx(xv) << "\" y2=\"" << top + ph + 5
            << "\" style=\"stroke:#000000\"/>\n"
            << "<text x=\"" << sx(xv) << "\" y=\"" << top + ph + 18 << "\" style=\"text-anchor:middle\">"
            << fmt_short(std::round(xv * 1e6) / 1e6) << "</text>\n"
            << "<line x1=\"" << left - 5 << "\" y1=\"" << sy(yv) << "\" x2=\"" << left + pw << "\" y2=\"" << sy(yv)
            << "\" style=\"stroke:#dddddd\"/>\n"
            << "<text x=\"" << left - 8 << "\" y=\"" << sy(yv) + 4 << "\" style=\"text-anchor:end\">"
            << fmt_short(std::round(yv * 1e6) / 1e6) << "</text>\n";
    }
    out << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 15 << "\" style=\"text-anchor:middle;font-size:14px\">"
        << name << "</text>\n"
        << "<text x=\"20\" y=\"" << top + ph / 2 << "\" transform=\"rotate(-90 20 " << top + ph / 2
        << ")\" style=\"text-anchor:middle;font-size:14px\">efficiency η</text>\n";

    // curve through computed rows, then regime-coloured markers
    std::string points;
    for (const auto& row : rows) {
        if (row.report && std::isfinite(row.report->efficiency)) {
            points += fmt_short(sx(row.value)) + "," + fmt_short(sy(row.report->efficiency)) + " ";
        }
    }
    out << "<polyline points=\"" << points << "\" style=\"fill:none;stroke:#999999;stroke-width:1\"/>\n";
    std::vector<std::string> seen;
    for (const auto& row : rows) {
        if (!row.report || !std::isfinite(row.report->efficiency)) {
            continue;
        }
        const auto regime = to_string(row.report->regime);
        if (std::find(seen.begin(), seen.end(), regime) == seen.end()) {
            seen.emplace_back(regime);
        }
        out << "<circle cx=\"" << fmt_short(sx(row.value)) << "\" cy=\"" << fmt_short(sy(row.report->efficiency))
            << "\" r=\"4\" style=\"fill:" << regime_colour(regime) << "\"><title>" << name << " = "
            << fmt_short(row.value) << ", η = " << fmt_short(row.report->efficiency) << ", " << regime
            << "</title></circle>\n";
    }

    double ly = top + 10;
    for (const auto& regime : seen) {
        out << "<circle cx=\"" << W - right + 20 << "\" cy=\"" << ly << "\" r=\"4\" style=\"fill:"
            << regime_colour(regime) << "\"/>\n"
            << "<text x=\"" << W - right + 30 << "\" y=\"" << ly + 4 << "\">" << regime << "</text>\n";
        ly += 18;
    }
    if (failed > 0) {
        out << "<text x=\"" << W - right + 14 << "\" y=\"" << ly + 4 << "\">" << failed << " row(s) failed</text>\n";
    }
    out << "</svg>\n";
}

} // namespace anyon_otto::cli
