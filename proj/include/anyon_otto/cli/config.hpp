#pragma once

// Run configuration: a flat key = value file merged with command-line
// overrides, then checked into a RunConfig.

#include "anyon_otto/closed_form.hpp"
#include "anyon_otto/otto.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace anyon_otto::cli {

/// Invalid or missing configuration. key() names the offending setting.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error("config error: " + key + ": " + message), key_(std::move(key))
    {
    }
    [[nodiscard]] const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

using KeyValues = std::map<std::string, std::string>;

struct Formats {
    bool csv = false;
    bool json = false;
    bool svg = false;
    [[nodiscard]] bool any() const noexcept { return csv || json || svg; }
};

struct RunConfig {
    OttoCycleSpec spec;
    std::optional<std::string> sweep;   // parameter name as given
    std::optional<SweepAxis> sweep_axis;
    std::vector<double> grid;
    std::string out_dir;                // empty: stdout only
    Formats formats;
    special::SumAccuracy accuracy;
    std::uint64_t seed = 20240611;
    closed_form::FormulaVariant variant = closed_form::FormulaVariant::rederived;
    unsigned threads = 1;
};

inline const std::set<std::string>& known_keys()
{
    static const std::set<std::string> keys{
        "medium", "beta_h", "beta_l", "alpha_h", "alpha_l", "eps0", "eps0_h", "eps0_l", "l1", "l2", "alpha",
        "alpha1", "alpha2", "length", "energy_offset", "sweep", "grid", "out", "format", "rel_tol", "tail_tol",
        "seed", "variant", "threads"};
    return keys;
}

[[nodiscard]] inline std::string normalize_key(std::string key)
{
    for (auto& ch : key) {
        ch = ch == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
    return key;
}

namespace detail {

[[nodiscard]] inline std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

} // namespace detail

/// Parses "key = value" lines. Blank lines and lines starting with '#' are
/// skipped; a later assignment of the same key wins.
[[nodiscard]] inline KeyValues parse_key_values(std::istream& in, const std::string& source = "config")
{
    KeyValues kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(source + ":" + std::to_string(lineno), "expected key = value, got '" + t + "'");
        }
        const std::string key = normalize_key(detail::trim(std::string_view(t).substr(0, eq)));
        const std::string value = detail::trim(std::string_view(t).substr(eq + 1));
        if (!known_keys().contains(key)) {
            throw ConfigError(key.empty() ? source + ":" + std::to_string(lineno) : key, "unknown key");
        }
        kv[key] = value;
    }
    return kv;
}

[[nodiscard]] inline KeyValues read_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config", "cannot open '" + path + "'");
    }
    return parse_key_values(in, path);
}

[[nodiscard]] inline double parse_number(const std::string& key, const std::string& text)
{
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || text.empty()) {
        throw ConfigError(key, "not a number: '" + text + "'");
    }
    if (!std::isfinite(v)) {
        throw ConfigError(key, "must be finite");
    }
    return v;
}

[[nodiscard]] inline std::uint64_t parse_unsigned(const std::string& key, const std::string& text)
{
    std::uint64_t v = 0;
    const char* first = text.data();
    const char* last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || text.empty()) {
        throw ConfigError(key, "not a non-negative integer: '" + text + "'");
    }
    return v;
}

/// "start:stop:steps" -> steps evenly spaced values from start to stop
/// inclusive. steps = 0 gives an empty grid.
[[nodiscard]] inline std::vector<double> parse_grid(const std::string& text)
{
    const auto c1 = text.find(':');
    const auto c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
    if (c2 == std::string::npos || text.find(':', c2 + 1) != std::string::npos) {
        throw ConfigError("grid", "expected start:stop:steps, got '" + text + "'");
    }
    const double start = parse_number("grid", detail::trim(text.substr(0, c1)));
    const double stop = parse_number("grid", detail::trim(text.substr(c1 + 1, c2 - c1 - 1)));
    const auto steps = parse_unsigned("grid", detail::trim(text.substr(c2 + 1)));
    if (steps > 1'000'000) {
        throw ConfigError("grid", "more than 1000000 steps");
    }
    std::vector<double> values;
    values.reserve(steps);
    for (std::uint64_t k = 0; k < steps; ++k) {
        if (steps == 1) {
            values.push_back(start);
        } else if (k + 1 == steps) {
            values.push_back(stop);
        } else {
            values.push_back(start + (stop - start) * static_cast<double>(k) / static_cast<double>(steps - 1));
        }
    }
    return values;
}

[[nodiscard]] inline Formats parse_formats(const std::string& text)
{
    Formats f;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = detail::trim(item);
        if (item == "csv") {
            f.csv = true;
        } else if (item == "json") {
            f.json = true;
        } else if (item == "svg") {
            f.svg = true;
        } else {
            throw ConfigError("format", "unknown format '" + item + "' (expected csv, json, svg)");
        }
    }
    if (!f.any()) {
        throw ConfigError("format", "no output format given");
    }
    return f;
}

enum class Command { cycle, sweep, validate };

namespace detail {

class Reader {
public:
    explicit Reader(const KeyValues& kv) : kv_(kv) {}

    [[nodiscard]] bool has(const std::string& key) const { return kv_.contains(key); }

    [[nodiscard]] double number(const std::string& key) const
    {
        const auto it = kv_.find(key);
        if (it == kv_.end()) {
            throw ConfigError(key, "missing required setting");
        }
        return parse_number(key, it->second);
    }

    [[nodiscard]] double number_or(const std::string& key, double fallback) const
    {
        return has(key) ? number(key) : fallback;
    }

    // Required unless it is the swept parameter, which the grid supplies.
    [[nodiscard]] double control(const std::string& key, const std::optional<std::string>& swept,
                                 double placeholder) const
    {
        if (!has(key) && swept && normalize_key(*swept) == key) {
            return placeholder;
        }
        return number(key);
    }

    [[nodiscard]] const std::string* text(const std::string& key) const
    {
        const auto it = kv_.find(key);
        return it == kv_.end() ? nullptr : &it->second;
    }

private:
    const KeyValues& kv_;
};

inline void check_medium_keys(const KeyValues& kv, Medium m)
{
    static const std::map<std::string, std::set<Medium>> owners{
        {"alpha_h", {Medium::ring}},        {"alpha_l", {Medium::ring}},
        {"eps0", {Medium::ring}},           {"eps0_h", {Medium::ring}},
        {"eps0_l", {Medium::ring}},         {"l1", {Medium::cs_volume}},
        {"l2", {Medium::cs_volume}},        {"alpha", {Medium::cs_volume}},
        {"alpha1", {Medium::cs_coupling}},  {"alpha2", {Medium::cs_coupling}},
        {"length", {Medium::cs_coupling}},
    };
    for (const auto& [key, value] : kv) {
        const auto it = owners.find(key);
        if (it != owners.end() && !it->second.contains(m)) {
            throw ConfigError(key, "not a parameter of medium " + std::string(to_string(m)));
        }
    }
}

// Names the first key whose value is outside its domain.
inline void check_values(const OttoCycleSpec& s)
{
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    auto require = [](bool ok, const char* key, const char* what) {
        if (!ok) {
            throw ConfigError(key, what);
        }
    };
    require(positive(s.beta_h), "beta_h", "must be positive");
    require(positive(s.beta_l), "beta_l", "must be positive");
    switch (s.medium) {
    case Medium::ring:
        require(positive(s.eps0_hot), "eps0_h", "must be positive");
        require(positive(s.eps0_cold), "eps0_l", "must be positive");
        break;
    case Medium::cs_volume:
        require(positive(s.control_cold), "l1", "must be positive");
        require(positive(s.control_hot), "l2", "must be positive");
        require(s.alpha >= 0.0, "alpha", "must be >= 0");
        break;
    case Medium::cs_coupling:
        require(s.control_cold >= 0.0, "alpha1", "must be >= 0");
        require(s.control_hot >= 0.0, "alpha2", "must be >= 0");
        require(positive(s.length), "length", "must be positive");
        break;
    }
    validate(s);
}

} // namespace detail

/// Builds and checks a RunConfig for the given subcommand.
[[nodiscard]] inline RunConfig build_config(const KeyValues& kv, Command cmd)
{
    const detail::Reader r(kv);
    RunConfig c;

    if (const auto* t = r.text("rel_tol")) {
        c.accuracy.rel_tol = parse_number("rel_tol", *t);
        if (!(c.accuracy.rel_tol > 0.0 && c.accuracy.rel_tol < 1.0)) {
            throw ConfigError("rel_tol", "must lie in (0, 1)");
        }
    }
    if (const auto* t = r.text("tail_tol")) {
        c.spec.tail_tol = parse_number("tail_tol", *t);
        if (!(c.spec.tail_tol > 0.0 && c.spec.tail_tol < 1.0)) {
            throw ConfigError("tail_tol", "must lie in (0, 1)");
        }
    }
    if (const auto* t = r.text("seed")) {
        c.seed = parse_unsigned("seed", *t);
    }
    if (const auto* t = r.text("threads")) {
        const auto n = parse_unsigned("threads", *t);
        if (n < 1 || n > 256) {
            throw ConfigError("threads", "must lie in [1, 256]");
        }
        c.threads = static_cast<unsigned>(n);
    }
    if (const auto* t = r.text("variant")) {
        const auto v = closed_form::parse_variant(*t);
        if (!v) {
            throw ConfigError("variant", "unknown formula variant '" + *t + "'");
        }
        c.variant = *v;
    }
    if (const auto* t = r.text("out")) {
        if (t->empty()) {
            throw ConfigError("out", "empty directory name");
        }
        c.out_dir = *t;
    }
    if (const auto* t = r.text("format")) {
        c.formats = parse_formats(*t);
    } else if (cmd == Command::sweep) {
        c.formats.csv = true;
    } else if (!c.out_dir.empty()) {
        c.formats.json = true;
    }

    if (cmd == Command::validate) {
        return c;
    }

    const auto* medium_text = r.text("medium");
    if (medium_text == nullptr) {
        throw ConfigError("medium", "missing required setting (ring, cs-volume or cs-coupling)");
    }
    const auto medium = parse_medium(*medium_text);
    if (!medium) {
        throw ConfigError("medium", "unknown medium '" + *medium_text + "'");
    }
    detail::check_medium_keys(kv, *medium);

    if (cmd == Command::sweep) {
        const auto* s = r.text("sweep");
        if (s == nullptr) {
            throw ConfigError("sweep", "missing sweep parameter");
        }
        c.sweep = *s;
        c.sweep_axis = parse_sweep_axis(*s, *medium);
        if (!c.sweep_axis) {
            throw ConfigError("sweep", "'" + *s + "' is not a parameter of medium " + std::string(to_string(*medium)));
        }
        const auto* g = r.text("grid");
        if (g == nullptr) {
            throw ConfigError("grid", "missing grid start:stop:steps");
        }
        c.grid = parse_grid(*g);
    } else if (r.has("sweep") || r.has("grid")) {
        throw ConfigError(r.has("sweep") ? "sweep" : "grid", "only valid for the sweep subcommand");
    }

    OttoCycleSpec& s = c.spec;
    s.medium = *medium;
    const auto& swept = c.sweep;
    s.beta_h = r.control("beta_h", swept, 1.0);
    s.beta_l = r.control("beta_l", swept, 1.0);
    s.energy_offset = r.number_or("energy_offset", 0.0);
    switch (*medium) {
    case Medium::ring: {
        s.control_hot = r.control("alpha_h", swept, 0.0);
        s.control_cold = r.control("alpha_l", swept, 0.0);
        const double eps0 = r.number_or("eps0", 1.0);
        s.eps0_hot = r.number_or("eps0_h", eps0);
        s.eps0_cold = r.number_or("eps0_l", eps0);
        break;
    }
    case Medium::cs_volume:
        s.control_cold = r.control("l1", swept, 1.0);
        s.control_hot = r.control("l2", swept, 1.0);
        s.alpha = r.control("alpha", swept, 0.0);
        break;
    case Medium::cs_coupling:
        s.control_cold = r.control("alpha1", swept, 0.0);
        s.control_hot = r.control("alpha2", swept, 0.0);
        s.length = r.control("length", swept, 1.0);
        break;
    }

    detail::check_values(s);
    for (double v : c.grid) {
        OttoCycleSpec probe = s;
        apply_axis(probe, *c.sweep_axis, v);
        try {
            validate(probe);
        } catch (const DomainError& e) {
            throw ConfigError("grid", "value " + std::to_string(v) + " outside the domain of " + *c.sweep + " (" +
                                          e.what() + ")");
        }
    }
    return c;
}

} // namespace anyon_otto::cli
