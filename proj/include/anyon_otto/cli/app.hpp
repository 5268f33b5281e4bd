#pragma once

// The anyon-otto command line: cycle, sweep and validate subcommands.

#include "anyon_otto/cli/config.hpp"
#include "anyon_otto/cli/render.hpp"
#include "anyon_otto/cli/validate.hpp"
#include "anyon_otto/closed_form.hpp"
#include "anyon_otto/otto.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace anyon_otto::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitError = 1,
    kExitNonEngine = 2,
    kExitValidation = 3,
    kExitConfig = 64,
};

namespace detail {

// Writes a file in one go; any failure is an I/O error (exit 1).
inline void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body)
{
    std::ostringstream buf;
    body(buf);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    const std::string s = buf.str();
    f.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!f) {
        throw std::runtime_error("write failed for '" + path.string() + "'");
    }
}

inline std::filesystem::path prepare_out_dir(const std::string& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw std::runtime_error("cannot create output directory '" + dir + "'");
    }
    return dir;
}

inline void line(std::ostream& out, const std::string& text)
{
    out << (text + '\n') << std::flush;
}

// Closed-form residual for a computed cycle; NaN when the closed form is undefined there.
inline double closed_residual(const OttoCycleSpec& spec, const CycleReport& report, const closed_form::Options& o)
{
    try {
        return closed_form::relative_residual(closed_form::closed_efficiency(spec, o), report.efficiency);
    } catch (const std::exception&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

inline closed_form::Options options_of(const RunConfig& c)
{
    closed_form::Options o;
    o.accuracy = c.accuracy;
    o.tail_tol = c.spec.tail_tol;
    o.variant = c.variant;
    return o;
}

inline int cmd_cycle(const RunConfig& c, std::ostream& out)
{
    CycleReport r;
    try {
        r = run_cycle(c.spec);
        r.oracle_residual = closed_residual(c.spec, r, options_of(c));
    } catch (const DegenerateCycle& e) {
        // equal settings: no heat flows and no work is done
        r = CycleReport{};
        r.regime = Regime::degenerate;
        line(out, std::string("note = ") + e.what());
    }
    line(out, "medium = " + std::string(to_string(c.spec.medium)));
    line(out, "efficiency = " + fmt_short(r.efficiency));
    line(out, "regime = " + std::string(to_string(r.regime)));
    line(out, "q_in = " + fmt_short(r.q_in));
    line(out, "q_out = " + fmt_short(r.q_out));
    line(out, "w_out = " + fmt_short(r.w_out));
    line(out, "oracle_residual = " + fmt_short(r.oracle_residual));

    if (!c.out_dir.empty()) {
        const auto dir = prepare_out_dir(c.out_dir);
        if (c.formats.csv) {
            write_file(dir / "cycle.csv", [&](std::ostream& f) { write_cycle_csv(f, c.spec, r); });
        }
        if (c.formats.json) {
            write_file(dir / "cycle.json", [&](std::ostream& f) {
                nlohmann::json j{{"spec", spec_json(c.spec)}, {"report", report_json(r)}};
                f << j.dump(2) << '\n';
            });
        }
    }
    return r.regime == Regime::engine ? kExitOk : kExitNonEngine;
}

inline int cmd_sweep(const RunConfig& c, std::ostream& out)
{
    const closed_form::Options o = options_of(c);
    const RowHook hook = [o](const OttoCycleSpec& spec, CycleReport& report) {
        report.oracle_residual = closed_residual(spec, report, o);
    };
    const auto rows = to_rows(sweep_efficiency(c.spec, *c.sweep_axis, c.grid, hook, c.threads));
    const std::string param = normalize_key(*c.sweep);

    if (c.out_dir.empty()) {
        if (c.formats.json) {
            out << sweep_json(c.spec, param, rows).dump(2) << '\n';
        } else {
            write_sweep_csv(out, param, rows);
        }
        return kExitOk;
    }
    const auto dir = prepare_out_dir(c.out_dir);
    if (c.formats.csv) {
        write_file(dir / "sweep.csv", [&](std::ostream& f) { write_sweep_csv(f, param, rows); });
    }
    if (c.formats.json) {
        write_file(dir / "sweep.json",
                   [&](std::ostream& f) { f << sweep_json(c.spec, param, rows).dump(2) << '\n'; });
    }
    if (c.formats.svg) {
        write_file(dir / "sweep.svg", [&](std::ostream& f) { write_sweep_svg(f, param, rows); });
    }
    std::size_t failed = 0;
    for (const auto& r : rows) {
        failed += r.report ? 0 : 1;
    }
    line(out, "rows = " + std::to_string(rows.size()) + ", failed = " + std::to_string(failed) + ", out = " +
                  c.out_dir);
    return kExitOk;
}

inline int cmd_validate(const RunConfig& c, std::ostream& out)
{
    ValidationOptions v;
    v.accuracy = c.accuracy;
    v.tail_tol = c.spec.tail_tol;
    v.variant = c.variant;
    v.seed = c.seed;
    const auto summary = run_validation(v);

    line(out, "variant = " + std::string(closed_form::to_string(summary.variant)));
    line(out, "rel_tol = " + fmt_short(c.accuracy.rel_tol) + ", seed = " + std::to_string(c.seed));
    for (const auto& f : summary.families) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%-4s %-46s max_residual = %-11.3e threshold = %-9.2e points = %zu",
                      f.passed() ? "PASS" : "FAIL", f.family.c_str(), f.max_residual, f.threshold, f.points);
        line(out, buf);
    }
    const FamilyResult* worst = nullptr;
    for (const auto& f : summary.families) {
        if (!f.passed() && (worst == nullptr || f.max_residual / f.threshold > worst->max_residual / worst->threshold)) {
            worst = &f;
        }
    }
    if (worst != nullptr) {
        std::string msg = "validation FAILED for variant " + std::string(closed_form::to_string(summary.variant)) +
                          ": worst family '" + worst->family + "' at " + worst->worst_point;
        if (!worst->worst_error.empty()) {
            msg += " (" + worst->worst_error + ")";
        }
        line(out, msg);
    } else {
        line(out, "validation passed");
    }

    if (!c.out_dir.empty() && c.formats.json) {
        const auto dir = prepare_out_dir(c.out_dir);
        write_file(dir / "validate.json", [&](std::ostream& fs) {
            nlohmann::json j;
            j["variant"] = std::string(closed_form::to_string(summary.variant));
            j["passed"] = summary.passed();
            for (const auto& f : summary.families) {
                j["families"].push_back({{"family", f.family},
                                         {"max_residual", detail::json_number(f.max_residual)},
                                         {"threshold", f.threshold},
                                         {"points", f.points},
                                         {"passed", f.passed()},
                                         {"worst_point", f.worst_point}});
            }
            fs << j.dump(2) << '\n';
        });
    }
    return summary.passed() ? kExitOk : kExitValidation;
}

} // namespace detail

/// Full command-line entry point. Returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Quantum Otto engines with anyonic working media"};
    app.name("anyon-otto");
    app.require_subcommand(1);

    // flag name -> config key; every flag is also a config-file key
    const std::vector<std::pair<std::string, std::string>> flags{
        {"--medium", "medium"},   {"--beta-h", "beta_h"},     {"--beta-l", "beta_l"},
        {"--alpha-h", "alpha_h"}, {"--alpha-l", "alpha_l"},   {"--eps0", "eps0"},
        {"--eps0-h", "eps0_h"},   {"--eps0-l", "eps0_l"},     {"--l1", "l1"},
        {"--l2", "l2"},           {"--alpha", "alpha"},       {"--alpha1", "alpha1"},
        {"--alpha2", "alpha2"},   {"--length", "length"},     {"--energy-offset", "energy_offset"},
        {"--sweep", "sweep"},     {"--grid", "grid"},         {"--out", "out"},
        {"--format", "format"},   {"--rel-tol", "rel_tol"},   {"--tail-tol", "tail_tol"},
        {"--seed", "seed"},       {"--variant", "variant"},   {"--threads", "threads"},
    };
    std::vector<std::string> values(flags.size());
    std::vector<CLI::Option*> opts;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        opts.push_back(app.add_option(flags[i].first, values[i], "config key " + flags[i].second));
    }
    std::string config_path;
    app.add_option("--config", config_path, "flat key = value file; command-line flags override it");

    auto* cycle = app.add_subcommand("cycle", "run one Otto cycle")->fallthrough();
    auto* sweep = app.add_subcommand("sweep", "sweep one parameter over a grid")->fallthrough();
    auto* validate_cmd = app.add_subcommand("validate", "check every closed form against its oracle")->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    const Command cmd = cycle->parsed() ? Command::cycle : sweep->parsed() ? Command::sweep : Command::validate;
    (void)validate_cmd;
    try {
        KeyValues kv = config_path.empty() ? KeyValues{} : read_config_file(config_path);
        for (std::size_t i = 0; i < flags.size(); ++i) {
            if (opts[i]->count() > 0) {
                kv[flags[i].second] = values[i];
            }
        }
        const RunConfig c = build_config(kv, cmd);
        if (c.out_dir.empty() && cmd == Command::sweep && (c.formats.svg || (c.formats.csv && c.formats.json))) {
            throw ConfigError("out", "needed when writing svg or more than one format");
        }
        switch (cmd) {
        case Command::cycle:
            return detail::cmd_cycle(c, out);
        case Command::sweep:
            return detail::cmd_sweep(c, out);
        case Command::validate:
            return detail::cmd_validate(c, out);
        }
    } catch (const ConfigError& e) {
        err << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}

} // namespace anyon_otto::cli
