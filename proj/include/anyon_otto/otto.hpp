#pragma once

// Four-stroke quantum Otto cycle on the ring and two-anyon media.
//
//   A -> B  hot isochore: energies fixed at the hot control, populations
//           relax from P(A) to the Gibbs state at beta_h.       heat Q_in
//   B -> C  adiabat: populations frozen, control moves hot -> cold.
//   C -> D  cold isochore: energies fixed at the cold control,
//           populations relax to the Gibbs state at beta_l.    heat -Q_out
//   D -> A  adiabat: populations frozen, control moves cold -> hot.
//
// Quantum numbers are the adiabatic invariants, so populations are carried by
// label. With dP = P(B) - P(A):
//   Q_in  = sum E^hot dP,  Q_out = sum E^cold dP,  W_out = Q_in - Q_out,
//   efficiency = 1 - Q_out / Q_in.

#include "anyon_otto/errors.hpp"
#include "anyon_otto/spectra.hpp"
#include "anyon_otto/thermo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <iterator>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace anyon_otto {

enum class Medium {
    ring,        // control: flux parameter alpha (eps0 may differ per side)
    cs_volume,   // control: ring size L at fixed coupling alpha
    cs_coupling, // control: coupling alpha at fixed size L
};

[[nodiscard]] inline std::string_view to_string(Medium m) noexcept
{
    switch (m) {
    case Medium::ring:
        return "ring";
    case Medium::cs_volume:
        return "cs-volume";
    case Medium::cs_coupling:
        return "cs-coupling";
    }
    return "?";
}

[[nodiscard]] inline std::optional<Medium> parse_medium(std::string_view s) noexcept
{
    if (s == "ring") {
        return Medium::ring;
    }
    if (s == "cs-volume" || s == "cs_volume") {
        return Medium::cs_volume;
    }
    if (s == "cs-coupling" || s == "cs_coupling") {
        return Medium::cs_coupling;
    }
    return std::nullopt;
}

/// Operating mode from the signs of Q_in (heat taken from the hot bath),
/// Q_out (heat given to the cold bath) and W_out = Q_in - Q_out.
enum class Regime {
    engine,          // Q_in > 0, W_out > 0
    refrigerator,    // Q_in < 0, Q_out < 0, W_out < 0: pumps heat cold -> hot
    heater,          // Q_in < 0, Q_out > 0: work dumped into both baths
    accelerator,     // Q_in > 0, Q_out > Q_in: work speeds the hot -> cold flow
    reversed_engine, // Q_in <= 0, W_out > 0: only reachable with beta_h >= beta_l
    degenerate,      // no net work, e.g. identical hot and cold spectra
};

[[nodiscard]] inline std::string_view to_string(Regime r) noexcept
{
    switch (r) {
    case Regime::engine:
        return "engine";
    case Regime::refrigerator:
        return "refrigerator";
    case Regime::heater:
        return "heater";
    case Regime::accelerator:
        return "accelerator";
    case Regime::reversed_engine:
        return "reversed-engine";
    case Regime::degenerate:
        return "degenerate";
    }
    return "?";
}

[[nodiscard]] inline Regime classify(double q_in, double q_out, double w_out, double work_floor) noexcept
{
    if (std::fabs(w_out) <= work_floor) {
        return Regime::degenerate;
    }
    if (w_out > 0.0) {
        return q_in > 0.0 ? Regime::engine : Regime::reversed_engine;
    }
    if (q_in > 0.0) {
        return Regime::accelerator;
    }
    return q_out < 0.0 ? Regime::refrigerator : Regime::heater;
}

/// Cycle parameters. Control meaning per medium:
///   ring        control_hot = alpha_h, control_cold = alpha_l
///   cs-volume   control_hot = L2 (compressed), control_cold = L1
///   cs-coupling control_hot = alpha2,          control_cold = alpha1
struct OttoCycleSpec {
    Medium medium = Medium::ring;
    double beta_h = 1.0;
    double beta_l = 2.0;
    double control_hot = 0.0;
    double control_cold = 0.0;
    double eps0_hot = 1.0;  // ring only
    double eps0_cold = 1.0; // ring only
    double alpha = 0.0;     // cs-volume fixed coupling
    double length = 1.0;    // cs-coupling fixed size
    // Constant added to every level of both spectra.
    double energy_offset = 0.0;
    double tail_tol = 1e-15;
};

[[nodiscard]] inline OttoCycleSpec ring_cycle(double alpha_h, double alpha_l, double beta_h, double beta_l,
                                              double eps0 = 1.0)
{
    OttoCycleSpec s;
    s.medium = Medium::ring;
    s.control_hot = alpha_h;
    s.control_cold = alpha_l;
    s.beta_h = beta_h;
    s.beta_l = beta_l;
    s.eps0_hot = s.eps0_cold = eps0;
    return s;
}

[[nodiscard]] inline OttoCycleSpec cs_volume_cycle(double l1, double l2, double alpha, double beta_h,
                                                   double beta_l)
{
    OttoCycleSpec s;
    s.medium = Medium::cs_volume;
    s.control_cold = l1;
    s.control_hot = l2;
    s.alpha = alpha;
    s.beta_h = beta_h;
    s.beta_l = beta_l;
    return s;
}

[[nodiscard]] inline OttoCycleSpec cs_coupling_cycle(double alpha1, double alpha2, double length, double beta_h,
                                                     double beta_l)
{
    OttoCycleSpec s;
    s.medium = Medium::cs_coupling;
    s.control_cold = alpha1;
    s.control_hot = alpha2;
    s.length = length;
    s.beta_h = beta_h;
    s.beta_l = beta_l;
    return s;
}

inline void validate(const OttoCycleSpec& s)
{
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(s.beta_h)) {
        throw DomainError("OttoCycleSpec: beta_h must be positive and finite");
    }
    if (!positive(s.beta_l)) {
        throw DomainError("OttoCycleSpec: beta_l must be positive and finite");
    }
    if (!std::isfinite(s.control_hot) || !std::isfinite(s.control_cold) || !std::isfinite(s.energy_offset)) {
        throw DomainError("OttoCycleSpec: controls and energy_offset must be finite");
    }
    if (!(s.tail_tol > 0.0)) {
        throw DomainError("OttoCycleSpec: tail_tol must be positive");
    }
    switch (s.medium) {
    case Medium::ring:
        if (!positive(s.eps0_hot) || !positive(s.eps0_cold)) {
            throw DomainError("OttoCycleSpec: eps0 must be positive");
        }
        break;
    case Medium::cs_volume:
        if (!positive(s.control_hot) || !positive(s.control_cold)) {
            throw DomainError("OttoCycleSpec: lengths L1, L2 must be positive");
        }
        if (!(s.alpha >= 0.0)) {
            throw DomainError("OttoCycleSpec: alpha must be >= 0");
        }
        break;
    case Medium::cs_coupling:
        if (!positive(s.length)) {
            throw DomainError("OttoCycleSpec: length must be positive");
        }
        if (!(s.control_hot >= 0.0 && s.control_cold >= 0.0)) {
            throw DomainError("OttoCycleSpec: couplings alpha1, alpha2 must be >= 0");
        }
        break;
    }
}

/// Spectrum along the control path, t = 0 at the hot control and t = 1 at the
/// cold control. Both endpoints are reproduced bit for bit.
[[nodiscard]] inline Spectrum spectrum_at(const OttoCycleSpec& s, double t)
{
    const double control = (1.0 - t) * s.control_hot + t * s.control_cold;
    switch (s.medium) {
    case Medium::ring:
        return RingAnyonSpectrum{(1.0 - t) * s.eps0_hot + t * s.eps0_cold, control};
    case Medium::cs_volume:
        return CSPairSpectrum{control, s.alpha};
    case Medium::cs_coupling:
        return CSPairSpectrum{s.length, control};
    }
    throw DomainError("spectrum_at: unknown medium");
}

[[nodiscard]] inline Spectrum hot_spectrum(const OttoCycleSpec& s) { return spectrum_at(s, 0.0); }
[[nodiscard]] inline Spectrum cold_spectrum(const OttoCycleSpec& s) { return spectrum_at(s, 1.0); }

struct CycleReport {
    double q_in = 0.0;
    double q_out = 0.0;
    double w_out = 0.0;
    // 1 - Q_out / Q_in. Physically an efficiency only when regime == engine;
    // otherwise the raw ratio, kept so sweeps stay continuous.
    double efficiency = 0.0;
    Regime regime = Regime::degenerate;

    std::vector<Label> labels; // common label set, ascending in hot energy
    std::vector<double> energies_hot;
    std::vector<double> energies_cold;
    std::vector<double> populations_a; // = populations at D
    std::vector<double> populations_b; // = populations at C
    double entropy_a = 0.0, entropy_b = 0.0, entropy_c = 0.0, entropy_d = 0.0;
    double tail_bound = 0.0;

    // Relative difference to a closed-form efficiency; NaN when not computed.
    double oracle_residual = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

[[nodiscard]] inline std::vector<Label> union_labels(const LevelSet& a, const LevelSet& b)
{
    std::vector<Label> la = a.labels;
    std::vector<Label> lb = b.labels;
    std::sort(la.begin(), la.end());
    std::sort(lb.begin(), lb.end());
    std::vector<Label> out;
    out.reserve(la.size() + lb.size());
    std::set_union(la.begin(), la.end(), lb.begin(), lb.end(), std::back_inserter(out));
    return out;
}

[[nodiscard]] inline std::vector<double> shifted(std::vector<double> e, double offset)
{
    if (offset != 0.0) {
        for (auto& v : e) {
            v += offset;
        }
    }
    return e;
}

} // namespace detail

// Relative size of |Q_in| below which the cycle is treated as 0/0.
inline constexpr double kDegenerateHeat = 1e-13;
// Relative size of |W_out| below which no net work is produced.
inline constexpr double kDegenerateWork = 1e-14;

[[nodiscard]] inline CycleReport run_cycle(const OttoCycleSpec& spec)
{
    validate(spec);
    const Spectrum hot = hot_spectrum(spec);
    const Spectrum cold = cold_spectrum(spec);

    const LevelSet at_b = enumerate_levels(hot, spec.beta_h, spec.tail_tol);
    const LevelSet at_a = enumerate_levels(cold, spec.beta_l, spec.tail_tol);

    std::vector<Label> labels = detail::union_labels(at_b, at_a);
    std::vector<double> e_hot = energies(hot, labels);
    {
        // ascending hot energy
        std::vector<std::size_t> order(labels.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            order[i] = i;
        }
        std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return e_hot[x] < e_hot[y]; });
        std::vector<Label> sorted;
        sorted.reserve(labels.size());
        for (auto i : order) {
            sorted.push_back(labels[i]);
        }
        labels = std::move(sorted);
    }

    CycleReport r;
    r.energies_hot = detail::shifted(energies(hot, labels), spec.energy_offset);
    r.energies_cold = detail::shifted(energies(cold, labels), spec.energy_offset);
    r.labels = std::move(labels);
    r.populations_b = boltzmann_populations(r.energies_hot, spec.beta_h);
    r.populations_a = boltzmann_populations(r.energies_cold, spec.beta_l);
    r.tail_bound = at_a.tail_bound + at_b.tail_bound;

    // Since sum dP = 0, energies are measured from each spectrum's minimum;
    // degenerate ground states then drop out instead of cancelling.
    const double hot_min = *std::min_element(r.energies_hot.begin(), r.energies_hot.end());
    const double cold_min = *std::min_element(r.energies_cold.begin(), r.energies_cold.end());
    double scale = 0.0;
    for (std::size_t i = 0; i < r.labels.size(); ++i) {
        const double dp = r.populations_b[i] - r.populations_a[i];
        const double eh = r.energies_hot[i] - hot_min;
        r.q_in += eh * dp;
        r.q_out += (r.energies_cold[i] - cold_min) * dp;
        scale += eh * (r.populations_a[i] + r.populations_b[i]);
    }
    r.w_out = r.q_in - r.q_out;

    r.entropy_a = entropy(r.populations_a);
    r.entropy_b = entropy(r.populations_b);
    r.entropy_c = entropy(r.populations_b);
    r.entropy_d = entropy(r.populations_a);

    if (!(std::fabs(r.q_in) > kDegenerateHeat * scale)) {
        throw DegenerateCycle("run_cycle: heat absorbed on the hot isochore vanishes (Q_in = " +
                              std::to_string(r.q_in) + ")");
    }
    r.efficiency = 1.0 - r.q_out / r.q_in;

    r.regime = r.energies_hot == r.energies_cold ? Regime::degenerate
                                                 : classify(r.q_in, r.q_out, r.w_out, kDegenerateWork * scale);
    return r;
}

/// Discretized strokes of one cycle on the common label set of run_cycle.
struct CyclePaths {
    std::vector<PathStep> hot_isochore;  // A -> B
    std::vector<PathStep> expansion;     // B -> C
    std::vector<PathStep> cold_isochore; // C -> D
    std::vector<PathStep> compression;   // D -> A
};

/// Isochores step the bath temperature linearly between T_l and T_h (each
/// intermediate state is the Gibbs state at the fixed energies); adiabats
/// step the control parameter linearly with populations frozen.
[[nodiscard]] inline CyclePaths discretize_cycle(const OttoCycleSpec& spec, const CycleReport& report,
                                                 std::size_t steps)
{
    if (steps == 0) {
        throw DomainError("discretize_cycle: steps must be positive");
    }
    const double t_hot = 1.0 / spec.beta_h;
    const double t_cold = 1.0 / spec.beta_l;

    auto isochore = [&](const std::vector<double>& e, const std::vector<double>& p_start, double t_from,
                        double t_to, double beta_end) {
        std::vector<PathStep> path;
        path.reserve(steps);
        std::vector<double> p_prev = p_start;
        for (std::size_t k = 1; k <= steps; ++k) {
            const double beta = k == steps ? beta_end
                                           : 1.0 / (t_from + (t_to - t_from) * static_cast<double>(k) /
                                                                 static_cast<double>(steps));
            std::vector<double> p_next = boltzmann_populations(e, beta);
            path.push_back({e, e, p_prev, p_next});
            p_prev = std::move(p_next);
        }
        return path;
    };

    auto adiabat = [&](const std::vector<double>& p, bool hot_to_cold) {
        std::vector<PathStep> path;
        path.reserve(steps);
        auto energies_at = [&](std::size_t k) {
            const double frac = static_cast<double>(k) / static_cast<double>(steps);
            const double t = hot_to_cold ? frac : 1.0 - frac;
            if (k == 0) {
                return hot_to_cold ? report.energies_hot : report.energies_cold;
            }
            if (k == steps) {
                return hot_to_cold ? report.energies_cold : report.energies_hot;
            }
            return detail::shifted(energies(spectrum_at(spec, t), report.labels), spec.energy_offset);
        };
        std::vector<double> e_prev = energies_at(0);
        for (std::size_t k = 1; k <= steps; ++k) {
            std::vector<double> e_next = energies_at(k);
            path.push_back({e_prev, e_next, p, p});
            e_prev = std::move(e_next);
        }
        return path;
    };

    CyclePaths c;
    c.hot_isochore = isochore(report.energies_hot, report.populations_a, t_cold, t_hot, spec.beta_h);
    c.expansion = adiabat(report.populations_b, true);
    c.cold_isochore = isochore(report.energies_cold, report.populations_b, t_hot, t_cold, spec.beta_l);
    c.compression = adiabat(report.populations_a, false);
    return c;
}

// ---------------------------------------------------------------------------
// Parameter sweeps

enum class SweepAxis { beta_h, beta_l, control_hot, control_cold, eps0, alpha, length };

/// Maps a user-facing parameter name to the spec field it drives for the
/// given medium. Accepts both dash and underscore spellings.
[[nodiscard]] inline std::optional<SweepAxis> parse_sweep_axis(std::string_view name, Medium medium)
{
    std::string n(name);
    std::replace(n.begin(), n.end(), '-', '_');
    if (n == "beta_h") {
        return SweepAxis::beta_h;
    }
    if (n == "beta_l") {
        return SweepAxis::beta_l;
    }
    switch (medium) {
    case Medium::ring:
        if (n == "alpha_h") {
            return SweepAxis::control_hot;
        }
        if (n == "alpha_l") {
            return SweepAxis::control_cold;
        }
        if (n == "eps0") {
            return SweepAxis::eps0;
        }
        break;
    case Medium::cs_volume:
        if (n == "l2") {
            return SweepAxis::control_hot;
        }
        if (n == "l1") {
            return SweepAxis::control_cold;
        }
        if (n == "alpha") {
            return SweepAxis::alpha;
        }
        break;
    case Medium::cs_coupling:
        if (n == "alpha2") {
            return SweepAxis::control_hot;
        }
        if (n == "alpha1") {
            return SweepAxis::control_cold;
        }
        if (n == "length") {
            return SweepAxis::length;
        }
        break;
    }
    return std::nullopt;
}

inline void apply_axis(OttoCycleSpec& s, SweepAxis axis, double value) noexcept
{
    switch (axis) {
    case SweepAxis::beta_h:
        s.beta_h = value;
        break;
    case SweepAxis::beta_l:
        s.beta_l = value;
        break;
    case SweepAxis::control_hot:
        s.control_hot = value;
        break;
    case SweepAxis::control_cold:
        s.control_cold = value;
        break;
    case SweepAxis::eps0:
        s.eps0_hot = s.eps0_cold = value;
        break;
    case SweepAxis::alpha:
        s.alpha = value;
        break;
    case SweepAxis::length:
        s.length = value;
        break;
    }
}

struct SweepRow {
    double value = 0.0;
    std::optional<CycleReport> report;
    std::string error; // empty on success
    double wall_seconds = 0.0;
};

/// Optional per-row post-processing, e.g. attaching a closed-form residual.
/// Exceptions it throws are recorded in the row like cycle failures.
using RowHook = std::function<void(const OttoCycleSpec&, CycleReport&)>;

[[nodiscard]] inline SweepRow run_sweep_row(const OttoCycleSpec& tmpl, SweepAxis axis, double value,
                                            const RowHook& hook)
{
    SweepRow row;
    row.value = value;
    const auto start = std::chrono::steady_clock::now();
    try {
        if (!std::isfinite(value)) {
            throw DomainError("sweep value is not finite");
        }
        OttoCycleSpec spec = tmpl;
        apply_axis(spec, axis, value);
        CycleReport rep = run_cycle(spec);
        if (hook) {
            hook(spec, rep);
        }
        row.report = std::move(rep);
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return row;
}

/// One row per value, in input order. Rows are independent; with threads > 1
/// they are computed concurrently, which does not change the output order.
[[nodiscard]] inline std::vector<SweepRow> sweep_efficiency(const OttoCycleSpec& tmpl, SweepAxis axis,
                                                            std::span<const double> values,
                                                            const RowHook& hook = {}, unsigned threads = 1)
{
    std::vector<SweepRow> rows(values.size());
    if (threads <= 1 || values.size() < 2) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            rows[i] = run_sweep_row(tmpl, axis, values[i], hook);
        }
        return rows;
    }
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        const unsigned n = std::min<unsigned>(threads, static_cast<unsigned>(values.size()));
        for (unsigned w = 0; w < n; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < values.size(); i = next++) {
                    rows[i] = run_sweep_row(tmpl, axis, values[i], hook);
                }
            });
        }
    }
    return rows;
}

/// Closed form of the variable-volume two-anyon cycle: every level scales as
/// 1/L^2, so the efficiency is 1 - L2^2 / L1^2 for any coupling and temperatures.
[[nodiscard]] inline double efficiency_cs_volume(double l1, double l2)
{
    if (!(l1 > 0.0) || !(l2 > 0.0)) {
        throw DomainError("efficiency_cs_volume: lengths must be positive");
    }
    return 1.0 - (l2 * l2) / (l1 * l1);
}

} // namespace anyon_otto
