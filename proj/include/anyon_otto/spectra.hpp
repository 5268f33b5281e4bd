#pragma once

// Level families of the two working media, truncated level enumeration with a
// certified Boltzmann tail, and the Pauli-energy utility.
//
// Natural units hbar = m = k_B = 1. The ring scale eps0 = hbar^2 / (2 m a^2)
// and the two-anyon ring size L carry all dimensions.

#include "anyon_otto/errors.hpp"

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

namespace anyon_otto {

/// One charged particle on a flux-threaded ring: E_n = eps0 (n - alpha)^2, n in Z.
struct RingAnyonSpectrum {
    double eps0 = 1.0;
    double alpha = 0.0;
};

/// Two Calogero-Sutherland anyons on a ring of circumference 2 pi L:
/// E = pi^2 alpha^2 / L^2 + 2 pi^2 / L^2 (n1^2 + n2^2 + alpha (n1 - n2)), n1 <= n2.
/// The pair coupling pi alpha (alpha - 1) / L^2 is fixed by alpha and L.
struct CSPairSpectrum {
    double length = 1.0;
    double alpha = 0.0;
};

using Spectrum = std::variant<RingAnyonSpectrum, CSPairSpectrum>;

/// Quantum numbers of a level. Ring levels use n1 only and keep n2 = 0.
struct Label {
    std::int64_t n1 = 0;
    std::int64_t n2 = 0;
    auto operator<=>(const Label&) const = default;
};

struct LevelSet {
    std::vector<Label> labels;
    std::vector<double> energies; // ascending, same order as labels
    // Upper bound on sum_{omitted} exp(-beta (E - E_ground)) for the beta the
    // set was built for. The ground-state weight is 1 in these units.
    double tail_bound = 0.0;
    double beta = 0.0;

    [[nodiscard]] std::size_t size() const noexcept { return labels.size(); }
};

inline void validate(const RingAnyonSpectrum& s)
{
    if (!(s.eps0 > 0.0) || !std::isfinite(s.eps0)) {
        throw DomainError("RingAnyonSpectrum: eps0 must be positive and finite");
    }
    if (!std::isfinite(s.alpha)) {
        throw DomainError("RingAnyonSpectrum: alpha must be finite");
    }
}

inline void validate(const CSPairSpectrum& s)
{
    if (!(s.length > 0.0) || !std::isfinite(s.length)) {
        throw DomainError("CSPairSpectrum: L must be positive and finite");
    }
    if (!(s.alpha >= 0.0) || !std::isfinite(s.alpha)) {
        throw DomainError("CSPairSpectrum: alpha must be finite and >= 0");
    }
}

inline void validate(const Spectrum& s)
{
    std::visit([](const auto& v) { validate(v); }, s);
}

[[nodiscard]] inline double ring_energy(const RingAnyonSpectrum& s, std::int64_t n) noexcept
{
    const double u = static_cast<double>(n) - s.alpha;
    return s.eps0 * u * u;
}

/// pi^2 / L^2, the two-anyon energy unit.
[[nodiscard]] inline double cs_energy_unit(const CSPairSpectrum& s) noexcept
{
    return std::numbers::pi * std::numbers::pi / (s.length * s.length);
}

[[nodiscard]] inline double cs_energy(const CSPairSpectrum& s, std::int64_t n1, std::int64_t n2)
{
    if (n1 > n2) {
        throw OrderingError("cs_energy: requires n1 <= n2, got n1 = " + std::to_string(n1) +
                            ", n2 = " + std::to_string(n2));
    }
    const auto a = static_cast<double>(n1);
    const auto b = static_cast<double>(n2);
    const double unit = cs_energy_unit(s);
    return unit * s.alpha * s.alpha + 2.0 * unit * (a * a + b * b + s.alpha * (a - b));
}

[[nodiscard]] inline double energy(const RingAnyonSpectrum& s, const Label& l) noexcept
{
    return ring_energy(s, l.n1);
}

[[nodiscard]] inline double energy(const CSPairSpectrum& s, const Label& l)
{
    return cs_energy(s, l.n1, l.n2);
}

[[nodiscard]] inline double energy(const Spectrum& s, const Label& l)
{
    return std::visit([&](const auto& v) { return energy(v, l); }, s);
}

[[nodiscard]] inline std::vector<double> energies(const Spectrum& s, const std::vector<Label>& labels)
{
    std::vector<double> out;
    out.reserve(labels.size());
    for (const auto& l : labels) {
        out.push_back(energy(s, l));
    }
    return out;
}

/// Ground-state energy difference of N harmonically trapped fermions and
/// bosons, hbar omega N (N - 1) / 2.
[[nodiscard]] inline double pauli_energy(std::int64_t n_particles, double omega)
{
    if (n_particles < 1) {
        throw DomainError("pauli_energy: N must be >= 1");
    }
    if (!(omega > 0.0)) {
        throw DomainError("pauli_energy: omega must be positive");
    }
    const auto n = static_cast<double>(n_particles);
    return omega * n * (n - 1.0) / 2.0;
}

namespace detail {

// Window half-width cap for the enumeration.
inline constexpr std::int64_t kRingWindowCap = 1'000'000;
inline constexpr std::int64_t kPairWindowCap = 3'000;

// One lattice axis with weights exp(-lambda ((n - gamma)^2 - dmin^2)) in a
// window |n - center| <= K, center = round(gamma). dmin^2 is the in-window
// minimum, so the largest weight is 1.
struct AxisWindow {
    double lambda = 0.0;
    double gamma = 0.0;
    std::int64_t center = 0;
    std::int64_t half_width = 0;

    [[nodiscard]] double dmin2() const noexcept
    {
        const double d = static_cast<double>(center) - gamma;
        return d * d;
    }

    // Bound on the omitted weight on both sides of the window.
    [[nodiscard]] double tail() const noexcept
    {
        const double delta = std::fabs(static_cast<double>(center) - gamma);
        const double d = static_cast<double>(half_width) + 1.0 - delta; // nearest omitted offset
        const double g = std::exp(-lambda * (d * d - dmin2()));
        // sum_{j>=0} e^{-lambda (d + j)^2} <= e^{-lambda d^2} / (1 - e^{-2 lambda d})
        return 2.0 * g / (-std::expm1(-2.0 * lambda * d));
    }

    // Smallest beta-scaled shifted energy, lambda (d^2 - dmin^2), outside the window.
    [[nodiscard]] double min_outside() const noexcept
    {
        const double delta = std::fabs(static_cast<double>(center) - gamma);
        const double d = static_cast<double>(half_width) + 1.0 - delta;
        return lambda * (d * d - dmin2());
    }

    [[nodiscard]] double window_sum() const noexcept
    {
        double s = 0.0;
        for (std::int64_t n = center - half_width; n <= center + half_width; ++n) {
            const double u = static_cast<double>(n) - gamma;
            s += std::exp(-lambda * (u * u - dmin2()));
        }
        return s;
    }
};

inline void sort_levels(LevelSet& set)
{
    std::vector<std::size_t> order(set.labels.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (set.energies[a] != set.energies[b]) {
            return set.energies[a] < set.energies[b];
        }
        return set.labels[a] < set.labels[b];
    });
    LevelSet sorted;
    sorted.tail_bound = set.tail_bound;
    sorted.beta = set.beta;
    sorted.labels.reserve(order.size());
    sorted.energies.reserve(order.size());
    for (auto i : order) {
        sorted.labels.push_back(set.labels[i]);
        sorted.energies.push_back(set.energies[i]);
    }
    set = std::move(sorted);
}

inline LevelSet enumerate_ring(const RingAnyonSpectrum& s, double beta, double tail_tol)
{
    AxisWindow axis{beta * s.eps0, s.alpha, static_cast<std::int64_t>(std::llround(s.alpha)), 2};
    while (axis.tail() >= tail_tol) {
        if (axis.half_width >= kRingWindowCap) {
            throw NoConvergence("enumerate_levels: ring window cap reached");
        }
        axis.half_width *= 2;
    }
    LevelSet set;
    set.beta = beta;
    set.tail_bound = axis.tail();
    for (std::int64_t n = axis.center - axis.half_width; n <= axis.center + axis.half_width; ++n) {
        set.labels.push_back({n, 0});
        set.energies.push_back(ring_energy(s, n));
    }
    sort_levels(set);
    return set;
}

// E = 2 unit [(n1 + alpha/2)^2 + (n2 - alpha/2)^2]: a product of two lattice
// axes restricted to n1 <= n2. The square window is trimmed to the levels
// that lie below every omitted level; the trimmed weight goes into the tail.
inline LevelSet enumerate_pair(const CSPairSpectrum& s, double beta, double tail_tol)
{
    const double lambda = 2.0 * beta * cs_energy_unit(s);
    const double a = 0.5 * s.alpha;
    AxisWindow ax1{lambda, -a, static_cast<std::int64_t>(std::llround(-a)), 2};
    AxisWindow ax2{lambda, a, static_cast<std::int64_t>(std::llround(a)), 2};

    for (;;) {
        const double t1 = ax1.tail();
        const double t2 = ax2.tail();
        const double s1 = ax1.window_sum();
        const double s2 = ax2.window_sum();
        const double outside = t1 * (s2 + t2) + s1 * t2;
        const double cut = std::min(ax1.min_outside(), ax2.min_outside());

        LevelSet set;
        set.beta = beta;
        double trimmed = 0.0;
        const double shift = lambda * (ax1.dmin2() + ax2.dmin2());
        for (std::int64_t n1 = ax1.center - ax1.half_width; n1 <= ax1.center + ax1.half_width; ++n1) {
            const double u1 = static_cast<double>(n1) + a;
            for (std::int64_t n2 = std::max(n1, ax2.center - ax2.half_width);
                 n2 <= ax2.center + ax2.half_width; ++n2) {
                const double u2 = static_cast<double>(n2) - a;
                const double shifted = lambda * (u1 * u1 + u2 * u2) - shift;
                if (shifted > cut) {
                    trimmed += std::exp(-shifted);
                    continue;
                }
                set.labels.push_back({n1, n2});
                set.energies.push_back(cs_energy(s, n1, n2));
            }
        }
        set.tail_bound = outside + trimmed;
        if (set.tail_bound < tail_tol) {
            sort_levels(set);
            return set;
        }
        if (ax1.half_width >= kPairWindowCap) {
            throw NoConvergence("enumerate_levels: two-anyon window cap reached");
        }
        ax1.half_width *= 2;
        ax2.half_width *= 2;
    }
}

} // namespace detail

/// Enumerates levels until the omitted Boltzmann weight at inverse temperature
/// beta, relative to the ground-state weight, is certified below tail_tol.
[[nodiscard]] inline LevelSet enumerate_levels(const Spectrum& spectrum, double beta, double tail_tol)
{
    validate(spectrum);
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw DomainError("enumerate_levels: beta must be positive and finite");
    }
    if (!(tail_tol > 0.0)) {
        throw DomainError("enumerate_levels: tail_tol must be positive");
    }
    return std::visit(
        [&](const auto& s) -> LevelSet {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, RingAnyonSpectrum>) {
                return detail::enumerate_ring(s, beta, tail_tol);
            } else {
                return detail::enumerate_pair(s, beta, tail_tol);
            }
        },
        spectrum);
}

} // namespace anyon_otto
