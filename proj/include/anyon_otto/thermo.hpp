#pragma once

// Gibbs ensembles on truncated level sets and the heat/work bookkeeping
// dE = tr{d rho H} + tr{rho dH}.

#include "anyon_otto/errors.hpp"
#include "anyon_otto/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace anyon_otto {

struct GibbsEnsemble {
    LevelSet levels;
    double beta = 0.0;
    std::vector<double> populations; // same order as levels.labels
    double log_z = 0.0;              // log of the truncated partition function, unshifted energies
    double internal_energy = 0.0;
    double entropy = 0.0;            // k_B = 1
};

/// -sum p ln p with 0 ln 0 = 0.
[[nodiscard]] inline double entropy(std::span<const double> populations) noexcept
{
    double s = 0.0;
    for (double p : populations) {
        if (p > 0.0) {
            s -= p * std::log(p);
        }
    }
    return s;
}

[[nodiscard]] inline double entropy(const GibbsEnsemble& ensemble) noexcept
{
    return entropy(ensemble.populations);
}

[[nodiscard]] inline double mean_energy(std::span<const double> energies, std::span<const double> populations)
{
    if (energies.size() != populations.size()) {
        throw ShapeError("mean_energy: energy and population lists differ in length");
    }
    double e = 0.0;
    for (std::size_t i = 0; i < energies.size(); ++i) {
        e += populations[i] * energies[i];
    }
    return e;
}

/// Boltzmann populations exp(-beta (E - E_min)) / sum, with log Z for the
/// unshifted energies written to *log_z when given.
[[nodiscard]] inline std::vector<double> boltzmann_populations(std::span<const double> energies, double beta,
                                                               double* log_z = nullptr)
{
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw DomainError("boltzmann_populations: beta must be positive and finite");
    }
    if (energies.empty()) {
        throw ShapeError("boltzmann_populations: empty level list");
    }
    const double e_min = *std::min_element(energies.begin(), energies.end());
    std::vector<double> p(energies.size());
    double z = 0.0;
    for (std::size_t i = 0; i < energies.size(); ++i) {
        p[i] = std::exp(-beta * (energies[i] - e_min));
        z += p[i];
    }
    for (auto& v : p) {
        v /= z;
    }
    if (log_z != nullptr) {
        *log_z = std::log(z) - beta * e_min;
    }
    return p;
}

/// Gibbs state on an explicit level set (which need not come from enumerate_levels).
[[nodiscard]] inline GibbsEnsemble gibbs_on(LevelSet levels, double beta)
{
    GibbsEnsemble g;
    g.beta = beta;
    g.populations = boltzmann_populations(levels.energies, beta, &g.log_z);
    g.internal_energy = mean_energy(levels.energies, g.populations);
    g.entropy = entropy(g.populations);
    g.levels = std::move(levels);
    return g;
}

[[nodiscard]] inline GibbsEnsemble gibbs(const Spectrum& spectrum, double beta, double tail_tol)
{
    return gibbs_on(enumerate_levels(spectrum, beta, tail_tol), beta);
}

struct PartitionSum {
    double value = 0.0;
    // Certified bound on the omitted Boltzmann weight, in the same (unshifted) units as value.
    double tail_bound = 0.0;
    std::size_t levels = 0;
};

/// Direct truncated sum of exp(-beta E) over the enumerated levels.
[[nodiscard]] inline PartitionSum partition_sum(const Spectrum& spectrum, double beta, double tail_tol)
{
    const LevelSet set = enumerate_levels(spectrum, beta, tail_tol);
    PartitionSum z;
    // smallest terms first
    for (auto it = set.energies.rbegin(); it != set.energies.rend(); ++it) {
        z.value += std::exp(-beta * *it);
    }
    z.tail_bound = set.tail_bound * std::exp(-beta * set.energies.front());
    z.levels = set.size();
    return z;
}

[[nodiscard]] inline double partition_function(const Spectrum& spectrum, double beta, double tail_tol)
{
    return partition_sum(spectrum, beta, tail_tol).value;
}

/// One discretization step of a thermodynamic path, on a fixed label order.
struct PathStep {
    std::vector<double> energies_before;
    std::vector<double> energies_after;
    std::vector<double> populations_before;
    std::vector<double> populations_after;
};

struct HeatWork {
    double heat = 0.0;
    double work = 0.0;
};

/// Splits the energy change along a path into heat sum dP * mean(E) and work
/// sum mean(P) * dE. The midpoint pairing makes heat + work telescope to
/// E_final - E_initial step by step.
[[nodiscard]] inline HeatWork heat_work_split(std::span<const PathStep> path)
{
    HeatWork hw;
    std::size_t width = 0;
    for (std::size_t k = 0; k < path.size(); ++k) {
        const auto& s = path[k];
        const std::size_t n = s.energies_before.size();
        if (s.energies_after.size() != n || s.populations_before.size() != n || s.populations_after.size() != n) {
            throw ShapeError("heat_work_split: step " + std::to_string(k) + " has mismatched list lengths");
        }
        if (k > 0 && n != width) {
            throw ShapeError("heat_work_split: step " + std::to_string(k) + " changes the label set");
        }
        width = n;
        for (std::size_t i = 0; i < n; ++i) {
            const double dp = s.populations_after[i] - s.populations_before[i];
            const double de = s.energies_after[i] - s.energies_before[i];
            hw.heat += dp * 0.5 * (s.energies_after[i] + s.energies_before[i]);
            hw.work += 0.5 * (s.populations_after[i] + s.populations_before[i]) * de;
        }
    }
    return hw;
}

} // namespace anyon_otto
