#pragma once

// Closed-form-vs-oracle validation grid, grouped by formula family.

#include "anyon_otto/closed_form.hpp"
#include "anyon_otto/otto.hpp"
#include "anyon_otto/special_functions.hpp"
#include "anyon_otto/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace anyon_otto::cli {

struct FamilyResult {
    std::string family;
    double max_residual = 0.0;
    double threshold = 0.0;
    std::size_t points = 0;
    std::string worst_point;
    std::string worst_error; // set when the worst point threw

    [[nodiscard]] bool passed() const noexcept { return max_residual <= threshold; }
};

struct ValidationOptions {
    special::SumAccuracy accuracy{};
    double tail_tol = 1e-15;
    closed_form::FormulaVariant variant = closed_form::FormulaVariant::rederived;
    std::uint64_t seed = 20240611;
};

struct ValidationSummary {
    std::vector<FamilyResult> families;
    closed_form::FormulaVariant variant = closed_form::FormulaVariant::rederived;

    [[nodiscard]] bool passed() const noexcept
    {
        return std::all_of(families.begin(), families.end(), [](const auto& f) { return f.passed(); });
    }
};

/// Ring engine grid: every point lies in the engine regime.
[[nodiscard]] inline std::vector<OttoCycleSpec> ring_engine_grid()
{
    std::vector<OttoCycleSpec> grid;
    for (double ah : {0.05, 0.1, 0.15, 0.2, 0.25}) {
        for (double gap : {0.04, 0.08, 0.12, 0.16, 0.2}) {
            for (double bh : {0.05, 0.3, 0.8, 1.4, 2.0}) {
                for (double bl : {15.0, 20.0, 30.0, 50.0, 100.0}) {
                    grid.push_back(ring_cycle(ah, ah + gap, bh, bl));
                }
            }
        }
    }
    return grid;
}

/// Variable-coupling grid around the Bose -> Fermi cycle (alpha1, alpha2) = (0, 1).
[[nodiscard]] inline std::vector<OttoCycleSpec> cs_coupling_grid()
{
    std::vector<OttoCycleSpec> grid;
    for (double a1 : {0.0, 0.3, 0.6}) {
        for (double a2 : {1.0, 1.4, 2.0}) {
            for (auto [bh, bl] : {std::pair{0.05, 0.1}, std::pair{0.02, 0.3}, std::pair{0.1, 1.0}}) {
                for (double L : {1.0, 1.7}) {
                    grid.push_back(cs_coupling_cycle(a1, a2, L, bh, bl));
                }
            }
        }
    }
    return grid;
}

namespace detail {

[[nodiscard]] inline std::string point(std::initializer_list<std::pair<const char*, double>> kv)
{
    std::string s;
    for (const auto& [k, v] : kv) {
        if (!s.empty()) {
            s += ", ";
        }
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s=%.6g", k, v);
        s += buf;
    }
    return s;
}

[[nodiscard]] inline std::string point(const OttoCycleSpec& s)
{
    return point({{"beta_h", s.beta_h}, {"beta_l", s.beta_l}, {"control_hot", s.control_hot},
                  {"control_cold", s.control_cold}});
}

class Family {
public:
    Family(std::string name, double threshold)
    {
        r_.family = std::move(name);
        r_.threshold = threshold;
    }

    // Evaluates one point; exceptions count as an infinite residual.
    void check(const std::string& where, const std::function<double()>& residual)
    {
        ++r_.points;
        double v = 0.0;
        std::string err;
        try {
            v = residual();
            if (std::isnan(v)) {
                v = std::numeric_limits<double>::infinity();
            }
        } catch (const std::exception& e) {
            v = std::numeric_limits<double>::infinity();
            err = e.what();
        }
        if (r_.worst_point.empty() || v > r_.max_residual) {
            r_.max_residual = v;
            r_.worst_point = where;
            r_.worst_error = err;
        }
    }

    [[nodiscard]] FamilyResult result() const { return r_; }

private:
    FamilyResult r_;
};

[[nodiscard]] inline double rel(double a, double b)
{
    return std::fabs(a - b) / std::max(std::fabs(b), 1e-300);
}

} // namespace detail

/// Runs every family. Closed-form thresholds are max(1e-9, 10 rel_tol) for
/// single sums and max(1e-9, 100 rel_tol) for efficiencies, which combine
/// eight sums through two differences. Identities of the series themselves
/// use the multiples of rel_tol they are certified to.
[[nodiscard]] inline ValidationSummary run_validation(const ValidationOptions& v)
{
    using detail::Family;
    using detail::point;
    using detail::rel;
    namespace cf = closed_form;

    const auto& acc = v.accuracy;
    const double tol = acc.rel_tol;
    const double closed_tol = std::max(1e-9, 10.0 * tol);
    const double efficiency_tol = std::max(1e-9, 100.0 * tol);
    cf::Options o;
    o.accuracy = acc;
    o.tail_tol = v.tail_tol;
    o.variant = v.variant;

    std::mt19937_64 rng(v.seed);
    auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    auto log_uniform = [&](double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); };

    ValidationSummary out;
    out.variant = v.variant;

    {
        Family sym("theta3 reflection x -> 1/x", 2.0 * tol);
        Family split("theta3 = partial(x) + partial(1/x) - 1", 4.0 * tol);
        for (int i = 0; i < 1000; ++i) {
            const double x = uniform(0.1, 10.0);
            const double q = uniform(0.01, 0.9);
            const auto where = point({{"x", x}, {"q", q}});
            sym.check(where, [&] { return rel(special::theta3(1.0 / x, q, acc), special::theta3(x, q, acc)); });
            split.check(where, [&] {
                return rel(special::partial_theta(x, q, acc) + special::partial_theta(1.0 / x, q, acc) - 1.0,
                           special::theta3(x, q, acc));
            });
        }
        out.families.push_back(sym.result());
        out.families.push_back(split.result());
    }
    {
        Family f("gauss_sum_full vs theta3 form", 10.0 * tol);
        for (int i = 0; i < 500; ++i) {
            const double lambda = log_uniform(0.05, 20.0);
            const double gamma = uniform(-5.0, 5.0);
            f.check(point({{"lambda", lambda}, {"gamma", gamma}}), [&] {
                const double th = std::exp(-lambda * gamma * gamma) *
                                  special::theta3(std::exp(2.0 * lambda * gamma), std::exp(-lambda), acc);
                return rel(th, special::gauss_sum_full(lambda, gamma, 0.0, 0, acc));
            });
        }
        out.families.push_back(f.result());
    }
    {
        Family z("ring partition function Z_j", closed_tol);
        for (double lambda = 0.05; lambda <= 20.0; lambda *= 1.25) {
            for (double alpha : {0.0, 0.17, 0.5, 0.83, 1.6, -2.3}) {
                z.check(point({{"lambda", lambda}, {"alpha", alpha}}),
                        [&] { return cf::ring_partition_closed(alpha, lambda, 1.0, o).rel_residual; });
            }
        }
        out.families.push_back(z.result());

        Family u("ring Upsilon(k, j)", closed_tol);
        for (int i = 0; i < 300; ++i) {
            const double ak = uniform(-1.5, 1.5), aj = uniform(-1.5, 1.5), lambda = log_uniform(0.05, 20.0);
            u.check(point({{"alpha_k", ak}, {"alpha_j", aj}, {"lambda", lambda}}),
                    [&] { return cf::upsilon(ak, aj, lambda, 1.0, o).rel_residual; });
        }
        out.families.push_back(u.result());

        Family e("ring efficiency", efficiency_tol);
        for (const auto& s : ring_engine_grid()) {
            e.check(point(s), [&] { return cf::ring_efficiency_closed(s, o).rel_residual; });
        }
        out.families.push_back(e.result());
    }
    {
        Family z("two-anyon partition function Z(alpha, beta)", closed_tol);
        for (double b = 0.05; b <= 20.0; b *= 1.5) {
            for (double alpha : {0.0, 0.35, 0.5, 1.0, 1.8}) {
                for (double L : {1.0, 2.0}) {
                    const double beta = b * L * L / (std::numbers::pi * std::numbers::pi);
                    z.check(point({{"beta pi^2/L^2", b}, {"alpha", alpha}, {"L", L}}),
                            [&] { return cf::cs_partition_closed(alpha, beta, L, o).rel_residual; });
                }
            }
        }
        out.families.push_back(z.result());

        Family x("two-anyon X(alpha', alpha, beta)", closed_tol);
        for (int i = 0; i < 200; ++i) {
            const double w = uniform(0.0, 2.0), a = uniform(0.0, 2.0), L = uniform(0.7, 2.0);
            const double beta = log_uniform(0.05, 20.0) * L * L / (std::numbers::pi * std::numbers::pi);
            x.check(point({{"alpha_weight", w}, {"alpha_boltz", a}, {"beta", beta}, {"L", L}}),
                    [&] { return cf::cs_X(w, a, beta, L, o).rel_residual; });
        }
        out.families.push_back(x.result());

        Family e("two-anyon coupling efficiency", efficiency_tol);
        for (const auto& s : cs_coupling_grid()) {
            e.check(point(s), [&] { return cf::cs_efficiency_closed(s, o).rel_residual; });
        }
        out.families.push_back(e.result());
    }
    {
        Family f("two-anyon volume efficiency 1 - L2^2/L1^2", 1e-10);
        for (double l1 : {1.0, 1.5, 2.0}) {
            for (double l2 : {0.5, 0.8}) {
                for (double alpha : {0.0, 0.5, 1.0}) {
                    auto s = cs_volume_cycle(l1, l2, alpha, 0.01, 0.1);
                    s.tail_tol = v.tail_tol;
                    f.check(point({{"L1", l1}, {"L2", l2}, {"alpha", alpha}}),
                            [&] { return rel(run_cycle(s).efficiency, efficiency_cs_volume(l1, l2)); });
                }
            }
        }
        out.families.push_back(f.result());
    }
    {
        Family f("first law per stroke (1000 steps)", 1e-8);
        for (auto s : {ring_cycle(0.3, 0.4, 2.0, 10.0), cs_coupling_cycle(0.0, 1.0, 1.0, 0.05, 0.1),
                       cs_volume_cycle(1.0, 0.5, 0.5, 0.01, 0.1)}) {
            s.tail_tol = v.tail_tol;
            f.check(point(s), [&] {
                const auto rep = run_cycle(s);
                const auto paths = discretize_cycle(s, rep, 1000);
                double worst = 0.0;
                for (const auto* p : {&paths.hot_isochore, &paths.expansion, &paths.cold_isochore, &paths.compression}) {
                    const auto hw = heat_work_split(*p);
                    const double de = mean_energy(p->back().energies_after, p->back().populations_after) -
                                      mean_energy(p->front().energies_before, p->front().populations_before);
                    worst = std::max(worst, rel(hw.heat + hw.work, de));
                }
                return worst;
            });
        }
        out.families.push_back(f.result());
    }
    return out;
}

} // namespace anyon_otto::cli
