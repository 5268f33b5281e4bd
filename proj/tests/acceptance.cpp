// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "anyon_otto/cli/validate.hpp"
#include "anyon_otto/closed_form.hpp"
#include "anyon_otto/otto.hpp"
#include "anyon_otto/spectra.hpp"
#include "anyon_otto/thermo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace anyon_otto;

namespace {

struct Outcome {
    bool passed = true;
    std::string detail;
};

// Tracks the largest residual seen and the first failure.
class Worst {
public:
    explicit Worst(double limit) : limit_(limit) {}

    void add(double residual, const std::string& where)
    {
        ++points_;
        if (std::isnan(residual) || residual > worst_) {
            worst_ = std::isnan(residual) ? INFINITY : residual;
            where_ = where;
        }
    }

    void fail(const std::string& why)
    {
        if (failure_.empty()) {
            failure_ = why;
        }
    }

    [[nodiscard]] Outcome outcome() const
    {
        char buf[160];
        std::snprintf(buf, sizeof buf, "max %.3e (limit %.0e) over %zu points", worst_, limit_, points_);
        Outcome o{failure_.empty() && worst_ <= limit_, buf};
        if (!failure_.empty()) {
            o.detail += "; " + failure_;
        } else if (!o.passed) {
            o.detail += " at " + where_;
        }
        return o;
    }

private:
    double limit_;
    double worst_ = 0.0;
    std::size_t points_ = 0;
    std::string where_;
    std::string failure_;
};

double rel(double a, double b)
{
    return std::fabs(a - b) / std::max(std::fabs(b), 1e-300);
}

std::string where(const OttoCycleSpec& s)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, "beta_h=%g beta_l=%g hot=%g cold=%g", s.beta_h, s.beta_l, s.control_hot,
                  s.control_cold);
    return buf;
}

Outcome volume_efficiency()
{
    Worst w(1e-10);
    for (double l1 : {1.0, 1.5, 2.0, 3.0, 4.0}) {
        for (double f : {0.2, 0.4, 0.6, 0.8, 0.95}) {
            const double l2 = f * l1;
            for (auto [bh, bl] : {std::pair{0.01, 0.1}, std::pair{0.1, 1.0}, std::pair{0.5, 5.0}}) {
                for (double alpha : {0.0, 0.5, 1.0}) {
                    const auto s = cs_volume_cycle(l1, l2, alpha, bh, bl);
                    w.add(rel(run_cycle(s).efficiency, 1.0 - l2 * l2 / (l1 * l1)), where(s));
                }
            }
        }
    }
    return w.outcome();
}

Outcome ring_closed_form()
{
    Worst w(1e-9);
    for (const auto& s : cli::ring_engine_grid()) {
        const auto report = run_cycle(s);
        if (report.regime != Regime::engine) {
            w.fail("not an engine at " + where(s));
        }
        w.add(closed_form::ring_efficiency_closed(s).rel_residual, where(s));
    }
    return w.outcome();
}

Outcome coupling_closed_form()
{
    Worst w(1e-9);
    bool bose_fermi = false;
    for (const auto& s : cli::cs_coupling_grid()) {
        bose_fermi = bose_fermi || (s.control_cold == 0.0 && s.control_hot == 1.0) ||
                     (s.control_cold == 1.0 && s.control_hot == 0.0);
        w.add(closed_form::cs_efficiency_closed(s).rel_residual, where(s));
    }
    if (!bose_fermi) {
        w.fail("grid lacks the (0, 1) coupling pair");
    }
    return w.outcome();
}

Outcome partition_functions()
{
    Worst w(1e-10);
    auto tail_check = [&](const Spectrum& sp, double beta, const std::string& at) {
        const auto z = partition_sum(sp, beta, 1e-15);
        if (!(z.tail_bound < 1e-13 * z.value)) {
            w.fail("tail bound " + std::to_string(z.tail_bound / z.value) + " of Z at " + at);
        }
    };
    for (double lambda = 0.05; lambda <= 20.0 * (1 + 1e-12); lambda *= std::pow(400.0, 1.0 / 40.0)) {
        for (double alpha : {0.0, 0.1, 0.25, 0.5, 0.77, 1.3, -0.6}) {
            const std::string at = "ring lambda=" + std::to_string(lambda) + " alpha=" + std::to_string(alpha);
            w.add(closed_form::ring_partition_closed(alpha, lambda, 1.0).rel_residual, at);
            tail_check(RingAnyonSpectrum{1.0, alpha}, lambda, at);
        }
    }
    constexpr double pi2 = std::numbers::pi * std::numbers::pi;
    for (double b = 0.05; b <= 20.0 * (1 + 1e-12); b *= std::pow(400.0, 1.0 / 20.0)) {
        for (double alpha : {0.0, 0.3, 0.5, 1.0, 1.7}) {
            for (double L : {0.8, 1.0, 2.5}) {
                const double beta = b * L * L / pi2;
                const std::string at = "pair b=" + std::to_string(b) + " alpha=" + std::to_string(alpha) +
                                       " L=" + std::to_string(L);
                w.add(closed_form::cs_partition_closed(alpha, beta, L).rel_residual, at);
                tail_check(CSPairSpectrum{L, alpha}, beta, at);
            }
        }
    }
    return w.outcome();
}

Outcome strokes()
{
    Worst w(1e-8);
    for (const auto& s : {ring_cycle(0.3, 0.4, 2.0, 10.0), ring_cycle(0.1, 0.25, 0.3, 50.0),
                          cs_coupling_cycle(0.0, 1.0, 1.0, 0.05, 0.1), cs_volume_cycle(1.0, 0.5, 0.5, 0.01, 0.1)}) {
        const auto report = run_cycle(s);
        const auto paths = discretize_cycle(s, report, 1000);
        const std::vector<const std::vector<PathStep>*> strokes{&paths.hot_isochore, &paths.expansion,
                                                                &paths.cold_isochore, &paths.compression};
        for (std::size_t k = 0; k < strokes.size(); ++k) {
            const auto& p = *strokes[k];
            if (p.size() != 1000) {
                w.fail("stroke has " + std::to_string(p.size()) + " steps");
            }
            const auto hw = heat_work_split(p);
            const double de = mean_energy(p.back().energies_after, p.back().populations_after) -
                              mean_energy(p.front().energies_before, p.front().populations_before);
            w.add(rel(hw.heat + hw.work, de), where(s) + " stroke " + std::to_string(k));
            const bool isochore = k % 2 == 0;
            if (isochore && hw.work != 0.0) {
                w.fail("isochore work " + std::to_string(hw.work) + " at " + where(s));
            }
            if (!isochore && hw.heat != 0.0) {
                w.fail("adiabat heat " + std::to_string(hw.heat) + " at " + where(s));
            }
        }
        if (report.entropy_b != report.entropy_c || report.entropy_d != report.entropy_a) {
            w.fail("entropy changes on an adiabat at " + where(s));
        }
    }
    return w.outcome();
}

std::vector<double> ring_levels(double eps0, double alpha, std::int64_t lo, std::int64_t hi)
{
    std::vector<double> e;
    for (std::int64_t n = lo; n <= hi; ++n) {
        e.push_back(ring_energy(RingAnyonSpectrum{eps0, alpha}, n));
    }
    std::sort(e.begin(), e.end());
    return e;
}

Outcome spectral_properties()
{
    Worst w(1e-14);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ua(-3.0, 3.0), ue(0.1, 10.0);
    constexpr std::int64_t N = 60;
    for (int i = 0; i < 200; ++i) {
        const double eps0 = ue(rng), alpha = ua(rng);
        const auto base = ring_levels(eps0, alpha, -N, N);
        const auto shifted = ring_levels(eps0, alpha + 1.0, 1 - N, 1 + N);
        const auto reflected = ring_levels(eps0, -alpha, -N, N);
        for (std::size_t k = 0; k < base.size(); ++k) {
            const double scale = std::max(1.0, base[k]);
            w.add(std::fabs(shifted[k] - base[k]) / scale, "periodicity alpha=" + std::to_string(alpha));
            w.add(std::fabs(reflected[k] - base[k]) / scale, "reflection alpha=" + std::to_string(alpha));
        }
    }

    constexpr double pi2 = std::numbers::pi * std::numbers::pi;
    for (double L : {0.5, 1.0, 2.0}) {
        const CSPairSpectrum bose{L, 0.0};
        for (std::int64_t n1 = -20; n1 <= 20; ++n1) {
            for (std::int64_t n2 = n1; n2 <= 20; ++n2) {
                const double free = 2.0 * pi2 / (L * L) * static_cast<double>(n1 * n1 + n2 * n2);
                if (cs_energy(bose, n1, n2) != free) {
                    w.fail("alpha = 0 pair level differs from free bosons at L=" + std::to_string(L));
                }
            }
        }
    }

    const auto half = gibbs(RingAnyonSpectrum{1.0, 0.5}, 1e3, 1e-15);
    if (!(std::fabs(half.entropy - std::numbers::ln2) < 1e-6)) {
        w.fail("alpha = 1/2 low-T entropy " + std::to_string(half.entropy));
    }
    return w.outcome();
}

Outcome pauli()
{
    for (std::int64_t n = 1; n <= 100; ++n) {
        for (double omega : {1.0, 0.5, 3.0}) {
            double fermi = 0.0;
            double bose = 0.0;
            for (std::int64_t k = 0; k < n; ++k) {
                fermi += omega * (static_cast<double>(k) + 0.5);
                bose += omega * 0.5;
            }
            if (pauli_energy(n, omega) != fermi - bose) {
                return {false, "N=" + std::to_string(n) + " omega=" + std::to_string(omega)};
            }
        }
    }
    return {true, "N = 1..100, exact"};
}

Outcome shift_invariance()
{
    Worst w(1e-10);
    std::mt19937_64 rng(20240611);
    auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    for (int i = 0; i < 100; ++i) {
        OttoCycleSpec s;
        if (i % 2 == 0) {
            const double ah = u(0.05, 0.25);
            s = ring_cycle(ah, ah + u(0.04, 0.2), std::exp(u(std::log(0.05), std::log(2.0))), u(15.0, 100.0));
        } else {
            // Q_in > 0 needs beta_l / L1^2 > beta_h / L2^2
            const double l1 = u(1.0, 3.0), l2 = u(0.3, 0.9), bh = u(0.01, 0.2);
            s = cs_volume_cycle(l1, l2, u(0.0, 2.0), bh, bh * (l1 * l1) / (l2 * l2) * u(1.5, 10.0));
        }
        const auto base = run_cycle(s);
        if (base.regime != Regime::engine) {
            w.fail("not an engine at " + where(s));
            continue;
        }
        for (double c : {-37.5, 1e-3, 250.0}) {
            auto shifted = s;
            shifted.energy_offset = c;
            w.add(rel(run_cycle(shifted).efficiency, base.efficiency), where(s) + " offset=" + std::to_string(c));
        }
    }
    return w.outcome();
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

Outcome determinism()
{
    const auto root = std::filesystem::current_path() / "acceptance_determinism";
    std::filesystem::remove_all(root);
    std::filesystem::create_directories(root);
    {
        std::ofstream cfg(root / "sweep.cfg");
        cfg << "medium = cs-coupling\nalpha1 = 0\nlength = 1\nbeta_h = 0.05\nbeta_l = 0.1\n"
               "sweep = alpha2\ngrid = 0:2:41\nformat = csv\n";
    }
    std::string runs[2];
    for (int k = 0; k < 2; ++k) {
        const auto out = root / ("run" + std::to_string(k));
        const std::string cmd = std::string("\"") + ANYON_OTTO_CLI + "\" sweep --config \"" +
                                (root / "sweep.cfg").string() + "\" --out \"" + out.string() +
                                "\" --threads " + (k == 0 ? "1" : "4") + " > /dev/null";
        if (std::system(cmd.c_str()) != 0) {
            return {false, "sweep exited nonzero: " + cmd};
        }
        runs[k] = slurp(out / "sweep.csv");
    }
    if (runs[0].empty()) {
        return {false, "empty sweep.csv"};
    }
    if (runs[0] != runs[1]) {
        return {false, "sweep.csv differs between runs"};
    }
    return {true, std::to_string(runs[0].size()) + " identical bytes"};
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"variable-volume pair efficiency 1 - L2^2/L1^2", volume_efficiency},
        {"ring closed-form efficiency vs oracle", ring_closed_form},
        {"pair coupling closed-form efficiency vs oracle", coupling_closed_form},
        {"partition functions closed form vs direct sums", partition_functions},
        {"first law and stroke identities", strokes},
        {"spectral periodicity, reflection, boson limit, ln 2", spectral_properties},
        {"Pauli energy", pauli},
        {"efficiency shift invariance", shift_invariance},
        {"sweep determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %zu %s: %s (%.2f s)\n", o.passed ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    o.detail.c_str(), secs);
        failed += o.passed ? 0 : 1;
    }
    std::fflush(stdout);
    return failed == 0 ? 0 : 1;
}
