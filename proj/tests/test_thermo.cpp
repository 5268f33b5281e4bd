#include "anyon_otto/thermo.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

using namespace anyon_otto;
using Catch::Matchers::WithinRel;
using Catch::Matchers::WithinAbs;

TEST_CASE("ring Gibbs state reference values", "[thermo][gibbs]")
{
    const auto g = gibbs(RingAnyonSpectrum{1.0, 0.0}, 1.0, 1e-15);
    CHECK_THAT(std::exp(g.log_z), WithinRel(1.772637204826652153, 1e-14));
    CHECK_THAT(g.populations.front(), WithinRel(0.56413122621884207461, 1e-14));
    CHECK_THAT(g.entropy, WithinRel(1.0714475147797211754, 1e-13));
    CHECK_THAT(g.internal_energy, WithinRel(0.49897913083282046176, 1e-13));
    CHECK_THAT(partition_function(RingAnyonSpectrum{1.0, 0.0}, 1.0, 1e-15), WithinRel(1.772637204826652153, 1e-14));
}

TEST_CASE("low-temperature limits", "[thermo][gibbs]")
{
    const auto pure = gibbs(RingAnyonSpectrum{1.0, 0.0}, 1e3, 1e-15);
    CHECK_THAT(pure.populations.front(), WithinRel(1.0, 1e-15));
    CHECK_THAT(pure.entropy, WithinAbs(0.0, 1e-12));

    const auto pair = gibbs(RingAnyonSpectrum{1.0, 0.5}, 1e3, 1e-15);
    CHECK_THAT(pair.populations[0], WithinRel(0.5, 1e-12));
    CHECK_THAT(pair.populations[1], WithinRel(0.5, 1e-12));
    CHECK_THAT(pair.entropy, WithinRel(std::log(2.0), 1e-12));
}

TEST_CASE("two-anyon partition function", "[thermo][cs]")
{
    CHECK_THAT(partition_function(CSPairSpectrum{1.0, 0.0}, 1.0, 1e-15), WithinRel(1.0000000053505760036, 1e-15));
    CHECK_THAT(partition_function(CSPairSpectrum{1.0, 0.0}, 0.05, 1e-15),
               WithinRel(2.2311219686780160797, 1e-13));
    CHECK_THAT(partition_function(CSPairSpectrum{1.0, 1.0}, 0.05, 1e-15),
               WithinRel(2.9941058139272484418, 1e-13));
    CHECK_THAT(partition_function(CSPairSpectrum{1.0, 0.35}, 0.05, 1e-15),
               WithinRel(2.5882442758891744768, 1e-13));
}

TEST_CASE("partition function decreases when beta doubles", "[thermo][property]")
{
    for (double beta = 0.05; beta < 20.0; beta *= 1.7) {
        for (const Spectrum& s : {Spectrum{RingAnyonSpectrum{1.3, 0.2}}, Spectrum{CSPairSpectrum{1.1, 0.6}}}) {
            REQUIRE(partition_function(s, 2.0 * beta, 1e-15) < partition_function(s, beta, 1e-15));
        }
    }
}

TEST_CASE("entropy of simple distributions", "[thermo][entropy]")
{
    CHECK(entropy(std::vector<double>{1.0, 0.0, 0.0}) == 0.0);
    for (int d : {2, 3, 7, 100}) {
        const std::vector<double> p(static_cast<std::size_t>(d), 1.0 / d);
        CHECK_THAT(entropy(p), WithinRel(std::log(static_cast<double>(d)), 1e-13));
    }
}

TEST_CASE("ensembles are normalized, consistent and shift invariant", "[thermo][property]")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ub(std::log(0.05), std::log(50.0));
    std::uniform_real_distribution<double> ua(0.0, 1.5);
    std::uniform_real_distribution<double> uc(-50.0, 50.0);
    for (int i = 0; i < 200; ++i) {
        const double beta = std::exp(ub(rng));
        const Spectrum s = i % 2 ? Spectrum{RingAnyonSpectrum{0.7, ua(rng)}} : Spectrum{CSPairSpectrum{1.4, ua(rng)}};
        const auto g = gibbs(s, beta, 1e-15);
        REQUIRE_THAT(std::accumulate(g.populations.begin(), g.populations.end(), 0.0), WithinAbs(1.0, 1e-12));
        REQUIRE_THAT(mean_energy(g.levels.energies, g.populations),
                     WithinRel(g.internal_energy, 1e-12));

        LevelSet moved = g.levels;
        const double c = uc(rng);
        for (auto& e : moved.energies) {
            e += c;
        }
        const auto h = gibbs_on(moved, beta);
        REQUIRE(h.populations.size() == g.populations.size());
        for (std::size_t k = 0; k < h.populations.size(); ++k) {
            // exact up to the rounding of E + c inside the exponent
            const double slack = 1e-13 + 4e-16 * beta * (std::fabs(c) + g.levels.energies[k]);
            REQUIRE_THAT(h.populations[k], WithinRel(g.populations[k], slack) || WithinAbs(0.0, 1e-300));
        }
        REQUIRE_THAT(h.entropy, WithinRel(g.entropy, 1e-12));
        REQUIRE_THAT(h.internal_energy - c, WithinAbs(g.internal_energy, 1e-12 * (1.0 + std::fabs(c))));
    }
}

TEST_CASE("Gibbs state maximizes entropy at fixed mean energy", "[thermo][property]")
{
    const auto g = gibbs(RingAnyonSpectrum{1.0, 0.2}, 0.8, 1e-15);
    const auto& e = g.levels.energies;
    const std::size_t n = e.size();
    const double u = g.internal_energy;
    std::mt19937_64 rng(17);
    std::normal_distribution<double> noise(0.0, 1.0);
    int tried = 0;
    while (tried < 1000) {
        // Perturb the Gibbs vector in the plane orthogonal to (1, E), then rescale
        // so it stays non-negative.
        std::vector<double> d(n);
        for (auto& v : d) {
            v = noise(rng);
        }
        double s1 = 0, se = 0, see = 0, sd = 0, sde = 0;
        for (std::size_t k = 0; k < n; ++k) {
            s1 += 1.0;
            se += e[k];
            see += e[k] * e[k];
            sd += d[k];
            sde += d[k] * e[k];
        }
        const double det = s1 * see - se * se;
        const double a = (sd * see - sde * se) / det;
        const double b = (sde * s1 - sd * se) / det;
        double t = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            d[k] -= a + b * e[k];
            if (d[k] < 0.0) {
                t = std::min(t, g.populations[k] / -d[k]);
            }
        }
        t *= std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        std::vector<double> p(n);
        for (std::size_t k = 0; k < n; ++k) {
            p[k] = g.populations[k] + t * d[k];
        }
        REQUIRE_THAT(mean_energy(e, p), WithinAbs(u, 1e-9));
        REQUIRE(entropy(p) <= g.entropy + 1e-12);
        ++tried;
    }
}

TEST_CASE("heat_work_split on isochores and adiabats", "[thermo][heatwork]")
{
    const std::vector<double> e0{0.0, 1.0, 4.0};
    const std::vector<double> e1{0.0, 1.5, 5.0};
    const std::vector<double> p0{0.7, 0.2, 0.1};
    const std::vector<double> p1{0.5, 0.3, 0.2};

    const PathStep iso{e0, e0, p0, p1};
    const auto hw_iso = heat_work_split(std::span{&iso, 1});
    CHECK(hw_iso.work == 0.0);
    CHECK_THAT(hw_iso.heat, WithinRel(mean_energy(e0, p1) - mean_energy(e0, p0), 1e-15));

    const PathStep adia{e0, e1, p0, p0};
    const auto hw_ad = heat_work_split(std::span{&adia, 1});
    CHECK(hw_ad.heat == 0.0);
    CHECK_THAT(hw_ad.work, WithinRel(mean_energy(e1, p0) - mean_energy(e0, p0), 1e-15));

    const std::vector<PathStep> two{{e0, e1, p0, p1}, {e1, e0, p1, p0}};
    const auto hw_two = heat_work_split(two);
    CHECK_THAT(hw_two.heat + hw_two.work, WithinAbs(0.0, 1e-15));

    const std::vector<PathStep> bad_len{{e0, e1, p0, std::vector<double>{1.0}}};
    CHECK_THROWS_AS(heat_work_split(bad_len), ShapeError);
    const std::vector<PathStep> bad_set{{e0, e0, p0, p0}, {{1.0}, {1.0}, {1.0}, {1.0}}};
    CHECK_THROWS_AS(heat_work_split(bad_set), ShapeError);
    CHECK_THROWS_AS(mean_energy(e0, std::vector<double>{1.0}), ShapeError);
}

TEST_CASE("discretized ring isochore heat equals the internal-energy change", "[thermo][heatwork]")
{
    const RingAnyonSpectrum s{1.0, 0.0};
    const LevelSet levels = enumerate_levels(s, 1.0, 1e-15); // the hotter end needs the wider set
    constexpr int steps = 1000;
    std::vector<PathStep> path;
    std::vector<double> prev = boltzmann_populations(levels.energies, 2.0);
    for (int k = 1; k <= steps; ++k) {
        const double t = 0.5 + 0.5 * k / steps;
        std::vector<double> next = boltzmann_populations(levels.energies, 1.0 / t);
        path.push_back({levels.energies, levels.energies, prev, next});
        prev = std::move(next);
    }
    const auto hw = heat_work_split(path);
    const double du = gibbs(s, 1.0, 1e-15).internal_energy - gibbs(s, 2.0, 1e-15).internal_energy;
    CHECK(hw.work == 0.0);
    CHECK_THAT(hw.heat, WithinAbs(du, 1e-8));

    // first law on a two-segment path (isochore, then adiabat)
    const RingAnyonSpectrum s2{1.0, 0.3};
    const auto e_b = energies(Spectrum{s2}, levels.labels);
    const std::vector<PathStep> bent{{levels.energies, levels.energies, path.front().populations_before, prev},
                                     {levels.energies, e_b, prev, prev}};
    const auto hw2 = heat_work_split(bent);
    const double e_final = mean_energy(e_b, prev);
    const double e_init = mean_energy(levels.energies, path.front().populations_before);
    CHECK_THAT(hw2.heat + hw2.work, WithinRel(e_final - e_init, 1e-10));
}

TEST_CASE("invalid temperatures", "[thermo][errors]")
{
    CHECK_THROWS_AS(gibbs(RingAnyonSpectrum{}, -1.0, 1e-15), DomainError);
    CHECK_THROWS_AS(boltzmann_populations(std::vector<double>{0.0}, 0.0), DomainError);
    CHECK_THROWS_AS(boltzmann_populations(std::vector<double>{}, 1.0), ShapeError);
}
