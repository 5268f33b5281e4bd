#pragma once

// Theta-function closed forms for the ring and two-anyon Otto engines, each
// returned next to an independent summation oracle.
//
// Weighted full- and half-lattice sums come from three moments of the theta
// series. With x = e^{2 lambda gamma}, q = e^{-lambda} and
// M_k = e^{-lambda gamma^2} sum n^k q^{n^2} x^n:
//
//   G        = sum e^{-lambda (n - gamma)^2}                  = M_0
//   dG/dgamma                                                 = 2 lambda (M_1 - gamma M_0)
//   dG/dlambda                                                = -(M_2 - 2 gamma M_1 + gamma^2 M_0)
//
// and, from (n - c)^2 = (n - gamma)^2 + 2 (gamma - c)(n - gamma) + (gamma - c)^2,
//
//   sum (n - c)^2 e^{-lambda (n - gamma)^2}
//       = -dG/dlambda + (gamma - c)/lambda dG/dgamma + (gamma - c)^2 G.
//
// Two-anyon levels in the coordinates m = n1 + n2, n = n2 - n1 >= 0 (same
// parity) are E = (pi^2 / L^2) (m^2 + (n - alpha)^2). Splitting by parity
// with m = 2 p1 (+1), n = 2 p2 (+1) factorizes every sum into a full-lattice
// factor in p1 and a half-lattice factor in p2 >= 0, both at lambda = 4 beta pi^2 / L^2:
//
//   even: p1 centred at 0,    p2 centred at alpha / 2
//   odd:  p1 centred at -1/2, p2 centred at (alpha - 1) / 2

#include "anyon_otto/errors.hpp"
#include "anyon_otto/otto.hpp"
#include "anyon_otto/special_functions.hpp"
#include "anyon_otto/spectra.hpp"
#include "anyon_otto/thermo.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

namespace anyon_otto::closed_form {

/// Which algebraic route a closed form takes. The two printed variants are
/// kept for comparison; only `rederived` is expected to match the oracles.
enum class FormulaVariant {
    rederived,
    paper_main_text,
    paper_appendix,
};

[[nodiscard]] inline std::string_view to_string(FormulaVariant v) noexcept
{
    switch (v) {
    case FormulaVariant::rederived:
        return "rederived";
    case FormulaVariant::paper_main_text:
        return "paper-main-text";
    case FormulaVariant::paper_appendix:
        return "paper-appendix";
    }
    return "?";
}

[[nodiscard]] inline std::optional<FormulaVariant> parse_variant(std::string_view s) noexcept
{
    if (s == "rederived") {
        return FormulaVariant::rederived;
    }
    if (s == "paper-main-text" || s == "paper_main_text") {
        return FormulaVariant::paper_main_text;
    }
    if (s == "paper-appendix" || s == "paper_appendix") {
        return FormulaVariant::paper_appendix;
    }
    return std::nullopt;
}

struct ClosedFormReport {
    double value = 0.0;
    double oracle_value = 0.0;
    double rel_residual = 0.0;
    FormulaVariant variant = FormulaVariant::rederived;
};

struct Options {
    special::SumAccuracy accuracy{};
    double tail_tol = 1e-15; // level enumeration for the oracles
    FormulaVariant variant = FormulaVariant::rederived;
};

inline constexpr double kTiny = 1e-300;

[[nodiscard]] inline double relative_residual(double value, double oracle) noexcept
{
    return std::fabs(value - oracle) / std::max(std::fabs(oracle), kTiny);
}

[[nodiscard]] inline ClosedFormReport make_report(double value, double oracle, FormulaVariant v) noexcept
{
    return {value, oracle, relative_residual(value, oracle), v};
}

// ---------------------------------------------------------------------------
// Lattice kernels

/// G and its analytic lambda- and gamma-derivatives, plus the raw moments.
struct LatticeKernel {
    double lambda = 0.0;
    double gamma = 0.0;
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;

    [[nodiscard]] double g() const noexcept { return m0; }
    [[nodiscard]] double d_gamma() const noexcept { return 2.0 * lambda * (m1 - gamma * m0); }
    [[nodiscard]] double d_lambda() const noexcept { return -(m2 - 2.0 * gamma * m1 + gamma * gamma * m0); }
};

/// Moments over Z (half_line = false) or n >= 0 (half_line = true).
[[nodiscard]] inline LatticeKernel lattice_kernel(double lambda, double gamma, bool half_line,
                                                  const special::SumAccuracy& acc)
{
    if (!(lambda > 0.0)) {
        throw DomainError("lattice_kernel: lambda must be positive");
    }
    // x = e^{2 lambda gamma}, q = e^{-lambda}, prefactor e^{-lambda gamma^2}, passed as logs
    auto moment = [&](int k) {
        return special::scaled_theta_moment(2.0 * lambda * gamma, -lambda, k, half_line, -lambda * gamma * gamma, acc);
    };
    return {lambda, gamma, moment(0), moment(1), moment(2)};
}

/// sum (n - c)^2 e^{-lambda (n - gamma)^2} over Z or n >= 0 from the theta
/// moments, by the chosen algebraic route.
[[nodiscard]] inline double weighted_lattice_sum(double lambda, double gamma, double c, bool half_line,
                                                 FormulaVariant variant, const special::SumAccuracy& acc)
{
    if (variant == FormulaVariant::rederived && !half_line) {
        // The full-lattice sum is invariant under (gamma, c) -> (gamma - k, c - k).
        const double k = std::round(gamma);
        gamma -= k;
        c -= k;
    }
    const LatticeKernel K = lattice_kernel(lambda, gamma, half_line, acc);
    const double pre = std::exp(-lambda * gamma * gamma);
    switch (variant) {
    case FormulaVariant::rederived: {
        const double shift = gamma - c;
        return -K.d_lambda() + shift / lambda * K.d_gamma() + shift * shift * K.g();
    }
    case FormulaVariant::paper_main_text: {
        // c^2 G + (c gamma / lambda) e^{-lambda gamma^2} d(theta)/dgamma - e^{-lambda gamma^2} d(theta)/dlambda,
        // derivatives acting on the theta series alone.
        const double theta_d_gamma = 2.0 * lambda * K.m1;
        const double theta_d_lambda = 2.0 * gamma * K.m1 - K.m2;
        return c * c * K.g() + c * gamma / lambda * theta_d_gamma - theta_d_lambda;
    }
    case FormulaVariant::paper_appendix:
        // c^2 G + e^{-lambda gamma^2} ((gamma - c) / lambda) dG/dgamma - e^{-lambda gamma^2} dG/dlambda
        return c * c * K.g() + pre * (gamma - c) / lambda * K.d_gamma() - pre * K.d_lambda();
    }
    throw DomainError("weighted_lattice_sum: unknown variant");
}

[[nodiscard]] inline double plain_lattice_sum(double lambda, double gamma, bool half_line,
                                              const special::SumAccuracy& acc)
{
    if (!half_line) {
        gamma -= std::round(gamma);
    }
    return special::scaled_theta_moment(2.0 * lambda * gamma, -lambda, 0, half_line, -lambda * gamma * gamma, acc);
}

// ---------------------------------------------------------------------------
// Ring medium

namespace detail {

[[nodiscard]] inline double ring_upsilon_value(double alpha_k, double eps0_k, double alpha_j, double eps0_j,
                                               double beta_j, const Options& o)
{
    return eps0_k * weighted_lattice_sum(beta_j * eps0_j, alpha_j, alpha_k, false, o.variant, o.accuracy);
}

[[nodiscard]] inline double ring_partition_value(double alpha, double beta, double eps0, const Options& o)
{
    const double lambda = beta * eps0;
    if (o.variant == FormulaVariant::rederived) {
        return plain_lattice_sum(lambda, alpha, false, o.accuracy);
    }
    // Printed form: e^{-lambda alpha^2} theta3(lambda alpha, e^{-lambda}).
    return std::exp(-lambda * alpha * alpha) * special::theta3(lambda * alpha, std::exp(-lambda), o.accuracy);
}

inline void check_positive(double v, const char* what)
{
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError(std::string(what) + " must be positive and finite");
    }
}

} // namespace detail

/// Upsilon(k, j) = sum_n E^k_n exp(-beta_j E^j_n) for E^i_n = eps0_i (n - alpha_i)^2.
[[nodiscard]] inline ClosedFormReport upsilon(double alpha_k, double eps0_k, double alpha_j, double eps0_j,
                                              double beta_j, const Options& o = {})
{
    detail::check_positive(beta_j, "upsilon: beta_j");
    detail::check_positive(eps0_k, "upsilon: eps0");
    detail::check_positive(eps0_j, "upsilon: eps0");
    const double value = detail::ring_upsilon_value(alpha_k, eps0_k, alpha_j, eps0_j, beta_j, o);
    const double oracle = eps0_k * special::gauss_sum_full(beta_j * eps0_j, alpha_j, alpha_k, 2, o.accuracy);
    return make_report(value, oracle, o.variant);
}

[[nodiscard]] inline ClosedFormReport upsilon(double alpha_k, double alpha_j, double beta_j, double eps0,
                                              const Options& o = {})
{
    return upsilon(alpha_k, eps0, alpha_j, eps0, beta_j, o);
}

/// Z_j = e^{-lambda alpha^2} theta3(e^{2 lambda alpha}, e^{-lambda}), lambda = beta eps0.
[[nodiscard]] inline ClosedFormReport ring_partition_closed(double alpha, double beta, double eps0,
                                                            const Options& o = {})
{
    detail::check_positive(beta, "ring_partition_closed: beta");
    detail::check_positive(eps0, "ring_partition_closed: eps0");
    const double value = detail::ring_partition_value(alpha, beta, eps0, o);
    const double oracle = partition_function(RingAnyonSpectrum{eps0, alpha}, beta, o.tail_tol);
    return make_report(value, oracle, o.variant);
}

namespace detail {

// 1 - (<E_cold>_B - <E_cold>_A) / (<E_hot>_B - <E_hot>_A)
[[nodiscard]] inline double otto_ratio(double cold_at_b, double cold_at_a, double hot_at_b, double hot_at_a)
{
    const double num = cold_at_b - cold_at_a;
    const double den = hot_at_b - hot_at_a;
    const double scale = std::fabs(hot_at_b) + std::fabs(hot_at_a);
    if (!(std::fabs(den) > kDegenerateHeat * scale)) {
        throw DegenerateCycle("closed-form efficiency: vanishing heat input");
    }
    return 1.0 - num / den;
}

[[nodiscard]] inline double ring_efficiency_value(const OttoCycleSpec& s, const Options& o)
{
    const double ah = s.control_hot, al = s.control_cold;
    const double eh = s.eps0_hot, el = s.eps0_cold;
    const double z_h = ring_partition_value(ah, s.beta_h, eh, o);
    const double z_l = ring_partition_value(al, s.beta_l, el, o);
    const double ups_lh = ring_upsilon_value(al, el, ah, eh, s.beta_h, o);
    const double ups_ll = ring_upsilon_value(al, el, al, el, s.beta_l, o);
    const double ups_hh = ring_upsilon_value(ah, eh, ah, eh, s.beta_h, o);
    const double ups_hl = ring_upsilon_value(ah, eh, al, el, s.beta_l, o);
    return otto_ratio(ups_lh / z_h, ups_ll / z_l, ups_hh / z_h, ups_hl / z_l);
}

} // namespace detail

/// Ring-engine efficiency 1 - (Y(l,h)/Z_h - Y(l,l)/Z_l) / (Y(h,h)/Z_h - Y(h,l)/Z_l);
/// the oracle is run_cycle on the same parameters.
[[nodiscard]] inline ClosedFormReport ring_efficiency_closed(const OttoCycleSpec& spec, const Options& o = {})
{
    if (spec.medium != Medium::ring) {
        throw DomainError("ring_efficiency_closed: spec medium must be ring");
    }
    validate(spec);
    const double value = detail::ring_efficiency_value(spec, o);
    OttoCycleSpec oracle_spec = spec;
    oracle_spec.tail_tol = o.tail_tol;
    const double oracle = run_cycle(oracle_spec).efficiency;
    return make_report(value, oracle, o.variant);
}

[[nodiscard]] inline ClosedFormReport ring_efficiency_closed(double alpha_h, double alpha_l, double beta_h,
                                                             double beta_l, double eps0, const Options& o = {})
{
    return ring_efficiency_closed(ring_cycle(alpha_h, alpha_l, beta_h, beta_l, eps0), o);
}

// ---------------------------------------------------------------------------
// Two-anyon medium

struct ParitySectors {
    double even = 0.0; // n1 + n2 even
    double odd = 0.0;  // n1 + n2 odd
    [[nodiscard]] double total() const noexcept { return even + odd; }
};

namespace detail {

[[nodiscard]] inline double pair_lambda(double beta, double length)
{
    return 4.0 * beta * std::numbers::pi * std::numbers::pi / (length * length);
}

inline void check_pair_args(double alpha, double beta, double length, const char* what)
{
    check_positive(beta, what);
    check_positive(length, what);
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw DomainError(std::string(what) + ": alpha must be finite and >= 0");
    }
}

[[nodiscard]] inline ParitySectors cs_partition_sectors_value(double alpha, double beta, double length,
                                                              const Options& o)
{
    const double lam = pair_lambda(beta, length);
    const auto& acc = o.accuracy;
    if (o.variant == FormulaVariant::rederived) {
        return {plain_lattice_sum(lam, 0.0, false, acc) * plain_lattice_sum(lam, 0.5 * alpha, true, acc),
                plain_lattice_sum(lam, -0.5, false, acc) * plain_lattice_sum(lam, 0.5 * (alpha - 1.0), true, acc)};
    }
    // Printed two-term form with the (m + alpha)^2 attachment.
    const double mu = lam / 4.0;
    const double q = std::exp(-lam);
    const double even = std::exp(-mu * alpha * alpha) * special::theta3(1.0, q, acc) *
                        special::partial_theta(std::exp(-lam * alpha), q, acc);
    const double odd = std::exp(-mu * ((alpha + 1.0) * (alpha + 1.0) + 1.0)) * special::theta3(q, q, acc) *
                       special::partial_theta(std::exp(-lam * (alpha + 1.0)), q, acc);
    return {even, odd};
}

[[nodiscard]] inline double cs_x_value(double alpha_weight, double alpha_boltz, double beta, double length,
                                       const Options& o)
{
    const double lam = pair_lambda(beta, length);
    const double unit = std::numbers::pi * std::numbers::pi / (length * length);
    const auto& acc = o.accuracy;
    const auto v = o.variant;
    const double a = alpha_boltz;
    const double w = alpha_weight;
    if (v == FormulaVariant::rederived) {
        // weight (2 p1)^2 + (2 p2 - w)^2 = 4 [p1^2 + (p2 - w/2)^2], and the odd analogue
        const double even = weighted_lattice_sum(lam, 0.0, 0.0, false, v, acc) *
                                plain_lattice_sum(lam, 0.5 * a, true, acc) +
                            plain_lattice_sum(lam, 0.0, false, acc) *
                                weighted_lattice_sum(lam, 0.5 * a, 0.5 * w, true, v, acc);
        const double odd = weighted_lattice_sum(lam, -0.5, -0.5, false, v, acc) *
                               plain_lattice_sum(lam, 0.5 * (a - 1.0), true, acc) +
                           plain_lattice_sum(lam, -0.5, false, acc) *
                               weighted_lattice_sum(lam, 0.5 * (a - 1.0), 0.5 * (w - 1.0), true, v, acc);
        return 4.0 * unit * (even + odd);
    }
    // Printed product form, first argument the Boltzmann coupling, with the
    // lambda arguments taken by magnitude (the printed negative values diverge).
    const double even = 4.0 * weighted_lattice_sum(unit * beta, 0.0, 0.0, false, v, acc) *
                        weighted_lattice_sum(lam, 0.5 * a, 0.5 * w, true, v, acc);
    const double odd = 4.0 * weighted_lattice_sum(lam, -0.5, -0.5, false, v, acc) *
                       weighted_lattice_sum(lam, 0.5 * (a + 1.0), 0.5 * (w + 1.0), true, v, acc);
    return 4.0 * unit * even + unit * odd;
}

} // namespace detail

/// Even and odd (n1 + n2) parts of the two-anyon partition function.
[[nodiscard]] inline ParitySectors cs_partition_sectors(double alpha, double beta, double length,
                                                        const Options& o = {})
{
    detail::check_pair_args(alpha, beta, length, "cs_partition_sectors");
    return detail::cs_partition_sectors_value(alpha, beta, length, o);
}

/// Z(alpha, beta) = sum_{n1 <= n2} exp(-beta E_{n1,n2}) as a sum of two
/// theta x partial-theta products; the oracle is the direct level sum.
[[nodiscard]] inline ClosedFormReport cs_partition_closed(double alpha, double beta, double length,
                                                          const Options& o = {})
{
    detail::check_pair_args(alpha, beta, length, "cs_partition_closed");
    const double value = detail::cs_partition_sectors_value(alpha, beta, length, o).total();
    const double oracle = partition_function(CSPairSpectrum{length, alpha}, beta, o.tail_tol);
    return make_report(value, oracle, o.variant);
}

/// X(alpha_weight, alpha_boltz, beta) = sum_{n1 <= n2} E(alpha_weight) exp(-beta E(alpha_boltz)).
/// The oracle is the direct double sum over the enumerated levels.
[[nodiscard]] inline ClosedFormReport cs_X(double alpha_weight, double alpha_boltz, double beta, double length,
                                           const Options& o = {})
{
    detail::check_pair_args(alpha_boltz, beta, length, "cs_X");
    if (!(alpha_weight >= 0.0) || !std::isfinite(alpha_weight)) {
        throw DomainError("cs_X: alpha_weight must be finite and >= 0");
    }
    const double value = detail::cs_x_value(alpha_weight, alpha_boltz, beta, length, o);

    const CSPairSpectrum boltz{length, alpha_boltz};
    const CSPairSpectrum weight{length, alpha_weight};
    const LevelSet set = enumerate_levels(boltz, beta, o.tail_tol);
    double oracle = 0.0;
    for (std::size_t i = set.size(); i-- > 0;) {
        oracle += energy(weight, set.labels[i]) * std::exp(-beta * set.energies[i]);
    }
    return make_report(value, oracle, o.variant);
}

namespace detail {

// index 1 = cold control, index 2 = hot control
[[nodiscard]] inline double cs_efficiency_value(const OttoCycleSpec& s, const Options& o)
{
    const double a1 = s.control_cold;
    const double a2 = s.control_hot;
    const double L = s.length;
    const double z_b = cs_partition_sectors_value(a2, s.beta_h, L, o).total();
    const double z_a = cs_partition_sectors_value(a1, s.beta_l, L, o).total();
    const double cold_at_b = cs_x_value(a1, a2, s.beta_h, L, o) / z_b;
    const double cold_at_a = cs_x_value(a1, a1, s.beta_l, L, o) / z_a;
    const double hot_at_b = cs_x_value(a2, a2, s.beta_h, L, o) / z_b;
    const double hot_at_a = cs_x_value(a2, a1, s.beta_l, L, o) / z_a;
    return otto_ratio(cold_at_b, cold_at_a, hot_at_b, hot_at_a);
}

} // namespace detail

/// Variable-coupling two-anyon engine at fixed L, built from X and Z.
/// alpha1 is the cold-isochore coupling, alpha2 the hot-isochore coupling.
[[nodiscard]] inline ClosedFormReport cs_efficiency_closed(const OttoCycleSpec& spec, const Options& o = {})
{
    if (spec.medium != Medium::cs_coupling) {
        throw DomainError("cs_efficiency_closed: spec medium must be cs-coupling");
    }
    validate(spec);
    const double value = detail::cs_efficiency_value(spec, o);
    OttoCycleSpec oracle_spec = spec;
    oracle_spec.tail_tol = o.tail_tol;
    const double oracle = run_cycle(oracle_spec).efficiency;
    return make_report(value, oracle, o.variant);
}

[[nodiscard]] inline ClosedFormReport cs_efficiency_closed(double alpha1, double alpha2, double beta_h,
                                                           double beta_l, double length, const Options& o = {})
{
    return cs_efficiency_closed(cs_coupling_cycle(alpha1, alpha2, length, beta_h, beta_l), o);
}

/// Closed-form efficiency of any cycle spec, without running the oracle.
[[nodiscard]] inline double closed_efficiency(const OttoCycleSpec& spec, const Options& o = {})
{
    validate(spec);
    switch (spec.medium) {
    case Medium::ring:
        return detail::ring_efficiency_value(spec, o);
    case Medium::cs_volume:
        return efficiency_cs_volume(spec.control_cold, spec.control_hot);
    case Medium::cs_coupling:
        return detail::cs_efficiency_value(spec, o);
    }
    throw DomainError("closed_efficiency: unknown medium");
}

/// Sweep hook that fills CycleReport::oracle_residual from the closed form.
[[nodiscard]] inline RowHook residual_hook(Options o = {})
{
    return [o](const OttoCycleSpec& spec, CycleReport& report) {
        report.oracle_residual = relative_residual(closed_efficiency(spec, o), report.efficiency);
    };
}

} // namespace anyon_otto::closed_form
