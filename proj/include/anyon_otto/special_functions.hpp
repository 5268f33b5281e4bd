#pragma once

// Lattice Gaussian sums with certified truncation.
//
// theta3(x, q)        = sum_{n in Z}  q^{n^2} x^n
// partial_theta(x, q) = sum_{n >= 0}  q^{n^2} x^n
// gauss_sum_full      = sum_{n in Z}  (n - c)^w exp(-lambda (n - gamma)^2)
// gauss_sum_half      = sum_{n >= 0}  (n - c)^w exp(-lambda (n - gamma)^2)
//
// Every sum starts at its peak index and grows outward one ring at a time.
// It stops once the last ring is below rel_tol times the running magnitude
// AND the analytic tail bound on everything not yet summed is below the same
// threshold. The tail bound uses f(d) + int_d^inf f(u) du for the weighted
// Gaussian envelope f, which is valid once f is nonincreasing on [d, inf).

#include "anyon_otto/errors.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>

namespace anyon_otto::special {

struct SumAccuracy {
    double rel_tol = 1e-12;
    std::size_t max_terms = 1'000'000;

    void validate() const
    {
        if (!(rel_tol > 0.0 && rel_tol < 1.0)) {
            throw DomainError("SumAccuracy: rel_tol must lie in (0, 1)");
        }
        if (max_terms < 8) {
            throw DomainError("SumAccuracy: max_terms must be at least 8");
        }
    }
};

struct SeriesResult {
    double value = 0.0;
    // Certified upper bound on the magnitude of all omitted terms.
    double tail_bound = 0.0;
    // Sum of |term| over the summed terms; the stopping rule is relative to it.
    double magnitude = 0.0;
    std::size_t terms = 0;
    // lambda < kSlowLambda: term cap was raised, convergence is slow.
    bool slow_regime = false;
};

inline constexpr double kSlowLambda = 0.05;
inline constexpr std::size_t kSlowTermsFactor = 16;

namespace detail {

// exp() argument above which a double overflows.
inline constexpr double kMaxExp = 709.0;

class CompensatedSum {
public:
    void add(double v) noexcept
    {
        const double t = sum_ + v;
        if (std::fabs(sum_) >= std::fabs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Upper bound on sum_{j>=0} (u + delta)^w exp(log_scale - lambda u^2) at
// u = d + j, with delta = abs_delta >= 0. Returns +inf while the envelope is
// not yet monotone at d.
[[nodiscard]] inline double gaussian_tail(double lambda, double d, double abs_delta, int weight,
                                          double log_scale) noexcept
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (!(d > 0.0)) {
        return inf;
    }
    if (weight >= 1 && d * d * lambda < 1.0) {
        return inf;
    }
    const double exponent = log_scale - lambda * d * d;
    if (exponent > kMaxExp) {
        return inf;
    }
    const double g = std::exp(exponent);
    const double i0 = g / (2.0 * lambda * d);                          // int u^0 e^{-lambda u^2}
    const double i1 = g / (2.0 * lambda);                              // int u^1 e^{-lambda u^2}
    const double i2 = g * (d / (2.0 * lambda) + 1.0 / (4.0 * lambda * lambda * d));
    switch (weight) {
    case 0:
        return g + i0;
    case 1:
        return (d + abs_delta) * g + i1 + abs_delta * i0;
    default:
        // (u + delta)^2 <= 2 u^2 + 2 delta^2
        return 2.0 * (d * d * g + i2) + 2.0 * abs_delta * abs_delta * (g + i0);
    }
}

// Sums term(n) outward from `center`. With half_line the index never drops
// below zero. tail(side, n) bounds the omitted terms beyond index n on the
// given side (+1 right, -1 left), n itself included.
template <class Term, class Tail>
[[nodiscard]] SeriesResult sum_outward(std::int64_t center, bool half_line, Term&& term, Tail&& tail,
                                       const SumAccuracy& acc, bool slow, const char* what)
{
    if (half_line && center < 0) {
        center = 0;
    }
    const std::size_t cap = slow ? acc.max_terms * kSlowTermsFactor : acc.max_terms;

    CompensatedSum total;
    double magnitude = 0.0;
    auto add = [&](std::int64_t n) {
        const double t = term(n);
        total.add(t);
        magnitude += std::fabs(t);
        return std::fabs(t);
    };

    std::int64_t lo = center;
    std::int64_t hi = center;
    std::size_t terms = 1;
    double ring = add(center);
    double tail_bound = 0.0;

    for (;;) {
        const bool left_closed = half_line && lo == 0;
        tail_bound = tail(+1, hi + 1) + (left_closed ? 0.0 : tail(-1, lo - 1));
        const double threshold = acc.rel_tol * magnitude;
        if (tail_bound <= threshold && ring <= threshold) {
            break;
        }
        if (magnitude == 0.0 && tail_bound == 0.0) {
            break;
        }
        if (terms >= cap) {
            throw NoConvergence(std::string(what) + ": term cap reached before tolerance (" +
                                std::to_string(cap) + " terms)");
        }
        ++hi;
        ring = add(hi);
        ++terms;
        if (!left_closed) {
            --lo;
            ring += add(lo);
            ++terms;
        }
    }

    SeriesResult r;
    r.value = total.value();
    r.tail_bound = tail_bound;
    r.magnitude = magnitude;
    r.terms = terms;
    r.slow_regime = slow;
    return r;
}

inline void check_theta_args(double x, double q, const char* what)
{
    if (!(q > 0.0 && q < 1.0)) {
        throw DomainError(std::string(what) + ": q must lie in (0, 1)");
    }
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError(std::string(what) + ": x must be positive and finite");
    }
}

inline void check_gauss_args(double lambda, double gamma, double c, int weight, const char* what)
{
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw DomainError(std::string(what) + ": lambda must be positive and finite");
    }
    if (!std::isfinite(gamma) || !std::isfinite(c)) {
        throw DomainError(std::string(what) + ": gamma and c must be finite");
    }
    if (weight < 0 || weight > 2) {
        throw DomainError(std::string(what) + ": weight must be 0, 1 or 2");
    }
}

inline std::int64_t peak_index(double gamma, const char* what)
{
    if (std::fabs(gamma) > 1e15) {
        throw DomainError(std::string(what) + ": peak index out of range");
    }
    return static_cast<std::int64_t>(std::llround(gamma));
}

inline double ipow(double base, int k) noexcept
{
    double r = 1.0;
    for (int i = 0; i < k; ++i) {
        r *= base;
    }
    return r;
}

// e^{ln_pre} sum n^k q^{n^2} x^n over Z or over n >= 0, with x and q given
// by their logarithms so that extreme q or x never underflow or overflow.
[[nodiscard]] inline SeriesResult theta_moment_series_ln(double ln_x, double ln_q, int k, bool half_line,
                                                         double ln_pre, const SumAccuracy& acc, const char* what)
{
    acc.validate();
    if (!(ln_q < 0.0) || !std::isfinite(ln_q)) {
        throw DomainError(std::string(what) + ": q must lie in (0, 1)");
    }
    if (!std::isfinite(ln_x) || !std::isfinite(ln_pre)) {
        throw DomainError(std::string(what) + ": x must be positive and finite");
    }
    const double lambda = -ln_q;
    const double gamma = ln_x / (2.0 * lambda);
    const std::int64_t center = peak_index(gamma, what);
    const double log_scale = lambda * gamma * gamma + ln_pre;

    const auto peak = static_cast<double>(half_line && center < 0 ? 0 : center);
    if (peak * peak * ln_q + peak * ln_x + ln_pre > kMaxExp) {
        throw DomainError(std::string(what) + ": peak term overflows double precision");
    }

    auto term = [=](std::int64_t n) {
        const auto nd = static_cast<double>(n);
        return ipow(nd, k) * std::exp(nd * nd * ln_q + nd * ln_x + ln_pre);
    };
    auto tail = [=](int side, std::int64_t n) {
        const double d = side > 0 ? static_cast<double>(n) - gamma : gamma - static_cast<double>(n);
        return gaussian_tail(lambda, d, std::fabs(gamma), k, log_scale);
    };
    return sum_outward(center, half_line, term, tail, acc, lambda < kSlowLambda, what);
}

[[nodiscard]] inline SeriesResult theta_moment_series(double x, double q, int k, bool half_line,
                                                      const SumAccuracy& acc, const char* what)
{
    check_theta_args(x, q, what);
    return theta_moment_series_ln(std::log(x), std::log(q), k, half_line, 0.0, acc, what);
}

[[nodiscard]] inline SeriesResult gauss_series(double lambda, double gamma, double c, int weight, bool half_line,
                                               const SumAccuracy& acc, const char* what)
{
    acc.validate();
    check_gauss_args(lambda, gamma, c, weight, what);
    const std::int64_t center = peak_index(gamma, what);
    auto term = [=](std::int64_t n) {
        const auto nd = static_cast<double>(n);
        const double u = nd - gamma;
        return ipow(nd - c, weight) * std::exp(-lambda * u * u);
    };
    const double abs_delta = std::fabs(gamma - c);
    auto tail = [=](int side, std::int64_t n) {
        const double d = side > 0 ? static_cast<double>(n) - gamma : gamma - static_cast<double>(n);
        return gaussian_tail(lambda, d, abs_delta, weight, 0.0);
    };
    return sum_outward(center, half_line, term, tail, acc, lambda < kSlowLambda, what);
}

} // namespace detail

/// Jacobi theta function sum_{n in Z} q^{n^2} x^n for x > 0, 0 < q < 1.
[[nodiscard]] inline SeriesResult theta3_series(double x, double q, const SumAccuracy& acc = {})
{
    return detail::theta_moment_series(x, q, 0, false, acc, "theta3");
}

[[nodiscard]] inline double theta3(double x, double q, const SumAccuracy& acc = {})
{
    return theta3_series(x, q, acc).value;
}

/// Partial theta function sum_{n >= 0} q^{n^2} x^n.
[[nodiscard]] inline SeriesResult partial_theta_series(double x, double q, const SumAccuracy& acc = {})
{
    return detail::theta_moment_series(x, q, 0, true, acc, "partial_theta");
}

[[nodiscard]] inline double partial_theta(double x, double q, const SumAccuracy& acc = {})
{
    return partial_theta_series(x, q, acc).value;
}

/// sum_{n in Z} n^k q^{n^2} x^n, k in {0, 1, 2}. These are the term-wise
/// x- and q-derivatives of theta3 (x d/dx and q d/dq pull down n and n^2).
[[nodiscard]] inline double theta3_moment(double x, double q, int k, const SumAccuracy& acc = {})
{
    if (k < 0 || k > 2) {
        throw DomainError("theta3_moment: k must be 0, 1 or 2");
    }
    return detail::theta_moment_series(x, q, k, false, acc, "theta3_moment").value;
}

/// One-sided analogue of theta3_moment.
[[nodiscard]] inline double partial_theta_moment(double x, double q, int k, const SumAccuracy& acc = {})
{
    if (k < 0 || k > 2) {
        throw DomainError("partial_theta_moment: k must be 0, 1 or 2");
    }
    return detail::theta_moment_series(x, q, k, true, acc, "partial_theta_moment").value;
}

/// e^{ln_pre} sum n^k q^{n^2} x^n over Z (half_line = false) or n >= 0, with
/// ln_x = log x and ln_q = log q < 0. Same series as theta3_moment and
/// partial_theta_moment, for arguments whose exponentials leave double range.
[[nodiscard]] inline double scaled_theta_moment(double ln_x, double ln_q, int k, bool half_line, double ln_pre,
                                                const SumAccuracy& acc = {})
{
    if (k < 0 || k > 2) {
        throw DomainError("scaled_theta_moment: k must be 0, 1 or 2");
    }
    return detail::theta_moment_series_ln(ln_x, ln_q, k, half_line, ln_pre, acc, "scaled_theta_moment").value;
}

/// Direct weighted Gaussian lattice sum over Z. This is the oracle form: it
/// never routes through theta identities.
[[nodiscard]] inline SeriesResult gauss_sum_full_series(double lambda, double gamma, double c, int weight,
                                                        const SumAccuracy& acc = {})
{
    return detail::gauss_series(lambda, gamma, c, weight, false, acc, "gauss_sum_full");
}

[[nodiscard]] inline double gauss_sum_full(double lambda, double gamma, double c, int weight,
                                           const SumAccuracy& acc = {})
{
    return gauss_sum_full_series(lambda, gamma, c, weight, acc).value;
}

/// As gauss_sum_full, restricted to n >= 0.
[[nodiscard]] inline SeriesResult gauss_sum_half_series(double lambda, double gamma, double c, int weight,
                                                        const SumAccuracy& acc = {})
{
    return detail::gauss_series(lambda, gamma, c, weight, true, acc, "gauss_sum_half");
}

[[nodiscard]] inline double gauss_sum_half(double lambda, double gamma, double c, int weight,
                                           const SumAccuracy& acc = {})
{
    return gauss_sum_half_series(lambda, gamma, c, weight, acc).value;
}

} // namespace anyon_otto::special
