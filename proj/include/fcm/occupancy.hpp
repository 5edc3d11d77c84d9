#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace fcm {

// Evaluation mode for the occupancy expectation: "exact" runs the
// near-linear recurrences in log space, "stirling" rebuilds each binomial
// term from the asymptotic log-factorial. They agree to ~1e-4 relative
// at the sizes the solver sees; "exact" is the default everywhere.
enum class precision { exact, stirling };

namespace detail {

inline constexpr double log_two_pi = 1.8378770664093454836;
// below this log-magnitude a linear-space accumulation would flush to zero
inline constexpr double log_linear_floor = -700.0;

// ln(m!) == ln Gamma(m+1). Direct summation below the cutoff keeps small
// arguments exact; above it the asymptotic expansion is truncated after the
// 1/(12z) term, whose next correction is under 1e-7 at z = 33.
inline double log_factorial(std::uint64_t m) {
    if (m < 32) {
        double s = 0.0;
        for (std::uint64_t i = 2; i <= m; ++i) s += std::log(static_cast<double>(i));
        return s;
    }
    const double z = static_cast<double>(m) + 1.0;
    return (z - 0.5) * std::log(z) - z + 0.5 * log_two_pi + 1.0 / (12.0 * z);
}

inline double log_add_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

inline void kahan_add(double& sum, double& carry, double term) {
    const double y = term - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
}

// Turns log P(X = i), i = 1..n, into E[min occupancy] = sum_x P(X >= x)^d.
// Tail probabilities are accumulated linearly unless every term underflows,
// in which case the whole computation stays in log space.
inline double min_occupancy_from_log_pmf(const std::vector<double>& log_pmf, std::size_t d) {
    const std::size_t n = log_pmf.size();
    double max_log = -std::numeric_limits<double>::infinity();
    for (double v : log_pmf) max_log = std::max(max_log, v);
    const double dd = static_cast<double>(d);
    if (max_log >= log_linear_floor) {
        double tail = 0.0, tail_c = 0.0;
        double e = 0.0, e_c = 0.0;
        for (std::size_t i = n; i >= 1; --i) {
            kahan_add(tail, tail_c, std::exp(log_pmf[i - 1]));
            kahan_add(e, e_c, std::pow(tail, dd));
        }
        return e;
    }
    double log_tail = -std::numeric_limits<double>::infinity();
    double log_e = -std::numeric_limits<double>::infinity();
    for (std::size_t i = n; i >= 1; --i) {
        log_tail = log_add_exp(log_pmf[i - 1], log_tail);
        log_e = log_add_exp(log_e, dd * log_tail);
    }
    return std::exp(log_e);
}

inline void validate_occupancy_args(std::size_t d, std::uint64_t w) {
    if (d == 0) throw std::invalid_argument("expected_min_occupancy: depth must be positive");
    if (w == 0) throw std::invalid_argument("expected_min_occupancy: width must be positive");
}

}  // namespace detail

// ln C(n, k).
inline double log_binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) throw std::invalid_argument("log_binomial: k exceeds n");
    if (k == 0 || k == n) return 0.0;
    return detail::log_factorial(n) - detail::log_factorial(k) - detail::log_factorial(n - k);
}

// Expected size of the least-loaded of d independent assignments of n items
// into w buckets, i.e. E[min over d draws of X], X ~ Bin(n, 1/w), computed
// as sum_{x=1..n} P(X >= x)^d.
//
// The exact mode evaluates the binomial terms through the running-product
// recurrences (count, success and failure factors advance by one ratio per
// step), carried in log space so the factors cannot over- or underflow.
inline double expected_min_occupancy(std::uint64_t n, std::size_t d, std::uint64_t w,
                                     precision mode = precision::exact) {
    detail::validate_occupancy_args(d, w);
    if (n == 0) return 0.0;
    if (w == 1) return static_cast<double>(n);
    // closed forms: one row is the plain mean load, one item is the
    // d-way collision probability
    if (d == 1) return static_cast<double>(n) / static_cast<double>(w);
    if (n == 1) return std::pow(1.0 / static_cast<double>(w), static_cast<double>(d));

    const double log_w = std::log(static_cast<double>(w));
    const double log_w1 = std::log(static_cast<double>(w - 1));
    std::vector<double> log_pmf(n);
    if (mode == precision::exact) {
        double log_count = std::log(static_cast<double>(n));        // C(n, 1)
        double log_hit = -log_w;                                    // (1/w)^1
        double log_miss = static_cast<double>(n - 1) * (log_w1 - log_w);  // ((w-1)/w)^(n-1)
        log_pmf[0] = log_count + log_hit + log_miss;
        for (std::uint64_t i = 2; i <= n; ++i) {
            log_count += std::log(static_cast<double>(n + 1 - i)) - std::log(static_cast<double>(i));
            log_hit -= log_w;
            log_miss += log_w - log_w1;
            log_pmf[i - 1] = log_count + log_hit + log_miss;
        }
    } else {
        const double log_ratio = log_w1 - log_w;
        for (std::uint64_t i = 1; i <= n; ++i) {
            log_pmf[i - 1] = log_binomial(n, i) - static_cast<double>(i) * log_w +
                             static_cast<double>(n - i) * log_ratio;
        }
    }
    return detail::min_occupancy_from_log_pmf(log_pmf, d);
}

// Reference evaluation of the same expectation as a direct double sum over
// binomial tails, with terms built from std::lgamma. Quadratic in n; meant
// for validation, not for the solver.
inline double expected_min_occupancy_naive(std::uint64_t n, std::size_t d, std::uint64_t w) {
    detail::validate_occupancy_args(d, w);
    if (n == 0) return 0.0;
    if (w == 1) return static_cast<double>(n);

    const double log_w = std::log(static_cast<double>(w));
    const double log_ratio = std::log(static_cast<double>(w - 1)) - log_w;
    const double lg_n1 = std::lgamma(static_cast<double>(n) + 1.0);
    std::vector<double> pmf(n);
    for (std::uint64_t i = 1; i <= n; ++i) {
        const double lg = lg_n1 - std::lgamma(static_cast<double>(i) + 1.0) -
                          std::lgamma(static_cast<double>(n - i) + 1.0);
        pmf[i - 1] = std::exp(lg - static_cast<double>(i) * log_w +
                              static_cast<double>(n - i) * log_ratio);
    }
    double e = 0.0;
    for (std::uint64_t x = 1; x <= n; ++x) {
        double tail = 0.0;
        for (std::uint64_t i = n; i >= x; --i) tail += pmf[i - 1];
        e += std::pow(tail, static_cast<double>(d));
    }
    return e;
}

}  // namespace fcm
