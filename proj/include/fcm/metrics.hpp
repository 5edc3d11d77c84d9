#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fcm/hash.hpp"
#include "fcm/oracle.hpp"
#include "fcm/sketches.hpp"

namespace fcm {

// Approximation factor of one estimate: true over estimated frequency,
// in (0, 1] because estimates never undercount.
inline double alpha(std::uint64_t frequency, std::uint64_t estimate) {
    if (frequency == 0) throw std::invalid_argument("alpha: frequency must be positive");
    if (estimate < frequency) throw std::invalid_argument("alpha: estimate below true frequency");
    return static_cast<double>(frequency) / static_cast<double>(estimate);
}

inline std::uint64_t additive_error(std::uint64_t frequency, std::uint64_t estimate) {
    if (estimate < frequency) throw std::invalid_argument("additive_error: estimate below true frequency");
    return estimate - frequency;
}

struct group_report {
    std::size_t group = 0;
    std::size_t elements = 0;
    double mean_alpha = 0.0;
    std::uint64_t total_additive_error = 0;
    double mean_additive_error = 0.0;
};

// Per-group summary of estimates aligned with the oracle's entry order.
inline std::vector<group_report> build_group_reports(const frequency_oracle& oracle,
                                                     const std::vector<std::uint64_t>& estimates) {
    if (estimates.size() != oracle.elements()) {
        throw std::invalid_argument("build_group_reports: one estimate per element expected");
    }
    std::vector<group_report> reports(oracle.group_count());
    for (std::size_t g = 0; g < reports.size(); ++g) reports[g].group = g;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        const auto& e = oracle.entries()[i];
        group_report& r = reports[e.group];
        r.elements += 1;
        r.mean_alpha += alpha(e.frequency, estimates[i]);
        r.total_additive_error += additive_error(e.frequency, estimates[i]);
    }
    for (group_report& r : reports) {
        if (r.elements > 0) {
            r.mean_alpha /= static_cast<double>(r.elements);
            r.mean_additive_error = static_cast<double>(r.total_additive_error) /
                                    static_cast<double>(r.elements);
        }
    }
    return reports;
}

inline double group_mean_alpha(const frequency_oracle& oracle,
                               const std::vector<std::uint64_t>& estimates, std::size_t group) {
    const auto reports = build_group_reports(oracle, estimates);
    if (group >= reports.size()) throw std::out_of_range("group_mean_alpha: group out of range");
    if (reports[group].elements == 0) {
        throw std::invalid_argument("group_mean_alpha: empty group");
    }
    return reports[group].mean_alpha;
}

// Spread of the per-group mean approximation factors: best minus worst,
// zero when every group is served equally well.
inline double unfairness(const std::vector<double>& group_means) {
    if (group_means.empty()) throw std::invalid_argument("unfairness: no groups");
    const auto [lo, hi] = std::minmax_element(group_means.begin(), group_means.end());
    return *hi - *lo;
}

inline std::uint64_t total_additive_error(const frequency_oracle& oracle,
                                          const std::vector<std::uint64_t>& estimates) {
    if (estimates.size() != oracle.elements()) {
        throw std::invalid_argument("total_additive_error: one estimate per element expected");
    }
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        total += additive_error(oracle.entries()[i].frequency, estimates[i]);
    }
    return total;
}

// Price of fairness: extra total error paid by the width-partitioned sketch
// relative to the unpartitioned one. Negative when partitioning helps.
inline std::int64_t pof(std::int64_t total_error_partitioned, std::int64_t total_error_plain) {
    return total_error_partitioned - total_error_plain;
}

// Closed forms for single-row sketches under uniformly random hashing.
inline double theoretical_total_error_plain_d1(std::uint64_t n, std::uint64_t total_mass,
                                               std::uint64_t w) {
    if (w == 0) throw std::invalid_argument("theoretical_total_error_plain_d1: width must be positive");
    return (static_cast<double>(n) - 1.0) * static_cast<double>(total_mass) / static_cast<double>(w);
}

inline double theoretical_total_error_partitioned_d1(const std::vector<std::uint64_t>& group_elements,
                                                     const std::vector<std::uint64_t>& group_masses,
                                                     std::uint64_t w) {
    if (w == 0) throw std::invalid_argument("theoretical_total_error_partitioned_d1: width must be positive");
    if (group_elements.size() != group_masses.size() || group_elements.empty()) {
        throw std::invalid_argument("theoretical_total_error_partitioned_d1: bad group vectors");
    }
    double n = 0.0, mass = 0.0;
    for (std::size_t g = 0; g < group_elements.size(); ++g) {
        if (group_elements[g] == 0) {
            throw std::invalid_argument("theoretical_total_error_partitioned_d1: empty group");
        }
        n += static_cast<double>(group_elements[g]);
        mass += static_cast<double>(group_masses[g]);
    }
    const double dw = static_cast<double>(w);
    double sum = 0.0;
    for (std::size_t g = 0; g < group_elements.size(); ++g) {
        sum += (n / static_cast<double>(group_elements[g])) *
               (static_cast<double>(group_masses[g]) / dw);
    }
    return n * mass / dw - sum;
}

// Difference of the two closed forms above; provably negative whenever
// there are two or more non-degenerate groups.
inline double theoretical_pof_d1(const std::vector<std::uint64_t>& group_elements,
                                 const std::vector<std::uint64_t>& group_masses, std::uint64_t w) {
    if (w == 0) throw std::invalid_argument("theoretical_pof_d1: width must be positive");
    if (group_elements.size() != group_masses.size() || group_elements.empty()) {
        throw std::invalid_argument("theoretical_pof_d1: bad group vectors");
    }
    double n = 0.0, mass = 0.0;
    for (std::size_t g = 0; g < group_elements.size(); ++g) {
        n += static_cast<double>(group_elements[g]);
        mass += static_cast<double>(group_masses[g]);
    }
    const double dw = static_cast<double>(w);
    double sum = 0.0;
    for (std::size_t g = 0; g < group_elements.size(); ++g) {
        if (group_elements[g] == 0) throw std::invalid_argument("theoretical_pof_d1: empty group");
        sum += (n / static_cast<double>(group_elements[g])) *
               (static_cast<double>(group_masses[g]) / dw);
    }
    return mass / dw - sum;
}

// Total error of a single-row sketch when every bucket holds exactly n/w
// elements (perfectly uniform placement); the same value applies to the
// partitioned layout when each group's quota n_g/w_g matches n/w.
inline double theoretical_uniform_total_error_d1(std::uint64_t n, std::uint64_t total_mass,
                                                 std::uint64_t w) {
    if (w == 0) throw std::invalid_argument("theoretical_uniform_total_error_d1: width must be positive");
    return static_cast<double>(total_mass) *
           (static_cast<double>(n) / static_cast<double>(w) - 1.0);
}

// Monte Carlo estimate of the expected per-element additive error of an
// unpartitioned sketch at depth d: mean over fresh hash draws of the
// row-minimum colliding mass, averaged over elements.
inline double expected_additive_error(const frequency_oracle& oracle, std::uint64_t w, std::size_t d,
                                      std::size_t trials, std::uint64_t seed) {
    if (trials == 0) throw std::invalid_argument("expected_additive_error: need at least one trial");
    if (oracle.elements() == 0) return 0.0;
    double sum = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        count_min sketch({.width = w, .depth = d, .seed = mix_seed(seed, t)});
        for (const auto& e : oracle.entries()) sketch.update(e.key, e.frequency);
        std::uint64_t total = 0;
        for (const auto& e : oracle.entries()) {
            total += sketch.estimate(e.key) - e.frequency;
        }
        sum += static_cast<double>(total) / static_cast<double>(oracle.elements());
    }
    return sum / static_cast<double>(trials);
}

}  // namespace fcm
