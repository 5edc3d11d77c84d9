#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fcm/datagen.hpp"
#include "fcm/hash.hpp"
#include "fcm/layout.hpp"
#include "fcm/sketches.hpp"

namespace fcm {

// Simulation-based search for the low-group width that equalizes the two
// groups' mean approximation factors, used to cross-check the analytic
// allocator on real hash draws.
struct mc_config {
    std::uint64_t n_low = 0;
    std::uint64_t n_high = 0;
    distribution_spec dist_low;
    distribution_spec dist_high;
    std::uint64_t width = 0;
    std::size_t depth = 1;
    std::size_t trials = 1;
    std::uint64_t seed = 0;
};

struct mc_result {
    double mean_wl = 0.0;
    std::vector<double> trial_means;
};

namespace detail {

// Mean approximation-factor gap (low minus high) for one concrete hash draw
// at the candidate split. Deterministic in (rep_seed, w_low).
inline double alpha_gap_single_row(const std::vector<std::uint64_t>& freq_low,
                                   const std::vector<std::uint64_t>& freq_high,
                                   std::uint64_t width, std::uint64_t w_low,
                                   std::uint64_t rep_seed) {
    column_layout layout({w_low, width - w_low});
    fair_count_min sketch({.width = width, .depth = 1, .seed = rep_seed}, layout);
    std::string key;
    for (std::size_t i = 0; i < freq_low.size(); ++i) {
        key = "l" + std::to_string(i);
        sketch.update(key, 0, freq_low[i]);
    }
    for (std::size_t i = 0; i < freq_high.size(); ++i) {
        key = "h" + std::to_string(i);
        sketch.update(key, 1, freq_high[i]);
    }
    double sum_low = 0.0, sum_high = 0.0;
    for (std::size_t i = 0; i < freq_low.size(); ++i) {
        key = "l" + std::to_string(i);
        sum_low += static_cast<double>(freq_low[i]) /
                   static_cast<double>(sketch.estimate(key, 0));
    }
    for (std::size_t i = 0; i < freq_high.size(); ++i) {
        key = "h" + std::to_string(i);
        sum_high += static_cast<double>(freq_high[i]) /
                    static_cast<double>(sketch.estimate(key, 1));
    }
    return sum_low / static_cast<double>(freq_low.size()) -
           sum_high / static_cast<double>(freq_high.size());
}

}  // namespace detail

// Estimates the equalizing low-group width by simulation. Each trial draws
// fresh frequencies for both groups; within a trial, `depth` independent
// single-row sketches each get a binary search for the split whose gap in
// mean approximation factors is closest to zero (gap grows with the low
// group's share). Widths found are averaged over rows, then over trials.
inline mc_result mc_estimate_wl(const mc_config& cfg) {
    if (cfg.n_low == 0 || cfg.n_high == 0) {
        throw std::invalid_argument("mc_estimate_wl: both groups need elements");
    }
    if (cfg.width < 2) throw std::invalid_argument("mc_estimate_wl: width must be at least 2");
    if (cfg.depth == 0) throw std::invalid_argument("mc_estimate_wl: depth must be positive");
    if (cfg.trials == 0) throw std::invalid_argument("mc_estimate_wl: trials must be positive");

    mc_result result;
    result.trial_means.reserve(cfg.trials);
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const auto freq_low = gen_frequencies(cfg.dist_low, cfg.n_low, mix_seed(cfg.seed, t, 0xA));
        const auto freq_high = gen_frequencies(cfg.dist_high, cfg.n_high, mix_seed(cfg.seed, t, 0xB));
        double rep_sum = 0.0;
        for (std::size_t r = 0; r < cfg.depth; ++r) {
            const std::uint64_t rep_seed = mix_seed(cfg.seed, t, 1000 + r);
            const auto gap = [&](std::uint64_t wl) {
                return detail::alpha_gap_single_row(freq_low, freq_high, cfg.width, wl, rep_seed);
            };
            std::uint64_t lo = 1, hi = cfg.width - 1;
            while (lo < hi) {
                const std::uint64_t mid = lo + (hi - lo) / 2;
                if (gap(mid) < 0.0) {
                    lo = mid + 1;
                } else {
                    hi = mid;
                }
            }
            std::uint64_t best = lo;
            if (lo > 1 && std::fabs(gap(lo - 1)) <= std::fabs(gap(lo))) best = lo - 1;
            rep_sum += static_cast<double>(best);
        }
        result.trial_means.push_back(rep_sum / static_cast<double>(cfg.depth));
    }
    double total = 0.0;
    for (const double m : result.trial_means) total += m;
    result.mean_wl = total / static_cast<double>(result.trial_means.size());
    return result;
}

}  // namespace fcm
