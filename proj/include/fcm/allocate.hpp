#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fcm/occupancy.hpp"

namespace fcm {

// Raised when a width budget cannot give every group at least one column.
class infeasible_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct allocation_result {
    std::vector<std::uint64_t> widths;   // one per group, sums to w
    std::vector<double> residuals;       // one per split step
};

struct row_split_result {
    std::size_t rows_low = 0;            // rows given to the first group
    double residual = 0.0;               // |gap| between the two sides
};

namespace detail {

inline void validate_group_sizes(const std::vector<std::uint64_t>& sizes, std::size_t min_groups) {
    if (sizes.size() < min_groups) {
        throw std::invalid_argument("allocation: need at least " + std::to_string(min_groups) + " groups");
    }
    for (std::uint64_t n : sizes) {
        if (n == 0) throw std::invalid_argument("allocation: empty group");
    }
}

// Difference between the two groups' expected minimum occupancies when the
// first gets w_low of the w columns. Strictly decreasing in w_low.
inline double occupancy_gap(std::uint64_t n_low, std::uint64_t n_high, std::uint64_t w,
                            std::uint64_t w_low, std::size_t d, precision mode) {
    return expected_min_occupancy(n_low, d, w_low, mode) -
           expected_min_occupancy(n_high, d, w - w_low, mode);
}

struct split_eval {
    std::uint64_t w_low;
    double residual;
};

// Integer width for the first group that best balances the two expected
// minimum occupancies. Binary search over the sign change of the gap, then
// the bracketing integers are compared; ties go to the smaller width.
inline split_eval solve_two_group_impl(std::uint64_t n_low, std::uint64_t n_high, std::uint64_t w,
                                       std::size_t d, precision mode) {
    if (n_low == 0 || n_high == 0) throw std::invalid_argument("allocation: empty group");
    if (d == 0) throw std::invalid_argument("allocation: depth must be positive");
    if (w < 2) throw infeasible_error("allocation: need at least one column per group");

    std::uint64_t lo = 1, hi = w - 1;
    while (lo < hi) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (occupancy_gap(n_low, n_high, w, mid, d, mode) > 0.0) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    std::uint64_t best = lo;
    double best_r = std::fabs(occupancy_gap(n_low, n_high, w, best, d, mode));
    while (best > 1) {
        const double r = std::fabs(occupancy_gap(n_low, n_high, w, best - 1, d, mode));
        if (r > best_r) break;
        best -= 1;
        best_r = r;
    }
    return {best, best_r};
}

}  // namespace detail

// Proportional split of w columns across groups for single-row sketches:
// quotas n_g * w / n rounded by largest remainder, with every group kept at
// one column or more and the total pinned to w.
inline std::vector<std::uint64_t> widths_d1(const std::vector<std::uint64_t>& sizes, std::uint64_t w) {
    detail::validate_group_sizes(sizes, 2);
    if (w < sizes.size()) throw infeasible_error("widths_d1: need at least one column per group");

    const unsigned __int128 total =
        std::accumulate(sizes.begin(), sizes.end(), static_cast<unsigned __int128>(0));
    std::vector<std::uint64_t> widths(sizes.size());
    std::vector<std::pair<std::uint64_t, std::size_t>> remainders;  // (n_g * w mod n, group)
    std::uint64_t assigned = 0;
    for (std::size_t g = 0; g < sizes.size(); ++g) {
        const unsigned __int128 scaled = static_cast<unsigned __int128>(sizes[g]) * w;
        widths[g] = static_cast<std::uint64_t>(scaled / total);
        remainders.emplace_back(static_cast<std::uint64_t>(scaled % total), g);
        assigned += widths[g];
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t i = 0; assigned < w; ++i, ++assigned) {
        widths[remainders[i % remainders.size()].second] += 1;
    }
    // lift zero-width groups, paid for by the currently widest group
    for (std::size_t g = 0; g < widths.size(); ++g) {
        while (widths[g] == 0) {
            const std::size_t donor = static_cast<std::size_t>(
                std::max_element(widths.begin(), widths.end()) - widths.begin());
            if (widths[donor] < 2) throw infeasible_error("widths_d1: need at least one column per group");
            widths[donor] -= 1;
            widths[g] += 1;
        }
    }
    return widths;
}

// Two-group width split equalizing the expected minimum occupancies.
inline std::uint64_t solve_two_group(std::uint64_t n_low, std::uint64_t n_high, std::uint64_t w,
                                     std::size_t d, precision mode = precision::exact) {
    return detail::solve_two_group_impl(n_low, n_high, w, d, mode).w_low;
}

// Multi-group allocation by repeated two-group splits: group j is balanced
// against the pooled remaining groups within the remaining budget, which is
// then reduced by group j's width. The last group takes what is left.
inline allocation_result solve_multi(const std::vector<std::uint64_t>& sizes, std::uint64_t w,
                                     std::size_t d, precision mode = precision::exact) {
    detail::validate_group_sizes(sizes, 2);
    if (w < sizes.size()) throw infeasible_error("solve_multi: need at least one column per group");

    const std::size_t groups = sizes.size();
    allocation_result out;
    out.widths.assign(groups, 0);
    std::uint64_t remaining = w;
    for (std::size_t j = 0; j + 1 < groups; ++j) {
        const std::uint64_t pooled =
            std::accumulate(sizes.begin() + static_cast<std::ptrdiff_t>(j) + 1, sizes.end(),
                            static_cast<std::uint64_t>(0));
        const auto split = detail::solve_two_group_impl(sizes[j], pooled, remaining, d, mode);
        const std::uint64_t groups_left = groups - j - 1;
        if (remaining - split.w_low < groups_left) {
            throw infeasible_error("solve_multi: split " + std::to_string(j + 1) + " leaves " +
                                   std::to_string(remaining - split.w_low) + " columns for " +
                                   std::to_string(groups_left) + " groups");
        }
        out.widths[j] = split.w_low;
        out.residuals.push_back(split.residual);
        remaining -= split.w_low;
    }
    out.widths[groups - 1] = remaining;
    return out;
}

// Row split for the row-partitioned baseline: the first group gets rows_low
// of the d rows, scanned exhaustively for the best balance of expected
// minimum occupancies at full width. Ties go to the smaller row count.
inline row_split_result solve_row_partition(std::uint64_t n_low, std::uint64_t n_high,
                                            std::uint64_t w, std::size_t d) {
    if (n_low == 0 || n_high == 0) throw std::invalid_argument("allocation: empty group");
    if (w == 0) throw std::invalid_argument("allocation: width must be positive");
    if (d < 2) throw infeasible_error("solve_row_partition: need at least one row per group");

    row_split_result best{0, std::numeric_limits<double>::infinity()};
    for (std::size_t rows_low = 1; rows_low < d; ++rows_low) {
        const double gap = expected_min_occupancy(n_low, rows_low, w) -
                           expected_min_occupancy(n_high, d - rows_low, w);
        const double r = std::fabs(gap);
        if (r < best.residual) {
            best.rows_low = rows_low;
            best.residual = r;
        }
    }
    return best;
}

}  // namespace fcm
