#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "fcm/counters.hpp"
#include "fcm/hash.hpp"
#include "fcm/layout.hpp"

namespace fcm {

struct sketch_config {
    std::uint64_t width = 0;
    std::size_t depth = 0;
    std::uint64_t seed = 0;
};

inline void validate(const sketch_config& cfg) {
    if (cfg.width == 0) throw std::invalid_argument("sketch_config: width must be positive");
    if (cfg.depth == 0) throw std::invalid_argument("sketch_config: depth must be positive");
}

// Classic count-min sketch: d rows of w counters, one hash per row,
// point estimate is the row-wise minimum. Estimates never undercount.
class count_min {
public:
    explicit count_min(const sketch_config& cfg)
        : cfg_(cfg),
          hashers_((validate(cfg), make_row_hashers(cfg.seed, cfg.depth))),
          counters_(cfg.depth, cfg.width) {}

    void update(std::string_view key, std::uint64_t count = 1) {
        if (count == 0) throw std::invalid_argument("count_min: count must be positive");
        const std::uint64_t fp = fingerprint64(key);
        for (std::size_t i = 0; i < cfg_.depth; ++i) {
            counters_.add(i, hash_bucket(hashers_[i], fp, cfg_.width), count);
        }
    }

    std::uint64_t estimate(std::string_view key) const {
        const std::uint64_t fp = fingerprint64(key);
        std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
        for (std::size_t i = 0; i < cfg_.depth; ++i) {
            best = std::min(best, counters_.at(i, hash_bucket(hashers_[i], fp, cfg_.width)));
        }
        return best;
    }

    const sketch_config& config() const noexcept { return cfg_; }
    const counter_matrix& counters() const noexcept { return counters_; }

private:
    sketch_config cfg_;
    std::vector<row_hasher> hashers_;
    counter_matrix counters_;
};

// Width-partitioned count-min: every row is split into per-group column
// ranges, so keys from different groups can never collide. Updates and
// queries must carry the key's group.
class fair_count_min {
public:
    fair_count_min(const sketch_config& cfg, column_layout layout)
        : cfg_(cfg),
          layout_((validate(cfg), std::move(layout))),
          hashers_(make_row_hashers(cfg.seed, cfg.depth)),
          counters_(cfg.depth, cfg.width) {
        if (layout_.total_width() != cfg.width) {
            throw std::invalid_argument("fair_count_min: layout widths must sum to the sketch width");
        }
    }

    void update(std::string_view key, std::size_t group, std::uint64_t count = 1) {
        if (count == 0) throw std::invalid_argument("fair_count_min: count must be positive");
        const std::uint64_t off = layout_.offset(group);
        const std::uint64_t wg = layout_.width(group);
        const std::uint64_t fp = fingerprint64(key);
        for (std::size_t i = 0; i < cfg_.depth; ++i) {
            counters_.add(i, off + hash_bucket(hashers_[i], fp, wg), count);
        }
    }

    std::uint64_t estimate(std::string_view key, std::size_t group) const {
        const std::uint64_t off = layout_.offset(group);
        const std::uint64_t wg = layout_.width(group);
        const std::uint64_t fp = fingerprint64(key);
        std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
        for (std::size_t i = 0; i < cfg_.depth; ++i) {
            best = std::min(best, counters_.at(i, off + hash_bucket(hashers_[i], fp, wg)));
        }
        return best;
    }

    const sketch_config& config() const noexcept { return cfg_; }
    const column_layout& layout() const noexcept { return layout_; }
    const counter_matrix& counters() const noexcept { return counters_; }

private:
    sketch_config cfg_;
    column_layout layout_;
    std::vector<row_hasher> hashers_;
    counter_matrix counters_;
};

// Row-partitioned baseline: groups own disjoint row sets and every row keeps
// the full width. A group with r rows behaves like an independent depth-r
// count-min over the shared width.
class row_partition_sketch {
public:
    row_partition_sketch(const sketch_config& cfg, std::vector<std::size_t> rows_per_group)
        : cfg_(cfg),
          rows_per_group_((validate(cfg), std::move(rows_per_group))),
          hashers_(make_row_hashers(cfg.seed, cfg.depth)),
          counters_(cfg.depth, cfg.width) {
        if (rows_per_group_.empty()) throw std::invalid_argument("row_partition_sketch: no groups");
        std::size_t total = 0;
        row_offsets_.reserve(rows_per_group_.size());
        for (std::size_t r : rows_per_group_) {
            if (r == 0) throw std::invalid_argument("row_partition_sketch: every group needs at least one row");
            row_offsets_.push_back(total);
            total += r;
        }
        if (total != cfg.depth) {
            throw std::invalid_argument("row_partition_sketch: group rows must sum to the sketch depth");
        }
    }

    void update(std::string_view key, std::size_t group, std::uint64_t count = 1) {
        if (count == 0) throw std::invalid_argument("row_partition_sketch: count must be positive");
        check_group(group);
        const std::uint64_t fp = fingerprint64(key);
        const std::size_t first = row_offsets_[group];
        const std::size_t last = first + rows_per_group_[group];
        for (std::size_t i = first; i < last; ++i) {
            counters_.add(i, hash_bucket(hashers_[i], fp, cfg_.width), count);
        }
    }

    std::uint64_t estimate(std::string_view key, std::size_t group) const {
        check_group(group);
        const std::uint64_t fp = fingerprint64(key);
        const std::size_t first = row_offsets_[group];
        const std::size_t last = first + rows_per_group_[group];
        std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
        for (std::size_t i = first; i < last; ++i) {
            best = std::min(best, counters_.at(i, hash_bucket(hashers_[i], fp, cfg_.width)));
        }
        return best;
    }

    const sketch_config& config() const noexcept { return cfg_; }
    const std::vector<std::size_t>& rows_per_group() const noexcept { return rows_per_group_; }
    const counter_matrix& counters() const noexcept { return counters_; }

private:
    void check_group(std::size_t group) const {
        if (group >= rows_per_group_.size()) {
            throw std::out_of_range("row_partition_sketch: group out of range");
        }
    }

    sketch_config cfg_;
    std::vector<std::size_t> rows_per_group_;
    std::vector<std::size_t> row_offsets_;
    std::vector<row_hasher> hashers_;
    counter_matrix counters_;
};

}  // namespace fcm
