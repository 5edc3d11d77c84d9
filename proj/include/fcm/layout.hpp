#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace fcm {

// Column ranges of a width-partitioned sketch row. Group g owns the
// half-open range [offset(g), offset(g) + width(g)); ranges are contiguous
// and disjoint by construction.
class column_layout {
public:
    explicit column_layout(std::vector<std::uint64_t> widths) : widths_(std::move(widths)) {
        if (widths_.empty()) throw std::invalid_argument("column_layout: no groups");
        offsets_.reserve(widths_.size());
        std::uint64_t off = 0;
        for (std::uint64_t wg : widths_) {
            if (wg == 0) throw std::invalid_argument("column_layout: zero-width group");
            offsets_.push_back(off);
            off += wg;
        }
        total_ = off;
    }

    std::size_t groups() const noexcept { return widths_.size(); }
    std::uint64_t total_width() const noexcept { return total_; }

    std::uint64_t width(std::size_t g) const {
        check(g);
        return widths_[g];
    }

    std::uint64_t offset(std::size_t g) const {
        check(g);
        return offsets_[g];
    }

    const std::vector<std::uint64_t>& widths() const noexcept { return widths_; }

private:
    void check(std::size_t g) const {
        if (g >= widths_.size()) throw std::out_of_range("column_layout: group out of range");
    }

    std::vector<std::uint64_t> widths_;
    std::vector<std::uint64_t> offsets_;
    std::uint64_t total_ = 0;
};

}  // namespace fcm
