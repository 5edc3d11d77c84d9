#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace fcm {

// Dense d x w grid of 64-bit counters. Additions that would wrap are
// reported as errors instead of saturating silently.
class counter_matrix {
public:
    counter_matrix(std::size_t depth, std::uint64_t width) : depth_(depth), width_(width) {
        if (depth == 0) throw std::invalid_argument("counter_matrix: depth must be positive");
        if (width == 0) throw std::invalid_argument("counter_matrix: width must be positive");
        cells_.assign(depth * static_cast<std::size_t>(width), 0);
    }

    std::size_t depth() const noexcept { return depth_; }
    std::uint64_t width() const noexcept { return width_; }

    void add(std::size_t row, std::uint64_t col, std::uint64_t c) {
        std::uint64_t& cell = cells_[index(row, col)];
        if (cell > std::numeric_limits<std::uint64_t>::max() - c) {
            throw std::overflow_error("counter_matrix: counter overflow");
        }
        cell += c;
    }

    std::uint64_t at(std::size_t row, std::uint64_t col) const { return cells_[index(row, col)]; }

    std::uint64_t row_sum(std::size_t row) const {
        if (row >= depth_) throw std::out_of_range("counter_matrix: row out of range");
        std::uint64_t s = 0;
        for (std::uint64_t c = 0; c < width_; ++c) s += cells_[row * width_ + c];
        return s;
    }

private:
    std::size_t index(std::size_t row, std::uint64_t col) const {
        if (row >= depth_) throw std::out_of_range("counter_matrix: row out of range");
        if (col >= width_) throw std::out_of_range("counter_matrix: column out of range");
        return row * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col);
    }

    std::size_t depth_;
    std::uint64_t width_;
    std::vector<std::uint64_t> cells_;
};

}  // namespace fcm
