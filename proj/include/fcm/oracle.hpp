#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fcm/dataset.hpp"

namespace fcm {

// Exact ground truth for a dataset: per-element frequency and group plus
// per-group element counts and mass totals. Entry order follows the dataset.
class frequency_oracle {
public:
    struct entry {
        std::string key;
        std::uint32_t group;
        std::uint64_t frequency;
    };

    explicit frequency_oracle(const stream_dataset& data) : group_names_(data.group_names) {
        group_elements_.assign(group_names_.size(), 0);
        group_mass_.assign(group_names_.size(), 0);
        entries_.reserve(data.records.size());
        for (const stream_record& r : data.records) {
            if (r.count == 0) throw std::invalid_argument("frequency_oracle: zero frequency");
            if (r.group >= group_names_.size()) {
                throw std::invalid_argument("frequency_oracle: group id out of range");
            }
            auto [it, fresh] = index_of_key_.try_emplace(r.key, entries_.size());
            if (!fresh) {
                entry& e = entries_[it->second];
                if (e.group != r.group) {
                    throw std::invalid_argument("frequency_oracle: element '" + r.key +
                                                "' appears in two groups");
                }
                e.frequency += r.count;
            } else {
                entries_.push_back({r.key, r.group, r.count});
            }
        }
        rebuild_totals();
    }

    const std::vector<entry>& entries() const noexcept { return entries_; }
    std::size_t elements() const noexcept { return entries_.size(); }
    std::uint64_t total_mass() const noexcept { return total_mass_; }
    std::size_t group_count() const noexcept { return group_names_.size(); }
    const std::string& group_name(std::size_t g) const { return group_names_.at(g); }

    std::size_t group_elements(std::size_t g) const { return group_elements_.at(g); }
    std::uint64_t group_mass(std::size_t g) const { return group_mass_.at(g); }

    std::vector<std::uint64_t> group_element_counts() const {
        return {group_elements_.begin(), group_elements_.end()};
    }

    bool contains(std::string_view key) const {
        return index_of_key_.find(std::string(key)) != index_of_key_.end();
    }

    const entry& lookup(std::string_view key) const {
        auto it = index_of_key_.find(std::string(key));
        if (it == index_of_key_.end()) {
            throw std::out_of_range("frequency_oracle: unknown element");
        }
        return entries_[it->second];
    }

private:
    void rebuild_totals() {
        std::fill(group_elements_.begin(), group_elements_.end(), 0);
        std::fill(group_mass_.begin(), group_mass_.end(), 0);
        total_mass_ = 0;
        for (const entry& e : entries_) {
            group_elements_[e.group] += 1;
            group_mass_[e.group] += e.frequency;
            total_mass_ += e.frequency;
        }
    }

    std::vector<entry> entries_;
    std::unordered_map<std::string, std::size_t> index_of_key_;
    std::vector<std::string> group_names_;
    std::vector<std::size_t> group_elements_;
    std::vector<std::uint64_t> group_mass_;
    std::uint64_t total_mass_ = 0;
};

}  // namespace fcm
