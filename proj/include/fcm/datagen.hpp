#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "fcm/dataset.hpp"
#include "fcm/hash.hpp"

namespace fcm {

// Frequency model for synthetic datasets. The zipf kind lays frequencies
// out by rank (value of rank r proportional to r^-s, anchored so rank 1
// equals the number of elements) and shuffles which element gets which
// rank; the other kinds draw independent samples, round to the nearest
// integer and clamp to 1.
struct distribution_spec {
    enum class kind { zipf, gaussian, exponential, uniform };
    kind k = kind::uniform;
    double p1 = 0.0;
    double p2 = 0.0;
};

// Parses "zipf:1.0", "gaussian:100,50", "exponential:0.01", "uniform:1,9".
inline distribution_spec parse_distribution(const std::string& text) {
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    std::vector<double> params;
    if (colon != std::string::npos) {
        std::string rest = text.substr(colon + 1);
        std::size_t pos = 0;
        while (pos <= rest.size() && !rest.empty()) {
            const auto comma = rest.find(',', pos);
            const std::string piece = rest.substr(pos, comma == std::string::npos ? std::string::npos
                                                                                  : comma - pos);
            try {
                std::size_t used = 0;
                params.push_back(std::stod(piece, &used));
                if (used != piece.size()) throw std::invalid_argument(piece);
            } catch (const std::exception&) {
                throw std::invalid_argument("distribution: bad parameter '" + piece + "' in '" + text + "'");
            }
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }
    auto want = [&](std::size_t k) {
        if (params.size() != k) {
            throw std::invalid_argument("distribution: '" + text + "' expects " + std::to_string(k) +
                                        " parameter(s)");
        }
    };
    distribution_spec spec;
    if (name == "zipf") {
        want(1);
        spec.k = distribution_spec::kind::zipf;
        spec.p1 = params[0];
        if (spec.p1 <= 0.0) throw std::invalid_argument("distribution: zipf exponent must be positive");
    } else if (name == "gaussian") {
        want(2);
        spec.k = distribution_spec::kind::gaussian;
        spec.p1 = params[0];
        spec.p2 = params[1];
        if (spec.p2 < 0.0) throw std::invalid_argument("distribution: gaussian sigma must be non-negative");
    } else if (name == "exponential") {
        want(1);
        spec.k = distribution_spec::kind::exponential;
        spec.p1 = params[0];
        if (spec.p1 <= 0.0) throw std::invalid_argument("distribution: exponential rate must be positive");
    } else if (name == "uniform") {
        want(2);
        spec.k = distribution_spec::kind::uniform;
        spec.p1 = params[0];
        spec.p2 = params[1];
        if (spec.p1 > spec.p2) throw std::invalid_argument("distribution: uniform bounds out of order");
    } else {
        throw std::invalid_argument("distribution: unknown kind '" + name + "'");
    }
    return spec;
}

inline std::string to_string(const distribution_spec& spec) {
    auto fmt = [](double v) {
        std::string s = std::to_string(v);
        s.erase(s.find_last_not_of('0') + 1);
        if (!s.empty() && s.back() == '.') s.pop_back();
        return s;
    };
    switch (spec.k) {
        case distribution_spec::kind::zipf: return "zipf:" + fmt(spec.p1);
        case distribution_spec::kind::gaussian: return "gaussian:" + fmt(spec.p1) + "," + fmt(spec.p2);
        case distribution_spec::kind::exponential: return "exponential:" + fmt(spec.p1);
        case distribution_spec::kind::uniform: return "uniform:" + fmt(spec.p1) + "," + fmt(spec.p2);
    }
    return "";
}

// n positive integer frequencies drawn from the spec, deterministic per seed.
inline std::vector<std::uint64_t> gen_frequencies(const distribution_spec& spec, std::size_t n,
                                                  std::uint64_t seed) {
    std::vector<std::uint64_t> freqs(n);
    if (n == 0) return freqs;
    std::mt19937_64 rng(seed);
    auto clamp_round = [](double v) {
        if (!(v > 1.0)) return std::uint64_t{1};
        if (v >= 9.0e18) return std::uint64_t{9000000000000000000ull};
        return static_cast<std::uint64_t>(std::llround(v));
    };
    switch (spec.k) {
        case distribution_spec::kind::zipf: {
            const double top = static_cast<double>(n);
            for (std::size_t r = 1; r <= n; ++r) {
                freqs[r - 1] = clamp_round(top / std::pow(static_cast<double>(r), spec.p1));
            }
            std::shuffle(freqs.begin(), freqs.end(), rng);
            break;
        }
        case distribution_spec::kind::gaussian: {
            std::normal_distribution<double> dist(spec.p1, spec.p2);
            for (auto& f : freqs) f = clamp_round(dist(rng));
            break;
        }
        case distribution_spec::kind::exponential: {
            std::exponential_distribution<double> dist(spec.p1);
            for (auto& f : freqs) f = clamp_round(dist(rng));
            break;
        }
        case distribution_spec::kind::uniform: {
            std::uniform_real_distribution<double> dist(spec.p1, spec.p2);
            for (auto& f : freqs) f = clamp_round(spec.p1 == spec.p2 ? spec.p1 : dist(rng));
            break;
        }
    }
    return freqs;
}

// Frequency below the threshold: group 0; at or above it: group 1.
inline std::vector<std::uint32_t> group_by_threshold(const std::vector<std::uint64_t>& freqs,
                                                     std::uint64_t threshold) {
    std::vector<std::uint32_t> labels(freqs.size());
    for (std::size_t i = 0; i < freqs.size(); ++i) labels[i] = freqs[i] < threshold ? 0 : 1;
    return labels;
}

// Splits [min, max] into `groups` equal-width intervals and labels each
// frequency by its interval; the top interval includes its upper endpoint.
// All-equal frequencies land in a single interval.
inline std::vector<std::uint32_t> group_equi_width(const std::vector<std::uint64_t>& freqs,
                                                   std::size_t groups) {
    if (groups == 0) throw std::invalid_argument("group_equi_width: need at least one group");
    if (freqs.empty()) return {};
    const auto [lo_it, hi_it] = std::minmax_element(freqs.begin(), freqs.end());
    const double lo = static_cast<double>(*lo_it);
    const double span = static_cast<double>(*hi_it) - lo;
    std::vector<std::uint32_t> labels(freqs.size(), 0);
    if (span == 0.0) return labels;
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        const double pos = (static_cast<double>(freqs[i]) - lo) * static_cast<double>(groups) / span;
        auto label = static_cast<std::uint32_t>(pos);
        if (label >= groups) label = static_cast<std::uint32_t>(groups - 1);
        labels[i] = label;
    }
    return labels;
}

// The n_low least frequent elements form group 0, the rest group 1; ties
// are broken by element index so the split is deterministic and exact.
inline std::vector<std::uint32_t> group_lowest_n(const std::vector<std::uint64_t>& freqs,
                                                 std::size_t n_low) {
    if (n_low > freqs.size()) throw std::invalid_argument("group_lowest_n: n_low exceeds element count");
    std::vector<std::size_t> order(freqs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (freqs[a] != freqs[b]) return freqs[a] < freqs[b];
        return a < b;
    });
    std::vector<std::uint32_t> labels(freqs.size(), 1);
    for (std::size_t i = 0; i < n_low; ++i) labels[order[i]] = 0;
    return labels;
}

// Builds a dataset with keys "e0", "e1", ... from parallel frequency and
// label vectors. Group ids are compacted in order of first appearance;
// names default to the label values.
inline stream_dataset make_dataset(const std::vector<std::uint64_t>& freqs,
                                   const std::vector<std::uint32_t>& labels,
                                   std::vector<std::string> label_names = {}) {
    if (freqs.size() != labels.size()) {
        throw std::invalid_argument("make_dataset: frequency and label counts differ");
    }
    stream_dataset data;
    data.records.reserve(freqs.size());
    std::vector<std::int64_t> dense_of_label;
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        if (freqs[i] == 0) throw std::invalid_argument("make_dataset: zero frequency");
        const std::uint32_t label = labels[i];
        if (label >= dense_of_label.size()) dense_of_label.resize(label + 1, -1);
        if (dense_of_label[label] < 0) {
            dense_of_label[label] = static_cast<std::int64_t>(data.group_names.size());
            if (label < label_names.size()) {
                data.group_names.push_back(label_names[label]);
            } else {
                data.group_names.push_back(std::to_string(label));
            }
        }
        data.records.push_back({"e" + std::to_string(i),
                                static_cast<std::uint32_t>(dense_of_label[label]), freqs[i]});
    }
    return data;
}

// Two sub-populations with their own frequency models; group 0 is "low",
// group 1 is "high".
inline stream_dataset make_two_population_dataset(const distribution_spec& low, std::size_t n_low,
                                                  const distribution_spec& high, std::size_t n_high,
                                                  std::uint64_t seed) {
    const std::vector<std::uint64_t> f_low = gen_frequencies(low, n_low, mix_seed(seed, 0x10));
    const std::vector<std::uint64_t> f_high = gen_frequencies(high, n_high, mix_seed(seed, 0x11));
    std::vector<std::uint64_t> freqs;
    freqs.reserve(n_low + n_high);
    freqs.insert(freqs.end(), f_low.begin(), f_low.end());
    freqs.insert(freqs.end(), f_high.begin(), f_high.end());
    std::vector<std::uint32_t> labels(n_low + n_high, 1);
    for (std::size_t i = 0; i < n_low; ++i) labels[i] = 0;
    return make_dataset(freqs, labels, {"low", "high"});
}

}  // namespace fcm
