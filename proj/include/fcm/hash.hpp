#pragma once

#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace fcm {

// splitmix64 step, used for deterministic derivation of hash parameters
// and per-trial seeds. Advances the state and returns the next word.
inline std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Mixes a base seed with salt words into a new seed. Deterministic, order
// sensitive, used to derive independent sub-seeds (per trial, per row, ...).
inline std::uint64_t mix_seed(std::uint64_t base) noexcept {
    std::uint64_t s = base;
    return splitmix64(s);
}

template <typename... Rest>
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt, Rest... rest) noexcept {
    std::uint64_t s = base ^ (salt + 0x9e3779b97f4a7c15ull + (base << 6) + (base >> 2));
    return mix_seed(splitmix64(s), rest...);
}

// FNV-1a over the key bytes. Collapses variable-length keys to the 64-bit
// word the row hashers operate on.
inline std::uint64_t fingerprint64(std::string_view key) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : key) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// One row's hash function: multiply-add-shift over the key fingerprint with
// 128-bit parameters drawn from the seed. Pairwise collision probability is
// 2^-64 up to the quality of the fingerprint.
class row_hasher {
public:
    explicit row_hasher(std::uint64_t seed) : seed_(seed) {
        std::uint64_t s = seed;
        const std::uint64_t a_hi = splitmix64(s);
        const std::uint64_t a_lo = splitmix64(s) | 1ull;  // odd multiplier
        const std::uint64_t b_hi = splitmix64(s);
        const std::uint64_t b_lo = splitmix64(s);
        a_ = (static_cast<unsigned __int128>(a_hi) << 64) | a_lo;
        b_ = (static_cast<unsigned __int128>(b_hi) << 64) | b_lo;
    }

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t hash(std::uint64_t fingerprint) const noexcept {
        const unsigned __int128 v = a_ * static_cast<unsigned __int128>(fingerprint) + b_;
        return static_cast<std::uint64_t>(v >> 64);
    }

    std::uint64_t operator()(std::string_view key) const noexcept {
        return hash(fingerprint64(key));
    }

private:
    unsigned __int128 a_;
    unsigned __int128 b_;
    std::uint64_t seed_;
};

// Maps a key into [0, m). The modulo step biases bucket probabilities by at
// most m / 2^64, negligible for any realistic width.
inline std::uint64_t hash_bucket(const row_hasher& h, std::string_view key, std::uint64_t m) {
    if (m == 0) throw std::invalid_argument("hash_bucket: bucket count must be positive");
    return h(key) % m;
}

inline std::uint64_t hash_bucket(const row_hasher& h, std::uint64_t fingerprint, std::uint64_t m) {
    if (m == 0) throw std::invalid_argument("hash_bucket: bucket count must be positive");
    return h.hash(fingerprint) % m;
}

// Independent hashers for d rows, derived from one master seed.
inline std::vector<row_hasher> make_row_hashers(std::uint64_t master_seed, std::size_t d) {
    std::vector<row_hasher> hashers;
    hashers.reserve(d);
    std::uint64_t state = master_seed;
    for (std::size_t i = 0; i < d; ++i) {
        hashers.emplace_back(splitmix64(state));
    }
    return hashers;
}

}  // namespace fcm
