#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "phrase.hpp"

namespace lzap::oracle {

enum class Variant {
    classic,     // longest earlier match plus one appended literal
    prefix_only, // longest earlier-occurring prefix, pure copy
};

inline Variant parse_variant(std::string_view name) {
    if (name == "classic") {
        return Variant::classic;
    }
    if (name == "prefix-only") {
        return Variant::prefix_only;
    }
    throw std::invalid_argument("unknown oracle variant '" + std::string(name) + "'");
}

inline constexpr std::uint64_t kDefaultLimit = 1'000'000;

struct Factor {
    Position start = 0;
    std::uint64_t length = 0;
    Position source = 0;         // 0 when the phrase has no copied part
    std::uint64_t match_len = 0; // copied bytes; classic phrases add a trailing literal

    friend bool operator==(const Factor&, const Factor&) = default;
};

struct OracleStats {
    std::uint64_t z = 0;
    Variant variant = Variant::classic;
};

struct OracleResult {
    std::vector<Factor> factors;
    OracleStats stats;
};

// Longest match of S[p..] against an occurrence starting at some o < p
// (overlap allowed). Returns (source, length); length 0 means none.
inline std::pair<Position, std::uint64_t> longest_earlier_match(std::span<const std::uint8_t> s, Position p) {
    const std::size_t n = s.size();
    const std::size_t at = static_cast<std::size_t>(p - 1);
    Position best_src = 0;
    std::uint64_t best_len = 0;
    for (std::size_t o = 0; o < at; ++o) {
        std::size_t len = 0;
        while (at + len < n && s[o + len] == s[at + len]) {
            ++len;
        }
        if (len > best_len) {
            best_len = len;
            best_src = o + 1;
            if (at + len == n) {
                break;
            }
        }
    }
    return {best_src, best_len};
}

// Greedy exact LZ77 by quadratic scan.
inline OracleResult exact_lz77(std::span<const std::uint8_t> s, Variant variant = Variant::classic,
                               std::uint64_t limit = kDefaultLimit) {
    if (s.size() > limit) {
        throw std::length_error("input of " + std::to_string(s.size()) + " bytes exceeds the oracle limit of " +
                                std::to_string(limit));
    }
    OracleResult result;
    result.stats.variant = variant;
    const std::uint64_t n = s.size();
    Position p = 1;
    while (p <= n) {
        auto [src, len] = longest_earlier_match(s, p);
        Factor f{p, 0, src, len};
        if (variant == Variant::classic) {
            f.length = (p + len - 1 == n) ? len : len + 1;
        } else {
            f.length = len == 0 ? 1 : len;
        }
        if (len == 0) {
            f.source = 0;
        }
        result.factors.push_back(f);
        p += f.length;
    }
    result.stats.z = result.factors.size();
    return result;
}

inline OracleResult exact_lz77(std::string_view s, Variant variant = Variant::classic,
                               std::uint64_t limit = kDefaultLimit) {
    return exact_lz77(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()), variant, limit);
}

// Leftmost o < start with S[o..o+ell-1] = S[start..start+ell-1].
inline std::optional<Position> first_occurrence_bruteforce(std::span<const std::uint8_t> s, Position start,
                                                           std::uint64_t ell) {
    if (start < 1 || ell < 1 || start + ell - 1 > s.size()) {
        throw std::out_of_range("block [" + std::to_string(start) + ", +" + std::to_string(ell) +
                                ") outside the string");
    }
    const std::size_t at = static_cast<std::size_t>(start - 1);
    for (std::size_t o = 0; o < at; ++o) {
        std::size_t len = 0;
        while (len < ell && s[o + len] == s[at + len]) {
            ++len;
        }
        if (len == ell) {
            return o + 1;
        }
    }
    return std::nullopt;
}

} // namespace lzap::oracle
