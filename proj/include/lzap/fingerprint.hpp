#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace lzap {

inline constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

struct Fingerprint {
    std::uint64_t value = 0;

    friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mulmod_generic(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t result = 1 % m;
    base %= m;
    while (exp > 0) {
        if (exp & 1) {
            result = mulmod_generic(result, base, m);
        }
        base = mulmod_generic(base, base, m);
        exp >>= 1;
    }
    return result;
}

// Deterministic Miller-Rabin for 64-bit integers.
inline bool is_prime(std::uint64_t n) {
    if (n < 2) {
        return false;
    }
    for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0) {
            return n == p;
        }
    }
    std::uint64_t d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) {
            continue;
        }
        bool composite = true;
        for (unsigned r = 1; r < s; ++r) {
            x = mulmod_generic(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) {
            return false;
        }
    }
    return true;
}

} // namespace detail

// Karp-Rabin parameters: a prime modulus and a base drawn from the seed.
class FingerprintConfig {
public:
    FingerprintConfig(std::uint64_t modulus, std::uint64_t base) : modulus_(modulus), base_(base) {
        if (modulus < 5 || modulus >= (std::uint64_t{1} << 62) || !detail::is_prime(modulus)) {
            throw std::invalid_argument("fingerprint modulus must be a prime in [5, 2^62), got " + std::to_string(modulus));
        }
        if (base < 2 || base > modulus - 2) {
            throw std::invalid_argument("fingerprint base out of range [2, modulus - 2]");
        }
    }

    // The base is uniform in [2, modulus - 2]; each attempt gets a fresh one.
    static FingerprintConfig from_seed(std::uint64_t seed, std::uint64_t attempt = 0,
                                       std::uint64_t modulus = kMersenne61) {
        if (modulus < 5) {
            throw std::invalid_argument("fingerprint modulus must be a prime >= 5");
        }
        std::mt19937_64 gen(detail::splitmix64(seed ^ detail::splitmix64(attempt + 1)));
        std::uniform_int_distribution<std::uint64_t> dist(2, modulus - 2);
        return FingerprintConfig(modulus, dist(gen));
    }

    std::uint64_t modulus() const { return modulus_; }
    std::uint64_t base() const { return base_; }

    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
        if (modulus_ == kMersenne61) {
            const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
            std::uint64_t r = (static_cast<std::uint64_t>(p) & kMersenne61) + static_cast<std::uint64_t>(p >> 61);
            r = (r & kMersenne61) + (r >> 61);
            return r >= kMersenne61 ? r - kMersenne61 : r;
        }
        return detail::mulmod_generic(a, b, modulus_);
    }

    std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
        const std::uint64_t s = a + b; // both below 2^62
        return s >= modulus_ ? s - modulus_ : s;
    }

    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const {
        return a >= b ? a - b : a + (modulus_ - b);
    }

    std::uint64_t reduce_byte(std::uint8_t c) const { return c % modulus_; }

    // base^ell mod modulus, memoized for the lengths passed to warm().
    std::uint64_t power(std::uint64_t ell) const {
        if (auto it = pow_cache_.find(ell); it != pow_cache_.end()) {
            return it->second;
        }
        return detail::powmod(base_, ell, modulus_);
    }

    template<typename Range>
    void warm(const Range& lengths) {
        for (std::uint64_t ell : lengths) {
            pow_cache_[ell] = detail::powmod(base_, ell, modulus_);
            if (ell > 0) {
                pow_cache_[ell - 1] = detail::powmod(base_, ell - 1, modulus_);
            }
        }
    }

private:
    std::uint64_t modulus_;
    std::uint64_t base_;
    std::unordered_map<std::uint64_t, std::uint64_t> pow_cache_;
};

// Horner evaluation: sum bytes[t] * base^(len-1-t) mod modulus.
inline Fingerprint fp_of(std::span<const std::uint8_t> bytes, const FingerprintConfig& cfg) {
    std::uint64_t acc = 0;
    for (std::uint8_t c : bytes) {
        acc = cfg.add(cfg.mul(acc, cfg.base()), cfg.reduce_byte(c));
    }
    return Fingerprint{acc};
}

// Extends a fingerprint by one trailing byte.
inline Fingerprint append(Fingerprint fp, std::uint8_t c, const FingerprintConfig& cfg) {
    return Fingerprint{cfg.add(cfg.mul(fp.value, cfg.base()), cfg.reduce_byte(c))};
}

// Window roller for a fixed length; holds base^(ell-1) so each slide is O(1).
class Roller {
public:
    Roller(const FingerprintConfig& cfg, std::uint64_t ell)
        : cfg_(&cfg), lead_weight_(ell == 0 ? 0 : cfg.power(ell - 1)) {}

    Fingerprint roll(Fingerprint fp, std::uint8_t out_byte, std::uint8_t in_byte) const {
        const std::uint64_t without = cfg_->sub(fp.value, cfg_->mul(cfg_->reduce_byte(out_byte), lead_weight_));
        return Fingerprint{cfg_->add(cfg_->mul(without, cfg_->base()), cfg_->reduce_byte(in_byte))};
    }

private:
    const FingerprintConfig* cfg_;
    std::uint64_t lead_weight_;
};

inline Fingerprint roll(Fingerprint fp, std::uint8_t out_byte, std::uint8_t in_byte, std::uint64_t ell,
                        const FingerprintConfig& cfg) {
    return Roller(cfg, ell).roll(fp, out_byte, in_byte);
}

} // namespace lzap
