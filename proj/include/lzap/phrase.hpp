#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lzap {

// Positions are 1-based throughout, matching the serialized format.
using Position = std::uint64_t;

struct Phrase {
    enum class Kind : std::uint8_t { literal, copy };

    Kind kind = Kind::literal;
    std::uint8_t literal_byte = 0;
    Position source = 0;      // 0 for literals
    std::uint64_t length = 1; // always 1 for literals
    Position start = 0;       // bookkeeping only, not serialized

    static Phrase literal(Position start, std::uint8_t byte) {
        return Phrase{Kind::literal, byte, 0, 1, start};
    }

    static Phrase copy(Position start, Position source, std::uint64_t length) {
        return Phrase{Kind::copy, 0, source, length, start};
    }

    bool is_literal() const { return kind == Kind::literal; }
    Position end() const { return start + length - 1; }

    friend bool operator==(const Phrase&, const Phrase&) = default;
};

struct Parse {
    std::vector<Phrase> phrases;
    std::uint64_t n = 0;

    std::size_t size() const { return phrases.size(); }

    friend bool operator==(const Parse&, const Parse&) = default;
};

// A pending call parse(start, end, pending_length) of the recursive procedure.
struct Interval {
    Position start = 1;
    Position end = 0;
    std::uint64_t pending_length = 1;

    std::uint64_t length() const { return end >= start ? end - start + 1 : 0; }

    friend bool operator==(const Interval&, const Interval&) = default;
};

struct Params {
    std::uint64_t n = 0;
    double epsilon = 1.0;
    bool halve_epsilon = false;
    std::uint32_t sigma = 0; // distinct byte values; only the short table reads it
    std::uint64_t seed = 0;

    void validate() const {
        if (!(epsilon > 0.0 && epsilon <= 1.0)) {
            throw std::invalid_argument("epsilon must lie in (0, 1], got " + std::to_string(epsilon));
        }
    }

    double effective_epsilon() const { return halve_epsilon ? epsilon / 2.0 : epsilon; }

    // n^eps, evaluated once per run.
    double step() const {
        return std::pow(static_cast<double>(n), effective_epsilon());
    }

    // Parameters whose shrink factor n^eps equals `step`.
    static Params with_step(std::uint64_t n, double step, std::uint64_t seed = 0) {
        if (n < 2 || step <= 1.0) {
            throw std::invalid_argument("with_step needs n >= 2 and step > 1");
        }
        Params p;
        p.n = n;
        p.epsilon = std::log(step) / std::log(static_cast<double>(n));
        p.seed = seed;
        p.validate();
        return p;
    }
};

} // namespace lzap
