#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "io.hpp"
#include "phrase.hpp"

namespace lzap {

// Stream layout:
//   "LZAP" | 0x01 | n (LEB128) | count (LEB128) |
//   per phrase: source (LEB128, 0 = literal) then the literal byte or length (LEB128)
inline constexpr std::array<std::uint8_t, 4> kMagic{'L', 'Z', 'A', 'P'};
inline constexpr std::uint8_t kFormatVersion = 0x01;

class DecodeError : public std::runtime_error {
public:
    // phrase_index is 1-based; 0 means the header.
    DecodeError(std::size_t phrase_index, const std::string& what)
        : std::runtime_error(phrase_index == 0 ? "header: " + what
                                               : "phrase " + std::to_string(phrase_index) + ": " + what),
          phrase_index_(phrase_index) {}

    std::size_t phrase_index() const { return phrase_index_; }

private:
    std::size_t phrase_index_;
};

namespace detail {

inline void put_leb128(std::vector<std::uint8_t>& out, std::uint64_t v) {
    while (v >= 0x80) {
        out.push_back(static_cast<std::uint8_t>(v | 0x80));
        v >>= 7;
    }
    out.push_back(static_cast<std::uint8_t>(v));
}

class StreamReader {
public:
    explicit StreamReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    bool at_end() const { return off_ == bytes_.size(); }

    std::uint8_t byte(std::size_t phrase) {
        if (off_ >= bytes_.size()) {
            throw DecodeError(phrase, "truncated stream");
        }
        return bytes_[off_++];
    }

    std::uint64_t leb128(std::size_t phrase) {
        std::uint64_t v = 0;
        for (unsigned shift = 0;; shift += 7) {
            const std::uint8_t b = byte(phrase);
            if (shift == 63 && (b & 0x7e) != 0) {
                throw DecodeError(phrase, "varint overflows 64 bits");
            }
            v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
            if ((b & 0x80) == 0) {
                return v;
            }
            if (shift >= 63) {
                throw DecodeError(phrase, "varint overflows 64 bits");
            }
        }
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t off_ = 0;
};

} // namespace detail

// Writes the fields as given; no validation, so tests can serialize damaged parses.
inline std::vector<std::uint8_t> encode(const Parse& parse) {
    std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
    out.push_back(kFormatVersion);
    detail::put_leb128(out, parse.n);
    detail::put_leb128(out, parse.phrases.size());
    for (const Phrase& ph : parse.phrases) {
        if (ph.is_literal()) {
            detail::put_leb128(out, 0);
            out.push_back(ph.literal_byte);
        } else {
            detail::put_leb128(out, ph.source);
            detail::put_leb128(out, ph.length);
        }
    }
    return out;
}

// Parses a stream into phrases, enforcing the structural rules (tiling,
// source < start, lengths summing to n). Content is not checked.
inline Parse decode_parse(std::span<const std::uint8_t> stream) {
    detail::StreamReader in(stream);
    for (std::uint8_t m : kMagic) {
        if (in.byte(0) != m) {
            throw DecodeError(0, "bad magic");
        }
    }
    if (const std::uint8_t v = in.byte(0); v != kFormatVersion) {
        throw DecodeError(0, "unsupported version " + std::to_string(v));
    }
    Parse parse;
    parse.n = in.leb128(0);
    const std::uint64_t count = in.leb128(0);
    if (count > parse.n) {
        throw DecodeError(0, "phrase count exceeds n");
    }
    parse.phrases.reserve(static_cast<std::size_t>(count));
    Position next = 1;
    for (std::uint64_t k = 1; k <= count; ++k) {
        const auto idx = static_cast<std::size_t>(k);
        const std::uint64_t source = in.leb128(idx);
        if (next > parse.n) {
            throw DecodeError(idx, "phrase starts past n");
        }
        if (source == 0) {
            parse.phrases.push_back(Phrase::literal(next, in.byte(idx)));
            next += 1;
            continue;
        }
        const std::uint64_t length = in.leb128(idx);
        if (length == 0) {
            throw DecodeError(idx, "zero-length copy");
        }
        if (source >= next) {
            throw DecodeError(idx, "source " + std::to_string(source) + " does not precede start " +
                                       std::to_string(next));
        }
        if (length > parse.n - next + 1) {
            throw DecodeError(idx, "copy runs past n");
        }
        parse.phrases.push_back(Phrase::copy(next, source, length));
        next += length;
    }
    if (next != parse.n + 1) {
        throw DecodeError(0, "phrase lengths sum to " + std::to_string(next - 1) + ", header says " +
                                 std::to_string(parse.n));
    }
    if (!in.at_end()) {
        throw DecodeError(0, "trailing bytes after last phrase");
    }
    return parse;
}

// Materializes a parse. Copies go byte by byte so self-overlapping sources work.
inline std::vector<std::uint8_t> materialize(const Parse& parse) {
    std::vector<std::uint8_t> out;
    out.reserve(static_cast<std::size_t>(parse.n));
    for (std::size_t k = 0; k < parse.phrases.size(); ++k) {
        const Phrase& ph = parse.phrases[k];
        if (ph.is_literal()) {
            out.push_back(ph.literal_byte);
            continue;
        }
        if (ph.source == 0 || ph.source > out.size()) {
            throw DecodeError(k + 1, "source does not precede phrase");
        }
        std::size_t from = static_cast<std::size_t>(ph.source - 1);
        for (std::uint64_t t = 0; t < ph.length; ++t) {
            out.push_back(out[from++]);
        }
    }
    return out;
}

inline std::vector<std::uint8_t> decode(std::span<const std::uint8_t> stream) {
    return materialize(decode_parse(stream));
}

struct VerifyReport {
    bool ok = true;
    std::size_t phrase_index = 0; // 1-based, valid when !ok
    Position position = 0;        // phrase start (or n + 1 for tiling failures at the end)
    Position source = 0;
    std::string message;

    explicit operator bool() const { return ok; }
};

// Compares every phrase against S through the reader: literals against the
// byte at their position, copies against S[source..source+length-1].
// Whether the source is the leftmost occurrence is not checked.
inline VerifyReport verify(const Parse& parse, SequentialReader& reader) {
    auto fail = [](std::size_t idx, Position pos, Position src, std::string msg) {
        return VerifyReport{false, idx, pos, src, std::move(msg)};
    };
    if (parse.n != reader.size()) {
        return fail(0, 0, 0, "parse covers " + std::to_string(parse.n) + " bytes, source has " +
                                 std::to_string(reader.size()));
    }
    Cursor text = reader.begin_aux_pass();
    Position next = 1;
    for (std::size_t k = 0; k < parse.phrases.size(); ++k) {
        const Phrase& ph = parse.phrases[k];
        const std::size_t idx = k + 1;
        if (ph.start != next) {
            return fail(idx, ph.start, ph.source, "expected phrase to start at " + std::to_string(next));
        }
        if (ph.length == 0 || ph.end() > parse.n) {
            return fail(idx, ph.start, ph.source, "phrase runs past n");
        }
        if (ph.is_literal()) {
            if (ph.length != 1) {
                return fail(idx, ph.start, 0, "literal with length != 1");
            }
            if (text.next() != ph.literal_byte) {
                return fail(idx, ph.start, 0, "literal byte differs from S");
            }
        } else {
            if (ph.source == 0 || ph.source >= ph.start) {
                return fail(idx, ph.start, ph.source, "source does not precede start");
            }
            Cursor earlier = reader.begin_aux_scan();
            earlier.skip_to(ph.source);
            for (std::uint64_t t = 0; t < ph.length; ++t) {
                if (earlier.next() != text.next()) {
                    return fail(idx, ph.start, ph.source,
                                "copy differs from S at offset " + std::to_string(t));
                }
            }
        }
        next = ph.end() + 1;
    }
    if (next != parse.n + 1) {
        return fail(parse.phrases.size(), next, 0, "phrases do not cover S");
    }
    return {};
}

class VerificationExhausted : public std::runtime_error {
public:
    VerificationExhausted(unsigned attempts, VerifyReport last)
        : std::runtime_error("no valid parse after " + std::to_string(attempts) + " attempt(s); last failure at phrase " +
                             std::to_string(last.phrase_index) + ": " + last.message),
          attempts_(attempts),
          last_(std::move(last)) {}

    unsigned attempts() const { return attempts_; }
    const VerifyReport& last_report() const { return last_; }

private:
    unsigned attempts_;
    VerifyReport last_;
};

struct VerifiedParse {
    Parse parse;
    unsigned attempts = 0;
};

// Runs producer(attempt) for attempt = 0, 1, ... until a parse verifies, at
// most max_attempts times. The producer reseeds its fingerprints per attempt.
inline VerifiedParse verify_and_retry(const std::function<Parse(unsigned)>& producer, SequentialReader& reader,
                                      unsigned max_attempts) {
    if (max_attempts == 0) {
        throw std::invalid_argument("max_retries must be at least 1");
    }
    VerifyReport last;
    for (unsigned attempt = 0; attempt < max_attempts; ++attempt) {
        Parse candidate = producer(attempt);
        last = verify(candidate, reader);
        if (last.ok) {
            return {std::move(candidate), attempt + 1};
        }
    }
    throw VerificationExhausted(max_attempts, std::move(last));
}

} // namespace lzap
