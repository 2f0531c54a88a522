#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "fingerprint.hpp"
#include "io.hpp"
#include "phrase.hpp"
#include "schedule.hpp"

namespace lzap {

struct Candidate {
    Fingerprint fingerprint;
    std::vector<Position> starts; // aligned block starts with this content, ascending
    std::optional<Position> first_occurrence;
};

// Per-level membership structure: candidate fingerprint -> leftmost window
// start with that fingerprint, plus the block start -> fingerprint map the
// resolver queries through.
class FirstOccIndex {
public:
    explicit FirstOccIndex(std::uint64_t level_length = 0) : level_length_(level_length) {}

    std::uint64_t level_length() const { return level_length_; }
    std::size_t distinct() const { return table_.size(); }
    std::size_t blocks() const { return block_fp_.size(); }
    const std::unordered_map<std::uint64_t, Candidate>& table() const { return table_; }

    void register_block(Position start, Fingerprint fp) {
        if (!block_fp_.try_emplace(start, fp.value).second) {
            return; // prefix- and suffix-aligned blocks can coincide
        }
        Candidate& c = table_[fp.value];
        c.fingerprint = fp;
        c.starts.push_back(start);
    }

    void finalize() {
        for (auto& [key, c] : table_) {
            std::sort(c.starts.begin(), c.starts.end());
        }
    }

    // Returns true when this window is the first match for a still-open candidate.
    bool record_window(Fingerprint fp, Position p) {
        auto it = table_.find(fp.value);
        if (it == table_.end() || it->second.first_occurrence) {
            return false;
        }
        it->second.first_occurrence = p;
        return true;
    }

    // Leftmost window start recorded for the block's content, if the pass saw one.
    std::optional<Position> recorded(Position block_start) const {
        return table_.at(fingerprint_at(block_start).value).first_occurrence;
    }

    Fingerprint fingerprint_at(Position block_start) const {
        auto it = block_fp_.find(block_start);
        if (it == block_fp_.end()) {
            throw std::logic_error("block at " + std::to_string(block_start) + " of length " +
                                   std::to_string(level_length_) + " is not a registered candidate");
        }
        return Fingerprint{it->second};
    }

    // Source position for the block when its first occurrence starts strictly
    // before it (so the occurrence ends before the block's end).
    std::optional<Position> query(Position block_start) const {
        const auto o = recorded(block_start);
        if (o && *o < block_start) {
            return o;
        }
        return std::nullopt;
    }

private:
    std::uint64_t level_length_;
    std::unordered_map<std::uint64_t, Candidate> table_;
    std::unordered_map<Position, std::uint64_t> block_fp_;
};

// Walks the intervals (disjoint, in any order) in one forward scan and calls
// emit(start, acc) for every prefix-aligned block S[i+k*ell..] and every
// suffix-aligned block S[..j-k*ell], 0 <= k < floor(len / ell). `push` folds
// one byte into the accumulator.
template<typename Acc, typename Push, typename Emit>
void scan_aligned_blocks(std::span<const Interval> intervals, std::uint64_t ell, Cursor& cursor, Acc zero, Push push,
                         Emit emit) {
    std::vector<Interval> sorted(intervals.begin(), intervals.end());
    std::sort(sorted.begin(), sorted.end(), [](const Interval& a, const Interval& b) { return a.start < b.start; });
    for (const Interval& iv : sorted) {
        const std::uint64_t len = iv.length();
        const std::uint64_t blocks = len / ell;
        if (blocks == 0) {
            continue;
        }
        const std::uint64_t shift = len % ell; // suffix blocks begin `shift` bytes in
        if (cursor.position() != iv.start) {
            cursor.skip_to(iv.start);
        }
        Acc prefix = zero;
        Acc suffix = zero;
        for (std::uint64_t t = 0; t < len; ++t) {
            const std::uint8_t c = cursor.next();
            if (t < blocks * ell) {
                prefix = push(prefix, c);
                if ((t + 1) % ell == 0) {
                    emit(iv.start + t + 1 - ell, prefix);
                    prefix = zero;
                }
            }
            if (shift != 0 && t >= shift) {
                suffix = push(suffix, c);
                if ((t - shift + 1) % ell == 0) {
                    emit(iv.start + t + 1 - ell, suffix);
                    suffix = zero;
                }
            }
        }
    }
}

namespace detail {

inline void check_level(std::span<const Interval> intervals, std::uint64_t ell) {
    if (ell < 1) {
        throw std::invalid_argument("level length must be positive");
    }
    for (const Interval& iv : intervals) {
        if (iv.pending_length != ell || iv.length() < ell) {
            throw std::invalid_argument("interval [" + std::to_string(iv.start) + ", " + std::to_string(iv.end) +
                                        "] is not active at length " + std::to_string(ell));
        }
    }
}

} // namespace detail

// Fingerprints every aligned block of every interval in one ranged scan,
// billed to the reader's candidate-scan counters.
inline FirstOccIndex collect_candidates(std::span<const Interval> intervals, std::uint64_t ell,
                                        const FingerprintConfig& cfg, SequentialReader& reader) {
    detail::check_level(intervals, ell);
    FirstOccIndex index(ell);
    Cursor cursor = reader.begin_scan();
    scan_aligned_blocks(
        intervals, ell, cursor, Fingerprint{}, [&cfg](Fingerprint fp, std::uint8_t c) { return append(fp, c, cfg); },
        [&index](Position start, Fingerprint fp) { index.register_block(start, fp); });
    index.finalize();
    return index;
}

// One window pass over S: for p = 1 .. n - ell + 1, the first window whose
// fingerprint matches a candidate becomes that candidate's first occurrence.
// Once every candidate is resolved the remaining bytes are still read, so
// each pass costs exactly ceil(n / B) blocks.
inline FirstOccIndex sliding_pass(FirstOccIndex index, SequentialReader& reader, const FingerprintConfig& cfg) {
    const std::uint64_t ell = index.level_length();
    const std::uint64_t n = reader.size();
    WindowStream window = reader.begin_window_pass();
    if (ell == 0 || ell > n) {
        window.lead.drain();
        return index;
    }

    // Bit filter over fingerprint values to skip most hash lookups.
    const unsigned bits = std::max(6u, static_cast<unsigned>(std::bit_width(index.distinct() * 8)));
    const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
    std::vector<std::uint64_t> filter((mask >> 6) + 1, 0);
    for (const auto& [key, c] : index.table()) {
        const std::uint64_t h = detail::splitmix64(key) & mask;
        filter[h >> 6] |= std::uint64_t{1} << (h & 63);
    }

    std::size_t open = index.distinct();
    auto probe = [&](Fingerprint fp, Position p) {
        const std::uint64_t h = detail::splitmix64(fp.value) & mask;
        if ((filter[h >> 6] >> (h & 63)) & 1) {
            if (index.record_window(fp, p)) {
                --open;
            }
        }
    };

    Fingerprint fp;
    for (std::uint64_t t = 0; t < ell; ++t) {
        fp = append(fp, window.next_in(), cfg);
    }
    probe(fp, 1);
    const Roller roller(cfg, ell);
    for (Position p = 2; p + ell - 1 <= n; ++p) {
        if (open == 0) {
            break;
        }
        fp = roller.roll(fp, window.next_out(), window.next_in());
        probe(fp, p);
    }
    window.lead.drain();
    return index;
}

// Exact first occurrences for the short scheduled lengths, keyed by the
// packed bytes of each substring.
struct ShortTable {
    std::uint64_t mem_budget = 0;
    unsigned slack = 0;
    std::uint32_t sigma = 0;
    std::uint64_t threshold = 0; // longest covered length, 0 when empty
    std::map<std::uint64_t, std::unordered_map<std::uint64_t, Position>> entries;
    std::vector<std::uint64_t> dropped;

    bool empty() const { return entries.empty(); }
    bool covers(std::uint64_t ell) const { return entries.count(ell) != 0; }

    std::size_t entry_count() const {
        std::size_t total = 0;
        for (const auto& [ell, m] : entries) {
            total += m.size();
        }
        return total;
    }

    std::optional<Position> first_occurrence(std::uint64_t ell, std::uint64_t packed) const {
        auto level = entries.find(ell);
        if (level == entries.end()) {
            return std::nullopt;
        }
        auto it = level->second.find(packed);
        if (it == level->second.end()) {
            return std::nullopt;
        }
        return it->second;
    }
};

inline constexpr std::uint64_t kMaxPackedLength = 8;

inline std::uint64_t pack_bytes(std::span<const std::uint8_t> bytes) {
    std::uint64_t key = 0;
    for (std::uint8_t c : bytes) {
        key = (key << 8) | c;
    }
    return key;
}

// Number of distinct byte values, from one auxiliary pass.
inline std::uint32_t measure_sigma(SequentialReader& reader) {
    std::vector<bool> seen(256, false);
    std::uint32_t sigma = 0;
    Cursor cursor = reader.begin_aux_pass();
    while (cursor.has_next()) {
        const std::uint8_t c = cursor.next();
        if (!seen[c]) {
            seen[c] = true;
            ++sigma;
        }
    }
    return sigma;
}

// Covers the scheduled lengths ell with 2 <= ell < log_sigma(M) - c (and at
// most 8 bytes). The entry budget is M / sigma^c; when it overflows, the
// longest covered length is dropped.
inline ShortTable build_short_table(SequentialReader& reader, const Params& params, const LengthSchedule& schedule,
                                    std::uint64_t mem_budget, unsigned slack) {
    ShortTable table;
    table.mem_budget = mem_budget;
    table.slack = slack;
    table.sigma = params.sigma;
    if (mem_budget == 0 || schedule.empty()) {
        return table;
    }
    const double sigma = std::max<double>(2.0, params.sigma);
    const double limit = std::log(static_cast<double>(mem_budget)) / std::log(sigma) - slack;
    std::vector<std::uint64_t> lengths;
    for (std::uint64_t ell : schedule.lengths) {
        if (ell >= 2 && ell <= kMaxPackedLength && static_cast<double>(ell) < limit) {
            lengths.push_back(ell);
        }
    }
    if (lengths.empty()) {
        return table;
    }
    std::sort(lengths.begin(), lengths.end());
    const double budget = std::floor(static_cast<double>(mem_budget) / std::pow(sigma, slack));

    for (std::uint64_t ell : lengths) {
        table.entries[ell];
    }
    std::size_t total = 0;
    std::uint64_t window = 0;
    Cursor cursor = reader.begin_aux_pass();
    for (Position p = 1; cursor.has_next(); ++p) {
        window = (window << 8) | cursor.next();
        for (auto it = table.entries.begin(); it != table.entries.end(); ++it) {
            const std::uint64_t ell = it->first;
            if (p < ell) {
                break;
            }
            const std::uint64_t key = ell == 8 ? window : window & ((std::uint64_t{1} << (8 * ell)) - 1);
            if (it->second.try_emplace(key, p - ell + 1).second) {
                ++total;
            }
        }
        while (total > budget && !table.entries.empty()) {
            auto last = std::prev(table.entries.end());
            total -= last->second.size();
            table.dropped.push_back(last->first);
            table.entries.erase(last);
        }
    }
    table.threshold = table.entries.empty() ? 0 : table.entries.rbegin()->first;
    return table;
}

// Table-backed answers for one level: packed keys of the aligned blocks are
// gathered in one ranged scan and looked up exactly.
class TableLevel {
public:
    TableLevel(std::span<const Interval> intervals, std::uint64_t ell, const ShortTable& table,
               SequentialReader& reader)
        : ell_(ell) {
        detail::check_level(intervals, ell);
        if (!table.covers(ell)) {
            throw std::logic_error("short table does not cover length " + std::to_string(ell));
        }
        Cursor cursor = reader.begin_scan();
        scan_aligned_blocks(
            intervals, ell, cursor, std::uint64_t{0},
            [](std::uint64_t key, std::uint8_t c) { return (key << 8) | c; },
            [&](Position start, std::uint64_t key) {
                const auto o = table.first_occurrence(ell, key);
                if (!o) {
                    throw std::logic_error("short table is missing a substring of S");
                }
                first_.emplace(start, *o);
            });
    }

    std::uint64_t level_length() const { return ell_; }
    std::size_t blocks() const { return first_.size(); }

    std::optional<Position> recorded(Position block_start) const {
        auto it = first_.find(block_start);
        if (it == first_.end()) {
            throw std::logic_error("block at " + std::to_string(block_start) + " of length " + std::to_string(ell_) +
                                   " is not a registered candidate");
        }
        return it->second;
    }

    std::optional<Position> query(Position block_start) const {
        const auto o = recorded(block_start);
        if (o && *o < block_start) {
            return o;
        }
        return std::nullopt;
    }

private:
    std::uint64_t ell_;
    std::unordered_map<Position, Position> first_;
};

} // namespace lzap
