#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "codec.hpp"
#include "fingerprint.hpp"
#include "firstocc.hpp"
#include "io.hpp"
#include "phrase.hpp"
#include "schedule.hpp"

namespace lzap {

// Hooks for tests and diagnostics; the default does nothing.
class ParseObserver {
public:
    virtual ~ParseObserver() = default;
    // Called after the first occurrences of a level are known; `index` is null
    // for levels answered by the short table.
    virtual void on_level(std::uint64_t /*ell*/, const FirstOccIndex* /*index*/) {}
    // `recorded` is the leftmost occurrence seen for the block's content.
    virtual void on_query(Position /*block_start*/, std::uint64_t /*ell*/, std::optional<Position> /*recorded*/,
                          std::optional<Position> /*answer*/) {}
};

// Collects phrases as they are decided. Copies arrive out of order; literal
// runs are materialized by one scan after the last level.
class PhraseSink {
public:
    void emit_copy(Position start, Position source, std::uint64_t length) {
        phrases_.push_back(Phrase::copy(start, source, length));
    }

    void emit_literals(Position start, Position end) { literal_runs_.push_back(Interval{start, end, 1}); }

    const std::vector<Phrase>& copies() const { return phrases_; }
    const std::vector<Interval>& literal_runs() const { return literal_runs_; }

    Parse finish(SequentialReader& reader, std::uint64_t n) && {
        Cursor cursor = reader.begin_scan();
        std::sort(literal_runs_.begin(), literal_runs_.end(),
                  [](const Interval& a, const Interval& b) { return a.start < b.start; });
        for (const Interval& run : literal_runs_) {
            if (cursor.position() != run.start) {
                cursor.skip_to(run.start);
            }
            for (Position p = run.start; p <= run.end; ++p) {
                phrases_.push_back(Phrase::literal(p, cursor.next()));
            }
        }
        std::sort(phrases_.begin(), phrases_.end(),
                  [](const Phrase& a, const Phrase& b) { return a.start < b.start; });
        return Parse{std::move(phrases_), n};
    }

private:
    std::vector<Phrase> phrases_;
    std::vector<Interval> literal_runs_;
};

// Decides one pending call parse(i, j, ell). Same-length recursive calls from
// the suffix and aligned-block cases are handled here with the level's
// answers; calls at the next length go to `requeue` with `next_length`.
// `query(block_start)` returns the source position when the block's content
// first occurs strictly before it.
template<typename Query>
void resolve_interval(const Interval& iv, std::uint64_t next_length, Query&& query, PhraseSink& out,
                      std::vector<Interval>& requeue) {
    const std::uint64_t ell = iv.pending_length;
    std::vector<std::pair<Position, Position>> stack{{iv.start, iv.end}};
    while (!stack.empty()) {
        const auto [i, j] = stack.back();
        stack.pop_back();
        if (j < i) {
            continue;
        }
        const std::uint64_t len = j - i + 1;
        if (ell == 1) {
            out.emit_literals(i, j);
            continue;
        }
        if (len < ell) {
            requeue.push_back(Interval{i, j, next_length});
            continue;
        }
        const Position suffix = j - ell + 1;
        if (const std::optional<Position> src = query(suffix)) {
            out.emit_copy(suffix, *src, ell);
            stack.emplace_back(i, suffix - 1);
            continue;
        }
        bool matched = false;
        for (std::uint64_t k = 0; k < len / ell; ++k) {
            const Position block = i + k * ell;
            if (const std::optional<Position> src = query(block)) {
                if (k > 0) {
                    requeue.push_back(Interval{i, block - 1, next_length});
                }
                out.emit_copy(block, *src, ell);
                stack.emplace_back(block + ell, j);
                matched = true;
                break;
            }
        }
        if (!matched) {
            requeue.push_back(Interval{i, j, next_length});
        }
    }
}

struct ParseOptions {
    std::uint64_t modulus = kMersenne61;
    std::uint64_t short_table_mem = 0; // 0 disables the short-length table
    unsigned short_table_slack = 1;
    unsigned max_retries = 3; // total attempts
    ParseObserver* observer = nullptr;
};

struct RunStats {
    std::uint64_t schedule_length = 0;
    std::uint64_t active_levels = 0;  // levels with at least one interval of length >= ell >= 2
    std::uint64_t sliding_passes = 0;
    std::uint64_t table_levels = 0;   // levels answered by the short table
    std::uint64_t candidates_max = 0; // distinct candidates at the busiest level
    std::uint64_t candidates_total = 0;
    std::uint64_t max_pending_intervals = 0;
    unsigned attempts = 0;
    std::uint32_t sigma = 0;
    std::vector<std::uint64_t> short_table_lengths;
    std::vector<std::uint64_t> short_table_dropped;
    IoStats io;

    unsigned retries() const { return attempts == 0 ? 0 : attempts - 1; }
};

// One attempt of the level-synchronized driver with a fixed fingerprint base.
// The result is not verified.
inline std::pair<Parse, RunStats> parse_once(SequentialReader& reader, const LengthSchedule& schedule,
                                             const FingerprintConfig& cfg, const ShortTable* short_table = nullptr,
                                             ParseObserver* observer = nullptr) {
    const std::uint64_t n = reader.size();
    RunStats stats;
    stats.schedule_length = schedule.size();
    PhraseSink sink;
    if (n == 0) {
        return {Parse{{}, 0}, stats};
    }
    if (schedule.empty() || schedule[0] != n) {
        throw std::invalid_argument("schedule does not start at n");
    }

    std::vector<Interval> pending{Interval{1, n, n}};
    for (std::size_t level = 0; level < schedule.size() && !pending.empty(); ++level) {
        const std::uint64_t ell = schedule[level];
        const std::uint64_t next = level + 1 < schedule.size() ? schedule[level + 1] : 1;
        stats.max_pending_intervals = std::max<std::uint64_t>(stats.max_pending_intervals, pending.size());

        std::vector<Interval> active;
        std::vector<Interval> deferred;
        for (const Interval& iv : pending) {
            if (iv.pending_length != ell) {
                throw std::logic_error("interval queued for the wrong level");
            }
            if (iv.length() >= ell) {
                active.push_back(iv);
            } else {
                deferred.push_back(Interval{iv.start, iv.end, next});
            }
        }
        if (active.empty()) {
            pending = std::move(deferred);
            continue;
        }
        if (ell == 1) {
            for (const Interval& iv : active) {
                resolve_interval(iv, next, [](Position) { return std::optional<Position>{}; }, sink, deferred);
            }
            pending = std::move(deferred);
            continue;
        }

        ++stats.active_levels;
        auto resolve_all = [&](const auto& answers) {
            auto query = [&](Position block) {
                const std::optional<Position> recorded = answers.recorded(block);
                const std::optional<Position> answer = answers.query(block);
                if (observer != nullptr) {
                    observer->on_query(block, ell, recorded, answer);
                }
                return answer;
            };
            for (const Interval& iv : active) {
                resolve_interval(iv, next, query, sink, deferred);
            }
        };

        if (short_table != nullptr && short_table->covers(ell)) {
            ++stats.table_levels;
            const TableLevel answers(active, ell, *short_table, reader);
            if (observer != nullptr) {
                observer->on_level(ell, nullptr);
            }
            resolve_all(answers);
        } else {
            FirstOccIndex index = collect_candidates(active, ell, cfg, reader);
            stats.candidates_max = std::max<std::uint64_t>(stats.candidates_max, index.distinct());
            stats.candidates_total += index.distinct();
            index = sliding_pass(std::move(index), reader, cfg);
            ++stats.sliding_passes;
            if (observer != nullptr) {
                observer->on_level(ell, &index);
            }
            resolve_all(index);
        }
        pending = std::move(deferred);
    }
    if (!pending.empty()) {
        throw std::logic_error("schedule ended with unresolved intervals");
    }
    Parse parse = std::move(sink).finish(reader, n);
    stats.io = reader.snapshot_stats();
    return {std::move(parse), stats};
}

struct ParseResult {
    Parse parse;
    RunStats stats;
    LengthSchedule schedule;
    double effective_epsilon = 0.0;
};

// Full run: schedule, optional short table, then attempts with fresh
// fingerprint bases until one parse verifies against S.
inline ParseResult parse(SequentialReader& reader, Params params, const ParseOptions& options = {}) {
    params.validate();
    if (params.n != reader.size()) {
        throw std::invalid_argument("params.n = " + std::to_string(params.n) + " but the input has " +
                                    std::to_string(reader.size()) + " bytes");
    }
    ParseResult result;
    result.effective_epsilon = params.effective_epsilon();
    result.schedule = build_schedule(params);

    ShortTable table;
    if (options.short_table_mem > 0 && params.n > 0) {
        params.sigma = measure_sigma(reader);
        table = build_short_table(reader, params, result.schedule, options.short_table_mem,
                                  options.short_table_slack);
    }

    RunStats last;
    auto producer = [&](unsigned attempt) {
        FingerprintConfig cfg = FingerprintConfig::from_seed(params.seed, attempt, options.modulus);
        cfg.warm(result.schedule.lengths);
        auto [p, st] = parse_once(reader, result.schedule, cfg, table.empty() ? nullptr : &table, options.observer);
        last = std::move(st);
        return p;
    };
    VerifiedParse verified = verify_and_retry(producer, reader, options.max_retries);

    result.parse = std::move(verified.parse);
    result.stats = std::move(last);
    result.stats.attempts = verified.attempts;
    result.stats.sigma = params.sigma;
    for (const auto& [ell, entries] : table.entries) {
        result.stats.short_table_lengths.push_back(ell);
    }
    result.stats.short_table_dropped = table.dropped;
    result.stats.io = reader.snapshot_stats();
    return result;
}

} // namespace lzap
