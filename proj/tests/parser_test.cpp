#include <gtest/gtest.h>

#include <set>

#include "test_util.hpp"

using namespace lzap;
using lzap::testing::kExample;
using lzap::testing::render;
using lzap::testing::view;

namespace {

void expect_valid(const Parse& parse, std::span<const std::uint8_t> s) {
    ASSERT_EQ(parse.n, s.size());
    Position next = 1;
    for (const Phrase& ph : parse.phrases) {
        ASSERT_EQ(ph.start, next);
        if (ph.is_literal()) {
            ASSERT_EQ(ph.literal_byte, s[ph.start - 1]);
        } else {
            ASSERT_GE(ph.source, 1u);
            ASSERT_LT(ph.source, ph.start);
            for (std::uint64_t t = 0; t < ph.length; ++t) {
                ASSERT_EQ(s[ph.source - 1 + t], s[ph.start - 1 + t]);
            }
        }
        next = ph.end() + 1;
    }
    ASSERT_EQ(next, s.size() + 1);
}

// Checks every query against the candidate set built for its level.
class SoundnessObserver : public ParseObserver {
public:
    void on_level(std::uint64_t ell, const FirstOccIndex* index) override {
        ell_ = ell;
        registered_.clear();
        table_level_ = index == nullptr;
        if (index != nullptr) {
            for (const auto& [key, c] : index->table()) {
                registered_.insert(c.starts.begin(), c.starts.end());
            }
        }
    }

    void on_query(Position block, std::uint64_t ell, std::optional<Position>, std::optional<Position>) override {
        ++queries;
        EXPECT_EQ(ell, ell_);
        if (!table_level_) {
            EXPECT_TRUE(registered_.count(block)) << "block " << block << " at length " << ell;
        }
    }

    std::size_t queries = 0;

private:
    std::uint64_t ell_ = 0;
    bool table_level_ = false;
    std::set<Position> registered_;
};

} // namespace

TEST(Parse, WorkedExample) {
    const auto r = lzap::testing::run_parse(view(kExample), Params::with_step(21, 4.0));
    EXPECT_EQ(render(r.parse), "<0,a>,<0,b>,<1,2>,<2,5>,<3,9>,<1,3>");
    std::vector<std::uint64_t> lengths;
    for (const Phrase& ph : r.parse.phrases) {
        lengths.push_back(ph.length);
    }
    EXPECT_EQ(lengths, (std::vector<std::uint64_t>{1, 1, 2, 5, 9, 3}));
    EXPECT_EQ(r.stats.sliding_passes, 10u);
    EXPECT_EQ(r.stats.attempts, 1u);
}

TEST(Parse, WorkedExampleFromEpsilon) {
    Params p;
    p.epsilon = std::log(4.0) / std::log(21.0);
    const auto r = lzap::testing::run_parse(view(kExample), p);
    EXPECT_EQ(render(r.parse), "<0,a>,<0,b>,<1,2>,<2,5>,<3,9>,<1,3>");
}

TEST(Parse, SingleByteAndEmpty) {
    const auto one = lzap::testing::run_parse(view("a"), lzap::testing::eps(1.0));
    EXPECT_EQ(render(one.parse), "<0,a>");
    const auto none = lzap::testing::run_parse({}, lzap::testing::eps(0.5));
    EXPECT_TRUE(none.parse.phrases.empty());
    EXPECT_EQ(none.parse.n, 0u);
}

TEST(Parse, PeriodicStringRoundTripAndFloor) {
    std::string s;
    for (int i = 0; i < 500; ++i) {
        s += "ab";
    }
    const auto r = lzap::testing::run_parse(view(s), lzap::testing::eps(1.0));
    EXPECT_EQ(materialize(r.parse), lzap::testing::bytes(s));
    const auto z = oracle::exact_lz77(s).stats.z;
    EXPECT_GE(r.parse.size(), z);
}

TEST(Parse, RejectsMismatchedLength) {
    const auto s = lzap::testing::bytes("abc");
    auto reader = SequentialReader::over(s);
    Params p;
    p.n = 4;
    EXPECT_THROW(parse(reader, p), std::invalid_argument);
}

TEST(ResolveInterval, CopyInTheMiddle) {
    const auto s = lzap::testing::bytes(kExample);
    auto reader = SequentialReader::over(s);
    const auto cfg = FingerprintConfig::from_seed(0);
    const std::vector<Interval> ivs{{1, 21, 9}};
    const FirstOccIndex index = sliding_pass(collect_candidates(ivs, 9, cfg, reader), reader, cfg);
    PhraseSink sink;
    std::vector<Interval> requeue;
    resolve_interval(ivs[0], 7, [&](Position b) { return index.query(b); }, sink, requeue);
    ASSERT_EQ(sink.copies().size(), 1u);
    EXPECT_EQ(sink.copies()[0], Phrase::copy(10, 3, 9));
    // Left part goes to the next length; the right part is too short at 9 and follows.
    std::sort(requeue.begin(), requeue.end(), [](auto& a, auto& b) { return a.start < b.start; });
    EXPECT_EQ(requeue, (std::vector<Interval>{{1, 9, 7}, {19, 21, 7}}));
}

TEST(ResolveInterval, SuffixCopy) {
    const auto s = lzap::testing::bytes(kExample);
    auto reader = SequentialReader::over(s);
    const auto cfg = FingerprintConfig::from_seed(0);
    const std::vector<Interval> ivs{{1, 9, 5}};
    const FirstOccIndex index = sliding_pass(collect_candidates(ivs, 5, cfg, reader), reader, cfg);
    PhraseSink sink;
    std::vector<Interval> requeue;
    resolve_interval(ivs[0], 4, [&](Position b) { return index.query(b); }, sink, requeue);
    ASSERT_EQ(sink.copies().size(), 1u);
    EXPECT_EQ(sink.copies()[0], Phrase::copy(5, 2, 5));
    EXPECT_EQ(requeue, (std::vector<Interval>{{1, 4, 4}}));
}

TEST(ResolveInterval, LiteralsAtLengthOne) {
    PhraseSink sink;
    std::vector<Interval> requeue;
    resolve_interval(Interval{5, 7, 1}, 1, [](Position) -> std::optional<Position> { ADD_FAILURE(); return {}; },
                     sink, requeue);
    EXPECT_TRUE(sink.copies().empty());
    EXPECT_TRUE(requeue.empty());
    ASSERT_EQ(sink.literal_runs().size(), 1u);
    const auto s = lzap::testing::bytes(kExample);
    auto reader = SequentialReader::over(s);
    PhraseSink copy = sink;
    const Parse p = std::move(copy).finish(reader, 21);
    ASSERT_EQ(p.phrases.size(), 3u);
    EXPECT_EQ(p.phrases[0], Phrase::literal(5, 'b'));
    EXPECT_EQ(p.phrases[1], Phrase::literal(6, 'a'));
    EXPECT_EQ(p.phrases[2], Phrase::literal(7, 'b'));
}

TEST(ResolveInterval, NoMatchRequeuesWhole) {
    PhraseSink sink;
    std::vector<Interval> requeue;
    resolve_interval(Interval{3, 20, 6}, 5, [](Position) { return std::optional<Position>{}; }, sink, requeue);
    EXPECT_EQ(requeue, (std::vector<Interval>{{3, 20, 5}}));
    requeue.clear();
    resolve_interval(Interval{3, 6, 6}, 5, [](Position) { return std::optional<Position>{}; }, sink, requeue);
    EXPECT_EQ(requeue, (std::vector<Interval>{{3, 6, 5}}));
}

TEST(Parse, InvariantsOnRandomInputs) {
    std::mt19937_64 rng(321);
    for (int rep = 0; rep < 300; ++rep) {
        const std::size_t n = rng() % 600;
        const unsigned sigma = std::vector<unsigned>{1, 2, 4, 26}[rng() % 4];
        const auto s = lzap::testing::random_string(rng, n, sigma);
        const double e = std::vector<double>{0.25, 0.5, 1.0}[rng() % 3];
        SoundnessObserver obs;
        ParseOptions opt;
        opt.observer = &obs;
        const auto r = lzap::testing::run_parse(s, lzap::testing::eps(e, rep), opt);
        expect_valid(r.parse, s);
        EXPECT_GE(r.parse.size(), oracle::exact_lz77(s).stats.z);
        EXPECT_GE(r.parse.size(), oracle::exact_lz77(s, oracle::Variant::prefix_only).stats.z);
        EXPECT_EQ(r.stats.sliding_passes, r.stats.active_levels);
        EXPECT_LE(r.stats.sliding_passes, r.stats.schedule_length);
        const auto again = lzap::testing::run_parse(s, lzap::testing::eps(e, rep));
        EXPECT_EQ(again.parse, r.parse);
    }
}

TEST(Parse, ShortTableGivesSameParseWithFewerPasses) {
    std::mt19937_64 rng(55);
    for (int rep = 0; rep < 40; ++rep) {
        const auto s = lzap::testing::repetitive_corpus(rep, 200, 10, 0.02, 4);
        ParseOptions opt;
        opt.short_table_mem = 1 << 16;
        SoundnessObserver obs;
        opt.observer = &obs;
        const auto with_table = lzap::testing::run_parse(s, lzap::testing::eps(0.5, rep), opt);
        const auto without = lzap::testing::run_parse(s, lzap::testing::eps(0.5, rep));
        EXPECT_EQ(with_table.parse, without.parse);
        EXPECT_EQ(with_table.stats.sigma, 4u);
        EXPECT_FALSE(with_table.stats.short_table_lengths.empty());
        EXPECT_EQ(with_table.stats.sliding_passes + with_table.stats.table_levels, with_table.stats.active_levels);
        EXPECT_LT(with_table.stats.sliding_passes, without.stats.sliding_passes);
    }
}

TEST(Parse, HalvedEpsilonIsValid) {
    const auto s = lzap::testing::repetitive_corpus(3, 300, 8, 0.01);
    Params p = lzap::testing::eps(0.8);
    p.halve_epsilon = true;
    const auto r = lzap::testing::run_parse(s, p);
    EXPECT_DOUBLE_EQ(r.effective_epsilon, 0.4);
    expect_valid(r.parse, s);
}

TEST(Parse, CollisionsAreRetried) {
    // A tiny modulus makes bad first occurrences likely; every returned parse
    // must still verify.
    const auto s = lzap::testing::repetitive_corpus(1, 64, 20, 0.0, 2);
    ParseOptions opt;
    opt.modulus = 251;
    opt.max_retries = 50;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        try {
            const auto r = lzap::testing::run_parse(s, lzap::testing::eps(0.5, seed), opt);
            expect_valid(r.parse, s);
        } catch (const VerificationExhausted&) {
        }
    }
}
