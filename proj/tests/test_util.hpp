#pragma once

#include <unistd.h>

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lzap/lzap.hpp"

namespace lzap::testing {

inline const std::string kExample = "ababbabbaabbabbaababa";

inline std::vector<std::uint8_t> bytes(std::string_view s) { return {s.begin(), s.end()}; }

inline std::span<const std::uint8_t> view(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

inline std::vector<std::uint8_t> random_string(std::mt19937_64& rng, std::size_t n, unsigned sigma) {
    std::uniform_int_distribution<unsigned> pick(0, sigma - 1);
    std::vector<std::uint8_t> s(n);
    for (auto& c : s) {
        c = static_cast<std::uint8_t>('a' + pick(rng));
    }
    return s;
}

// `copies` concatenated copies of a random base, each with point mutations at `rate`.
inline std::vector<std::uint8_t> repetitive_corpus(std::uint64_t seed, std::size_t base_len, std::size_t copies,
                                                   double rate, unsigned sigma = 26) {
    std::mt19937_64 rng(seed);
    const std::vector<std::uint8_t> base = random_string(rng, base_len, sigma);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<unsigned> pick(0, sigma - 1);
    std::vector<std::uint8_t> out;
    out.reserve(base_len * copies);
    for (std::size_t c = 0; c < copies; ++c) {
        for (std::uint8_t b : base) {
            out.push_back(c > 0 && coin(rng) < rate ? static_cast<std::uint8_t>('a' + pick(rng)) : b);
        }
    }
    return out;
}

inline ParseResult run_parse(std::span<const std::uint8_t> s, Params params, const ParseOptions& opt = {},
                             IoConfig io = {}) {
    params.n = s.size();
    SequentialReader reader = SequentialReader::over(s, io);
    return parse(reader, params, opt);
}

inline Params eps(double epsilon, std::uint64_t seed = 0) {
    Params p;
    p.epsilon = epsilon;
    p.seed = seed;
    return p;
}

inline std::string render(const Parse& parse) {
    std::string out;
    for (const Phrase& ph : parse.phrases) {
        if (!out.empty()) {
            out += ",";
        }
        if (ph.is_literal()) {
            out += "<0," + std::string(1, static_cast<char>(ph.literal_byte)) + ">";
        } else {
            out += "<" + std::to_string(ph.source) + "," + std::to_string(ph.length) + ">";
        }
    }
    return out;
}

} // namespace lzap::testing

#include <filesystem>
#include <fstream>

namespace lzap::testing {

// Temporary file removed on destruction.
class TempFile {
public:
    explicit TempFile(std::span<const std::uint8_t> content = {}, const std::string& tag = "f") {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("lzap_test_" + std::to_string(::getpid()) + "_" + tag + "_" + std::to_string(counter++));
        std::ofstream out(path_, std::ios::binary);
        out.write(reinterpret_cast<const char*>(content.data()), static_cast<std::streamsize>(content.size()));
    }
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    TempFile(const TempFile&) = delete;
    TempFile& operator=(const TempFile&) = delete;

    std::string path() const { return path_.string(); }

    std::vector<std::uint8_t> read() const {
        std::ifstream in(path_, std::ios::binary);
        return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    }

private:
    std::filesystem::path path_;
};

} // namespace lzap::testing
