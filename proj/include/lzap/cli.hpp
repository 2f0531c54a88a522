#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "codec.hpp"
#include "fingerprint.hpp"
#include "io.hpp"
#include "oracle.hpp"
#include "parser.hpp"

namespace lzap::cli {

// Stable exit codes.
inline constexpr int kOk = 0;
inline constexpr int kDataError = 1;
inline constexpr int kVerifyExhausted = 2;
inline constexpr int kUsage = 64;

struct RunReport {
    std::uint64_t n = 0;
    double epsilon = 0.0; // effective, after halving
    std::uint64_t phrases = 0;
    std::optional<std::uint64_t> z;
    std::optional<double> ratio;
    std::uint64_t schedule_length = 0;
    std::uint64_t passes = 0;
    std::uint64_t bytes_read = 0;
    std::uint64_t blocks_read = 0;
    std::uint64_t candidates_max = 0;
    std::uint64_t retries = 0;
    std::uint64_t seed = 0;
    double elapsed_ms = 0.0;

    nlohmann::json to_json() const {
        nlohmann::json j{
            {"n", n},
            {"epsilon", epsilon},
            {"phrases", phrases},
            {"schedule_length", schedule_length},
            {"passes", passes},
            {"bytes_read", bytes_read},
            {"blocks_read", blocks_read},
            {"candidates_max", candidates_max},
            {"retries", retries},
            {"seed", seed},
            {"elapsed_ms", elapsed_ms},
        };
        if (z) {
            j["z"] = *z;
        }
        if (ratio) {
            j["ratio"] = *ratio;
        }
        return j;
    }
};

namespace detail {

inline std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "' for reading");
    }
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw std::runtime_error("write to '" + path + "' failed");
    }
}

struct ParseFlags {
    double epsilon = 1.0;
    std::uint64_t seed = 0;
    std::uint64_t modulus = kMersenne61;
    std::size_t block_size = 4096;
    std::uint64_t short_table_mem = 0;
    unsigned max_retries = 3;
    bool halve_epsilon = false;

    void add_to(CLI::App& cmd) {
        cmd.add_option("--epsilon", epsilon, "Trade-off parameter in (0, 1]")->required();
        cmd.add_option("--seed", seed, "Fingerprint seed")->capture_default_str();
        cmd.add_option("--modulus", modulus, "Prime fingerprint modulus")->capture_default_str();
        cmd.add_option("--block-size", block_size, "Block size B in bytes")->capture_default_str();
        cmd.add_option("--short-table-mem", short_table_mem, "Memory budget for the short-length table (0 = off)")
            ->capture_default_str();
        cmd.add_option("--max-retries", max_retries, "Parse attempts before giving up")->capture_default_str();
        cmd.add_flag("--halve-epsilon", halve_epsilon, "Run with epsilon / 2");
    }

    // Empty when valid.
    std::string problem() const {
        if (!(epsilon > 0.0 && epsilon <= 1.0)) {
            return "--epsilon must lie in (0, 1]";
        }
        if (modulus < 5 || modulus >= (std::uint64_t{1} << 62) || !lzap::detail::is_prime(modulus)) {
            return "--modulus must be a prime in [5, 2^62)";
        }
        if (block_size < 1) {
            return "--block-size must be positive";
        }
        if (max_retries < 1) {
            return "--max-retries must be at least 1";
        }
        return {};
    }

    IoConfig io() const { return IoConfig{block_size, std::max<std::size_t>(block_size, 64 * 1024 / block_size * block_size)}; }

    ParseOptions options() const {
        ParseOptions opt;
        opt.modulus = modulus;
        opt.short_table_mem = short_table_mem;
        opt.max_retries = max_retries;
        return opt;
    }
};

inline RunReport run_parse(SequentialReader& reader, const ParseFlags& flags, Parse& out) {
    const auto t0 = std::chrono::steady_clock::now();
    Params params;
    params.n = reader.size();
    params.epsilon = flags.epsilon;
    params.halve_epsilon = flags.halve_epsilon;
    params.seed = flags.seed;
    ParseResult result = lzap::parse(reader, params, flags.options());
    const auto t1 = std::chrono::steady_clock::now();

    RunReport report;
    report.n = params.n;
    report.epsilon = result.effective_epsilon;
    report.phrases = result.parse.size();
    report.schedule_length = result.stats.schedule_length;
    report.passes = result.stats.sliding_passes;
    // Window passes of the accepted attempt only.
    report.bytes_read = result.stats.sliding_passes * params.n;
    const std::uint64_t b = flags.block_size;
    report.blocks_read = result.stats.sliding_passes * ((params.n + b - 1) / b);
    report.candidates_max = result.stats.candidates_max;
    report.retries = result.stats.retries();
    report.seed = flags.seed;
    report.elapsed_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    out = std::move(result.parse);
    return report;
}

} // namespace detail

inline int cmd_compress(const std::string& input, const std::string& output, const std::optional<std::string>& stats,
                        const detail::ParseFlags& flags, std::ostream& err) {
    Parse parse;
    RunReport report;
    try {
        SequentialReader reader = open_reader(input, flags.io());
        report = detail::run_parse(reader, flags, parse);
    } catch (const VerificationExhausted& e) {
        err << "compress: " << e.what() << "\n";
        return kVerifyExhausted;
    } catch (const std::exception& e) {
        err << "compress: " << e.what() << "\n";
        return kDataError;
    }
    try {
        detail::write_file(output, encode(parse));
        if (stats) {
            std::ofstream js(*stats);
            js << report.to_json().dump(2) << "\n";
            if (!js) {
                throw std::runtime_error("cannot write stats to '" + *stats + "'");
            }
        }
    } catch (const std::exception& e) {
        err << "compress: " << e.what() << "\n";
        return kDataError;
    }
    return kOk;
}

inline int cmd_decompress(const std::string& input, const std::string& output, std::ostream& err) {
    try {
        const std::vector<std::uint8_t> stream = detail::read_file(input);
        const std::vector<std::uint8_t> text = decode(stream);
        detail::write_file(output, text);
    } catch (const std::exception& e) {
        err << "decompress: " << e.what() << "\n";
        return kDataError;
    }
    return kOk;
}

inline int cmd_verify(const std::string& parse_path, const std::string& source_path, std::ostream& err) {
    try {
        const Parse parse = decode_parse(detail::read_file(parse_path));
        SequentialReader reader = open_reader(source_path);
        const VerifyReport report = verify(parse, reader);
        if (!report.ok) {
            err << "verify: mismatch at phrase " << report.phrase_index << " (start " << report.position
                << ", source " << report.source << "): " << report.message << "\n";
            return kDataError;
        }
    } catch (const std::exception& e) {
        err << "verify: " << e.what() << "\n";
        return kDataError;
    }
    return kOk;
}

inline int cmd_stats(const std::string& input, const detail::ParseFlags& flags, std::uint64_t oracle_limit,
                     oracle::Variant variant, std::ostream& out, std::ostream& err) {
    RunReport report;
    try {
        Parse parse;
        SequentialReader reader = open_reader(input, flags.io());
        report = detail::run_parse(reader, flags, parse);
        if (report.n <= oracle_limit) {
            const std::vector<std::uint8_t> text = detail::read_file(input);
            const auto exact = oracle::exact_lz77(text, variant, oracle_limit);
            report.z = exact.stats.z;
            if (exact.stats.z > 0) {
                report.ratio = static_cast<double>(report.phrases) / static_cast<double>(exact.stats.z);
            }
        }
    } catch (const VerificationExhausted& e) {
        err << "stats: " << e.what() << "\n";
        return kVerifyExhausted;
    } catch (const std::exception& e) {
        err << "stats: " << e.what() << "\n";
        return kDataError;
    }
    out << report.to_json().dump(2) << "\n";
    return kOk;
}

// Entry point shared by the lzap binary and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Approximate LZ77 parsing in small space"};
    app.require_subcommand(1);

    std::string input;
    std::string output;
    std::optional<std::string> stats_path;
    detail::ParseFlags compress_flags;
    auto* compress = app.add_subcommand("compress", "Parse a file and write the serialized parse");
    compress->add_option("--input", input, "Input file")->required();
    compress->add_option("--output", output, "Output parse file")->required();
    compress->add_option("--stats", stats_path, "Write the run report as JSON");
    compress_flags.add_to(*compress);

    auto* decompress = app.add_subcommand("decompress", "Decode a serialized parse");
    decompress->add_option("--input", input, "Serialized parse")->required();
    decompress->add_option("--output", output, "Decoded output file")->required();

    std::string parse_path;
    std::string source_path;
    auto* verify_cmd = app.add_subcommand("verify", "Check a serialized parse against its source");
    verify_cmd->add_option("--parse", parse_path, "Serialized parse")->required();
    verify_cmd->add_option("--source", source_path, "Original file")->required();

    detail::ParseFlags stats_flags;
    std::uint64_t oracle_limit = oracle::kDefaultLimit;
    std::string variant_name = "classic";
    auto* stats = app.add_subcommand("stats", "Print a run report, with exact LZ77 for small inputs");
    stats->add_option("--input", input, "Input file")->required();
    stats->add_option("--oracle-limit", oracle_limit, "Largest n for the exact LZ77 oracle")->capture_default_str();
    stats->add_option("--oracle-variant", variant_name, "classic | prefix-only")
        ->check(CLI::IsMember({"classic", "prefix-only"}))
        ->capture_default_str();
    stats_flags.add_to(*stats);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    if (compress->parsed()) {
        if (auto problem = compress_flags.problem(); !problem.empty()) {
            err << "compress: " << problem << "\n";
            return kUsage;
        }
        return cmd_compress(input, output, stats_path, compress_flags, err);
    }
    if (decompress->parsed()) {
        return cmd_decompress(input, output, err);
    }
    if (verify_cmd->parsed()) {
        return cmd_verify(parse_path, source_path, err);
    }
    if (auto problem = stats_flags.problem(); !problem.empty()) {
        err << "stats: " << problem << "\n";
        return kUsage;
    }
    return cmd_stats(input, stats_flags, oracle_limit, oracle::parse_variant(variant_name), out, err);
}

} // namespace lzap::cli
