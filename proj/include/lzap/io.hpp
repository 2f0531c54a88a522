#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "phrase.hpp"

namespace lzap {

struct IoConfig {
    std::size_t block_size = 4096;
    std::size_t buffer_size = 64 * 1024;

    void validate() const {
        if (block_size < 1) {
            throw std::invalid_argument("block size must be at least 1");
        }
        if (buffer_size < block_size) {
            throw std::invalid_argument("buffer size must be at least one block");
        }
    }
};

// Window passes are what the parse bound counts. Candidate scans, the lagging
// window cursor and auxiliary traversals (verification, alphabet measurement,
// short table) are billed to their own counters.
struct IoStats {
    std::uint64_t passes = 0;
    std::uint64_t bytes_read = 0;
    std::uint64_t blocks_read = 0;
    std::uint64_t candidate_scan_bytes = 0;
    std::uint64_t candidate_scan_blocks = 0;
    std::uint64_t lag_blocks_read = 0;
    std::uint64_t aux_passes = 0;
    std::uint64_t aux_bytes_read = 0;
    std::uint64_t aux_blocks_read = 0;

    friend bool operator==(const IoStats&, const IoStats&) = default;
};

class ByteSource {
public:
    virtual ~ByteSource() = default;
    virtual std::uint64_t size() const = 0;
    // Fills `out` from 0-based `offset`; the caller never reads past size().
    virtual void read_at(std::uint64_t offset, std::span<std::uint8_t> out) const = 0;
};

class MemorySource final : public ByteSource {
public:
    explicit MemorySource(std::vector<std::uint8_t> bytes) : owned_(std::move(bytes)), view_(owned_) {}
    // Non-owning; the bytes must outlive the source.
    explicit MemorySource(std::span<const std::uint8_t> view) : view_(view) {}

    std::uint64_t size() const override { return view_.size(); }

    void read_at(std::uint64_t offset, std::span<std::uint8_t> out) const override {
        std::copy_n(view_.begin() + static_cast<std::ptrdiff_t>(offset), out.size(), out.begin());
    }

private:
    std::vector<std::uint8_t> owned_;
    std::span<const std::uint8_t> view_;
};

class FileSource final : public ByteSource {
public:
    explicit FileSource(const std::string& path) : file_(std::fopen(path.c_str(), "rb"), &std::fclose), path_(path) {
        if (!file_) {
            throw std::runtime_error("cannot open '" + path + "' for reading");
        }
        if (std::fseek(file_.get(), 0, SEEK_END) != 0) {
            throw std::runtime_error("cannot seek in '" + path + "'");
        }
        const long end = std::ftell(file_.get());
        if (end < 0) {
            throw std::runtime_error("cannot determine size of '" + path + "'");
        }
        size_ = static_cast<std::uint64_t>(end);
    }

    std::uint64_t size() const override { return size_; }

    void read_at(std::uint64_t offset, std::span<std::uint8_t> out) const override {
        if (std::fseek(file_.get(), static_cast<long>(offset), SEEK_SET) != 0 ||
            std::fread(out.data(), 1, out.size(), file_.get()) != out.size()) {
            throw std::runtime_error("short read from '" + path_ + "'");
        }
    }

private:
    std::unique_ptr<std::FILE, int (*)(std::FILE*)> file_;
    std::string path_;
    std::uint64_t size_ = 0;
};

// Forward-only buffered cursor. Loads start on block boundaries so a full
// traversal touches exactly ceil(n / B) blocks.
class Cursor {
public:
    struct Meter {
        std::uint64_t* bytes = nullptr;
        std::uint64_t* blocks = nullptr;
    };

    Cursor(const ByteSource* source, const IoConfig& cfg, Meter meter)
        : source_(source),
          block_(cfg.block_size),
          chunk_(std::max(cfg.block_size, cfg.buffer_size / cfg.block_size * cfg.block_size)),
          size_(source->size()),
          meter_(meter) {}

    bool has_next() const { return pos_ < size_; }
    // 1-based position of the byte next() will return.
    Position position() const { return pos_ + 1; }
    std::uint64_t size() const { return size_; }

    // `shadow` lets a trailing cursor reuse bytes still buffered by a leading one.
    std::uint8_t next(const Cursor* shadow = nullptr) {
        if (pos_ - cur_.begin < cur_.bytes.size() && pos_ >= cur_.begin) {
            return cur_.bytes[pos_++ - cur_.begin];
        }
        if (shadow != nullptr) {
            if (auto b = shadow->peek_buffered(pos_)) {
                ++pos_;
                return *b;
            }
        }
        load(pos_);
        return cur_.bytes[pos_++ - cur_.begin];
    }

    // Moves forward to 1-based position `p` without reading the bytes in between.
    void skip_to(Position p) {
        if (p == 0 || p - 1 < pos_) {
            throw std::logic_error("cursor can only move forward");
        }
        pos_ = std::min<std::uint64_t>(p - 1, size_);
    }

    // Reads the remaining bytes of the source.
    void drain() {
        while (pos_ < size_) {
            if (pos_ < cur_.begin || pos_ - cur_.begin >= cur_.bytes.size()) {
                load(pos_);
            }
            pos_ = cur_.begin + cur_.bytes.size();
        }
    }

private:
    struct Chunk {
        std::uint64_t begin = 0;
        std::vector<std::uint8_t> bytes;

        bool covers(std::uint64_t p) const { return p >= begin && p - begin < bytes.size(); }
    };

    std::optional<std::uint8_t> peek_buffered(std::uint64_t p) const {
        if (cur_.covers(p)) {
            return cur_.bytes[p - cur_.begin];
        }
        if (prev_.covers(p)) {
            return prev_.bytes[p - prev_.begin];
        }
        return std::nullopt;
    }

    void load(std::uint64_t p) {
        std::swap(prev_, cur_);
        cur_.begin = p - p % block_;
        const std::uint64_t len = std::min<std::uint64_t>(chunk_, size_ - cur_.begin);
        cur_.bytes.resize(len);
        source_->read_at(cur_.begin, cur_.bytes);
        if (meter_.bytes != nullptr) {
            *meter_.bytes += len;
        }
        if (meter_.blocks != nullptr) {
            *meter_.blocks += (len + block_ - 1) / block_;
        }
    }

    const ByteSource* source_;
    std::uint64_t block_;
    std::uint64_t chunk_;
    std::uint64_t size_;
    Meter meter_;
    std::uint64_t pos_ = 0;
    Chunk cur_;
    Chunk prev_;
};

// A leading cursor feeding bytes into the window and a trailing one, ell
// bytes behind, supplying the bytes that leave it.
struct WindowStream {
    Cursor lead;
    Cursor lag;

    std::uint8_t next_in() { return lead.next(); }
    std::uint8_t next_out() { return lag.next(&lead); }
};

// Read-only sequential access to S with pass, byte and block accounting. The
// parse driver only ever sees forward cursors.
class SequentialReader {
public:
    SequentialReader(std::unique_ptr<ByteSource> source, IoConfig cfg = {})
        : source_(std::move(source)), cfg_(cfg), stats_(std::make_unique<IoStats>()) {
        cfg_.validate();
    }

    static SequentialReader open_file(const std::string& path, IoConfig cfg = {}) {
        return SequentialReader(std::make_unique<FileSource>(path), cfg);
    }

    static SequentialReader over(std::span<const std::uint8_t> bytes, IoConfig cfg = {}) {
        return SequentialReader(std::make_unique<MemorySource>(bytes), cfg);
    }

    static SequentialReader owning(std::vector<std::uint8_t> bytes, IoConfig cfg = {}) {
        return SequentialReader(std::make_unique<MemorySource>(std::move(bytes)), cfg);
    }

    std::uint64_t size() const { return source_->size(); }
    const IoConfig& config() const { return cfg_; }

    // Rewinds to position 1 and counts one traversal.
    Cursor begin_pass() {
        ++stats_->passes;
        return Cursor(source_.get(), cfg_, {&stats_->bytes_read, &stats_->blocks_read});
    }

    WindowStream begin_window_pass() {
        Cursor lead = begin_pass();
        Cursor lag(source_.get(), cfg_, {nullptr, &stats_->lag_blocks_read});
        return WindowStream{std::move(lead), std::move(lag)};
    }

    // Ranged, forward-only scan billed as candidate collection.
    Cursor begin_scan() {
        return Cursor(source_.get(), cfg_, {&stats_->candidate_scan_bytes, &stats_->candidate_scan_blocks});
    }

    // Full traversal outside the parse proper (verification, alphabet, short table).
    Cursor begin_aux_pass() {
        ++stats_->aux_passes;
        return begin_aux_scan();
    }

    Cursor begin_aux_scan() {
        return Cursor(source_.get(), cfg_, {&stats_->aux_bytes_read, &stats_->aux_blocks_read});
    }

    IoStats snapshot_stats() const { return *stats_; }
    void reset_stats() { *stats_ = IoStats{}; }

private:
    std::unique_ptr<ByteSource> source_;
    IoConfig cfg_;
    std::unique_ptr<IoStats> stats_;
};

inline SequentialReader open_reader(const std::string& path, IoConfig cfg = {}) {
    return SequentialReader::open_file(path, cfg);
}

inline SequentialReader open_reader(std::span<const std::uint8_t> bytes, IoConfig cfg = {}) {
    return SequentialReader::over(bytes, cfg);
}

inline IoStats snapshot_stats(const SequentialReader& reader) { return reader.snapshot_stats(); }

} // namespace lzap
