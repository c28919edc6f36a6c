#pragma once

// Versioned binary container shared by every persisted artifact.
//
// Layout (all integers little-endian):
//   magic   8 bytes  "SEMHASH\0"
//   version u32      kFormatVersion
//   kind    u32      ArtifactKind
//   length  u64      payload byte count
//   payload
//   check   u64      FNV-1a 64 of the payload

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace semhash::io {

inline constexpr std::uint32_t kFormatVersion = 1;

enum class ArtifactKind : std::uint32_t {
    vector_store = 1,
    network = 2,
    rbm_stack = 3,
    hash_index = 4,
};

std::string_view kind_name(ArtifactKind kind) noexcept;

class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
    void f64(double v);
    void str(std::string_view s);
    void f64s(std::span<const double> v);
    void u32s(std::span<const std::uint32_t> v);
    void u64s(std::span<const std::uint64_t> v);

    const std::vector<std::uint8_t>& bytes() const noexcept { return buf_; }

private:
    std::vector<std::uint8_t> buf_;
};

/// Bounds-checked reader; throws std::runtime_error on truncation.
class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    double f64();
    std::string str();
    std::vector<double> f64s();
    std::vector<std::uint32_t> u32s();
    std::vector<std::uint64_t> u64s();

    bool at_end() const noexcept { return pos_ == data_.size(); }
    void expect_end() const;

private:
    void need(std::size_t n) const;
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept;

std::vector<std::uint8_t> wrap(ArtifactKind kind, std::span<const std::uint8_t> payload);
/// Validates magic, version, kind, length and checksum; returns the payload.
std::vector<std::uint8_t> unwrap(ArtifactKind kind, std::span<const std::uint8_t> file_bytes);

/// Writes to `<path>.tmp` and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text_atomic(const std::filesystem::path& path, std::string_view text);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

void save_artifact(const std::filesystem::path& path, ArtifactKind kind, const ByteWriter& payload);
std::vector<std::uint8_t> load_artifact(const std::filesystem::path& path, ArtifactKind kind);

}  // namespace semhash::io
