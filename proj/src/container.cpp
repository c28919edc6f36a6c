#include "semhash/container.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

namespace semhash::io {
namespace {

constexpr std::uint8_t kMagic[8] = {'S', 'E', 'M', 'H', 'A', 'S', 'H', 0};

}  // namespace

std::string_view kind_name(ArtifactKind kind) noexcept {
    switch (kind) {
        case ArtifactKind::vector_store:
            return "vector store";
        case ArtifactKind::network:
            return "network";
        case ArtifactKind::rbm_stack:
            return "rbm stack";
        case ArtifactKind::hash_index:
            return "hash index";
    }
    return "unknown";
}

void ByteWriter::u32(std::uint32_t v) {
    for (int s = 0; s < 32; s += 8) buf_.push_back(static_cast<std::uint8_t>(v >> s));
}

void ByteWriter::u64(std::uint64_t v) {
    for (int s = 0; s < 64; s += 8) buf_.push_back(static_cast<std::uint8_t>(v >> s));
}

void ByteWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::str(std::string_view s) {
    u64(s.size());
    buf_.insert(buf_.end(), s.begin(), s.end());
}

void ByteWriter::f64s(std::span<const double> v) {
    u64(v.size());
    for (double x : v) f64(x);
}

void ByteWriter::u32s(std::span<const std::uint32_t> v) {
    u64(v.size());
    for (auto x : v) u32(x);
}

void ByteWriter::u64s(std::span<const std::uint64_t> v) {
    u64(v.size());
    for (auto x : v) u64(x);
}

void ByteReader::need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw std::runtime_error("truncated artifact payload");
}

std::uint8_t ByteReader::u8() {
    need(1);
    return data_[pos_++];
}

std::uint32_t ByteReader::u32() {
    need(4);
    std::uint32_t v = 0;
    for (int s = 0; s < 32; s += 8) v |= static_cast<std::uint32_t>(data_[pos_++]) << s;
    return v;
}

std::uint64_t ByteReader::u64() {
    need(8);
    std::uint64_t v = 0;
    for (int s = 0; s < 64; s += 8) v |= static_cast<std::uint64_t>(data_[pos_++]) << s;
    return v;
}

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

std::string ByteReader::str() {
    const auto n = u64();
    need(n);
    std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
    pos_ += n;
    return s;
}

std::vector<double> ByteReader::f64s() {
    const auto n = u64();
    need(n * 8);
    std::vector<double> v(n);
    for (auto& x : v) x = f64();
    return v;
}

std::vector<std::uint32_t> ByteReader::u32s() {
    const auto n = u64();
    need(n * 4);
    std::vector<std::uint32_t> v(n);
    for (auto& x : v) x = u32();
    return v;
}

std::vector<std::uint64_t> ByteReader::u64s() {
    const auto n = u64();
    need(n * 8);
    std::vector<std::uint64_t> v(n);
    for (auto& x : v) x = u64();
    return v;
}

void ByteReader::expect_end() const {
    if (!at_end()) throw std::runtime_error("trailing bytes in artifact payload");
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<std::uint8_t> wrap(ArtifactKind kind, std::span<const std::uint8_t> payload) {
    ByteWriter header;
    for (auto b : kMagic) header.u8(b);
    header.u32(kFormatVersion);
    header.u32(static_cast<std::uint32_t>(kind));
    header.u64(payload.size());
    std::vector<std::uint8_t> out = header.bytes();
    out.insert(out.end(), payload.begin(), payload.end());
    ByteWriter trailer;
    trailer.u64(fnv1a64(payload));
    out.insert(out.end(), trailer.bytes().begin(), trailer.bytes().end());
    return out;
}

std::vector<std::uint8_t> unwrap(ArtifactKind kind, std::span<const std::uint8_t> file_bytes) {
    ByteReader r(file_bytes);
    for (auto b : kMagic) {
        if (r.u8() != b) throw std::runtime_error("not a semhash artifact (bad magic)");
    }
    const auto version = r.u32();
    if (version != kFormatVersion) {
        throw std::runtime_error("unsupported artifact format version " + std::to_string(version));
    }
    const auto found = static_cast<ArtifactKind>(r.u32());
    if (found != kind) {
        throw std::runtime_error("expected a " + std::string(kind_name(kind)) + " artifact, found " +
                                 std::string(kind_name(found)));
    }
    const auto length = r.u64();
    constexpr std::size_t header_size = 8 + 4 + 4 + 8;
    if (file_bytes.size() != header_size + length + 8) throw std::runtime_error("artifact length mismatch");
    auto payload = file_bytes.subspan(header_size, length);
    ByteReader tail(file_bytes.subspan(header_size + length));
    if (tail.u64() != fnv1a64(payload)) throw std::runtime_error("artifact checksum mismatch");
    return {payload.begin(), payload.end()};
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

void write_text_atomic(const std::filesystem::path& path, std::string_view text) {
    write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void save_artifact(const std::filesystem::path& path, ArtifactKind kind, const ByteWriter& payload) {
    write_file_atomic(path, wrap(kind, payload.bytes()));
}

std::vector<std::uint8_t> load_artifact(const std::filesystem::path& path, ArtifactKind kind) {
    try {
        return unwrap(kind, read_file(path));
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

}  // namespace semhash::io
