#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "semhash/container.hpp"

namespace semhash {

using DocId = std::uint32_t;

/// Fixed-width bit string. Bit 0 is the least significant bit of word 0;
/// bits at or above the width are always zero.
class BinaryCode {
public:
    BinaryCode() = default;
    explicit BinaryCode(std::uint32_t width);
    /// Single-word code; throws if width > 64 or value has bits above width.
    BinaryCode(std::uint32_t width, std::uint64_t value);

    /// Parses a string of '0'/'1', most significant bit first.
    static BinaryCode from_string(std::string_view bits);

    std::uint32_t width() const noexcept { return width_; }
    std::span<const std::uint64_t> words() const noexcept { return words_; }
    bool bit(std::uint32_t j) const;
    void set(std::uint32_t j, bool value);
    void flip(std::uint32_t j);
    /// Word 0; only meaningful for width <= 64.
    std::uint64_t value() const noexcept { return words_.empty() ? 0 : words_[0]; }

    /// Fixed-width, most significant bit first.
    std::string to_string() const;

    friend bool operator==(const BinaryCode&, const BinaryCode&) = default;
    friend auto operator<=>(const BinaryCode& a, const BinaryCode& b) {
        if (auto c = a.width_ <=> b.width_; c != 0) return c;
        for (std::size_t w = a.words_.size(); w-- > 0;)
            if (auto c = a.words_[w] <=> b.words_[w]; c != 0) return c;
        return std::strong_ordering::equal;
    }

private:
    std::uint32_t width_ = 0;
    std::vector<std::uint64_t> words_;
};

std::size_t words_for_width(std::uint32_t width) noexcept;

struct BinaryCodeHash {
    std::size_t operator()(const BinaryCode& c) const noexcept;
};

std::uint32_t hamming_distance(const BinaryCode& a, const BinaryCode& b);

/// bit j = 1 iff probs[j] > threshold.
BinaryCode binarize(std::span<const double> probs, double threshold = 0.5);

/// sum_{i <= radius} C(width, i), saturating at SIZE_MAX.
std::size_t ball_size(std::uint32_t width, std::uint32_t radius) noexcept;

/// Every code within `radius` of center, ordered by distance then by the
/// lexicographic order of the flipped bit positions. Throws if radius > width.
std::vector<BinaryCode> ball_enumerate(const BinaryCode& center, std::uint32_t radius);

/// Code -> document buckets plus a packed code array for linear scans.
class HammingIndex {
public:
    HammingIndex() = default;
    explicit HammingIndex(std::uint32_t width) : width_(width), words_(words_for_width(width)) {}

    std::uint32_t width() const noexcept { return width_; }
    std::size_t size() const noexcept { return ids_.size(); }
    bool empty() const noexcept { return ids_.empty(); }
    std::size_t bucket_count() const noexcept { return buckets_.size(); }

    /// Documents stored under exactly `code`, ascending; empty if none.
    std::span<const DocId> bucket(const BinaryCode& code) const;
    const std::unordered_map<BinaryCode, std::vector<DocId>, BinaryCodeHash>& buckets() const noexcept {
        return buckets_;
    }

    /// Packed scan arrays: code d occupies packed_codes()[d*words .. d*words+words).
    std::span<const std::uint64_t> packed_codes() const noexcept { return packed_; }
    std::span<const DocId> packed_ids() const noexcept { return ids_; }
    std::size_t words_per_code() const noexcept { return words_; }
    BinaryCode code_at(std::size_t row) const;

    friend HammingIndex build_index(std::span<const std::pair<DocId, BinaryCode>> codes);
    friend HammingIndex read_index(io::ByteReader& in);

private:
    std::uint32_t width_ = 0;
    std::size_t words_ = 0;
    std::unordered_map<BinaryCode, std::vector<DocId>, BinaryCodeHash> buckets_;
    std::vector<std::uint64_t> packed_;
    std::vector<DocId> ids_;
};

/// Throws std::invalid_argument on duplicate ids or mixed widths. An empty
/// input gives an empty index of width 0.
HammingIndex build_index(std::span<const std::pair<DocId, BinaryCode>> codes);

struct Neighbor {
    DocId id;
    std::uint32_t distance;
    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// XOR + popcount over the packed array; sorted by (distance, id).
std::vector<Neighbor> ball_scan(const HammingIndex& index, const BinaryCode& center, std::uint32_t radius);
/// Bucket lookups for every code from ball_enumerate; sorted by (distance, id).
std::vector<Neighbor> ball_lookup(const HammingIndex& index, const BinaryCode& center, std::uint32_t radius);

enum class BallStrategy : std::uint8_t { automatic, generative, scan };

struct PreselectConfig {
    std::uint32_t radius = 2;
    std::size_t min_count = 0;
    std::uint32_t max_radius = 2;
    BallStrategy strategy = BallStrategy::automatic;
};

struct Preselection {
    std::vector<Neighbor> docs;
    std::uint32_t radius = 0;
    BallStrategy strategy_used = BallStrategy::scan;
};

/// Generative when the ball has fewer codes than the index has documents.
BallStrategy choose_strategy(std::uint32_t width, std::uint32_t radius, std::size_t index_size) noexcept;

/// Radius-h ball, widened one step at a time while fewer than min_count
/// documents were found and the radius is below max_radius.
Preselection preselect(const HammingIndex& index, const BinaryCode& center, const PreselectConfig& cfg);

void write_index(io::ByteWriter& out, const HammingIndex& index);
HammingIndex read_index(io::ByteReader& in);
void save_index(const std::filesystem::path& path, const HammingIndex& index);
HammingIndex load_index(const std::filesystem::path& path);

}  // namespace semhash
