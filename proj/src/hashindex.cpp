#include "semhash/hashindex.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "semhash/kernels.hpp"

namespace semhash {
namespace {

void sort_neighbors(std::vector<Neighbor>& out) {
    std::sort(out.begin(), out.end(), [](const Neighbor& a, const Neighbor& b) {
        return a.distance != b.distance ? a.distance < b.distance : a.id < b.id;
    });
}

void check_width(const HammingIndex& index, const BinaryCode& center) {
    if (!index.empty() && center.width() != index.width()) {
        throw std::invalid_argument("code width " + std::to_string(center.width()) + " does not match index width " +
                                    std::to_string(index.width()));
    }
}

}  // namespace

std::size_t words_for_width(std::uint32_t width) noexcept { return (std::size_t{width} + 63) / 64; }

BinaryCode::BinaryCode(std::uint32_t width) : width_(width), words_(words_for_width(width), 0) {}

BinaryCode::BinaryCode(std::uint32_t width, std::uint64_t value) : BinaryCode(width) {
    if (width > 64) throw std::invalid_argument("single-word code wider than 64 bits");
    if (width < 64 && (value >> width) != 0) throw std::invalid_argument("code value has bits above its width");
    if (width > 0) words_[0] = value;
}

BinaryCode BinaryCode::from_string(std::string_view bits) {
    BinaryCode code(static_cast<std::uint32_t>(bits.size()));
    for (std::size_t k = 0; k < bits.size(); ++k) {
        const char c = bits[bits.size() - 1 - k];
        if (c != '0' && c != '1') throw std::invalid_argument("binary code string must contain only 0 and 1");
        code.set(static_cast<std::uint32_t>(k), c == '1');
    }
    return code;
}

bool BinaryCode::bit(std::uint32_t j) const {
    if (j >= width_) throw std::out_of_range("bit index beyond code width");
    return (words_[j / 64] >> (j % 64)) & 1U;
}

void BinaryCode::set(std::uint32_t j, bool value) {
    if (j >= width_) throw std::out_of_range("bit index beyond code width");
    const std::uint64_t mask = std::uint64_t{1} << (j % 64);
    if (value) {
        words_[j / 64] |= mask;
    } else {
        words_[j / 64] &= ~mask;
    }
}

void BinaryCode::flip(std::uint32_t j) {
    if (j >= width_) throw std::out_of_range("bit index beyond code width");
    words_[j / 64] ^= std::uint64_t{1} << (j % 64);
}

std::string BinaryCode::to_string() const {
    std::string s(width_, '0');
    for (std::uint32_t j = 0; j < width_; ++j)
        if (bit(j)) s[width_ - 1 - j] = '1';
    return s;
}

std::size_t BinaryCodeHash::operator()(const BinaryCode& c) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ c.width();
    for (auto w : c.words()) {
        h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
}

std::uint32_t hamming_distance(const BinaryCode& a, const BinaryCode& b) {
    if (a.width() != b.width()) throw std::invalid_argument("hamming_distance: width mismatch");
    std::uint32_t d = 0;
    for (std::size_t w = 0; w < a.words().size(); ++w) d += std::popcount(a.words()[w] ^ b.words()[w]);
    return d;
}

BinaryCode binarize(std::span<const double> probs, double threshold) {
    BinaryCode code(static_cast<std::uint32_t>(probs.size()));
    for (std::size_t j = 0; j < probs.size(); ++j) {
        if (!(probs[j] >= 0.0 && probs[j] <= 1.0)) throw std::invalid_argument("binarize: probability outside [0, 1]");
        if (probs[j] > threshold) code.set(static_cast<std::uint32_t>(j), true);
    }
    return code;
}

std::size_t ball_size(std::uint32_t width, std::uint32_t radius) noexcept {
    constexpr std::size_t cap = std::numeric_limits<std::size_t>::max();
    std::size_t total = 0;
    std::size_t term = 1;  // C(width, i)
    for (std::uint32_t i = 0; i <= std::min(radius, width); ++i) {
        if (i > 0) {
            // term * (width - i + 1) / i, exact because C(n,i-1)*(n-i+1) is divisible by i
            const std::size_t factor = width - i + 1;
            if (term > cap / factor) return cap;
            term = term * factor / i;
        }
        if (total > cap - term) return cap;
        total += term;
    }
    return total;
}

std::vector<BinaryCode> ball_enumerate(const BinaryCode& center, std::uint32_t radius) {
    const std::uint32_t n = center.width();
    if (radius > n) throw std::invalid_argument("ball radius exceeds code width");
    std::vector<BinaryCode> out;
    out.reserve(std::min<std::size_t>(ball_size(n, radius), std::size_t{1} << 20));
    out.push_back(center);
    std::vector<std::uint32_t> pos;
    for (std::uint32_t d = 1; d <= radius; ++d) {
        pos.resize(d);
        std::iota(pos.begin(), pos.end(), 0U);
        while (true) {
            BinaryCode c = center;
            for (auto p : pos) c.flip(p);
            out.push_back(std::move(c));
            // next combination of d positions out of n
            std::size_t k = d;
            while (k > 0 && pos[k - 1] == n - d + (k - 1)) --k;
            if (k == 0) break;
            ++pos[k - 1];
            for (std::size_t m = k; m < d; ++m) pos[m] = pos[m - 1] + 1;
        }
    }
    return out;
}

std::span<const DocId> HammingIndex::bucket(const BinaryCode& code) const {
    auto it = buckets_.find(code);
    if (it == buckets_.end()) return {};
    return it->second;
}

BinaryCode HammingIndex::code_at(std::size_t row) const {
    BinaryCode c(width_);
    for (std::uint32_t j = 0; j < width_; ++j) c.set(j, (packed_[row * words_ + j / 64] >> (j % 64)) & 1U);
    return c;
}

HammingIndex build_index(std::span<const std::pair<DocId, BinaryCode>> codes) {
    HammingIndex index;
    if (codes.empty()) return index;
    index.width_ = codes.front().second.width();
    index.words_ = words_for_width(index.width_);

    std::vector<std::size_t> order(codes.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return codes[a].first < codes[b].first; });
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto& [id, code] = codes[order[k]];
        if (k > 0 && codes[order[k - 1]].first == id) {
            throw std::invalid_argument("build_index: duplicate document id " + std::to_string(id));
        }
        if (code.width() != index.width_) throw std::invalid_argument("build_index: codes of different widths");
        index.buckets_[code].push_back(id);  // ids arrive ascending, so buckets stay sorted
        index.ids_.push_back(id);
        index.packed_.insert(index.packed_.end(), code.words().begin(), code.words().end());
    }
    return index;
}

std::vector<Neighbor> ball_scan(const HammingIndex& index, const BinaryCode& center, std::uint32_t radius) {
    check_width(index, center);
    std::vector<Neighbor> out;
    if (index.empty()) return out;
    std::vector<std::uint32_t> dist(index.size());
    kernels::active().hamming_distances(index.packed_codes().data(), index.size(), index.words_per_code(),
                                        center.words().data(), dist.data());
    const auto ids = index.packed_ids();
    for (std::size_t d = 0; d < dist.size(); ++d)
        if (dist[d] <= radius) out.push_back({ids[d], dist[d]});
    sort_neighbors(out);
    return out;
}

std::vector<Neighbor> ball_lookup(const HammingIndex& index, const BinaryCode& center, std::uint32_t radius) {
    check_width(index, center);
    std::vector<Neighbor> out;
    if (index.empty()) return out;
    for (const auto& code : ball_enumerate(center, radius)) {
        const auto members = index.bucket(code);
        if (members.empty()) continue;
        const auto d = hamming_distance(code, center);
        for (auto id : members) out.push_back({id, d});
    }
    sort_neighbors(out);
    return out;
}

BallStrategy choose_strategy(std::uint32_t width, std::uint32_t radius, std::size_t index_size) noexcept {
    return ball_size(width, radius) < index_size ? BallStrategy::generative : BallStrategy::scan;
}

Preselection preselect(const HammingIndex& index, const BinaryCode& center, const PreselectConfig& cfg) {
    check_width(index, center);
    const std::uint32_t width = center.width();
    if (cfg.radius > cfg.max_radius || cfg.max_radius > width) {
        throw std::invalid_argument("preselect: need radius <= max_radius <= code width");
    }
    Preselection result;
    std::uint32_t radius = cfg.radius;
    while (true) {
        auto strategy = cfg.strategy;
        if (strategy == BallStrategy::automatic) strategy = choose_strategy(width, radius, index.size());
        result.docs = strategy == BallStrategy::generative ? ball_lookup(index, center, radius)
                                                           : ball_scan(index, center, radius);
        result.radius = radius;
        result.strategy_used = strategy;
        if (result.docs.size() >= cfg.min_count || radius >= cfg.max_radius) break;
        ++radius;
    }
    return result;
}

void write_index(io::ByteWriter& out, const HammingIndex& index) {
    out.u32(index.width());
    out.u64(index.size());
    for (std::size_t d = 0; d < index.size(); ++d) {
        out.u32(index.packed_ids()[d]);
        for (std::size_t w = 0; w < index.words_per_code(); ++w) out.u64(index.packed_codes()[d * index.words_per_code() + w]);
    }
}

HammingIndex read_index(io::ByteReader& in) {
    const auto width = in.u32();
    const auto n = in.u64();
    const auto words = words_for_width(width);
    std::vector<std::pair<DocId, BinaryCode>> codes;
    codes.reserve(n);
    for (std::uint64_t d = 0; d < n; ++d) {
        const DocId id = in.u32();
        BinaryCode code(width);
        for (std::size_t w = 0; w < words; ++w) {
            const auto word = in.u64();
            for (std::uint32_t b = 0; b < 64 && w * 64 + b < width; ++b)
                if ((word >> b) & 1U) code.set(static_cast<std::uint32_t>(w * 64 + b), true);
            const std::uint32_t used = static_cast<std::uint32_t>(std::min<std::size_t>(64, width - w * 64));
            if (used < 64 && (word >> used) != 0) throw std::runtime_error("index code has bits above its width");
        }
        codes.emplace_back(id, std::move(code));
    }
    auto index = build_index(codes);
    if (n == 0) index = HammingIndex(width);
    return index;
}

void save_index(const std::filesystem::path& path, const HammingIndex& index) {
    io::ByteWriter w;
    write_index(w, index);
    io::save_artifact(path, io::ArtifactKind::hash_index, w);
}

HammingIndex load_index(const std::filesystem::path& path) {
    const auto payload = io::load_artifact(path, io::ArtifactKind::hash_index);
    io::ByteReader r(payload);
    auto index = read_index(r);
    r.expect_end();
    return index;
}

}  // namespace semhash
