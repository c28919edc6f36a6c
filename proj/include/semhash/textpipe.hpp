#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "semhash/sparse.hpp"

namespace semhash {

using StopwordSet = std::unordered_set<std::string>;

struct Document {
    std::int64_t id = 0;
    std::string text;
    std::int32_t label = 0;
};

/// The English list shipped in data/stopwords_en.txt, compiled in.
const StopwordSet& builtin_stopwords();
/// One word per line; blank lines and '#' comments ignored.
StopwordSet load_stopwords(const std::filesystem::path& path);

/// Lowercased maximal runs of ASCII letters, at least two long, minus stopwords.
std::vector<std::string> tokenize(std::string_view raw_text, const StopwordSet& stopwords);

struct VocabOptions {
    double min_df_frac = 0.00001;
    double max_df_frac = 0.9;
    std::size_t top_n = 10000;
};

/// Retained terms in lexicographic order; a term's feature id is its position.
class Vocabulary {
public:
    Vocabulary() = default;
    /// Throws std::invalid_argument unless terms are strictly sorted and
    /// 1 <= doc_freq <= num_docs for every term.
    Vocabulary(std::vector<std::string> terms, std::vector<std::uint32_t> doc_freq, std::uint64_t num_docs);

    std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(terms_.size()); }
    std::uint64_t num_docs() const noexcept { return num_docs_; }
    const std::string& term(std::uint32_t id) const { return terms_.at(id); }
    std::uint32_t doc_freq(std::uint32_t id) const { return doc_freq_.at(id); }
    std::span<const std::string> terms() const noexcept { return terms_; }
    std::span<const std::uint32_t> doc_freqs() const noexcept { return doc_freq_; }
    std::optional<std::uint32_t> find(std::string_view token) const;

    friend bool operator==(const Vocabulary&, const Vocabulary&) = default;

private:
    std::vector<std::string> terms_;
    std::vector<std::uint32_t> doc_freq_;
    std::uint64_t num_docs_ = 0;
};

/// Keeps tokens with min_df_frac*|D| < |D_w| < max_df_frac*|D|, then the
/// top_n of those by total corpus frequency (ties lexicographic).
/// Throws std::invalid_argument on bad bounds / empty input and
/// std::runtime_error when nothing survives the pruning.
Vocabulary build_vocabulary(std::span<const Document> docs, const VocabOptions& options,
                            const StopwordSet& stopwords);

/// Raw in-vocabulary term counts.
SparseVector count_vector(std::string_view text, const Vocabulary& vocab);
inline SparseVector count_vector(const Document& doc, const Vocabulary& vocab) {
    return count_vector(doc.text, vocab);
}

/// weight(w) = c(w)/W * ln(|D|/|D_w|), W = in-vocabulary token count.
/// Terms present in every document get weight 0 and are dropped.
/// An all-OOV document gives an empty vector.
SparseVector tfidf_transform(const SparseVector& counts, const Vocabulary& vocab);

/// count_vector + tfidf_transform over many documents, split across `threads` workers.
std::vector<SparseVector> vectorize(std::span<const Document> docs, const Vocabulary& vocab,
                                    unsigned threads = 1);

/// Global maximum TF-IDF weight of the training split.
struct ScalingStats {
    double max_weight = 0.0;
};

ScalingStats compute_scaling(std::span<const SparseVector> vectors);

/// Dense network input: min(weight / m, 1). Throws if m <= 0.
std::vector<double> scale_for_network(const SparseVector& v, const ScalingStats& stats);
void scale_for_network(const SparseVector& v, const ScalingStats& stats, std::span<double> out);

/// Back to TF-IDF space: positive entries times m; everything else dropped.
SparseVector unscale_from_network(std::span<const double> dense, const ScalingStats& stats);

}  // namespace semhash
