#include "semhash/textpipe.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "semhash/parallel.hpp"

namespace semhash {

extern const char* const kBuiltinStopwordText;  // generated from data/stopwords_en.txt

namespace {

StopwordSet parse_stopwords(std::istream& in) {
    StopwordSet words;
    std::string line;
    while (std::getline(in, line)) {
        auto end = line.find('#');
        if (end != std::string::npos) line.resize(end);
        for (const auto& tok : tokenize(line, {})) words.insert(tok);
    }
    return words;
}

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

}  // namespace

const StopwordSet& builtin_stopwords() {
    static const StopwordSet words = [] {
        std::istringstream in(kBuiltinStopwordText);
        auto set = parse_stopwords(in);
        // Single letters never survive tokenization; keep the set honest.
        set.insert({"a", "i"});
        return set;
    }();
    return words;
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open stopword file " + path.string());
    return parse_stopwords(in);
}

std::vector<std::string> tokenize(std::string_view raw_text, const StopwordSet& stopwords) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < raw_text.size()) {
        if (!is_alpha(raw_text[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        std::string tok;
        while (j < raw_text.size() && is_alpha(raw_text[j])) {
            const char c = raw_text[j++];
            tok.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
        }
        i = j;
        if (tok.size() < 2 || stopwords.contains(tok)) continue;
        tokens.push_back(std::move(tok));
    }
    return tokens;
}

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::uint32_t> doc_freq,
                       std::uint64_t num_docs)
    : terms_(std::move(terms)), doc_freq_(std::move(doc_freq)), num_docs_(num_docs) {
    if (terms_.size() != doc_freq_.size()) throw std::invalid_argument("vocabulary: terms/df length mismatch");
    for (std::size_t k = 0; k < terms_.size(); ++k) {
        if (k > 0 && !(terms_[k - 1] < terms_[k])) throw std::invalid_argument("vocabulary: terms not sorted");
        if (doc_freq_[k] < 1 || doc_freq_[k] > num_docs_) {
            throw std::invalid_argument("vocabulary: document frequency out of range for '" + terms_[k] + "'");
        }
    }
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view token) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), token,
                               [](const std::string& a, std::string_view b) { return a < b; });
    if (it == terms_.end() || *it != token) return std::nullopt;
    return static_cast<std::uint32_t>(it - terms_.begin());
}

Vocabulary build_vocabulary(std::span<const Document> docs, const VocabOptions& options,
                            const StopwordSet& stopwords) {
    if (docs.empty()) throw std::invalid_argument("build_vocabulary: empty corpus");
    if (!(options.min_df_frac >= 0.0 && options.min_df_frac < options.max_df_frac && options.max_df_frac <= 1.0)) {
        throw std::invalid_argument("build_vocabulary: need 0 <= min_df_frac < max_df_frac <= 1");
    }

    struct Stats {
        std::uint64_t total = 0;
        std::uint32_t df = 0;
        std::size_t last_doc = static_cast<std::size_t>(-1);
    };
    std::unordered_map<std::string, Stats> stats;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        for (auto& tok : tokenize(docs[d].text, stopwords)) {
            Stats& s = stats[std::move(tok)];
            ++s.total;
            if (s.last_doc != d) {
                s.last_doc = d;
                ++s.df;
            }
        }
    }

    const double n_docs = static_cast<double>(docs.size());
    const double lo = options.min_df_frac * n_docs;
    const double hi = options.max_df_frac * n_docs;
    std::vector<std::pair<const std::string*, const Stats*>> kept;
    for (const auto& [term, s] : stats) {
        const double df = s.df;
        if (df > lo && df < hi) kept.emplace_back(&term, &s);
    }
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second->total != b.second->total) return a.second->total > b.second->total;
        return *a.first < *b.first;
    });
    if (kept.size() > options.top_n) kept.resize(options.top_n);
    if (kept.empty()) throw std::runtime_error("build_vocabulary: no features survive the document-frequency pruning");

    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return *a.first < *b.first; });
    std::vector<std::string> terms;
    std::vector<std::uint32_t> df;
    terms.reserve(kept.size());
    df.reserve(kept.size());
    for (const auto& [term, s] : kept) {
        terms.push_back(*term);
        df.push_back(s->df);
    }
    return Vocabulary(std::move(terms), std::move(df), docs.size());
}

SparseVector count_vector(std::string_view text, const Vocabulary& vocab) {
    std::map<std::uint32_t, double> counts;
    for (const auto& tok : tokenize(text, {})) {
        if (auto id = vocab.find(tok)) counts[*id] += 1.0;
    }
    return SparseVector::from_pairs(vocab.size(), {counts.begin(), counts.end()});
}

SparseVector tfidf_transform(const SparseVector& counts, const Vocabulary& vocab) {
    if (counts.dim() != vocab.size()) throw std::invalid_argument("tfidf_transform: counts built for another vocabulary");
    const double total = counts.sum();
    if (total == 0.0) return SparseVector(vocab.size());
    const double n_docs = static_cast<double>(vocab.num_docs());
    std::vector<std::uint32_t> ids;
    std::vector<double> values;
    const auto ci = counts.ids();
    const auto cv = counts.values();
    for (std::size_t k = 0; k < ci.size(); ++k) {
        const double df = vocab.doc_freq(ci[k]);
        if (df >= n_docs) continue;
        ids.push_back(ci[k]);
        values.push_back((cv[k] / total) * std::log(n_docs / df));
    }
    return SparseVector(vocab.size(), std::move(ids), std::move(values));
}

std::vector<SparseVector> vectorize(std::span<const Document> docs, const Vocabulary& vocab, unsigned threads) {
    std::vector<SparseVector> out(docs.size());
    parallel_for(docs.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t d = begin; d < end; ++d) out[d] = tfidf_transform(count_vector(docs[d], vocab), vocab);
    });
    return out;
}

ScalingStats compute_scaling(std::span<const SparseVector> vectors) {
    ScalingStats stats;
    for (const auto& v : vectors)
        for (double w : v.values()) stats.max_weight = std::max(stats.max_weight, w);
    return stats;
}

void scale_for_network(const SparseVector& v, const ScalingStats& stats, std::span<double> out) {
    if (!(stats.max_weight > 0.0)) throw std::invalid_argument("scale_for_network: max weight must be positive");
    if (out.size() != v.dim()) throw std::invalid_argument("scale_for_network: output size mismatch");
    std::fill(out.begin(), out.end(), 0.0);
    const auto ids = v.ids();
    const auto vals = v.values();
    for (std::size_t k = 0; k < ids.size(); ++k) out[ids[k]] = std::min(vals[k] / stats.max_weight, 1.0);
}

std::vector<double> scale_for_network(const SparseVector& v, const ScalingStats& stats) {
    std::vector<double> out(v.dim());
    scale_for_network(v, stats, out);
    return out;
}

SparseVector unscale_from_network(std::span<const double> dense, const ScalingStats& stats) {
    if (!(stats.max_weight > 0.0)) throw std::invalid_argument("unscale_from_network: max weight must be positive");
    std::vector<std::uint32_t> ids;
    std::vector<double> values;
    for (std::size_t i = 0; i < dense.size(); ++i) {
        if (dense[i] > 0.0) {
            ids.push_back(static_cast<std::uint32_t>(i));
            values.push_back(dense[i] * stats.max_weight);
        }
    }
    return SparseVector(static_cast<std::uint32_t>(dense.size()), std::move(ids), std::move(values));
}

}  // namespace semhash
