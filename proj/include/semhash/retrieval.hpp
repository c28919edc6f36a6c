#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semhash/autoencoder.hpp"
#include "semhash/hashindex.hpp"
#include "semhash/sparse.hpp"
#include "semhash/textpipe.hpp"

namespace semhash {

enum class Variant : std::uint8_t { tfidf, gsa, prf, gsa_prf, reconstruction };
enum class PrfScope : std::uint8_t { preselection, corpus };
/// Where PRF feedback documents come from: the first-pass ranking, or the
/// radius-1 hamming neighbours of the query code.
enum class PrfSource : std::uint8_t { first_pass, hamming_ball };

std::string to_string(Variant v);
Variant parse_variant(std::string_view name);
std::vector<Variant> parse_variants(std::string_view comma_list);
std::string to_string(PrfScope s);
PrfScope parse_prf_scope(std::string_view name);
std::string to_string(PrfSource s);
PrfSource parse_prf_source(std::string_view name);

inline bool uses_gsa(Variant v) { return v == Variant::gsa || v == Variant::gsa_prf; }
inline bool uses_prf(Variant v) { return v == Variant::prf || v == Variant::gsa_prf; }

struct QueryConfig {
    Variant variant = Variant::tfidf;
    PreselectConfig preselect;
    double code_threshold = 0.5;
    std::size_t depth = 100;  // m
    std::size_t prf_k = 5;
    double gsa_alpha = 1.0;
    double gsa_sigma = 2.0;
    PrfScope prf_scope = PrfScope::preselection;
    PrfSource prf_source = PrfSource::first_pass;

    /// Throws std::invalid_argument for prf_k == 0 with PRF, sigma <= 0 with GSA.
    void validate() const;
};

/// Indexed documents: TF-IDF vectors, cached norms, labels and external ids.
/// Rows are the DocIds used by the hash index.
class VectorCollection {
public:
    VectorCollection() = default;
    VectorCollection(std::vector<SparseVector> vectors, std::vector<std::int32_t> labels,
                     std::vector<std::int64_t> external_ids);

    std::size_t size() const noexcept { return vectors_.size(); }
    std::uint32_t dim() const noexcept { return vectors_.empty() ? 0 : vectors_.front().dim(); }
    const SparseVector& vector(DocId row) const { return vectors_.at(row); }
    double norm(DocId row) const { return norms_.at(row); }
    std::int32_t label(DocId row) const { return labels_.at(row); }
    std::int64_t external_id(DocId row) const { return external_ids_.at(row); }
    std::span<const SparseVector> vectors() const noexcept { return vectors_; }
    std::span<const std::int32_t> labels() const noexcept { return labels_; }
    std::span<const std::int64_t> external_ids() const noexcept { return external_ids_; }
    std::optional<DocId> find_external(std::int64_t id) const;

private:
    std::vector<SparseVector> vectors_;
    std::vector<double> norms_;
    std::vector<std::int32_t> labels_;
    std::vector<std::int64_t> external_ids_;
};

struct ScoredDoc {
    DocId row;
    double score;
    friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

struct RankedResult {
    std::vector<ScoredDoc> docs;     // score non-increasing, ties by row
    std::vector<DocId> preselection;  // candidate pool, ascending
    std::uint32_t radius = 0;
    bool empty_preselection = false;
    std::string diagnostic;

    std::size_t preselection_size() const noexcept { return preselection.size(); }
    std::vector<DocId> rows() const;
    friend bool operator==(const RankedResult&, const RankedResult&) = default;
};

/// a.b / (|a||b|), 0 if either norm is 0.
double cosine(const SparseVector& a, const SparseVector& b);

/// Top-m candidates by cosine with q.
RankedResult rank(const SparseVector& q, std::span<const DocId> candidates, const VectorCollection& docs,
                  std::size_t m);

/// q + (1/k) sum docs. Throws on an empty list.
SparseVector prf_adjust(const SparseVector& q, std::span<const SparseVector> top_docs);

/// q - alpha * (r - q) / sigma^2, clipped at 0, in network input space.
std::vector<double> gsa_adjust(std::span<const double> q_dense, std::span<const double> reconstruction,
                               double sigma, double alpha);
std::vector<double> gsa_adjust(std::span<const double> q_dense, const NetworkParams& net, double sigma,
                               double alpha);

/// Applies the GSA step to TF-IDF weights: w_i - alpha*m*(r_i - q_i)/sigma^2,
/// clipped at 0. With alpha = 0 the result equals q exactly.
SparseVector gsa_query(const SparseVector& q, std::span<const double> q_dense, std::span<const double> reconstruction,
                       const ScalingStats& scaling, double sigma, double alpha);

/// r(q), the reconstruction itself, used as the ranking vector.
std::vector<double> reconstruction_query(std::span<const double> q_dense, const NetworkParams& net);

/// Everything a query needs at search time. Immutable once built.
struct Engine {
    Vocabulary vocab;
    ScalingStats scaling;
    NetworkParams net;
    HammingIndex index;
    VectorCollection docs;
};

/// Encodes every row of `docs` and builds the code index.
HammingIndex index_collection(const NetworkParams& net, const VectorCollection& docs, const ScalingStats& scaling,
                              double threshold = 0.5, unsigned threads = 1);

struct Query {
    std::int64_t id = 0;
    std::int32_t label = 0;
    SparseVector vector;              // TF-IDF
    std::optional<DocId> self_row;    // set when the query is an indexed document
};

/// Vectorize, scale, encode, binarize, preselect, build the variant's ranking
/// vector, rank, and (for PRF variants) feed back and re-rank. The hash code
/// always comes from the unaugmented query.
RankedResult search(const Query& query, const Engine& engine, const QueryConfig& cfg);
RankedResult search(const Document& query, const Engine& engine, const QueryConfig& cfg);

}  // namespace semhash
