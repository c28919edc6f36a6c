#include "semhash/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "semhash/kernels.hpp"
#include "semhash/parallel.hpp"

namespace semhash {
namespace {

bool better(const ScoredDoc& a, const ScoredDoc& b) { return a.score != b.score ? a.score > b.score : a.row < b.row; }

}  // namespace

std::string to_string(Variant v) {
    switch (v) {
        case Variant::tfidf:
            return "tfidf";
        case Variant::gsa:
            return "gsa";
        case Variant::prf:
            return "prf";
        case Variant::gsa_prf:
            return "gsa+prf";
        case Variant::reconstruction:
            return "reconstruction";
    }
    return "?";
}

Variant parse_variant(std::string_view name) {
    if (name == "tfidf") return Variant::tfidf;
    if (name == "gsa") return Variant::gsa;
    if (name == "prf") return Variant::prf;
    if (name == "gsa+prf" || name == "gsa_prf") return Variant::gsa_prf;
    if (name == "reconstruction") return Variant::reconstruction;
    throw std::invalid_argument("unknown variant '" + std::string(name) +
                                "' (tfidf|gsa|prf|gsa+prf|reconstruction)");
}

std::vector<Variant> parse_variants(std::string_view list) {
    std::vector<Variant> out;
    std::size_t start = 0;
    while (start <= list.size()) {
        auto end = list.find(',', start);
        if (end == std::string_view::npos) end = list.size();
        auto item = list.substr(start, end - start);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        if (!item.empty()) out.push_back(parse_variant(item));
        start = end + 1;
    }
    if (out.empty()) throw std::invalid_argument("empty variant list");
    return out;
}

std::string to_string(PrfScope s) { return s == PrfScope::preselection ? "preselection" : "corpus"; }

PrfScope parse_prf_scope(std::string_view name) {
    if (name == "preselection") return PrfScope::preselection;
    if (name == "corpus") return PrfScope::corpus;
    throw std::invalid_argument("unknown prf scope '" + std::string(name) + "' (preselection|corpus)");
}

std::string to_string(PrfSource s) { return s == PrfSource::first_pass ? "first_pass" : "hamming_ball"; }

PrfSource parse_prf_source(std::string_view name) {
    if (name == "first_pass") return PrfSource::first_pass;
    if (name == "hamming_ball") return PrfSource::hamming_ball;
    throw std::invalid_argument("unknown prf source '" + std::string(name) + "' (first_pass|hamming_ball)");
}

void QueryConfig::validate() const {
    if (uses_prf(variant) && prf_k == 0) throw std::invalid_argument("query: prf_k must be at least 1 with PRF");
    if (uses_gsa(variant) && !(gsa_sigma > 0.0)) throw std::invalid_argument("query: gsa_sigma must be positive with GSA");
}

VectorCollection::VectorCollection(std::vector<SparseVector> vectors, std::vector<std::int32_t> labels,
                                   std::vector<std::int64_t> external_ids)
    : vectors_(std::move(vectors)), labels_(std::move(labels)), external_ids_(std::move(external_ids)) {
    if (labels_.size() != vectors_.size() || external_ids_.size() != vectors_.size()) {
        throw std::invalid_argument("vector collection: column lengths differ");
    }
    for (std::size_t k = 1; k < external_ids_.size(); ++k) {
        if (external_ids_[k] <= external_ids_[k - 1]) throw std::invalid_argument("vector collection: ids not ascending");
    }
    norms_.reserve(vectors_.size());
    for (const auto& v : vectors_) {
        if (v.dim() != vectors_.front().dim()) throw std::invalid_argument("vector collection: mixed dimensionality");
        norms_.push_back(v.norm());
    }
}

std::optional<DocId> VectorCollection::find_external(std::int64_t id) const {
    auto it = std::lower_bound(external_ids_.begin(), external_ids_.end(), id);
    if (it == external_ids_.end() || *it != id) return std::nullopt;
    return static_cast<DocId>(it - external_ids_.begin());
}

std::vector<DocId> RankedResult::rows() const {
    std::vector<DocId> out;
    out.reserve(docs.size());
    for (const auto& d : docs) out.push_back(d.row);
    return out;
}

double cosine(const SparseVector& a, const SparseVector& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) {
        if (a.dim() != b.dim()) throw std::invalid_argument("cosine: dimensionality mismatch");
        return 0.0;
    }
    return dot(a, b) / (na * nb);
}

RankedResult rank(const SparseVector& q, std::span<const DocId> candidates, const VectorCollection& docs,
                  std::size_t m) {
    RankedResult result;
    result.preselection.assign(candidates.begin(), candidates.end());
    std::sort(result.preselection.begin(), result.preselection.end());
    if (m == 0 || candidates.empty()) return result;
    if (q.dim() != docs.dim()) throw std::invalid_argument("rank: query dimensionality differs from the collection");

    const auto& k = kernels::active();
    std::vector<double> dense = q.to_dense();
    const double qn = q.norm();
    std::vector<ScoredDoc> scored;
    scored.reserve(candidates.size());
    for (auto row : result.preselection) {
        const auto& v = docs.vector(row);
        const double dn = docs.norm(row);
        double s = 0.0;
        if (qn != 0.0 && dn != 0.0) {
            s = k.sparse_dot(v.ids().data(), v.values().data(), v.nnz(), dense.data()) / (qn * dn);
        }
        scored.push_back({row, s});
    }
    const std::size_t keep = std::min(m, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(), better);
    scored.resize(keep);
    result.docs = std::move(scored);
    return result;
}

SparseVector prf_adjust(const SparseVector& q, std::span<const SparseVector> top_docs) {
    if (top_docs.empty()) throw std::invalid_argument("prf_adjust: no feedback documents");
    SparseVector sum(q.dim());
    for (const auto& d : top_docs) sum = add_scaled(sum, d, 1.0);
    return add_scaled(q, sum, 1.0 / static_cast<double>(top_docs.size()));
}

std::vector<double> gsa_adjust(std::span<const double> q, std::span<const double> r, double sigma, double alpha) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gsa_adjust: sigma must be positive");
    if (q.size() != r.size()) throw std::invalid_argument("gsa_adjust: reconstruction size mismatch");
    const double inv_var = 1.0 / (sigma * sigma);
    std::vector<double> out(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (!std::isfinite(r[i])) throw std::invalid_argument("gsa_adjust: non-finite reconstruction");
        out[i] = std::max(0.0, q[i] - alpha * (r[i] - q[i]) * inv_var);
    }
    return out;
}

std::vector<double> gsa_adjust(std::span<const double> q_dense, const NetworkParams& net, double sigma, double alpha) {
    const auto r = reconstruct(net, q_dense);
    return gsa_adjust(q_dense, r, sigma, alpha);
}

SparseVector gsa_query(const SparseVector& q, std::span<const double> q_dense, std::span<const double> r,
                       const ScalingStats& scaling, double sigma, double alpha) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gsa_query: sigma must be positive");
    if (q_dense.size() != q.dim() || r.size() != q.dim()) throw std::invalid_argument("gsa_query: size mismatch");
    const double inv_var = 1.0 / (sigma * sigma);
    std::vector<double> dense = q.to_dense();
    for (std::size_t i = 0; i < dense.size(); ++i) {
        if (!std::isfinite(r[i])) throw std::invalid_argument("gsa_query: non-finite reconstruction");
        dense[i] = std::max(0.0, dense[i] - alpha * scaling.max_weight * (r[i] - q_dense[i]) * inv_var);
    }
    return SparseVector::from_dense(dense);
}

std::vector<double> reconstruction_query(std::span<const double> q_dense, const NetworkParams& net) {
    return reconstruct(net, q_dense);
}

HammingIndex index_collection(const NetworkParams& net, const VectorCollection& docs, const ScalingStats& scaling,
                              double threshold, unsigned threads) {
    std::vector<std::pair<DocId, BinaryCode>> codes(docs.size());
    parallel_for(docs.size(), threads, [&](std::size_t begin, std::size_t end) {
        std::vector<double> x(net.input_dim());
        for (std::size_t row = begin; row < end; ++row) {
            scale_for_network(docs.vector(static_cast<DocId>(row)), scaling, x);
            codes[row] = {static_cast<DocId>(row), binarize(encode(net, x), threshold)};
        }
    });
    auto index = build_index(codes);
    if (codes.empty()) index = HammingIndex(net.code_width());
    return index;
}

RankedResult search(const Query& query, const Engine& engine, const QueryConfig& cfg) {
    cfg.validate();
    const auto& net = engine.net;
    if (query.vector.dim() != net.input_dim()) throw std::invalid_argument("search: query dimensionality mismatch");

    const auto q_dense = scale_for_network(query.vector, engine.scaling);
    const auto trace = forward(net, q_dense);
    const auto code = binarize(trace.z[net.code_layer + 1], cfg.code_threshold);
    const auto pre = preselect(engine.index, code, cfg.preselect);

    std::vector<DocId> candidates;
    candidates.reserve(pre.docs.size());
    for (const auto& n : pre.docs) candidates.push_back(n.id);

    if (candidates.empty()) {
        RankedResult empty;
        empty.radius = pre.radius;
        empty.empty_preselection = true;
        empty.diagnostic = "empty preselection at radius " + std::to_string(pre.radius) + " for code " + code.to_string();
        return empty;
    }

    SparseVector ranking;
    if (uses_gsa(cfg.variant)) {
        ranking = gsa_query(query.vector, q_dense, trace.reconstruction(), engine.scaling, cfg.gsa_sigma, cfg.gsa_alpha);
    } else if (cfg.variant == Variant::reconstruction) {
        ranking = unscale_from_network(trace.reconstruction(), engine.scaling);
    } else {
        ranking = query.vector;
    }

    const std::size_t first_depth = uses_prf(cfg.variant) ? std::max(cfg.depth, cfg.prf_k + 1) : cfg.depth;
    RankedResult first = rank(ranking, candidates, engine.docs, first_depth);
    first.radius = pre.radius;
    if (!uses_prf(cfg.variant)) return first;

    std::vector<SparseVector> feedback;
    auto take = [&](DocId row) {
        if (feedback.size() < cfg.prf_k && row != query.self_row) feedback.push_back(engine.docs.vector(row));
    };
    if (cfg.prf_source == PrfSource::first_pass) {
        for (const auto& d : first.docs) take(d.row);
    } else {
        for (const auto& n : ball_scan(engine.index, code, std::min<std::uint32_t>(1, code.width()))) take(n.id);
    }
    if (feedback.empty()) {
        first.docs.resize(std::min(first.docs.size(), cfg.depth));
        return first;
    }
    const auto adjusted = prf_adjust(ranking, feedback);

    RankedResult second;
    if (cfg.prf_scope == PrfScope::corpus) {
        std::vector<DocId> all(engine.docs.size());
        std::iota(all.begin(), all.end(), DocId{0});
        second = rank(adjusted, all, engine.docs, cfg.depth);
        second.preselection = std::move(first.preselection);
    } else {
        second = rank(adjusted, candidates, engine.docs, cfg.depth);
    }
    second.radius = pre.radius;
    return second;
}

RankedResult search(const Document& query, const Engine& engine, const QueryConfig& cfg) {
    Query q;
    q.id = query.id;
    q.label = query.label;
    q.vector = tfidf_transform(count_vector(query, engine.vocab), engine.vocab);
    return search(q, engine, cfg);
}

}  // namespace semhash
