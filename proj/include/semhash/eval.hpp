#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "semhash/retrieval.hpp"

namespace semhash {

/// Fraction of the first min(k, |ranked|) rows whose label equals
/// query_label; 0 for an empty list. Throws if k == 0.
double precision_at_k(std::span<const DocId> ranked, std::int32_t query_label, std::span<const std::int32_t> labels,
                      std::size_t k);

struct EvalConfig {
    std::size_t max_k = 100;
    std::vector<Variant> variants{Variant::tfidf, Variant::gsa, Variant::prf, Variant::gsa_prf,
                                  Variant::reconstruction};
    QueryConfig query;  // variant field is overridden per variant
    unsigned threads = 1;
};

struct VariantCurve {
    std::string variant;
    std::vector<double> precision;  // precision[k - 1] = mean precision@k
    double density = 0.0;           // sum relevant preselected / sum preselected
    std::size_t empty_preselections = 0;
    double mean_recall = 0.0;       // at max_k, diagnostic only
};

struct QueryLog {
    std::int64_t query_id = 0;
    std::int32_t label = 0;
    std::uint32_t radius = 0;
    std::size_t preselection_size = 0;
    std::size_t preselection_relevant = 0;
    std::vector<double> precision_at_10;  // per variant, in report order
    std::vector<double> recall;           // per variant, at max_k
};

struct EvalReport {
    std::vector<VariantCurve> variants;
    std::size_t query_count = 0;
    std::size_t max_k = 0;
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<QueryLog> queries;

    const VariantCurve& curve(Variant v) const;
};

/// Runs every variant for every query and averages precision@k for k = 1..max_k.
/// Queries with an empty preselection count as precision 0 everywhere.
EvalReport run_experiment(const Engine& engine, std::span<const Query> queries, const EvalConfig& cfg);

/// Density recomputed from the per-query logs (sum relevant / sum size).
double density_from_logs(std::span<const QueryLog> logs);

std::string report_to_csv(const EvalReport& report);
std::string report_to_json(const EvalReport& report);
/// Writes `<stem>.csv` (variant,k,mean_precision) and `<stem>.json`.
void export_report(const EvalReport& report, const std::filesystem::path& stem);

}  // namespace semhash
