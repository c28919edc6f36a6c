#include "semhash/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

#include "semhash/container.hpp"
#include "semhash/parallel.hpp"

namespace semhash {
namespace {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct PerQuery {
    QueryLog log;
    std::vector<std::vector<double>> curves;  // [variant][k-1]
    std::vector<bool> empty;
};

}  // namespace

double precision_at_k(std::span<const DocId> ranked, std::int32_t query_label, std::span<const std::int32_t> labels,
                      std::size_t k) {
    if (k == 0) throw std::invalid_argument("precision_at_k: k must be at least 1");
    const std::size_t n = std::min(k, ranked.size());
    if (n == 0) return 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (labels[ranked[i]] == query_label) ++hits;
    return static_cast<double>(hits) / static_cast<double>(n);
}

const VariantCurve& EvalReport::curve(Variant v) const {
    const auto name = to_string(v);
    for (const auto& c : variants)
        if (c.variant == name) return c;
    throw std::out_of_range("report has no variant " + name);
}

EvalReport run_experiment(const Engine& engine, std::span<const Query> queries, const EvalConfig& cfg) {
    if (cfg.max_k == 0) throw std::invalid_argument("run_experiment: max_k must be at least 1");
    if (cfg.variants.empty()) throw std::invalid_argument("run_experiment: no variants");
    const auto labels = engine.docs.labels();
    const std::size_t nv = cfg.variants.size();

    std::vector<std::size_t> label_totals;
    for (auto l : labels) {
        if (l >= 0 && static_cast<std::size_t>(l) >= label_totals.size()) label_totals.resize(l + 1, 0);
        if (l >= 0) ++label_totals[l];
    }

    std::vector<PerQuery> per_query(queries.size());
    parallel_for(queries.size(), cfg.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t qi = begin; qi < end; ++qi) {
            const auto& q = queries[qi];
            auto& out = per_query[qi];
            out.log.query_id = q.id;
            out.log.label = q.label;
            out.curves.assign(nv, std::vector<double>(cfg.max_k, 0.0));
            out.empty.assign(nv, false);
            const std::size_t relevant_total =
                q.label >= 0 && static_cast<std::size_t>(q.label) < label_totals.size() ? label_totals[q.label] : 0;
            for (std::size_t v = 0; v < nv; ++v) {
                QueryConfig qc = cfg.query;
                qc.variant = cfg.variants[v];
                qc.depth = std::max(qc.depth, cfg.max_k);
                const auto result = search(q, engine, qc);
                const auto rows = result.rows();
                if (v == 0) {
                    out.log.radius = result.radius;
                    out.log.preselection_size = result.preselection_size();
                    out.log.preselection_relevant = static_cast<std::size_t>(std::count_if(
                        result.preselection.begin(), result.preselection.end(),
                        [&](DocId r) { return labels[r] == q.label; }));
                }
                out.empty[v] = result.empty_preselection;
                std::size_t hits = 0;
                for (std::size_t k = 1; k <= cfg.max_k; ++k) {
                    if (k <= rows.size() && labels[rows[k - 1]] == q.label) ++hits;
                    const std::size_t n = std::min(k, rows.size());
                    out.curves[v][k - 1] = n == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(n);
                }
                out.log.precision_at_10.push_back(out.curves[v][std::min<std::size_t>(10, cfg.max_k) - 1]);
                out.log.recall.push_back(relevant_total == 0 ? 0.0
                                                             : static_cast<double>(hits) / static_cast<double>(relevant_total));
            }
        }
    });

    EvalReport report;
    report.query_count = queries.size();
    report.max_k = cfg.max_k;
    report.config = {{"max_k", std::to_string(cfg.max_k)},
                     {"radius", std::to_string(cfg.query.preselect.radius)},
                     {"min_count", std::to_string(cfg.query.preselect.min_count)},
                     {"max_radius", std::to_string(cfg.query.preselect.max_radius)},
                     {"code_threshold", format_double(cfg.query.code_threshold)},
                     {"prf_k", std::to_string(cfg.query.prf_k)},
                     {"prf_scope", to_string(cfg.query.prf_scope)},
                     {"prf_source", to_string(cfg.query.prf_source)},
                     {"gsa_alpha", format_double(cfg.query.gsa_alpha)},
                     {"gsa_sigma", format_double(cfg.query.gsa_sigma)}};

    for (auto& pq : per_query) report.queries.push_back(pq.log);
    const double density = density_from_logs(report.queries);
    for (std::size_t v = 0; v < nv; ++v) {
        VariantCurve curve;
        curve.variant = to_string(cfg.variants[v]);
        curve.precision.assign(cfg.max_k, 0.0);
        curve.density = density;
        // Ordered reduction over queries keeps the sums independent of thread count.
        for (const auto& pq : per_query) {
            for (std::size_t k = 0; k < cfg.max_k; ++k) curve.precision[k] += pq.curves[v][k];
            if (pq.empty[v]) ++curve.empty_preselections;
            curve.mean_recall += pq.log.recall[v];
        }
        if (!queries.empty()) {
            for (auto& p : curve.precision) p /= static_cast<double>(queries.size());
            curve.mean_recall /= static_cast<double>(queries.size());
        }
        report.variants.push_back(std::move(curve));
    }
    return report;
}

double density_from_logs(std::span<const QueryLog> logs) {
    std::size_t relevant = 0, total = 0;
    for (const auto& l : logs) {
        relevant += l.preselection_relevant;
        total += l.preselection_size;
    }
    return total == 0 ? 0.0 : static_cast<double>(relevant) / static_cast<double>(total);
}

std::string report_to_csv(const EvalReport& report) {
    std::string out = "variant,k,mean_precision\n";
    for (const auto& c : report.variants) {
        for (std::size_t k = 0; k < c.precision.size(); ++k) {
            out += c.variant + "," + std::to_string(k + 1) + "," + format_double(c.precision[k]) + "\n";
        }
    }
    return out;
}

std::string report_to_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    j["query_count"] = report.query_count;
    j["max_k"] = report.max_k;
    auto& cfg = j["config"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : report.config) cfg[k] = v;
    j["variants"] = nlohmann::ordered_json::array();
    for (const auto& c : report.variants) {
        j["variants"].push_back({{"variant", c.variant},
                                 {"density", c.density},
                                 {"empty_preselections", c.empty_preselections},
                                 {"mean_recall", c.mean_recall},
                                 {"precision", c.precision}});
    }
    j["queries"] = nlohmann::ordered_json::array();
    for (const auto& q : report.queries) {
        j["queries"].push_back({{"query_id", q.query_id},
                                {"label", q.label},
                                {"radius", q.radius},
                                {"preselection_size", q.preselection_size},
                                {"preselection_relevant", q.preselection_relevant},
                                {"precision_at_10", q.precision_at_10},
                                {"recall", q.recall}});
    }
    return j.dump(2) + "\n";
}

void export_report(const EvalReport& report, const std::filesystem::path& stem) {
    auto csv = stem;
    csv += ".csv";
    auto json = stem;
    json += ".json";
    try {
        io::write_text_atomic(csv, report_to_csv(report));
        io::write_text_atomic(json, report_to_json(report));
    } catch (const std::exception& e) {
        throw std::runtime_error("exporting report to " + stem.string() + ".{csv,json}: " + e.what());
    }
}

}  // namespace semhash
