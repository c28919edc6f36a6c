#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "semhash/eval.hpp"
#include "semhash/synthetic.hpp"
#include "test_util.hpp"

using namespace semhash;

namespace {

Engine tiny_engine(std::uint32_t classes) {
    SyntheticSpec spec;
    spec.classes = classes;
    spec.docs_per_class = 40 / classes;
    spec.vocab_size = 30;
    spec.topic_words_per_class = 5;
    spec.min_length = 15;
    spec.max_length = 25;
    spec.seed = 4;
    const auto corpus = make_synthetic_corpus(spec);
    Engine e;
    e.vocab = build_vocabulary(corpus.docs, {}, builtin_stopwords());
    std::vector<std::int32_t> labels;
    std::vector<std::int64_t> ids;
    for (const auto& d : corpus.docs) {
        labels.push_back(d.label);
        ids.push_back(d.id);
    }
    e.docs = VectorCollection(vectorize(corpus.docs, e.vocab), labels, ids);
    e.scaling = compute_scaling(e.docs.vectors());
    e.net = init_network(default_dims(e.vocab.size(), 4, {8}), 2);
    e.index = index_collection(e.net, e.docs, e.scaling);
    return e;
}

std::vector<Query> queries_of(const Engine& e) {
    std::vector<Query> qs;
    for (DocId r = 0; r < e.docs.size(); r += 3) qs.push_back(Query{e.docs.external_id(r), e.docs.label(r), e.docs.vector(r), r});
    return qs;
}

EvalConfig wide_config(const Engine& e) {
    EvalConfig cfg;
    cfg.query.preselect = {e.index.width(), 0, e.index.width(), BallStrategy::scan};
    cfg.query.gsa_sigma = 1.0;
    return cfg;
}

}  // namespace

TEST_CASE("precision at k") {
    const std::vector<std::int32_t> labels{1, 1, 0, 1, 0, 1, 1};
    const std::vector<DocId> ranked{0, 1, 2, 3, 4};
    CHECK(precision_at_k(ranked, 1, labels, 5) == doctest::Approx(0.6));
    CHECK(precision_at_k(std::vector<DocId>{0, 1, 3, 5, 6}, 1, labels, 5) == 1.0);
    CHECK(precision_at_k(std::vector<DocId>{2, 4}, 1, labels, 10) == 0.0);
    CHECK(precision_at_k(std::vector<DocId>{0, 2}, 1, labels, 10) == 0.5);
    CHECK(precision_at_k({}, 1, labels, 3) == 0.0);
    CHECK_THROWS_AS(precision_at_k(ranked, 1, labels, 0), std::invalid_argument);
}

TEST_CASE("single-class corpus gives perfect curves") {
    const auto engine = tiny_engine(1);
    const auto report = run_experiment(engine, queries_of(engine), wide_config(engine));
    CHECK(report.variants.size() == 5);
    for (const auto& c : report.variants) {
        CHECK(c.precision.size() == 100);
        for (double p : c.precision) CHECK(p == 1.0);
        CHECK(c.density == 1.0);
    }
}

TEST_CASE("experiment invariants") {
    const auto engine = tiny_engine(4);
    auto cfg = wide_config(engine);
    cfg.variants = {Variant::tfidf, Variant::gsa};
    cfg.query.gsa_alpha = 0.0;
    auto queries = queries_of(engine);
    const auto report = run_experiment(engine, queries, cfg);
    CHECK(report.variants[0].precision == report.variants[1].precision);
    for (const auto& c : report.variants) {
        for (double p : c.precision) CHECK((p >= 0.0 && p <= 1.0));
        CHECK((c.density >= 0.0 && c.density <= 1.0));
    }
    CHECK(report.query_count == queries.size());
    CHECK(report.variants[0].density == doctest::Approx(density_from_logs(report.queries)));

    std::reverse(queries.begin(), queries.end());
    cfg.threads = 3;
    const auto reversed = run_experiment(engine, queries, cfg);
    for (std::size_t v = 0; v < 2; ++v) {
        for (std::size_t k = 0; k < 100; ++k) {
            CHECK(reversed.variants[v].precision[k] == doctest::Approx(report.variants[v].precision[k]).epsilon(1e-12));
        }
    }
}

TEST_CASE("empty preselections count as zero precision") {
    auto engine = tiny_engine(2);
    const auto q0 = Query{0, 0, engine.docs.vector(0), std::nullopt};
    BinaryCode other = binarize(encode(engine.net, scale_for_network(q0.vector, engine.scaling)));
    other.flip(0);
    std::vector<std::pair<DocId, BinaryCode>> moved;
    for (DocId r = 0; r < engine.docs.size(); ++r) moved.emplace_back(r, other);
    engine.index = build_index(moved);
    EvalConfig cfg;
    cfg.query.preselect = {0, 0, 0, BallStrategy::scan};
    cfg.variants = {Variant::tfidf};
    const auto report = run_experiment(engine, std::vector<Query>{q0}, cfg);
    CHECK(report.variants[0].empty_preselections == 1);
    for (double p : report.variants[0].precision) CHECK(p == 0.0);
    CHECK(report.query_count == 1);
}

TEST_CASE("report export") {
    EvalReport report;
    report.query_count = 3;
    report.max_k = 100;
    for (const char* name : {"tfidf", "gsa"}) {
        VariantCurve c;
        c.variant = name;
        for (int k = 1; k <= 100; ++k) c.precision.push_back(1.0 / (3.0 + k));
        c.density = 1.0 / 3.0;
        report.variants.push_back(c);
    }
    const auto csv = report_to_csv(report);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "variant,k,mean_precision");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        const auto c1 = line.find(','), c2 = line.rfind(',');
        const auto variant = line.substr(0, c1);
        const int k = std::stoi(line.substr(c1 + 1, c2 - c1 - 1));
        const double value = std::strtod(line.c_str() + c2 + 1, nullptr);
        CHECK(value == report.curve(parse_variant(variant)).precision[k - 1]);
        ++rows;
    }
    CHECK(rows == 200);

    TempDir dir;
    export_report(report, dir / "r");
    const auto first_csv = read_text(dir / "r.csv"), first_json = read_text(dir / "r.json");
    export_report(report, dir / "r");
    CHECK(read_text(dir / "r.csv") == first_csv);
    CHECK(read_text(dir / "r.json") == first_json);
    CHECK(first_csv == csv);
    CHECK(first_json.find("\"density\"") != std::string::npos);
}
