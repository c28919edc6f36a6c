#include "semhash/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "semhash/container.hpp"
#include "semhash/corpus.hpp"
#include "semhash/rbm.hpp"

namespace semhash {
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kNetworkJsonLimit = 100000;  // parameters

void write_collection(io::ByteWriter& w, const VectorCollection& c) {
    w.u64(c.size());
    for (DocId row = 0; row < c.size(); ++row) {
        w.i64(c.external_id(row));
        w.i32(c.label(row));
        const auto& v = c.vector(row);
        w.u32s(v.ids());
        w.f64s(v.values());
    }
}

VectorCollection read_collection(io::ByteReader& r, std::uint32_t dim) {
    const auto n = r.u64();
    std::vector<SparseVector> vectors;
    std::vector<std::int32_t> labels;
    std::vector<std::int64_t> ids;
    for (std::uint64_t k = 0; k < n; ++k) {
        ids.push_back(r.i64());
        labels.push_back(r.i32());
        auto vid = r.u32s();
        auto vals = r.f64s();
        vectors.emplace_back(dim, std::move(vid), std::move(vals));
    }
    return VectorCollection(std::move(vectors), std::move(labels), std::move(ids));
}

VectorCollection collect(const std::vector<Document>& docs, const Vocabulary& vocab, unsigned threads) {
    std::vector<std::int32_t> labels;
    std::vector<std::int64_t> ids;
    for (const auto& d : docs) {
        labels.push_back(d.label);
        ids.push_back(d.id);
    }
    return VectorCollection(vectorize(docs, vocab, threads), std::move(labels), std::move(ids));
}

fs::path require(const PipelineConfig& cfg, const char* file, const char* stage) {
    auto path = cfg.run_dir() / file;
    if (!fs::exists(path)) {
        throw PipelineError("missing " + path.string() + ": run the `" + std::string(stage) + "` stage first");
    }
    return path;
}

void write_resolved_config(const PipelineConfig& cfg) {
    io::write_text_atomic(cfg.run_dir() / artifacts::kConfig, cfg.to_text());
}

std::vector<std::uint32_t> parse_uint_list(const std::string& s) {
    std::vector<std::uint32_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(' '));
        item.erase(item.find_last_not_of(' ') + 1);
        if (item.empty()) continue;
        std::uint32_t v = 0;
        auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc() || p != item.data() + item.size() || v == 0) {
            throw PipelineError("expected a comma-separated list of positive integers, got '" + s + "'");
        }
        out.push_back(v);
    }
    return out;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

void save_store(const fs::path& path, const VectorStore& store) {
    io::ByteWriter w;
    w.u64(store.vocab.num_docs());
    w.u64(store.vocab.size());
    for (std::uint32_t k = 0; k < store.vocab.size(); ++k) {
        w.str(store.vocab.term(k));
        w.u32(store.vocab.doc_freq(k));
    }
    w.f64(store.scaling.max_weight);
    w.u64(store.label_names.size());
    for (const auto& name : store.label_names) w.str(name);
    write_collection(w, store.train);
    write_collection(w, store.test);
    io::save_artifact(path, io::ArtifactKind::vector_store, w);
}

VectorStore load_store(const fs::path& path) {
    const auto payload = io::load_artifact(path, io::ArtifactKind::vector_store);
    io::ByteReader r(payload);
    VectorStore store;
    const auto num_docs = r.u64();
    const auto v = r.u64();
    std::vector<std::string> terms;
    std::vector<std::uint32_t> df;
    for (std::uint64_t k = 0; k < v; ++k) {
        terms.push_back(r.str());
        df.push_back(r.u32());
    }
    store.vocab = Vocabulary(std::move(terms), std::move(df), num_docs);
    store.scaling.max_weight = r.f64();
    const auto n_labels = r.u64();
    for (std::uint64_t k = 0; k < n_labels; ++k) store.label_names.push_back(r.str());
    store.train = read_collection(r, store.vocab.size());
    store.test = read_collection(r, store.vocab.size());
    r.expect_end();
    return store;
}

std::string vocabulary_to_json(const Vocabulary& vocab) {
    nlohmann::ordered_json j;
    j["num_docs"] = vocab.num_docs();
    j["features"] = nlohmann::ordered_json::array();
    for (std::uint32_t k = 0; k < vocab.size(); ++k) {
        j["features"].push_back({{"id", k}, {"term", vocab.term(k)}, {"doc_freq", vocab.doc_freq(k)}});
    }
    return j.dump(1) + "\n";
}

const std::vector<PipelineConfig::Key>& PipelineConfig::keys() {
    static const std::vector<Key> k = {
        {"run.dir", "run", "directory holding every stage artifact"},
        {"seed", "42", "base seed; split, training and pretraining derive from it"},
        {"threads", "1", "worker cap for data-parallel stages"},
        {"kernels", "auto", "auto|scalar|avx2"},
        {"corpus.path", "", "class-per-directory tree or JSON-lines file"},
        {"corpus.test_path", "", "optional separate query corpus; otherwise split"},
        {"corpus.test_fraction", "0.2", "stratified held-out fraction when no test_path"},
        {"textpipe.min_df_frac", "0.00001", "keep terms with df > min_df_frac * |D|"},
        {"textpipe.max_df_frac", "0.9", "keep terms with df < max_df_frac * |D|"},
        {"textpipe.top_n", "10000", "most frequent surviving terms to keep"},
        {"textpipe.stopwords", "", "stopword file; empty uses the built-in English list"},
        {"network.hidden", "500,500", "encoder hidden widths (mirrored in the decoder)"},
        {"network.code_bits", "20", "bottleneck width"},
        {"train.epochs", "20", ""},
        {"train.batch_size", "256", ""},
        {"train.noise_sigma", "2", "std-dev of the input corruption"},
        {"train.loss", "binary_cross_entropy", "binary_cross_entropy|squared_error"},
        {"train.rho", "0.95", "Adadelta decay"},
        {"train.epsilon", "1e-6", "Adadelta stabilizer"},
        {"train.learning_rate", "1", "multiplier on the Adadelta step"},
        {"train.pretrain", "false", "initialise from a greedily trained RBM stack"},
        {"train.pretrain_epochs", "10", ""},
        {"train.pretrain_batch_size", "100", ""},
        {"train.pretrain_learning_rate", "0.1", ""},
        {"hash.threshold", "0.5", "bit = probability > threshold"},
        {"hash.radius", "2", "initial hamming radius"},
        {"hash.min_count", "1", "widen the radius until this many candidates"},
        {"hash.max_radius", "", "radius cap; empty means the code width"},
        {"hash.strategy", "auto", "auto|generative|scan"},
        {"query.variant", "tfidf", "comma list of tfidf|gsa|prf|gsa+prf|reconstruction"},
        {"query.depth", "100", "results per query"},
        {"query.alpha", "1", "GSA step scale"},
        {"query.sigma", "", "GSA sigma; empty means train.noise_sigma"},
        {"query.prf_k", "5", "feedback documents"},
        {"query.prf_scope", "preselection", "preselection|corpus"},
        {"query.prf_source", "first_pass", "first_pass|hamming_ball"},
        {"eval.k", "100", "precision@k computed for k = 1..eval.k"},
        {"eval.variants", "tfidf,gsa,prf,gsa+prf,reconstruction", ""},
    };
    return k;
}

PipelineConfig::PipelineConfig() {
    for (const auto& k : keys()) values_[k.name] = k.default_value;
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
    auto it = values_.find(key);
    if (it == values_.end()) throw PipelineError("unknown config key '" + key + "'");
    it->second = value;
}

void PipelineConfig::set_assignment(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw PipelineError("expected key=value, got '" + assignment + "'");
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void PipelineConfig::load_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw PipelineError("cannot read config file " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        try {
            set_assignment(line);
        } catch (const PipelineError& e) {
            throw PipelineError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

const std::string& PipelineConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw PipelineError("unknown config key '" + key + "'");
    return it->second;
}

double PipelineConfig::get_double(const std::string& key) const {
    const auto& s = get(key);
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw PipelineError("config key " + key + " expects a number, got '" + s + "'");
    }
}

std::uint64_t PipelineConfig::get_uint(const std::string& key) const {
    const auto& s = get(key);
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
        throw PipelineError("config key " + key + " expects a non-negative integer, got '" + s + "'");
    }
    return v;
}

bool PipelineConfig::get_bool(const std::string& key) const {
    const auto& s = get(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw PipelineError("config key " + key + " expects true/false, got '" + s + "'");
}

std::string PipelineConfig::to_text() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
    return out;
}

unsigned PipelineConfig::threads() const { return static_cast<unsigned>(std::max<std::uint64_t>(1, get_uint("threads"))); }

TrainConfig PipelineConfig::train_config() const {
    TrainConfig t;
    t.epochs = get_uint("train.epochs");
    t.batch_size = get_uint("train.batch_size");
    t.noise_sigma = get_double("train.noise_sigma");
    t.loss = parse_loss(get("train.loss"));
    t.rho = get_double("train.rho");
    t.epsilon = get_double("train.epsilon");
    t.learning_rate = get_double("train.learning_rate");
    t.seed = get_uint("seed") + 1;
    return t;
}

QueryConfig PipelineConfig::query_config(std::uint32_t code_width) const {
    QueryConfig q;
    const auto variants = parse_variants(get("query.variant"));
    q.variant = variants.front();
    q.depth = get_uint("query.depth");
    q.gsa_alpha = get_double("query.alpha");
    q.gsa_sigma = get("query.sigma").empty() ? get_double("train.noise_sigma") : get_double("query.sigma");
    q.prf_k = get_uint("query.prf_k");
    q.prf_scope = parse_prf_scope(get("query.prf_scope"));
    q.prf_source = parse_prf_source(get("query.prf_source"));
    q.code_threshold = get_double("hash.threshold");
    q.preselect.radius = static_cast<std::uint32_t>(get_uint("hash.radius"));
    q.preselect.min_count = get_uint("hash.min_count");
    q.preselect.max_radius =
        get("hash.max_radius").empty() ? code_width : static_cast<std::uint32_t>(get_uint("hash.max_radius"));
    q.preselect.max_radius = std::max(q.preselect.max_radius, q.preselect.radius);
    const auto& strategy = get("hash.strategy");
    if (strategy == "auto") {
        q.preselect.strategy = BallStrategy::automatic;
    } else if (strategy == "generative") {
        q.preselect.strategy = BallStrategy::generative;
    } else if (strategy == "scan") {
        q.preselect.strategy = BallStrategy::scan;
    } else {
        throw PipelineError("hash.strategy must be auto, generative or scan");
    }
    if (q.preselect.max_radius > code_width) {
        throw PipelineError("hash radius exceeds the code width " + std::to_string(code_width));
    }
    return q;
}

EvalConfig PipelineConfig::eval_config(std::uint32_t code_width) const {
    EvalConfig e;
    e.max_k = get_uint("eval.k");
    e.variants = parse_variants(get("eval.variants"));
    e.query = query_config(code_width);
    e.threads = threads();
    return e;
}

void cmd_ingest(const PipelineConfig& cfg) {
    const auto& corpus_path = cfg.get("corpus.path");
    if (corpus_path.empty()) throw PipelineError("corpus.path is not set");
    const auto corpus = load_corpus(corpus_path);

    CorpusSplit split;
    if (!cfg.get("corpus.test_path").empty()) {
        split.train = corpus.docs;
        split.test = load_corpus(cfg.get("corpus.test_path")).docs;
    } else {
        split = split_corpus(corpus.docs, cfg.get_double("corpus.test_fraction"), cfg.get_uint("seed"));
    }
    if (split.train.empty()) throw PipelineError("training split is empty");

    const auto stopwords =
        cfg.get("textpipe.stopwords").empty() ? builtin_stopwords() : load_stopwords(cfg.get("textpipe.stopwords"));
    VocabOptions options;
    options.min_df_frac = cfg.get_double("textpipe.min_df_frac");
    options.max_df_frac = cfg.get_double("textpipe.max_df_frac");
    options.top_n = cfg.get_uint("textpipe.top_n");

    VectorStore store;
    store.vocab = build_vocabulary(split.train, options, stopwords);
    store.label_names = corpus.label_names;
    store.train = collect(split.train, store.vocab, cfg.threads());
    store.test = collect(split.test, store.vocab, cfg.threads());
    store.scaling = compute_scaling(store.train.vectors());
    if (!(store.scaling.max_weight > 0.0)) throw PipelineError("every training TF-IDF vector is empty");

    fs::create_directories(cfg.run_dir());
    save_store(cfg.run_dir() / artifacts::kStore, store);
    io::write_text_atomic(cfg.run_dir() / artifacts::kVocabJson, vocabulary_to_json(store.vocab));
    write_resolved_config(cfg);
}

void cmd_train(const PipelineConfig& cfg) {
    const auto store = load_store(require(cfg, artifacts::kStore, "ingest"));
    const auto hidden = parse_uint_list(cfg.get("network.hidden"));
    const auto code_bits = static_cast<std::uint32_t>(cfg.get_uint("network.code_bits"));
    if (code_bits == 0) throw PipelineError("network.code_bits must be positive");
    const auto dims = default_dims(store.vocab.size(), code_bits, hidden);
    const auto train_cfg = cfg.train_config();

    NetworkParams net;
    if (cfg.get_bool("train.pretrain")) {
        std::vector<std::vector<double>> dense;
        dense.reserve(store.train.size());
        for (const auto& v : store.train.vectors()) dense.push_back(scale_for_network(v, store.scaling));
        RbmTrainConfig rbm_cfg;
        rbm_cfg.epochs = cfg.get_uint("train.pretrain_epochs");
        rbm_cfg.batch_size = cfg.get_uint("train.pretrain_batch_size");
        rbm_cfg.learning_rate = cfg.get_double("train.pretrain_learning_rate");
        rbm_cfg.seed = cfg.get_uint("seed") + 2;
        const std::vector<std::uint32_t> encoder(dims.begin(), dims.begin() + static_cast<std::ptrdiff_t>(bottleneck_index(dims)) + 1);
        const auto stack = pretrain_stack(encoder, dense, rbm_cfg);
        save_rbm_stack(cfg.run_dir() / artifacts::kRbmStack, stack);
        net = unroll(stack);
    } else {
        net = init_network(dims, cfg.get_uint("seed") + 1);
    }
    auto result = train(std::move(net), store.train.vectors(), store.scaling, train_cfg);
    save_network(cfg.run_dir() / artifacts::kNetwork, result.net);
    if (result.net.parameter_count() <= kNetworkJsonLimit) {
        io::write_text_atomic(cfg.run_dir() / artifacts::kNetworkJson, network_to_json(result.net));
    }
    write_resolved_config(cfg);
}

void cmd_index(const PipelineConfig& cfg) {
    const auto store = load_store(require(cfg, artifacts::kStore, "ingest"));
    const auto net = load_network(require(cfg, artifacts::kNetwork, "train"));
    const auto index = index_collection(net, store.train, store.scaling, cfg.get_double("hash.threshold"), cfg.threads());
    save_index(cfg.run_dir() / artifacts::kIndex, index);
    write_resolved_config(cfg);
}

Engine load_engine(const PipelineConfig& cfg) {
    const auto store_path = require(cfg, artifacts::kStore, "ingest");
    const auto net_path = require(cfg, artifacts::kNetwork, "train");
    const auto index_path = require(cfg, artifacts::kIndex, "index");
    auto store = load_store(store_path);
    Engine engine;
    engine.vocab = std::move(store.vocab);
    engine.scaling = store.scaling;
    engine.net = load_network(net_path);
    engine.index = load_index(index_path);
    engine.docs = std::move(store.train);
    if (engine.net.input_dim() != engine.vocab.size()) throw PipelineError("network does not match the vector store");
    if (engine.index.size() != engine.docs.size()) throw PipelineError("index does not match the vector store; rerun `index`");
    return engine;
}

void cmd_query(const PipelineConfig& cfg, const std::optional<std::string>& text,
               const std::optional<std::int64_t>& doc_id, std::ostream& out) {
    if (text.has_value() == doc_id.has_value()) throw PipelineError("query needs exactly one of --text or --doc-id");
    const auto engine = load_engine(cfg);
    const auto qcfg = cfg.query_config(engine.net.code_width());

    Query query;
    nlohmann::ordered_json query_id = nullptr;
    if (doc_id) {
        query_id = *doc_id;
        if (auto row = engine.docs.find_external(*doc_id)) {
            query.id = *doc_id;
            query.label = engine.docs.label(*row);
            query.vector = engine.docs.vector(*row);
            query.self_row = *row;
        } else {
            const auto store = load_store(cfg.run_dir() / artifacts::kStore);
            auto row_t = store.test.find_external(*doc_id);
            if (!row_t) throw PipelineError("document id " + std::to_string(*doc_id) + " is not in the vector store");
            query.id = *doc_id;
            query.label = store.test.label(*row_t);
            query.vector = store.test.vector(*row_t);
        }
    } else {
        query.vector = tfidf_transform(count_vector(*text, engine.vocab), engine.vocab);
    }

    for (auto variant : parse_variants(cfg.get("query.variant"))) {
        QueryConfig qc = qcfg;
        qc.variant = variant;
        const auto result = search(query, engine, qc);
        nlohmann::ordered_json line;
        line["query_id"] = query_id;
        line["variant"] = to_string(variant);
        line["radius"] = result.radius;
        line["preselection_size"] = result.preselection_size();
        line["results"] = nlohmann::ordered_json::array();
        for (const auto& d : result.docs) {
            line["results"].push_back({{"doc_id", engine.docs.external_id(d.row)},
                                       {"score", d.score},
                                       {"label", engine.docs.label(d.row)}});
        }
        if (result.empty_preselection) line["diagnostic"] = result.diagnostic;
        out << line.dump() << "\n";
    }
}

EvalReport cmd_eval(const PipelineConfig& cfg) {
    const auto engine = load_engine(cfg);
    const auto store = load_store(cfg.run_dir() / artifacts::kStore);
    if (store.test.size() == 0) throw PipelineError("no held-out queries: set corpus.test_fraction or corpus.test_path");
    std::vector<Query> queries;
    for (DocId row = 0; row < store.test.size(); ++row) {
        queries.push_back(Query{store.test.external_id(row), store.test.label(row), store.test.vector(row), std::nullopt});
    }
    auto report = run_experiment(engine, queries, cfg.eval_config(engine.net.code_width()));
    std::istringstream resolved(cfg.to_text());
    std::string line;
    while (std::getline(resolved, line)) {
        const auto eq = line.find(" = ");
        report.config.emplace_back("resolved." + line.substr(0, eq), line.substr(eq + 3));
    }
    export_report(report, cfg.run_dir() / artifacts::kReportStem);
    write_resolved_config(cfg);
    return report;
}

}  // namespace semhash
