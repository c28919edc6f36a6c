// semhash: ingest -> train -> index -> query / eval over a run directory.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "semhash/kernels.hpp"
#include "semhash/pipeline.hpp"

namespace {

std::string describe_keys() {
    std::string out = "Config keys (key = default):\n";
    for (const auto& k : semhash::PipelineConfig::keys()) {
        out += "  " + k.name + " = " + k.default_value;
        if (!k.help.empty()) out += "    # " + k.help;
        out += "\n";
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semantic hashing document retrieval"};
    app.require_subcommand(0, 1);
    app.footer(describe_keys());

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::string> kernels;
    std::vector<std::string> assignments;
    bool print_config = false;

    app.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "overrides `seed`");
    app.add_option("--threads", threads, "overrides `threads`");
    app.add_option("--kernels", kernels, "auto|scalar|avx2");
    app.add_option("--set", assignments, "key=value override (repeatable)")->take_all();
    app.add_flag("--print-config", print_config, "print the resolved config and exit");

    auto* ingest = app.add_subcommand("ingest", "tokenize, build the vocabulary and TF-IDF vectors");
    auto* train = app.add_subcommand("train", "train the autoencoder");
    auto* index = app.add_subcommand("index", "hash the training documents");
    auto* query = app.add_subcommand("query", "rank training documents for one query");
    auto* eval = app.add_subcommand("eval", "precision@k over the held-out queries");

    std::optional<std::string> text;
    std::optional<std::int64_t> doc_id;
    auto* text_opt = query->add_option("--text", text, "free-text query");
    auto* doc_opt = query->add_option("--doc-id", doc_id, "use a stored document as the query");
    text_opt->excludes(doc_opt);

    CLI11_PARSE(app, argc, argv);

    try {
        semhash::PipelineConfig cfg;
        if (!config_path.empty()) cfg.load_file(config_path);
        for (const auto& a : assignments) cfg.set_assignment(a);
        if (seed) cfg.set("seed", std::to_string(*seed));
        if (threads) cfg.set("threads", std::to_string(*threads));
        if (kernels) cfg.set("kernels", *kernels);

        if (print_config) {
            std::cout << cfg.to_text();
            return 0;
        }
        semhash::kernels::select(cfg.get("kernels"));

        if (*ingest) {
            semhash::cmd_ingest(cfg);
        } else if (*train) {
            semhash::cmd_train(cfg);
        } else if (*index) {
            semhash::cmd_index(cfg);
        } else if (*query) {
            semhash::cmd_query(cfg, text, doc_id, std::cout);
        } else if (*eval) {
            const auto report = semhash::cmd_eval(cfg);
            for (const auto& c : report.variants) {
                const std::size_t k10 = std::min<std::size_t>(10, c.precision.size());
                std::printf("%-15s p@%zu=%.4f density=%.4f empty=%zu\n", c.variant.c_str(), k10,
                            c.precision[k10 - 1], c.density, c.empty_preselections);
            }
        } else {
            std::cerr << app.help();
            return 2;
        }
    } catch (const std::exception& e) {
        std::cerr << "semhash: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
