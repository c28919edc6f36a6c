#include "semhash/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

namespace semhash {
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<fs::path> sorted_entries(const fs::path& dir, bool want_dirs) {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (want_dirs ? e.is_directory() : e.is_regular_file()) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

Corpus load_directory(const fs::path& root) {
    Corpus corpus;
    std::int64_t next_id = 0;
    for (const auto& class_dir : sorted_entries(root, true)) {
        const auto label = static_cast<std::int32_t>(corpus.label_names.size());
        corpus.label_names.push_back(class_dir.filename().string());
        for (const auto& file : sorted_entries(class_dir, false)) {
            corpus.docs.push_back(Document{next_id++, read_file(file), label});
        }
    }
    if (corpus.docs.empty()) throw std::runtime_error("corpus directory " + root.string() + " holds no documents");
    return corpus;
}

Corpus load_jsonl(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    Corpus corpus;
    std::vector<nlohmann::json> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            auto j = nlohmann::json::parse(line);
            Document doc;
            doc.id = j.at("id").get<std::int64_t>();
            doc.text = j.at("text").get<std::string>();
            auto label = j.at("label");
            if (!label.is_string() && !(label.is_number_integer() && label.get<std::int64_t>() >= 0)) {
                throw std::runtime_error("label must be a non-negative integer or a class name");
            }
            labels.push_back(std::move(label));
            corpus.docs.push_back(std::move(doc));
        } catch (const std::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (corpus.docs.empty()) throw std::runtime_error(path.string() + " holds no documents");

    const bool named = labels.front().is_string();
    for (const auto& l : labels) {
        if (l.is_string() != named) throw std::runtime_error(path.string() + ": mixes numeric and named labels");
    }
    if (named) {
        std::map<std::string, std::int32_t> ids;
        for (const auto& l : labels) ids.emplace(l.get<std::string>(), 0);
        std::int32_t next = 0;
        for (auto& [name, id] : ids) {
            id = next++;
            corpus.label_names.push_back(name);
        }
        for (std::size_t k = 0; k < labels.size(); ++k) corpus.docs[k].label = ids.at(labels[k].get<std::string>());
    } else {
        std::int32_t max_label = 0;
        for (std::size_t k = 0; k < labels.size(); ++k) {
            corpus.docs[k].label = labels[k].get<std::int32_t>();
            max_label = std::max(max_label, corpus.docs[k].label);
        }
        for (std::int32_t l = 0; l <= max_label; ++l) corpus.label_names.push_back(std::to_string(l));
    }

    std::sort(corpus.docs.begin(), corpus.docs.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (std::size_t k = 1; k < corpus.docs.size(); ++k) {
        if (corpus.docs[k].id == corpus.docs[k - 1].id) {
            throw std::runtime_error(path.string() + ": duplicate document id " + std::to_string(corpus.docs[k].id));
        }
    }
    return corpus;
}

}  // namespace

Corpus load_corpus(const fs::path& path) {
    if (fs::is_directory(path)) return load_directory(path);
    if (fs::is_regular_file(path)) return load_jsonl(path);
    throw std::runtime_error("corpus path does not exist: " + path.string());
}

CorpusSplit split_corpus(const std::vector<Document>& docs, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction >= 0.0 && test_fraction < 1.0)) {
        throw std::invalid_argument("split_corpus: test_fraction must be in [0, 1)");
    }
    std::map<std::int32_t, std::vector<std::size_t>> by_label;
    for (std::size_t k = 0; k < docs.size(); ++k) by_label[docs[k].label].push_back(k);

    std::mt19937_64 rng(seed);
    std::unordered_set<std::size_t> test_rows;
    for (auto& [label, rows] : by_label) {
        std::shuffle(rows.begin(), rows.end(), rng);
        const auto n_test = static_cast<std::size_t>(std::floor(test_fraction * static_cast<double>(rows.size()) + 0.5));
        for (std::size_t k = 0; k < std::min(n_test, rows.size()); ++k) test_rows.insert(rows[k]);
    }
    CorpusSplit split;
    for (std::size_t k = 0; k < docs.size(); ++k) {
        (test_rows.contains(k) ? split.test : split.train).push_back(docs[k]);
    }
    auto by_id = [](const Document& a, const Document& b) { return a.id < b.id; };
    std::sort(split.train.begin(), split.train.end(), by_id);
    std::sort(split.test.begin(), split.test.end(), by_id);
    return split;
}

}  // namespace semhash
