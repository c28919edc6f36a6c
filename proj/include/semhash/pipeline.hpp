#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "semhash/eval.hpp"
#include "semhash/retrieval.hpp"
#include "semhash/textpipe.hpp"

namespace semhash {

/// Vocabulary plus the TF-IDF vectors of both splits.
struct VectorStore {
    Vocabulary vocab;
    ScalingStats scaling;
    std::vector<std::string> label_names;
    VectorCollection train;
    VectorCollection test;
};

void save_store(const std::filesystem::path& path, const VectorStore& store);
VectorStore load_store(const std::filesystem::path& path);
std::string vocabulary_to_json(const Vocabulary& vocab);

/// Raised for user-facing pipeline failures (bad config, missing stage output).
class PipelineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat namespaced key=value settings. Every key has a documented default;
/// unknown keys are rejected.
class PipelineConfig {
public:
    struct Key {
        std::string name;
        std::string default_value;
        std::string help;
    };
    static const std::vector<Key>& keys();

    PipelineConfig();

    /// `key = value` lines, '#' comments, blank lines ignored.
    void load_file(const std::filesystem::path& path);
    void set(const std::string& key, const std::string& value);
    /// "key=value"
    void set_assignment(const std::string& assignment);

    const std::string& get(const std::string& key) const;
    double get_double(const std::string& key) const;
    std::uint64_t get_uint(const std::string& key) const;
    bool get_bool(const std::string& key) const;

    /// Fully resolved config, one `key = value` line per key in sorted order.
    std::string to_text() const;

    std::filesystem::path run_dir() const { return get("run.dir"); }
    unsigned threads() const;

    TrainConfig train_config() const;
    QueryConfig query_config(std::uint32_t code_width) const;
    EvalConfig eval_config(std::uint32_t code_width) const;

private:
    std::map<std::string, std::string> values_;
};

namespace artifacts {
inline constexpr const char* kStore = "store.bin";
inline constexpr const char* kVocabJson = "vocab.json";
inline constexpr const char* kNetwork = "network.bin";
inline constexpr const char* kNetworkJson = "network.json";
inline constexpr const char* kRbmStack = "rbm_stack.bin";
inline constexpr const char* kIndex = "index.bin";
inline constexpr const char* kReportStem = "report";
inline constexpr const char* kConfig = "config.resolved";
}  // namespace artifacts

void cmd_ingest(const PipelineConfig& cfg);
void cmd_train(const PipelineConfig& cfg);
void cmd_index(const PipelineConfig& cfg);
/// One JSON line per configured variant. Exactly one of text / doc_id is used.
void cmd_query(const PipelineConfig& cfg, const std::optional<std::string>& text,
               const std::optional<std::int64_t>& doc_id, std::ostream& out);
EvalReport cmd_eval(const PipelineConfig& cfg);

/// Loads store, network and index from the run directory.
Engine load_engine(const PipelineConfig& cfg);

}  // namespace semhash
