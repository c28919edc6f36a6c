#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "semhash/textpipe.hpp"

namespace semhash {

struct Corpus {
    std::vector<Document> docs;  // sorted by id
    std::vector<std::string> label_names;
};

/// A directory is read as one subdirectory per class, one text file per
/// document (classes and files taken in sorted name order, ids assigned
/// sequentially). A regular file is read as JSON lines {id, label, text}
/// where label is an integer or a class name.
Corpus load_corpus(const std::filesystem::path& path);

struct CorpusSplit {
    std::vector<Document> train;
    std::vector<Document> test;
};

/// Stratified seeded split; round(test_fraction * n_class) documents of each
/// class go to the test side. Both halves stay sorted by id.
CorpusSplit split_corpus(const std::vector<Document>& docs, double test_fraction, std::uint64_t seed);

}  // namespace semhash
