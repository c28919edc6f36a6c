#pragma once

#include <cstdint>
#include <string>

#include "semhash/corpus.hpp"

namespace semhash {

/// Class-skewed multinomial text. Every token is drawn either from the
/// document's class topic words (probability topic_weight, uniform) or from a
/// Zipf-shaped background over the whole vocabulary.
struct SyntheticSpec {
    std::uint32_t classes = 4;
    std::uint32_t docs_per_class = 250;
    std::uint32_t vocab_size = 200;
    std::uint32_t topic_words_per_class = 30;
    double topic_weight = 0.35;
    double zipf_exponent = 0.3;
    std::uint32_t min_length = 40;
    std::uint32_t max_length = 100;
    std::uint64_t seed = 1;
};

/// Alphabetic, stopword-free word for index k ("zq" + two or more letters).
std::string synthetic_word(std::uint32_t k);

/// Documents are interleaved by class (id d has label d % classes).
Corpus make_synthetic_corpus(const SyntheticSpec& spec);

}  // namespace semhash
