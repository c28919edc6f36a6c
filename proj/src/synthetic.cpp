#include "semhash/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace semhash {

std::string synthetic_word(std::uint32_t k) {
    std::string suffix;
    do {
        suffix.push_back(static_cast<char>('a' + k % 26));
        k /= 26;
    } while (k > 0);
    while (suffix.size() < 2) suffix.push_back('a');
    std::reverse(suffix.begin(), suffix.end());
    return "zq" + suffix;
}

Corpus make_synthetic_corpus(const SyntheticSpec& spec) {
    if (spec.classes == 0 || spec.docs_per_class == 0 || spec.vocab_size == 0) {
        throw std::invalid_argument("synthetic corpus: classes, docs and vocabulary must be positive");
    }
    if (std::uint64_t{spec.classes} * spec.topic_words_per_class > spec.vocab_size) {
        throw std::invalid_argument("synthetic corpus: topic words exceed the vocabulary");
    }
    if (spec.min_length == 0 || spec.min_length > spec.max_length) {
        throw std::invalid_argument("synthetic corpus: need 0 < min_length <= max_length");
    }
    std::mt19937_64 rng(spec.seed);

    std::vector<std::uint32_t> perm(spec.vocab_size);
    std::iota(perm.begin(), perm.end(), 0U);
    std::shuffle(perm.begin(), perm.end(), rng);

    std::vector<double> weights(spec.vocab_size);
    for (std::uint32_t r = 0; r < spec.vocab_size; ++r) {
        weights[perm[r]] = std::pow(static_cast<double>(r + 1), -spec.zipf_exponent);
    }
    std::discrete_distribution<std::uint32_t> background(weights.begin(), weights.end());

    std::vector<std::uint32_t> topic_pool(spec.vocab_size);
    std::iota(topic_pool.begin(), topic_pool.end(), 0U);
    std::shuffle(topic_pool.begin(), topic_pool.end(), rng);

    std::vector<std::string> words(spec.vocab_size);
    for (std::uint32_t k = 0; k < spec.vocab_size; ++k) words[k] = synthetic_word(k);

    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<std::uint32_t> length(spec.min_length, spec.max_length);
    std::uniform_int_distribution<std::uint32_t> topic_pick(0, std::max(1U, spec.topic_words_per_class) - 1);

    Corpus corpus;
    for (std::uint32_t c = 0; c < spec.classes; ++c) corpus.label_names.push_back("class" + std::to_string(c));
    const std::uint32_t total = spec.classes * spec.docs_per_class;
    for (std::uint32_t d = 0; d < total; ++d) {
        const std::uint32_t label = d % spec.classes;
        const std::uint32_t n = length(rng);
        std::string text;
        for (std::uint32_t t = 0; t < n; ++t) {
            std::uint32_t w;
            if (spec.topic_words_per_class > 0 && coin(rng) < spec.topic_weight) {
                w = topic_pool[label * spec.topic_words_per_class + topic_pick(rng)];
            } else {
                w = background(rng);
            }
            if (!text.empty()) text.push_back(' ');
            text += words[w];
        }
        corpus.docs.push_back(Document{d, std::move(text), static_cast<std::int32_t>(label)});
    }
    return corpus;
}

}  // namespace semhash
