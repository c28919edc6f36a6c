#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "semhash/textpipe.hpp"

using namespace semhash;

namespace {

std::vector<Document> docs_from(const std::vector<std::string>& texts) {
    std::vector<Document> docs;
    for (std::size_t i = 0; i < texts.size(); ++i) docs.push_back({static_cast<std::int64_t>(i), texts[i], 0});
    return docs;
}

std::string join(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& t : tokens) out += (out.empty() ? "" : " ") + t;
    return out;
}

}  // namespace

TEST_CASE("tokenize") {
    const StopwordSet the{"the"};
    CHECK(tokenize("The cat's 2nd cat", the) == std::vector<std::string>{"cat", "nd", "cat"});
    CHECK(tokenize("", the).empty());
    CHECK(tokenize("is the", StopwordSet{"is", "the"}).empty());
    CHECK(tokenize("E-Mail: FOO@bar.com", {}) == std::vector<std::string>{"mail", "foo", "bar", "com"});
    CHECK(tokenize("caf\xc3\xa9 ok", {}) == std::vector<std::string>{"caf", "ok"});
}

TEST_CASE("builtin stopwords cover the common function words") {
    const auto& sw = builtin_stopwords();
    CHECK(sw.count("the") == 1);
    CHECK(sw.count("is") == 1);
    CHECK(sw.count("rocket") == 0);
    CHECK(tokenize("The rocket is in the orbit", sw) == std::vector<std::string>{"rocket", "orbit"});
}

TEST_CASE("tokenize is idempotent on its own output") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> ch(32, 126);
    const StopwordSet sw{"the", "and", "of"};
    for (int trial = 0; trial < 200; ++trial) {
        std::string text;
        for (int i = 0; i < 80; ++i) text.push_back(static_cast<char>(ch(rng)));
        const auto once = tokenize(text, sw);
        CHECK(tokenize(join(once), sw) == once);
        for (const auto& t : once) {
            CHECK(t.size() >= 2);
            for (char c : t) CHECK((c >= 'a' && c <= 'z'));
        }
    }
}

TEST_CASE("vocabulary document-frequency bounds") {
    std::vector<std::string> texts;
    for (int i = 0; i < 10; ++i) {
        std::string t = "everywhere";
        if (i < 5) t += " half";
        texts.push_back(t);
    }
    const auto docs = docs_from(texts);
    const auto vocab = build_vocabulary(docs, {0.0001, 0.9, 10000}, {});
    CHECK(vocab.size() == 1);
    CHECK(vocab.term(0) == "half");
    CHECK(vocab.doc_freq(0) == 5);
    CHECK(vocab.num_docs() == 10);
    CHECK_FALSE(vocab.find("everywhere").has_value());
}

TEST_CASE("top_n keeps the most frequent terms") {
    const auto docs = docs_from({"aa aa aa bb bb", "cc"});
    const auto vocab = build_vocabulary(docs, {0.0001, 1.0, 1}, {});
    REQUIRE(vocab.size() == 1);
    CHECK(vocab.term(0) == "aa");

    const auto tie = build_vocabulary(docs_from({"zz yy", "xx"}), {0.0001, 1.0, 2}, {});
    CHECK(std::vector<std::string>(tie.terms().begin(), tie.terms().end()) == std::vector<std::string>{"xx", "yy"});
}

TEST_CASE("vocabulary errors") {
    CHECK_THROWS_AS(build_vocabulary({}, {}, {}), std::invalid_argument);
    CHECK_THROWS_AS(build_vocabulary(docs_from({"aa"}), {0.5, 0.2, 10}, {}), std::invalid_argument);
    CHECK_THROWS_AS(build_vocabulary(docs_from({"aa", "aa"}), {0.0, 0.9, 10}, {}), std::runtime_error);
}

TEST_CASE("retained features satisfy the df bounds on a random corpus") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> word(0, 59), len(1, 30);
    std::vector<std::string> texts;
    for (int d = 0; d < 120; ++d) {
        std::string t;
        const int n = len(rng);
        for (int i = 0; i < n; ++i) {
            const int w = std::min(word(rng), word(rng));
            t += " w" + std::string(1, static_cast<char>('a' + w / 26)) + std::string(1, static_cast<char>('a' + w % 26));
        }
        texts.push_back(t);
    }
    const VocabOptions opts{0.05, 0.5, 25};
    const auto vocab = build_vocabulary(docs_from(texts), opts, {});
    CHECK(vocab.size() <= 25);
    for (std::uint32_t f = 0; f < vocab.size(); ++f) {
        CHECK(vocab.doc_freq(f) > opts.min_df_frac * 120);
        CHECK(vocab.doc_freq(f) < opts.max_df_frac * 120);
        if (f > 0) CHECK(vocab.term(f - 1) < vocab.term(f));
    }
}

TEST_CASE("count vectors") {
    const Vocabulary vocab({"cat", "dog"}, {1, 1}, 2);
    CHECK(count_vector("cat cat dog", vocab).pairs() == std::vector<std::pair<std::uint32_t, double>>{{0, 2.0}, {1, 1.0}});
    CHECK(count_vector("bird fish", vocab).empty());
    CHECK(count_vector("", vocab).empty());
}

TEST_CASE("tfidf weights") {
    const Vocabulary vocab({"aa", "bb", "cc"}, {10, 10, 100}, 100);
    // c(aa) = 2, W = 4
    const SparseVector counts(3, {0, 1}, {2.0, 2.0});
    const auto w = tfidf_transform(counts, vocab);
    CHECK(w.at(0) == doctest::Approx(0.5 * std::log(10.0)));
    CHECK(w.at(0) == doctest::Approx(1.1513).epsilon(1e-4));

    const auto ubiquitous = tfidf_transform(SparseVector(3, {0, 2}, {1.0, 3.0}), vocab);
    CHECK(ubiquitous.nnz() == 1);
    CHECK(ubiquitous.at(2) == 0.0);
    CHECK(ubiquitous.at(0) == doctest::Approx(0.25 * std::log(10.0)));

    const auto single = tfidf_transform(SparseVector(3, {1}, {7.0}), vocab);
    CHECK(single.at(1) == doctest::Approx(std::log(10.0)));
    CHECK(tfidf_transform(SparseVector(3), vocab).empty());
}

TEST_CASE("vectorize is independent of the thread count") {
    std::vector<std::string> texts;
    for (int i = 0; i < 37; ++i) texts.push_back("alpha beta " + std::string(i % 3 ? "gamma" : "delta") + (i % 5 ? " eps" : ""));
    const auto docs = docs_from(texts);
    const auto vocab = build_vocabulary(docs, {}, {});
    const auto one = vectorize(docs, vocab, 1);
    CHECK(vectorize(docs, vocab, 4) == one);
    for (const auto& v : one)
        for (double x : v.values()) CHECK((x > 0.0 && std::isfinite(x)));
}

TEST_CASE("network scaling") {
    const double m = 3.0;
    const ScalingStats stats{m};
    const SparseVector v(3, {1, 2}, {m, m / 2});
    CHECK(scale_for_network(v, stats) == std::vector<double>{0.0, 1.0, 0.5});
    CHECK(scale_for_network(SparseVector(3), stats) == std::vector<double>{0.0, 0.0, 0.0});
    CHECK(scale_for_network(SparseVector(2, {0}, {2 * m}), stats) == std::vector<double>{1.0, 0.0});
    CHECK_THROWS_AS(scale_for_network(v, ScalingStats{0.0}), std::invalid_argument);

    CHECK(compute_scaling(std::vector<SparseVector>{v, SparseVector(3, {0}, {0.25})}).max_weight == m);

    const auto dense = scale_for_network(v, stats);
    const auto back = unscale_from_network(dense, stats);
    CHECK(scale_for_network(back, stats) == dense);
    CHECK(back == v);
}
