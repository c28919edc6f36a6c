#include <doctest.h>

#include <map>

#include "semhash/corpus.hpp"
#include "test_util.hpp"

using namespace semhash;

TEST_CASE("directory corpus: classes and files in sorted order") {
    const auto corpus = load_corpus(std::filesystem::path(SEMHASH_TEST_DATA) / "newsgroups_mini");
    REQUIRE(corpus.docs.size() == 40);
    CHECK(corpus.label_names ==
          std::vector<std::string>{"comp.graphics", "rec.autos", "sci.space", "talk.politics.guns"});
    for (std::size_t k = 0; k < corpus.docs.size(); ++k) {
        CHECK(corpus.docs[k].id == static_cast<std::int64_t>(k));
        CHECK(corpus.docs[k].label == static_cast<std::int32_t>(k / 10));
        CHECK_FALSE(corpus.docs[k].text.empty());
    }
}

TEST_CASE("jsonl corpus with named labels") {
    TempDir dir;
    write_text(dir / "c.jsonl",
               "{\"id\": 7, \"label\": \"space\", \"text\": \"orbit\"}\n"
               "\n"
               "{\"id\": 3, \"label\": \"autos\", \"text\": \"engine\"}\n"
               "{\"id\": 5, \"label\": \"space\", \"text\": \"moon\"}\n");
    const auto corpus = load_corpus(dir / "c.jsonl");
    CHECK(corpus.label_names == std::vector<std::string>{"autos", "space"});
    REQUIRE(corpus.docs.size() == 3);
    CHECK(corpus.docs[0].id == 3);
    CHECK(corpus.docs[0].label == 0);
    CHECK(corpus.docs[1].id == 5);
    CHECK(corpus.docs[1].label == 1);
    CHECK(corpus.docs[2].text == "orbit");
}

TEST_CASE("jsonl corpus errors") {
    TempDir dir;
    write_text(dir / "dup.jsonl", "{\"id\":1,\"label\":0,\"text\":\"a\"}\n{\"id\":1,\"label\":0,\"text\":\"b\"}\n");
    CHECK_THROWS_AS(load_corpus(dir / "dup.jsonl"), std::runtime_error);
    write_text(dir / "bad.jsonl", "{\"id\":1,\"label\":0,\"text\":\"a\"}\nnot json\n");
    CHECK_THROWS_WITH_AS(load_corpus(dir / "bad.jsonl"), doctest::Contains("bad.jsonl:2"), std::runtime_error);
    write_text(dir / "mixed.jsonl", "{\"id\":1,\"label\":0,\"text\":\"a\"}\n{\"id\":2,\"label\":\"x\",\"text\":\"b\"}\n");
    CHECK_THROWS_AS(load_corpus(dir / "mixed.jsonl"), std::runtime_error);
    CHECK_THROWS_AS(load_corpus(dir / "missing"), std::runtime_error);
}

TEST_CASE("stratified split is seeded and per-class") {
    std::vector<Document> docs;
    for (int i = 0; i < 100; ++i) docs.push_back({i, "x", i % 4});
    const auto a = split_corpus(docs, 0.2, 9);
    const auto b = split_corpus(docs, 0.2, 9);
    const auto c = split_corpus(docs, 0.2, 10);
    CHECK(a.test.size() == 20);
    CHECK(a.train.size() == 80);
    std::map<int, int> per_class;
    for (const auto& d : a.test) ++per_class[d.label];
    for (int l = 0; l < 4; ++l) CHECK(per_class[l] == 5);
    auto ids = [](const std::vector<Document>& v) {
        std::vector<std::int64_t> out;
        for (const auto& d : v) out.push_back(d.id);
        return out;
    };
    CHECK(ids(a.test) == ids(b.test));
    CHECK(ids(a.test) != ids(c.test));
    CHECK(std::is_sorted(a.train.begin(), a.train.end(), [](auto& x, auto& y) { return x.id < y.id; }));
    CHECK(split_corpus(docs, 0.0, 1).test.empty());
    CHECK_THROWS_AS(split_corpus(docs, 1.0, 1), std::invalid_argument);
}
