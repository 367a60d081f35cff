#include "sparselab/corpus.hpp"
#include "sparselab/errors.hpp"
#include "sparselab/io.hpp"

#include <doctest.h>

#include <set>

using namespace sparselab;

TEST_CASE("builtin corpus equals the committed file") {
    CHECK(standard_corpus_json() == read_text_file(SPARSELAB_SOURCE_DIR "/corpus/standard.json"));
}

TEST_CASE("standard corpus expansion") {
    const auto c = standard_corpus();
    CHECK(c.instances.size() == 390);
    CHECK(c.symbols.size() == 24);
    std::set<std::string> digests;
    for (const auto& spec : c.instances) {
        digests.insert(describe(spec));
        CHECK_FALSE((spec.weight.kind == WeightKind::rotating2d && spec.n % 2 == 1));
    }
    CHECK(digests.size() == c.instances.size());
    std::set<int> ns;
    for (const auto& spec : c.instances) ns.insert(spec.n);
    CHECK(ns == std::set<int>{1, 2, 4});
}

TEST_CASE("corpus specs are validated") {
    CHECK_THROWS_AS(corpus_from_json("[]"), InvalidInput);
    CHECK_THROWS_AS(corpus_from_json(R"({"format": "corpus-spec", "bogus": 1})"), InvalidInput);
    CHECK_THROWS_AS(corpus_from_json(R"({"format": "corpus-spec"})"), InvalidInput);
    const auto small = corpus_from_json(R"({"format": "corpus-spec", "instances": {
        "grids": [{"dim": 1, "depth": 4}], "sparse": [{"kind": "chain"}],
        "weights": [{"kind": "constant"}, {"kind": "rotating2d"}], "n": [1, 2]}})");
    CHECK(small.instances.size() == 3);
    CHECK_THROWS_AS(sparse_params_from_json(R"({"kind": "chain", "colour": 2})"), InvalidInput);
    CHECK_THROWS_AS(weight_params_from_json(R"({"kind": "nope"})"), InvalidInput);
    CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.json"), InvalidInput);
    const auto p = weight_params_from_json(R"({"kind": "power", "alpha": 0.25, "center": [0.5]})");
    CHECK(p.kind == WeightKind::power);
    CHECK(p.alpha == 0.25);
    CHECK(p.center[2] == 0.5);
}

TEST_CASE("describe is a reproduction digest") {
    const auto c = standard_corpus();
    const auto& spec = c.instances.front();
    const auto text = describe(spec);
    CHECK(text.find("d=1") == 0);
    CHECK(text.find("sparse=") != std::string::npos);
    CHECK(text.find("weight=") != std::string::npos);
    const auto s1 = build_sparse(spec);
    const auto s2 = build_sparse(spec);
    CHECK(s1.cubes() == s2.cubes());
}
