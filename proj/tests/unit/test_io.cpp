#include "oracles.hpp"

#include "sparselab/errors.hpp"
#include "sparselab/io.hpp"

#include <doctest.h>

#include <string>

using namespace sparselab;

namespace {

std::string message_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const InvalidInput& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("sparse collection round trip") {
    for (int dim = 1; dim <= 3; ++dim) {
        const GridSpec g(dim, dim == 1 ? 7 : 3);
        SparseParams p;
        p.kind = SparseKind::random;
        p.seed = 4;
        const auto s = gen_sparse(g, p);
        const auto t = sparse_from_json(sparse_to_json(s));
        CHECK(t.grid() == s.grid());
        CHECK(t.cubes() == s.cubes());
        CHECK(sparse_to_json(t) == sparse_to_json(s));
    }
}

TEST_CASE("weight and symbol round trip") {
    const GridSpec g(1, 5, 3);
    WeightParams wp;
    wp.kind = WeightKind::random_logsym;
    wp.seed = 9;
    const auto w = gen_weight(g, 3, wp);
    const auto w2 = weight_from_json(weight_to_json(w));
    CHECK(w2.n() == 3);
    CHECK(w2.values() == w.values());
    CHECK(weight_to_json(w2) == weight_to_json(w));

    SymbolParams bp;
    bp.seed = 3;
    const auto b = gen_symbol(g, 3, bp);
    const auto b2 = symbol_from_json(symbol_to_json(b));
    CHECK(b2.values() == b.values());
    CHECK(symbol_to_json(b).find("\"psd\":false") != std::string::npos);
}

TEST_CASE("weight files are row-major per cell") {
    const std::string text = R"({"format": "matrix-weight", "grid": {"dim": 1, "depth": 1}, "n": 2,
        "values": [[2, 1, 1, 3], [1, 0, 0, 1]]})";
    const auto w = weight_from_json(text);
    CHECK(w.cell(0)(0, 1) == 1.0);
    CHECK(w.cell(0)(1, 1) == 3.0);

    const std::string sym = R"({"format": "matrix-symbol", "grid": {"dim": 1, "depth": 1}, "n": 2,
        "values": [[0, 5, 0, 0], [0, 0, 0, 0]]})";
    const auto b = symbol_from_json(sym);
    CHECK(b.cell(0)(0, 1) == 5.0);
    CHECK(b.cell(0)(1, 0) == 0.0);
}

TEST_CASE("malformed files name the field") {
    CHECK(message_of([] { (void)weight_from_json("{"); }).find("malformed JSON") != std::string::npos);
    CHECK(message_of([] { (void)weight_from_json(R"({"format": "matrix-weight"})"); }).find("missing field") !=
          std::string::npos);
    CHECK(message_of([] {
              (void)weight_from_json(R"({"format": "matrix-weight", "grid": {"dim": 1, "depth": 1}, "n": "two"})");
          }).find("'n'") != std::string::npos);
    CHECK(message_of([] {
              (void)weight_from_json(
                  R"({"format": "matrix-weight", "grid": {"dim": 1, "depth": 1}, "n": 1, "values": [[1]]})");
          }).find("'values'") != std::string::npos);
    CHECK(message_of([] {
              (void)weight_from_json(
                  R"({"format": "matrix-weight", "grid": {"dim": 1, "depth": 1}, "n": 1, "values": [[1], [-1]]})");
          }).find("'values'") != std::string::npos);
    CHECK(message_of([] { (void)weight_from_json(R"({"format": "sparse-collection"})"); }).find("'format'") !=
          std::string::npos);
    CHECK(message_of([] {
              (void)sparse_from_json(R"({"format": "sparse-collection", "grid": {"dim": 1, "depth": 2},
                                        "cubes": ["3:0"]})");
          }) != "");
    CHECK(message_of([] { (void)read_text_file("/nonexistent/file.json"); }).find("/nonexistent/file.json") !=
          std::string::npos);
}

TEST_CASE("non-sparse collections load and fail verification") {
    const auto s = sparse_from_json(
        R"({"format": "sparse-collection", "grid": {"dim": 1, "depth": 3}, "cubes": ["0:0", "1:0", "1:1"]})");
    CHECK_FALSE(verify_sparse(s).ok);
}

TEST_CASE("decomposition and norm JSON") {
    const GridSpec g(1, 4);
    SparseParams p;
    p.kind = SparseKind::chain;
    const auto s = gen_sparse(g, p);
    const auto dec = decompose(s);
    const auto text = decomposition_to_json(dec);
    CHECK(text.find("\"0\"") < text.find("\"1\""));
    CHECK(text.find("\"4\"") != std::string::npos);

    NormReport r{2.5, 1e-12, 7, "lanczos"};
    const auto nt = norm_report_to_json(r);
    CHECK(nt.find("\"norm\": 2.5") != std::string::npos);
    CHECK(nt.find("lanczos") != std::string::npos);
}

TEST_CASE("fnv1a digest") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a_hex("abc") != fnv1a_hex("abd"));
}
