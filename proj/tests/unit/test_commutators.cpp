#include "oracles.hpp"

#include "sparselab/commutators.hpp"
#include "sparselab/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace sparselab;

namespace {

SparseCollection random_sparse(const GridSpec& g, std::uint64_t seed) {
    SparseParams p;
    p.kind = SparseKind::random;
    p.seed = seed;
    return gen_sparse(g, p);
}

SymbolFn symbol(const GridSpec& g, int n, SymbolKind kind, std::uint64_t seed, double scale = 1.0) {
    SymbolParams p;
    p.kind = kind;
    p.seed = seed;
    p.scale = scale;
    return gen_symbol(g, n, p);
}

Mat dense_multiplier(const SymbolFn& b) {
    const int n = b.n();
    const auto N = static_cast<Eigen::Index>(b.grid().cell_count());
    Mat m = Mat::Zero(N * n, N * n);
    for (Eigen::Index c = 0; c < N; ++c) m.block(c * n, c * n, n, n) = b.cell(c);
    return m;
}

} // namespace

TEST_CASE("sbmo examples") {
    const GridSpec g(1, 5);
    const auto s = random_sparse(g, 1);
    CHECK(sbmo_norm(symbol(g, 2, SymbolKind::constant, 3), s) == doctest::Approx(0.0).epsilon(1e-12));
    const SymbolFn hand(GridSpec(1, 1), 1, {0.0, 1.0});
    const SparseCollection root(GridSpec(1, 1), {CubeId::root(1)});
    CHECK(sbmo_norm(hand, root) == doctest::Approx(0.5));
    for (int n : {1, 2, 3}) {
        const auto b = symbol(g, n, SymbolKind::random, 10 + n);
        const double closed = sbmo_norm(b, s);
        double prev = 0;
        for (int dirs : {4, 64, 2048}) {
            const double sampled = oracle::sampled_sbmo(g, n, b.values(), s.cubes(), dirs, 5);
            CHECK(sampled <= closed * (1 + 1e-12));
            CHECK(sampled >= prev);
            prev = sampled;
        }
        CHECK(prev >= closed * (n == 1 ? 1 - 1e-12 : 0.97));
    }
}

TEST_CASE("sbmo invariances") {
    const GridSpec g(1, 6);
    const auto s = random_sparse(g, 2);
    for (int n : {1, 2, 4}) {
        const auto b = symbol(g, n, SymbolKind::random, n);
        const double base = sbmo_norm(b, s);
        Rng rng(n);
        Mat c(n, n);
        for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = 3.0 * rng.normal();
        CHECK(sbmo_norm(b.shifted(c), s) == doctest::Approx(base).epsilon(1e-10));
        CHECK(sbmo_norm(b.scaled(-2.5), s) == doctest::Approx(2.5 * base).epsilon(1e-12));
    }
}

TEST_CASE("block weight examples") {
    const GridSpec g(1, 4);
    const auto zero = build_block_weight(symbol(g, 2, SymbolKind::zero, 1));
    for (std::uint64_t c = 0; c < g.cell_count(); ++c) CHECK((Mat(zero.cell(c)) - Mat::Identity(4, 4)).norm() == 0.0);
    for (double b : {-5.0, -1.0, 0.0, 0.3, 2.0, 10.0}) {
        // Characteristic polynomial t^2 - (2 + b^2) t + 1: both roots positive.
        const double tr = 2.0 + b * b;
        const double lo = 0.5 * (tr - std::sqrt(tr * tr - 4.0));
        CHECK(lo > 0.0);
        const SymbolFn cst(GridSpec(1, 1), 1, {b, b});
        const auto w = build_block_weight(cst);
        CHECK(lambda_min_sym(Mat(w.cell(0))) == doctest::Approx(lo).epsilon(1e-9));
    }
    for (int n : {1, 2, 4}) CHECK(block_inverse_residual(symbol(g, n, SymbolKind::random, n, 2.0)) <= 1e-12 * 64);
    CHECK(block_inverse_residual(symbol(g, 3, SymbolKind::random, 7, 0.5)) <= 1e-12);
}

TEST_CASE("A2 identity") {
    const GridSpec g(1, 6);
    const auto s = random_sparse(g, 3);
    const auto zero = verify_a2_identity(symbol(g, 2, SymbolKind::zero, 1), s);
    CHECK(zero.lhs == doctest::Approx(1.0));
    CHECK(zero.pass);
    const SymbolFn hand(GridSpec(1, 1), 1, {0.0, 1.0});
    const auto h = verify_a2_identity(hand, SparseCollection(GridSpec(1, 1), {CubeId::root(1)}));
    CHECK(h.lhs == doctest::Approx(1.25));
    CHECK(h.rhs == doctest::Approx(1.25));
    CHECK(h.pass);
    int count = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const int n = seed % 3 == 0 ? 1 : (seed % 3 == 1 ? 2 : 4);
        const auto b = symbol(GridSpec(1, 4), n, seed % 2 ? SymbolKind::random : SymbolKind::step, seed);
        const auto ss = random_sparse(GridSpec(1, 4), seed);
        const auto r = verify_a2_identity(b, ss);
        CHECK(r.pass);
        ++count;
    }
    CHECK(count == 100);
}

TEST_CASE("commutator examples") {
    const GridSpec g(1, 6);
    const auto s = random_sparse(g, 4);
    const auto cst = symbol(g, 2, SymbolKind::constant, 2);
    const PiecewiseFn f(g, 2, Vec::LinSpaced(128, -1.0, 2.0));
    CHECK(commutator_apply(s, cst, f).data().norm() <= 1e-12 * f.data().norm());
    CHECK(commutator_norm(s, cst).norm <= 1e-10);

    const GridSpec g1(1, 1);
    const SymbolFn hand(g1, 1, {0.0, 1.0});
    const SparseCollection root(g1, {CubeId::root(1)});
    Vec right(2);
    right << 0.0, 1.0;
    const auto out = commutator_apply(root, hand, PiecewiseFn(g1, 1, right));
    CHECK(out.data()(0) == doctest::Approx(0.5));
    CHECK(out.data()(1) == doctest::Approx(0.0));

    const auto b = symbol(g, 2, SymbolKind::random, 6);
    const double base = commutator_norm(s, b).norm;
    for (double t : {0.5, 3.0}) CHECK(commutator_norm(s, b.scaled(t)).norm == doctest::Approx(t * base).epsilon(1e-8));
    Mat c = Mat::Identity(2, 2) * 4.0;
    c(0, 1) = -2.0;
    const auto shifted = b.shifted(c);
    CHECK((commutator_apply(s, shifted, f).data() - commutator_apply(s, b, f).data()).norm() <=
          1e-12 * commutator_apply(s, b, f).data().norm() + 1e-12);
    CHECK_THROWS_AS(commutator_apply(s, b, PiecewiseFn(g, 3)), InvalidInput);
}

TEST_CASE("matrix-free commutator matches dense assembly") {
    for (int n : {1, 2, 4}) {
        const GridSpec g(1, n == 4 ? 5 : 6);
        const auto s = random_sparse(g, n);
        const auto b = symbol(g, n, SymbolKind::random, 3 * n);
        const Mat t = oracle::dense_averaging_sum(g, n, s.cubes());
        const Mat m = dense_multiplier(b);
        const Mat expect = t * m - m * t;
        const Mat got = commutator_op(s, b).to_dense();
        CHECK((got - expect).norm() <= 1e-10 * expect.norm());
        CHECK((commutator_op(s, b).transpose().to_dense() - expect.transpose()).norm() <= 1e-10 * expect.norm());
        CHECK(commutator_norm(s, b).norm == doctest::Approx(oracle::dense_norm(expect)).epsilon(1e-7));
    }
}

TEST_CASE("block conjugation") {
    const GridSpec g(1, 5);
    const auto s = random_sparse(g, 6);
    const auto zero = verify_block_conjugation(s, symbol(g, 2, SymbolKind::zero, 1));
    CHECK(zero.pass);
    const double plain = spectral_norm(sparse_operator(s, 2)).norm;
    CHECK(zero.extras[0].second == doctest::Approx(plain).epsilon(1e-8));
    for (int n : {1, 2}) {
        for (auto kind : {SymbolKind::random, SymbolKind::step}) {
            const auto b = symbol(g, n, kind, 9 + n);
            const auto r = verify_block_conjugation(s, b);
            CHECK(r.pass);
            CHECK(r.lhs <= 1e-10);
            CHECK(r.extras[2].second <= 1e-6);
            // The spec-sign block [[T, +C], [0, T]] has the same norm (unitary diag(I, -I)).
            CHECK(spectral_norm(block_commutator_op(s, b, 1.0)).norm == doctest::Approx(r.extras[1].second).epsilon(1e-8));
        }
    }
}

TEST_CASE("two-sided commutator chain") {
    const GridSpec g(1, 6);
    const auto s = random_sparse(g, 7);
    const auto z = two_sided_commutator_bounds(s, symbol(g, 2, SymbolKind::zero, 1));
    CHECK(z.pass);
    CHECK(z.extras[0].second == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(z.extras[3].second == doctest::Approx(64.0));
    for (int n : {1, 2, 4})
        for (std::uint64_t seed : {1u, 2u})
            CHECK(two_sided_commutator_bounds(s, symbol(g, n, seed == 1 ? SymbolKind::random : SymbolKind::step, seed)).pass);
}

TEST_CASE("symbol generation") {
    const GridSpec g(1, 5);
    CHECK(symbol(g, 2, SymbolKind::random, 4).values() == symbol(g, 2, SymbolKind::random, 4).values());
    const auto st = symbol(g, 1, SymbolKind::step, 2);
    for (std::uint64_t c = 0; c < 32; ++c) CHECK(st.cell(c)(0, 0) == st.cell(c - c % 8)(0, 0));
    SymbolParams bad;
    bad.kind = SymbolKind::step;
    bad.step_level = 9;
    CHECK_THROWS_AS(gen_symbol(g, 1, bad), InvalidInput);
    CHECK_THROWS_AS(SymbolFn(g, 1, {1.0}), InvalidInput);
    CHECK(parse_symbol_kind("step") == SymbolKind::step);
    CHECK_THROWS_AS(parse_symbol_kind("smooth"), InvalidInput);
}
