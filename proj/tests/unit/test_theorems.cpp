#include "oracles.hpp"

#include "sparselab/errors.hpp"
#include "sparselab/theorem_suite.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace sparselab;

namespace {

MatrixWeight two_cell(double a, double b) { return MatrixWeight(GridSpec(1, 1), 1, {a, b}); }

SparseCollection random_sparse(const GridSpec& g, std::uint64_t seed) {
    SparseParams p;
    p.kind = SparseKind::random;
    p.seed = seed;
    return gen_sparse(g, p);
}

MatrixWeight weight_of(const GridSpec& g, int n, WeightKind kind, std::uint64_t seed, double alpha = 0.6) {
    WeightParams p;
    p.kind = kind;
    p.seed = seed;
    p.alpha = alpha;
    return gen_weight(g, n, p);
}

} // namespace

TEST_CASE("report pass rule") {
    CHECK(make_report("x", 1.0, 1.0).pass);
    CHECK(make_report("x", 1.0 + 5e-7, 1.0).pass);
    CHECK_FALSE(make_report("x", 1.0 + 2e-6, 1.0).pass);
    CHECK_FALSE(make_report("x", std::nan(""), 1.0).pass);
    CHECK(make_report("x", 0.5, 2.0).margin == 1.5);
}

TEST_CASE("lower and upper bound examples") {
    const GridSpec g(1, 7);
    const auto s = random_sparse(g, 1);
    const auto id = weight_of(g, 2, WeightKind::constant, 1);
    const auto lo = check_lower_bound(s, id);
    CHECK(lo.lhs == doctest::Approx(1.0 / std::numbers::sqrt2));
    CHECK(lo.pass);
    const auto hi = check_upper_bound(s, id);
    CHECK(hi.rhs == doctest::Approx(64.0));
    CHECK(hi.pass);
    for (double alpha : {0.2, 0.4, 0.6, 0.8, 0.9}) {
        const auto w = weight_of(g, 1, WeightKind::power, 1, alpha);
        const NormReport norm = weighted_norm(sparse_operator(s, 1), w);
        CHECK(check_lower_bound(s, w, norm).pass);
        CHECK(check_scalar_lower_bound(s, w, norm).pass);
        CHECK(check_upper_bound(s, w, norm).pass);
    }
    CHECK_THROWS_AS(check_scalar_lower_bound(s, id, NormReport{}), InvalidInput);
}

TEST_CASE("batch: bracket holds on random instances") {
    int count = 0;
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const GridSpec g(1, 6 + static_cast<int>(seed % 3));
        const auto s = random_sparse(g, seed);
        for (int n : {1, 2, 4}) {
            WeightParams p;
            p.kind = WeightKind::random_logsym;
            p.seed = seed * 10 + n;
            p.spread = 0.5 + 0.25 * static_cast<double>(seed % 4);
            const auto w = gen_weight(g, n, p);
            const NormReport norm = weighted_norm(sparse_operator(s, n), w);
            CHECK(check_lower_bound(s, w, norm).pass);
            CHECK(check_upper_bound(s, w, norm).pass);
            ++count;
        }
    }
    CHECK(count == 36);
}

TEST_CASE("mixed bound constant and series") {
    CHECK(mixed_bound_constant(1) == doctest::Approx(2.0 * (16.0 + 8.0 * std::pow(2.0, 0.25) / std::log(2.0) * 4.0)));
    CHECK(mixed_bound_constant(1) >= 64.0);
    for (int d = 1; d <= 3; ++d) {
        for (double a2 : {1.0, 1.7, 5.0, 40.0}) {
            for (double ai : {1.0, 1.3, 2.5, 9.0}) {
                for (double ad : {1.0, 2.0, 6.0}) {
                    const double closed = mixed_bound_constant(d) * std::sqrt(a2 * ai * ad);
                    const double series = mixed_bound_series(a2, ai, ad, d);
                    CHECK(series <= closed);
                    CHECK(series > 0.5 * closed / 3.0);
                }
            }
        }
    }
    // Direct summation of sqrt(alpha) over |k| <= 20000 agrees with the series form.
    const double a2 = 2.0, ai = 1.4, ad = 1.1;
    const auto direct_side = [&](double a) {
        double sum = 0;
        for (int k = -20000; k <= 20000; ++k) sum += std::sqrt(cotlar_bound_case2(a2, a, k, 1));
        return sum;
    };
    const double direct = 2.0 * std::sqrt(direct_side(ai) * direct_side(ad));
    CHECK(mixed_bound_series(a2, ai, ad, 1) == doctest::Approx(direct).epsilon(1e-4));
}

TEST_CASE("mixed bound examples") {
    const GridSpec g(1, 8);
    const auto s = random_sparse(g, 2);
    const auto unit = weight_of(g, 1, WeightKind::constant, 1);
    const auto r = check_mixed_bound(s, unit);
    CHECK(r.rhs == doctest::Approx(mixed_bound_constant(1)));
    CHECK(r.pass);
    CHECK(r.notes.empty());
    for (double alpha : {0.3, 0.6, 0.9, -0.5}) CHECK(check_mixed_bound(s, weight_of(g, 1, WeightKind::power, 1, alpha)).pass);
    const auto matrix = check_mixed_bound(s, weight_of(g, 2, WeightKind::random_logsym, 4));
    CHECK(matrix.notes.find("informative") != std::string::npos);
}

TEST_CASE("reduction examples") {
    const GridSpec g(1, 6);
    const auto s = random_sparse(g, 3);
    const auto id = weight_of(g, 3, WeightKind::constant, 1);
    const auto r = check_reduction(id, s, 8, 1);
    CHECK(r.lhs == doctest::Approx(1.0));
    CHECK(r.rhs == doctest::Approx(1.0));
    CHECK(r.pass);
    const auto diag = weight_of(g, 3, WeightKind::diag, 1);
    const auto rd = check_reduction(diag, s, 0, 1);
    CHECK(rd.lhs == doctest::Approx(rd.rhs).epsilon(1e-12));
    for (std::uint64_t seed : {1u, 2u, 3u}) CHECK(check_reduction(weight_of(g, 4, WeightKind::random_logsym, seed), s, 64, seed).pass);
}

TEST_CASE("portion preserving examples") {
    const GridSpec g(1, 6);
    const auto unit = weight_of(g, 1, WeightKind::constant, 1);
    const auto root = CubeId::root(1);
    const auto empty = check_portion_preserving(unit, root, {}, 0.5);
    CHECK(empty.lhs == 0.0);
    CHECK(empty.pass);
    std::vector<std::uint64_t> half;
    for (std::uint64_t c = 0; c < 32; ++c) half.push_back(c);
    const auto r = check_portion_preserving(unit, root, half, 0.5);
    CHECK(r.lhs == doctest::Approx(32.0));
    CHECK(r.rhs == doctest::Approx(0.75 * 64.0));
    CHECK(r.pass);
    half.push_back(40);
    CHECK_THROWS_AS(check_portion_preserving(unit, root, half, 0.5), InvalidInput);
    const std::vector<std::uint64_t> outside{0};
    CHECK_THROWS_AS(check_portion_preserving(unit, cube_from_index(1, 1, {1, 0, 0}), outside, 0.5), InvalidInput);
    CHECK_THROWS_AS(check_portion_preserving(unit, root, {}, 1.0), InvalidInput);

    Rng rng(17);
    int trials = 0;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        WeightParams p;
        p.kind = WeightKind::random_logsym;
        p.seed = seed;
        p.spread = 1.5;
        const auto w = gen_weight(g, 1, p);
        for (int t = 0; t < 250; ++t) {
            const int level = static_cast<int>(rng.below(6));
            const CubeId q{1, level, rng.below(g.cubes_at_level(level))};
            const auto range = cell_range(g, q);
            const double delta = 0.05 + 0.9 * rng.uniform();
            const auto k = static_cast<std::uint64_t>(std::floor(delta * range.count));
            std::vector<std::uint64_t> cells;
            for (std::uint64_t i = 0; i < range.count; ++i) cells.push_back(range.first + i);
            for (std::uint64_t i = 0; i + 1 < cells.size(); ++i) std::swap(cells[i], cells[i + rng.below(cells.size() - i)]);
            cells.resize(k);
            CHECK(check_portion_preserving(w, q, cells, delta).pass);
            ++trials;
        }
    }
    CHECK(trials == 1000);
}

TEST_CASE("reverse Hoelder examples") {
    const auto flat = check_reverse_holder(weight_of(GridSpec(1, 5), 1, WeightKind::constant, 1));
    CHECK(flat.pass);
    CHECK(flat.lhs == doctest::Approx(std::exp2(-1.0 / (1.0 + 1.0 / 3.0))));
    // Two-cell weight {1, 4}: A_inf = 1.3, eps = 1/4.2.
    const auto w = two_cell(1, 4);
    const double eps = 1.0 / (4.0 * 1.3 - 1.0);
    const double lhs_root = std::pow((1.0 + std::pow(4.0, 1.0 + eps)) / 2.0, 1.0 / (1.0 + eps));
    const auto r = check_reverse_holder(w);
    CHECK(r.pass);
    CHECK(r.extras[1].second == doctest::Approx(eps));
    CHECK(r.lhs == doctest::Approx(std::max(lhs_root / (std::exp2(1.0 / (1.0 + eps)) * 2.5), std::exp2(-1.0 / (1.0 + eps)))));
    const GridSpec g(1, 9);
    for (double alpha : {0.2, 0.5, 0.8, 0.95, -0.3, -0.7, -0.9}) CHECK(check_reverse_holder(weight_of(g, 1, WeightKind::power, 1, alpha)).pass);
}

TEST_CASE("small portion examples") {
    const GridSpec g(1, 12);
    const auto unit = weight_of(g, 1, WeightKind::constant, 1);
    const auto r = check_small_portion_ainf(unit);
    const double eps = 1.0 / 3.0;
    CHECK(r.rhs == doctest::Approx(std::exp2(1.0 / (1.0 + eps) - 8.0 * eps / (1.0 + eps))).epsilon(1e-6));
    CHECK(r.rhs < 0.5);
    CHECK(r.pass);
    CHECK(r.extras[3].second > 0);
    const auto vac = check_small_portion_ainf(weight_of(GridSpec(1, 4), 1, WeightKind::constant, 1));
    CHECK(vac.pass);
    CHECK(vac.notes.find("vacuous") != std::string::npos);
    CHECK_THROWS_AS(check_small_portion_ainf(unit, -7.0), InvalidInput);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        WeightParams p;
        p.kind = WeightKind::random_logsym;
        p.seed = seed;
        p.spread = 0.1;
        const auto near_flat = gen_weight(g, 1, p);
        const auto rr = check_small_portion_ainf(near_flat);
        CHECK(rr.pass);
        CHECK(rr.extras[3].second > 0);
    }
}

TEST_CASE("A_inf against A_2") {
    CHECK(check_ainf_vs_a2(two_cell(1, 4)).pass);
    const GridSpec g(1, 8);
    for (double alpha : {0.3, 0.6, 0.9, -0.9}) CHECK(check_ainf_vs_a2(weight_of(g, 1, WeightKind::power, 1, alpha)).pass);
}

TEST_CASE("Cotlar check on a small instance") {
    const GridSpec g(1, 7);
    const auto s = random_sparse(g, 5);
    const auto dec = decompose(s);
    const auto w = weight_of(g, 1, WeightKind::power, 1, 0.8);
    const auto summary = summarize_weight(w, s);
    const auto r = check_cotlar(s, dec, w, summary, weighted_norm(sparse_operator(s, 1), w));
    CHECK(r.pass);
    CHECK(r.notes.empty());
}

TEST_CASE("slope fit") {
    const std::vector<double> x{0, 1, 2, 3};
    const std::vector<double> y{1, 3, 5, 7};
    const auto [slope, degenerate] = fit_slope(x, y);
    CHECK(slope == doctest::Approx(2.0));
    CHECK_FALSE(degenerate);
    const std::vector<double> flat{1, 1, 1, 1};
    CHECK(fit_slope(flat, y).second);
}

TEST_CASE("sharpness sweeps") {
    const std::vector<double> alphas{0.5, 0.7, 0.8, 0.9, 0.95};
    const auto constant = sharpness_sweep(SweepFamily::constant, 8, alphas);
    CHECK(constant.degenerate);
    CHECK(constant.in_corridor);
    // A one-cube chain is a single averaging operator: norm = [w]^{1/2} exactly.
    const auto single = sharpness_sweep(SweepFamily::power_chain, 10, alphas, {}, 0);
    CHECK(single.exponent == doctest::Approx(0.5).epsilon(1e-6));
    for (int len : {2, 5, -1}) {
        const auto fit = sharpness_sweep(SweepFamily::power_chain, 10, alphas, {}, len);
        CHECK_FALSE(fit.degenerate);
        CHECK(fit.in_corridor);
        for (const auto& pt : fit.points) CHECK(std::sqrt(pt.a2_sparse) <= pt.norm * (1 + kCheckTol));
    }
    const auto rot = sharpness_sweep(SweepFamily::rotating_maximal, 8, alphas);
    CHECK(rot.in_corridor);
    CHECK_THROWS_AS(sharpness_sweep(SweepFamily::constant, 8, std::vector<double>{0.1, 0.2}), InvalidInput);
    CHECK(parse_sweep_family(to_string(SweepFamily::rotating_maximal)) == SweepFamily::rotating_maximal);
}
