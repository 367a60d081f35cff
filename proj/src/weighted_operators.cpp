#include "sparselab/weighted_operators.hpp"

#include "sparselab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace sparselab {

CubeMask make_mask(const GridSpec& grid, std::span<const CubeId> cubes) {
    CubeMask mask(grid.depth() + 1);
    for (const auto& q : cubes) {
        grid.validate(q);
        auto& level = mask[q.level];
        if (level.empty()) level.assign(grid.cubes_at_level(q.level), 0);
        level[q.code] = 1;
    }
    return mask;
}

namespace {

void tree_pass(const GridSpec& g, int n, const CubeMask& mask, const Vec& in, Vec& out) {
    const int depth = g.depth();
    int lo = -1;
    int hi = -1;
    for (int l = 0; l <= depth; ++l) {
        if (mask[l].empty()) continue;
        if (lo < 0) lo = l;
        hi = l;
    }
    if (lo < 0) {
        out.setZero();
        return;
    }
    const int d = g.dim();
    const std::uint64_t fan = std::uint64_t{1} << d;

    // Bottom-up sums for levels lo..hi (level L reads `in` directly).
    std::vector<Vec> sums(depth + 1);
    const Vec* below = &in;
    for (int l = depth - 1; l >= lo; --l) {
        const std::uint64_t count = g.cubes_at_level(l);
        Vec cur(count * n);
        const double* src = below->data();
        double* dst = cur.data();
        for (std::uint64_t q = 0; q < count; ++q) {
            for (int k = 0; k < n; ++k) dst[q * n + k] = 0.0;
            for (std::uint64_t j = 0; j < fan; ++j) {
                const double* child = src + (q * fan + j) * n;
                for (int k = 0; k < n; ++k) dst[q * n + k] += child[k];
            }
        }
        sums[l] = std::move(cur);
        below = &sums[l];
    }
    const auto level_sums = [&](int l) -> const Vec& { return l == depth ? in : sums[l]; };

    // Top-down accumulation of selected averages down to level hi.
    Vec acc;
    for (int l = lo; l <= hi; ++l) {
        const std::uint64_t count = g.cubes_at_level(l);
        const double inv_cells = 1.0 / static_cast<double>(g.cells_per_cube(l));
        Vec next(count * n);
        const double* s = level_sums(l).data();
        const auto& m = mask[l];
        for (std::uint64_t q = 0; q < count; ++q) {
            for (int k = 0; k < n; ++k) {
                double v = l == lo ? 0.0 : acc(((q >> d) * n) + k);
                if (!m.empty() && m[q]) v += s[q * n + k] * inv_cells;
                next(q * n + k) = v;
            }
        }
        acc = std::move(next);
    }
    // Broadcast from level hi to the cells.
    const int shift = (depth - hi) * d;
    const std::uint64_t cells = g.cell_count();
    for (std::uint64_t c = 0; c < cells; ++c) {
        const std::uint64_t q = c >> shift;
        for (int k = 0; k < n; ++k) out(c * n + k) = acc(q * n + k);
    }
}

} // namespace

LinearOp averaging_sum_op(const GridSpec& grid, int n, std::span<const CubeId> cubes) {
    if (n < 1) throw InvalidInput("component count must be >= 1");
    auto mask = std::make_shared<const CubeMask>(make_mask(grid, cubes));
    auto kernel = [grid, n, mask](const Vec& in, Vec& out) { tree_pass(grid, n, *mask, in, out); };
    return {grid, n, kernel, kernel};
}

LinearOp sparse_operator(const SparseCollection& s, int n) {
    return averaging_sum_op(s.grid(), n, s.cubes());
}

PiecewiseFn apply_sparse(const SparseCollection& s, const PiecewiseFn& f) {
    if (!(f.grid() == s.grid())) throw InvalidInput("grid mismatch between sparse collection and function");
    return sparse_operator(s, f.n()).apply(f);
}

LinearOp averaging_operator(const GridSpec& grid, int n, const CubeId& q) {
    const CubeId one[] = {q};
    return averaging_sum_op(grid, n, one);
}

LinearOp truncation(const SparseCollection& s, const Decomposition& dec, int k, int n) {
    if (k < 0) throw InvalidInput("truncation index must be >= 0");
    return averaging_sum_op(s.grid(), n, dec.family(static_cast<std::size_t>(k)));
}

NormReport weighted_norm(const LinearOp& t, const MatrixWeight& w, const NormOptions& opts) {
    if (!(t.grid() == w.grid()) || t.n() != w.n()) throw InvalidInput("operator and weight live on different spaces");
    const LinearOp conj =
        compose(weight_multiplier(w, WeightPower::sqrt), compose(t, weight_multiplier(w, WeightPower::inv_sqrt)));
    return spectral_norm(conj, opts);
}

AveragingNorm averaging_norm(const MatrixWeight& w, const CubeId& q, const NormOptions& opts) {
    AveragingNorm out;
    out.exact = std::sqrt(product_norm_sq(w.average(q), w.average_inv(q), w.eig_floor()));
    const NormReport r = weighted_norm(averaging_operator(w.grid(), w.n(), q), w, opts);
    out.operational = r.norm;
    out.residual = r.residual;
    return out;
}

LinearOp adjoint_in_weight(const LinearOp& t, const MatrixWeight& w) {
    if (!(t.grid() == w.grid()) || t.n() != w.n()) throw InvalidInput("operator and weight live on different spaces");
    return compose(weight_multiplier(w, WeightPower::inverse),
                   compose(t.transpose(), weight_multiplier(w, WeightPower::one)));
}

WeightSummary summarize_weight(const MatrixWeight& w, const SparseCollection& s, int directions,
                               std::uint64_t seed) {
    WeightSummary out;
    out.a2_sparse = a2_constant(w, s.cubes()).value;
    out.a2_full = a2_constant(w).value;
    if (w.n() == 1) {
        out.ainf = scalar_ainf_constant(w);
        out.ainf_dual = scalar_ainf_constant(inverse_weight(w));
        out.ainf_exact = true;
    } else {
        const int dirs = std::max(directions, w.n());
        out.ainf = vector_ainf_estimate(w, dirs, seed).value;
        out.ainf_dual = vector_ainf_estimate(inverse_weight(w), dirs, seed).value;
        out.ainf_exact = false;
    }
    return out;
}

double cotlar_bound_case1(double a2_sparse, int gap) {
    return std::pow(1.0 - 1.0 / (4.0 * a2_sparse), std::abs(gap) / 2.0) * a2_sparse;
}

double cotlar_bound_case2(double a2_full, double ainf, int gap, int dim) {
    const int k = std::abs(gap);
    const double threshold = std::ldexp(ainf, dim + 2);
    if (k < threshold) return a2_full;
    const double eps = 1.0 / (std::ldexp(ainf, dim + 1) - 1.0);
    const double eta = std::exp2((1.0 - k * eps) / (1.0 + eps));
    return std::sqrt(eta) * a2_full;
}

CotlarTerms cotlar_terms(const SparseCollection& s, const Decomposition& dec, const MatrixWeight& w,
                         const WeightSummary& summary, int m, int n, const NormOptions& opts) {
    if (m < 0 || n < 0) throw InvalidInput("family indices must be >= 0");
    const int nc = w.n();
    const LinearOp tn = truncation(s, dec, n, nc);
    const LinearOp tm = truncation(s, dec, m, nc);
    CotlarTerms out;
    const NormReport first = weighted_norm(compose(adjoint_in_weight(tn, w), tm), w, opts);
    const NormReport second = weighted_norm(compose(tn, adjoint_in_weight(tm, w)), w, opts);
    out.norm_star_first = first.norm;
    out.norm_star_second = second.norm;
    out.residual = std::max(first.residual, second.residual);
    const int gap = n - m;
    const int d = s.grid().dim();
    out.bound_case1 = cotlar_bound_case1(summary.a2_sparse, gap);
    out.bound_case2_alpha = cotlar_bound_case2(summary.a2_full, summary.ainf, gap, d);
    out.bound_case2_beta = cotlar_bound_case2(summary.a2_full, summary.ainf_dual, gap, d);
    out.case2_exact = summary.ainf_exact;
    return out;
}

CotlarTable cotlar_table(const SparseCollection& s, const Decomposition& dec, const MatrixWeight& w,
                         const WeightSummary& summary, const NormOptions& opts) {
    const int families = static_cast<int>(dec.family_count());
    CotlarTable table;
    table.case2_exact = summary.ainf_exact;
    const int d = s.grid().dim();
    for (int k = 0; k < families; ++k) {
        CotlarRow row;
        row.gap = k;
        row.bound_case1 = cotlar_bound_case1(summary.a2_sparse, k);
        row.alpha = cotlar_bound_case2(summary.a2_full, summary.ainf, k, d);
        row.beta = cotlar_bound_case2(summary.a2_full, summary.ainf_dual, k, d);
        table.rows.push_back(row);
    }
    for (int m = 0; m < families; ++m) {
        for (int n = m; n < families; ++n) {
            const CotlarTerms t = cotlar_terms(s, dec, w, summary, m, n, opts);
            CotlarRow& row = table.rows[n - m];
            row.norm_star_first = std::max(row.norm_star_first, t.norm_star_first);
            row.norm_star_second = std::max(row.norm_star_second, t.norm_star_second);
            table.max_residual = std::max(table.max_residual, t.residual);
        }
    }
    return table;
}

double cotlar_stein_bound(std::span<const double> alpha, std::span<const double> beta) {
    if (alpha.empty() || beta.empty()) throw InvalidInput("Cotlar-Stein tables must be nonempty");
    const auto two_sided = [](std::span<const double> t) {
        double sum = std::sqrt(std::max(t[0], 0.0));
        for (std::size_t k = 1; k < t.size(); ++k) sum += 2.0 * std::sqrt(std::max(t[k], 0.0));
        return sum;
    };
    return 2.0 * std::sqrt(two_sided(alpha) * two_sided(beta));
}

} // namespace sparselab
