#include "sparselab/linear_op.hpp"

#include "sparselab/errors.hpp"

#include <cmath>

namespace sparselab {

PiecewiseFn::PiecewiseFn(GridSpec grid, int n, Vec data) : grid_(grid), n_(n), data_(std::move(data)) {
    if (static_cast<std::uint64_t>(data_.size()) != grid_.cell_count() * static_cast<std::uint64_t>(n_))
        throw InvalidInput("step function data has the wrong size");
}

PiecewiseFn PiecewiseFn::constant(GridSpec grid, const Vec& v) {
    PiecewiseFn f(grid, static_cast<int>(v.size()));
    for (std::uint64_t i = 0; i < grid.cell_count(); ++i) f.cell(i) = v;
    return f;
}

double l2w_inner(const PiecewiseFn& f, const PiecewiseFn& g, const MatrixWeight& w) {
    if (!(f.grid() == w.grid()) || !(g.grid() == w.grid()) || f.n() != w.n() || g.n() != w.n())
        throw InvalidInput("grid or dimension mismatch in weighted inner product");
    double sum = 0.0;
    for (std::uint64_t i = 0; i < w.grid().cell_count(); ++i) sum += g.cell(i).dot(w.cell(i) * f.cell(i));
    return sum / static_cast<double>(w.grid().cell_count());
}

double l2w_norm(const PiecewiseFn& f, const MatrixWeight& w) { return std::sqrt(l2w_inner(f, f, w)); }

Vec LinearOp::apply(const Vec& x) const {
    if (static_cast<std::size_t>(x.size()) != dim()) throw InvalidInput("operator input has the wrong size");
    Vec out(dim());
    apply_(x, out);
    return out;
}

Vec LinearOp::apply_transpose(const Vec& x) const {
    if (static_cast<std::size_t>(x.size()) != dim()) throw InvalidInput("operator input has the wrong size");
    Vec out(dim());
    transpose_(x, out);
    return out;
}

PiecewiseFn LinearOp::apply(const PiecewiseFn& f) const {
    if (!(f.grid() == grid_) || f.n() != n_) throw InvalidInput("grid mismatch between operator and function");
    return {grid_, n_, apply(f.data())};
}

Mat LinearOp::to_dense() const {
    const std::size_t m = dim();
    Mat out(m, m);
    Vec e = Vec::Zero(m);
    Vec col(m);
    for (std::size_t j = 0; j < m; ++j) {
        e(j) = 1.0;
        apply_(e, col);
        out.col(j) = col;
        e(j) = 0.0;
    }
    return out;
}

LinearOp identity_op(GridSpec grid, int n) {
    auto copy = [](const Vec& in, Vec& out) { out = in; };
    return {grid, n, copy, copy};
}

LinearOp compose(const LinearOp& a, const LinearOp& b) {
    if (!(a.grid() == b.grid()) || a.n() != b.n()) throw InvalidInput("cannot compose operators on different spaces");
    auto fwd = [a, b](const Vec& in, Vec& out) { out = a.apply(b.apply(in)); };
    auto bwd = [a, b](const Vec& in, Vec& out) { out = b.apply_transpose(a.apply_transpose(in)); };
    return {a.grid(), a.n(), fwd, bwd};
}

LinearOp difference(const LinearOp& a, const LinearOp& b) {
    if (!(a.grid() == b.grid()) || a.n() != b.n()) throw InvalidInput("cannot subtract operators on different spaces");
    auto fwd = [a, b](const Vec& in, Vec& out) { out = a.apply(in) - b.apply(in); };
    auto bwd = [a, b](const Vec& in, Vec& out) { out = a.apply_transpose(in) - b.apply_transpose(in); };
    return {a.grid(), a.n(), fwd, bwd};
}

LinearOp scaled(const LinearOp& a, double t) {
    auto fwd = [a, t](const Vec& in, Vec& out) { out = t * a.apply(in); };
    auto bwd = [a, t](const Vec& in, Vec& out) { out = t * a.apply_transpose(in); };
    return {a.grid(), a.n(), fwd, bwd};
}

namespace {

void multiply_cells(const double* mats, int n, std::uint64_t cells, bool transpose, const Vec& in, Vec& out) {
    const std::size_t stride = static_cast<std::size_t>(n) * n;
    if (n == 1) {
        for (std::uint64_t i = 0; i < cells; ++i) out(i) = mats[i] * in(i);
        return;
    }
    for (std::uint64_t i = 0; i < cells; ++i) {
        MatView m(mats + i * stride, n, n);
        if (transpose)
            out.segment(i * n, n).noalias() = m.transpose() * in.segment(i * n, n);
        else
            out.segment(i * n, n).noalias() = m * in.segment(i * n, n);
    }
}

} // namespace

LinearOp cellwise_multiply(GridSpec grid, int n, std::shared_ptr<const std::vector<double>> mats) {
    if (mats->size() != grid.cell_count() * static_cast<std::uint64_t>(n) * n)
        throw InvalidInput("cellwise matrices have the wrong size");
    const std::uint64_t cells = grid.cell_count();
    auto fwd = [mats, n, cells](const Vec& in, Vec& out) { multiply_cells(mats->data(), n, cells, false, in, out); };
    auto bwd = [mats, n, cells](const Vec& in, Vec& out) { multiply_cells(mats->data(), n, cells, true, in, out); };
    return {grid, n, fwd, bwd};
}

LinearOp weight_multiplier(const MatrixWeight& w, WeightPower power) {
    const int n = w.n();
    const std::uint64_t cells = w.grid().cell_count();
    const MatrixWeight* wp = &w;
    // Cell matrices are symmetric, so the transpose is the same kernel.
    auto kernel = [wp, n, cells, power](const Vec& in, Vec& out) {
        const double* base = nullptr;
        switch (power) {
        case WeightPower::one: base = wp->cell(0).data(); break;
        case WeightPower::inverse: base = wp->cell_inverse(0).data(); break;
        case WeightPower::sqrt: base = wp->cell_sqrt(0).data(); break;
        case WeightPower::inv_sqrt: base = wp->cell_inv_sqrt(0).data(); break;
        }
        multiply_cells(base, n, cells, false, in, out);
    };
    return {w.grid(), n, kernel, kernel};
}

} // namespace sparselab
