#pragma once

#include "sparselab/grid.hpp"
#include "sparselab/linalg.hpp"
#include "sparselab/matrix_weight.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <span>

namespace sparselab {

/// Vector-valued step function: one R^n vector per finest cell, cell-major.
class PiecewiseFn {
public:
    PiecewiseFn(GridSpec grid, int n) : grid_(grid), n_(n), data_(Vec::Zero(grid.cell_count() * n)) {}
    PiecewiseFn(GridSpec grid, int n, Vec data);

    /// f(x) = v on every cell.
    static PiecewiseFn constant(GridSpec grid, const Vec& v);

    const GridSpec& grid() const noexcept { return grid_; }
    int n() const noexcept { return n_; }
    const Vec& data() const noexcept { return data_; }
    Vec& data() noexcept { return data_; }

    Eigen::Map<const Vec> cell(std::uint64_t i) const { return {data_.data() + i * n_, n_}; }
    Eigen::Map<Vec> cell(std::uint64_t i) { return {data_.data() + i * n_, n_}; }

private:
    GridSpec grid_;
    int n_;
    Vec data_;
};

/// sum over cells |cell| (W f, g)
double l2w_inner(const PiecewiseFn& f, const PiecewiseFn& g, const MatrixWeight& w);
double l2w_norm(const PiecewiseFn& f, const MatrixWeight& w);

/// Linear operator on step functions given by matrix-free apply and
/// transpose (the unweighted adjoint on cell-coordinate vectors).
class LinearOp {
public:
    using Kernel = std::function<void(const Vec& in, Vec& out)>;

    LinearOp(GridSpec grid, int n, Kernel apply, Kernel transpose)
        : grid_(grid), n_(n), apply_(std::move(apply)), transpose_(std::move(transpose)) {}

    const GridSpec& grid() const noexcept { return grid_; }
    int n() const noexcept { return n_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(grid_.cell_count()) * n_; }

    Vec apply(const Vec& x) const;
    Vec apply_transpose(const Vec& x) const;
    PiecewiseFn apply(const PiecewiseFn& f) const;

    LinearOp transpose() const { return {grid_, n_, transpose_, apply_}; }

    /// Dense matrix obtained by applying the operator to the basis.
    Mat to_dense() const;

    /// Optional independent dense realization for oracle checks.
    std::optional<Mat> dense;

private:
    GridSpec grid_;
    int n_;
    Kernel apply_;
    Kernel transpose_;
};

LinearOp identity_op(GridSpec grid, int n);
/// a o b
LinearOp compose(const LinearOp& a, const LinearOp& b);
LinearOp difference(const LinearOp& a, const LinearOp& b);
LinearOp scaled(const LinearOp& a, double t);

/// f |-> M(x) f(x) for per-cell n x n matrices (n^2 doubles per cell,
/// column-major). The transpose multiplies by M(x)^t.
LinearOp cellwise_multiply(GridSpec grid, int n, std::shared_ptr<const std::vector<double>> mats);

enum class WeightPower { one, inverse, sqrt, inv_sqrt };
/// Multiplication by W, W^{-1}, W^{1/2} or W^{-1/2}; the weight must outlive
/// the operator.
LinearOp weight_multiplier(const MatrixWeight& w, WeightPower power);

} // namespace sparselab
