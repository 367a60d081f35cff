#pragma once

#include "sparselab/decomposition.hpp"
#include "sparselab/linear_op.hpp"
#include "sparselab/matrix_weight.hpp"
#include "sparselab/sparse_collection.hpp"
#include "sparselab/spectral.hpp"

#include <span>
#include <vector>

namespace sparselab {

/// Per-level membership flags (empty vector: no member on that level).
using CubeMask = std::vector<std::vector<std::uint8_t>>;

CubeMask make_mask(const GridSpec& grid, std::span<const CubeId> cubes);

/// f |-> sum_{Q in cubes} 1_Q <f>_Q, applied in two tree passes (bottom-up
/// sums, top-down accumulation of the selected averages); O(N n) per apply.
/// Self-transpose on the unweighted space.
LinearOp averaging_sum_op(const GridSpec& grid, int n, std::span<const CubeId> cubes);

/// T_S as a matrix-free operator on R^n-valued step functions.
LinearOp sparse_operator(const SparseCollection& s, int n);
PiecewiseFn apply_sparse(const SparseCollection& s, const PiecewiseFn& f);

/// f |-> 1_Q <f>_Q
LinearOp averaging_operator(const GridSpec& grid, int n, const CubeId& q);

/// T_k = sum_{Q in J^k} 1_Q <f>_Q (zero operator beyond the last family).
LinearOp truncation(const SparseCollection& s, const Decomposition& dec, int k, int n);

/// ||T||_{L^2_W -> L^2_W} as the spectral norm of W^{1/2} T W^{-1/2}; the
/// uniform cell measure cancels. The weight must outlive the call.
NormReport weighted_norm(const LinearOp& t, const MatrixWeight& w, const NormOptions& opts = {});

struct AveragingNorm {
    double exact = 0.0;
    double operational = 0.0;
    double residual = 0.0;
};

/// exact: ||<W>_Q^{1/2} <W^{-1}>_Q^{1/2}|| by eigensolve; operational: the
/// measured weighted norm of f |-> 1_Q <f>_Q.
AveragingNorm averaging_norm(const MatrixWeight& w, const CubeId& q, const NormOptions& opts = {});

/// T* with (Tf, g)_W = (f, T*g)_W, realized as W^{-1} T^t W.
LinearOp adjoint_in_weight(const LinearOp& t, const MatrixWeight& w);

/// Weight constants consumed by the Cotlar-Stein bounds.
struct WeightSummary {
    double a2_sparse = 1.0;   ///< [W]_{A_2^S}
    double a2_full = 1.0;     ///< [W]_{A_2} over every tree cube
    double ainf = 1.0;        ///< [W]_{A_inf}
    double ainf_dual = 1.0;   ///< [W^{-1}]_{A_inf}
    bool ainf_exact = true;   ///< false when the A_inf values are lower estimates
};

/// Computes the summary; vector A_inf values use `directions` random
/// directions with `seed` and are flagged as lower estimates.
WeightSummary summarize_weight(const MatrixWeight& w, const SparseCollection& s, int directions = 16,
                               std::uint64_t seed = 7);

struct CotlarTerms {
    double norm_star_first = 0.0;   ///< ||T_n^* T_m||
    double norm_star_second = 0.0;  ///< ||T_n T_m^*||
    double bound_case1 = 0.0;
    double bound_case2_alpha = 0.0;
    double bound_case2_beta = 0.0;
    double residual = 0.0;
    bool case2_exact = true;
};

/// Closed-form Cotlar-Stein bounds at gap |n - m|.
double cotlar_bound_case1(double a2_sparse, int gap);
double cotlar_bound_case2(double a2_full, double ainf, int gap, int dim);

CotlarTerms cotlar_terms(const SparseCollection& s, const Decomposition& dec, const MatrixWeight& w,
                         const WeightSummary& summary, int m, int n, const NormOptions& opts = {});

/// One row per gap k >= 0: measured maxima over pairs with |n - m| = k.
struct CotlarRow {
    int gap = 0;
    double norm_star_first = 0.0;
    double norm_star_second = 0.0;
    double bound_case1 = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
};

struct CotlarTable {
    std::vector<CotlarRow> rows;
    double max_residual = 0.0;
    bool case2_exact = true;
};

CotlarTable cotlar_table(const SparseCollection& s, const Decomposition& dec, const MatrixWeight& w,
                         const WeightSummary& summary, const NormOptions& opts = {});

/// 2 sqrt(A B) with A = sum_{k in Z} sqrt(alpha(|k|)), B likewise; the tables
/// are indexed by gap k >= 0 and extended symmetrically to negative gaps.
double cotlar_stein_bound(std::span<const double> alpha, std::span<const double> beta);

} // namespace sparselab
