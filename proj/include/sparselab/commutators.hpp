#pragma once

#include "sparselab/linear_op.hpp"
#include "sparselab/matrix_weight.hpp"
#include "sparselab/sparse_collection.hpp"
#include "sparselab/spectral.hpp"
#include "sparselab/theorem_suite.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sparselab {

/// Matrix symbol B: one n x n real matrix per finest cell (column-major), no
/// positivity requirement.
class SymbolFn {
public:
    SymbolFn(GridSpec grid, int n, std::vector<double> cell_values);

    const GridSpec& grid() const noexcept { return grid_; }
    int n() const noexcept { return n_; }
    MatView cell(std::uint64_t i) const {
        return MatView(values_.data() + i * static_cast<std::size_t>(n_ * n_), n_, n_);
    }
    const std::vector<double>& values() const noexcept { return values_; }

    /// <B>_Q, <B^t B>_Q and <B B^t>_Q.
    MatView average(const CubeId& q) const { return avg_.at(grid_, q); }
    MatView average_btb(const CubeId& q) const { return avg_btb_.at(grid_, q); }
    MatView average_bbt(const CubeId& q) const { return avg_bbt_.at(grid_, q); }

    /// B + C for a constant matrix C, and s B.
    SymbolFn shifted(const Mat& c) const;
    SymbolFn scaled(double s) const;

    std::string kind = "custom";
    std::uint64_t seed = 0;

private:
    GridSpec grid_;
    int n_;
    std::vector<double> values_;
    TreeAverages avg_, avg_btb_, avg_bbt_;
};

enum class SymbolKind { zero, constant, random, step };

SymbolKind parse_symbol_kind(const std::string& name);
std::string to_string(SymbolKind kind);

struct SymbolParams {
    SymbolKind kind = SymbolKind::random;
    std::uint64_t seed = 1;
    /// Entries are scale * N(0, 1).
    double scale = 1.0;
    /// step: B is constant on the cubes of this level.
    int step_level = 2;
};

SymbolFn gen_symbol(const GridSpec& grid, int n, const SymbolParams& params);

/// sqrt of max over Q in S of max(lambda_max(<B^tB>_Q - <B>_Q^t<B>_Q),
/// lambda_max(<BB^t>_Q - <B>_Q<B>_Q^t)).
double sbmo_norm(const SymbolFn& b, const SparseCollection& s);

/// W_B = V_B^t V_B = [[I, B], [B^t, I + B^t B]] cellwise, with V_B = [[I, B], [0, I]].
MatrixWeight build_block_weight(const SymbolFn& b);

/// max over cells of ||W_B (cell) * [[I + BB^t, -B], [-B^t, I]] - I||_max.
double block_inverse_residual(const SymbolFn& b);

/// [W_B]_{A_2^S} = 1 + ||B||_{SBMO_S}^2, relative tolerance `tol`.
CheckReport verify_a2_identity(const SymbolFn& b, const SparseCollection& s, double tol = 1e-8);

/// [T_S, B] f = T_S(B f) - B (T_S f).
LinearOp commutator_op(const SparseCollection& s, const SymbolFn& b);
PiecewiseFn commutator_apply(const SparseCollection& s, const SymbolFn& b, const PiecewiseFn& f);
NormReport commutator_norm(const SparseCollection& s, const SymbolFn& b, const NormOptions& opts = {});

/// Multiplication by V_B or V_B^{-1} on pairs (f_1, f_2), stored per cell as
/// the 2n-vector (f_1, f_2).
LinearOp block_conjugator(const SymbolFn& b, bool inverse);

/// [[T_S, sign [T_S, B]], [0, T_S]] on pairs of functions.
LinearOp block_commutator_op(const SparseCollection& s, const SymbolFn& b, double sign);

/// Operator identities on every basis vector:
///   V_B T_S V_B^{-1} = [[T_S, -[T_S,B]], [0, T_S]],
///   V_B^{-1} T_S V_B = [[T_S,  [T_S,B]], [0, T_S]],
/// to `tol` relative, plus weighted_norm(T_S, W_B) = ||block operator|| to
/// 1e-6 relative. lhs is the largest identity residual.
CheckReport verify_block_conjugation(const SparseCollection& s, const SymbolFn& b, double tol = 1e-10,
                                     const NormOptions& opts = {});

/// ||[T_S,B]|| <= ||block|| = ||T_S||_{L^2_{W_B}} <= 64 (1 + s^2)^{3/2} and
/// ||T_S||_{L^2_{W_B}} >= (1/sqrt 2)(1 + s^2)^{1/4}, s = ||B||_{SBMO_S}.
/// All five quantities are reported in `extras`.
CheckReport two_sided_commutator_bounds(const SparseCollection& s, const SymbolFn& b,
                                        const NormOptions& opts = {});

} // namespace sparselab
