#pragma once

#include "sparselab/decomposition.hpp"
#include "sparselab/matrix_weight.hpp"
#include "sparselab/sparse_collection.hpp"
#include "sparselab/spectral.hpp"
#include "sparselab/weighted_operators.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sparselab {

inline constexpr double kCheckTol = 1e-6;

struct CheckReport {
    std::string name;
    /// Reproduction digest filled in by the caller (seeds, grid, kinds).
    std::string digest;
    double lhs = 0.0;
    double rhs = 0.0;
    /// rhs - lhs
    double margin = 0.0;
    bool pass = true;
    std::string notes;
    /// Largest norm residual that entered lhs or rhs.
    double residual = 0.0;
    std::vector<std::pair<std::string, double>> extras;
};

/// pass iff lhs <= rhs (1 + tol).
CheckReport make_report(std::string name, double lhs, double rhs, double tol = kCheckTol);

/// (1/sqrt 2) [W]_{A_2^S}^{1/4} <= ||T_S||_{L^2_W}. `norm` is ||T_S||_{L^2_W}.
CheckReport check_lower_bound(const SparseCollection& s, const MatrixWeight& w, const NormReport& norm);
CheckReport check_lower_bound(const SparseCollection& s, const MatrixWeight& w, const NormOptions& opts = {});

/// Scalar weights only: [w]_{A_2^S}^{1/2} <= ||T_S||_{L^2_w}.
CheckReport check_scalar_lower_bound(const SparseCollection& s, const MatrixWeight& w, const NormReport& norm);

/// ||T_S||_{L^2_W} <= 64 [W]_{A_2^S}^{3/2}.
CheckReport check_upper_bound(const SparseCollection& s, const MatrixWeight& w, const NormReport& norm);
CheckReport check_upper_bound(const SparseCollection& s, const MatrixWeight& w, const NormOptions& opts = {});

/// c_d = 2 (2^{d+3} + (8 * 2^{1/4} / ln 2) 2^{d+1}).
double mixed_bound_constant(int dim);

/// 2 sqrt(sum_k sqrt(alpha(k)) * sum_k sqrt(beta(k))) over k in Z, evaluated
/// from the piecewise closed forms (finite head plus geometric tail).
double mixed_bound_series(double a2, double ainf, double ainf_dual, int dim);

/// ||T_S||_{L^2_w} <= c_d [w]_{A_2}^{1/2} [w]_{A_inf}^{1/2} [w^{-1}]_{A_inf}^{1/2}.
/// For n > 1 the A_inf values are lower estimates: the report is marked
/// informative in `notes`, always passes, and records the would-be verdict
/// as the extra "informative_pass".
CheckReport check_mixed_bound(const SparseCollection& s, const MatrixWeight& w, const WeightSummary& summary,
                              const NormReport& norm);
CheckReport check_mixed_bound(const SparseCollection& s, const MatrixWeight& w, const NormOptions& opts = {});

/// For each candidate direction e: [w_e]_{A_2^S} <= [W]_{A_2^S}. lhs is the
/// largest scalar constant found.
CheckReport check_reduction(const MatrixWeight& w, const SparseCollection& s, int directions, std::uint64_t seed);

/// w(Ssub) <= (1 - (1 - delta)^2 / [w]_{A_2^{{Q}}}) w(Q) for a cell subset
/// Ssub of Q with |Ssub| <= delta |Q|.
CheckReport check_portion_preserving(const MatrixWeight& w, const CubeId& q, std::span<const std::uint64_t> ssub,
                                     double delta);

/// Runs check_portion_preserving over every Q in S and each delta with the
/// heaviest floor(delta |Q|) cells of Q, which maximize w(Ssub) at that size.
/// lhs is the worst ratio w(Ssub) / bound, rhs is 1.
CheckReport check_portion_preserving_worst(const MatrixWeight& w, const SparseCollection& s,
                                           std::span<const double> deltas);

/// Worst relative violation over tree cubes of
/// <w^{1+eps}>_Q^{1/(1+eps)} <= 2^{1/(1+eps)} <w>_Q, eps = 1/(2^{d+1}[w]_{A_inf} - 1).
/// lhs and rhs are the ratio lhs_Q / (2^{1/(1+eps)} <w>_Q) and 1.
CheckReport check_reverse_holder(const MatrixWeight& w);

/// With delta = 2^{log2_delta} below 2^{-2^{d+2}[w]_{A_inf}} and
/// eta = 2^{1/(1+eps)} delta^{eps/(1+eps)}: for every cube Q and the heaviest
/// floor(delta |Q|) cells Ssub of Q, w(Ssub) <= eta w(Q); also eta < 1/2.
/// lhs is the worst w(Ssub)/w(Q), rhs is eta. When no cube admits a nonempty
/// Ssub the check is vacuous and says so in `notes`. Default log2_delta sits
/// just below the threshold exponent.
CheckReport check_small_portion_ainf(const MatrixWeight& w, std::optional<double> log2_delta = std::nullopt);

/// [w]_{A_inf} <= e [w]_{A_2} for scalar weights, both sides exact.
CheckReport check_ainf_vs_a2(const MatrixWeight& w, double tol = 1e-9);

/// Measured ||T_S|| <= 2 sqrt(A B) from the measured Cotlar tables, and every
/// table entry under the case 1 bound (and the case 2 alpha/beta bounds when
/// A_inf is exact). lhs/rhs report the Cotlar-Stein comparison; a failing
/// per-gap bound is listed in `notes` and fails the check.
CheckReport check_cotlar(const SparseCollection& s, const Decomposition& dec, const MatrixWeight& w,
                         const WeightSummary& summary, const NormReport& norm, const NormOptions& opts = {});

struct SweepPoint {
    double parameter = 0.0;
    double a2_sparse = 1.0;
    double norm = 0.0;
    double residual = 0.0;
};

struct SweepFit {
    std::vector<SweepPoint> points;
    /// Least-squares slope of log ||T_S|| against log [W]_{A_2^S}.
    double exponent = 0.0;
    bool degenerate = false;
    /// exponent within [1/4 - 0.05, 3/2 + 0.05] (true when degenerate).
    bool in_corridor = true;
};

enum class SweepFamily { constant, power_chain, rotating_maximal };

SweepFamily parse_sweep_family(const std::string& name);
std::string to_string(SweepFamily family);

/// Runs the family over `parameters` on a d = 1 grid of the given depth and
/// fits the exponent. power_chain uses a chain of `chain_length` steps (-1:
/// the full depth) with the power singularity at its deepest cube. Throws
/// InvalidInput for fewer than 3 parameters.
SweepFit sharpness_sweep(SweepFamily family, int depth, std::span<const double> parameters,
                         const NormOptions& opts = {}, int chain_length = -1);

/// Least-squares slope of y on x; `degenerate` when x has no spread.
std::pair<double, bool> fit_slope(std::span<const double> x, std::span<const double> y);

} // namespace sparselab
