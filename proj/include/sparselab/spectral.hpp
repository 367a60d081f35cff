#pragma once

#include "sparselab/linear_op.hpp"

#include <cstdint>
#include <string>

namespace sparselab {

struct NormOptions {
    /// Relative residual ||A^tA y - theta y|| / theta required for convergence.
    double tol = 1e-9;
    /// Krylov dimension per cycle.
    int max_krylov = 200;
    /// Restarts from the current Ritz vector after an unconverged cycle.
    int restarts = 3;
    std::uint64_t seed = 0x5eed;
    /// Use a dense SVD instead when the operator dimension is at most this.
    std::size_t dense_threshold = 0;
};

struct NormReport {
    double norm = 0.0;
    /// Relative residual of the top Ritz pair of A^tA (0 for dense SVD).
    double residual = 0.0;
    int iterations = 0;
    std::string method;
};

/// Largest singular value of a matrix-free operator.
///
/// Lanczos iteration on A^tA (power iteration accelerated over the Krylov
/// space, full reorthogonalization), seeded start vector, explicit restarts.
/// Throws NumericalError carrying the last estimate and residual when the
/// tolerance is not reached.
NormReport spectral_norm(const LinearOp& a, const NormOptions& opts = {});

} // namespace sparselab
