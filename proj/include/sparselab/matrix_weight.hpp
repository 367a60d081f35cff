#pragma once

#include "sparselab/grid.hpp"
#include "sparselab/linalg.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sparselab {

inline constexpr double kDefaultEigFloor = 1e-8;

/// Per-cube averages of a field of n x n matrices on the finest cells, for
/// every cube of the tree. Storage is flat: n^2 doubles per cube, column-major.
class TreeAverages {
public:
    TreeAverages() = default;
    TreeAverages(const GridSpec& grid, int n, std::span<const double> cell_values);

    MatView at(const GridSpec& grid, const CubeId& q) const {
        return MatView(data_.data() + grid.flat_index(q) * stride_, n_, n_);
    }

private:
    int n_ = 0;
    std::size_t stride_ = 0;
    std::vector<double> data_;
};

/// Piecewise-constant symmetric positive-definite weight on the finest cells.
///
/// Construction validates every cell (symmetric, finite, smallest eigenvalue
/// >= eig_floor) and precomputes cell inverses, cell square roots and the
/// averages of W and W^{-1} over every tree cube. Immutable afterwards.
class MatrixWeight {
public:
    MatrixWeight(GridSpec grid, int n, std::vector<double> cell_values,
                 double eig_floor = kDefaultEigFloor);

    const GridSpec& grid() const noexcept { return grid_; }
    int n() const noexcept { return n_; }
    double eig_floor() const noexcept { return eig_floor_; }

    MatView cell(std::uint64_t i) const { return view(values_, i); }
    MatView cell_inverse(std::uint64_t i) const { return view(inverse_, i); }
    MatView cell_sqrt(std::uint64_t i) const { return view(sqrt_, i); }
    MatView cell_inv_sqrt(std::uint64_t i) const { return view(inv_sqrt_, i); }

    /// <W>_Q and <W^{-1}>_Q.
    MatView average(const CubeId& q) const;
    MatView average_inv(const CubeId& q) const;

    /// Flat cell data (n^2 doubles per cell, column-major == row-major since
    /// cells are symmetric).
    const std::vector<double>& values() const noexcept { return values_; }
    const std::vector<double>& inverse_values() const noexcept { return inverse_; }

    /// Provenance recorded in weight files.
    std::string kind = "custom";
    std::uint64_t seed = 0;

private:
    MatView view(const std::vector<double>& v, std::uint64_t i) const {
        return MatView(v.data() + i * static_cast<std::size_t>(n_ * n_), n_, n_);
    }

    GridSpec grid_;
    int n_;
    double eig_floor_;
    std::vector<double> values_, inverse_, sqrt_, inv_sqrt_;
    TreeAverages avg_, avg_inv_;
};

/// W^{-1} as a weight in its own right.
MatrixWeight inverse_weight(const MatrixWeight& w);

struct A2Result {
    double value = 1.0;
    CubeId witness;
};

/// max over the given cubes of ||<W>_Q^{1/2} <W^{-1}>_Q^{1/2}||^2.
A2Result a2_constant(const MatrixWeight& w, std::span<const CubeId> cubes);
/// The dyadic constant over every cube of the tree.
A2Result a2_constant(const MatrixWeight& w);

/// Fujii-Wilson constant max_Q (1/w(Q)) int_Q M(1_Q w), exact for a
/// piecewise-constant scalar weight on the finite tree.
double scalar_ainf_constant(const MatrixWeight& w);

/// Cell values (W e, e); e is normalized, zero vectors are rejected.
MatrixWeight extract_scalar(const MatrixWeight& w, const Vec& e);

struct AinfEstimate {
    double value = 1.0;
    /// True when n == 1 and the value is the exact constant.
    bool exact = false;
    std::size_t candidates = 0;
    Vec best_direction;
};

/// Lower estimate of sup_e [w_e]_{A_inf} over coordinate directions,
/// eigenvectors of every cached cube average and `directions` seeded random
/// unit vectors (a prefix-nested sequence for a fixed seed).
AinfEstimate vector_ainf_estimate(const MatrixWeight& w, int directions, std::uint64_t seed);

enum class WeightKind { constant, power, diag, rotating2d, random_logsym };

WeightKind parse_weight_kind(const std::string& name);
std::string to_string(WeightKind kind);

struct WeightParams {
    WeightKind kind = WeightKind::constant;
    std::uint64_t seed = 1;
    double alpha = 0.5;
    std::array<double, 3> center{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    /// rotating2d: angle theta(x) = speed * pi * x_1.
    double speed = 1.0;
    /// random_logsym: W = exp(spread * G), G symmetric Gaussian.
    double spread = 1.0;
    /// diag: one power exponent per component; empty picks a default cycle.
    std::vector<double> diag_alphas;
    double eig_floor = kDefaultEigFloor;
};

/// Exact cell average of |x - c|^alpha in d = 1; subdivided midpoint rule
/// (4 points per axis) for d >= 2.
std::vector<double> power_cell_values(const GridSpec& grid, double alpha, const std::array<double, 3>& center);

MatrixWeight gen_weight(const GridSpec& grid, int n, const WeightParams& params);

} // namespace sparselab
