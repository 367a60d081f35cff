#pragma once

// Brute-force reference implementations used only by the tests. Nothing here
// reuses the tree passes or cached averages of the library.

#include "sparselab/decomposition.hpp"
#include "sparselab/grid.hpp"
#include "sparselab/linalg.hpp"
#include "sparselab/matrix_weight.hpp"
#include "sparselab/rng.hpp"
#include "sparselab/sparse_collection.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

using sparselab::CubeId;
using sparselab::GridSpec;
using sparselab::Mat;
using sparselab::Vec;

inline std::vector<CubeId> all_cubes(const GridSpec& g) {
    std::vector<CubeId> out;
    for (int l = 0; l <= g.depth(); ++l)
        for (std::uint64_t k = 0; k < g.cubes_at_level(l); ++k) out.push_back({g.dim(), l, k});
    return out;
}

inline CubeId cell_cube(const GridSpec& g, std::uint64_t c) { return {g.dim(), g.depth(), c}; }

/// Geometric containment from lower corners and side lengths.
inline bool geometric_contains(const CubeId& outer, const CubeId& inner) {
    const auto a = sparselab::lower_corner(outer);
    const auto b = sparselab::lower_corner(inner);
    const double sa = sparselab::side_length(outer);
    const double sb = sparselab::side_length(inner);
    for (int i = 0; i < outer.dim; ++i)
        if (b[i] < a[i] || b[i] + sb > a[i] + sa) return false;
    return true;
}

/// Cells of q found by scanning every finest cell.
inline std::vector<std::uint64_t> scan_cells(const GridSpec& g, const CubeId& q) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t c = 0; c < g.cell_count(); ++c)
        if (geometric_contains(q, cell_cube(g, c))) out.push_back(c);
    return out;
}

/// Explicit Nn x Nn matrix of sum_{Q in cubes} 1_Q <f>_Q.
inline Mat dense_averaging_sum(const GridSpec& g, int n, const std::vector<CubeId>& cubes) {
    const auto N = static_cast<Eigen::Index>(g.cell_count());
    Mat t = Mat::Zero(N * n, N * n);
    for (const auto& q : cubes) {
        const auto cs = scan_cells(g, q);
        const double inv = 1.0 / static_cast<double>(cs.size());
        for (auto a : cs)
            for (auto b : cs)
                for (int i = 0; i < n; ++i) t(a * n + i, b * n + i) += inv;
    }
    return t;
}

/// Block-diagonal matrix of cell matrices raised to `power` by eigendecomposition.
inline Mat dense_weight_power(const sparselab::MatrixWeight& w, double power) {
    const int n = w.n();
    const auto N = static_cast<Eigen::Index>(w.grid().cell_count());
    Mat out = Mat::Zero(N * n, N * n);
    for (Eigen::Index c = 0; c < N; ++c) {
        Eigen::SelfAdjointEigenSolver<Mat> es(Mat(w.cell(c)));
        Vec ev = es.eigenvalues().array().pow(power).matrix();
        out.block(c * n, c * n, n, n) = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    }
    return out;
}

/// Average of cell matrices over q by direct summation.
inline Mat direct_average(const GridSpec& g, int n, const std::vector<double>& vals, const CubeId& q) {
    Mat acc = Mat::Zero(n, n);
    const auto cs = scan_cells(g, q);
    for (auto c : cs) acc += Eigen::Map<const Mat>(vals.data() + c * n * n, n, n);
    return acc / static_cast<double>(cs.size());
}

inline double dense_norm(const Mat& a) { return Eigen::JacobiSVD<Mat>(a).singularValues()(0); }

/// Maximal strict S-subcubes of q by exhaustive scan.
inline std::vector<CubeId> brute_children(const sparselab::SparseCollection& s, const CubeId& q) {
    std::vector<CubeId> out;
    for (const auto& a : s.cubes()) {
        if (a == q || !geometric_contains(q, a)) continue;
        bool maximal = true;
        for (const auto& b : s.cubes())
            if (b != q && b != a && geometric_contains(q, b) && geometric_contains(b, a)) maximal = false;
        if (maximal) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Scalar Fujii-Wilson constant by enumerating (Q, cell, R) triples.
inline double brute_ainf(const GridSpec& g, const std::vector<double>& w) {
    const auto cubes = all_cubes(g);
    std::vector<double> avg(cubes.size());
    for (std::size_t i = 0; i < cubes.size(); ++i) {
        double s = 0;
        const auto cs = scan_cells(g, cubes[i]);
        for (auto c : cs) s += w[c];
        avg[i] = s / cs.size();
    }
    double best = 0;
    for (std::size_t qi = 0; qi < cubes.size(); ++qi) {
        const auto cs = scan_cells(g, cubes[qi]);
        double integral = 0;
        double mass = 0;
        for (auto c : cs) {
            double m = 0;
            for (std::size_t ri = 0; ri < cubes.size(); ++ri)
                if (geometric_contains(cubes[qi], cubes[ri]) && geometric_contains(cubes[ri], cell_cube(g, c)))
                    m = std::max(m, avg[ri]);
            integral += m;
            mass += w[c];
        }
        best = std::max(best, integral / mass);
    }
    return best;
}

/// sup over sampled unit e of the two mean-oscillation quadratic forms on S.
inline double sampled_sbmo(const GridSpec& g, int n, const std::vector<double>& b,
                           const std::vector<CubeId>& cubes, int directions, std::uint64_t seed) {
    sparselab::Rng rng(seed);
    std::vector<Vec> dirs;
    for (int i = 0; i < n; ++i) dirs.push_back(Vec::Unit(n, i));
    for (int k = 0; k < directions; ++k) {
        Vec e(n);
        for (int i = 0; i < n; ++i) e(i) = rng.normal();
        dirs.push_back(e.normalized());
    }
    double best = 0;
    for (const auto& q : cubes) {
        const auto cs = scan_cells(g, q);
        const Mat mean = direct_average(g, n, b, q);
        for (const auto& e : dirs) {
            double o1 = 0;
            double o2 = 0;
            for (auto c : cs) {
                const Mat osc = Eigen::Map<const Mat>(b.data() + c * n * n, n, n) - mean;
                o1 += (osc * e).squaredNorm();
                o2 += (osc.transpose() * e).squaredNorm();
            }
            best = std::max({best, o1 / cs.size(), o2 / cs.size()});
        }
    }
    return std::sqrt(best);
}

/// ||T_n^* T_m||_{L^2_W} for n > m from the kernel form
/// max_{R in J^m} lambda_max(<V>_R^{1/2} [sum_{Q in J^{n-m}(R)} |Q|/|R| <U>_Q <V>_Q <U>_Q] <V>_R^{1/2})^{1/2}
/// with (U, V) = (W, W^{-1}); swapping gives ||T_n T_m^*||.
inline double kernel_cross_norm(const sparselab::SparseCollection& s, const sparselab::Decomposition& dec,
                                const std::vector<double>& u, const std::vector<double>& v, int n_dim, int m,
                                int n) {
    const auto& g = s.grid();
    double best = 0;
    for (const auto& r : dec.family(static_cast<std::size_t>(m))) {
        const auto rcells = scan_cells(g, r).size();
        Mat inner = Mat::Zero(n_dim, n_dim);
        for (const auto& q : sparselab::generation(s, r, n - m)) {
            const double rel = static_cast<double>(scan_cells(g, q).size()) / rcells;
            const Mat uq = direct_average(g, n_dim, u, q);
            inner += rel * uq * direct_average(g, n_dim, v, q) * uq;
        }
        Eigen::SelfAdjointEigenSolver<Mat> es(direct_average(g, n_dim, v, r));
        const Mat root = es.operatorSqrt();
        const Mat sym = root * inner * root;
        best = std::max(best, Eigen::SelfAdjointEigenSolver<Mat>(0.5 * (sym + sym.transpose())).eigenvalues().maxCoeff());
    }
    return std::sqrt(std::max(best, 0.0));
}

inline std::vector<double> cell_inverses(const std::vector<double>& vals, int n) {
    std::vector<double> out(vals.size());
    const std::size_t stride = static_cast<std::size_t>(n) * n;
    for (std::size_t c = 0; c * stride < vals.size(); ++c) {
        Mat inv = Eigen::Map<const Mat>(vals.data() + c * stride, n, n).inverse();
        std::copy(inv.data(), inv.data() + stride, out.data() + c * stride);
    }
    return out;
}

} // namespace oracle
