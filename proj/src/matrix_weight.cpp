#include "sparselab/matrix_weight.hpp"

#include "sparselab/errors.hpp"
#include "sparselab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sparselab {

TreeAverages::TreeAverages(const GridSpec& grid, int n, std::span<const double> cell_values)
    : n_(n), stride_(static_cast<std::size_t>(n) * n) {
    const std::uint64_t cells = grid.cell_count();
    if (cell_values.size() != cells * stride_) throw InvalidInput("cell value array has the wrong size");
    data_.assign(grid.total_cubes() * stride_, 0.0);
    std::copy(cell_values.begin(), cell_values.end(), data_.begin() + grid.level_offset(grid.depth()) * stride_);
    const std::uint64_t fan = std::uint64_t{1} << grid.dim();
    const double inv_fan = 1.0 / static_cast<double>(fan);
    for (int level = grid.depth() - 1; level >= 0; --level) {
        const std::uint64_t off = grid.level_offset(level);
        const std::uint64_t child_off = grid.level_offset(level + 1);
        for (std::uint64_t q = 0; q < grid.cubes_at_level(level); ++q) {
            double* dst = data_.data() + (off + q) * stride_;
            for (std::uint64_t j = 0; j < fan; ++j) {
                const double* src = data_.data() + (child_off + q * fan + j) * stride_;
                for (std::size_t e = 0; e < stride_; ++e) dst[e] += src[e];
            }
            for (std::size_t e = 0; e < stride_; ++e) dst[e] *= inv_fan;
        }
    }
}

MatrixWeight::MatrixWeight(GridSpec grid, int n, std::vector<double> cell_values, double eig_floor)
    : grid_(grid), n_(n), eig_floor_(eig_floor), values_(std::move(cell_values)) {
    if (n < 1) throw InvalidInput("weight dimension n must be >= 1");
    if (!(eig_floor > 0.0)) throw InvalidInput("eig_floor must be positive");
    GridSpec(grid.dim(), grid.depth(), static_cast<std::uint64_t>(n));
    const std::size_t stride = static_cast<std::size_t>(n) * n;
    const std::uint64_t cells = grid_.cell_count();
    if (values_.size() != cells * stride)
        throw InvalidInput("weight values: expected " + std::to_string(cells * stride) + " numbers, got " +
                           std::to_string(values_.size()));
    inverse_.resize(values_.size());
    sqrt_.resize(values_.size());
    inv_sqrt_.resize(values_.size());
    for (std::uint64_t i = 0; i < cells; ++i) {
        Eigen::Map<Mat> a(values_.data() + i * stride, n, n);
        if (!a.allFinite()) throw InvalidInput("weight cell " + std::to_string(i) + " has non-finite entries");
        const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
        if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
            throw InvalidInput("weight cell " + std::to_string(i) + " is not symmetric");
        a = 0.5 * (a + a.transpose()).eval();
        Eigen::Map<Mat> inv(inverse_.data() + i * stride, n, n);
        Eigen::Map<Mat> sq(sqrt_.data() + i * stride, n, n);
        Eigen::Map<Mat> isq(inv_sqrt_.data() + i * stride, n, n);
        if (n == 1) {
            if (!(a(0, 0) >= eig_floor))
                throw InvalidInput("weight cell " + std::to_string(i) + " violates eig_floor");
            inv(0, 0) = 1.0 / a(0, 0);
            sq(0, 0) = std::sqrt(a(0, 0));
            isq(0, 0) = 1.0 / sq(0, 0);
            continue;
        }
        Eigen::SelfAdjointEigenSolver<Mat> es(a);
        if (es.info() != Eigen::Success)
            throw NumericalError("eigensolver failed on weight cell " + std::to_string(i));
        const Vec& lam = es.eigenvalues();
        if (!(lam.minCoeff() >= eig_floor))
            throw InvalidInput("weight cell " + std::to_string(i) + " violates eig_floor (min eigenvalue " +
                               std::to_string(lam.minCoeff()) + ")");
        const Mat& v = es.eigenvectors();
        inv = v * lam.cwiseInverse().asDiagonal() * v.transpose();
        sq = v * lam.cwiseSqrt().asDiagonal() * v.transpose();
        isq = v * lam.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
    }
    avg_ = TreeAverages(grid_, n_, values_);
    avg_inv_ = TreeAverages(grid_, n_, inverse_);
}

MatView MatrixWeight::average(const CubeId& q) const {
    grid_.validate(q);
    return avg_.at(grid_, q);
}

MatView MatrixWeight::average_inv(const CubeId& q) const {
    grid_.validate(q);
    return avg_inv_.at(grid_, q);
}

MatrixWeight inverse_weight(const MatrixWeight& w) {
    MatrixWeight inv(w.grid(), w.n(), w.inverse_values(), std::min(w.eig_floor(), 1e-300));
    inv.kind = w.kind + "^-1";
    inv.seed = w.seed;
    return inv;
}

A2Result a2_constant(const MatrixWeight& w, std::span<const CubeId> cubes) {
    if (cubes.empty()) throw InvalidInput("a2_constant needs a nonempty cube set");
    A2Result best{-1.0, cubes.front()};
    for (const auto& q : cubes) {
        double v = 0.0;
        try {
            v = product_norm_sq(w.average(q), w.average_inv(q), w.eig_floor());
        } catch (const NumericalError&) {
            throw NumericalError("A2 eigensolve failed at cube " + to_string(q));
        }
        if (v > best.value) best = {v, q};
    }
    return best;
}

A2Result a2_constant(const MatrixWeight& w) {
    const GridSpec& g = w.grid();
    std::vector<CubeId> all;
    all.reserve(g.total_cubes());
    for (int level = 0; level <= g.depth(); ++level)
        for (std::uint64_t c = 0; c < g.cubes_at_level(level); ++c) all.push_back({g.dim(), level, c});
    return a2_constant(w, all);
}

namespace {

// Scalar Fujii-Wilson constant from raw cell values: for each cell walk up
// the ancestor chain keeping the running max of averages, which is
// M(1_Q w) on that cell for every ancestor Q.
double scalar_ainf_from_values(const GridSpec& g, std::span<const double> cell_values) {
    const TreeAverages avg(g, 1, cell_values);
    std::vector<double> acc(g.total_cubes(), 0.0);
    const int d = g.dim();
    for (std::uint64_t c = 0; c < g.cell_count(); ++c) {
        double running = 0.0;
        CubeId q{d, g.depth(), c};
        for (;;) {
            running = std::max(running, avg.at(g, q)(0, 0));
            acc[g.flat_index(q)] += running;
            if (q.level == 0) break;
            q = q.parent();
        }
    }
    double best = 0.0;
    for (int level = 0; level <= g.depth(); ++level) {
        const double cells = static_cast<double>(g.cells_per_cube(level));
        for (std::uint64_t code = 0; code < g.cubes_at_level(level); ++code) {
            const CubeId q{d, level, code};
            best = std::max(best, acc[g.flat_index(q)] / (cells * avg.at(g, q)(0, 0)));
        }
    }
    return best;
}

std::vector<double> scalar_values(const MatrixWeight& w, const Vec& e) {
    std::vector<double> out(w.grid().cell_count());
    for (std::uint64_t i = 0; i < out.size(); ++i) out[i] = e.dot(w.cell(i) * e);
    return out;
}

} // namespace

double scalar_ainf_constant(const MatrixWeight& w) {
    if (w.n() != 1) throw InvalidInput("scalar_ainf_constant needs a scalar weight (n = 1)");
    return scalar_ainf_from_values(w.grid(), w.values());
}

MatrixWeight extract_scalar(const MatrixWeight& w, const Vec& e) {
    if (e.size() != w.n()) throw InvalidInput("direction has the wrong dimension");
    const double norm = e.norm();
    if (!(norm > 0.0)) throw InvalidInput("direction must be nonzero");
    MatrixWeight out(w.grid(), 1, scalar_values(w, e / norm), std::min(w.eig_floor(), 1e-300));
    out.kind = w.kind + "_e";
    out.seed = w.seed;
    return out;
}

AinfEstimate vector_ainf_estimate(const MatrixWeight& w, int directions, std::uint64_t seed) {
    const int n = w.n();
    const GridSpec& g = w.grid();
    if (directions < n) throw InvalidInput("vector_ainf_estimate: directions must be >= n");
    AinfEstimate est;
    est.exact = n == 1;
    est.value = 0.0;
    const auto consider = [&](const Vec& e) {
        const double v = scalar_ainf_from_values(g, scalar_values(w, e.normalized()));
        ++est.candidates;
        if (v > est.value) {
            est.value = v;
            est.best_direction = e.normalized();
        }
    };
    for (int i = 0; i < n; ++i) consider(Vec::Unit(n, i));
    if (n > 1) {
        for (int level = 0; level <= g.depth(); ++level) {
            for (std::uint64_t c = 0; c < g.cubes_at_level(level); ++c) {
                Eigen::SelfAdjointEigenSolver<Mat> es(Mat(w.average({g.dim(), level, c})));
                if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed on a cube average");
                for (int j = 0; j < n; ++j) consider(es.eigenvectors().col(j));
            }
        }
        Rng rng(seed);
        for (int k = 0; k < directions; ++k) {
            Vec e(n);
            for (int i = 0; i < n; ++i) e(i) = rng.normal();
            if (e.norm() > 0.0) consider(e);
        }
    }
    return est;
}

WeightKind parse_weight_kind(const std::string& name) {
    if (name == "constant") return WeightKind::constant;
    if (name == "power") return WeightKind::power;
    if (name == "diag") return WeightKind::diag;
    if (name == "rotating2d") return WeightKind::rotating2d;
    if (name == "random_logsym") return WeightKind::random_logsym;
    throw InvalidInput("unknown weight kind '" + name + "'");
}

std::string to_string(WeightKind kind) {
    switch (kind) {
    case WeightKind::constant: return "constant";
    case WeightKind::power: return "power";
    case WeightKind::diag: return "diag";
    case WeightKind::rotating2d: return "rotating2d";
    case WeightKind::random_logsym: return "random_logsym";
    }
    return "?";
}

std::vector<double> power_cell_values(const GridSpec& g, double alpha, const std::array<double, 3>& center) {
    const int d = g.dim();
    if (!(alpha > -d)) throw InvalidInput("power weight: alpha must exceed -dim");
    std::vector<double> out(g.cell_count());
    const double h = std::ldexp(1.0, -g.depth());
    for (std::uint64_t i = 0; i < out.size(); ++i) {
        const auto lo = lower_corner({d, g.depth(), i});
        if (d == 1) {
            // Antiderivative of |x - c|^alpha.
            const auto prim = [&](double x) {
                const double t = x - center[0];
                return std::copysign(std::pow(std::abs(t), alpha + 1.0), t) / (alpha + 1.0);
            };
            out[i] = (prim(lo[0] + h) - prim(lo[0])) / h;
            continue;
        }
        constexpr int m = 4;
        double sum = 0.0;
        int count = 0;
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                for (int c = 0; c < (d == 3 ? m : 1); ++c) {
                    const double p[3] = {lo[0] + (a + 0.5) * h / m, lo[1] + (b + 0.5) * h / m,
                                         lo[2] + (c + 0.5) * h / m};
                    double r2 = 0.0;
                    for (int k = 0; k < d; ++k) r2 += (p[k] - center[k]) * (p[k] - center[k]);
                    sum += std::pow(r2, 0.5 * alpha);
                    ++count;
                }
        out[i] = sum / count;
    }
    return out;
}

MatrixWeight gen_weight(const GridSpec& g, int n, const WeightParams& p) {
    if (n < 1) throw InvalidInput("weight dimension n must be >= 1");
    GridSpec(g.dim(), g.depth(), static_cast<std::uint64_t>(n));
    const std::uint64_t cells = g.cell_count();
    const std::size_t stride = static_cast<std::size_t>(n) * n;
    std::vector<double> values(cells * stride, 0.0);
    const auto put = [&](std::uint64_t i, const Mat& m) {
        std::copy(m.data(), m.data() + stride, values.begin() + i * stride);
    };
    switch (p.kind) {
    case WeightKind::constant:
        for (std::uint64_t i = 0; i < cells; ++i) put(i, Mat::Identity(n, n));
        break;
    case WeightKind::power: {
        const auto w = power_cell_values(g, p.alpha, p.center);
        for (std::uint64_t i = 0; i < cells; ++i) put(i, w[i] * Mat::Identity(n, n));
        break;
    }
    case WeightKind::diag: {
        static const double cycle[] = {0.5, -0.4, 0.7, -0.6, 0.3, -0.2, 0.8, -0.7};
        Mat m = Mat::Zero(n, n);
        std::vector<std::vector<double>> comps;
        for (int k = 0; k < n; ++k) {
            const double a = p.diag_alphas.empty() ? cycle[k % 8] : p.diag_alphas[k % p.diag_alphas.size()];
            auto c = p.center;
            for (auto& x : c) x = std::fmod(x + 0.618033988749895 * k, 1.0);
            comps.push_back(power_cell_values(g, a, c));
        }
        for (std::uint64_t i = 0; i < cells; ++i) {
            for (int k = 0; k < n; ++k) m(k, k) = comps[k][i];
            put(i, m);
        }
        break;
    }
    case WeightKind::rotating2d: {
        if (n % 2 != 0) throw InvalidInput("rotating2d needs an even matrix dimension n");
        if (!(std::abs(p.alpha) < g.dim())) throw InvalidInput("rotating2d: |alpha| must be below dim");
        const auto up = power_cell_values(g, p.alpha, p.center);
        const auto down = power_cell_values(g, -p.alpha, p.center);
        const double h = std::ldexp(1.0, -g.depth());
        Mat m = Mat::Zero(n, n);
        for (std::uint64_t i = 0; i < cells; ++i) {
            const double x = lower_corner({g.dim(), g.depth(), i})[0] + 0.5 * h;
            for (int b = 0; b < n / 2; ++b) {
                const double theta = p.speed * std::numbers::pi * x + b * std::numbers::pi / 4.0;
                Eigen::Matrix2d r;
                r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
                const Eigen::Matrix2d blk = r * Eigen::Vector2d(up[i], down[i]).asDiagonal() * r.transpose();
                m.block<2, 2>(2 * b, 2 * b) = 0.5 * (blk + blk.transpose());
            }
            put(i, m);
        }
        break;
    }
    case WeightKind::random_logsym: {
        Rng rng(p.seed);
        Mat gm(n, n);
        for (std::uint64_t i = 0; i < cells; ++i) {
            for (int a = 0; a < n; ++a) {
                gm(a, a) = rng.normal();
                for (int b = a + 1; b < n; ++b) gm(a, b) = gm(b, a) = rng.normal() / std::sqrt(2.0);
            }
            put(i, sym_exp(p.spread * gm));
        }
        break;
    }
    }
    MatrixWeight w(g, n, std::move(values), p.eig_floor);
    w.kind = to_string(p.kind);
    w.seed = p.seed;
    return w;
}

} // namespace sparselab
