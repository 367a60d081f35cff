#include "sparselab/commutators.hpp"

#include "sparselab/errors.hpp"
#include "sparselab/rng.hpp"
#include "sparselab/weighted_operators.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

namespace sparselab {

namespace {

std::size_t stride(int n) { return static_cast<std::size_t>(n) * n; }

std::vector<double> cell_products(const GridSpec& g, int n, const std::vector<double>& v, bool transpose_first) {
    std::vector<double> out(v.size());
    const std::size_t st = stride(n);
    for (std::uint64_t c = 0; c < g.cell_count(); ++c) {
        const MatView b(v.data() + c * st, n, n);
        Eigen::Map<Mat> dst(out.data() + c * st, n, n);
        if (transpose_first)
            dst.noalias() = b.transpose() * b;
        else
            dst.noalias() = b * b.transpose();
    }
    return out;
}

} // namespace

SymbolFn::SymbolFn(GridSpec grid, int n, std::vector<double> cell_values)
    : grid_(grid), n_(n), values_(std::move(cell_values)) {
    if (n < 1) throw InvalidInput("symbol dimension must be >= 1");
    if (values_.size() != grid_.cell_count() * stride(n))
        throw InvalidInput("symbol has " + std::to_string(values_.size()) + " values, expected " +
                           std::to_string(grid_.cell_count() * stride(n)));
    for (double x : values_)
        if (!std::isfinite(x)) throw InvalidInput("symbol contains a non-finite value");
    avg_ = TreeAverages(grid_, n_, values_);
    avg_btb_ = TreeAverages(grid_, n_, cell_products(grid_, n_, values_, true));
    avg_bbt_ = TreeAverages(grid_, n_, cell_products(grid_, n_, values_, false));
}

SymbolFn SymbolFn::shifted(const Mat& c) const {
    if (c.rows() != n_ || c.cols() != n_) throw InvalidInput("shift has the wrong size");
    std::vector<double> v = values_;
    const std::size_t st = stride(n_);
    for (std::uint64_t i = 0; i < grid_.cell_count(); ++i) Eigen::Map<Mat>(v.data() + i * st, n_, n_) += c;
    SymbolFn out(grid_, n_, std::move(v));
    out.kind = kind;
    out.seed = seed;
    return out;
}

SymbolFn SymbolFn::scaled(double s) const {
    std::vector<double> v = values_;
    for (double& x : v) x *= s;
    SymbolFn out(grid_, n_, std::move(v));
    out.kind = kind;
    out.seed = seed;
    return out;
}

SymbolKind parse_symbol_kind(const std::string& name) {
    if (name == "zero") return SymbolKind::zero;
    if (name == "constant") return SymbolKind::constant;
    if (name == "random") return SymbolKind::random;
    if (name == "step") return SymbolKind::step;
    throw InvalidInput("unknown symbol kind '" + name + "'");
}

std::string to_string(SymbolKind kind) {
    switch (kind) {
    case SymbolKind::zero: return "zero";
    case SymbolKind::constant: return "constant";
    case SymbolKind::random: return "random";
    case SymbolKind::step: return "step";
    }
    return "?";
}

SymbolFn gen_symbol(const GridSpec& grid, int n, const SymbolParams& params) {
    if (n < 1) throw InvalidInput("symbol dimension must be >= 1");
    if (!std::isfinite(params.scale)) throw InvalidInput("symbol scale must be finite");
    if (params.kind == SymbolKind::step && (params.step_level < 0 || params.step_level > grid.depth()))
        throw InvalidInput("step_level must lie in [0, depth]");
    const std::size_t st = stride(n);
    std::vector<double> v(grid.cell_count() * st, 0.0);
    Rng rng(params.seed);
    const auto draw = [&](double* dst) {
        for (std::size_t k = 0; k < st; ++k) dst[k] = params.scale * rng.normal();
    };
    switch (params.kind) {
    case SymbolKind::zero:
        break;
    case SymbolKind::constant: {
        std::vector<double> c(st);
        draw(c.data());
        for (std::uint64_t i = 0; i < grid.cell_count(); ++i) std::copy(c.begin(), c.end(), v.begin() + i * st);
        break;
    }
    case SymbolKind::random:
        for (std::uint64_t i = 0; i < grid.cell_count(); ++i) draw(v.data() + i * st);
        break;
    case SymbolKind::step: {
        std::vector<double> c(st);
        const std::uint64_t per = grid.cells_per_cube(params.step_level);
        for (std::uint64_t q = 0; q < grid.cubes_at_level(params.step_level); ++q) {
            draw(c.data());
            for (std::uint64_t i = q * per; i < (q + 1) * per; ++i) std::copy(c.begin(), c.end(), v.begin() + i * st);
        }
        break;
    }
    }
    SymbolFn out(grid, n, std::move(v));
    out.kind = to_string(params.kind);
    out.seed = params.seed;
    return out;
}

double sbmo_norm(const SymbolFn& b, const SparseCollection& s) {
    if (!(b.grid() == s.grid())) throw InvalidInput("grid mismatch between symbol and sparse collection");
    double best = 0.0;
    for (const auto& q : s.cubes()) {
        const Mat mean = b.average(q);
        const Mat p1 = Mat(b.average_btb(q)) - mean.transpose() * mean;
        const Mat p2 = Mat(b.average_bbt(q)) - mean * mean.transpose();
        best = std::max({best, lambda_max_sym(0.5 * (p1 + p1.transpose())), lambda_max_sym(0.5 * (p2 + p2.transpose()))});
    }
    return std::sqrt(std::max(best, 0.0));
}

MatrixWeight build_block_weight(const SymbolFn& b) {
    const int n = b.n();
    const int m = 2 * n;
    const auto& g = b.grid();
    std::vector<double> v(g.cell_count() * stride(m));
    Mat cell(m, m);
    for (std::uint64_t c = 0; c < g.cell_count(); ++c) {
        const MatView bc = b.cell(c);
        cell.setIdentity();
        cell.topRightCorner(n, n) = bc;
        cell.bottomLeftCorner(n, n) = bc.transpose();
        cell.bottomRightCorner(n, n).noalias() += bc.transpose() * bc;
        std::copy(cell.data(), cell.data() + cell.size(), v.begin() + c * stride(m));
    }
    MatrixWeight w(g, m, std::move(v), 1e-12);
    w.kind = "block:" + b.kind;
    w.seed = b.seed;
    return w;
}

double block_inverse_residual(const SymbolFn& b) {
    const int n = b.n();
    const MatrixWeight w = build_block_weight(b);
    double worst = 0.0;
    Mat inv(2 * n, 2 * n);
    for (std::uint64_t c = 0; c < b.grid().cell_count(); ++c) {
        const MatView bc = b.cell(c);
        inv.setIdentity();
        inv.topLeftCorner(n, n).noalias() += bc * bc.transpose();
        inv.topRightCorner(n, n) = -bc;
        inv.bottomLeftCorner(n, n) = -bc.transpose();
        const Mat prod = Mat(w.cell(c)) * inv - Mat::Identity(2 * n, 2 * n);
        worst = std::max(worst, prod.cwiseAbs().maxCoeff());
    }
    return worst;
}

CheckReport verify_a2_identity(const SymbolFn& b, const SparseCollection& s, double tol) {
    const double sb = sbmo_norm(b, s);
    const double a2 = a2_constant(build_block_weight(b), s.cubes()).value;
    const double rhs = 1.0 + sb * sb;
    CheckReport r;
    r.name = "a2_identity";
    r.lhs = a2;
    r.rhs = rhs;
    r.margin = rhs - a2;
    r.pass = std::abs(a2 - rhs) <= tol * rhs;
    r.extras = {{"sbmo", sb}, {"relative_error", std::abs(a2 - rhs) / rhs}};
    return r;
}

namespace {

LinearOp symbol_multiplier(const SymbolFn& b) {
    return cellwise_multiply(b.grid(), b.n(), std::make_shared<const std::vector<double>>(b.values()));
}

} // namespace

LinearOp commutator_op(const SparseCollection& s, const SymbolFn& b) {
    if (!(b.grid() == s.grid())) throw InvalidInput("grid mismatch between symbol and sparse collection");
    const LinearOp t = sparse_operator(s, b.n());
    const LinearOp mb = symbol_multiplier(b);
    return difference(compose(t, mb), compose(mb, t));
}

PiecewiseFn commutator_apply(const SparseCollection& s, const SymbolFn& b, const PiecewiseFn& f) {
    if (!(f.grid() == s.grid()) || f.n() != b.n()) throw InvalidInput("function does not match the symbol");
    return commutator_op(s, b).apply(f);
}

NormReport commutator_norm(const SparseCollection& s, const SymbolFn& b, const NormOptions& opts) {
    return spectral_norm(commutator_op(s, b), opts);
}

LinearOp block_conjugator(const SymbolFn& b, bool inverse) {
    const int n = b.n();
    const int m = 2 * n;
    auto mats = std::make_shared<std::vector<double>>(b.grid().cell_count() * stride(m));
    Mat cell(m, m);
    for (std::uint64_t c = 0; c < b.grid().cell_count(); ++c) {
        cell.setIdentity();
        cell.topRightCorner(n, n) = inverse ? Mat(-Mat(b.cell(c))) : Mat(b.cell(c));
        std::copy(cell.data(), cell.data() + cell.size(), mats->begin() + c * stride(m));
    }
    return cellwise_multiply(b.grid(), m, std::move(mats));
}

namespace {

/// Applies a per-pair map: in/out are cell-major 2n-vectors.
void split(const Vec& in, int n, Vec& a, Vec& b) {
    const Eigen::Index cells = in.size() / (2 * n);
    a.resize(cells * n);
    b.resize(cells * n);
    for (Eigen::Index c = 0; c < cells; ++c) {
        a.segment(c * n, n) = in.segment(c * 2 * n, n);
        b.segment(c * n, n) = in.segment(c * 2 * n + n, n);
    }
}

void join(const Vec& a, const Vec& b, int n, Vec& out) {
    const Eigen::Index cells = a.size() / n;
    out.resize(cells * 2 * n);
    for (Eigen::Index c = 0; c < cells; ++c) {
        out.segment(c * 2 * n, n) = a.segment(c * n, n);
        out.segment(c * 2 * n + n, n) = b.segment(c * n, n);
    }
}

} // namespace

LinearOp block_commutator_op(const SparseCollection& s, const SymbolFn& b, double sign) {
    const int n = b.n();
    const LinearOp t = sparse_operator(s, n);
    const LinearOp c = commutator_op(s, b);
    auto fwd = [t, c, n, sign](const Vec& in, Vec& out) {
        Vec f1, f2;
        split(in, n, f1, f2);
        const Vec top = t.apply(f1) + sign * c.apply(f2);
        join(top, t.apply(f2), n, out);
    };
    auto bwd = [t, c, n, sign](const Vec& in, Vec& out) {
        Vec g1, g2;
        split(in, n, g1, g2);
        const Vec bottom = sign * c.apply_transpose(g1) + t.apply_transpose(g2);
        join(t.apply_transpose(g1), bottom, n, out);
    };
    return {s.grid(), 2 * n, fwd, bwd};
}

CheckReport verify_block_conjugation(const SparseCollection& s, const SymbolFn& b, double tol,
                                     const NormOptions& opts) {
    const int n = b.n();
    const LinearOp t2 = sparse_operator(s, 2 * n);
    const LinearOp v = block_conjugator(b, false);
    const LinearOp vinv = block_conjugator(b, true);
    const LinearOp forward = compose(v, compose(t2, vinv));
    const LinearOp backward = compose(vinv, compose(t2, v));
    const LinearOp expect_fwd = block_commutator_op(s, b, -1.0);
    const LinearOp expect_bwd = block_commutator_op(s, b, 1.0);
    const auto dim = static_cast<Eigen::Index>(forward.dim());
    double worst = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) {
        const Vec e = Vec::Unit(dim, i);
        const Vec a = expect_fwd.apply(e);
        const Vec c = expect_bwd.apply(e);
        const double sa = std::max(a.norm(), 1.0);
        const double sc = std::max(c.norm(), 1.0);
        worst = std::max(worst, (forward.apply(e) - a).norm() / sa);
        worst = std::max(worst, (backward.apply(e) - c).norm() / sc);
    }
    const NormReport weighted = weighted_norm(t2, build_block_weight(b), opts);
    const NormReport block = spectral_norm(expect_fwd, opts);
    const double norm_gap = std::abs(weighted.norm - block.norm) / std::max(block.norm, 1e-300);
    CheckReport r;
    r.name = "block_conjugation";
    r.lhs = worst;
    r.rhs = tol;
    r.margin = tol - worst;
    r.pass = worst <= tol && norm_gap <= 1e-6;
    r.residual = std::max(weighted.residual, block.residual);
    r.extras = {{"weighted_norm", weighted.norm}, {"block_norm", block.norm}, {"norm_relative_gap", norm_gap},
                {"basis_vectors", static_cast<double>(dim)}};
    if (norm_gap > 1e-6) r.notes = "weighted and block norms differ";
    return r;
}

CheckReport two_sided_commutator_bounds(const SparseCollection& s, const SymbolFn& b, const NormOptions& opts) {
    const double sb = sbmo_norm(b, s);
    const double a2 = 1.0 + sb * sb;
    const NormReport comm = commutator_norm(s, b, opts);
    const NormReport block = spectral_norm(block_commutator_op(s, b, -1.0), opts);
    const NormReport weighted = weighted_norm(sparse_operator(s, 2 * b.n()), build_block_weight(b), opts);
    const double upper = 64.0 * std::pow(a2, 1.5);
    const double lower = std::pow(a2, 0.25) / std::numbers::sqrt2;
    const double slack = 1.0 + kCheckTol;
    CheckReport r;
    r.name = "commutator_chain";
    r.lhs = comm.norm;
    r.rhs = upper;
    r.margin = upper - comm.norm;
    r.residual = std::max({comm.residual, block.residual, weighted.residual});
    std::string bad;
    if (!(comm.norm <= block.norm * slack)) bad += " commutator>block";
    if (!(std::abs(block.norm - weighted.norm) <= kCheckTol * std::max(block.norm, 1.0))) bad += " block!=weighted";
    if (!(weighted.norm <= upper * slack)) bad += " weighted>upper";
    if (!(lower <= weighted.norm * slack)) bad += " lower>weighted";
    r.pass = bad.empty();
    if (!bad.empty()) r.notes = "violated:" + bad;
    r.extras = {{"commutator_norm", comm.norm}, {"block_norm", block.norm}, {"weighted_norm", weighted.norm},
                {"upper", upper}, {"lower", lower}, {"sbmo", sb}};
    return r;
}

} // namespace sparselab
