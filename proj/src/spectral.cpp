#include "sparselab/spectral.hpp"

#include "sparselab/errors.hpp"
#include "sparselab/rng.hpp"

#include <cmath>
#include <vector>

namespace sparselab {

namespace {

struct CycleResult {
    double theta = 0.0;
    double residual = 0.0; // relative, from the true residual vector
    Vec ritz;
    int steps = 0;
    bool converged = false;
};

CycleResult lanczos_cycle(const LinearOp& a, Vec start, const NormOptions& opts) {
    const std::size_t dim = a.dim();
    const int m = static_cast<int>(std::min<std::size_t>(opts.max_krylov, dim));
    std::vector<Vec> basis;
    basis.reserve(m + 1);
    std::vector<double> alpha, beta;
    basis.push_back(start.normalized());

    CycleResult out;
    Vec s;
    for (int j = 0; j < m; ++j) {
        Vec w = a.apply_transpose(a.apply(basis[j]));
        alpha.push_back(basis[j].dot(w));
        // Full reorthogonalization, two passes.
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : basis) w -= q.dot(w) * q;
        const double b = w.norm();
        out.steps = j + 1;

        const int k = j + 1;
        const bool exhausted = b <= 1e-13 * std::max(std::abs(alpha.front()), 1e-300);
        if (!(exhausted || k <= 30 || k % 5 == 0 || k == m)) {
            beta.push_back(b);
            basis.push_back(w / b);
            continue;
        }
        Vec diag = Eigen::Map<Vec>(alpha.data(), k);
        Vec sub = k > 1 ? Vec(Eigen::Map<Vec>(beta.data(), k - 1)) : Vec();
        double theta = diag(0);
        if (k == 1) {
            s = Vec::Ones(1);
        } else {
            Eigen::SelfAdjointEigenSolver<Mat> es;
            es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
            if (es.info() != Eigen::Success) throw NumericalError("tridiagonal eigensolve failed");
            theta = es.eigenvalues()(k - 1);
            s = es.eigenvectors().col(k - 1);
        }
        out.theta = theta;
        const double scale = std::max(std::abs(theta), 1e-300);
        const bool small_b = b <= 1e-13 * scale;
        const double est = b * std::abs(s(k - 1)) / scale;
        if (exhausted || small_b || est <= 0.1 * opts.tol || k == m) {
            Vec y = Vec::Zero(dim);
            for (int i = 0; i < k; ++i) y += s(i) * basis[i];
            y.normalize();
            const Vec ay = a.apply(y);
            const Vec r = a.apply_transpose(ay) - theta * y;
            out.ritz = y;
            out.residual = theta > 1e-300 ? r.norm() / theta : r.norm();
            out.converged = out.residual <= opts.tol || exhausted || small_b;
            if (out.converged || k == m) return out;
        }
        beta.push_back(b);
        basis.push_back(w / b);
    }
    return out;
}

} // namespace

NormReport spectral_norm(const LinearOp& a, const NormOptions& opts) {
    NormReport report;
    const std::size_t dim = a.dim();
    if (dim == 0) return report;
    if (dim <= opts.dense_threshold) {
        report.norm = dense_spectral_norm(a.to_dense());
        report.method = "dense-svd";
        return report;
    }
    Rng rng(opts.seed);
    Vec start(dim);
    for (std::size_t i = 0; i < dim; ++i) start(i) = rng.normal();
    report.method = "lanczos";
    CycleResult cyc;
    for (int attempt = 0; attempt <= opts.restarts; ++attempt) {
        cyc = lanczos_cycle(a, attempt == 0 ? start : cyc.ritz, opts);
        report.iterations += cyc.steps;
        if (cyc.converged) break;
    }
    report.norm = std::sqrt(std::max(cyc.theta, 0.0));
    report.residual = cyc.residual;
    if (!cyc.converged)
        throw NumericalError("spectral norm did not converge (estimate " + std::to_string(report.norm) +
                                 ", residual " + std::to_string(cyc.residual) + ")",
                             report.norm, cyc.residual);
    return report;
}

} // namespace sparselab
