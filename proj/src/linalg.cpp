#include "sparselab/linalg.hpp"

#include "sparselab/errors.hpp"

#include <algorithm>
#include <cmath>

namespace sparselab {

namespace {

Eigen::SelfAdjointEigenSolver<Mat> solve(const Mat& a) {
    Eigen::SelfAdjointEigenSolver<Mat> es(a);
    if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
    return es;
}

template <class F>
Mat spectral_map(const Mat& a, F f) {
    if (a.rows() == 1) return Mat::Constant(1, 1, f(a(0, 0)));
    const auto es = solve(a);
    const Vec mapped = es.eigenvalues().unaryExpr(f);
    return es.eigenvectors() * mapped.asDiagonal() * es.eigenvectors().transpose();
}

} // namespace

Mat psd_sqrt(const Mat& a, double floor) {
    return spectral_map(a, [floor](double x) { return std::sqrt(std::max(x, floor)); });
}

Mat psd_inv_sqrt(const Mat& a, double floor) {
    return spectral_map(a, [floor](double x) { return 1.0 / std::sqrt(std::max(x, floor)); });
}

Mat sym_exp(const Mat& a) {
    return spectral_map(a, [](double x) { return std::exp(x); });
}

double lambda_max_sym(const Mat& a) {
    if (a.rows() == 1) return a(0, 0);
    return solve(a).eigenvalues().maxCoeff();
}

double lambda_min_sym(const Mat& a) {
    if (a.rows() == 1) return a(0, 0);
    return solve(a).eigenvalues().minCoeff();
}

double product_norm_sq(const Mat& a, const Mat& b, double floor) {
    if (a.rows() == 1) return a(0, 0) * b(0, 0);
    const Mat s = psd_sqrt(a, floor);
    const Mat m = s * b * s;
    return lambda_max_sym(0.5 * (m + m.transpose()));
}

double dense_spectral_norm(const Mat& a) {
    if (a.size() == 0) return 0.0;
    // BDCSVD in Eigen 3.4 can fail on matrices with clustered singular values.
    if (a.rows() <= 64 && a.cols() <= 64) return Eigen::JacobiSVD<Mat>(a).singularValues()(0);
    const Mat g = a.rows() >= a.cols() ? Mat(a.transpose() * a) : Mat(a * a.transpose());
    return std::sqrt(std::max(0.0, lambda_max_sym(g)));
}

} // namespace sparselab
