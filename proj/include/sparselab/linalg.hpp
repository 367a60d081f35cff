#pragma once

#include <Eigen/Dense>

namespace sparselab {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using MatView = Eigen::Map<const Mat>;

/// Symmetric square root with eigenvalues clamped below at `floor`.
Mat psd_sqrt(const Mat& a, double floor);
/// Inverse symmetric square root with eigenvalues clamped below at `floor`.
Mat psd_inv_sqrt(const Mat& a, double floor);
/// exp of a symmetric matrix.
Mat sym_exp(const Mat& a);

/// Largest eigenvalue of a symmetric matrix; throws NumericalError on failure.
double lambda_max_sym(const Mat& a);
double lambda_min_sym(const Mat& a);

/// ||A^{1/2} B^{1/2}||^2 = lambda_max(A^{1/2} B A^{1/2}) for SPD A, B.
double product_norm_sq(const Mat& a, const Mat& b, double floor);

/// Largest singular value via a dense SVD; the test oracle for norm estimates.
double dense_spectral_norm(const Mat& a);

} // namespace sparselab
