#pragma once

#include <Eigen/Dense>

namespace ddv {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct SymEig {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // orthonormal columns, same order
};

// Eigendecomposition of a symmetric matrix. The input is symmetrized as
// (M + M^T)/2 before factoring. Throws std::invalid_argument on non-square
// or non-finite input.
SymEig sym_eig(const Matrix& M);

// Number of singular values above rel_tol * sigma_max * max(rows, cols).
// The zero matrix has rank 0; an empty matrix is an error.
int rank_with_tol(const Matrix& M, double rel_tol = 1e-9);

// Right inverse M^T (M M^T)^{-1} of a full-row-rank matrix, so that
// M * right_pinv(M) = I. Throws std::invalid_argument when M is row-rank
// deficient.
Matrix right_pinv(const Matrix& M);

// Left inverse (M^T M)^{-1} M^T of a full-column-rank matrix.
Matrix left_pinv(const Matrix& M);

// Shared definiteness tolerance: 1e-8 * (1 + ||M||).
double definiteness_tol(const Matrix& M);

// Extreme eigenvalues of the symmetric part (M + M^T)/2.
double min_eigenvalue(const Matrix& M);
double max_eigenvalue(const Matrix& M);

bool is_psd(const Matrix& M);              // lambda_min >= -definiteness_tol(M)
bool is_psd(const Matrix& M, double tol);  // lambda_min >= -tol
bool is_negative_definite(const Matrix& M);  // lambda_max < -definiteness_tol(M)

}  // namespace ddv
