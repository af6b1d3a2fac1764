#include "ddv/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <stdexcept>

namespace ddv {

SymEig sym_eig(const Matrix& M) {
  if (M.rows() != M.cols())
    throw std::invalid_argument("sym_eig: matrix must be square");
  if (!M.allFinite())
    throw std::invalid_argument("sym_eig: matrix has non-finite entries");
  Matrix sym = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("sym_eig: eigensolver failed to converge");
  return SymEig{es.eigenvalues(), es.eigenvectors()};
}

int rank_with_tol(const Matrix& M, double rel_tol) {
  if (M.size() == 0)
    throw std::invalid_argument("rank_with_tol: empty matrix");
  Eigen::JacobiSVD<Matrix> svd(M);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  double cutoff = rel_tol * sv(0);
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++r;
  return r;
}

Matrix right_pinv(const Matrix& M) {
  if (M.rows() > M.cols())
    throw std::invalid_argument("right_pinv: more rows than columns");
  if (rank_with_tol(M) < M.rows())
    throw std::invalid_argument("right_pinv: matrix is row rank deficient");
  // M^T (M M^T)^{-1}, computed stably through a complete orthogonal decomposition
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(M);
  return cod.pseudoInverse();
}

Matrix left_pinv(const Matrix& M) {
  if (M.cols() > M.rows())
    throw std::invalid_argument("left_pinv: more columns than rows");
  if (rank_with_tol(M) < M.cols())
    throw std::invalid_argument("left_pinv: matrix is column rank deficient");
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(M);
  return cod.pseudoInverse();
}

double definiteness_tol(const Matrix& M) {
  return 1e-8 * (1.0 + M.norm());
}

double min_eigenvalue(const Matrix& M) {
  return sym_eig(M).eigenvalues.minCoeff();
}

double max_eigenvalue(const Matrix& M) {
  return sym_eig(M).eigenvalues.maxCoeff();
}

bool is_psd(const Matrix& M, double tol) {
  return min_eigenvalue(M) >= -tol;
}

bool is_psd(const Matrix& M) { return is_psd(M, definiteness_tol(M)); }

bool is_negative_definite(const Matrix& M) {
  return max_eigenvalue(M) < -definiteness_tol(M);
}

}  // namespace ddv
