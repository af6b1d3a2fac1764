#include "ddv/data.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace ddv {

NoiseBoundQuadratic::NoiseBoundQuadratic(Matrix Qn_, Matrix Sn_, Matrix Rn_,
                                         NoiseTarget t)
    : Qn(std::move(Qn_)), Sn(std::move(Sn_)), Rn(std::move(Rn_)), target(t) {
  if (Qn.size() == 0 || Rn.size() == 0)
    throw std::invalid_argument("noise bound: empty blocks");
  if (Qn.rows() != Qn.cols() || Rn.rows() != Rn.cols())
    throw std::invalid_argument("noise bound: Qn and Rn must be square");
  if (Sn.rows() != Qn.rows() || Sn.cols() != Rn.rows())
    throw std::invalid_argument("noise bound: Sn must be span x width");
  double scale = 1.0 + Qn.norm() + Rn.norm();
  if ((Qn - Qn.transpose()).norm() > 1e-10 * scale ||
      (Rn - Rn.transpose()).norm() > 1e-10 * scale)
    throw std::invalid_argument("noise bound: Qn and Rn must be symmetric");
  if (!is_negative_definite(Qn))
    throw std::invalid_argument("noise bound: Qn must be negative definite");
}

Matrix hankel(const Matrix& u, int L) {
  const int m = static_cast<int>(u.rows());
  const int N = static_cast<int>(u.cols());
  if (L < 1) throw std::invalid_argument("hankel: depth must be at least 1");
  if (N < L) throw std::invalid_argument("hankel: depth exceeds the signal length");
  Matrix H(m * L, N - L + 1);
  for (int i = 0; i < L; ++i) H.middleRows(i * m, m) = u.middleCols(i, N - L + 1);
  return H;
}

bool is_persistently_exciting(const Matrix& u, int L) {
  if (L < 1 || u.size() == 0) return false;
  const int m = static_cast<int>(u.rows());
  const int N = static_cast<int>(u.cols());
  // minimum-length gate; also covers N < L, where no Hankel matrix exists
  if (N - L + 1 < m * L) return false;
  return rank_with_tol(hankel(u, L)) == m * L;
}

int achieved_stack_rank(const StateDataMatrices& d) {
  if (d.N() == 0) return 0;
  Matrix S(d.n() + d.m(), d.N());
  S.topRows(d.n()) = d.X;
  S.bottomRows(d.m()) = d.U;
  return rank_with_tol(S);
}

bool check_rank_condition(const StateDataMatrices& d) {
  if (d.N() < d.n() + d.m()) return false;
  return achieved_stack_rank(d) == d.n() + d.m();
}

StateDataMatrices build_state_data(const Trajectory& t) {
  if (!t.has_states())
    throw std::invalid_argument("build_state_data: trajectory has no state samples");
  const int N = t.N();
  if (N < 1) throw std::invalid_argument("build_state_data: empty input signal");
  if (t.x.cols() != N + 1)
    throw std::invalid_argument("build_state_data: x must hold N + 1 samples");
  StateDataMatrices d;
  d.X = t.x.leftCols(N);
  d.Xp = t.x.rightCols(N);
  d.U = t.u;
  if (t.has_outputs()) d.Y = t.y;
  return d;
}

NoiseBoundQuadratic norm_bound_noise_set(double wbar, int span, int width,
                                         NoiseTarget target) {
  if (wbar < 0.0)
    throw std::invalid_argument("norm_bound_noise_set: negative bound");
  if (span < 1 || width < 1)
    throw std::invalid_argument("norm_bound_noise_set: empty dimensions");
  return NoiseBoundQuadratic(-Matrix::Identity(span, span),
                             Matrix::Zero(span, width),
                             wbar * wbar * span * Matrix::Identity(width, width),
                             target);
}

Matrix membership_form(const NoiseBoundQuadratic& nb, const Matrix& W) {
  if (W.rows() != nb.width() || W.cols() != nb.span())
    throw std::invalid_argument("membership_form: W must be width x span");
  Matrix M = W * nb.Qn * W.transpose() + W * nb.Sn + nb.Sn.transpose() * W.transpose() + nb.Rn;
  return 0.5 * (M + M.transpose());
}

bool membership(const NoiseBoundQuadratic& nb, const Matrix& W) {
  return is_psd(membership_form(nb, W));
}

}  // namespace ddv
