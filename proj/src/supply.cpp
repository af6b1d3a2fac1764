#include "ddv/supply.hpp"

#include <Eigen/LU>
#include <stdexcept>
#include <utility>

#include "ddv/numerics.hpp"

namespace ddv {

Matrix SupplyRate::full() const {
  const int mm = m(), pp = p();
  Matrix F(mm + pp, mm + pp);
  F.topLeftCorner(mm, mm) = R;
  F.topRightCorner(mm, pp) = S.transpose();
  F.bottomLeftCorner(pp, mm) = S;
  F.bottomRightCorner(pp, pp) = Q;
  return F;
}

Matrix InverseSupplyRate::full() const {
  const int mm = m(), pp = p();
  Matrix F(mm + pp, mm + pp);
  F.topLeftCorner(mm, mm) = Rt;
  F.topRightCorner(mm, pp) = St.transpose();
  F.bottomLeftCorner(pp, mm) = St;
  F.bottomRightCorner(pp, pp) = Qt;
  return F;
}

SupplyRate gain_supply(double gamma, int m, int p) {
  if (gamma <= 0.0)
    throw std::invalid_argument("gain_supply: gamma must be positive");
  if (m <= 0 || p <= 0)
    throw std::invalid_argument("gain_supply: dimensions must be positive");
  SupplyRate s;
  s.Q = -Matrix::Identity(p, p);
  s.S = Matrix::Zero(p, m);
  s.R = gamma * gamma * Matrix::Identity(m, m);
  return s;
}

SupplyRate passivity_supply(double rho, int m) {
  if (m <= 0)
    throw std::invalid_argument("passivity_supply: dimension must be positive");
  SupplyRate s;
  s.Q = Matrix::Zero(m, m);
  s.S = 0.5 * Matrix::Identity(m, m);
  s.R = -rho * Matrix::Identity(m, m);
  return s;
}

SupplyRate custom_supply(Matrix Q, Matrix S, Matrix R) {
  if (Q.rows() != Q.cols() || R.rows() != R.cols())
    throw std::invalid_argument("custom_supply: Q and R must be square");
  if (S.rows() != Q.rows() || S.cols() != R.rows())
    throw std::invalid_argument("custom_supply: S has inconsistent dimensions");
  double scale = 1.0 + Q.norm() + R.norm();
  if ((Q - Q.transpose()).norm() > 1e-10 * scale)
    throw std::invalid_argument("custom_supply: Q must be symmetric");
  if ((R - R.transpose()).norm() > 1e-10 * scale)
    throw std::invalid_argument("custom_supply: R must be symmetric");
  SupplyRate s;
  s.Q = 0.5 * (Q + Q.transpose()).eval();
  s.S = std::move(S);
  s.R = 0.5 * (R + R.transpose()).eval();
  return s;
}

double evaluate(const SupplyRate& s, const Vector& u, const Vector& y) {
  if (u.size() != s.m() || y.size() != s.p())
    throw std::invalid_argument("evaluate: argument dimensions do not match the supply rate");
  Vector z(u.size() + y.size());
  z << u, y;
  return z.dot(s.full() * z);
}

InverseSupplyRate invert(const SupplyRate& s, double cond_cap) {
  Matrix Pi = s.full();
  const int d = static_cast<int>(Pi.rows());
  Eigen::FullPivLU<Matrix> lu(Pi);
  lu.setThreshold(1.0 / cond_cap);
  if (!lu.isInvertible())
    throw std::invalid_argument("invert: supply rate matrix is singular or too ill conditioned");
  Matrix inv = lu.inverse();
  inv = (0.5 * (inv + inv.transpose())).eval();
  const int mm = s.m(), pp = s.p();
  InverseSupplyRate r;
  r.Rt = inv.topLeftCorner(mm, mm);
  r.St = inv.bottomLeftCorner(pp, mm);
  r.Qt = inv.bottomRightCorner(pp, pp);
  (void)d;
  return r;
}

SupplyRate as_supply(const InverseSupplyRate& inv) {
  SupplyRate s;
  s.Q = inv.Qt;
  s.S = inv.St;
  s.R = inv.Rt;
  return s;
}

}  // namespace ddv
