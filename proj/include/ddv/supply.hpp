#pragma once

#include "ddv/numerics.hpp"

namespace ddv {

// Quadratic supply rate s(u,y) = (u;y)^T Pi (u;y) with
// Pi = [[R, S^T], [S, Q]], Q: p x p, S: p x m, R: m x m.
struct SupplyRate {
  Matrix Q;
  Matrix S;
  Matrix R;

  int m() const { return static_cast<int>(R.rows()); }
  int p() const { return static_cast<int>(Q.rows()); }
  Matrix full() const;  // the (m+p) x (m+p) matrix Pi
};

// Partitioned inverse of Pi: [[Rt, St^T], [St, Qt]] = Pi^{-1}.
struct InverseSupplyRate {
  Matrix Qt;
  Matrix St;
  Matrix Rt;

  int m() const { return static_cast<int>(Rt.rows()); }
  int p() const { return static_cast<int>(Qt.rows()); }
  Matrix full() const;
};

// Gain template: Pi = diag(gamma^2 I_m, -I_p). Requires gamma > 0.
SupplyRate gain_supply(double gamma, int m, int p);

// Input-feedforward passivity template (square channel):
// Pi = [[-rho I, 0.5 I], [0.5 I, 0]].
SupplyRate passivity_supply(double rho, int m);

// Validates symmetry of Q and R and cross dimensions.
SupplyRate custom_supply(Matrix Q, Matrix S, Matrix R);

double evaluate(const SupplyRate& s, const Vector& u, const Vector& y);

// Inverts Pi and re-partitions. Throws std::invalid_argument when the
// condition number exceeds cond_cap, naming the offending supply.
InverseSupplyRate invert(const SupplyRate& s, double cond_cap = 1e12);

// Reinterpret an inverse partition as a supply rate (Rt->R, St->S, Qt->Q);
// inverting twice recovers the original.
SupplyRate as_supply(const InverseSupplyRate& si);

}  // namespace ddv
