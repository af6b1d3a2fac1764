#pragma once

// Random LMI feasibility problems with certified status, used by the solver
// unit tests and the acceptance suite.

#include <random>

#include "ddv/sdp.hpp"

namespace sdp_testing {

inline ddv::Matrix random_sym(std::mt19937_64& rng, int d, double scale = 1.0) {
  std::uniform_real_distribution<double> U(-scale, scale);
  ddv::Matrix M(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) M(i, j) = U(rng);
  return ((M + M.transpose()) / 2).eval();
}

// Strictly feasible by construction: F_j(x*) = G_j G_j^T + 0.1 I.
inline std::pair<ddv::SdpProblem, ddv::Vector> make_feasible_problem(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dims(1, 6), nvars(1, 6), nblocks(1, 3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  int K = nvars(rng), J = nblocks(rng);
  ddv::Vector xstar(K);
  for (int i = 0; i < K; ++i) xstar(i) = U(rng);

  ddv::SdpProblem p;
  p.num_vars = K;
  for (int j = 0; j < J; ++j) {
    int d = dims(rng);
    ddv::LmiConstraint c;
    c.coeffs.resize(K);
    ddv::Matrix at_xstar = ddv::Matrix::Zero(d, d);
    for (int i = 0; i < K; ++i) {
      c.coeffs[i] = random_sym(rng, d);
      at_xstar += xstar(i) * c.coeffs[i];
    }
    ddv::Matrix G(d, d);
    for (int r = 0; r < d; ++r)
      for (int cc = 0; cc < d; ++cc) G(r, cc) = U(rng);
    ddv::Matrix target = G * G.transpose() + 0.1 * ddv::Matrix::Identity(d, d);
    c.constant = target - at_xstar;
    p.constraints.push_back(std::move(c));
  }
  return {p, xstar};
}

// Infeasible with a Farkas-style certificate: PSD multipliers Z_j satisfying
// sum_j <Z_j, F_ji> = 0 for all i and sum_j <Z_j, F_j0> = -1, so any x with
// all F_j(x) >= 0 would contradict the negative total inner product.
inline ddv::SdpProblem make_infeasible_problem(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dims(1, 6), nvars(1, 6), nblocks(1, 3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  int K = nvars(rng), J = nblocks(rng);

  std::vector<ddv::Matrix> Z(J);
  std::vector<int> d(J);
  for (int j = 0; j < J; ++j) {
    d[j] = dims(rng);
    ddv::Matrix G(d[j], d[j]);
    for (int r = 0; r < d[j]; ++r)
      for (int cc = 0; cc < d[j]; ++cc) G(r, cc) = U(rng);
    Z[j] = G * G.transpose() + 0.01 * ddv::Matrix::Identity(d[j], d[j]);
    Z[j] /= Z[j].trace();
  }

  ddv::SdpProblem p;
  p.num_vars = K;
  p.constraints.resize(J);
  for (int j = 0; j < J; ++j) {
    p.constraints[j].coeffs.resize(K);
    for (int i = 0; i < K; ++i) p.constraints[j].coeffs[i] = random_sym(rng, d[j]);
    p.constraints[j].constant = random_sym(rng, d[j]);
  }
  // adjust the last block so the multiplier identities hold exactly
  int last = J - 1;
  double zz = (Z[last].array() * Z[last].array()).sum();
  for (int i = 0; i < K; ++i) {
    double s = 0;
    for (int j = 0; j + 1 < J; ++j)
      s += (Z[j].array() * p.constraints[j].coeffs[i].array()).sum();
    double t = (Z[last].array() * p.constraints[last].coeffs[i].array()).sum();
    p.constraints[last].coeffs[i] -= ((t + s) / zz) * Z[last];
  }
  double s0 = 0;
  for (int j = 0; j + 1 < J; ++j)
    s0 += (Z[j].array() * p.constraints[j].constant.array()).sum();
  double t0 = (Z[last].array() * p.constraints[last].constant.array()).sum();
  p.constraints[last].constant -= ((t0 + s0 + 1.0) / zz) * Z[last];
  return p;
}

}  // namespace sdp_testing
