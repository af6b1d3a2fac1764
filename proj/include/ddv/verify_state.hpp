#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ddv/data.hpp"
#include "ddv/sdp.hpp"
#include "ddv/supply.hpp"
#include "ddv/verdict.hpp"

namespace ddv {

// Quadratic description of the set of system matrices consistent with the
// measured data under a noise bound:
//   { J : J Qbar J^T + J Sbar + Sbar^T J^T + Rbar >= 0 },
// where J = (A_d B_d) for state data (rows = n) or J = (A2 D) rows for the
// input-output lifting (rows = p).
struct QuadraticMatrixSet {
  Matrix Qbar;  // cols(J) x cols(J), <= 0 for any admissible noise bound
  Matrix Sbar;  // cols(J) x rows(J)
  Matrix Rbar;  // rows(J) x rows(J)

  int rows() const { return static_cast<int>(Rbar.rows()); }
  int cols() const { return static_cast<int>(Qbar.rows()); }

  Matrix membership_form(const Matrix& J) const;
  bool contains(const Matrix& J) const;
  bool contains(const Matrix& J, double tol) const;
};

struct VerifyConfig {
  SolverConfig solver;
  StorageMode storage = StorageMode::Psd;  // P requirement of the noise-free LMIs
  bool enforce_inverse_sign = false;  // error instead of note on Rt sign violation
  double tau_floor = 1e-10;           // tau > 0 realized as tau >= tau_floor
  double mu_floor = 1e-10;  // mu* below this reports "no gain certifiable"
  bool compress_data_lmi = true;  // congruence-compress the N x N data LMIs
};

// Noise-free input-state verifier. Feasibility of the data LMI plus the rank
// condition decides: feasible + rank => Dissipative with certificate P;
// infeasible => NotDissipative; feasible without rank => Inconclusive (with
// achieved/required rank attached); solver inaccuracy => Unknown.
Verdict verify_noisefree(const StateDataMatrices& d, const Matrix& C,
                         const Matrix& D, const SupplyRate& Pi,
                         const VerifyConfig& cfg = {});

// (Qbar, Sbar, Rbar) of the data-consistency set for state data. The overload
// without Bw uses the identity noise channel.
QuadraticMatrixSet sigma_xu_quadratic(const StateDataMatrices& d,
                                      const NoiseBoundQuadratic& nb);
QuadraticMatrixSet sigma_xu_quadratic(const StateDataMatrices& d,
                                      const NoiseBoundQuadratic& nb,
                                      const Matrix& Bw);

// Inverse supply partition, optionally affine in one scalar decision variable
// (mu = 1/gamma^2 for gain, rho for passivity): value(s) = constant + s*linear.
struct InverseSupplyParam {
  InverseSupplyRate constant;
  InverseSupplyRate linear;
  bool has_scalar = false;

  static InverseSupplyParam fixed(const InverseSupplyRate& inv);
  static InverseSupplyParam gain_mu(int m, int p);   // Rt = mu I, St = 0, Qt = -I
  static InverseSupplyParam passivity_rho(int m);    // Rt = 0, St = 2I, Qt = 4 rho I
};

// Assembles the robust state-data LMI as one SDP in (P packed, tau, scalar).
// The main block is strict; P > 0 and tau >= tau_floor are separate blocks.
SdpProblem assemble_robust_lmi(const QuadraticMatrixSet& set, const Matrix& C,
                               const Matrix& D, const InverseSupplyParam& inv,
                               const VerifyConfig& cfg = {});

// Robust verifier at a fixed supply rate. Feasible => Dissipative (every
// consistent system is dissipative), otherwise Unknown; the underlying
// theorem is sufficient only, so infeasibility never yields NotDissipative.
Verdict verify_robust(const QuadraticMatrixSet& set, const Matrix& C,
                      const Matrix& D, const SupplyRate& Pi,
                      const VerifyConfig& cfg = {});

// Single-SDP gain optimization over mu = 1/gamma^2; certificate carries
// gamma-hat in `performance`. gamma-hat upper-bounds the gain of every
// consistent system.
Verdict optimize_gain_robust(const QuadraticMatrixSet& set, const Matrix& C,
                             const Matrix& D, const VerifyConfig& cfg = {});

// Passivity-index maximization; rho-hat lower-bounds the index of every
// consistent system.
Verdict optimize_passivity_robust(const QuadraticMatrixSet& set,
                                  const Matrix& C, const Matrix& D,
                                  const VerifyConfig& cfg = {});

// Draws consistent pairs (A_d, B_d): noise proposals are rejection-tested
// against the bound, solved in least squares, and every returned pair is
// asserted to satisfy the membership form. Interleaves boundary-directed
// samples for coverage of the consistency set.
std::vector<std::pair<Matrix, Matrix>> sample_consistent_systems(
    const QuadraticMatrixSet& set, const StateDataMatrices& d,
    const NoiseBoundQuadratic& nb, const Matrix& Bw, int count,
    std::uint64_t seed);

}  // namespace ddv
