#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ddv/data.hpp"
#include "ddv/lti.hpp"
#include "ddv/supply.hpp"
#include "ddv/verdict.hpp"
#include "ddv/verify_state.hpp"

namespace ddv {

// Lifted input-output data. Column j of Xi is the extended state
// xi_{l+j} = (u_j..u_{j+l-1}; y_j..y_{j+l-1}); Xip holds xi_{l+j+1};
// Uxi/Yxi hold u_{l+j} / y_{l+j}. All have N - l columns.
struct ExtendedData {
  Matrix Xi;
  Matrix Xip;
  Matrix Uxi;
  Matrix Yxi;
  int l = 0;

  int m() const { return static_cast<int>(Uxi.rows()); }
  int p() const { return static_cast<int>(Yxi.rows()); }
  int nxi() const { return static_cast<int>(Xi.rows()); }
  int width() const { return static_cast<int>(Xi.cols()); }
};

// Extended realization on the state xi_k = (u_{k-l}..u_{k-1}; y_{k-l}..y_{k-1}).
// All rows of Atilde/Btilde except the last p are a fixed shift pattern (A1,
// B1); the last block row (A2, Dtilde) carries the difference-operator
// coefficients. T reconstructs the window-start state: T xi_k = x_{k-l}.
struct ExtendedSystem {
  Matrix Atilde;
  Matrix Btilde;
  Matrix Ctilde;  // equals A2
  Matrix Dtilde;
  Matrix A1;  // (nxi - p) x nxi
  Matrix B1;  // (nxi - p) x m
  Matrix A2;  // p x nxi
  Matrix T;   // n x nxi
  int l = 0;

  int nxi() const { return static_cast<int>(Atilde.rows()); }
  int m() const { return static_cast<int>(Btilde.cols()); }
  int p() const { return static_cast<int>(Ctilde.rows()); }

  LtiSystem as_lti() const { return {Atilde, Btilde, Ctilde, Dtilde}; }

  // Difference-operator coefficients, i = 1..l:
  // y_k = -a_l y_{k-1} - ... - a_1 y_{k-l} + d u_k + b_l u_{k-1} + ... + b_1 u_{k-l}
  Matrix a_coeff(int i) const;  // p x p
  Matrix b_coeff(int i) const;  // p x m
};

// Requires outputs and N > l.
ExtendedData build_extended_data(const Trajectory& t, int l);

// Appendix construction: Toeplitz impulse-response matrix, left inverse of the
// observability matrix, shift-structured Atilde/Btilde. Requires l >= lag(sys).
ExtendedSystem build_extended_system(const LtiSystem& sys, int l);

// Assembles the fixed shift-structure rows (A1, B1) for given dimensions l, m,
// p without a model; these rows are known a priori in the lifted coordinates.
std::pair<Matrix, Matrix> extended_shift_structure(int l, int m, int p);

// Realization from sampled last-row pairs on the fixed shift structure.
LtiSystem extended_realization(const Matrix& A1, const Matrix& B1,
                               const Matrix& A2, const Matrix& Dt);

// Runs the lifted recursion with output noise v (p' x N columns, scaled by
// bv): y_k = A2 xi_k + Dtilde u_k + bv v_k, window shifted with the measured
// output. Starts from the zero window. Returns an input-output trajectory.
Trajectory simulate_extended_noisy(const ExtendedSystem& es, const Matrix& u,
                                   const Matrix& v, const Matrix& bv);
Trajectory simulate_extended_noisy(const ExtendedSystem& es, const Matrix& u,
                                   const Matrix& v);  // bv = I_p

// Noise-free input-output verifier. The excitation order needed for the
// necessity direction cannot be checked without knowing n, so the caller
// asserts it: feasible + pe_order_checked => Dissipative; feasible without
// the assertion => Inconclusive; infeasible => NotDissipative (no excitation
// needed for that direction); solver inaccuracy => Unknown.
Verdict verify_io_noisefree(const ExtendedData& ed, const SupplyRate& Pi,
                            bool pe_order_checked, const VerifyConfig& cfg = {});

// Norm-ball output-noise bound over the N - l used samples:
// Qv = -I_{N-l}, Sv = 0, Rv = vbar^2 (N-l) I_{m_v}.
NoiseBoundQuadratic io_noise_set(double vbar, int N, int l, int m_v);

// Consistency set over the unknown last-row pair (A2, Dtilde). The overload
// without bv uses the identity output-noise channel (m_v = p).
QuadraticMatrixSet sigma_uy_quadratic(const ExtendedData& ed,
                                      const NoiseBoundQuadratic& nb);
QuadraticMatrixSet sigma_uy_quadratic(const ExtendedData& ed,
                                      const NoiseBoundQuadratic& nb,
                                      const Matrix& bv);

// Robust input-output LMI in (P packed, tau, scalar), on the lifted state.
SdpProblem assemble_robust_io_lmi(const QuadraticMatrixSet& set,
                                  const Matrix& A1, const Matrix& B1,
                                  const InverseSupplyParam& inv,
                                  const VerifyConfig& cfg = {});

Verdict verify_io_robust(const QuadraticMatrixSet& set, const Matrix& A1,
                         const Matrix& B1, const SupplyRate& Pi,
                         const VerifyConfig& cfg = {});

Verdict optimize_gain_io_robust(const QuadraticMatrixSet& set, const Matrix& A1,
                                const Matrix& B1, const VerifyConfig& cfg = {});

Verdict optimize_passivity_io_robust(const QuadraticMatrixSet& set,
                                     const Matrix& A1, const Matrix& B1,
                                     const VerifyConfig& cfg = {});

// Consistent last-row pairs (A2, Dtilde), mirroring sample_consistent_systems.
std::vector<std::pair<Matrix, Matrix>> sample_consistent_io_systems(
    const QuadraticMatrixSet& set, const ExtendedData& ed,
    const NoiseBoundQuadratic& nb, const Matrix& bv, int count,
    std::uint64_t seed);

}  // namespace ddv
