#pragma once

#include <cstdint>
#include <utility>

#include "ddv/data.hpp"
#include "ddv/sdp.hpp"
#include "ddv/supply.hpp"
#include "ddv/verdict.hpp"

namespace ddv {

// Discrete-time state-space realization x+ = A x + B u, y = C x + D u.
struct LtiSystem {
  Matrix A;
  Matrix B;
  Matrix C;
  Matrix D;

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
  int p() const { return static_cast<int>(C.rows()); }
};

// Blocks of the model-based dissipation LMI:
// Qhat = C^T Q C, Shat = C^T S + C^T Q D, Rhat = D^T Q D + D^T S + S^T D + R.
struct KypBlocks {
  Matrix Qhat;
  Matrix Shat;
  Matrix Rhat;
};

// Simulates N = u.cols() steps from x0; returns states x_0..x_N and outputs
// y_0..y_{N-1}. The noisy overload adds Bw * w_k to the state update.
Trajectory simulate(const LtiSystem& sys, const Matrix& u, const Vector& x0);
Trajectory simulate(const LtiSystem& sys, const Matrix& u, const Vector& x0,
                    const Matrix& w, const Matrix& Bw);

// Stacked (C; CA; ...; C A^{l-1}), size (p l) x n.
Matrix observability_matrix(const LtiSystem& sys, int l);

// Smallest l with rank(O_l) = n; throws std::invalid_argument when the
// realization is unobservable. Always <= n.
int lag(const LtiSystem& sys);

KypBlocks kyp_blocks(const LtiSystem& sys, const SupplyRate& Pi);

// Model-based dissipativity test: one LMI in the storage matrix P, with the
// chosen sign requirement on P. Feasible => Dissipative, infeasible =>
// NotDissipative, solver inaccuracy => Inconclusive.
Verdict model_dissipativity_check(const LtiSystem& sys, const SupplyRate& Pi,
                                  StorageMode mode = StorageMode::Psd,
                                  const SolverConfig& cfg = {});

// Peak of sigma_max(C (e^{iw} I - A)^{-1} B + D) over the frequency grid,
// with golden-section refinement around the top grid maxima. Requires a
// Schur-stable A. `parallel` selects the OpenMP grid sweep; the serial path
// is the reference implementation and produces identical results.
double hinf_oracle(const LtiSystem& sys, int grid_size = 2048,
                   bool refine = true, bool parallel = true);

// Min over the grid of lambda_min((G + G^*)/2); square systems only.
double passivity_oracle(const LtiSystem& sys, int grid_size = 2048,
                        bool refine = true, bool parallel = true);

// Minimal Schur-stable realization with spectral radius < 1 - stability_margin,
// deterministic per seed. Regenerates on minimality failure (bounded retries).
LtiSystem random_system(int n, int m, int p, double stability_margin = 0.1,
                        std::uint64_t seed = 0);

// Least-squares fit (A B) = Xp * right_pinv(X; U); throws when (X; U) is
// row-rank deficient.
std::pair<Matrix, Matrix> ls_identify(const Matrix& X, const Matrix& Xp,
                                      const Matrix& U);

// Bisection of the model LMI over the gain/passivity parameter; used to
// cross-check the frequency-domain oracles.
double gain_from_model_lmi(const LtiSystem& sys, double rel_tol = 1e-6,
                           const SolverConfig& cfg = {});
double passivity_from_model_lmi(const LtiSystem& sys, double rel_tol = 1e-6,
                                const SolverConfig& cfg = {});

}  // namespace ddv
