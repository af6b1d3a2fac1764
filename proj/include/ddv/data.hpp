#pragma once

#include "ddv/numerics.hpp"

namespace ddv {

// One measured trajectory. Columns are time steps: u has N columns, x (when
// present) N+1 columns x_0..x_N, y (when present) N columns. Empty matrices
// mark absent signals; at least one of x, y must be present for the verifiers.
struct Trajectory {
  Matrix u;
  Matrix x;
  Matrix y;
  double sample_period = 0.0;  // metadata only

  int N() const { return static_cast<int>(u.cols()); }
  bool has_states() const { return x.size() > 0; }
  bool has_outputs() const { return y.size() > 0; }
};

// X columns are x_0..x_{N-1}, Xp columns x_1..x_N, U columns u_0..u_{N-1}.
struct StateDataMatrices {
  Matrix X;
  Matrix Xp;
  Matrix U;
  Matrix Y;  // optional, 0x0 when outputs were not measured

  int n() const { return static_cast<int>(X.rows()); }
  int m() const { return static_cast<int>(U.rows()); }
  int N() const { return static_cast<int>(X.cols()); }
};

enum class NoiseTarget { ProcessState, ProcessOutput };

// Quadratic noise bound: the admitted stacked-noise matrices are
//   { W : W Qn W^T + W Sn + Sn^T W^T + Rn >= 0 },
// with Qn: span x span (negative definite), Sn: span x width,
// Rn: width x width. W is width x span (one column per time step).
struct NoiseBoundQuadratic {
  Matrix Qn;
  Matrix Sn;
  Matrix Rn;
  NoiseTarget target = NoiseTarget::ProcessState;

  // validates symmetry, dimensions, and Qn < 0
  NoiseBoundQuadratic(Matrix Qn_, Matrix Sn_, Matrix Rn_, NoiseTarget t);

  int span() const { return static_cast<int>(Qn.rows()); }
  int width() const { return static_cast<int>(Rn.rows()); }
};

// Block Hankel matrix of depth L: block (i,j) = u column i+j,
// size (m L) x (N - L + 1). Requires L >= 1 and N >= L.
Matrix hankel(const Matrix& u, int L);

// True iff the depth-L Hankel matrix has full row rank m L. Returns false
// without forming the Hankel matrix when the width N - L + 1 is already too
// small (the minimum-length gate).
bool is_persistently_exciting(const Matrix& u, int L);

// rank(X; U) == n + m
bool check_rank_condition(const StateDataMatrices& d);

// rank(X; U) as achieved, for diagnostics.
int achieved_stack_rank(const StateDataMatrices& d);

// Requires states; splits x into X, Xp and copies U (and Y when present).
StateDataMatrices build_state_data(const Trajectory& t);

// Aggregate norm-ball bound: Qn = -I_span, Sn = 0, Rn = wbar^2 span I_width,
// i.e. the admitted set is { W : W W^T <= wbar^2 span I }.
NoiseBoundQuadratic norm_bound_noise_set(double wbar, int span, int width,
                                         NoiseTarget target = NoiseTarget::ProcessState);

// The width x width matrix W Qn W^T + W Sn + Sn^T W^T + Rn.
Matrix membership_form(const NoiseBoundQuadratic& nb, const Matrix& W);

// PSD test of membership_form under the shared definiteness tolerance.
bool membership(const NoiseBoundQuadratic& nb, const Matrix& W);

}  // namespace ddv
