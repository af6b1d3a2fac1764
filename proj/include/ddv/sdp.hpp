#pragma once

#include <limits>
#include <string>
#include <vector>

#include "ddv/numerics.hpp"

namespace ddv {

enum class Strictness { NonStrict, Strict };

// One affine constraint F(x) = F0 + sum_i x_i * F_i >= 0 (in the semidefinite
// sense). Strict constraints are solved as F(x) >= eps * scale * I.
struct LmiConstraint {
  Matrix constant;             // F0
  std::vector<Matrix> coeffs;  // F_i, one per decision variable
  Strictness strictness = Strictness::NonStrict;
  std::string label;

  int dim() const { return static_cast<int>(constant.rows()); }
  Matrix evaluate(const Vector& x) const;
};

struct SdpProblem {
  int num_vars = 0;
  Vector objective;  // minimize objective . x; size 0 means pure feasibility
  std::vector<LmiConstraint> constraints;
  std::vector<std::string> var_names;

  bool is_feasibility() const { return objective.size() == 0; }
};

enum class SdpStatus { Optimal, Feasible, Infeasible, Inaccurate, Unbounded };

const char* to_string(SdpStatus s);

struct SdpSolution {
  SdpStatus status = SdpStatus::Inaccurate;
  Vector x;
  double objective = std::numeric_limits<double>::quiet_NaN();
  // min over constraints of lambda_min(F_j(x)), on the problem as stated
  double worst_margin = std::numeric_limits<double>::quiet_NaN();
  // phase-I optimum in scale-normalized units; sign decides feasibility
  double phase1_t = std::numeric_limits<double>::quiet_NaN();
  int newton_iterations = 0;
};

struct SolverConfig {
  double feas_tol = 1e-7;
  double strict_margin = 1e-6;  // scale-relative shift for strict blocks
  int max_iterations = 200;     // Newton iterations per centering stage
  double infeasibility_threshold = 1e-8;  // on the normalized phase-I optimum
  double objective_floor = -1e12;         // below this the problem is unbounded
  double duality_gap_tol = 1e-9;          // relative gap target for solve_min_linear
  // Box backstop on scaled variables. Kept modest so barrier blocks stay
  // well conditioned along the path; the solvers expand it automatically
  // when a returned point presses against it.
  double var_bound = 1e6;
};

struct MarginReport {
  std::vector<double> margins;  // lambda_min(F_j(x)) per constraint
  double worst = std::numeric_limits<double>::quiet_NaN();
};

// Phase-I decision: maximize t subject to F_j(x) - t I >= 0. Feasible when the
// achieved t clears the infeasibility threshold, infeasible when the certified
// upper bound on t falls below its negative, inaccurate in between.
SdpSolution solve_feasibility(const SdpProblem& p, const SolverConfig& cfg = {});

// Barrier path-following for minimize c.x over the constraint intersection.
SdpSolution solve_min_linear(const SdpProblem& p, const SolverConfig& cfg = {});

// Independent margin recomputation via sym_eig; used by the verifiers before
// emitting any certificate.
MarginReport verify_solution(const SdpProblem& p, const Vector& x);

// Symmetric matrix variable packed over its upper triangle. basis(k) returns
// the symmetric coefficient matrix of packed entry k, so that
// P = sum_k x[offset + k] * basis(k) stays symmetric for any x.
struct SymVariable {
  int dim = 0;
  int offset = 0;

  int count() const { return dim * (dim + 1) / 2; }
  Matrix basis(int k) const;
  Matrix unpack(const Vector& x) const;
  static Vector pack(const Matrix& P);  // inverse of unpack on symmetric P
};

}  // namespace ddv
