#include "ddv/sdp.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ddv {

Matrix LmiConstraint::evaluate(const Vector& x) const {
  if (x.size() != static_cast<Eigen::Index>(coeffs.size()))
    throw std::invalid_argument("LmiConstraint::evaluate: variable count mismatch");
  Matrix M = constant;
  for (int i = 0; i < static_cast<int>(coeffs.size()); ++i) M += x(i) * coeffs[i];
  return M;
}

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::Feasible: return "feasible";
    case SdpStatus::Infeasible: return "infeasible";
    case SdpStatus::Inaccurate: return "inaccurate";
    case SdpStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTargetCap = 10.0;  // cap on the phase-I margin variable
constexpr double kMuFactor = 0.2;
constexpr double kMuMin = 1e-11;
constexpr double kCenterTol = 1e-9;  // on half the squared Newton decrement

// Problem in solver-internal units: every block scale-normalized, every
// variable rescaled so its coefficient matrices have unit peak entry, strict
// shifts folded into the constants. All blocks are >= 0; a symmetric box
// backstop |z_i| <= bound_i keeps the barrier problem bounded.
struct Internal {
  std::vector<Matrix> F0;
  std::vector<std::vector<Matrix>> Fi;  // [block][variable]
  std::vector<std::vector<int>> active; // variables with a nonzero coefficient
  Vector bound;
  int K = 0;

  int blocks() const { return static_cast<int>(F0.size()); }
};

struct PointEval {
  std::vector<Eigen::LLT<Matrix>> llt;
  double barrier = 0.0;
  bool ok = false;
};

PointEval eval_point(const Internal& P, const Vector& z) {
  PointEval e;
  double phi = 0.0;
  for (int i = 0; i < P.K; ++i) {
    double lo = P.bound(i) + z(i), hi = P.bound(i) - z(i);
    if (!(lo > 0.0) || !(hi > 0.0)) return e;
    phi -= std::log(lo) + std::log(hi);
  }
  e.llt.reserve(P.F0.size());
  for (int j = 0; j < P.blocks(); ++j) {
    Matrix S = P.F0[j];
    for (int i : P.active[j]) S += z(i) * P.Fi[j][i];
    Eigen::LLT<Matrix> llt(S);
    if (llt.info() != Eigen::Success) return e;
    double ld = 0.0;
    for (int r = 0; r < S.rows(); ++r) {
      double d = llt.matrixLLT()(r, r);
      if (!(d > 0.0) || !std::isfinite(d)) return e;
      ld += std::log(d);
    }
    phi -= 2.0 * ld;
    e.llt.push_back(std::move(llt));
  }
  e.barrier = phi;
  e.ok = true;
  return e;
}

struct CenterResult {
  bool centered = false;
  bool early = false;     // early-exit predicate fired on an accepted step
  bool floor_hit = false; // linear objective fell through obj_floor
  int iters = 0;
};

// Newton centering of c.z/mu + barrier(z) from a strictly feasible z.
// t_index >= 0 requests an early exit once z(t_index) > t_exit.
CenterResult center(const Internal& P, Vector& z, const Vector& c, double mu,
                    double obj_floor, int max_iters, int t_index, double t_exit) {
  CenterResult out;
  PointEval cur = eval_point(P, z);
  if (!cur.ok) return out;
  std::vector<Matrix> St(P.K);
  for (int it = 0; it < max_iters; ++it) {
    Vector g = c / mu;
    Matrix H = Matrix::Zero(P.K, P.K);
    for (int i = 0; i < P.K; ++i) {
      double lo = P.bound(i) + z(i), hi = P.bound(i) - z(i);
      g(i) += 1.0 / hi - 1.0 / lo;
      H(i, i) += 1.0 / (hi * hi) + 1.0 / (lo * lo);
    }
    for (int j = 0; j < P.blocks(); ++j) {
      Matrix L = cur.llt[j].matrixL();
      auto Lv = L.triangularView<Eigen::Lower>();
      for (int i : P.active[j]) {
        Matrix Y = Lv.solve(P.Fi[j][i]);
        St[i] = Lv.solve(Matrix(Y.transpose()));
        g(i) -= St[i].trace();
      }
      const auto& act = P.active[j];
      for (size_t a = 0; a < act.size(); ++a)
        for (size_t b = a; b < act.size(); ++b) {
          double v = (St[act[a]].array() * St[act[b]].array()).sum();
          H(act[a], act[b]) += v;
          if (act[b] != act[a]) H(act[b], act[a]) += v;
        }
    }

    Eigen::LDLT<Matrix> ldlt(H);
    Vector dz = ldlt.solve(-g);
    double lambda2 = -g.dot(dz);
    double ridge = (1.0 + H.diagonal().cwiseAbs().maxCoeff()) * 1e-12;
    while ((!dz.allFinite() || lambda2 < 0.0) && ridge < 1e30) {
      Eigen::LDLT<Matrix> lr(H + ridge * Matrix::Identity(P.K, P.K));
      dz = lr.solve(-g);
      lambda2 = -g.dot(dz);
      ridge *= 1e3;
    }
    if (!dz.allFinite()) return out;
    if (0.5 * lambda2 <= kCenterTol) {
      out.centered = true;
      return out;
    }

    double alpha = 1.0;
    for (int i = 0; i < P.K; ++i) {
      if (dz(i) > 0.0)
        alpha = std::min(alpha, 0.99 * (P.bound(i) - z(i)) / dz(i));
      else if (dz(i) < 0.0)
        alpha = std::min(alpha, 0.99 * (P.bound(i) + z(i)) / -dz(i));
    }
    double f0 = c.dot(z) / mu + cur.barrier;
    double slope = g.dot(dz);  // = -lambda2 < 0
    bool accepted = false;
    for (int h = 0; h < 120 && alpha > 0.0; ++h) {
      Vector zn = z + alpha * dz;
      PointEval en = eval_point(P, zn);
      if (en.ok) {
        double fn = c.dot(zn) / mu + en.barrier;
        if (fn <= f0 + 0.01 * alpha * slope) {
          z = std::move(zn);
          cur = std::move(en);
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    ++out.iters;
    if (!accepted) return out;  // stalled
    if (t_index >= 0 && z(t_index) > t_exit) {
      out.early = true;
      return out;
    }
    if (obj_floor > -kInf && c.dot(z) < obj_floor) {
      out.floor_hit = true;
      return out;
    }
  }
  return out;
}

double max_abs(const Matrix& M) {
  return M.size() ? M.cwiseAbs().maxCoeff() : 0.0;
}

void validate(const SdpProblem& p) {
  if (p.num_vars < 0)
    throw std::invalid_argument("sdp: negative variable count");
  for (const auto& c : p.constraints) {
    if (c.constant.size() == 0 || c.constant.rows() != c.constant.cols())
      throw std::invalid_argument("sdp: constraint constants must be square");
    if (!c.constant.allFinite())
      throw std::invalid_argument("sdp: non-finite constraint data");
    if (static_cast<int>(c.coeffs.size()) != p.num_vars)
      throw std::invalid_argument("sdp: coefficient count does not match num_vars");
    for (const auto& F : c.coeffs) {
      if (F.rows() != c.constant.rows() || F.cols() != c.constant.cols())
        throw std::invalid_argument("sdp: coefficient dimension mismatch");
      if (!F.allFinite())
        throw std::invalid_argument("sdp: non-finite constraint data");
    }
  }
}

struct Scaled {
  Internal P;
  Vector dvar;  // z_i = dvar_i * x_i
  double total_dim = 0.0;
};

Scaled build_scaled(const SdpProblem& p, const SolverConfig& cfg) {
  Scaled s;
  const int K = p.num_vars;
  const int J = static_cast<int>(p.constraints.size());
  s.P.K = K;
  s.P.F0.resize(J);
  s.P.Fi.resize(J);
  s.P.active.resize(J);
  for (int j = 0; j < J; ++j) {
    const auto& c = p.constraints[j];
    double sj = max_abs(c.constant);
    for (const auto& F : c.coeffs) sj = std::max(sj, max_abs(F));
    sj = std::max(sj, 1e-12);
    s.P.F0[j] = 0.5 * (c.constant + c.constant.transpose()) / sj;
    s.P.Fi[j].resize(K);
    for (int i = 0; i < K; ++i)
      s.P.Fi[j][i] = 0.5 * (c.coeffs[i] + c.coeffs[i].transpose()) / sj;
    s.total_dim += c.dim();
  }
  s.dvar = Vector::Ones(K);
  for (int i = 0; i < K; ++i) {
    double d = 0.0;
    for (int j = 0; j < J; ++j) d = std::max(d, max_abs(s.P.Fi[j][i]));
    d = std::max(d, 1e-12);
    s.dvar(i) = d;
    for (int j = 0; j < J; ++j) s.P.Fi[j][i] /= d;
  }
  for (int j = 0; j < J; ++j) {
    if (p.constraints[j].strictness == Strictness::Strict)
      s.P.F0[j] -= cfg.strict_margin * Matrix::Identity(s.P.F0[j].rows(), s.P.F0[j].cols());
    for (int i = 0; i < K; ++i)
      if (max_abs(s.P.Fi[j][i]) > 0.0) s.P.active[j].push_back(i);
  }
  s.P.bound = Vector::Constant(K, cfg.var_bound);
  return s;
}

struct Phase1Out {
  SdpStatus status = SdpStatus::Inaccurate;
  Vector x;  // internal units, without the margin variable
  double t = std::numeric_limits<double>::quiet_NaN();
  int iters = 0;
};

// Maximize t subject to F_j(x) - t I >= 0 plus the box. Feasible once an
// accepted iterate clears t_exit (the iterate itself is the witness),
// infeasible once the centered bound t + 2 mu nu falls below the threshold.
// The box turns "infeasible" into "infeasible over the box backstop", which
// is the standard barrier-solver caveat.
Phase1Out phase1(const Internal& base, double base_total_dim,
                 const SolverConfig& cfg, double t_exit) {
  Internal P = base;
  const int K = base.K;
  P.K = K + 1;
  P.bound.conservativeResize(K + 1);
  P.bound(K) = cfg.var_bound;
  for (int j = 0; j < P.blocks(); ++j) {
    P.Fi[j].push_back(-Matrix::Identity(P.F0[j].rows(), P.F0[j].cols()));
    P.active[j].push_back(K);
  }
  P.F0.push_back(Matrix::Constant(1, 1, kTargetCap));
  P.Fi.push_back(std::vector<Matrix>(K + 1, Matrix::Zero(1, 1)));
  P.Fi.back()[K] = -Matrix::Identity(1, 1);
  P.active.push_back({K});

  Vector z = Vector::Zero(K + 1);
  double tmin = kTargetCap - 1.0;
  for (int j = 0; j + 1 < P.blocks(); ++j)
    tmin = std::min(tmin, min_eigenvalue(P.F0[j]) - 1.0);
  z(K) = tmin;

  const double nu = base_total_dim + 1.0 + 2.0 * (K + 1);
  Vector c = Vector::Zero(K + 1);
  c(K) = -1.0;
  const double thr = cfg.infeasibility_threshold;

  Phase1Out out;
  for (double mu = 1.0; mu >= kMuMin; mu *= kMuFactor) {
    CenterResult cr = center(P, z, c, mu, -kInf, cfg.max_iterations, K, t_exit);
    out.iters += cr.iters;
    out.t = z(K);
    out.x = z.head(K);
    // witness test on the iterate itself; the margin variable can lag behind
    // the true block margins when centering struggles
    double pm = kInf;
    for (int j = 0; j + 1 < P.blocks(); ++j) {
      Matrix S = P.F0[j];
      for (int i : P.active[j])
        if (i < K) S += z(i) * P.Fi[j][i];
      pm = std::min(pm, min_eigenvalue(S));
    }
    if (cr.early || out.t > thr || pm > thr) {
      out.status = SdpStatus::Feasible;
      out.t = std::max(out.t, pm);
      return out;
    }
    // a stalled centering yields no certified bound; keep following the path
    if (cr.centered && out.t + 2.0 * mu * nu < -thr) {
      out.status = SdpStatus::Infeasible;
      out.t = out.t + 2.0 * mu * nu;
      return out;
    }
  }
  return out;
}

Vector unscale(const Vector& zx, const Vector& dvar) {
  Vector x(zx.size());
  for (int i = 0; i < x.size(); ++i) x(i) = zx(i) / dvar(i);
  return x;
}

// the box is a backstop, not part of the stated problem; when an iterate
// leans on it the verdict may be an artifact of the bound
bool box_pressed(const Vector& z, double bound) {
  return z.size() > 0 && z.cwiseAbs().maxCoeff() >= 0.5 * bound;
}

// preference order across box-expansion attempts of the minimizer
bool better_min(const SdpSolution& cand, const SdpSolution& incumbent) {
  if (incumbent.x.size() == 0) return true;
  auto rank = [](SdpStatus st) {
    if (st == SdpStatus::Optimal) return 0;
    if (st == SdpStatus::Inaccurate) return 1;
    return 2;
  };
  const int rc = rank(cand.status), ri = rank(incumbent.status);
  if (rc != ri) return rc < ri;
  if (!std::isfinite(cand.objective)) return false;
  if (!std::isfinite(incumbent.objective)) return true;
  return cand.objective < incumbent.objective;
}

}  // namespace

SdpSolution solve_feasibility(const SdpProblem& p, const SolverConfig& cfg) {
  validate(p);
  SdpSolution sol;
  if (p.constraints.empty()) {
    sol.status = SdpStatus::Feasible;
    sol.x = Vector::Zero(p.num_vars);
    sol.worst_margin = kInf;
    sol.phase1_t = kInf;
    return sol;
  }
  SolverConfig local = cfg;
  for (int attempt = 0;; ++attempt) {
    Scaled s = build_scaled(p, local);
    Phase1Out ph = phase1(s.P, s.total_dim, local, local.infeasibility_threshold);
    sol.status = ph.status;
    sol.phase1_t = ph.t;
    sol.newton_iterations += ph.iters;
    sol.x = unscale(ph.x, s.dvar);
    if (attempt < 3 && sol.status != SdpStatus::Feasible &&
        box_pressed(ph.x, local.var_bound)) {
      local.var_bound *= 1e3;
      continue;
    }
    sol.worst_margin = verify_solution(p, sol.x).worst;
    return sol;
  }
}

SdpSolution solve_min_linear(const SdpProblem& p, const SolverConfig& cfg) {
  validate(p);
  if (p.objective.size() == 0)
    throw std::invalid_argument("solve_min_linear: objective is required");
  if (p.objective.size() != p.num_vars)
    throw std::invalid_argument("solve_min_linear: objective size does not match num_vars");

  SdpSolution sol;
  if (p.constraints.empty()) {
    sol.status = (p.objective.cwiseAbs().maxCoeff() > 0.0) ? SdpStatus::Unbounded
                                                           : SdpStatus::Optimal;
    sol.x = Vector::Zero(p.num_vars);
    sol.objective = 0.0;
    return sol;
  }

  SolverConfig local = cfg;
  SdpSolution best;
  for (int attempt = 0;; ++attempt) {
    Scaled s = build_scaled(p, local);
    // aim for a comfortably interior phase-I point before optimizing
    Phase1Out ph = phase1(s.P, s.total_dim, local, 0.1);
    sol.phase1_t = ph.t;
    sol.newton_iterations += ph.iters;
    Vector z = ph.x;
    if (ph.status != SdpStatus::Feasible) {
      sol.status = ph.status;
    } else {
      Vector chat(s.P.K);
      for (int i = 0; i < s.P.K; ++i) chat(i) = p.objective(i) / s.dvar(i);
      const double nu = s.total_dim + 2.0 * s.P.K;
      double mu = std::max(1.0, std::abs(chat.dot(z)));
      sol.status = SdpStatus::Inaccurate;
      for (int step = 0; step < 200; ++step) {
        CenterResult cr = center(s.P, z, chat, mu, local.objective_floor,
                                 local.max_iterations, -1, 0.0);
        sol.newton_iterations += cr.iters;
        double obj = chat.dot(z);
        if (cr.floor_hit || obj < local.objective_floor) {
          sol.status = SdpStatus::Unbounded;
          break;
        }
        double gap = mu * nu;
        if (gap <= local.duality_gap_tol * (1.0 + std::abs(obj))) {
          sol.status = SdpStatus::Optimal;
          break;
        }
        if (!cr.centered) {
          // stalled; accept only if the certified gap is already small
          sol.status = (gap <= 1e-5 * (1.0 + std::abs(obj)))
                           ? SdpStatus::Optimal
                           : SdpStatus::Inaccurate;
          break;
        }
        if (mu <= 1e-13 * (1.0 + std::abs(obj))) break;
        mu *= kMuFactor;
      }
    }
    sol.x = unscale(z, s.dvar);
    sol.objective = p.objective.dot(sol.x);
    sol.worst_margin = verify_solution(p, sol.x).worst;
    if (sol.status == SdpStatus::Unbounded) return sol;
    // the optimal face can lean on the box without the optimum needing more
    // room, so a pressed point triggers a retry but never discards a better
    // earlier result
    if (better_min(sol, best)) {
      best = sol;
      best.newton_iterations = sol.newton_iterations;
    }
    if (attempt < 3 && box_pressed(z, local.var_bound)) {
      local.var_bound *= 1e3;
      continue;
    }
    best.newton_iterations = sol.newton_iterations;
    return best;
  }
}

MarginReport verify_solution(const SdpProblem& p, const Vector& x) {
  MarginReport r;
  for (const auto& c : p.constraints) {
    double m = min_eigenvalue(c.evaluate(x));
    r.margins.push_back(m);
    if (std::isnan(r.worst) || m < r.worst) r.worst = m;
  }
  return r;
}

Matrix SymVariable::basis(int k) const {
  int idx = k, col = 0;
  while (idx > col) {
    idx -= col + 1;
    ++col;
  }
  Matrix E = Matrix::Zero(dim, dim);
  E(idx, col) = 1.0;
  E(col, idx) = 1.0;
  return E;
}

Matrix SymVariable::unpack(const Vector& x) const {
  Matrix P = Matrix::Zero(dim, dim);
  int k = 0;
  for (int c = 0; c < dim; ++c)
    for (int r = 0; r <= c; ++r, ++k) {
      P(r, c) = x(offset + k);
      P(c, r) = x(offset + k);
    }
  return P;
}

Vector SymVariable::pack(const Matrix& P) {
  const int d = static_cast<int>(P.rows());
  Vector x(d * (d + 1) / 2);
  int k = 0;
  for (int c = 0; c < d; ++c)
    for (int r = 0; r <= c; ++r, ++k) x(k) = 0.5 * (P(r, c) + P(c, r));
  return x;
}

}  // namespace ddv
