#include "robust_common.hpp"

#include <cmath>
#include <initializer_list>
#include <limits>
#include <random>
#include <stdexcept>
#include <utility>

#include "ddv/bisect.hpp"

namespace ddv::detail {

Matrix sym(const Matrix& M) { return 0.5 * (M + M.transpose()); }

Matrix inverse_supply_full(const InverseSupplyRate& r) {
  const int m = r.m(), p = r.p();
  Matrix F(m + p, m + p);
  F.topLeftCorner(m, m) = r.Rt;
  F.topRightCorner(m, p) = r.St.transpose();
  F.bottomLeftCorner(p, m) = r.St;
  F.bottomRightCorner(p, p) = r.Qt;
  return sym(F);
}

int packed_count(int n) { return n * (n + 1) / 2; }

Verdict undecided(const MarginReport& mr, std::string note) {
  Verdict v;
  v.status = Status::Unknown;
  v.margins = mr.margins;
  v.worst_margin = mr.worst;
  v.notes = std::move(note);
  return v;
}

Verdict verify_fixed_generic(const Assembler& assemble, int pdim,
                             const InverseSupplyRate& inv, std::string note,
                             const VerifyConfig& cfg) {
  SdpProblem prob = assemble(InverseSupplyParam::fixed(inv));
  SdpSolution s = solve_feasibility(prob, cfg.solver);
  MarginReport mr = verify_solution(prob, s.x);

  if (s.status == SdpStatus::Feasible) {
    Verdict v;
    v.status = Status::Dissipative;
    v.margins = mr.margins;
    v.worst_margin = mr.worst;
    v.notes = std::move(note);
    Certificate cert;
    cert.P = SymVariable{pdim, 0}.unpack(s.x);
    cert.tau = s.x(packed_count(pdim));
    v.certificate = cert;
    return v;
  }
  note += s.status == SdpStatus::Infeasible
              ? "robust condition infeasible; the test is sufficient only"
              : "solver could not certify the robust condition";
  return undecided(mr, std::move(note));
}

Verdict optimize_scalar_generic(const Assembler& assemble, int pdim,
                                const InverseSupplyParam& par,
                                const VerifyConfig& cfg, bool is_gain) {
  SdpProblem prob = assemble(par);
  const int np = packed_count(pdim);
  prob.objective = Vector::Zero(prob.num_vars);
  prob.objective(np + 1) = -1.0;  // maximize the scalar

  SdpSolution s = solve_min_linear(prob, cfg.solver);
  MarginReport mr = verify_solution(prob, s.x);

  // an inaccurate stop still certifies when the returned point is strictly
  // inside every block
  const bool usable =
      s.status == SdpStatus::Optimal ||
      (s.status == SdpStatus::Inaccurate && std::isfinite(mr.worst) &&
       mr.worst > 0.0);

  double scalar = usable ? s.x(np + 1) : std::numeric_limits<double>::quiet_NaN();
  const bool stalled = usable && s.status == SdpStatus::Inaccurate;
  const bool lost = !usable || (is_gain && !(scalar > cfg.mu_floor));

  // Fixed-scalar bisection refines a stalled path result and rescues a lost
  // one. The family is monotone (a larger scalar tightens the supply), and
  // every accepted value is backed by a feasibility witness, so the refined
  // bound inherits the soundness of the fixed-supply test.
  SdpSolution fs;
  MarginReport fmr;
  double accepted_best = std::numeric_limits<double>::quiet_NaN();
  auto fixed_ok = [&](double v) {
    InverseSupplyRate at;
    at.Qt = par.constant.Qt + v * par.linear.Qt;
    at.St = par.constant.St + v * par.linear.St;
    at.Rt = par.constant.Rt + v * par.linear.Rt;
    SdpProblem fp = assemble(InverseSupplyParam::fixed(at));
    SdpSolution s2 = solve_feasibility(fp, cfg.solver);
    if (s2.status != SdpStatus::Feasible) return false;
    if (std::isnan(accepted_best) || v >= accepted_best) {
      accepted_best = v;
      fs = s2;
      fmr = verify_solution(fp, s2.x);
    }
    return true;
  };

  double lo = std::numeric_limits<double>::quiet_NaN();
  if (stalled && !lost && fixed_ok(scalar)) lo = scalar;
  if (lost) {
    // nothing usable from path-following; seed the search from coarse probes,
    // largest first
    for (double v : is_gain ? std::initializer_list<double>{1.0, 1e-2, 1e-4}
                            : std::initializer_list<double>{0.5, 0.0, -1.0}) {
      if (fixed_ok(v)) {
        lo = v;
        break;
      }
    }
  }
  bool polished = false;
  if (std::isfinite(lo)) {
    double hi = lo + 0.05 * (1.0 + std::abs(lo));
    double refined = max_accepted(fixed_ok, lo, hi, 1e-5);
    if (std::isfinite(refined) && std::isfinite(accepted_best)) {
      scalar = accepted_best;
      polished = true;
    }
  }
  if (!polished && lost)
    return undecided(mr, is_gain
                             ? "no gain certifiable from the consistency set"
                             : "no passivity index certifiable from the "
                               "consistency set");

  Verdict v;
  v.status = Status::Dissipative;
  Certificate cert;
  if (polished) {
    v.margins = fmr.margins;
    v.worst_margin = fmr.worst;
    v.notes = "refined by fixed-supply bisection";
    cert.P = SymVariable{pdim, 0}.unpack(fs.x);
    cert.tau = fs.x(np);
  } else {
    v.margins = mr.margins;
    v.worst_margin = mr.worst;
    cert.P = SymVariable{pdim, 0}.unpack(s.x);
    cert.tau = s.x(np);
  }
  cert.performance = is_gain ? 1.0 / std::sqrt(scalar) : scalar;
  v.certificate = cert;
  return v;
}

std::vector<Matrix> sample_set_members(
    const QuadraticMatrixSet& set, const Matrix& J0,
    const NoiseBoundQuadratic& nb,
    const std::function<Matrix(const Matrix&)>& refit, int count,
    std::uint64_t seed, const char* where) {
  if (!set.contains(J0))
    throw std::runtime_error(std::string(where) +
                             ": least-squares center is outside the set");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> G(0.0, 1.0);
  std::uniform_real_distribution<double> U01(0.0, 1.0);
  const double base_scale =
      std::sqrt(std::max(0.0, max_eigenvalue(nb.Rn)) / std::max(1, nb.span()));

  std::vector<Matrix> out;
  out.reserve(count);
  auto push = [&](const Matrix& J) {
    if (!set.contains(J))
      throw std::logic_error(std::string(where) + ": non-member produced");
    out.push_back(J);
  };

  for (int i = 0; i < count; ++i) {
    if (i == 0) {
      push(J0);
      continue;
    }
    Matrix J;
    bool found = false;
    if (i % 2 == 1) {
      // rejection sampling through noise realizations
      double scale = base_scale;
      for (int attempt = 0; attempt < 64 && !found; ++attempt) {
        Matrix W(nb.width(), nb.span());
        for (int r = 0; r < W.rows(); ++r)
          for (int c = 0; c < W.cols(); ++c) W(r, c) = scale * G(rng);
        if (!membership(nb, W)) {
          if (attempt % 8 == 7) scale *= 0.5;
          continue;
        }
        Matrix Jc = refit(W);
        if (set.contains(Jc)) {
          J = Jc;
          found = true;
        }
      }
    }
    if (!found) {
      // walk a random ray from the center toward the boundary
      Matrix dir(set.rows(), set.cols());
      for (int r = 0; r < dir.rows(); ++r)
        for (int c = 0; c < dir.cols(); ++c) dir(r, c) = G(rng);
      double nrm = dir.norm();
      if (nrm == 0.0) nrm = 1.0;
      dir /= nrm;
      double lo = 0.0, hi = 1.0;
      while (hi < 1e6 && set.contains(Matrix(J0 + hi * dir))) {
        lo = hi;
        hi *= 2.0;
      }
      if (hi >= 1e6) {
        lo = hi;  // unbounded direction under the tolerance; just go far
      } else {
        for (int it = 0; it < 60; ++it) {
          double mid = 0.5 * (lo + hi);
          if (set.contains(Matrix(J0 + mid * dir)))
            lo = mid;
          else
            hi = mid;
        }
      }
      double u = std::sqrt(U01(rng));  // bias toward the boundary
      J = J0 + (u * lo) * dir;
      if (!set.contains(J)) J = J0;
    }
    push(J);
  }
  return out;
}

}  // namespace ddv::detail
