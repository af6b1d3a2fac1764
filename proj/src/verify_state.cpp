#include "ddv/verify_state.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "ddv/lti.hpp"
#include "robust_common.hpp"

namespace ddv {

using detail::inverse_supply_full;
using detail::packed_count;
using detail::sym;
using detail::undecided;

const char* to_string(Status s) {
  switch (s) {
    case Status::Dissipative:
      return "dissipative";
    case Status::NotDissipative:
      return "not dissipative";
    case Status::Inconclusive:
      return "inconclusive";
    default:
      return "unknown";
  }
}

int exit_code(Status s) {
  switch (s) {
    case Status::Dissipative:
      return 0;
    case Status::NotDissipative:
      return 1;
    default:
      return 2;
  }
}

namespace {

// the supply rate pulled back onto stacked (x; u) through y = Cx + Du:
// [[C^T Q C, C^T S + C^T Q D], [ . , D^T Q D + D^T S + S^T D + R]]
Matrix supply_on_state_input(const Matrix& C, const Matrix& D,
                             const SupplyRate& Pi) {
  const int n = static_cast<int>(C.cols());
  const int m = static_cast<int>(D.cols());
  Matrix K(n + m, n + m);
  K.topLeftCorner(n, n) = C.transpose() * Pi.Q * C;
  K.topRightCorner(n, m) = C.transpose() * Pi.S + C.transpose() * Pi.Q * D;
  K.bottomLeftCorner(m, n) = K.topRightCorner(n, m).transpose();
  K.bottomRightCorner(m, m) = D.transpose() * Pi.Q * D +
                              D.transpose() * Pi.S +
                              Pi.S.transpose() * D + Pi.R;
  return sym(K);
}

InverseSupplyRate zero_like(int m, int p) {
  return InverseSupplyRate{Matrix::Zero(p, p), Matrix::Zero(p, m),
                           Matrix::Zero(m, m)};
}

void check_output_maps(const Matrix& C, const Matrix& D, int n, int m) {
  if (C.rows() < 1 || C.cols() != n)
    throw std::invalid_argument("output map C has wrong dimensions");
  if (D.rows() != C.rows() || D.cols() != m)
    throw std::invalid_argument("feedthrough D has wrong dimensions");
}

}  // namespace

Matrix QuadraticMatrixSet::membership_form(const Matrix& J) const {
  if (J.rows() != rows() || J.cols() != cols())
    throw std::invalid_argument("membership_form: J has wrong dimensions");
  return sym(J * Qbar * J.transpose() + J * Sbar + Sbar.transpose() * J.transpose() +
             Rbar);
}

bool QuadraticMatrixSet::contains(const Matrix& J) const {
  return is_psd(membership_form(J));
}

bool QuadraticMatrixSet::contains(const Matrix& J, double tol) const {
  return is_psd(membership_form(J), tol);
}

Verdict verify_noisefree(const StateDataMatrices& d, const Matrix& C,
                         const Matrix& D, const SupplyRate& Pi,
                         const VerifyConfig& cfg) {
  const int n = d.n(), m = d.m(), N = d.N();
  if (n < 1 || m < 1 || N < 1)
    throw std::invalid_argument("verify_noisefree: empty data");
  if (d.Xp.rows() != n || d.Xp.cols() != N || d.U.cols() != N)
    throw std::invalid_argument("verify_noisefree: inconsistent data matrices");
  check_output_maps(C, D, n, m);
  if (Pi.m() != m || Pi.p() != C.rows())
    throw std::invalid_argument("verify_noisefree: supply rate dimensions");

  Matrix X = d.X, Xp = d.Xp, U = d.U;
  if (cfg.compress_data_lmi) {
    // the data LMI vanishes off the row space of the stacked data, so a
    // congruence onto that space preserves feasibility exactly
    Matrix Z(2 * n + m, N);
    Z.topRows(n) = d.X;
    Z.middleRows(n, n) = d.Xp;
    Z.bottomRows(m) = d.U;
    Eigen::JacobiSVD<Matrix> svd(Z.transpose(), Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    double cutoff =
        sv.size() > 0 ? 1e-13 * sv(0) * std::max<int>(N, 2 * n + m) : 0.0;
    int r = 0;
    while (r < sv.size() && sv(r) > cutoff) ++r;
    Matrix V = svd.matrixU().leftCols(r);
    X = d.X * V;
    Xp = d.Xp * V;
    U = d.U * V;
  }
  const int w = static_cast<int>(X.cols());

  SymVariable Pv{n, 0};
  SdpProblem prob;
  prob.num_vars = Pv.count();

  Matrix K = supply_on_state_input(C, D, Pi);
  LmiConstraint main;
  Matrix ZU(n + m, w);
  ZU.topRows(n) = X;
  ZU.bottomRows(m) = U;
  main.constant = sym(ZU.transpose() * K * ZU);
  double mass = main.constant.norm();
  main.coeffs.reserve(prob.num_vars);
  for (int k = 0; k < prob.num_vars; ++k) {
    Matrix E = Pv.basis(k);
    main.coeffs.push_back(
        sym(X.transpose() * E * X - Xp.transpose() * E * Xp));
    mass += main.coeffs.back().norm();
  }
  main.strictness = cfg.storage == StorageMode::StrictPd ? Strictness::Strict
                                                         : Strictness::NonStrict;
  main.label = "data dissipation";
  if (w > 0 && mass > 0.0) prob.constraints.push_back(std::move(main));

  if (cfg.storage != StorageMode::Free) {
    LmiConstraint psd;
    psd.constant = Matrix::Zero(n, n);
    for (int k = 0; k < prob.num_vars; ++k) psd.coeffs.push_back(Pv.basis(k));
    psd.strictness = cfg.storage == StorageMode::StrictPd
                         ? Strictness::Strict
                         : Strictness::NonStrict;
    psd.label = "storage sign";
    prob.constraints.push_back(std::move(psd));
  }

  SdpSolution s = solve_feasibility(prob, cfg.solver);
  MarginReport mr = verify_solution(prob, s.x);

  Verdict v;
  v.margins = mr.margins;
  v.worst_margin = mr.worst;
  v.achieved_rank = achieved_stack_rank(d);
  v.required_rank = n + m;
  const bool rank_ok = v.achieved_rank == v.required_rank;

  if (s.status == SdpStatus::Feasible && rank_ok) {
    v.status = Status::Dissipative;
    Certificate cert;
    cert.P = Pv.unpack(s.x);
    v.certificate = cert;
  } else if (s.status == SdpStatus::Feasible) {
    v.status = Status::Inconclusive;
    std::ostringstream note;
    note << "rank condition failed: rank(X;U) = " << v.achieved_rank
         << ", need " << v.required_rank;
    v.notes = note.str();
  } else if (s.status == SdpStatus::Infeasible) {
    v.status = Status::NotDissipative;
  } else {
    v.status = Status::Unknown;
    v.notes = "solver could not decide the data LMI";
  }
  return v;
}

QuadraticMatrixSet sigma_xu_quadratic(const StateDataMatrices& d,
                                      const NoiseBoundQuadratic& nb) {
  return sigma_xu_quadratic(d, nb, Matrix::Identity(d.n(), d.n()));
}

QuadraticMatrixSet sigma_xu_quadratic(const StateDataMatrices& d,
                                      const NoiseBoundQuadratic& nb,
                                      const Matrix& Bw) {
  const int n = d.n(), m = d.m(), N = d.N();
  if (n < 1 || m < 1 || N < 1)
    throw std::invalid_argument("sigma_xu_quadratic: empty data");
  if (nb.span() != N)
    throw std::invalid_argument(
        "sigma_xu_quadratic: noise span must equal the number of samples");
  if (Bw.rows() != n || Bw.cols() != nb.width())
    throw std::invalid_argument("sigma_xu_quadratic: Bw dimensions");

  Matrix Z(n + m, N);
  Z.topRows(n) = d.X;
  Z.bottomRows(m) = d.U;

  QuadraticMatrixSet set;
  set.Qbar = sym(Z * nb.Qn * Z.transpose());
  set.Sbar = -Z * (nb.Qn * d.Xp.transpose() + nb.Sn * Bw.transpose());
  set.Rbar = sym(d.Xp * nb.Qn * d.Xp.transpose() +
                 d.Xp * nb.Sn * Bw.transpose() +
                 Bw * nb.Sn.transpose() * d.Xp.transpose() +
                 Bw * nb.Rn * Bw.transpose());
  return set;
}

InverseSupplyParam InverseSupplyParam::fixed(const InverseSupplyRate& inv) {
  InverseSupplyParam p;
  p.constant = inv;
  p.linear = zero_like(inv.m(), inv.p());
  p.has_scalar = false;
  return p;
}

InverseSupplyParam InverseSupplyParam::gain_mu(int m, int p) {
  InverseSupplyParam out;
  out.constant = InverseSupplyRate{-Matrix::Identity(p, p), Matrix::Zero(p, m),
                                   Matrix::Zero(m, m)};
  out.linear = InverseSupplyRate{Matrix::Zero(p, p), Matrix::Zero(p, m),
                                 Matrix::Identity(m, m)};
  out.has_scalar = true;
  return out;
}

InverseSupplyParam InverseSupplyParam::passivity_rho(int m) {
  InverseSupplyParam out;
  out.constant = InverseSupplyRate{Matrix::Zero(m, m),
                                   2.0 * Matrix::Identity(m, m),
                                   Matrix::Zero(m, m)};
  out.linear = InverseSupplyRate{4.0 * Matrix::Identity(m, m),
                                 Matrix::Zero(m, m), Matrix::Zero(m, m)};
  out.has_scalar = true;
  return out;
}

SdpProblem assemble_robust_lmi(const QuadraticMatrixSet& set, const Matrix& C,
                               const Matrix& D, const InverseSupplyParam& inv,
                               const VerifyConfig& cfg) {
  const int n = set.rows();
  const int m = set.cols() - n;
  if (n < 1 || m < 1)
    throw std::invalid_argument("assemble_robust_lmi: degenerate set");
  check_output_maps(C, D, n, m);
  const int p = static_cast<int>(C.rows());
  if (inv.constant.m() != m || inv.constant.p() != p)
    throw std::invalid_argument(
        "assemble_robust_lmi: inverse supply dimensions");
  if (inv.has_scalar && (inv.linear.m() != m || inv.linear.p() != p))
    throw std::invalid_argument(
        "assemble_robust_lmi: affine inverse supply dimensions");
  if (cfg.enforce_inverse_sign && !inv.has_scalar &&
      !is_psd(inv.constant.Rt))
    throw std::invalid_argument(
        "assemble_robust_lmi: inverse supply Rt block fails the sign "
        "hypothesis");

  // column layout of the congruence factor: (x; u) | state copy | output
  const int tot = 2 * n + m + p;
  Matrix L1 = Matrix::Zero(n, tot);
  L1.block(0, 0, n, n) = Matrix::Identity(n, n);
  L1.block(0, 2 * n + m, n, p) = C.transpose();
  Matrix L2 = Matrix::Zero(n, tot);
  L2.block(0, n + m, n, n) = -Matrix::Identity(n, n);
  Matrix L3 = Matrix::Zero(m, tot);
  L3.block(0, n, m, m) = Matrix::Identity(m, m);
  L3.block(0, 2 * n + m, m, p) = D.transpose();
  Matrix L4 = Matrix::Zero(p, tot);
  L4.block(0, 2 * n + m, p, p) = -Matrix::Identity(p, p);
  Matrix Lsup(m + p, tot);
  Lsup.topRows(m) = L3;
  Lsup.bottomRows(p) = L4;
  Matrix Ld(2 * n + m, tot);
  Ld.setZero();
  Ld.block(0, 0, n + m, n + m) = Matrix::Identity(n + m, n + m);
  Ld.block(n + m, n + m, n, n) = Matrix::Identity(n, n);

  Matrix Omega(2 * n + m, 2 * n + m);
  Omega.topLeftCorner(n + m, n + m) = set.Qbar;
  Omega.topRightCorner(n + m, n) = set.Sbar;
  Omega.bottomLeftCorner(n, n + m) = set.Sbar.transpose();
  Omega.bottomRightCorner(n, n) = set.Rbar;

  SymVariable Pv{n, 0};
  const int np = Pv.count();
  const int tau_idx = np;
  const int scalar_idx = np + 1;

  SdpProblem prob;
  prob.num_vars = np + 1 + (inv.has_scalar ? 1 : 0);
  prob.var_names.resize(prob.num_vars);
  for (int k = 0; k < np; ++k) prob.var_names[k] = "P[" + std::to_string(k) + "]";
  prob.var_names[tau_idx] = "tau";
  if (inv.has_scalar) prob.var_names[scalar_idx] = "s";

  LmiConstraint main;
  main.constant = sym(-(Lsup.transpose() *
                        inverse_supply_full(inv.constant) * Lsup));
  main.coeffs.assign(prob.num_vars, Matrix::Zero(tot, tot));
  for (int k = 0; k < np; ++k) {
    Matrix E = Pv.basis(k);
    main.coeffs[k] =
        sym(-L1.transpose() * E * L1 + L2.transpose() * E * L2);
  }
  main.coeffs[tau_idx] = sym(-(Ld.transpose() * Omega * Ld));
  if (inv.has_scalar)
    main.coeffs[scalar_idx] =
        sym(-(Lsup.transpose() * inverse_supply_full(inv.linear) * Lsup));
  main.strictness = Strictness::Strict;
  main.label = "robust dissipation";
  prob.constraints.push_back(std::move(main));

  LmiConstraint psd;
  psd.constant = Matrix::Zero(n, n);
  psd.coeffs.assign(prob.num_vars, Matrix::Zero(n, n));
  for (int k = 0; k < np; ++k) psd.coeffs[k] = Pv.basis(k);
  psd.strictness = Strictness::Strict;
  psd.label = "storage sign";
  prob.constraints.push_back(std::move(psd));

  LmiConstraint mult;
  mult.constant = Matrix::Constant(1, 1, -cfg.tau_floor);
  mult.coeffs.assign(prob.num_vars, Matrix::Zero(1, 1));
  mult.coeffs[tau_idx](0, 0) = 1.0;
  mult.strictness = Strictness::NonStrict;
  mult.label = "multiplier";
  prob.constraints.push_back(std::move(mult));

  return prob;
}

namespace {

std::string rt_sign_note(const InverseSupplyRate& inv,
                         const VerifyConfig& cfg, const char* where) {
  if (is_psd(inv.Rt)) return {};
  if (cfg.enforce_inverse_sign)
    throw std::invalid_argument(std::string(where) +
                                ": inverse supply Rt block fails the sign "
                                "hypothesis");
  return "warning: inverse supply Rt block fails the sign hypothesis of the "
         "robust condition\n";
}

}  // namespace

Verdict verify_robust(const QuadraticMatrixSet& set, const Matrix& C,
                      const Matrix& D, const SupplyRate& Pi,
                      const VerifyConfig& cfg) {
  InverseSupplyRate inv = invert(Pi);
  std::string note = rt_sign_note(inv, cfg, "verify_robust");
  auto assemble = [&](const InverseSupplyParam& par) {
    return assemble_robust_lmi(set, C, D, par, cfg);
  };
  return detail::verify_fixed_generic(assemble, set.rows(), inv,
                                      std::move(note), cfg);
}

Verdict optimize_gain_robust(const QuadraticMatrixSet& set, const Matrix& C,
                             const Matrix& D, const VerifyConfig& cfg) {
  const int m = set.cols() - set.rows();
  const int p = static_cast<int>(C.rows());
  auto assemble = [&](const InverseSupplyParam& par) {
    return assemble_robust_lmi(set, C, D, par, cfg);
  };
  return detail::optimize_scalar_generic(
      assemble, set.rows(), InverseSupplyParam::gain_mu(m, p), cfg, true);
}

Verdict optimize_passivity_robust(const QuadraticMatrixSet& set,
                                  const Matrix& C, const Matrix& D,
                                  const VerifyConfig& cfg) {
  const int m = set.cols() - set.rows();
  if (C.rows() != m)
    throw std::invalid_argument(
        "optimize_passivity_robust: passivity needs a square channel");
  auto assemble = [&](const InverseSupplyParam& par) {
    return assemble_robust_lmi(set, C, D, par, cfg);
  };
  return detail::optimize_scalar_generic(
      assemble, set.rows(), InverseSupplyParam::passivity_rho(m), cfg, false);
}

std::vector<std::pair<Matrix, Matrix>> sample_consistent_systems(
    const QuadraticMatrixSet& set, const StateDataMatrices& d,
    const NoiseBoundQuadratic& nb, const Matrix& Bw, int count,
    std::uint64_t seed) {
  if (count < 1)
    throw std::invalid_argument("sample_consistent_systems: count >= 1");
  const int n = d.n(), m = d.m(), N = d.N();
  if (set.rows() != n || set.cols() != n + m)
    throw std::invalid_argument("sample_consistent_systems: set/data mismatch");
  if (nb.span() != N || Bw.rows() != n || Bw.cols() != nb.width())
    throw std::invalid_argument("sample_consistent_systems: noise dimensions");

  auto [Als, Bls] = ls_identify(d.X, d.Xp, d.U);
  Matrix J0(n, n + m);
  J0.leftCols(n) = Als;
  J0.rightCols(m) = Bls;

  auto refit = [&](const Matrix& W) {
    auto [Ad, Bd] = ls_identify(d.X, Matrix(d.Xp - Bw * W), d.U);
    Matrix Jc(n, n + m);
    Jc.leftCols(n) = Ad;
    Jc.rightCols(m) = Bd;
    return Jc;
  };
  std::vector<Matrix> members = detail::sample_set_members(
      set, J0, nb, refit, count, seed, "sample_consistent_systems");

  std::vector<std::pair<Matrix, Matrix>> out;
  out.reserve(members.size());
  for (const Matrix& J : members)
    out.emplace_back(J.leftCols(n), J.rightCols(m));
  return out;
}

}  // namespace ddv
