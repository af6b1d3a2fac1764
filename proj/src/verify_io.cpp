#include "ddv/verify_io.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "robust_common.hpp"

namespace ddv {

using detail::inverse_supply_full;
using detail::sym;

Matrix ExtendedSystem::a_coeff(int i) const {
  if (i < 1 || i > l)
    throw std::invalid_argument("a_coeff: index must be in 1..l");
  return -A2.middleCols(m() * l + (i - 1) * p(), p());
}

Matrix ExtendedSystem::b_coeff(int i) const {
  if (i < 1 || i > l)
    throw std::invalid_argument("b_coeff: index must be in 1..l");
  return A2.middleCols((i - 1) * m(), m());
}

ExtendedData build_extended_data(const Trajectory& t, int l) {
  if (l < 1) throw std::invalid_argument("build_extended_data: l must be >= 1");
  if (!t.has_outputs())
    throw std::invalid_argument("build_extended_data: outputs required");
  const int N = t.N();
  const int m = static_cast<int>(t.u.rows());
  const int p = static_cast<int>(t.y.rows());
  if (m < 1 || p < 1 || t.y.cols() != N)
    throw std::invalid_argument("build_extended_data: inconsistent record");
  if (N <= l)
    throw std::invalid_argument(
        "build_extended_data: record shorter than one window");

  const int w = N - l;
  ExtendedData ed;
  ed.l = l;
  ed.Xi.resize((m + p) * l, w);
  ed.Xip.resize((m + p) * l, w);
  // window slot s holds the sample s steps past the window start; the u
  // slots come first, then the y slots
  for (int s = 0; s < l; ++s) {
    ed.Xi.middleRows(s * m, m) = t.u.middleCols(s, w);
    ed.Xi.middleRows(m * l + s * p, p) = t.y.middleCols(s, w);
    ed.Xip.middleRows(s * m, m) = t.u.middleCols(s + 1, w);
    ed.Xip.middleRows(m * l + s * p, p) = t.y.middleCols(s + 1, w);
  }
  ed.Uxi = t.u.rightCols(w);
  ed.Yxi = t.y.rightCols(w);
  return ed;
}

std::pair<Matrix, Matrix> extended_shift_structure(int l, int m, int p) {
  if (l < 1 || m < 1 || p < 1)
    throw std::invalid_argument(
        "extended_shift_structure: dimensions must be positive");
  const int nxi = (m + p) * l;
  Matrix A1 = Matrix::Zero(nxi - p, nxi);
  Matrix B1 = Matrix::Zero(nxi - p, m);
  for (int i = 0; i < m * (l - 1); ++i) A1(i, i + m) = 1.0;
  for (int i = 0; i < p * (l - 1); ++i) A1(m * l + i, m * l + i + p) = 1.0;
  for (int i = 0; i < m; ++i) B1(m * (l - 1) + i, i) = 1.0;
  return {A1, B1};
}

ExtendedSystem build_extended_system(const LtiSystem& sys, int l) {
  if (l < 1)
    throw std::invalid_argument("build_extended_system: l must be >= 1");
  const int n = sys.n(), m = sys.m(), p = sys.p();
  if (l < lag(sys))
    throw std::invalid_argument("build_extended_system: l below the lag");

  std::vector<Matrix> Ap(l + 1);
  Ap[0] = Matrix::Identity(n, n);
  for (int k = 1; k <= l; ++k) Ap[k] = Ap[k - 1] * sys.A;

  // y-window = O x_{k-l} + R u-window, R block lower triangular in the
  // impulse response
  Matrix O = observability_matrix(sys, l);
  Matrix R = Matrix::Zero(p * l, m * l);
  for (int i = 0; i < l; ++i)
    for (int j = 0; j <= i; ++j)
      R.block(i * p, j * m, p, m) =
          i == j ? sys.D : Matrix(sys.C * Ap[i - j - 1] * sys.B);

  // l >= lag makes O full column rank, so the pseudoinverse is a left
  // inverse and T recovers the window-start state exactly
  Matrix Opinv = O.completeOrthogonalDecomposition().pseudoInverse();
  Matrix T((Eigen::Index)n, (Eigen::Index)((m + p) * l));
  T.leftCols(m * l) = -Opinv * R;
  T.rightCols(p * l) = Opinv;

  Matrix A2 = sys.C * Ap[l] * T;
  for (int s = 0; s < l; ++s)
    A2.middleCols(s * m, m) += sys.C * Ap[l - 1 - s] * sys.B;

  auto [A1, B1] = extended_shift_structure(l, m, p);
  const int nxi = (m + p) * l;
  ExtendedSystem es;
  es.l = l;
  es.A1 = A1;
  es.B1 = B1;
  es.A2 = A2;
  es.T = T;
  es.Ctilde = A2;
  es.Dtilde = sys.D;
  es.Atilde.resize(nxi, nxi);
  es.Atilde.topRows(nxi - p) = A1;
  es.Atilde.bottomRows(p) = A2;
  es.Btilde.resize(nxi, m);
  es.Btilde.topRows(nxi - p) = B1;
  es.Btilde.bottomRows(p) = sys.D;
  return es;
}

LtiSystem extended_realization(const Matrix& A1, const Matrix& B1,
                               const Matrix& A2, const Matrix& Dt) {
  const int nxi = static_cast<int>(A1.cols());
  const int p = static_cast<int>(A2.rows());
  const int m = static_cast<int>(B1.cols());
  if (p < 1 || m < 1 || nxi <= p || A1.rows() != nxi - p ||
      A2.cols() != nxi || B1.rows() != nxi - p || Dt.rows() != p ||
      Dt.cols() != m)
    throw std::invalid_argument("extended_realization: inconsistent blocks");
  Matrix At(nxi, nxi), Bt(nxi, m);
  At.topRows(nxi - p) = A1;
  At.bottomRows(p) = A2;
  Bt.topRows(nxi - p) = B1;
  Bt.bottomRows(p) = Dt;
  return {At, Bt, A2, Dt};
}

Trajectory simulate_extended_noisy(const ExtendedSystem& es, const Matrix& u,
                                   const Matrix& v, const Matrix& bv) {
  const int m = es.m(), p = es.p(), nxi = es.nxi();
  const int N = static_cast<int>(u.cols());
  if (u.rows() != m)
    throw std::invalid_argument("simulate_extended_noisy: input rows");
  if (v.cols() != N)
    throw std::invalid_argument(
        "simulate_extended_noisy: noise needs one column per step");
  if (bv.rows() != p || bv.cols() != v.rows())
    throw std::invalid_argument(
        "simulate_extended_noisy: noise channel dimensions");

  Trajectory t;
  t.u = u;
  t.y.resize(p, N);
  Vector xi = Vector::Zero(nxi);
  for (int k = 0; k < N; ++k) {
    Vector y = es.A2 * xi + es.Dtilde * u.col(k) + bv * v.col(k);
    t.y.col(k) = y;
    // the window shifts with the measured output, not the noise-free one
    Vector next(nxi);
    next.head(nxi - p) = es.A1 * xi + es.B1 * u.col(k);
    next.tail(p) = y;
    xi = next;
  }
  return t;
}

Trajectory simulate_extended_noisy(const ExtendedSystem& es, const Matrix& u,
                                   const Matrix& v) {
  return simulate_extended_noisy(es, u, v,
                                 Matrix::Identity(es.p(), es.p()));
}

Verdict verify_io_noisefree(const ExtendedData& ed, const SupplyRate& Pi,
                            bool pe_order_checked, const VerifyConfig& cfg) {
  const int m = ed.m(), p = ed.p(), nxi = ed.nxi(), w0 = ed.width();
  if (m < 1 || p < 1 || nxi < 1 || w0 < 1)
    throw std::invalid_argument("verify_io_noisefree: empty data");
  if (ed.Xip.rows() != nxi || ed.Xip.cols() != w0 || ed.Uxi.cols() != w0 ||
      ed.Yxi.cols() != w0)
    throw std::invalid_argument("verify_io_noisefree: inconsistent data");
  if (Pi.m() != m || Pi.p() != p)
    throw std::invalid_argument("verify_io_noisefree: supply rate dimensions");

  Matrix Xi = ed.Xi, Xip = ed.Xip, U = ed.Uxi, Y = ed.Yxi;
  if (cfg.compress_data_lmi) {
    // same facial reduction as the state verifier: the LMI vanishes off the
    // row space of the stacked data
    Matrix Z(2 * nxi + m + p, w0);
    Z.topRows(nxi) = ed.Xi;
    Z.middleRows(nxi, nxi) = ed.Xip;
    Z.middleRows(2 * nxi, m) = ed.Uxi;
    Z.bottomRows(p) = ed.Yxi;
    Eigen::JacobiSVD<Matrix> svd(Z.transpose(), Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    double cutoff =
        sv.size() > 0 ? 1e-13 * sv(0) * std::max<int>(w0, 2 * nxi + m + p)
                      : 0.0;
    int r = 0;
    while (r < sv.size() && sv(r) > cutoff) ++r;
    Matrix V = svd.matrixU().leftCols(r);
    Xi = ed.Xi * V;
    Xip = ed.Xip * V;
    U = ed.Uxi * V;
    Y = ed.Yxi * V;
  }
  const int w = static_cast<int>(Xi.cols());

  SymVariable Pv{nxi, 0};
  SdpProblem prob;
  prob.num_vars = Pv.count();

  LmiConstraint main;
  Matrix UY(m + p, w);
  UY.topRows(m) = U;
  UY.bottomRows(p) = Y;
  main.constant = sym(UY.transpose() * Pi.full() * UY);
  double mass = main.constant.norm();
  main.coeffs.reserve(prob.num_vars);
  for (int k = 0; k < prob.num_vars; ++k) {
    Matrix E = Pv.basis(k);
    main.coeffs.push_back(
        sym(Xi.transpose() * E * Xi - Xip.transpose() * E * Xip));
    mass += main.coeffs.back().norm();
  }
  main.strictness = cfg.storage == StorageMode::StrictPd
                        ? Strictness::Strict
                        : Strictness::NonStrict;
  main.label = "data dissipation";
  if (w > 0 && mass > 0.0) prob.constraints.push_back(std::move(main));

  if (cfg.storage != StorageMode::Free) {
    LmiConstraint psd;
    psd.constant = Matrix::Zero(nxi, nxi);
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

  if (s.status == SdpStatus::Feasible && pe_order_checked) {
    v.status = Status::Dissipative;
    Certificate cert;
    cert.P = Pv.unpack(s.x);
    v.certificate = cert;
  } else if (s.status == SdpStatus::Feasible) {
    // the necessity direction needs persistency of excitation of order
    // n + l + 1, which the verifier cannot check without knowing n
    v.status = Status::Inconclusive;
    v.notes =
        "persistency of excitation of the required order was not asserted; "
        "feasibility alone is only a consistency check";
  } else if (s.status == SdpStatus::Infeasible) {
    v.status = Status::NotDissipative;
  } else {
    v.status = Status::Unknown;
    v.notes = "solver could not decide the data LMI";
  }
  return v;
}

NoiseBoundQuadratic io_noise_set(double vbar, int N, int l, int m_v) {
  if (vbar < 0.0)
    throw std::invalid_argument("io_noise_set: vbar must be >= 0");
  if (l < 1 || N <= l)
    throw std::invalid_argument("io_noise_set: need N > l >= 1");
  if (m_v < 1) throw std::invalid_argument("io_noise_set: m_v must be >= 1");
  return norm_bound_noise_set(vbar, N - l, m_v, NoiseTarget::ProcessOutput);
}

QuadraticMatrixSet sigma_uy_quadratic(const ExtendedData& ed,
                                      const NoiseBoundQuadratic& nb) {
  return sigma_uy_quadratic(ed, nb, Matrix::Identity(ed.p(), ed.p()));
}

QuadraticMatrixSet sigma_uy_quadratic(const ExtendedData& ed,
                                      const NoiseBoundQuadratic& nb,
                                      const Matrix& bv) {
  const int m = ed.m(), p = ed.p(), nxi = ed.nxi(), w = ed.width();
  if (m < 1 || p < 1 || nxi < 1 || w < 1)
    throw std::invalid_argument("sigma_uy_quadratic: empty data");
  if (nb.span() != w)
    throw std::invalid_argument(
        "sigma_uy_quadratic: noise span must equal the number of used "
        "samples");
  if (bv.rows() != p || bv.cols() != nb.width())
    throw std::invalid_argument("sigma_uy_quadratic: bv dimensions");

  Matrix Z(nxi + m, w);
  Z.topRows(nxi) = ed.Xi;
  Z.bottomRows(m) = ed.Uxi;

  QuadraticMatrixSet set;
  set.Qbar = sym(Z * nb.Qn * Z.transpose());
  set.Sbar = -Z * (nb.Qn * ed.Yxi.transpose() + nb.Sn * bv.transpose());
  set.Rbar = sym(ed.Yxi * nb.Qn * ed.Yxi.transpose() +
                 ed.Yxi * nb.Sn * bv.transpose() +
                 bv * nb.Sn.transpose() * ed.Yxi.transpose() +
                 bv * nb.Rn * bv.transpose());
  return set;
}

SdpProblem assemble_robust_io_lmi(const QuadraticMatrixSet& set,
                                  const Matrix& A1, const Matrix& B1,
                                  const InverseSupplyParam& inv,
                                  const VerifyConfig& cfg) {
  const int p = set.rows();
  const int nxi = static_cast<int>(A1.cols());
  const int m = set.cols() - nxi;
  const int q = nxi - p;
  if (p < 1 || m < 1 || q < 1)
    throw std::invalid_argument("assemble_robust_io_lmi: degenerate set");
  if (A1.rows() != q || B1.rows() != q || B1.cols() != m)
    throw std::invalid_argument(
        "assemble_robust_io_lmi: shift-row dimensions");
  if (inv.constant.m() != m || inv.constant.p() != p)
    throw std::invalid_argument(
        "assemble_robust_io_lmi: inverse supply dimensions");
  if (inv.has_scalar && (inv.linear.m() != m || inv.linear.p() != p))
    throw std::invalid_argument(
        "assemble_robust_io_lmi: affine inverse supply dimensions");
  // this condition wants Rt <= 0, opposite to the state-data one
  if (cfg.enforce_inverse_sign && !inv.has_scalar &&
      !is_psd(Matrix(-inv.constant.Rt)))
    throw std::invalid_argument(
        "assemble_robust_io_lmi: inverse supply Rt block fails the sign "
        "hypothesis");

  // column layout of the congruence factor:
  //   next-window dual | new output | (window; input) joint
  const int tot = 2 * nxi + m + p;
  Matrix L1 = Matrix::Zero(nxi, tot);
  L1.block(0, 0, nxi, q) = A1.transpose();
  L1.block(0, nxi + p, nxi, nxi) = Matrix::Identity(nxi, nxi);
  Matrix L2 = Matrix::Zero(nxi, tot);
  L2.block(0, 0, nxi, nxi) = -Matrix::Identity(nxi, nxi);
  Matrix L3 = Matrix::Zero(m, tot);
  L3.block(0, 0, m, q) = B1.transpose();
  L3.block(0, 2 * nxi + p, m, m) = Matrix::Identity(m, m);
  Matrix L4 = Matrix::Zero(p, tot);
  L4.block(0, nxi, p, p) = -Matrix::Identity(p, p);
  Matrix Lsup(m + p, tot);
  Lsup.topRows(m) = L3;
  Lsup.bottomRows(p) = L4;
  // the unknown-row image shows up twice: as the new output and as the
  // freshly appended window slot, hence the summed selector in the last row
  Matrix Ld(nxi + m + p, tot);
  Ld.setZero();
  Ld.block(0, nxi + p, nxi + m, nxi + m) =
      Matrix::Identity(nxi + m, nxi + m);
  Ld.block(nxi + m, q, p, p) = Matrix::Identity(p, p);
  Ld.block(nxi + m, nxi, p, p) = Matrix::Identity(p, p);

  Matrix Omega(nxi + m + p, nxi + m + p);
  Omega.topLeftCorner(nxi + m, nxi + m) = set.Qbar;
  Omega.topRightCorner(nxi + m, p) = set.Sbar;
  Omega.bottomLeftCorner(p, nxi + m) = set.Sbar.transpose();
  Omega.bottomRightCorner(p, p) = set.Rbar;

  SymVariable Pv{nxi, 0};
  const int np = Pv.count();
  const int tau_idx = np;
  const int scalar_idx = np + 1;

  SdpProblem prob;
  prob.num_vars = np + 1 + (inv.has_scalar ? 1 : 0);
  prob.var_names.resize(prob.num_vars);
  for (int k = 0; k < np; ++k)
    prob.var_names[k] = "P[" + std::to_string(k) + "]";
  prob.var_names[tau_idx] = "tau";
  if (inv.has_scalar) prob.var_names[scalar_idx] = "s";

  LmiConstraint main;
  main.constant =
      sym(-(Lsup.transpose() * inverse_supply_full(inv.constant) * Lsup));
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
  psd.constant = Matrix::Zero(nxi, nxi);
  psd.coeffs.assign(prob.num_vars, Matrix::Zero(nxi, nxi));
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

std::string io_rt_sign_note(const InverseSupplyRate& inv,
                            const VerifyConfig& cfg, const char* where) {
  if (is_psd(Matrix(-inv.Rt))) return {};
  if (cfg.enforce_inverse_sign)
    throw std::invalid_argument(std::string(where) +
                                ": inverse supply Rt block fails the sign "
                                "hypothesis");
  return "warning: inverse supply Rt block fails the sign hypothesis of the "
         "robust condition\n";
}

}  // namespace

Verdict verify_io_robust(const QuadraticMatrixSet& set, const Matrix& A1,
                         const Matrix& B1, const SupplyRate& Pi,
                         const VerifyConfig& cfg) {
  InverseSupplyRate inv = invert(Pi);
  std::string note = io_rt_sign_note(inv, cfg, "verify_io_robust");
  auto assemble = [&](const InverseSupplyParam& par) {
    return assemble_robust_io_lmi(set, A1, B1, par, cfg);
  };
  return detail::verify_fixed_generic(assemble, static_cast<int>(A1.cols()),
                                      inv, std::move(note), cfg);
}

Verdict optimize_gain_io_robust(const QuadraticMatrixSet& set,
                                const Matrix& A1, const Matrix& B1,
                                const VerifyConfig& cfg) {
  const int nxi = static_cast<int>(A1.cols());
  const int m = set.cols() - nxi;
  const int p = set.rows();
  auto assemble = [&](const InverseSupplyParam& par) {
    return assemble_robust_io_lmi(set, A1, B1, par, cfg);
  };
  return detail::optimize_scalar_generic(
      assemble, nxi, InverseSupplyParam::gain_mu(m, p), cfg, true);
}

Verdict optimize_passivity_io_robust(const QuadraticMatrixSet& set,
                                     const Matrix& A1, const Matrix& B1,
                                     const VerifyConfig& cfg) {
  const int nxi = static_cast<int>(A1.cols());
  const int m = set.cols() - nxi;
  if (set.rows() != m)
    throw std::invalid_argument(
        "optimize_passivity_io_robust: passivity needs a square channel");
  auto assemble = [&](const InverseSupplyParam& par) {
    return assemble_robust_io_lmi(set, A1, B1, par, cfg);
  };
  return detail::optimize_scalar_generic(
      assemble, nxi, InverseSupplyParam::passivity_rho(m), cfg, false);
}

std::vector<std::pair<Matrix, Matrix>> sample_consistent_io_systems(
    const QuadraticMatrixSet& set, const ExtendedData& ed,
    const NoiseBoundQuadratic& nb, const Matrix& bv, int count,
    std::uint64_t seed) {
  if (count < 1)
    throw std::invalid_argument("sample_consistent_io_systems: count >= 1");
  const int m = ed.m(), p = ed.p(), nxi = ed.nxi(), w = ed.width();
  if (set.rows() != p || set.cols() != nxi + m)
    throw std::invalid_argument(
        "sample_consistent_io_systems: set/data mismatch");
  if (nb.span() != w || bv.rows() != p || bv.cols() != nb.width())
    throw std::invalid_argument(
        "sample_consistent_io_systems: noise dimensions");

  Matrix Z(nxi + m, w);
  Z.topRows(nxi) = ed.Xi;
  Z.bottomRows(m) = ed.Uxi;
  Matrix Zp = right_pinv(Z);
  Matrix J0 = ed.Yxi * Zp;

  auto refit = [&](const Matrix& W) { return Matrix((ed.Yxi - bv * W) * Zp); };
  std::vector<Matrix> members = detail::sample_set_members(
      set, J0, nb, refit, count, seed, "sample_consistent_io_systems");

  std::vector<std::pair<Matrix, Matrix>> out;
  out.reserve(members.size());
  for (const Matrix& J : members)
    out.emplace_back(J.leftCols(nxi), J.rightCols(m));
  return out;
}

}  // namespace ddv
