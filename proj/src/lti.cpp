#include "ddv/lti.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ddv/bisect.hpp"

namespace ddv {

namespace {

void check_system(const LtiSystem& sys) {
  if (sys.A.rows() != sys.A.cols())
    throw std::invalid_argument("lti: A must be square");
  if (sys.B.rows() != sys.A.rows() || sys.C.cols() != sys.A.rows())
    throw std::invalid_argument("lti: B or C does not match the state dimension");
  if (sys.D.rows() != sys.C.rows() || sys.D.cols() != sys.B.cols())
    throw std::invalid_argument("lti: D does not match the channel dimensions");
}

double spectral_radius(const Matrix& A) {
  if (A.size() == 0) return 0.0;
  Eigen::VectorXcd ev = Eigen::EigenSolver<Matrix>(A).eigenvalues();
  double rho = 0.0;
  for (int i = 0; i < ev.size(); ++i) rho = std::max(rho, std::abs(ev(i)));
  return rho;
}

Eigen::MatrixXcd transfer_at(const LtiSystem& sys, double omega) {
  const std::complex<double> z(std::cos(omega), std::sin(omega));
  if (sys.n() == 0) return sys.D.cast<std::complex<double>>();
  Eigen::MatrixXcd zIA =
      z * Eigen::MatrixXcd::Identity(sys.n(), sys.n()) - sys.A.cast<std::complex<double>>();
  Eigen::MatrixXcd X = zIA.partialPivLu().solve(sys.B.cast<std::complex<double>>());
  return sys.C.cast<std::complex<double>>() * X + sys.D.cast<std::complex<double>>();
}

double gain_at(const LtiSystem& sys, double omega) {
  Eigen::MatrixXcd G = transfer_at(sys, omega);
  if (G.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(G).singularValues()(0);
}

double real_part_floor_at(const LtiSystem& sys, double omega) {
  Eigen::MatrixXcd G = transfer_at(sys, omega);
  Eigen::MatrixXcd H = 0.5 * (G + G.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  return es.eigenvalues()(0);
}

// Golden-section search; keeps the best evaluated point, so the result never
// falls below the value at either bracket edge.
double golden_extremum(const std::function<double(double)>& f, double a,
                       double b, bool maximize) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double best = std::max(maximize ? f(a) : -f(a), maximize ? f(b) : -f(b));
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = maximize ? f(x1) : -f(x1);
  double f2 = maximize ? f(x2) : -f(x2);
  best = std::max({best, f1, f2});
  for (int it = 0; it < 90 && b - a > 1e-13; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = maximize ? f(x2) : -f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = maximize ? f(x1) : -f(x1);
    }
    best = std::max({best, f1, f2});
  }
  return maximize ? best : -best;
}

// Shared grid sweep: fills vals over [0, pi], takes the grid extremum, then
// refines around the top local extrema. The parallel and serial paths fill
// the same per-frequency values, so the two variants agree exactly.
double grid_extremum(const LtiSystem& sys, int grid_size, bool refine,
                     bool parallel, bool maximize,
                     const std::function<double(double)>& f) {
  if (grid_size < 2)
    throw std::invalid_argument("frequency oracle: grid too small");
  const double pi = 3.14159265358979323846;
  std::vector<double> omega(grid_size), vals(grid_size);
  for (int k = 0; k < grid_size; ++k)
    omega[k] = pi * static_cast<double>(k) / (grid_size - 1);
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (int k = 0; k < grid_size; ++k) vals[k] = f(omega[k]);
  } else {
    for (int k = 0; k < grid_size; ++k) vals[k] = f(omega[k]);
  }
  const double sign = maximize ? 1.0 : -1.0;
  double best = sign * vals[0];
  for (int k = 1; k < grid_size; ++k) best = std::max(best, sign * vals[k]);

  if (refine) {
    std::vector<std::pair<double, int>> peaks;
    for (int k = 0; k < grid_size; ++k) {
      double v = sign * vals[k];
      bool left_ok = (k == 0) || v >= sign * vals[k - 1];
      bool right_ok = (k == grid_size - 1) || v >= sign * vals[k + 1];
      if (left_ok && right_ok) peaks.push_back({-v, k});
    }
    std::sort(peaks.begin(), peaks.end());
    const int take = std::min<int>(3, static_cast<int>(peaks.size()));
    for (int i = 0; i < take; ++i) {
      int k = peaks[i].second;
      double a = omega[std::max(0, k - 1)];
      double b = omega[std::min(grid_size - 1, k + 1)];
      best = std::max(best, sign * golden_extremum(f, a, b, maximize));
    }
  }
  return sign * best;
}

}  // namespace

Trajectory simulate(const LtiSystem& sys, const Matrix& u, const Vector& x0,
                    const Matrix& w, const Matrix& Bw) {
  check_system(sys);
  const int N = static_cast<int>(u.cols());
  if (u.rows() != sys.m())
    throw std::invalid_argument("simulate: input rows do not match the system");
  if (x0.size() != sys.n())
    throw std::invalid_argument("simulate: initial state dimension mismatch");
  if (w.cols() != N)
    throw std::invalid_argument("simulate: noise must have one column per step");
  if (Bw.rows() != sys.n() || Bw.cols() != w.rows())
    throw std::invalid_argument("simulate: Bw does not match the noise shape");
  Trajectory t;
  t.u = u;
  t.x.resize(sys.n(), N + 1);
  t.y.resize(sys.p(), N);
  t.x.col(0) = x0;
  for (int k = 0; k < N; ++k) {
    t.y.col(k) = sys.C * t.x.col(k) + sys.D * u.col(k);
    t.x.col(k + 1) = sys.A * t.x.col(k) + sys.B * u.col(k) + Bw * w.col(k);
  }
  return t;
}

Trajectory simulate(const LtiSystem& sys, const Matrix& u, const Vector& x0) {
  return simulate(sys, u, x0, Matrix::Zero(0, u.cols()),
                  Matrix::Zero(sys.A.rows(), 0));
}

Matrix observability_matrix(const LtiSystem& sys, int l) {
  check_system(sys);
  if (l < 1) throw std::invalid_argument("observability_matrix: l must be positive");
  Matrix O(sys.p() * l, sys.n());
  Matrix Ck = sys.C;
  for (int i = 0; i < l; ++i) {
    O.middleRows(i * sys.p(), sys.p()) = Ck;
    Ck = Ck * sys.A;
  }
  return O;
}

int lag(const LtiSystem& sys) {
  check_system(sys);
  for (int l = 1; l <= sys.n(); ++l)
    if (rank_with_tol(observability_matrix(sys, l)) == sys.n()) return l;
  throw std::invalid_argument("lag: realization is not observable");
}

KypBlocks kyp_blocks(const LtiSystem& sys, const SupplyRate& Pi) {
  check_system(sys);
  if (Pi.m() != sys.m() || Pi.p() != sys.p())
    throw std::invalid_argument("kyp_blocks: supply dimensions do not match");
  KypBlocks k;
  k.Qhat = sys.C.transpose() * Pi.Q * sys.C;
  k.Shat = sys.C.transpose() * Pi.S + sys.C.transpose() * Pi.Q * sys.D;
  k.Rhat = sys.D.transpose() * Pi.Q * sys.D + sys.D.transpose() * Pi.S +
           Pi.S.transpose() * sys.D + Pi.R;
  return k;
}

Verdict model_dissipativity_check(const LtiSystem& sys, const SupplyRate& Pi,
                                  StorageMode mode, const SolverConfig& cfg) {
  KypBlocks kb = kyp_blocks(sys, Pi);
  const int n = sys.n(), m = sys.m();
  SymVariable P{n, 0};

  SdpProblem prob;
  prob.num_vars = P.count();

  LmiConstraint diss;  // -(dissipation block) >= 0
  diss.label = "dissipation";
  diss.constant = Matrix::Zero(n + m, n + m);
  diss.constant.topLeftCorner(n, n) = kb.Qhat;
  diss.constant.topRightCorner(n, m) = kb.Shat;
  diss.constant.bottomLeftCorner(m, n) = kb.Shat.transpose();
  diss.constant.bottomRightCorner(m, m) = kb.Rhat;
  diss.coeffs.resize(P.count());
  for (int k = 0; k < P.count(); ++k) {
    Matrix E = P.basis(k);
    Matrix F = Matrix::Zero(n + m, n + m);
    F.topLeftCorner(n, n) = -(sys.A.transpose() * E * sys.A - E);
    F.topRightCorner(n, m) = -(sys.A.transpose() * E * sys.B);
    F.bottomLeftCorner(m, n) = F.topRightCorner(n, m).transpose();
    F.bottomRightCorner(m, m) = -(sys.B.transpose() * E * sys.B);
    diss.coeffs[k] = F;
  }
  if (mode == StorageMode::StrictPd) diss.strictness = Strictness::Strict;
  prob.constraints.push_back(std::move(diss));

  if (mode != StorageMode::Free) {
    LmiConstraint psd;
    psd.label = "storage";
    psd.constant = Matrix::Zero(n, n);
    psd.coeffs.resize(P.count());
    for (int k = 0; k < P.count(); ++k) psd.coeffs[k] = P.basis(k);
    if (mode == StorageMode::StrictPd) psd.strictness = Strictness::Strict;
    prob.constraints.push_back(std::move(psd));
  }

  SdpSolution s = solve_feasibility(prob, cfg);
  Verdict v;
  MarginReport mr = verify_solution(prob, s.x);
  v.margins = mr.margins;
  v.worst_margin = mr.worst;
  switch (s.status) {
    case SdpStatus::Feasible: {
      v.status = Status::Dissipative;
      Certificate cert;
      cert.P = P.unpack(s.x);
      v.certificate = std::move(cert);
      break;
    }
    case SdpStatus::Infeasible:
      v.status = Status::NotDissipative;
      break;
    default:
      v.status = Status::Inconclusive;
      v.notes = "solver could not decide the model inequality";
      break;
  }
  return v;
}

double hinf_oracle(const LtiSystem& sys, int grid_size, bool refine,
                   bool parallel) {
  check_system(sys);
  if (spectral_radius(sys.A) >= 1.0)
    throw std::invalid_argument("hinf_oracle: A must be Schur stable");
  return grid_extremum(sys, grid_size, refine, parallel, true,
                       [&](double w) { return gain_at(sys, w); });
}

double passivity_oracle(const LtiSystem& sys, int grid_size, bool refine,
                        bool parallel) {
  check_system(sys);
  if (sys.m() != sys.p())
    throw std::invalid_argument("passivity_oracle: channel must be square");
  if (spectral_radius(sys.A) >= 1.0)
    throw std::invalid_argument("passivity_oracle: A must be Schur stable");
  return grid_extremum(sys, grid_size, refine, parallel, false,
                       [&](double w) { return real_part_floor_at(sys, w); });
}

LtiSystem random_system(int n, int m, int p, double stability_margin,
                        std::uint64_t seed) {
  if (n < 1 || m < 1 || p < 1)
    throw std::invalid_argument("random_system: dimensions must be positive");
  if (stability_margin <= 0.0 || stability_margin >= 1.0)
    throw std::invalid_argument("random_system: margin must lie in (0, 1)");
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(attempt));
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    LtiSystem sys;
    sys.A.resize(n, n);
    sys.B.resize(n, m);
    sys.C.resize(p, n);
    sys.D.resize(p, m);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) sys.A(i, j) = U(rng);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) sys.B(i, j) = U(rng);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < n; ++j) sys.C(i, j) = U(rng);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < m; ++j) sys.D(i, j) = U(rng);
    const double target = 0.999 * (1.0 - stability_margin);
    double rho = spectral_radius(sys.A);
    if (rho > target) sys.A *= target / rho;

    Matrix ctrb(n, n * m);
    Matrix col = sys.B;
    for (int k = 0; k < n; ++k) {
      ctrb.middleCols(k * m, m) = col;
      col = sys.A * col;
    }
    if (rank_with_tol(ctrb) != n) continue;
    if (rank_with_tol(observability_matrix(sys, n)) != n) continue;
    return sys;
  }
  throw std::runtime_error("random_system: could not draw a minimal realization");
}

std::pair<Matrix, Matrix> ls_identify(const Matrix& X, const Matrix& Xp,
                                      const Matrix& U) {
  if (X.cols() != Xp.cols() || X.cols() != U.cols() || X.rows() != Xp.rows())
    throw std::invalid_argument("ls_identify: inconsistent data shapes");
  const int n = static_cast<int>(X.rows());
  const int m = static_cast<int>(U.rows());
  Matrix W(n + m, X.cols());
  W.topRows(n) = X;
  W.bottomRows(m) = U;
  Matrix AB = Xp * right_pinv(W);
  return {AB.leftCols(n), AB.rightCols(m)};
}

double gain_from_model_lmi(const LtiSystem& sys, double rel_tol,
                           const SolverConfig& cfg) {
  auto accepted = [&](double g) {
    return model_dissipativity_check(sys, gain_supply(g, sys.m(), sys.p()),
                                     StorageMode::Psd, cfg)
               .status == Status::Dissipative;
  };
  return min_accepted(accepted, 1e-8, 1.0, rel_tol);
}

double passivity_from_model_lmi(const LtiSystem& sys, double rel_tol,
                                const SolverConfig& cfg) {
  auto accepted = [&](double r) {
    return model_dissipativity_check(sys, passivity_supply(r, sys.m()),
                                     StorageMode::Psd, cfg)
               .status == Status::Dissipative;
  };
  return max_accepted(accepted, -1.0, 1.0, rel_tol);
}

}  // namespace ddv
