#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "ddv/bisect.hpp"
#include "ddv/lti.hpp"
#include "ddv/verify_state.hpp"
#include "test_util.hpp"

using namespace ddv;

namespace {

LtiSystem s1() {
  return LtiSystem{Matrix::Constant(1, 1, 0.5), Matrix::Ones(1, 1),
                   Matrix::Ones(1, 1), Matrix::Zero(1, 1)};
}

Matrix random_input(std::mt19937_64& rng, int m, int N, double scale = 1.0) {
  std::uniform_real_distribution<double> U(-scale, scale);
  Matrix u(m, N);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < N; ++k) u(i, k) = U(rng);
  return u;
}

// process noise with per-step norm at most wbar, so the aggregate bound
// W W^T <= wbar^2 N I holds by construction
Matrix bounded_noise(std::mt19937_64& rng, int rows, int N, double wbar) {
  std::normal_distribution<double> G(0.0, 1.0);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  Matrix w(rows, N);
  for (int k = 0; k < N; ++k) {
    Vector dir(rows);
    for (int i = 0; i < rows; ++i) dir(i) = G(rng);
    double nrm = dir.norm();
    if (nrm == 0.0) nrm = 1.0;
    w.col(k) = dir * (wbar * U(rng) / nrm);
  }
  return w;
}

StateDataMatrices noisefree_data(const LtiSystem& sys, int N,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Matrix u = random_input(rng, sys.m(), N);
  return build_state_data(simulate(sys, u, Vector::Zero(sys.n())));
}

struct NoisyData {
  StateDataMatrices d;
  Matrix w;  // the realized noise, a member of the wbar ball
};

NoisyData noisy_data(const LtiSystem& sys, int N, double wbar,
                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Matrix u = random_input(rng, sys.m(), N);
  Matrix w = bounded_noise(rng, sys.n(), N, wbar);
  Matrix Bw = Matrix::Identity(sys.n(), sys.n());
  NoisyData out;
  out.d = build_state_data(simulate(sys, u, Vector::Zero(sys.n()), w, Bw));
  out.w = w;
  return out;
}

// lambda_max of the model dissipation LMI matrix at a fixed storage P;
// dissipativity with that storage means the value is <= 0
double model_lmi_excess(const LtiSystem& sys, const SupplyRate& Pi,
                        const Matrix& P) {
  KypBlocks kb = kyp_blocks(sys, Pi);
  int n = sys.n(), m = sys.m();
  Matrix M(n + m, n + m);
  M.topLeftCorner(n, n) = sys.A.transpose() * P * sys.A - P - kb.Qhat;
  M.topRightCorner(n, m) = sys.A.transpose() * P * sys.B - kb.Shat;
  M.bottomLeftCorner(m, n) = M.topRightCorner(n, m).transpose();
  M.bottomRightCorner(m, m) = sys.B.transpose() * P * sys.B - kb.Rhat;
  return max_eigenvalue(M);
}

double robust_gain(const StateDataMatrices& d, const Matrix& C, const Matrix& D,
                   const NoiseBoundQuadratic& nb) {
  QuadraticMatrixSet set = sigma_xu_quadratic(d, nb);
  Verdict v = optimize_gain_robust(set, C, D);
  REQUIRE(v.status == Status::Dissipative);
  REQUIRE(v.certificate.has_value());
  return v.certificate->performance;
}

}  // namespace

TEST_CASE("sigma_xu_quadratic matches the defining formulas") {
  StateDataMatrices d;
  d.X = (Matrix(1, 2) << 1.0, 2.0).finished();
  d.Xp = (Matrix(1, 2) << 2.0, 3.0).finished();
  d.U = (Matrix(1, 2) << 0.5, -1.0).finished();

  Matrix Qn = -Matrix::Identity(2, 2);
  Matrix Sn = (Matrix(2, 1) << 0.1, 0.2).finished();
  Matrix Rn = Matrix::Constant(1, 1, 0.3);
  NoiseBoundQuadratic nb(Qn, Sn, Rn, NoiseTarget::ProcessState);
  Matrix Bw = Matrix::Constant(1, 1, 1.5);

  QuadraticMatrixSet set = sigma_xu_quadratic(d, nb, Bw);
  Matrix Z(2, 2);
  Z.row(0) = d.X;
  Z.row(1) = d.U;
  CHECK_MATRIX(set.Qbar, Matrix(Z * Qn * Z.transpose()), 1e-14);
  CHECK_MATRIX(set.Sbar,
               Matrix(-Z * (Qn * d.Xp.transpose() + Sn * Bw.transpose())),
               1e-14);
  Matrix Rbar = d.Xp * Qn * d.Xp.transpose() + d.Xp * Sn * Bw.transpose() +
                Bw * Sn.transpose() * d.Xp.transpose() +
                Bw * Rn * Bw.transpose();
  CHECK_MATRIX(set.Rbar, Rbar, 1e-14);
  CHECK(set.rows() == 1);
  CHECK(set.cols() == 2);

  // membership form agrees with the noise-set form of the implied noise
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  QuadraticMatrixSet eye = sigma_xu_quadratic(d, nb);  // Bw = I overload
  for (int t = 0; t < 10; ++t) {
    Matrix J(1, 2);
    J << U(rng), U(rng);
    Matrix direct = J * eye.Qbar * J.transpose() + J * eye.Sbar +
                    eye.Sbar.transpose() * J.transpose() + eye.Rbar;
    CHECK_MATRIX(eye.membership_form(J), direct, 1e-13);
    Matrix W = d.Xp - J * Z;
    CHECK_MATRIX(eye.membership_form(J), membership_form(nb, W), 1e-12);
  }

  CHECK_THROWS_AS(sigma_xu_quadratic(d, nb, Matrix::Identity(2, 2)),
                  std::invalid_argument);
}

TEST_CASE("the true system is in the consistency set") {
  LtiSystem sys = random_system(3, 2, 2, 0.2, 42);
  NoisyData nd = noisy_data(sys, 40, 0.01, 5);
  NoiseBoundQuadratic nb = norm_bound_noise_set(0.01, 40, 3);
  REQUIRE(membership(nb, nd.w));

  QuadraticMatrixSet set = sigma_xu_quadratic(nd.d, nb);
  Matrix J(3, 5);
  J << sys.A, sys.B;
  CHECK(set.contains(J));

  // noise-free data with a zero bound: truth sits exactly on the boundary
  StateDataMatrices d0 = noisefree_data(sys, 40, 6);
  NoiseBoundQuadratic nb0 = norm_bound_noise_set(0.0, 40, 3);
  QuadraticMatrixSet set0 = sigma_xu_quadratic(d0, nb0);
  CHECK(set0.membership_form(J).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(set0.contains(J));
}

TEST_CASE("noise-free verifier hits the scalar anchors") {
  StateDataMatrices d = noisefree_data(s1(), 20, 11);
  Matrix C = Matrix::Ones(1, 1), D = Matrix::Zero(1, 1);

  Verdict hi = verify_noisefree(d, C, D, gain_supply(2.01, 1, 1));
  CHECK(hi.status == Status::Dissipative);
  REQUIRE(hi.certificate.has_value());
  CHECK(model_lmi_excess(s1(), gain_supply(2.01, 1, 1), hi.certificate->P) <
        1e-8);
  CHECK(std::isnan(hi.certificate->tau));

  Verdict lo = verify_noisefree(d, C, D, gain_supply(1.9, 1, 1));
  CHECK(lo.status == Status::NotDissipative);
  CHECK_FALSE(lo.certificate.has_value());

  // passivity index of S1 is -2/3
  Verdict pass = verify_noisefree(d, C, D, passivity_supply(-0.70, 1));
  CHECK(pass.status == Status::Dissipative);
  Verdict fail = verify_noisefree(d, C, D, passivity_supply(-0.60, 1));
  CHECK(fail.status == Status::NotDissipative);
}

TEST_CASE("zero data is inconclusive with rank diagnostics") {
  StateDataMatrices d;
  d.X = Matrix::Zero(1, 5);
  d.Xp = Matrix::Zero(1, 5);
  d.U = Matrix::Zero(1, 5);
  Verdict v = verify_noisefree(d, Matrix::Ones(1, 1), Matrix::Zero(1, 1),
                               gain_supply(1.0, 1, 1));
  CHECK(v.status == Status::Inconclusive);
  CHECK(v.achieved_rank == 0);
  CHECK(v.required_rank == 2);
  CHECK(v.notes.find("rank") != std::string::npos);
}

TEST_CASE("noise-free verdicts match the model LMI on random systems") {
  std::mt19937_64 rng(303);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 2 + static_cast<int>(rng() % 3);
    int m = 1 + static_cast<int>(rng() % 2);
    int p = 1 + static_cast<int>(rng() % 2);
    LtiSystem sys = random_system(n, m, p, 0.15, 500 + trial);
    StateDataMatrices d = noisefree_data(sys, 30, 900 + trial);
    REQUIRE(check_rank_condition(d));

    double gtrue = hinf_oracle(sys);
    for (double f : {0.9, 1.1}) {
      SupplyRate Pi = gain_supply(f * gtrue, m, p);
      Verdict data_v = verify_noisefree(d, sys.C, sys.D, Pi);
      Verdict model_v = model_dissipativity_check(sys, Pi);
      CAPTURE(trial);
      CAPTURE(f);
      CHECK(data_v.status == model_v.status);
    }
  }
}

TEST_CASE("compressed and uncompressed data LMIs agree") {
  VerifyConfig plain;
  plain.compress_data_lmi = false;
  VerifyConfig packed;
  packed.compress_data_lmi = true;
  Matrix C = Matrix::Ones(1, 1), D = Matrix::Zero(1, 1);

  // noise-free updates keep Xp inside the (X;U) row space, so the
  // uncompressed LMI has a strict interior only when N = rank(X;U); at
  // N = n + m the two paths must agree exactly
  LtiSystem sys = s1();
  std::mt19937_64 rng(3);
  Matrix u = random_input(rng, 1, 2);
  StateDataMatrices d = build_state_data(simulate(sys, u, Vector::Zero(1)));
  REQUIRE(check_rank_condition(d));
  for (double g : {2.05, 1.9}) {
    Verdict a = verify_noisefree(d, C, D, gain_supply(g, 1, 1), plain);
    Verdict b = verify_noisefree(d, C, D, gain_supply(g, 1, 1), packed);
    CHECK(a.status == b.status);
  }

  // longer records force zero eigenvalues off the data row space, so the
  // uncompressed LMI has no interior: infeasibility still agrees, and a
  // feasible compressed verdict must never be contradicted
  StateDataMatrices dlong = noisefree_data(s1(), 24, 3);
  Verdict an = verify_noisefree(dlong, C, D, gain_supply(1.9, 1, 1), plain);
  Verdict bn = verify_noisefree(dlong, C, D, gain_supply(1.9, 1, 1), packed);
  CHECK(an.status == Status::NotDissipative);
  CHECK(bn.status == Status::NotDissipative);
  Verdict ay = verify_noisefree(dlong, C, D, gain_supply(2.01, 1, 1), plain);
  CHECK(verify_noisefree(dlong, C, D, gain_supply(2.01, 1, 1), packed).status ==
        Status::Dissipative);
  CHECK(ay.status != Status::NotDissipative);
}

TEST_CASE("storage sign modes") {
  StateDataMatrices d = noisefree_data(s1(), 20, 19);
  Matrix C = Matrix::Ones(1, 1), D = Matrix::Zero(1, 1);

  VerifyConfig strict;
  strict.storage = StorageMode::StrictPd;
  Verdict v = verify_noisefree(d, C, D, gain_supply(2.1, 1, 1), strict);
  CHECK(v.status == Status::Dissipative);
  REQUIRE(v.certificate.has_value());
  CHECK(min_eigenvalue(v.certificate->P) > 0.0);

  VerifyConfig free_p;
  free_p.storage = StorageMode::Free;
  CHECK(verify_noisefree(d, C, D, gain_supply(2.1, 1, 1), free_p).status ==
        Status::Dissipative);
  CHECK(verify_noisefree(d, C, D, gain_supply(1.9, 1, 1), free_p).status ==
        Status::NotDissipative);
}

TEST_CASE("robust LMI problem shape and multiplier positivity") {
  StateDataMatrices d = noisefree_data(s1(), 20, 23);
  NoiseBoundQuadratic nb = norm_bound_noise_set(1e-6, 20, 1);
  QuadraticMatrixSet set = sigma_xu_quadratic(d, nb);

  SupplyRate Pi = gain_supply(2.1, 1, 1);
  SdpProblem fixed = assemble_robust_lmi(
      set, Matrix::Ones(1, 1), Matrix::Zero(1, 1),
      InverseSupplyParam::fixed(invert(Pi)));
  // n = m = p = 1: main block is (2n+m+p) x (2n+m+p), variables are the
  // packed storage entry plus the multiplier
  REQUIRE(fixed.constraints.size() == 3);
  CHECK(fixed.constraints[0].dim() == 4);
  CHECK(fixed.constraints[0].strictness == Strictness::Strict);
  CHECK(fixed.constraints[1].dim() == 1);
  CHECK(fixed.constraints[1].strictness == Strictness::Strict);
  CHECK(fixed.constraints[2].dim() == 1);
  CHECK(fixed.num_vars == 2);

  SdpProblem affine = assemble_robust_lmi(set, Matrix::Ones(1, 1),
                                          Matrix::Zero(1, 1),
                                          InverseSupplyParam::gain_mu(1, 1));
  CHECK(affine.num_vars == 3);

  // tau = 0 violates the multiplier block
  Vector x = Vector::Zero(fixed.num_vars);
  CHECK(min_eigenvalue(fixed.constraints[2].evaluate(x)) < 0.0);

  Verdict v = verify_robust(set, Matrix::Ones(1, 1), Matrix::Zero(1, 1), Pi);
  REQUIRE(v.status == Status::Dissipative);
  REQUIRE(v.certificate.has_value());
  CHECK(v.certificate->tau > 0.0);
  CHECK(min_eigenvalue(v.certificate->P) > 0.0);
}

TEST_CASE("robust verifier on the scalar anchors") {
  StateDataMatrices d = noisefree_data(s1(), 20, 29);
  NoiseBoundQuadratic nb = norm_bound_noise_set(1e-6, 20, 1);
  QuadraticMatrixSet set = sigma_xu_quadratic(d, nb);
  Matrix C = Matrix::Ones(1, 1), D = Matrix::Zero(1, 1);

  CHECK(verify_robust(set, C, D, gain_supply(2.1, 1, 1)).status ==
        Status::Dissipative);

  // below the true gain: the theorem is sufficient only, so never
  // "not dissipative" from this path
  Verdict below = verify_robust(set, C, D, gain_supply(1.5, 1, 1));
  CHECK(below.status == Status::Unknown);
  CHECK_FALSE(below.certificate.has_value());

  Verdict gain = optimize_gain_robust(set, C, D);
  REQUIRE(gain.status == Status::Dissipative);
  REQUIRE(gain.certificate.has_value());
  double ghat = gain.certificate->performance;
  CHECK(ghat >= 2.0 - 1e-4);
  CHECK(ghat <= 2.1);
  CHECK(gain.certificate->tau > 0.0);

  Verdict pass = optimize_passivity_robust(set, C, D);
  REQUIRE(pass.status == Status::Dissipative);
  double rhat = pass.certificate->performance;
  CHECK(rhat >= -0.70);
  CHECK(rhat <= -0.66);
  CHECK(rhat <= passivity_oracle(s1()) + 1e-4);
}

TEST_CASE("gain bound grows with the noise description") {
  StateDataMatrices d = noisefree_data(s1(), 20, 31);
  Matrix C = Matrix::Ones(1, 1), D = Matrix::Zero(1, 1);
  NoiseBoundQuadratic base = norm_bound_noise_set(0.005, 20, 1);

  double prev = 0.0;
  for (double k : {1.0, 2.0, 4.0}) {
    NoiseBoundQuadratic nb(base.Qn, base.Sn, Matrix(k * base.Rn),
                           NoiseTarget::ProcessState);
    double ghat = robust_gain(d, C, D, nb);
    CHECK(ghat >= prev * (1.0 - 1e-4));
    prev = ghat;
  }
}

TEST_CASE("robust bound approaches the noise-free value as the bound shrinks") {
  StateDataMatrices d = noisefree_data(s1(), 20, 37);
  Matrix C = Matrix::Ones(1, 1), D = Matrix::Zero(1, 1);

  double gnf = min_accepted(
      [&](double g) {
        return verify_noisefree(d, C, D, gain_supply(g, 1, 1)).status ==
               Status::Dissipative;
      },
      1e-3, 1.0, 1e-6);
  CHECK(gnf == doctest::Approx(2.0).epsilon(1e-3));

  double last = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (double wbar : {1e-2, 1e-4, 1e-6}) {
    NoiseBoundQuadratic nb = norm_bound_noise_set(wbar, 20, 1);
    last = robust_gain(d, C, D, nb);
    CHECK(last <= prev * (1.0 + 1e-4));
    CHECK(last >= gnf - 1e-3);
    prev = last;
  }
  CHECK(last <= gnf * 1.01);
}

TEST_CASE("robust gain upper-bounds the truth and sampled systems comply") {
  LtiSystem sys = random_system(3, 2, 2, 0.2, 141);
  NoisyData nd = noisy_data(sys, 50, 0.01, 51);
  NoiseBoundQuadratic nb = norm_bound_noise_set(0.01, 50, 3);
  QuadraticMatrixSet set = sigma_xu_quadratic(nd.d, nb);

  double gtrue = hinf_oracle(sys);
  double ghat = robust_gain(nd.d, sys.C, sys.D, nb);
  CHECK(ghat >= gtrue - 1e-4);

  SupplyRate Pi = gain_supply(ghat * 1.001, 2, 2);
  Verdict cert = verify_robust(set, sys.C, sys.D, Pi);
  REQUIRE(cert.status == Status::Dissipative);

  Matrix Bw = Matrix::Identity(3, 3);
  auto samples = sample_consistent_systems(set, nd.d, nb, Bw, 20, 99);
  REQUIRE(samples.size() == 20);
  Matrix Pinv = cert.certificate->P.inverse();
  for (const auto& [Ad, Bd] : samples) {
    Matrix J(3, 5);
    J << Ad, Bd;
    CHECK(set.contains(J));
    LtiSystem sampled{Ad, Bd, sys.C, sys.D};
    CHECK(model_dissipativity_check(sampled, Pi).status ==
          Status::Dissipative);
    // dualization: the inverse of the robust certificate is a storage
    // matrix for every consistent system
    CHECK(model_lmi_excess(sampled, Pi, Pinv) <= 1e-6);
  }
}

TEST_CASE("sampler recovers the truth from noise-free data") {
  LtiSystem sys = random_system(2, 1, 1, 0.2, 7);
  StateDataMatrices d = noisefree_data(sys, 30, 63);
  NoiseBoundQuadratic nb = norm_bound_noise_set(1e-9, 30, 2);
  QuadraticMatrixSet set = sigma_xu_quadratic(d, nb);
  Matrix Bw = Matrix::Identity(2, 2);

  auto samples = sample_consistent_systems(set, d, nb, Bw, 7, 5);
  REQUIRE(samples.size() == 7);
  auto [Als, Bls] = ls_identify(d.X, d.Xp, d.U);
  CHECK_MATRIX(samples[0].first, Als, 1e-12);
  CHECK_MATRIX(samples[0].second, Bls, 1e-12);
  // the spread is set by the semidefinite tolerance floor of the membership
  // test, not by the (tiny) noise ball
  for (const auto& [Ad, Bd] : samples) {
    CHECK_MATRIX(Ad, sys.A, 1e-4);
    CHECK_MATRIX(Bd, sys.B, 1e-4);
  }
}

TEST_CASE("inverse supply sign enforcement") {
  // Pi = -I has inverse with Rt = -I, violating the theorem hypothesis
  SupplyRate bad = custom_supply(-Matrix::Identity(1, 1), Matrix::Zero(1, 1),
                                 -Matrix::Identity(1, 1));
  StateDataMatrices d = noisefree_data(s1(), 20, 41);
  NoiseBoundQuadratic nb = norm_bound_noise_set(1e-6, 20, 1);
  QuadraticMatrixSet set = sigma_xu_quadratic(d, nb);
  Matrix C = Matrix::Ones(1, 1), D = Matrix::Zero(1, 1);

  VerifyConfig enforce;
  enforce.enforce_inverse_sign = true;
  CHECK_THROWS_AS(verify_robust(set, C, D, bad, enforce),
                  std::invalid_argument);

  Verdict v = verify_robust(set, C, D, bad);
  CHECK(v.notes.find("sign") != std::string::npos);
  CHECK(v.status != Status::NotDissipative);
}

TEST_CASE("near-static passive system yields an index near one") {
  LtiSystem sys{Matrix::Constant(1, 1, 0.1), Matrix::Constant(1, 1, 0.01),
                Matrix::Constant(1, 1, 0.01), Matrix::Ones(1, 1)};
  StateDataMatrices d = noisefree_data(sys, 25, 47);
  NoiseBoundQuadratic nb = norm_bound_noise_set(1e-7, 25, 1);
  QuadraticMatrixSet set = sigma_xu_quadratic(d, nb);

  Verdict v = optimize_passivity_robust(set, sys.C, sys.D);
  REQUIRE(v.status == Status::Dissipative);
  double rhat = v.certificate->performance;
  CHECK(rhat > 0.8);
  CHECK(rhat <= passivity_oracle(sys) + 1e-4);
}
