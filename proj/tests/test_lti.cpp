#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "ddv/lti.hpp"
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

}  // namespace

TEST_CASE("simulate basic recursions") {
  // with A = 0 and B = I the next state equals the input
  LtiSystem integ{Matrix::Zero(2, 2), Matrix::Identity(2, 2),
                  Matrix::Identity(2, 2), Matrix::Zero(2, 2)};
  Matrix u(2, 1);
  u << 3.0, -1.0;
  Vector x0(2);
  x0 << 5.0, 7.0;
  Trajectory t = simulate(integ, u, x0);
  CHECK_MATRIX(Matrix(t.x.col(1)), u, 1e-15);
  CHECK_MATRIX(Matrix(t.y.col(0)), Matrix(x0), 1e-15);

  Matrix u2(1, 2);
  u2 << 1, 0;
  Trajectory ts = simulate(s1(), u2, Vector::Zero(1));
  Matrix xs(1, 3);
  xs << 0, 1, 0.5;
  Matrix ys(1, 2);
  ys << 0, 1;
  CHECK_MATRIX(ts.x, xs, 1e-15);
  CHECK_MATRIX(ts.y, ys, 1e-15);
}

TEST_CASE("simulate with process noise") {
  Matrix u(1, 2), w(1, 2);
  u << 1, 0;
  w << 1, 0;
  Trajectory t = simulate(s1(), u, Vector::Zero(1), w, Matrix::Ones(1, 1));
  Matrix xs(1, 3);
  xs << 0, 2, 1;
  CHECK_MATRIX(t.x, xs, 1e-15);
}

TEST_CASE("simulate is linear in the input") {
  std::mt19937_64 rng(4);
  LtiSystem sys = random_system(3, 2, 2, 0.1, 99);
  Matrix ua = random_input(rng, 2, 12);
  Matrix ub = random_input(rng, 2, 12);
  Trajectory ta = simulate(sys, ua, Vector::Zero(3));
  Trajectory tb = simulate(sys, ub, Vector::Zero(3));
  Trajectory tab = simulate(sys, ua + 2.0 * ub, Vector::Zero(3));
  CHECK_MATRIX(tab.y, Matrix(ta.y + 2.0 * tb.y), 1e-10);
  CHECK_MATRIX(tab.x, Matrix(ta.x + 2.0 * tb.x), 1e-10);
}

TEST_CASE("observability matrix") {
  LtiSystem eye{0.5 * Matrix::Identity(2, 2), Matrix::Ones(2, 1),
                Matrix::Identity(2, 2), Matrix::Zero(2, 1)};
  CHECK_MATRIX(observability_matrix(eye, 1), Matrix::Identity(2, 2), 0.0);

  Matrix O = observability_matrix(s1(), 2);
  Matrix expect(2, 1);
  expect << 1.0, 0.5;
  CHECK_MATRIX(O, expect, 1e-15);

  LtiSystem shift{Matrix::Zero(2, 2), Matrix::Ones(2, 1), Matrix::Zero(1, 2),
                  Matrix::Zero(1, 1)};
  shift.A(0, 1) = 1.0;
  shift.C(0, 0) = 1.0;
  Matrix O3 = observability_matrix(shift, 3);
  Matrix e3(3, 2);
  e3 << 1, 0, 0, 1, 0, 0;
  CHECK_MATRIX(O3, e3, 0.0);
}

TEST_CASE("lag of simple realizations") {
  LtiSystem eye{0.5 * Matrix::Identity(3, 3), Matrix::Ones(3, 1),
                Matrix::Identity(3, 3), Matrix::Zero(3, 1)};
  CHECK(lag(eye) == 1);  // invertible C sees the state in one step
  CHECK(lag(s1()) == 1);

  LtiSystem generic = random_system(4, 2, 2, 0.1, 5);
  CHECK(lag(generic) == 2);

  LtiSystem unobs{Matrix::Zero(2, 2), Matrix::Ones(2, 1), Matrix::Zero(1, 2),
                  Matrix::Zero(1, 1)};
  unobs.A(0, 0) = 0.5;
  unobs.A(1, 1) = 0.3;
  unobs.C(0, 0) = 1.0;
  CHECK_THROWS_AS(lag(unobs), std::invalid_argument);
}

TEST_CASE("kyp blocks on the scalar anchors") {
  KypBlocks g = kyp_blocks(s1(), gain_supply(2.0, 1, 1));
  CHECK(g.Qhat(0, 0) == doctest::Approx(-1.0));
  CHECK(g.Shat(0, 0) == doctest::Approx(0.0));
  CHECK(g.Rhat(0, 0) == doctest::Approx(4.0));

  KypBlocks pp = kyp_blocks(s1(), passivity_supply(0.25, 1));
  CHECK(pp.Qhat(0, 0) == doctest::Approx(0.0));
  CHECK(pp.Shat(0, 0) == doctest::Approx(0.5));
  CHECK(pp.Rhat(0, 0) == doctest::Approx(-0.25));
}

TEST_CASE("model dissipativity check brackets the scalar gain") {
  Verdict yes = model_dissipativity_check(s1(), gain_supply(2.01, 1, 1));
  CHECK(yes.status == Status::Dissipative);
  REQUIRE(yes.certificate.has_value());
  CHECK(yes.certificate->P(0, 0) > 1.8);
  CHECK(yes.certificate->P(0, 0) < 2.2);

  Verdict no = model_dissipativity_check(s1(), gain_supply(1.9, 1, 1));
  CHECK(no.status == Status::NotDissipative);
  CHECK_FALSE(no.certificate.has_value());
}

TEST_CASE("model dissipativity check brackets the scalar passivity index") {
  CHECK(model_dissipativity_check(s1(), passivity_supply(-0.7, 1)).status ==
        Status::Dissipative);
  CHECK(model_dissipativity_check(s1(), passivity_supply(-0.6, 1)).status ==
        Status::NotDissipative);
}

TEST_CASE("gain oracle on closed-form cases") {
  LtiSystem delay{Matrix::Zero(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1),
                  Matrix::Zero(1, 1)};
  CHECK(hinf_oracle(delay) == doctest::Approx(1.0).epsilon(1e-9));

  CHECK(hinf_oracle(s1()) == doctest::Approx(2.0).epsilon(1e-9));

  LtiSystem feedthrough{Matrix::Zero(1, 1), Matrix::Zero(1, 1),
                        Matrix::Zero(1, 1), Matrix::Constant(1, 1, -3.0)};
  CHECK(hinf_oracle(feedthrough) == doctest::Approx(3.0).epsilon(1e-12));

  LtiSystem unstable = s1();
  unstable.A(0, 0) = 1.1;
  CHECK_THROWS_AS(hinf_oracle(unstable), std::invalid_argument);
}

TEST_CASE("gain oracle parallel path matches the serial reference") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    LtiSystem sys = random_system(4, 2, 2, 0.1, seed);
    double serial = hinf_oracle(sys, 1024, true, false);
    double parallel = hinf_oracle(sys, 1024, true, true);
    CHECK(serial == parallel);
  }
}

TEST_CASE("passivity oracle on closed-form cases") {
  LtiSystem static_eye{Matrix::Zero(2, 2), Matrix::Zero(2, 2),
                       Matrix::Zero(2, 2), Matrix::Identity(2, 2)};
  CHECK(passivity_oracle(static_eye) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(passivity_oracle(s1()) == doctest::Approx(-2.0 / 3.0).epsilon(1e-9));

  LtiSystem no_path{Matrix::Constant(1, 1, 0.5), Matrix::Zero(1, 1),
                    Matrix::Ones(1, 1), Matrix::Zero(1, 1)};
  CHECK(passivity_oracle(no_path) == doctest::Approx(0.0).epsilon(1e-12));

  LtiSystem wide = random_system(3, 2, 1, 0.1, 17);
  CHECK_THROWS_AS(passivity_oracle(wide), std::invalid_argument);
}

TEST_CASE("passivity oracle parallel path matches the serial reference") {
  LtiSystem sys = random_system(3, 2, 2, 0.1, 23);
  CHECK(passivity_oracle(sys, 1024, true, false) ==
        passivity_oracle(sys, 1024, true, true));
}

TEST_CASE("random systems are reproducible, stable, and minimal") {
  LtiSystem a = random_system(4, 2, 3, 0.1, 42);
  LtiSystem b = random_system(4, 2, 3, 0.1, 42);
  CHECK_MATRIX(a.A, b.A, 0.0);
  CHECK_MATRIX(a.B, b.B, 0.0);
  CHECK_MATRIX(a.C, b.C, 0.0);
  CHECK_MATRIX(a.D, b.D, 0.0);
  CHECK(a.n() == 4);
  CHECK(a.m() == 2);
  CHECK(a.p() == 3);

  LtiSystem c = random_system(4, 2, 3, 0.1, 43);
  CHECK_FALSE(approx_equal(a.A, c.A, 1e-12));

  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    LtiSystem sys = random_system(3, 1, 2, 0.2, seed);
    Eigen::VectorXcd ev = Eigen::EigenSolver<Matrix>(sys.A).eigenvalues();
    double rho = 0.0;
    for (int i = 0; i < ev.size(); ++i) rho = std::max(rho, std::abs(ev(i)));
    CHECK(rho < 0.8 + 1e-12);
    // minimality via controllability and observability stacks
    Matrix ctrb(3, 3 * 1);
    Matrix col = sys.B;
    for (int k = 0; k < 3; ++k) {
      ctrb.middleCols(k, 1) = col;
      col = sys.A * col;
    }
    CHECK(rank_with_tol(ctrb) == 3);
    CHECK(rank_with_tol(observability_matrix(sys, 3)) == 3);
  }
}

TEST_CASE("least squares recovers the scalar system from clean data") {
  std::mt19937_64 rng(31);
  Matrix u = random_input(rng, 1, 20);
  Trajectory t = simulate(s1(), u, Vector::Zero(1));
  StateDataMatrices d = build_state_data(t);
  auto [A, B] = ls_identify(d.X, d.Xp, d.U);
  CHECK(std::abs(A(0, 0) - 0.5) < 1e-8);
  CHECK(std::abs(B(0, 0) - 1.0) < 1e-8);
}

TEST_CASE("least squares on zero successors gives the zero system") {
  std::mt19937_64 rng(32);
  Matrix X = random_input(rng, 2, 12);
  Matrix U = random_input(rng, 1, 12);
  auto [A, B] = ls_identify(X, Matrix::Zero(2, 12), U);
  CHECK_MATRIX(A, Matrix::Zero(2, 2), 1e-12);
  CHECK_MATRIX(B, Matrix::Zero(2, 1), 1e-12);
}

TEST_CASE("least squares is Frobenius optimal on noisy data") {
  std::mt19937_64 rng(33);
  LtiSystem sys = random_system(3, 2, 2, 0.1, 8);
  Matrix u = random_input(rng, 2, 40);
  Matrix w = random_input(rng, 3, 40, 0.05);
  Trajectory t = simulate(sys, u, Vector::Zero(3), w, Matrix::Identity(3, 3));
  StateDataMatrices d = build_state_data(t);
  auto [A, B] = ls_identify(d.X, d.Xp, d.U);
  double best = (d.Xp - A * d.X - B * d.U).norm();
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix dA(3, 3), dB(3, 2);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) dA(i, j) = 0.01 * U(rng);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 2; ++j) dB(i, j) = 0.01 * U(rng);
    double other = (d.Xp - (A + dA) * d.X - (B + dB) * d.U).norm();
    CHECK(other >= best - 1e-12);
  }

  // row-rank deficient regressors are rejected
  CHECK_THROWS_AS(ls_identify(Matrix::Zero(2, 5), Matrix::Zero(2, 5),
                              Matrix::Zero(1, 5)),
                  std::invalid_argument);
}

TEST_CASE("model LMI bisection matches the frequency-domain oracles") {
  CHECK(gain_from_model_lmi(s1()) == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(passivity_from_model_lmi(s1()) ==
        doctest::Approx(-2.0 / 3.0).epsilon(1e-3));

  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 2 + static_cast<int>(rng() % 5);  // up to 6
    int m = 1 + static_cast<int>(rng() % 2);
    int p = 1 + static_cast<int>(rng() % 2);
    LtiSystem sys = random_system(n, m, p, 0.15, 1000 + trial);
    double lmi = gain_from_model_lmi(sys, 1e-6);
    double freq = hinf_oracle(sys);
    CHECK(lmi == doctest::Approx(freq).epsilon(1e-4));
  }
  for (int trial = 0; trial < 6; ++trial) {
    int n = 2 + static_cast<int>(rng() % 3);
    int m = 1 + static_cast<int>(rng() % 2);
    LtiSystem sys = random_system(n, m, m, 0.15, 2000 + trial);
    double lmi = passivity_from_model_lmi(sys, 1e-6);
    double freq = passivity_oracle(sys);
    CHECK(lmi == doctest::Approx(freq).epsilon(1e-4));
  }
}
