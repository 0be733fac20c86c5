#include "brickwork/circuit.hpp"
#include "brickwork/gates.hpp"

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>

using namespace brickwork;

namespace {

CMatrix heisenberg_bond(double J) {
  CMatrix h = CMatrix::Zero(4, 4);
  for (int a = 1; a <= 3; ++a) h += -J * kron(pauli(a), pauli(a));
  return h;
}

// Hand-built three-qubit embedding of a two-qubit gate.
CMatrix on_12(const CMatrix& g) { return kron(g, CMatrix::Identity(2, 2)); }
CMatrix on_23(const CMatrix& g) { return kron(CMatrix::Identity(2, 2), g); }

}  // namespace

TEST(Pauli, Algebra) {
  EXPECT_LT(max_abs(pauli(1) * pauli(2) - kI * pauli(3)), 1e-15);
  for (int a = 0; a < 4; ++a) EXPECT_LT(max_abs(pauli(a) * pauli(a) - CMatrix::Identity(2, 2)), 1e-15);
}

TEST(RCheck, ValuesAtSpecialPoints) {
  EXPECT_LT(max_abs(r_check(0.0).matrix - CMatrix::Identity(4, 4)), 1e-15);
  // Large argument tends to the swap.
  EXPECT_LT(max_abs(r_check(1e9).matrix - swap_matrix()), 1e-8);
  // Depends on lambda - epsilon only.
  EXPECT_LT(max_abs(r_check(1.3, 0.4).matrix - r_check(0.9).matrix), 1e-15);
  EXPECT_DOUBLE_EQ(r_check(1.3, 0.4).argument(), 1.3 - 0.4);
}

TEST(RCheck, UnitarityInverseAndConjugation) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (int i = 0; i < 100; ++i) {
    const double l = u(rng);
    const CMatrix r = r_check(l).matrix;
    EXPECT_LT(max_abs(r * r.adjoint() - CMatrix::Identity(4, 4)), 1e-12);
    EXPECT_LT(max_abs(r * r_check(-l).matrix - CMatrix::Identity(4, 4)), 1e-12);
    EXPECT_LT(max_abs(r.adjoint() - r_check(-l).matrix), 1e-12);
  }
}

TEST(Braiding, HandBuiltThreeSiteProducts) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const double l = u(rng), m = u(rng);
    const CMatrix lhs = on_12(r_check(l).matrix) * on_23(r_check(l + m).matrix) * on_12(r_check(m).matrix);
    const CMatrix rhs = on_23(r_check(m).matrix) * on_12(r_check(l + m).matrix) * on_23(r_check(l).matrix);
    EXPECT_LT(max_abs(lhs - rhs), 1e-12);
    EXPECT_LT(check_braiding(l, m), 1e-12);
  }
}

TEST(Braiding, WrongArgumentOrderFails) {
  // Control: exchanging the outer arguments breaks the identity.
  const double l = 0.4, m = 1.1;
  const CMatrix lhs = on_12(r_check(m).matrix) * on_23(r_check(l + m).matrix) * on_12(r_check(m).matrix);
  const CMatrix rhs = on_23(r_check(m).matrix) * on_12(r_check(l + m).matrix) * on_23(r_check(l).matrix);
  EXPECT_GT(max_abs(lhs - rhs), 1e-3);
}

TEST(Trotter, MatchesMatrixExponential) {
  for (auto [J, dt] : {std::pair{1.0, 0.1}, std::pair{0.7, 0.05}, std::pair{-0.4, 0.3}}) {
    const TrotterGate g = trotter_gate(J, dt);
    const CMatrix want = (cplx(0.0, -dt) * heisenberg_bond(J)).exp();
    EXPECT_LT(max_abs(g.phase * g.gate.matrix - want), 1e-12) << "J = " << J << ", dt = " << dt;
    EXPECT_NEAR(g.gate.lambda, std::tan(2.0 * J * dt), 1e-15);
  }
}

TEST(Trotter, OutsideBranchThrows) {
  EXPECT_THROW(trotter_gate(1.0, 0.8), std::domain_error);
}

// The brickwork circuit of Trotter gates approximates exp(-i T H) on a ring.
// Its even/odd splitting has an O(dt) term that is odd under reflection, so
// reflection-symmetric quantities converge as dt^2.
class TrotterConsistency : public ::testing::Test {
 protected:
  static constexpr int L = 8;
  static constexpr double J = 1.0, T = 0.8;

  static double exact(int x) {
    CMatrix h = CMatrix::Zero(1 << L, 1 << L);
    for (int k = 0; k < L; ++k)
      for (int a = 1; a <= 3; ++a) h += -J * site_operator(L, k, pauli(a)) * site_operator(L, k + 1, pauli(a));
    const CMatrix u = (cplx(0.0, -T) * h).exp();
    const CMatrix b = u * site_operator(L, x, pauli(3)) * u.adjoint();
    return ((site_operator(L, 0, pauli(3)) * b).trace() / double(1 << L)).real();
  }

  static double circuit(int x, double dt, bool symmetrize) {
    ChainSpec s;
    s.L = L;
    s.lambda = std::tan(2.0 * J * dt);
    s.t = 2 * static_cast<int>(std::lround(T / dt));  // two layers per period
    const cplx c = infinite_temp_correlation(s, x, 3, 3);
    return symmetrize ? 0.5 * (c + infinite_temp_correlation(s, -x, 3, 3)).real() : c.real();
  }

  static double slope(int x, bool symmetrize) {
    const double want = exact(x);
    std::vector<double> logdt, logerr;
    for (double dt : {0.2, 0.1, 0.05}) {
      logdt.push_back(std::log(dt));
      logerr.push_back(std::log(std::abs(circuit(x, dt, symmetrize) - want)));
    }
    // Least-squares slope of log error against log dt.
    const double mx = (logdt[0] + logdt[1] + logdt[2]) / 3.0, my = (logerr[0] + logerr[1] + logerr[2]) / 3.0;
    double num = 0.0, den = 0.0;
    for (int i = 0; i < 3; ++i) {
      num += (logdt[i] - mx) * (logerr[i] - my);
      den += (logdt[i] - mx) * (logdt[i] - mx);
    }
    return num / den;
  }
};

TEST_F(TrotterConsistency, SymmetricCorrelatorsConvergeQuadratically) {
  EXPECT_NEAR(slope(0, false), 2.0, 0.5);
  EXPECT_NEAR(slope(2, true), 2.0, 0.5);
}

TEST_F(TrotterConsistency, OneSidedCorrelatorCarriesFirstOrderSplittingError) {
  EXPECT_NEAR(slope(2, false), 1.0, 0.5);
}

TEST(Spin1Lax, DoubledGateMatchesClosedForm) {
  for (double l : {0.0, 0.25, 1.0, 3.0}) EXPECT_LT(check_spin1_lax(l), 1e-12);
  // Identity-to-identity element is trivially conserved.
  EXPECT_NEAR(std::abs(spin1_lax_element(0.7, 0, 0, 0, 0) - doubled_gate_element(0.7, 0, 0, 0, 0)), 0.0, 1e-14);
}
