#include "brickwork/gates.hpp"

#include "brickwork/transfer.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace brickwork {

const CMatrix& pauli(int alpha) {
  static const std::array<CMatrix, 4> table = [] {
    std::array<CMatrix, 4> p;
    for (auto& m : p) m = CMatrix::Zero(2, 2);
    p[0] << 1.0, 0.0, 0.0, 1.0;
    p[1] << 0.0, 1.0, 1.0, 0.0;
    p[2] << 0.0, -kI, kI, 0.0;
    p[3] << 1.0, 0.0, 0.0, -1.0;
    return p;
  }();
  if (alpha < 0 || alpha > 3) throw std::out_of_range("pauli: index must be 0..3");
  return table[alpha];
}

const CMatrix& swap_matrix() {
  static const CMatrix p = [] {
    CMatrix m = CMatrix::Zero(4, 4);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) m(2 * a + b, 2 * b + a) = 1.0;
    return m;
  }();
  return p;
}

CMatrix r_matrix(cplx x) {
  return (CMatrix::Identity(4, 4) + kI * x * swap_matrix()) / (1.0 + kI * x);
}

Gate r_check(double lambda, double epsilon) { return {r_matrix(lambda - epsilon), lambda, epsilon}; }

double check_braiding(double lambda, double mu) {
  const CMatrix id2 = CMatrix::Identity(2, 2);
  auto r12 = [&](double x) { return kron(r_matrix(x), id2); };
  auto r23 = [&](double x) { return kron(id2, r_matrix(x)); };
  const CMatrix lhs = r12(lambda) * r23(lambda + mu) * r12(mu);
  const CMatrix rhs = r23(mu) * r12(lambda + mu) * r23(lambda);
  return max_abs(lhs - rhs);
}

TrotterGate trotter_gate(double J, double dt) {
  const double angle = 2.0 * J * dt;
  if (!(std::abs(angle) < std::numbers::pi / 2.0))
    throw std::domain_error("trotter_gate: |2 J dt| must be below pi/2");
  return {r_check(std::tan(angle)), std::exp(kI * J * dt)};
}

cplx doubled_gate_element(double lambda, int alpha, int beta, int a, int b) {
  const Monodromy t = build_monodromy(1, lambda, {0.0});
  const CMatrix& s_out = pauli(alpha);
  const CMatrix& s_in = pauli(beta);
  // Folded pair |i1 i2>: incoming operators are vectorized as s[i1, i2] and
  // outgoing ones are read with s[i2, i1].
  CVector in(4), out(4);
  for (int i1 = 0; i1 < 2; ++i1)
    for (int i2 = 0; i2 < 2; ++i2) {
      in(2 * i1 + i2) = s_in(i1, i2);
      out(2 * i1 + i2) = s_out(i2, i1);
    }
  return out.transpose() * t.block(a, b) * in;
}

cplx spin1_lax_element(double lambda, int alpha, int beta, int a, int b) {
  const CMatrix& sa = pauli(alpha);
  const CMatrix& sb = pauli(beta);
  const CMatrix comm = sa * sb - sb * sa;
  const cplx delta = (a == b) ? 1.0 : 0.0;
  return (sa.trace() * sb(a, b) - kI * lambda * comm(a, b) + lambda * lambda * delta * (sa * sb).trace()) /
         (1.0 + lambda * lambda);
}

double check_spin1_lax(double lambda) {
  double worst = 0.0;
  for (int alpha = 0; alpha < 4; ++alpha)
    for (int beta = 0; beta < 4; ++beta)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          worst = std::max(worst, std::abs(doubled_gate_element(lambda, alpha, beta, a, b) -
                                           spin1_lax_element(lambda, alpha, beta, a, b)));
  return worst;
}

}  // namespace brickwork
