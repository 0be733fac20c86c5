#pragma once

// Elementary two-qubit gates: the rational R-check matrix, the braiding
// (Yang-Baxter) residual, the Trotter identity for the XXX bond evolution and
// the spin-1 Lax structure of the doubled gate.

#include "brickwork/numerics.hpp"

namespace brickwork {

// Two-qubit gate in the basis |00>,|01>,|10>,|11>; the left tensor factor is
// the left circuit leg. lambda and epsilon are stored separately, the
// matrix depends on lambda - epsilon only.
struct Gate {
  CMatrix matrix;
  double lambda = 0.0;
  double epsilon = 0.0;

  double argument() const { return lambda - epsilon; }
};

// Pauli matrices sigma_0 = 1, sigma_x, sigma_y, sigma_z.
const CMatrix& pauli(int alpha);

// Two-qubit swap P.
const CMatrix& swap_matrix();

// (I + i x P) / (1 + i x) for an arbitrary complex argument x.
CMatrix r_matrix(cplx x);

Gate r_check(double lambda, double epsilon = 0.0);

// max-norm of R12(l) R23(l+m) R12(m) - R23(m) R12(l+m) R23(l) on three qubits.
double check_braiding(double lambda, double mu);

struct TrotterGate {
  Gate gate;
  cplx phase;
};

// phase * R(tan 2 J dt) = exp(-i dt h), h = -J (XX + YY + ZZ). Requires
// |2 J dt| < pi/2.
TrotterGate trotter_gate(double J, double dt);

// Doubled gate element <sigma_alpha| T_ab |sigma_beta> of one folded pair of
// legs, as built by the transfer-matrix assembly.
cplx doubled_gate_element(double lambda, int alpha, int beta, int a, int b);

// Closed form (Tr[s_a] (s_b)_ab - i l [s_a, s_b]_ab + l^2 d_ab Tr[s_a s_b]) / (1 + l^2).
cplx spin1_lax_element(double lambda, int alpha, int beta, int a, int b);

// Max deviation between the two expressions above over all Pauli pairs and
// auxiliary indices.
double check_spin1_lax(double lambda);

}  // namespace brickwork
