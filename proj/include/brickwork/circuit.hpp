#pragma once

// Brute-force reference for the brickwork circuit on a periodic chain:
// dense construction of the circuit unitary, exact Heisenberg evolution of a
// local Pauli operator, and infinite-temperature correlators and OTOCs by
// direct trace. Nothing here uses the transfer-matrix machinery.
//
// Conventions. Site 0 is the most significant qubit; the gate on bond k acts
// on sites (k, k+1 mod L) with site k as its left tensor factor. Layer l
// (1-based, l = 1..t) acts on the bonds k with k = t - l (mod 2), so the last
// layer applied always acts on the even bonds and the light cone of an
// operator at site 0 opens to the right, matching the transfer-matrix folding.

#include "brickwork/numerics.hpp"

#include <array>
#include <vector>

namespace brickwork {

struct ChainSpec {
  int L = 8;                  // even site count, 2 <= L <= 12
  int t = 0;                  // number of layers
  double lambda = 0.0;
  std::vector<double> epsilons;  // optional per-bond inhomogeneity, length L

  // Correlators are free of finite-size effects when L >= 2t + 2.
  bool size_independent() const { return L >= 2 * t + 2; }
  void validate() const;
};

inline constexpr int kMaxChainSites = 12;
inline constexpr int kMaxOtocSites = 10;

// Bonds acted on by layer l (1-based), in increasing order.
std::vector<int> layer_bonds(const ChainSpec& spec, int layer);

// U(t) = L_t ... L_1 as a dense 2^L x 2^L matrix.
CMatrix build_brick_circuit(const ChainSpec& spec);

// U sigma_beta(x) U^dagger, evolved gate by gate.
CMatrix evolve_operator(const ChainSpec& spec, int x, int beta);

// Dense single-site operator embedded at site x (taken mod L).
CMatrix site_operator(int L, int x, const CMatrix& op);

// tr(sigma_alpha(0) U sigma_beta(x) U^dagger) / 2^L.
cplx infinite_temp_correlation(const ChainSpec& spec, int x, int alpha, int beta);

// tr(sigma_alpha(0) B) / 2^L for all alpha = 0..3 at once, B = U sigma_beta(x) U^dagger.
std::array<cplx, 4> correlation_row(const ChainSpec& spec, int x, int beta);

// tr(A B A B) / 2^L with A = sigma_alpha(0), B = U sigma_beta(x) U^dagger.
cplx otoc_direct(const ChainSpec& spec, int x, int alpha, int beta);

}  // namespace brickwork
