#pragma once

// Correlation and OTOC transfer matrices of the brickwork circuit, their
// monodromy blocks, pseudo-vacua, inhomogeneity exchange unitaries and the
// boundary vectors that turn transfer-matrix powers into correlators.
//
// Folded-space conventions. A correlation vector of half-width m lives on 2m
// qubit legs numbered 1..2m from left to right, leg 1 being the most
// significant bit. Legs 1..m belong to the U^dagger sheet, legs m+1..2m to
// the U sheet; the U-sheet leg mirrored to position k is leg 2m+1-k. Column k
// of the U^dagger sheet carries inhomogeneity eps_k and so does its mirror,
// so the innermost pair (m, m+1) shares eps_m.

#include "brickwork/numerics.hpp"

#include <vector>

namespace brickwork {

enum class Kind { correlation, otoc };

enum class Side { bra, ket };

struct TransferMatrix {
  int m = 0;
  double lambda = 0.0;
  std::vector<double> epsilons;
  Kind kind = Kind::correlation;
  CMatrix matrix;
  bool normalized = true;

  Eigen::Index dim() const { return matrix.rows(); }
};

// Auxiliary-space blocks T_00 = A, T_01 = B, T_10 = C, T_11 = D.
struct Monodromy {
  int m = 0;
  cplx lambda;
  std::vector<double> epsilons;
  CMatrix A, B, C, D;

  const CMatrix& block(int a, int b) const;
};

inline constexpr int kMaxCorrelationM = 4;
inline constexpr int kMaxOtocM = 2;

// Spectral parameter may be complex so that B can be evaluated at complex
// Bethe rapidities; an empty eps means the homogeneous chain.
Monodromy build_monodromy(int m, cplx lambda, const std::vector<double>& eps = {});

// RTT residual on the doubled auxiliary space,
//   || R T_1(lambda) T_2(mu) - T_2(mu) T_1(lambda) R ||_max,  R = P R(mu - lambda),
// the form of the relation carried by this monodromy orientation.
double rtt_residual(int m, double lambda, double mu, const std::vector<double>& eps = {});

TransferMatrix build_transfer(int m, double lambda, const std::vector<double>& eps = {},
                              Kind kind = Kind::correlation);

// |0>^n (x) rainbow of identity arcs (x) |1>^n on 2m legs, unit norm.
// With a permutation p the vacuum is transported from tau(eps_p) to tau(eps)
// where eps_p[k] = eps[p[k]], so its eigenvalue depends on eps_{p[0..n-1]}.
CVector pseudo_vacuum(int m, int n, const std::vector<int>& perm = {}, const std::vector<double>& eps = {});

// Unitary X on the folded space exchanging the inhomogeneities at adjacent
// positions k, k+1 (0-based), delta = eps_k - eps_{k+1}:
//   tau(eps) = X^dagger tau(eps with k, k+1 swapped) X.
CMatrix exchange_unitary(int m, int k, double delta);

// W with tau(eps) = W^dagger tau(eps_p) W, assembled from adjacent exchanges.
CMatrix permutation_unitary(int m, const std::vector<int>& perm, const std::vector<double>& eps);

std::vector<double> permute(const std::vector<double>& eps, const std::vector<int>& perm);

struct OrbitState {
  std::vector<int> subset;  // positions whose inhomogeneities enter the eigenvalue
  CVector state;
};

struct VacuumOrbit {
  std::vector<OrbitState> states;
  bool ill_conditioned = false;  // some inhomogeneities (nearly) coincide
};

// Distinct transported vacua over all permutations, deduplicated by overlap
// modulus above 1 - 1e-9.
VacuumOrbit vacuum_orbit(int m, int n, const std::vector<double>& eps);

// Rainbow of identity arcs with sigma_alpha inserted, unit norm. The ket
// carries sigma on the innermost arc (legs m, m+1) with entry
// S[i_m, i_{m+1}]; the bra carries it on the outermost arc (legs 1, 2m) with
// entry S[i_{2m}, i_1]. Bra components are contracted bilinearly.
CVector boundary_vector(int m, int alpha, Side side);

// (sigma_beta| tau^steps |sigma_alpha) = c_{alpha beta}(steps - m + 1, steps + m - 1).
cplx correlation_via_tm(int m, int steps, int alpha, int beta, double lambda,
                        const std::vector<double>& eps = {});

// Half-width and power of tau reaching the space-time point (x, t).
struct LightCone {
  int m = 0;
  int steps = 0;
};

// Requires t - x even and -t <= x <= t.
LightCone light_cone(int x, int t);

// OTOC folded space: two correlation blocks (a then b) of 2m legs each.
CVector otoc_pseudo_vacuum(int m, int n, int l);

// Ket pairs the sheets within each block with sigma_alpha on the innermost
// position; bra pairs the sheets across blocks with sigma_beta on the
// outermost position. Unit norm, bilinear contraction.
CVector otoc_boundary_vector(int m, int alpha, Side side);

// OTOC value at (x, t) = (steps - m + 1, steps + m - 1), normalized by the
// overlap of the two identity boundary states.
cplx otoc_via_tm(int m, int steps, int alpha, int beta, double lambda, const std::vector<double>& eps = {});

// Index of a folded basis state from its leg bits (first leg most significant).
std::size_t leg_index(const std::vector<int>& bits);

}  // namespace brickwork
