#pragma once

// Bethe ansatz for the effective inhomogeneous spin-1 chain that governs the
// correlation transfer matrix: Bethe-equation residuals, a damped Newton
// solver with string-pattern and random seeds, eigenvalue reconstruction,
// Bethe vectors built from the B operator of the monodromy, and the state
// counting identities.

#include "brickwork/numerics.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace brickwork {

// A root lies on a pole of the Bethe equations (within 1e-12 of eps_l +- i or
// of lambda_k +- i).
class SingularConfiguration : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The product of B operators annihilated the reference state.
class NullState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Root tracking lost the solution while deforming the inhomogeneities.
class ContinuationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RootKind {
  regular,         // solves the Bethe equations with all roots off the poles
  zero_root,       // one root sits exactly at an inhomogeneity eps_l
  singular_limit,  // homogeneous limit of a regular inhomogeneous solution
                   // whose roots approach the poles (e.g. {-i, 0, i}); the
                   // residual is the worst defect along the continuation path
};

std::string to_string(RootKind kind);

struct BetheRootSet {
  int n = 0;                       // effective site count
  std::vector<cplx> roots;         // N rapidities, sorted by (Re, Im)
  std::vector<double> epsilons;    // n inhomogeneities the roots solve for
  double residual = 0.0;           // max Bethe-equation defect of the free roots
  RootKind kind = RootKind::regular;
  std::vector<int> zero_sites;     // for zero_root: sites l whose root equals eps_l

  int N() const { return static_cast<int>(roots.size()); }
};

// Per-root defect |prod_l (l_j - e_l - i)/(l_j - e_l + i) - prod_{k != j} (l_k - l_j + i)/(l_k - l_j - i)|.
std::vector<double> bethe_residual(const std::vector<cplx>& roots, int n, const std::vector<double>& epsilons);

struct SolveOptions {
  int random_trials = 400;
  std::uint64_t seed = 1;
  bool include_zero_roots = true;
  bool homogeneous_limits = true;  // continue inhomogeneous solutions to eps = 0
  double accept_residual = 1e-9;
  double min_root_gap = 1e-8;
  double divergence_bound = 1e6;
};

struct SolveReport {
  std::vector<BetheRootSet> sets;
  int attempts = 0;
  int converged = 0;
  int rejected_singular = 0;
  int rejected_divergent = 0;
  int rejected_coincident = 0;
  std::string diagnostics;
};

// Distinct solutions with N rapidities for an n-site chain (N <= 2n). Seeds,
// if given, are tried before the built-in string and random patterns. Only
// highest-weight solutions (N <= n) are isolated; for N > n the report is
// empty with a diagnostic, since those states are spin descendants.
SolveReport solve_bethe(int n, int N, const std::vector<double>& epsilons,
                        const std::vector<std::vector<cplx>>& seeds = {}, const SolveOptions& opt = {});

// Newton refinement of roots for new inhomogeneities; throws
// ContinuationError if the residual cannot be brought below tol.
BetheRootSet refine_roots(const std::vector<cplx>& guess, const std::vector<double>& epsilons, double tol = 1e-10);

// Tracks roots from eps_from to eps_to along a straight path in `steps` stages.
BetheRootSet continue_roots(const std::vector<cplx>& roots, const std::vector<double>& eps_from,
                            const std::vector<double>& eps_to, int steps = 40);

// Eigenvalue of the normalized transfer matrix at real spectral parameter mu:
// 1/2 [prod_l a_l prod_k (1 + i/(l_k - mu)) + prod_l d_l prod_k (1 - i/(l_k - mu))]
// with a_l = i(mu - e_l)/(1 + i(mu - e_l)), d_l = -i(mu - e_l)/(1 - i(mu - e_l)).
// Roots flagged as zero roots cancel their site factor exactly.
cplx bethe_eigenvalue(double mu, const BetheRootSet& rs);

// Vacuum eigenvalue of the OTOC transfer matrix on |0>_{m,n} (x) |0>_{m,l}.
cplx otoc_vacuum_eigenvalue(double mu, int n, int l);

struct BetheStateSpec {
  BetheRootSet roots;
  int m = 0;                      // transfer-matrix half-width
  int n = 0;                      // vacuum index
  std::vector<int> perm;          // optional vacuum transport
  std::vector<double> epsilons;   // full inhomogeneity list of tau (length m)
};

struct BetheState {
  CVector vector;
  cplx eigenvalue;
  double residual = 0.0;  // ||tau v - t v|| / ||v||
};

// Unnormalized prod_k B(lambda_k) |0>_{m,n}, B taken from the monodromy with
// the full inhomogeneity list eps (length m, empty for homogeneous).
CVector bethe_vector(int m, int n, const std::vector<cplx>& roots, const std::vector<double>& eps = {});

// prod_k B(lambda_k) applied to the (transported) pseudo-vacuum, with the
// eigen-residual at spectral parameter mu reported rather than asserted.
BetheState bethe_state(const BetheStateSpec& spec, double mu);

struct StateCount {
  long long homogeneous = 0;    // sum_n 3^n = (3^{m+1} - 1)/2
  long long inhomogeneous = 0;  // sum_n C(m,n) 3^n = 4^m
  long long otoc = 0;           // sum_{n,l} C(m,n) C(m,l) 3^{n+l} = 16^m
};

StateCount count_states(int m);

long long binomial(int n, int k);

// Number of states generated by the regular solutions for an n-site chain:
// sum over N of (#solutions) * (2(n - N) + 1). Equals 3^n for a complete
// inhomogeneous solution set.
long long sector_state_count(int n, const std::vector<double>& epsilons, const SolveOptions& opt = {});

}  // namespace brickwork
