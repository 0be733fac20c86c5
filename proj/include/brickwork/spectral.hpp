#pragma once

// Non-Hermitian spectral analysis of the transfer matrices: commuting
// families, Jordan structure through Weyr characteristics, the twisted SU(2)
// symmetry and its multiplets, nesting of spectra across half-widths, closed
// forms of the small-m spectra, and generalized eigenvectors obtained by
// differentiating inhomogeneous Bethe states.

#include "brickwork/bethe.hpp"
#include "brickwork/numerics.hpp"
#include "brickwork/transfer.hpp"

#include <string>
#include <vector>

namespace brickwork {

// Raised when a generalized eigenspace cannot be decomposed into integer
// spin multiplets.
class ClassificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// max-norm of [a, b].
double commutator_residual(const CMatrix& a, const CMatrix& b);

// Largest commutator over all pairs tau(lambda_i | eps), tau(lambda_j | eps).
double check_commuting_family(int m, const std::vector<double>& lambdas, const std::vector<double>& eps = {},
                              Kind kind = Kind::correlation);

struct EigenvalueJordanData {
  cplx value;
  int multiplicity = 0;
  std::vector<int> weyr;    // w_k = dim ker N^k - dim ker N^{k-1}
  std::vector<int> blocks;  // Jordan block sizes, descending
  bool stable = true;       // same blocks at rank_tol * 10 and rank_tol / 10
};

struct JordanReport {
  std::vector<EigenvalueJordanData> eigenvalues;  // sorted by (Re, Im)
  double rank_tol = 1e-8;
  int dimension = 0;
  bool stable = true;

  bool diagonalizable() const;
};

// Jordan block sizes of every eigenvalue of a, derived from the kernel
// dimensions of powers of the cluster's restricted Schur block.
JordanReport jordan_structure(const CMatrix& a, double rank_tol = 1e-8);
JordanReport jordan_structure(const TransferMatrix& tm, double rank_tol = 1e-8);

// Block sizes from a Weyr sequence.
std::vector<int> weyr_to_blocks(const std::vector<int>& weyr);

struct Su2Generators {
  int m = 0;
  CMatrix Sz, Sx, Sy, S2;
};

// Twisted total spin on the 2m folded legs with |0> = down, |1> = up:
//   Sz = sum_{i<=m} S^z_i - sum_{i>m} S^z_i,
//   Sx = -sum_{i<=m} S^x_i + sum_{i>m} S^x_i,
//   Sy = -sum_{i<=m} S^y_i - sum_{i>m} S^y_i.
Su2Generators su2_generators(int m);

// max over cyclic [S^a, S^b] - i S^c and of S2 - sum (S^a)^2.
double su2_algebra_residual(const Su2Generators& g);

struct MultipletRow {
  cplx eigenvalue;
  int spin = 0;        // total spin S
  int multiplets = 0;  // number of spin-S multiplets
  int degeneracy = 0;  // multiplets * (2S + 1)
};

// Decomposes every generalized eigenspace into spin multiplets from the Sz
// content of the invariant subspace, cross-checked against S2.
std::vector<MultipletRow> multiplet_table(const TransferMatrix& tm, const Su2Generators& gens);

struct NestingLevel {
  int m = 0;                 // tau_m is checked inside tau_{m+1}
  int checked = 0;           // number of distinct tau_m eigenvalues
  int unmatched = 0;
  double worst_distance = 0.0;
};

struct NestingReport {
  bool ok = true;
  double lambda = 0.0;
  double tol = 1e-8;
  std::vector<NestingLevel> levels;
};

// Every distinct eigenvalue of tau_n appears in tau_{n+1} with at least the
// same multiplicity, for n = 1 .. m_max - 1.
NestingReport nesting_check(int m_max, double lambda, double tol = 1e-8);

// Same test from precomputed clustered spectra ordered by m = 1, 2, ...
NestingReport nesting_check(const std::vector<std::vector<SpectralCluster>>& spectra, double lambda,
                            double tol = 1e-8);

// Isometry inserting an identity arc on the innermost legs; tau_m E = E tau_{m-1}.
CMatrix arc_insertion(int m);
double intertwiner_residual(int m, double lambda);

// Closed-form homogeneous eigenvalues for m <= 3 with degeneracies and
// Jordan blocks valid at finite nonzero lambda.
struct ReferenceEigenvalue {
  std::string formula;
  double value = 0.0;
  int degeneracy = 0;
  std::vector<int> blocks;  // descending
};

std::vector<ReferenceEigenvalue> reference_spectrum(int m, double lambda);

// Entries whose values coincide within tol are combined (degeneracies added,
// block multisets joined), as happens e.g. at lambda = 1 for m = 3.
std::vector<ReferenceEigenvalue> merge_coincident(std::vector<ReferenceEigenvalue> entries, double tol = 1e-9);

// Entry-by-entry comparison of a computed Jordan report with reference data.
struct ReferenceComparison {
  int entries = 0;            // reference entries checked
  int missing = 0;            // no computed eigenvalue within value_tol
  int wrong_degeneracy = 0;
  int wrong_blocks = 0;
  int extra = 0;              // computed eigenvalues without a reference entry
  double worst_value_error = 0.0;

  bool ok() const { return missing == 0 && wrong_degeneracy == 0 && wrong_blocks == 0 && extra == 0; }
};

// With check_blocks false only values and degeneracies are compared.
ReferenceComparison compare_with_reference(const JordanReport& report, const std::vector<ReferenceEigenvalue>& reference,
                                           double value_tol = 1e-8, bool check_blocks = true);

struct GeneralizedEigenvector {
  CVector vector;  // d/dDelta [X(Delta/2) psi(Delta)] at Delta = 0
  CVector psi0;    // Bethe vector at Delta = 0, same normalization
  cplx t0;         // eigenvalue at Delta = 0
  cplx dt;         // d t / d Delta at Delta = 0
  double residual = 0.0;  // ||(tau - t0) v - dt psi0|| / ||v||
};

// Splits the inhomogeneities on positions (n, n+1) (1-based, n the vacuum
// index of the root set) into (Delta/2, -Delta/2), rebuilds the Bethe state
// by Newton continuation of the homogeneous roots and differentiates by a
// central difference with step delta. delta = 0 returns the ordinary eigen
// residual of the homogeneous Bethe vector.
GeneralizedEigenvector generalized_eigenvector(int m, const BetheRootSet& roots, double delta, double mu);

struct RichardsonCheck {
  double coarse = 0.0;        // residual at delta
  double fine = 0.0;          // residual at delta / 2
  double ratio = 0.0;         // coarse / fine, 4 for O(delta^2) truncation
  double extrapolated = 0.0;  // residual of (4 v(delta/2) - v(delta)) / 3
};

RichardsonCheck richardson_check(int m, const BetheRootSet& roots, double delta, double mu);

}  // namespace brickwork
