#pragma once

// Dense complex linear algebra kernel shared by every other module: tensor
// contraction over leg lists, matrix powers, Schur-based spectra with
// reordering, SVD ranks and eigenvalue clustering.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace brickwork {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};

// Raised when paired tensor legs have different dimensions.
class ContractShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when an iterative dense algorithm fails to converge.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a requested construction exceeds the dense size caps.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense tensor with row-major entries; legs are addressed by position.
struct Tensor {
  std::vector<int> shape;
  std::vector<cplx> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> shape_);
  Tensor(std::vector<int> shape_, std::vector<cplx> data_);

  std::size_t size() const { return data.size(); }
  std::size_t offset(const std::vector<int>& index) const;
  cplx& operator()(const std::vector<int>& index) { return data[offset(index)]; }
  const cplx& operator()(const std::vector<int>& index) const { return data[offset(index)]; }
};

// Sums over the paired legs (leg of a, leg of b). The result carries the
// uncontracted legs of a followed by those of b, each in original order.
Tensor contract(const Tensor& a, const Tensor& b, const std::vector<std::pair<int, int>>& pairs);

// k-fold product by repeated squaring; k = 0 gives the identity.
CMatrix mat_power(const CMatrix& a, int k);

// Complex Schur form a = Q T Q^H with T upper triangular.
struct SchurForm {
  CMatrix T;
  CMatrix Q;
};

SchurForm schur(const CMatrix& a);

// Swaps the adjacent diagonal entries k and k+1 of an upper-triangular Schur
// factor with a single Givens rotation, updating Q accordingly.
void swap_schur(SchurForm& s, int k);

// Moves the selected diagonal positions to the leading block, preserving
// their relative order. Returns the number of selected entries.
int reorder_schur(SchurForm& s, std::vector<bool> select);

// All eigenvalues with algebraic multiplicity, read off the Schur diagonal.
std::vector<cplx> eigenvalues_schur(const CMatrix& a);

// Number of singular values above rel_tol times the largest one.
int numerical_rank(const CMatrix& a, double rel_tol = 1e-8);

std::vector<double> singular_values(const CMatrix& a);
double spectral_norm(const CMatrix& a);
double max_abs(const CMatrix& a);

struct Cluster {
  cplx value;
  int multiplicity = 0;
};

// Single-linkage clustering of points in the complex plane at linking
// distance tol; representatives are cluster means.
std::vector<Cluster> cluster_eigenvalues(const std::vector<cplx>& vals, double tol);

// A cluster of eigenvalues of a particular matrix, remembering which
// diagonal positions of its Schur factor belong to it.
struct SpectralCluster {
  cplx value;
  int multiplicity = 0;
  std::vector<int> members;
};

struct ConsensusOptions {
  double agree_tol = 1e-10;   // mean agreement between the two samples, relative
  double merge_tol = 1e-9;    // closure merge of coincident means, relative
  std::uint64_t seed = 20211;  // seed of the auxiliary unitary rotation
};

// Jordan-aware clustering of the spectrum of a. Defective eigenvalues are
// computed only to ~eps^(1/k), so the spectrum is sampled twice: from the
// Schur form of a and from that of V a V^H for a fixed random unitary V.
// Single-linkage components over the union of both samples are frozen as
// soon as they hold equally many points of each sample whose means agree.
// The mean over a complete perturbed cluster is accurate to roundoff even
// when its spread is large. Frozen clusters with coincident means are then
// merged.
std::vector<SpectralCluster> cluster_spectrum(const CMatrix& a, const SchurForm& s,
                                              const ConsensusOptions& opt = {});
std::vector<SpectralCluster> cluster_spectrum(const CMatrix& a, const ConsensusOptions& opt = {});

// Haar-distributed unitary from a deterministic seed.
CMatrix random_unitary(int n, std::uint64_t seed);

// Kronecker product of two dense matrices.
CMatrix kron(const CMatrix& a, const CMatrix& b);

}  // namespace brickwork
