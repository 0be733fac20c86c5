#include "brickwork/circuit.hpp"

#include "brickwork/gates.hpp"

#include <array>
#include <string>

namespace brickwork {

namespace {

// Bit mask of site s in a chain of L sites (site 0 most significant).
Eigen::Index site_mask(int L, int s) { return Eigen::Index(1) << (L - 1 - s); }

// Row indices of the four basis states differing only on sites (i, j),
// ordered as |b_i b_j> = 00, 01, 10, 11.
std::array<Eigen::Index, 4> quartet(Eigen::Index base, Eigen::Index mi, Eigen::Index mj) {
  return {base, base | mj, base | mi, base | mi | mj};
}

// o <- G_(i,j) o
void apply_left(CMatrix& o, int L, int i, int j, const CMatrix& g) {
  const Eigen::Index mi = site_mask(L, i), mj = site_mask(L, j);
  const Eigen::Index dim = o.rows();
  std::array<cplx, 4> in{};
  for (Eigen::Index c = 0; c < o.cols(); ++c)
    for (Eigen::Index base = 0; base < dim; ++base) {
      if (base & (mi | mj)) continue;
      const auto rows = quartet(base, mi, mj);
      for (int a = 0; a < 4; ++a) in[a] = o(rows[a], c);
      for (int a = 0; a < 4; ++a) {
        cplx acc = 0.0;
        for (int b = 0; b < 4; ++b) acc += g(a, b) * in[b];
        o(rows[a], c) = acc;
      }
    }
}

// o <- o G_(i,j)^dagger
void apply_right_adjoint(CMatrix& o, int L, int i, int j, const CMatrix& g) {
  const Eigen::Index mi = site_mask(L, i), mj = site_mask(L, j);
  const Eigen::Index dim = o.cols();
  const CMatrix gd = g.adjoint();
  for (Eigen::Index base = 0; base < dim; ++base) {
    if (base & (mi | mj)) continue;
    const auto cols = quartet(base, mi, mj);
    Eigen::MatrixXcd block(o.rows(), 4);
    for (int a = 0; a < 4; ++a) block.col(a) = o.col(cols[a]);
    const Eigen::MatrixXcd out = block * gd;
    for (int a = 0; a < 4; ++a) o.col(cols[a]) = out.col(a);
  }
}

CMatrix bond_gate(const ChainSpec& spec, int bond) {
  const double eps = spec.epsilons.empty() ? 0.0 : spec.epsilons[bond];
  return r_check(spec.lambda, eps).matrix;
}

int wrap(int x, int L) { return ((x % L) + L) % L; }

// o <- sigma_alpha(0) o, touching only the rows that change.
CMatrix apply_site0(const CMatrix& o, int L, int alpha) {
  const CMatrix& s = pauli(alpha);
  const Eigen::Index m0 = site_mask(L, 0);
  CMatrix out(o.rows(), o.cols());
  for (Eigen::Index r = 0; r < o.rows(); ++r) {
    if (r & m0) continue;
    const Eigen::Index r1 = r | m0;
    out.row(r) = s(0, 0) * o.row(r) + s(0, 1) * o.row(r1);
    out.row(r1) = s(1, 0) * o.row(r) + s(1, 1) * o.row(r1);
  }
  return out;
}

}  // namespace

void ChainSpec::validate() const {
  if (L < 2 || L % 2 != 0) throw std::invalid_argument("chain length L must be even and at least 2");
  if (L > kMaxChainSites)
    throw ResourceError("chain length L = " + std::to_string(L) + " exceeds the dense cap " +
                        std::to_string(kMaxChainSites));
  if (t < 0) throw std::invalid_argument("layer count t must be non-negative");
  if (!epsilons.empty() && static_cast<int>(epsilons.size()) != L)
    throw std::invalid_argument("per-bond inhomogeneities must have L entries");
}

std::vector<int> layer_bonds(const ChainSpec& spec, int layer) {
  if (layer < 1 || layer > spec.t) throw std::out_of_range("layer index must lie in 1..t");
  std::vector<int> bonds;
  for (int k = (spec.t - layer) % 2; k < spec.L; k += 2) bonds.push_back(k);
  return bonds;
}

CMatrix build_brick_circuit(const ChainSpec& spec) {
  spec.validate();
  const Eigen::Index dim = Eigen::Index(1) << spec.L;
  CMatrix u = CMatrix::Identity(dim, dim);
  for (int layer = 1; layer <= spec.t; ++layer)
    for (int k : layer_bonds(spec, layer)) apply_left(u, spec.L, k, (k + 1) % spec.L, bond_gate(spec, k));
  return u;
}

CMatrix site_operator(int L, int x, const CMatrix& op) {
  const int s = wrap(x, L);
  CMatrix out = CMatrix::Identity(1, 1);
  for (int k = 0; k < L; ++k) out = kron(out, k == s ? op : CMatrix::Identity(2, 2));
  return out;
}

CMatrix evolve_operator(const ChainSpec& spec, int x, int beta) {
  spec.validate();
  CMatrix o = site_operator(spec.L, x, pauli(beta));
  for (int layer = 1; layer <= spec.t; ++layer)
    for (int k : layer_bonds(spec, layer)) {
      const CMatrix g = bond_gate(spec, k);
      apply_left(o, spec.L, k, (k + 1) % spec.L, g);
      apply_right_adjoint(o, spec.L, k, (k + 1) % spec.L, g);
    }
  return o;
}

std::array<cplx, 4> correlation_row(const ChainSpec& spec, int x, int beta) {
  spec.validate();
  if (2 * std::abs(x) >= spec.L) throw std::invalid_argument("site offset must satisfy |x| < L/2");
  const CMatrix b = evolve_operator(spec, x, beta);
  std::array<cplx, 4> row{};
  for (int alpha = 0; alpha < 4; ++alpha)
    row[alpha] = apply_site0(b, spec.L, alpha).trace() / static_cast<double>(b.rows());
  return row;
}

cplx infinite_temp_correlation(const ChainSpec& spec, int x, int alpha, int beta) {
  if (alpha < 0 || alpha > 3) throw std::out_of_range("pauli: index must be 0..3");
  return correlation_row(spec, x, beta)[alpha];
}

cplx otoc_direct(const ChainSpec& spec, int x, int alpha, int beta) {
  spec.validate();
  if (spec.L > kMaxOtocSites)
    throw ResourceError("OTOC evaluation is capped at L = " + std::to_string(kMaxOtocSites));
  if (2 * std::abs(x) >= spec.L) throw std::invalid_argument("site offset must satisfy |x| < L/2");
  const CMatrix ab = apply_site0(evolve_operator(spec, x, beta), spec.L, alpha);
  // tr(AB AB) = sum_ij (AB)_ij (AB)_ji
  return (ab.array() * ab.transpose().array()).sum() / static_cast<double>(ab.rows());
}

}  // namespace brickwork
