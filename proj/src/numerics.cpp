#include "brickwork/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace brickwork {

namespace {

std::size_t product(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d < 0) throw std::invalid_argument("tensor: negative leg dimension");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

std::vector<std::size_t> strides_of(const std::vector<int>& shape) {
  std::vector<std::size_t> st(shape.size(), 1);
  for (int k = static_cast<int>(shape.size()) - 2; k >= 0; --k) st[k] = st[k + 1] * shape[k + 1];
  return st;
}

// Advances a mixed-radix counter; returns false after the last index.
bool next_index(std::vector<int>& idx, const std::vector<int>& shape) {
  for (int k = static_cast<int>(idx.size()) - 1; k >= 0; --k) {
    if (++idx[k] < shape[k]) return true;
    idx[k] = 0;
  }
  return false;
}

// Plane rotation generator: [c s; -conj(s) c] [f; g] = [r; 0].
void givens(cplx f, cplx g, double& c, cplx& s) {
  const double af = std::abs(f), ag = std::abs(g);
  if (ag == 0.0) {
    c = 1.0;
    s = 0.0;
    return;
  }
  if (af == 0.0) {
    c = 0.0;
    s = std::conj(g) / ag;
    return;
  }
  const double nrm = std::hypot(af, ag);
  c = af / nrm;
  s = (f / af) * std::conj(g) / nrm;
}

// x <- c x + s y,  y <- c y - conj(s) x
template <typename X, typename Y>
void rotate(X&& x, Y&& y, double c, cplx s) {
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const cplx xv = x(k), yv = y(k);
    x(k) = c * xv + s * yv;
    y(k) = c * yv - std::conj(s) * xv;
  }
}

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
};

bool lex_less(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

}  // namespace

Tensor::Tensor(std::vector<int> shape_) : shape(std::move(shape_)), data(product(shape), cplx(0.0)) {}

Tensor::Tensor(std::vector<int> shape_, std::vector<cplx> data_)
    : shape(std::move(shape_)), data(std::move(data_)) {
  if (data.size() != product(shape)) throw std::invalid_argument("tensor: entry count does not match shape");
}

std::size_t Tensor::offset(const std::vector<int>& index) const {
  if (index.size() != shape.size()) throw std::out_of_range("tensor: wrong number of indices");
  std::size_t off = 0;
  for (std::size_t k = 0; k < shape.size(); ++k) {
    if (index[k] < 0 || index[k] >= shape[k]) throw std::out_of_range("tensor: index out of range");
    off = off * shape[k] + index[k];
  }
  return off;
}

Tensor contract(const Tensor& a, const Tensor& b, const std::vector<std::pair<int, int>>& pairs) {
  const int ra = static_cast<int>(a.shape.size()), rb = static_cast<int>(b.shape.size());
  std::vector<bool> a_used(ra, false), b_used(rb, false);
  std::vector<int> sum_shape;
  for (auto [la, lb] : pairs) {
    if (la < 0 || la >= ra || lb < 0 || lb >= rb) throw ContractShapeError("contract: leg index out of range");
    if (a_used[la] || b_used[lb]) throw ContractShapeError("contract: leg paired twice");
    if (a.shape[la] != b.shape[lb])
      throw ContractShapeError("contract: dimension mismatch on legs " + std::to_string(la) + " and " +
                               std::to_string(lb));
    a_used[la] = b_used[lb] = true;
    sum_shape.push_back(a.shape[la]);
  }
  std::vector<int> a_free, b_free, out_shape;
  for (int k = 0; k < ra; ++k)
    if (!a_used[k]) a_free.push_back(k), out_shape.push_back(a.shape[k]);
  for (int k = 0; k < rb; ++k)
    if (!b_used[k]) b_free.push_back(k), out_shape.push_back(b.shape[k]);

  Tensor out(out_shape);
  const auto sa = strides_of(a.shape), sb = strides_of(b.shape);
  std::vector<int> oi(out_shape.size(), 0);
  std::size_t flat = 0;
  do {
    std::size_t base_a = 0, base_b = 0;
    for (std::size_t k = 0; k < a_free.size(); ++k) base_a += oi[k] * sa[a_free[k]];
    for (std::size_t k = 0; k < b_free.size(); ++k) base_b += oi[a_free.size() + k] * sb[b_free[k]];
    cplx acc = 0.0;
    std::vector<int> si(sum_shape.size(), 0);
    do {
      std::size_t ia = base_a, ib = base_b;
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        ia += si[k] * sa[pairs[k].first];
        ib += si[k] * sb[pairs[k].second];
      }
      acc += a.data[ia] * b.data[ib];
    } while (next_index(si, sum_shape));
    out.data[flat++] = acc;
  } while (next_index(oi, out_shape));
  return out;
}

CMatrix mat_power(const CMatrix& a, int k) {
  if (a.rows() != a.cols()) throw std::invalid_argument("mat_power: matrix is not square");
  if (k < 0) throw std::invalid_argument("mat_power: negative exponent");
  CMatrix result = CMatrix::Identity(a.rows(), a.cols());
  CMatrix base = a;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

SchurForm schur(const CMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("schur: matrix is not square");
  if (a.rows() == 0) return {CMatrix(0, 0), CMatrix(0, 0)};
  Eigen::ComplexSchur<CMatrix> cs(a.rows());
  cs.setMaxIterations(60 * a.rows());
  cs.compute(a);
  if (cs.info() != Eigen::Success)
    throw NumericalFailure("schur: QR iteration did not converge (dim " + std::to_string(a.rows()) +
                           ", max iterations " + std::to_string(cs.getMaxIterations()) + ")");
  return {cs.matrixT(), cs.matrixU()};
}

void swap_schur(SchurForm& s, int k) {
  const int n = static_cast<int>(s.T.rows());
  if (k < 0 || k + 1 >= n) throw std::out_of_range("swap_schur: position out of range");
  const cplx t11 = s.T(k, k), t22 = s.T(k + 1, k + 1);
  double c;
  cplx sn;
  givens(s.T(k, k + 1), t22 - t11, c, sn);
  if (k + 2 < n) rotate(s.T.row(k).tail(n - k - 2), s.T.row(k + 1).tail(n - k - 2), c, sn);
  if (k > 0) rotate(s.T.col(k).head(k), s.T.col(k + 1).head(k), c, std::conj(sn));
  s.T(k, k) = t22;
  s.T(k + 1, k + 1) = t11;
  s.T(k + 1, k) = 0.0;
  rotate(s.Q.col(k), s.Q.col(k + 1), c, std::conj(sn));
}

int reorder_schur(SchurForm& s, std::vector<bool> select) {
  const int n = static_cast<int>(s.T.rows());
  if (static_cast<int>(select.size()) != n) throw std::invalid_argument("reorder_schur: selection size mismatch");
  int front = 0;
  for (int j = 0; j < n; ++j) {
    if (!select[j]) continue;
    for (int k = j - 1; k >= front; --k) {
      swap_schur(s, k);
      std::swap(select[k], select[k + 1]);
    }
    ++front;
  }
  return front;
}

std::vector<cplx> eigenvalues_schur(const CMatrix& a) {
  const SchurForm s = schur(a);
  std::vector<cplx> out(s.T.rows());
  for (Eigen::Index k = 0; k < s.T.rows(); ++k) out[k] = s.T(k, k);
  return out;
}

std::vector<double> singular_values(const CMatrix& a) {
  if (a.size() == 0) return {};
  Eigen::BDCSVD<CMatrix> svd(a);
  const auto& sv = svd.singularValues();
  return std::vector<double>(sv.data(), sv.data() + sv.size());
}

double spectral_norm(const CMatrix& a) {
  const auto sv = singular_values(a);
  return sv.empty() ? 0.0 : sv.front();
}

int numerical_rank(const CMatrix& a, double rel_tol) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw std::invalid_argument("numerical_rank: rel_tol must lie in (0, 1)");
  const auto sv = singular_values(a);
  if (sv.empty() || sv.front() == 0.0) return 0;
  const double cut = rel_tol * sv.front();
  return static_cast<int>(std::count_if(sv.begin(), sv.end(), [cut](double x) { return x > cut; }));
}

double max_abs(const CMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

std::vector<Cluster> cluster_eigenvalues(const std::vector<cplx>& vals, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("cluster_eigenvalues: tol must be positive");
  const int n = static_cast<int>(vals.size());
  DisjointSets ds(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(vals[i] - vals[j]) <= tol) ds.parent[ds.find(i)] = ds.find(j);
  std::vector<Cluster> out;
  std::vector<int> slot(n, -1);
  for (int i = 0; i < n; ++i) {
    const int r = ds.find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(out.size());
      out.push_back({0.0, 0});
    }
    out[slot[r]].value += vals[i];
    out[slot[r]].multiplicity += 1;
  }
  for (auto& c : out) c.value /= static_cast<double>(c.multiplicity);
  std::sort(out.begin(), out.end(), [](const Cluster& a, const Cluster& b) { return lex_less(a.value, b.value); });
  return out;
}

std::vector<SpectralCluster> cluster_spectrum(const CMatrix& a, const SchurForm& s, const ConsensusOptions& opt) {
  const int n = static_cast<int>(a.rows());
  if (n == 0) return {};
  const CMatrix v = random_unitary(n, opt.seed);
  const SchurForm s2 = schur(v * a * v.adjoint());

  std::vector<cplx> pts(2 * n);
  double scale = 1.0;
  for (int k = 0; k < n; ++k) {
    pts[k] = s.T(k, k);
    pts[n + k] = s2.T(k, k);
    scale = std::max(scale, std::abs(pts[k]));
  }

  struct Edge {
    double d;
    int i, j;
  };
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n) * (2 * n - 1));
  for (int i = 0; i < 2 * n; ++i)
    for (int j = i + 1; j < 2 * n; ++j) edges.push_back({std::abs(pts[i] - pts[j]), i, j});
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    if (x.d != y.d) return x.d < y.d;
    return std::pair(x.i, x.j) < std::pair(y.i, y.j);
  });

  DisjointSets ds(2 * n);
  std::vector<int> count0(2 * n, 0), count1(2 * n, 0);
  std::vector<cplx> sum0(2 * n, 0.0), sum1(2 * n, 0.0);
  std::vector<std::vector<int>> members(2 * n);
  std::vector<bool> frozen(2 * n, false);
  for (int k = 0; k < 2 * n; ++k) {
    (k < n ? count0 : count1)[k] = 1;
    (k < n ? sum0 : sum1)[k] = pts[k];
    members[k] = {k};
  }

  std::vector<SpectralCluster> found;
  int assigned = 0;
  auto freeze = [&](int r) {
    frozen[r] = true;
    SpectralCluster c;
    c.value = (sum0[r] + sum1[r]) / static_cast<double>(count0[r] + count1[r]);
    c.multiplicity = count0[r];
    for (int p : members[r])
      if (p < n) c.members.push_back(p);
    assigned += count0[r];
    found.push_back(std::move(c));
  };
  for (const Edge& e : edges) {
    if (assigned == n) break;
    int ri = ds.find(e.i), rj = ds.find(e.j);
    if (ri == rj || frozen[ri] || frozen[rj]) continue;
    ds.parent[ri] = rj;
    count0[rj] += count0[ri];
    count1[rj] += count1[ri];
    sum0[rj] += sum0[ri];
    sum1[rj] += sum1[ri];
    members[rj].insert(members[rj].end(), members[ri].begin(), members[ri].end());
    members[ri].clear();
    if (count0[rj] == count1[rj] &&
        std::abs(sum0[rj] - sum1[rj]) / static_cast<double>(count0[rj]) <= opt.agree_tol * scale)
      freeze(rj);
  }
  if (assigned < n) {
    // Accumulated rounding kept the remainder from agreeing; keep it whole.
    SpectralCluster rest;
    for (int k = 0; k < n; ++k)
      if (!frozen[ds.find(k)]) {
        rest.members.push_back(k);
        rest.value += pts[k];
      }
    rest.multiplicity = static_cast<int>(rest.members.size());
    rest.value /= static_cast<double>(rest.multiplicity);
    found.push_back(std::move(rest));
  }

  // Close the partition: semisimple degeneracies and several Jordan blocks
  // at the same eigenvalue freeze as separate pieces with coincident means.
  std::sort(found.begin(), found.end(),
            [](const SpectralCluster& x, const SpectralCluster& y) { return lex_less(x.value, y.value); });
  const int nf = static_cast<int>(found.size());
  DisjointSets close(nf);
  for (int i = 0; i < nf; ++i)
    for (int j = i + 1; j < nf; ++j)
      if (std::abs(found[i].value - found[j].value) <= opt.merge_tol * scale) close.parent[close.find(i)] = close.find(j);
  std::vector<SpectralCluster> out;
  std::vector<int> slot(nf, -1);
  for (int i = 0; i < nf; ++i) {
    const int r = close.find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(out.size());
      out.push_back({0.0, 0, {}});
    }
    auto& c = out[slot[r]];
    c.value += found[i].value * static_cast<double>(found[i].multiplicity);
    c.multiplicity += found[i].multiplicity;
    c.members.insert(c.members.end(), found[i].members.begin(), found[i].members.end());
  }
  for (auto& c : out) {
    c.value /= static_cast<double>(c.multiplicity);
    std::sort(c.members.begin(), c.members.end());
  }
  std::sort(out.begin(), out.end(),
            [](const SpectralCluster& x, const SpectralCluster& y) { return lex_less(x.value, y.value); });
  return out;
}

std::vector<SpectralCluster> cluster_spectrum(const CMatrix& a, const ConsensusOptions& opt) {
  return cluster_spectrum(a, schur(a), opt);
}

CMatrix random_unitary(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMatrix z(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) z(i, j) = cplx(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const double ar = std::abs(r(j, j));
    if (ar > 0.0) q.col(j) *= r(j, j) / ar;
  }
  return q;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace brickwork
