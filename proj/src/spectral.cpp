#include "brickwork/spectral.hpp"

#include "brickwork/gates.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>

namespace brickwork {

namespace {

// Single-qubit operator on leg `leg` of an n-leg register (leg 0 most significant).
CMatrix on_leg(int n_legs, int leg, const CMatrix& op) {
  const Eigen::Index left = Eigen::Index(1) << leg;
  const Eigen::Index right = Eigen::Index(1) << (n_legs - leg - 1);
  return kron(kron(CMatrix::Identity(left, left), op), CMatrix::Identity(right, right));
}

// Orthonormal basis of the generalized eigenspace of a cluster.
CMatrix cluster_basis(const SchurForm& s, const SpectralCluster& c) {
  SchurForm r = s;
  std::vector<bool> select(r.T.rows(), false);
  for (int p : c.members) select[p] = true;
  const int k = reorder_schur(r, select);
  return r.Q.leftCols(k);
}

std::vector<int> blocks_at(const CMatrix& nil, int size, double scale, double tol, std::vector<int>& weyr,
                           bool& complete) {
  weyr.clear();
  CMatrix power = CMatrix::Identity(size, size);
  int previous = 0;
  complete = false;
  double scale_k = 1.0;
  for (int k = 1; k <= size; ++k) {
    power = power * nil;
    scale_k *= scale;
    const std::vector<double> sv = singular_values(power);
    const int nullity = static_cast<int>(std::count_if(sv.begin(), sv.end(), [&](double x) { return x <= tol * scale_k; }));
    if (nullity == previous) break;
    weyr.push_back(nullity - previous);
    previous = nullity;
    if (nullity == size) {
      complete = true;
      break;
    }
  }
  return weyr_to_blocks(weyr);
}

}  // namespace

double commutator_residual(const CMatrix& a, const CMatrix& b) { return max_abs(a * b - b * a); }

double check_commuting_family(int m, const std::vector<double>& lambdas, const std::vector<double>& eps, Kind kind) {
  std::vector<CMatrix> mats;
  for (double l : lambdas) mats.push_back(build_transfer(m, l, eps, kind).matrix);
  double worst = 0.0;
  for (std::size_t i = 0; i < mats.size(); ++i)
    for (std::size_t j = i + 1; j < mats.size(); ++j) worst = std::max(worst, commutator_residual(mats[i], mats[j]));
  return worst;
}

bool JordanReport::diagonalizable() const {
  return std::all_of(eigenvalues.begin(), eigenvalues.end(), [](const EigenvalueJordanData& e) {
    return std::all_of(e.blocks.begin(), e.blocks.end(), [](int b) { return b == 1; });
  });
}

std::vector<int> weyr_to_blocks(const std::vector<int>& weyr) {
  std::vector<int> blocks;
  for (std::size_t k = 0; k < weyr.size(); ++k) {
    const int next = k + 1 < weyr.size() ? weyr[k + 1] : 0;
    for (int c = 0; c < weyr[k] - next; ++c) blocks.push_back(static_cast<int>(k) + 1);
  }
  std::sort(blocks.rbegin(), blocks.rend());
  return blocks;
}

JordanReport jordan_structure(const CMatrix& a, double rank_tol) {
  if (a.rows() != a.cols()) throw std::invalid_argument("jordan_structure: matrix must be square");
  if (a.rows() > 256) throw ResourceError("jordan_structure: dimension above 256");
  JordanReport rep;
  rep.rank_tol = rank_tol;
  rep.dimension = static_cast<int>(a.rows());
  const SchurForm s = schur(a);
  for (const SpectralCluster& c : cluster_spectrum(a, s)) {
    SchurForm r = s;
    std::vector<bool> select(r.T.rows(), false);
    for (int p : c.members) select[p] = true;
    const int k = reorder_schur(r, select);
    const CMatrix nil = r.T.topLeftCorner(k, k) - c.value * CMatrix::Identity(k, k);
    const double scale = std::max(spectral_norm(r.T - c.value * CMatrix::Identity(r.T.rows(), r.T.cols())), 1e-300);

    EigenvalueJordanData e;
    e.value = c.value;
    e.multiplicity = c.multiplicity;
    bool complete = false;
    e.blocks = blocks_at(nil, k, scale, rank_tol, e.weyr, complete);
    std::vector<int> w_lo, w_hi;
    bool c_lo = false, c_hi = false;
    const std::vector<int> b_lo = blocks_at(nil, k, scale, rank_tol * 10.0, w_lo, c_lo);
    const std::vector<int> b_hi = blocks_at(nil, k, scale, rank_tol / 10.0, w_hi, c_hi);
    e.stable = complete && c_lo && c_hi && b_lo == e.blocks && b_hi == e.blocks;
    rep.stable = rep.stable && e.stable;
    rep.eigenvalues.push_back(std::move(e));
  }
  return rep;
}

JordanReport jordan_structure(const TransferMatrix& tm, double rank_tol) { return jordan_structure(tm.matrix, rank_tol); }

Su2Generators su2_generators(int m) {
  if (m < 1) throw std::invalid_argument("su2_generators: m must be at least 1");
  const int n_legs = 2 * m;
  CMatrix sz = CMatrix::Zero(2, 2), sx = CMatrix::Zero(2, 2), sy = CMatrix::Zero(2, 2);
  sz << -0.5, 0.0, 0.0, 0.5;
  sx << 0.0, 0.5, 0.5, 0.0;
  sy << 0.0, 0.5 * kI, -0.5 * kI, 0.0;
  const Eigen::Index dim = Eigen::Index(1) << n_legs;
  Su2Generators g;
  g.m = m;
  g.Sz = g.Sx = g.Sy = CMatrix::Zero(dim, dim);
  for (int leg = 0; leg < n_legs; ++leg) {
    const bool dagger_sheet = leg < m;
    g.Sz += (dagger_sheet ? 1.0 : -1.0) * on_leg(n_legs, leg, sz);
    g.Sx += (dagger_sheet ? -1.0 : 1.0) * on_leg(n_legs, leg, sx);
    g.Sy -= on_leg(n_legs, leg, sy);
  }
  g.S2 = g.Sx * g.Sx + g.Sy * g.Sy + g.Sz * g.Sz;
  return g;
}

double su2_algebra_residual(const Su2Generators& g) {
  const double r1 = max_abs(g.Sx * g.Sy - g.Sy * g.Sx - kI * g.Sz);
  const double r2 = max_abs(g.Sy * g.Sz - g.Sz * g.Sy - kI * g.Sx);
  const double r3 = max_abs(g.Sz * g.Sx - g.Sx * g.Sz - kI * g.Sy);
  const double r4 = max_abs(g.S2 - (g.Sx * g.Sx + g.Sy * g.Sy + g.Sz * g.Sz));
  return std::max({r1, r2, r3, r4});
}

std::vector<MultipletRow> multiplet_table(const TransferMatrix& tm, const Su2Generators& gens) {
  if (gens.Sz.rows() != tm.matrix.rows()) throw std::invalid_argument("multiplet_table: generator dimension mismatch");
  const SchurForm s = schur(tm.matrix);
  std::vector<MultipletRow> rows;
  for (const SpectralCluster& c : cluster_spectrum(tm.matrix, s)) {
    const CMatrix q = cluster_basis(s, c);
    const CMatrix sz = q.adjoint() * gens.Sz * q;
    const CMatrix s2 = q.adjoint() * gens.S2 * q;
    Eigen::SelfAdjointEigenSolver<CMatrix> ez(0.5 * (sz + sz.adjoint()), Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (s2 + s2.adjoint()), Eigen::EigenvaluesOnly);
    std::map<int, int> dz, ds;
    for (Eigen::Index k = 0; k < ez.eigenvalues().size(); ++k) {
      const double v = ez.eigenvalues()(k);
      if (std::abs(v - std::round(v)) > 1e-6) throw ClassificationError("multiplet_table: non-integral Sz eigenvalue");
      ++dz[static_cast<int>(std::lround(v))];
    }
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
      const double v = es.eigenvalues()(k);
      const double spin = 0.5 * (std::sqrt(1.0 + 4.0 * std::max(v, 0.0)) - 1.0);
      if (std::abs(spin - std::round(spin)) > 1e-6) throw ClassificationError("multiplet_table: non-integral total spin");
      ++ds[static_cast<int>(std::lround(spin))];
    }
    int top = 0;
    for (const auto& [k, d] : dz) top = std::max(top, std::abs(k));
    for (int spin = 0; spin <= top; ++spin) {
      const int count = dz[spin] - dz[spin + 1];
      if (count < 0 || dz[spin] != dz[-spin])
        throw ClassificationError("multiplet_table: Sz content is not a sum of spin multiplets");
      if (count == 0) continue;
      if (ds[spin] != count * (2 * spin + 1))
        throw ClassificationError("multiplet_table: Sz and S2 content disagree");
      rows.push_back({c.value, spin, count, count * (2 * spin + 1)});
    }
  }
  return rows;
}

NestingReport nesting_check(const std::vector<std::vector<SpectralCluster>>& spectra, double lambda, double tol) {
  NestingReport rep;
  rep.lambda = lambda;
  rep.tol = tol;
  for (std::size_t lvl = 0; lvl + 1 < spectra.size(); ++lvl) {
    NestingLevel level;
    level.m = static_cast<int>(lvl) + 1;
    for (const SpectralCluster& c : spectra[lvl]) {
      ++level.checked;
      double best = INFINITY;
      for (const SpectralCluster& d : spectra[lvl + 1])
        if (d.multiplicity >= c.multiplicity) best = std::min(best, std::abs(d.value - c.value));
      level.worst_distance = std::max(level.worst_distance, best);
      if (!(best <= tol * std::max(1.0, std::abs(c.value)))) ++level.unmatched;
    }
    rep.ok = rep.ok && level.unmatched == 0;
    rep.levels.push_back(level);
  }
  return rep;
}

NestingReport nesting_check(int m_max, double lambda, double tol) {
  if (m_max < 1 || m_max > kMaxCorrelationM) throw ResourceError("nesting_check: m_max must lie in 1..4");
  std::vector<std::vector<SpectralCluster>> spectra;
  for (int m = 1; m <= m_max; ++m) spectra.push_back(cluster_spectrum(build_transfer(m, lambda).matrix));
  return nesting_check(spectra, lambda, tol);
}

CMatrix arc_insertion(int m) {
  if (m < 1) throw std::invalid_argument("arc_insertion: m must be at least 1");
  const int in_legs = 2 * (m - 1);
  const Eigen::Index in_dim = Eigen::Index(1) << in_legs;
  CMatrix e = CMatrix::Zero(in_dim * 4, in_dim);
  const Eigen::Index low_mask = (Eigen::Index(1) << (m - 1)) - 1;
  for (Eigen::Index col = 0; col < in_dim; ++col) {
    const Eigen::Index high = col >> (m - 1);  // legs 1 .. m-1
    const Eigen::Index low = col & low_mask;   // legs m .. 2m-2 of the input
    for (Eigen::Index c = 0; c < 2; ++c) {
      const Eigen::Index row = (((high << 2) | (c << 1) | c) << (m - 1)) | low;
      e(row, col) = 1.0 / std::sqrt(2.0);
    }
  }
  return e;
}

double intertwiner_residual(int m, double lambda) {
  const CMatrix e = arc_insertion(m);
  const CMatrix lower = m == 1 ? CMatrix::Identity(1, 1) : build_transfer(m - 1, lambda).matrix;
  return max_abs(build_transfer(m, lambda).matrix * e - e * lower);
}

std::vector<ReferenceEigenvalue> reference_spectrum(int m, double l) {
  if (m < 1 || m > 3) throw std::invalid_argument("reference_spectrum: closed forms are tabulated for m <= 3");
  const double l2 = l * l, q = 1.0 + l2, s3 = std::sqrt(3.0);
  const double q2 = q * q, q3 = q2 * q;
  if (m == 1) return {{"1", 1.0, 1, {1}}, {"l^2/(1+l^2)", l2 / q, 3, {1, 1, 1}}};
  if (m == 2)
    return {{"1", 1.0, 1, {1}},
            {"l^2/(1+l^2)", l2 / q, 9, {3, 3, 3}},
            {"l^2(l^2-1)/(1+l^2)^2", l2 * (l2 - 1.0) / q2, 5, {1, 1, 1, 1, 1}},
            {"l^2(l^2+2)/(1+l^2)^2", l2 * (l2 + 2.0) / q2, 1, {1}}};
  const double l3 = l2 * l, l4 = l2 * l2;
  return {{"1", 1.0, 1, {1}},
          {"l^2/(1+l^2)", l2 / q, 18, {5, 5, 5, 1, 1, 1}},
          {"l^2(l^2+2)/(1+l^2)^2", l2 * (l2 + 2.0) / q2, 3, {3}},
          {"l^2(l^2-1)/(1+l^2)^2", l2 * (l2 - 1.0) / q2, 15, {3, 3, 3, 3, 3}},
          {"l^3(l^3+2l+sqrt3)/(1+l^2)^3", l3 * (l3 + 2.0 * l + s3) / q3, 3, {1, 1, 1}},
          {"l^4(l^2-3)/(1+l^2)^3", l4 * (l2 - 3.0) / q3, 7, std::vector<int>(7, 1)},
          {"l^4(l^2+3)/(1+l^2)^3", l4 * (l2 + 3.0) / q3, 1, {1}},
          {"l^4(l^2+2)/(1+l^2)^3", l4 * (l2 + 2.0) / q3, 3, {1, 1, 1}},
          {"l^3(l^3-sqrt3)/(1+l^2)^3", l3 * (l3 - s3) / q3, 5, std::vector<int>(5, 1)},
          {"l^3(l^3+sqrt3)/(1+l^2)^3", l3 * (l3 + s3) / q3, 5, std::vector<int>(5, 1)},
          {"l^3(l^3+2l-sqrt3)/(1+l^2)^3", l3 * (l3 + 2.0 * l - s3) / q3, 3, {1, 1, 1}}};
}

std::vector<ReferenceEigenvalue> merge_coincident(std::vector<ReferenceEigenvalue> entries, double tol) {
  std::sort(entries.begin(), entries.end(),
            [](const ReferenceEigenvalue& a, const ReferenceEigenvalue& b) { return a.value < b.value; });
  std::vector<ReferenceEigenvalue> out;
  for (ReferenceEigenvalue& e : entries) {
    if (!out.empty() && std::abs(out.back().value - e.value) <= tol) {
      ReferenceEigenvalue& b = out.back();
      b.formula += " = " + e.formula;
      b.degeneracy += e.degeneracy;
      b.blocks.insert(b.blocks.end(), e.blocks.begin(), e.blocks.end());
      std::sort(b.blocks.rbegin(), b.blocks.rend());
    } else {
      out.push_back(std::move(e));
    }
  }
  return out;
}

ReferenceComparison compare_with_reference(const JordanReport& report, const std::vector<ReferenceEigenvalue>& reference,
                                           double value_tol, bool check_blocks) {
  ReferenceComparison cmp;
  std::vector<bool> used(report.eigenvalues.size(), false);
  for (const ReferenceEigenvalue& ref : reference) {
    ++cmp.entries;
    int best = -1;
    double best_dist = INFINITY;
    for (std::size_t i = 0; i < report.eigenvalues.size(); ++i) {
      const double d = std::abs(report.eigenvalues[i].value - ref.value);
      if (d < best_dist) {
        best_dist = d;
        best = static_cast<int>(i);
      }
    }
    if (best < 0 || best_dist > value_tol * std::max(1.0, std::abs(ref.value))) {
      ++cmp.missing;
      continue;
    }
    used[best] = true;
    cmp.worst_value_error = std::max(cmp.worst_value_error, best_dist);
    const EigenvalueJordanData& got = report.eigenvalues[best];
    if (got.multiplicity != ref.degeneracy) ++cmp.wrong_degeneracy;
    if (check_blocks) {
      std::vector<int> want = ref.blocks;
      std::sort(want.rbegin(), want.rend());
      if (got.blocks != want) ++cmp.wrong_blocks;
    }
  }
  for (bool u : used)
    if (!u) ++cmp.extra;
  return cmp;
}

namespace {

struct Derivative {
  CVector v;
  cplx dt;
};

struct SplitState {
  CVector psi;
  cplx t;
};

// Bethe vector and eigenvalue with the inhomogeneities at positions
// (n-1, n) (0-based) split into (Delta/2, -Delta/2).
SplitState split_state(int m, const BetheRootSet& rs, double big_delta, double mu) {
  const int n = rs.n;
  std::vector<double> eps(m, 0.0);
  eps[n - 1] += 0.5 * big_delta;
  eps[n] -= 0.5 * big_delta;
  BetheRootSet moved = rs;
  moved.epsilons.assign(eps.begin(), eps.begin() + n);
  if (!rs.roots.empty()) {
    if (rs.kind != RootKind::regular)
      throw ContinuationError("generalized_eigenvector: only regular root sets can be continued");
    moved = continue_roots(rs.roots, std::vector<double>(n, 0.0), moved.epsilons, 10);
  }
  return {bethe_vector(m, n, moved.roots, eps), bethe_eigenvalue(mu, moved)};
}

Derivative central_difference(int m, const BetheRootSet& rs, double delta, double mu) {
  const SplitState plus = split_state(m, rs, delta, mu);
  const SplitState minus = split_state(m, rs, -delta, mu);
  const int k = rs.n - 1;
  const CVector v =
      (exchange_unitary(m, k, 0.5 * delta) * plus.psi - exchange_unitary(m, k, -0.5 * delta) * minus.psi) /
      (2.0 * delta);
  return {v, (plus.t - minus.t) / (2.0 * delta)};
}

double generalized_residual(const CMatrix& tau, cplx t0, const CVector& v, cplx dt, const CVector& psi0) {
  return (tau * v - t0 * v - dt * psi0).norm() / v.norm();
}

void check_generalized_input(int m, const BetheRootSet& rs) {
  if (rs.n < 1 || rs.n >= m)
    throw std::invalid_argument("generalized_eigenvector: the split pair (n, n+1) requires 1 <= n < m");
  for (double e : rs.epsilons)
    if (e != 0.0) throw std::invalid_argument("generalized_eigenvector: root set must be homogeneous");
}

}  // namespace

GeneralizedEigenvector generalized_eigenvector(int m, const BetheRootSet& rs, double delta, double mu) {
  check_generalized_input(m, rs);
  GeneralizedEigenvector out;
  out.psi0 = bethe_vector(m, rs.n, rs.roots);
  out.t0 = bethe_eigenvalue(mu, rs);
  const CMatrix tau = build_transfer(m, mu).matrix;
  if (delta == 0.0) {
    out.vector = out.psi0;
    out.dt = 0.0;
    out.residual = (tau * out.psi0 - out.t0 * out.psi0).norm() / out.psi0.norm();
    return out;
  }
  const Derivative d = central_difference(m, rs, delta, mu);
  out.vector = d.v;
  out.dt = d.dt;
  out.residual = generalized_residual(tau, out.t0, d.v, d.dt, out.psi0);
  return out;
}

RichardsonCheck richardson_check(int m, const BetheRootSet& rs, double delta, double mu) {
  check_generalized_input(m, rs);
  if (!(delta > 0.0)) throw std::invalid_argument("richardson_check: delta must be positive");
  const CVector psi0 = bethe_vector(m, rs.n, rs.roots);
  const cplx t0 = bethe_eigenvalue(mu, rs);
  const CMatrix tau = build_transfer(m, mu).matrix;
  const Derivative coarse = central_difference(m, rs, delta, mu);
  const Derivative fine = central_difference(m, rs, 0.5 * delta, mu);
  RichardsonCheck rc;
  rc.coarse = generalized_residual(tau, t0, coarse.v, coarse.dt, psi0);
  rc.fine = generalized_residual(tau, t0, fine.v, fine.dt, psi0);
  rc.ratio = rc.coarse / rc.fine;
  const CVector v = (4.0 * fine.v - coarse.v) / 3.0;
  const cplx dt = (4.0 * fine.dt - coarse.dt) / 3.0;
  rc.extrapolated = generalized_residual(tau, t0, v, dt, psi0);
  return rc;
}

}  // namespace brickwork
