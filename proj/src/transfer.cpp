#include "brickwork/transfer.hpp"

#include "brickwork/gates.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

namespace brickwork {

namespace {

using LaxBlocks = std::array<std::array<CMatrix, 2>, 2>;

std::vector<double> resolve_eps(int m, const std::vector<double>& eps) {
  if (eps.empty()) return std::vector<double>(m, 0.0);
  if (static_cast<int>(eps.size()) != m)
    throw std::invalid_argument("inhomogeneity list must have m = " + std::to_string(m) + " entries");
  return eps;
}

// Lax operator of a U^dagger-sheet leg: L[a][a'](i, j) = R(-(lambda - eps))_{a i, j a'}.
LaxBlocks lax_dagger(cplx x) {
  const CMatrix r = r_matrix(-x);
  LaxBlocks l;
  for (int a = 0; a < 2; ++a)
    for (int ap = 0; ap < 2; ++ap) {
      l[a][ap] = CMatrix(2, 2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) l[a][ap](i, j) = r(2 * a + i, 2 * j + ap);
    }
  return l;
}

// Lax operator of a U-sheet leg: L[a][a'](i, j) = R(lambda - eps)_{j a, a' i}.
LaxBlocks lax_forward(cplx x) {
  const CMatrix r = r_matrix(x);
  LaxBlocks l;
  for (int a = 0; a < 2; ++a)
    for (int ap = 0; ap < 2; ++ap) {
      l[a][ap] = CMatrix(2, 2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) l[a][ap](i, j) = r(2 * j + a, 2 * ap + i);
    }
  return l;
}

// Two-qubit gate on legs (l, l+1) of an n-leg register, leg 0 most significant.
CMatrix on_legs(int n_legs, int l, const CMatrix& g) {
  const Eigen::Index left = Eigen::Index(1) << l;
  const Eigen::Index right = Eigen::Index(1) << (n_legs - l - 2);
  return kron(kron(CMatrix::Identity(left, left), g), CMatrix::Identity(right, right));
}

CVector from_bits(int n_legs, const std::function<cplx(const std::vector<int>&)>& amplitude) {
  CVector v = CVector::Zero(Eigen::Index(1) << n_legs);
  std::vector<int> bits(n_legs, 0);
  for (std::size_t idx = 0; idx < static_cast<std::size_t>(v.size()); ++idx) {
    for (int k = 0; k < n_legs; ++k) bits[k] = static_cast<int>((idx >> (n_legs - 1 - k)) & 1U);
    v(static_cast<Eigen::Index>(idx)) = amplitude(bits);
  }
  return v;
}

// Boundary vectors need no dense operator and may exceed the transfer cap;
// zero-step contractions at the light-cone edge use them directly.
constexpr int kMaxBoundaryM = 8;

void check_m(int m, Kind kind) {
  const int cap = kind == Kind::correlation ? kMaxCorrelationM : kMaxOtocM;
  if (m < 1) throw std::invalid_argument("half-width m must be at least 1");
  if (m > cap) throw ResourceError("half-width m = " + std::to_string(m) + " exceeds the dense cap " + std::to_string(cap));
}

// Adjacent swaps (positions k, k+1) turning the identity arrangement into perm.
std::vector<int> adjacent_swaps(const std::vector<int>& perm) {
  const int m = static_cast<int>(perm.size());
  std::vector<int> arrangement(m);
  std::iota(arrangement.begin(), arrangement.end(), 0);
  std::vector<int> swaps;
  for (int pos = 0; pos < m; ++pos) {
    auto it = std::find(arrangement.begin() + pos, arrangement.end(), perm[pos]);
    if (it == arrangement.end()) throw std::invalid_argument("invalid permutation");
    for (int j = static_cast<int>(it - arrangement.begin()); j > pos; --j) {
      std::swap(arrangement[j - 1], arrangement[j]);
      swaps.push_back(j - 1);
    }
  }
  return swaps;
}

void check_perm(const std::vector<int>& perm, int m) {
  if (static_cast<int>(perm.size()) != m) throw std::invalid_argument("permutation must have m entries");
  std::vector<int> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (int k = 0; k < m; ++k)
    if (sorted[k] != k) throw std::invalid_argument("invalid permutation of 0..m-1");
}

// Leg of the OTOC folded space: block 0/1, sheet dagger/forward, position 1..m.
int otoc_leg(int m, int block, bool dagger, int k) { return block * 2 * m + (dagger ? k - 1 : 2 * m - k); }

CVector otoc_pairing(int m, bool within, int sigma_pos, const CMatrix& s) {
  const CVector v = from_bits(4 * m, [&](const std::vector<int>& bits) -> cplx {
    cplx val = 1.0;
    for (int k = 1; k <= m; ++k) {
      for (int blk = 0; blk < 2; ++blk) {
        const int d = bits[otoc_leg(m, blk, true, k)];
        const int u = bits[otoc_leg(m, within ? blk : 1 - blk, false, k)];
        val *= (k == sigma_pos) ? s(u, d) : cplx(d == u ? 1.0 : 0.0);
        if (val == 0.0) return 0.0;
      }
    }
    return val;
  });
  return v / std::pow(2.0, m);
}

}  // namespace

const CMatrix& Monodromy::block(int a, int b) const {
  if (a == 0) return b == 0 ? A : B;
  return b == 0 ? C : D;
}

Monodromy build_monodromy(int m, cplx lambda, const std::vector<double>& eps_in) {
  check_m(m, Kind::correlation);
  const std::vector<double> eps = resolve_eps(m, eps_in);
  std::vector<LaxBlocks> legs;
  for (int k = 0; k < m; ++k) legs.push_back(lax_dagger(lambda - eps[k]));
  for (int j = 0; j < m; ++j) legs.push_back(lax_forward(lambda - eps[m - 1 - j]));

  LaxBlocks t;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) t[a][b] = CMatrix::Constant(1, 1, a == b ? 1.0 : 0.0);
  for (const LaxBlocks& l : legs) {
    LaxBlocks next;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) next[a][b] = kron(t[a][0], l[0][b]) + kron(t[a][1], l[1][b]);
    t = std::move(next);
  }
  return {m, lambda, eps, std::move(t[0][0]), std::move(t[0][1]), std::move(t[1][0]), std::move(t[1][1])};
}

double rtt_residual(int m, double lambda, double mu, const std::vector<double>& eps) {
  const Monodromy tl = build_monodromy(m, lambda, eps);
  const Monodromy tm = build_monodromy(m, mu, eps);
  const Eigen::Index dim = tl.A.rows();
  const CMatrix id2 = CMatrix::Identity(2, 2);
  auto unit = [](int a, int b) {
    CMatrix e = CMatrix::Zero(2, 2);
    e(a, b) = 1.0;
    return e;
  };
  CMatrix t1 = CMatrix::Zero(4 * dim, 4 * dim), t2 = CMatrix::Zero(4 * dim, 4 * dim);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      t1 += kron(kron(unit(a, b), id2), tl.block(a, b));
      t2 += kron(kron(id2, unit(a, b)), tm.block(a, b));
    }
  const CMatrix r = kron(swap_matrix() * r_matrix(mu - lambda), CMatrix::Identity(dim, dim));
  return max_abs(r * t1 * t2 - t2 * t1 * r);
}

TransferMatrix build_transfer(int m, double lambda, const std::vector<double>& eps, Kind kind) {
  check_m(m, kind);
  const Monodromy t = build_monodromy(m, lambda, eps);
  TransferMatrix out;
  out.m = m;
  out.lambda = lambda;
  out.epsilons = t.epsilons;
  out.kind = kind;
  if (kind == Kind::correlation) {
    out.matrix = 0.5 * (t.A + t.D);
  } else {
    // Product monodromy over the two blocks, auxiliary trace, unital eigenvalue 1.
    out.matrix = CMatrix::Zero(t.A.rows() * t.A.rows(), t.A.cols() * t.A.cols());
    for (int a = 0; a < 2; ++a)
      for (int c = 0; c < 2; ++c) out.matrix += kron(t.block(a, c), t.block(c, a));
    out.matrix *= 0.5;
  }
  return out;
}

std::vector<double> permute(const std::vector<double>& eps, const std::vector<int>& perm) {
  check_perm(perm, static_cast<int>(eps.size()));
  std::vector<double> out(eps.size());
  for (std::size_t k = 0; k < perm.size(); ++k) out[k] = eps[perm[k]];
  return out;
}

CMatrix exchange_unitary(int m, int k, double delta) {
  check_m(m, Kind::correlation);
  if (k < 0 || k + 1 >= m) throw std::invalid_argument("exchange_unitary: positions must satisfy 0 <= k < m-1");
  const int n_legs = 2 * m;
  return on_legs(n_legs, k, r_matrix(delta)) * on_legs(n_legs, n_legs - k - 2, r_matrix(-delta));
}

CMatrix permutation_unitary(int m, const std::vector<int>& perm, const std::vector<double>& eps_in) {
  const std::vector<double> eps = resolve_eps(m, eps_in);
  check_perm(perm, m);
  const Eigen::Index dim = Eigen::Index(1) << (2 * m);
  CMatrix w = CMatrix::Identity(dim, dim);
  std::vector<double> cur = eps;
  for (int k : adjacent_swaps(perm)) {
    w = exchange_unitary(m, k, cur[k] - cur[k + 1]) * w;
    std::swap(cur[k], cur[k + 1]);
  }
  return w;
}

CVector pseudo_vacuum(int m, int n, const std::vector<int>& perm, const std::vector<double>& eps) {
  check_m(m, Kind::correlation);
  if (n < 0 || n > m) throw std::invalid_argument("pseudo_vacuum: need 0 <= n <= m");
  const int n_legs = 2 * m;
  CVector v = from_bits(n_legs, [&](const std::vector<int>& bits) -> cplx {
    for (int k = 0; k < n; ++k)
      if (bits[k] != 0 || bits[n_legs - 1 - k] != 1) return 0.0;
    for (int k = n; k < m; ++k)
      if (bits[k] != bits[n_legs - 1 - k]) return 0.0;
    return 1.0;
  });
  v /= std::pow(std::sqrt(2.0), m - n);
  if (perm.empty()) return v;
  return permutation_unitary(m, perm, eps).adjoint() * v;
}

VacuumOrbit vacuum_orbit(int m, int n, const std::vector<double>& eps_in) {
  const std::vector<double> eps = resolve_eps(m, eps_in);
  if (n < 0 || n > m) throw std::invalid_argument("vacuum_orbit: need 0 <= n <= m");
  VacuumOrbit orbit;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (std::abs(eps[i] - eps[j]) < 1e-6) orbit.ill_conditioned = true;

  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    CVector v = pseudo_vacuum(m, n, perm, eps);
    v.normalize();
    const bool seen = std::any_of(orbit.states.begin(), orbit.states.end(), [&](const OrbitState& s) {
      return std::abs(s.state.dot(v)) > 1.0 - 1e-9;
    });
    if (seen) continue;
    std::vector<int> subset(perm.begin(), perm.begin() + n);
    std::sort(subset.begin(), subset.end());
    orbit.states.push_back({subset, v});
  } while (std::next_permutation(perm.begin(), perm.end()));
  return orbit;
}

CVector boundary_vector(int m, int alpha, Side side) {
  if (m < 1 || m > kMaxBoundaryM) throw ResourceError("boundary_vector: half-width out of range");
  const CMatrix& s = pauli(alpha);
  const int n_legs = 2 * m;
  const int sigma_arc = side == Side::ket ? m : 1;
  CVector v = from_bits(n_legs, [&](const std::vector<int>& bits) -> cplx {
    cplx val = 1.0;
    for (int k = 1; k <= m; ++k) {
      const int left = bits[k - 1], right = bits[n_legs - k];
      const cplx entry = side == Side::ket ? s(left, right) : s(right, left);
      val *= (k == sigma_arc) ? entry : cplx(left == right ? 1.0 : 0.0);
      if (val == 0.0) return 0.0;
    }
    return val;
  });
  return v / std::pow(std::sqrt(2.0), m);
}

cplx correlation_via_tm(int m, int steps, int alpha, int beta, double lambda, const std::vector<double>& eps) {
  if (steps < 0) throw std::invalid_argument("correlation_via_tm: steps must be non-negative");
  CVector v = boundary_vector(m, alpha, Side::ket);
  if (steps > 0) {
    const TransferMatrix tm = build_transfer(m, lambda, eps);
    for (int s = 0; s < steps; ++s) v = tm.matrix * v;
  }
  return boundary_vector(m, beta, Side::bra).transpose() * v;
}

LightCone light_cone(int x, int t) {
  if (t < 0) throw std::invalid_argument("light_cone: t must be non-negative");
  if (((t - x) % 2 + 2) % 2 != 0)
    throw std::invalid_argument("light_cone: t - x must be even (odd offsets need different boundary vectors)");
  if (x > t || x < -t) throw std::invalid_argument("light_cone: need -t <= x <= t");
  return {(t - x + 2) / 2, (t + x) / 2};
}

CVector otoc_pseudo_vacuum(int m, int n, int l) {
  check_m(m, Kind::otoc);
  return kron(pseudo_vacuum(m, n), pseudo_vacuum(m, l));
}

CVector otoc_boundary_vector(int m, int alpha, Side side) {
  check_m(m, Kind::otoc);
  return side == Side::ket ? otoc_pairing(m, true, m, pauli(alpha)) : otoc_pairing(m, false, 1, pauli(alpha));
}

cplx otoc_via_tm(int m, int steps, int alpha, int beta, double lambda, const std::vector<double>& eps) {
  if (steps < 0) throw std::invalid_argument("otoc_via_tm: steps must be non-negative");
  const TransferMatrix tm = build_transfer(m, lambda, eps, Kind::otoc);
  CVector v = otoc_boundary_vector(m, alpha, Side::ket);
  for (int s = 0; s < steps; ++s) v = tm.matrix * v;
  const cplx overlap =
      otoc_boundary_vector(m, 0, Side::bra).transpose() * otoc_boundary_vector(m, 0, Side::ket);
  return cplx(otoc_boundary_vector(m, beta, Side::bra).transpose() * v) / overlap;
}

std::size_t leg_index(const std::vector<int>& bits) {
  std::size_t idx = 0;
  for (int b : bits) idx = 2 * idx + static_cast<std::size_t>(b);
  return idx;
}

}  // namespace brickwork
