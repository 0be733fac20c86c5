#include "brickwork/bethe.hpp"

#include "brickwork/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace brickwork {

namespace {

using RootVec = std::vector<cplx>;

// Fixed generic direction used to split homogeneous inhomogeneities.
constexpr double kSplitPattern[] = {0.37, -0.52, 0.15, 0.61, -0.23, 0.44, -0.71, 0.08};

bool is_homogeneous(const std::vector<double>& eps) {
  return std::all_of(eps.begin(), eps.end(), [&](double e) { return std::abs(e - eps.front()) < 1e-14; });
}

void sort_roots(RootVec& r) {
  // Round the real part so that conjugate partners with equal real parts
  // sort by imaginary part regardless of roundoff.
  std::sort(r.begin(), r.end(), [](cplx a, cplx b) {
    const double ra = std::round(a.real() * 1e6), rb = std::round(b.real() * 1e6);
    if (ra != rb) return ra < rb;
    return a.imag() < b.imag();
  });
}

bool same_roots(RootVec a, RootVec b, double tol) {
  if (a.size() != b.size()) return false;
  sort_roots(a);
  sort_roots(b);
  for (std::size_t k = 0; k < a.size(); ++k)
    if (std::abs(a[k] - b[k]) > tol) return false;
  return true;
}

// Polynomial (pre-division) Bethe equations
//   F_j = prod_l (r_j - e_l - i) prod_{k != j} (r_k - r_j - i)
//       - prod_l (r_j - e_l + i) prod_{k != j} (r_k - r_j + i)
// together with their Jacobian, assembled by the product rule.
void poly_system(const RootVec& r, const std::vector<double>& eps, CVector& f, CMatrix& jac) {
  const int N = static_cast<int>(r.size());
  f = CVector::Zero(N);
  jac = CMatrix::Zero(N, N);
  struct Factor {
    cplx value;
    int var_plus;   // variable entering with coefficient +1
    int var_minus;  // variable entering with coefficient -1 (or -1 for none)
  };
  std::vector<Factor> factors;
  for (int j = 0; j < N; ++j)
    for (double sign : {-1.0, 1.0}) {
      factors.clear();
      for (double e : eps) factors.push_back({r[j] - e + sign * kI, j, -1});
      for (int k = 0; k < N; ++k)
        if (k != j) factors.push_back({r[k] - r[j] + sign * kI, k, j});
      const double weight = sign < 0 ? 1.0 : -1.0;
      cplx prod = 1.0;
      for (const Factor& fa : factors) prod *= fa.value;
      f(j) += weight * prod;
      for (std::size_t q = 0; q < factors.size(); ++q) {
        cplx rest = 1.0;
        for (std::size_t p = 0; p < factors.size(); ++p)
          if (p != q) rest *= factors[p].value;
        jac(j, factors[q].var_plus) += weight * rest;
        if (factors[q].var_minus >= 0) jac(j, factors[q].var_minus) -= weight * rest;
      }
    }
}

double poly_norm(const RootVec& r, const std::vector<double>& eps) {
  CVector f;
  CMatrix j;
  poly_system(r, eps, f, j);
  return f.norm();
}

// Damped Newton with backtracking; returns false on breakdown or divergence.
bool newton(RootVec& r, const std::vector<double>& eps, double bound) {
  const int N = static_cast<int>(r.size());
  CVector f;
  CMatrix jac;
  for (int it = 0; it < 100; ++it) {
    poly_system(r, eps, f, jac);
    const double nf = f.norm();
    if (!std::isfinite(nf)) return false;
    if (nf == 0.0) return true;
    const CVector step = jac.fullPivLu().solve(-f);
    if (!step.allFinite()) return false;
    double alpha = 1.0;
    bool improved = false;
    RootVec trial(N);
    while (alpha > 1e-4) {
      for (int k = 0; k < N; ++k) trial[k] = r[k] + alpha * step(k);
      if (poly_norm(trial, eps) < nf) {
        improved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!improved) return true;  // stagnated at the attainable accuracy
    double scale = 1.0;
    for (cplx z : trial) scale = std::max(scale, std::abs(z));
    r = trial;
    if (scale > bound) return false;
    if (alpha * step.norm() < 1e-15 * scale) return true;
  }
  return true;
}

// Distance of the configuration from the poles of the Bethe equations.
double pole_distance(const RootVec& r, const std::vector<double>& eps) {
  double d = INFINITY;
  for (std::size_t j = 0; j < r.size(); ++j) {
    for (double e : eps) d = std::min({d, std::abs(r[j] - e - kI), std::abs(r[j] - e + kI)});
    for (std::size_t k = 0; k < r.size(); ++k)
      if (k != j) d = std::min(d, std::abs(r[j] - r[k] - kI));
  }
  return d;
}

double min_gap(const RootVec& r) {
  double g = INFINITY;
  for (std::size_t j = 0; j < r.size(); ++j)
    for (std::size_t k = j + 1; k < r.size(); ++k) g = std::min(g, std::abs(r[j] - r[k]));
  return g;
}

double max_residual(const RootVec& r, int n, const std::vector<double>& eps) {
  const std::vector<double> d = bethe_residual(r, n, eps);
  double worst = 0.0;
  for (double v : d) worst = std::max(worst, std::isfinite(v) ? v : INFINITY);
  return worst;
}

// Relative Baxter remainder accepted for sets found through the Baxter form.
constexpr double kBaxterAccept = 1e-13;

// Polynomials as coefficient vectors, lowest degree first, in extended
// precision: near-exact strings amplify coefficient errors in the roots.
using lcplx = std::complex<long double>;
using Poly = std::vector<lcplx>;
using LMatrix = Eigen::Matrix<lcplx, Eigen::Dynamic, Eigen::Dynamic>;
using LVector = Eigen::Matrix<lcplx, Eigen::Dynamic, 1>;
const lcplx kIL(0.0L, 1.0L);

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly c(a.size() + b.size() - 1, 0.0L);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

Poly poly_from_roots(const std::vector<lcplx>& roots) {
  Poly p{1.0L};
  for (lcplx z : roots) p = poly_mul(p, {-z, 1.0L});
  return p;
}

// Coefficients of u -> (u + s)^k.
Poly shifted_power(int k, lcplx s) {
  Poly p{1.0L};
  for (int i = 0; i < k; ++i) p = poly_mul(p, {s, 1.0L});
  return p;
}

// Baxter form of the Bethe equations. With Q(u) = prod_k (u - r_k) and
// phi(u) = prod_l (u - e_l), the roots solve the equations iff
//   P(u) = phi(u + i) Q(u - i) + phi(u - i) Q(u + i)
// is divisible by Q. P is linear in the coefficients of Q: with
// T_k(u) = phi(u + i) (u - i)^k + phi(u - i) (u + i)^k, P = sum_k q_k T_k.
std::vector<Poly> baxter_basis(const std::vector<double>& eps, int N) {
  const int n = static_cast<int>(eps.size());
  const Poly phi = poly_from_roots(std::vector<lcplx>(eps.begin(), eps.end()));
  Poly phi_plus(n + 1, 0.0L), phi_minus(n + 1, 0.0L);
  for (int k = 0; k <= n; ++k) {
    const Poly up = shifted_power(k, kIL), down = shifted_power(k, -kIL);
    for (int j = 0; j <= k; ++j) {
      phi_plus[j] += phi[k] * up[j];
      phi_minus[j] += phi[k] * down[j];
    }
  }
  std::vector<Poly> basis(N + 1);
  for (int k = 0; k <= N; ++k) {
    Poly t = poly_mul(phi_plus, shifted_power(k, -kIL));
    const Poly t2 = poly_mul(phi_minus, shifted_power(k, kIL));
    for (std::size_t j = 0; j < t2.size(); ++j) t[j] += t2[j];
    t.resize(n + N + 1, 0.0L);
    basis[k] = t;
  }
  return basis;
}

// Remainder of P modulo Q relative to the size of P. Unlike the ratio form,
// it stays well conditioned when two roots sit close to a pole separation.
double baxter_residual(const RootVec& r, const std::vector<double>& eps) {
  const int N = static_cast<int>(r.size());
  const int n = static_cast<int>(eps.size());
  const std::vector<Poly> basis = baxter_basis(eps, N);
  const Poly q = poly_from_roots(std::vector<lcplx>(r.begin(), r.end()));
  Poly rem(n + N + 1, 0.0L);
  for (int k = 0; k <= N; ++k)
    for (int j = 0; j <= n + N; ++j) rem[j] += q[k] * basis[k][j];
  long double size = 0.0L;
  for (const lcplx& c : rem) size = std::max(size, std::abs(c));
  for (int j = n; j >= 0; --j) {
    const lcplx c = rem[j + N];
    for (int k = 0; k <= N; ++k) rem[j + k] -= c * q[k];
  }
  long double worst = 0.0L;
  for (int j = 0; j < N; ++j) worst = std::max(worst, std::abs(rem[j]));
  return static_cast<double>(worst / size);
}

// Newton on the Baxter form. Unknowns are the non-leading coefficients of Q
// and the quotient R; the system P - Q R = 0 is bilinear. Near-exact strings,
// whose root-space Newton system is nearly singular, are reached from here.
bool tq_refine(RootVec& r, const std::vector<double>& eps) {
  const int N = static_cast<int>(r.size());
  const int n = static_cast<int>(eps.size());
  const int deg = n + N;
  const std::vector<Poly> basis = baxter_basis(eps, N);
  const Poly q0 = poly_from_roots(std::vector<lcplx>(r.begin(), r.end()));
  LVector x(N + n + 1);
  for (int k = 0; k < N; ++k) x(k) = q0[k];
  // Quotient seed by long division of P by the monic Q.
  {
    Poly rem = basis[N];
    for (int k = 0; k < N; ++k)
      for (int j = 0; j <= deg; ++j) rem[j] += q0[k] * basis[k][j];
    for (int j = n; j >= 0; --j) {
      const lcplx c = rem[j + N];
      x(N + j) = c;
      for (int k = 0; k <= N; ++k) rem[j + k] -= c * q0[k];
    }
  }
  auto system = [&](const LVector& v, LVector& f, LMatrix& jac) {
    Poly q(N + 1, 1.0L), quot(n + 1);
    for (int k = 0; k < N; ++k) q[k] = v(k);
    for (int j = 0; j <= n; ++j) quot[j] = v(N + j);
    f = LVector::Zero(deg + 1);
    jac = LMatrix::Zero(deg + 1, N + n + 1);
    for (int j = 0; j <= deg; ++j) f(j) = basis[N][j];
    for (int k = 0; k < N; ++k)
      for (int j = 0; j <= deg; ++j) {
        f(j) += q[k] * basis[k][j];
        jac(j, k) += basis[k][j];
      }
    const Poly qr = poly_mul(q, quot);
    for (int j = 0; j <= deg; ++j) f(j) -= qr[j];
    for (int k = 0; k < N; ++k)
      for (int j = 0; j <= n; ++j) jac(k + j, k) -= quot[j];
    for (int j = 0; j <= n; ++j)
      for (int k = 0; k <= N; ++k) jac(k + j, N + j) -= q[k];
  };
  LVector f;
  LMatrix jac;
  for (int it = 0; it < 60; ++it) {
    system(x, f, jac);
    if (!f.allFinite()) return false;
    const LVector step = jac.fullPivLu().solve(-f);
    if (!step.allFinite()) return false;
    x += step;
    if (step.norm() < 1e-18L * std::max(1.0L, x.norm())) break;
  }
  system(x, f, jac);
  if (!(f.norm() < 1e-10L * std::max(1.0L, x.norm()))) return false;
  // Roots of Q from its companion matrix, polished on Q itself.
  LMatrix companion = LMatrix::Zero(N, N);
  for (int k = 0; k < N; ++k) companion(k, N - 1) = -x(k);
  for (int k = 1; k < N; ++k) companion(k, k - 1) = 1.0L;
  const Eigen::ComplexEigenSolver<LMatrix> es(companion, false);
  for (int j = 0; j < N; ++j) {
    lcplx z = es.eigenvalues()(j);
    for (int it = 0; it < 3; ++it) {
      lcplx p = 1.0L, dp = 0.0L;
      for (int k = N - 1; k >= 0; --k) {
        dp = dp * z + p;
        p = p * z + x(k);
      }
      if (std::abs(dp) == 0.0L) break;
      z -= p / dp;
    }
    r[j] = cplx(static_cast<double>(z.real()), static_cast<double>(z.imag()));
  }
  return true;
}

std::vector<RootVec> pattern_seeds(int N, const std::vector<double>& eps, std::mt19937_64& rng) {
  std::vector<RootVec> seeds;
  if (N == 0) return seeds;
  double center = 0.0;
  for (double e : eps) center += e;
  if (!eps.empty()) center /= static_cast<double>(eps.size());
  std::normal_distribution<double> jitter(0.0, 0.05);
  // Number of 2-strings c +- i/2 in the pattern; the rest are real roots.
  for (int strings = 0; 2 * strings <= N; ++strings)
    for (double spread : {0.3, 0.8, 1.6}) {
      RootVec s;
      const int centers = N - strings;
      int placed = 0;
      for (int c = 0; c < centers; ++c) {
        const double x = center + spread * (c - 0.5 * (centers - 1)) + jitter(rng);
        if (placed < strings) {
          s.push_back(cplx(x, 0.5 + jitter(rng)));
          s.push_back(cplx(x, -0.5 + jitter(rng)));
          ++placed;
        } else {
          s.push_back(cplx(x, jitter(rng)));
        }
      }
      seeds.push_back(s);
    }
  return seeds;
}

void add_unique(std::vector<BetheRootSet>& sets, BetheRootSet rs) {
  for (const BetheRootSet& s : sets)
    if (same_roots(s.roots, rs.roots, 1e-6)) return;
  sets.push_back(std::move(rs));
}

SolveReport solve_regular(int n, int N, const std::vector<double>& eps,
                          const std::vector<std::vector<cplx>>& user_seeds, const SolveOptions& opt) {
  SolveReport rep;
  if (N == 0) {
    rep.sets.push_back({n, {}, eps, 0.0, RootKind::regular, {}});
    return rep;
  }
  std::mt19937_64 rng(opt.seed + 1000003ULL * static_cast<std::uint64_t>(n) + 7919ULL * static_cast<std::uint64_t>(N));
  std::vector<RootVec> seeds = user_seeds;
  for (const RootVec& s : pattern_seeds(N, eps, rng)) seeds.push_back(s);
  double center = 0.0;
  for (double e : eps) center += e;
  if (!eps.empty()) center /= static_cast<double>(eps.size());
  std::normal_distribution<double> re(0.0, 1.5), im(0.0, 0.7);
  for (int t = 0; t < opt.random_trials; ++t) {
    RootVec s(N);
    for (cplx& z : s) z = cplx(center + re(rng), im(rng));
    seeds.push_back(s);
  }

  enum class Verdict { accepted, divergent, coincident, singular, unconverged };
  // Sets from the Baxter fallback are accepted on the Baxter residual; their
  // ratio-form residual is still reported.
  auto judge = [&](RootVec& r, double& res, bool baxter) {
    double scale = 0.0;
    for (cplx z : r) scale = std::max(scale, std::abs(z));
    if (!(scale <= opt.divergence_bound)) return Verdict::divergent;
    if (min_gap(r) < opt.min_root_gap) return Verdict::coincident;
    // Pole configurations satisfy the polynomial form trivially.
    if (pole_distance(r, eps) < 1e-6) return Verdict::singular;
    try {
      res = max_residual(r, n, eps);
    } catch (const SingularConfiguration&) {
      return Verdict::singular;
    }
    if (baxter) return baxter_residual(r, eps) <= kBaxterAccept ? Verdict::accepted : Verdict::unconverged;
    return res <= opt.accept_residual ? Verdict::accepted : Verdict::unconverged;
  };

  for (const RootVec& seed : seeds) {
    if (static_cast<int>(seed.size()) != N) throw std::invalid_argument("solve_bethe: seed has wrong root count");
    ++rep.attempts;
    RootVec r = seed;
    double res = INFINITY;
    Verdict v = newton(r, eps, opt.divergence_bound) ? judge(r, res, false) : Verdict::divergent;
    if (v != Verdict::accepted) {
      // Fall back to the Baxter form, which copes with near-exact strings.
      RootVec t = seed;
      double tres = INFINITY;
      if (tq_refine(t, eps)) {
        const Verdict tv = judge(t, tres, true);
        if (tv == Verdict::accepted || v == Verdict::unconverged) {
          r = t;
          res = tres;
          v = tv;
        }
      }
    }
    switch (v) {
      case Verdict::divergent:
        ++rep.rejected_divergent;
        continue;
      case Verdict::coincident:
        ++rep.rejected_coincident;
        continue;
      case Verdict::singular:
        ++rep.rejected_singular;
        continue;
      case Verdict::unconverged:
        continue;
      case Verdict::accepted:
        break;
    }
    ++rep.converged;
    sort_roots(r);
    add_unique(rep.sets, {n, r, eps, res, RootKind::regular, {}});
  }
  return rep;
}

}  // namespace

std::string to_string(RootKind kind) {
  switch (kind) {
    case RootKind::regular:
      return "regular";
    case RootKind::zero_root:
      return "zero_root";
    case RootKind::singular_limit:
      return "singular_limit";
  }
  return "unknown";
}

std::vector<double> bethe_residual(const std::vector<cplx>& roots, int n, const std::vector<double>& eps) {
  if (static_cast<int>(eps.size()) != n) throw std::invalid_argument("bethe_residual: need n inhomogeneities");
  const std::size_t N = roots.size();
  for (std::size_t j = 0; j < N; ++j) {
    for (double e : eps)
      if (std::abs(roots[j] - e - kI) < 1e-12 || std::abs(roots[j] - e + kI) < 1e-12)
        throw SingularConfiguration("bethe_residual: root on the pole eps +- i");
    for (std::size_t k = 0; k < N; ++k)
      if (k != j && (std::abs(roots[j] - roots[k] - kI) < 1e-12 || std::abs(roots[j] - roots[k] + kI) < 1e-12))
        throw SingularConfiguration("bethe_residual: roots separated by +- i");
  }
  std::vector<double> out(N);
  for (std::size_t j = 0; j < N; ++j) {
    cplx lhs = 1.0, rhs = 1.0;
    for (double e : eps) lhs *= (roots[j] - e - kI) / (roots[j] - e + kI);
    for (std::size_t k = 0; k < N; ++k)
      if (k != j) rhs *= (roots[k] - roots[j] + kI) / (roots[k] - roots[j] - kI);
    out[j] = std::abs(lhs - rhs);
  }
  return out;
}

BetheRootSet refine_roots(const std::vector<cplx>& guess, const std::vector<double>& eps, double tol) {
  RootVec r = guess;
  const int n = static_cast<int>(eps.size());
  if (!newton(r, eps, 1e6)) throw ContinuationError("refine_roots: Newton iteration broke down");
  double res = INFINITY;
  try {
    res = max_residual(r, n, eps);
  } catch (const SingularConfiguration& e) {
    throw ContinuationError(std::string("refine_roots: ") + e.what());
  }
  if (!(res <= tol)) throw ContinuationError("refine_roots: residual " + std::to_string(res) + " above tolerance");
  sort_roots(r);
  return {n, r, eps, res, RootKind::regular, {}};
}

BetheRootSet continue_roots(const std::vector<cplx>& roots, const std::vector<double>& from,
                            const std::vector<double>& to, int steps) {
  if (from.size() != to.size()) throw std::invalid_argument("continue_roots: inhomogeneity lists differ in length");
  RootVec r = roots;
  std::vector<double> eps(from.size());
  for (int s = 1; s <= steps; ++s) {
    const double w = static_cast<double>(s) / steps;
    for (std::size_t l = 0; l < eps.size(); ++l) eps[l] = (1.0 - w) * from[l] + w * to[l];
    if (!newton(r, eps, 1e6)) throw ContinuationError("continue_roots: lost the solution at stage " + std::to_string(s));
  }
  return refine_roots(r, to);
}

SolveReport solve_bethe(int n, int N, const std::vector<double>& eps_in,
                        const std::vector<std::vector<cplx>>& seeds, const SolveOptions& opt) {
  if (n < 0 || N < 0) throw std::invalid_argument("solve_bethe: n and N must be non-negative");
  if (N > 2 * n) throw std::invalid_argument("solve_bethe: N may not exceed 2n");
  const std::vector<double> eps = eps_in.empty() ? std::vector<double>(n, 0.0) : eps_in;
  if (static_cast<int>(eps.size()) != n) throw std::invalid_argument("solve_bethe: need n inhomogeneities");

  std::ostringstream diag;
  if (N > n) {
    // Beyond the equator there are no highest-weight solutions; those states
    // are SU(2) descendants (divergent rapidities) reached with the ladder
    // operators instead.
    SolveReport rep;
    rep.diagnostics = "N > n: no highest-weight Bethe states beyond the equator; use the spin ladder";
    return rep;
  }
  SolveReport rep = solve_regular(n, N, eps, seeds, opt);

  // Homogeneous limits of inhomogeneous solutions: regular ones missed by the
  // seeds are refined at eps; those ending on the poles are kept separately.
  if (opt.homogeneous_limits && N >= 2 && n >= 1 && is_homogeneous(eps)) {
    std::vector<double> direction(n);
    for (int l = 0; l < n; ++l) direction[l] = kSplitPattern[l % 8];
    auto split = [&](double s) {
      std::vector<double> e(n);
      for (int l = 0; l < n; ++l) e[l] = eps[l] + s * direction[l];
      return e;
    };
    SolveOptions sub = opt;
    sub.homogeneous_limits = false;
    sub.include_zero_roots = false;
    const SolveReport split_rep = solve_regular(n, N, split(1.0), {}, sub);
    constexpr int kStages = 60;
    constexpr double kFinal = 1e-7;
    for (const BetheRootSet& start : split_rep.sets) {
      RootVec r = start.roots;
      bool ok = true;
      // Largest ratio-form residual over the stages that stay clear of the poles.
      double path_residual = start.residual;
      for (int s = 1; s <= kStages && ok; ++s) {
        const std::vector<double> e_stage = split(std::pow(kFinal, static_cast<double>(s) / kStages));
        ok = newton(r, e_stage, opt.divergence_bound);
        if (ok && pole_distance(r, e_stage) > 1e-6) {
          try {
            path_residual = std::max(path_residual, max_residual(r, n, e_stage));
          } catch (const SingularConfiguration&) {
          }
        }
      }
      if (!ok) {
        diag << "continuation of a split solution diverged; ";
        continue;
      }
      bool duplicate = false;
      for (const BetheRootSet& s : rep.sets) duplicate = duplicate || same_roots(s.roots, r, 1e-4);
      if (duplicate) continue;
      if (pole_distance(r, eps) < 1e-3) {
        sort_roots(r);
        rep.sets.push_back({n, r, eps, path_residual, RootKind::singular_limit, {}});
      } else {
        try {
          BetheRootSet refined = refine_roots(r, eps, opt.accept_residual);
          if (min_gap(refined.roots) >= opt.min_root_gap) add_unique(rep.sets, refined);
        } catch (const ContinuationError&) {
          diag << "split solution did not refine at the homogeneous point; ";
        }
      }
    }
  }

  // Zero rapidities: a root pinned at eps_l on top of a solution of the
  // chain with site l removed.
  if (opt.include_zero_roots && N >= 1 && n >= 1) {
    SolveOptions sub = opt;
    sub.include_zero_roots = false;
    for (int l = 0; l < n; ++l) {
      std::vector<double> reduced = eps;
      reduced.erase(reduced.begin() + l);
      if (N - 1 > 2 * (n - 1)) continue;
      const SolveReport red = solve_bethe(n - 1, N - 1, reduced, {}, sub);
      for (const BetheRootSet& s : red.sets) {
        if (s.kind != RootKind::regular) continue;
        RootVec r = s.roots;
        r.push_back(cplx(eps[l], 0.0));
        if (min_gap(r) < opt.min_root_gap) continue;
        sort_roots(r);
        add_unique(rep.sets, {n, r, eps, s.residual, RootKind::zero_root, {l}});
      }
    }
  }

  std::stable_sort(rep.sets.begin(), rep.sets.end(), [](const BetheRootSet& a, const BetheRootSet& b) {
    return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  });
  diag << rep.attempts << " Newton runs, " << rep.converged << " converged, " << rep.rejected_singular
       << " on poles, " << rep.rejected_divergent << " divergent, " << rep.rejected_coincident << " coincident";
  rep.diagnostics = diag.str();
  return rep;
}

cplx bethe_eigenvalue(double mu, const BetheRootSet& rs) {
  cplx a = 1.0, d = 1.0;
  std::vector<bool> cancelled(rs.roots.size(), false);
  for (int l = 0; l < rs.n; ++l) {
    if (std::find(rs.zero_sites.begin(), rs.zero_sites.end(), l) != rs.zero_sites.end()) {
      // The site factor cancels against the root pinned at eps_l.
      for (std::size_t k = 0; k < rs.roots.size(); ++k)
        if (!cancelled[k] && std::abs(rs.roots[k] - rs.epsilons[l]) < 1e-12) {
          cancelled[k] = true;
          break;
        }
      continue;
    }
    const cplx x = mu - rs.epsilons[l];
    a *= kI * x / (1.0 + kI * x);
    d *= -kI * x / (1.0 - kI * x);
  }
  for (std::size_t k = 0; k < rs.roots.size(); ++k) {
    if (cancelled[k]) continue;
    const cplx gap = rs.roots[k] - mu;
    if (std::abs(gap) < 1e-14) throw std::domain_error("bethe_eigenvalue: spectral parameter on a rapidity");
    a *= 1.0 + kI / gap;
    d *= 1.0 - kI / gap;
  }
  return 0.5 * (a + d);
}

cplx otoc_vacuum_eigenvalue(double mu, int n, int l) {
  const cplx a = kI * mu / (1.0 + kI * mu);
  const cplx d = -kI * mu / (1.0 - kI * mu);
  return 0.5 * (std::pow(a, n + l) + std::pow(d, n + l));
}

CVector bethe_vector(int m, int n, const std::vector<cplx>& roots, const std::vector<double>& eps) {
  CVector v = pseudo_vacuum(m, n);
  for (cplx root : roots) v = build_monodromy(m, root, eps).B * v;
  return v;
}

BetheState bethe_state(const BetheStateSpec& spec, double mu) {
  const int m = spec.m;
  const std::vector<double> eps = spec.epsilons.empty() ? std::vector<double>(m, 0.0) : spec.epsilons;
  if (spec.n < 0 || spec.n > m) throw std::invalid_argument("bethe_state: need 0 <= n <= m");
  const std::vector<double> eps_frame = spec.perm.empty() ? eps : permute(eps, spec.perm);
  CVector v = bethe_vector(m, spec.n, spec.roots.roots, eps_frame);
  if (!spec.perm.empty()) v = permutation_unitary(m, spec.perm, eps).adjoint() * v;
  const double norm = v.norm();
  if (!(norm > 1e-12)) throw NullState("bethe_state: B operators annihilate the reference state");
  v /= norm;
  BetheState out;
  out.vector = v;
  out.eigenvalue = bethe_eigenvalue(mu, spec.roots);
  const TransferMatrix tm = build_transfer(m, mu, eps);
  out.residual = (tm.matrix * v - out.eigenvalue * v).norm();
  return out;
}

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long b = 1;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

StateCount count_states(int m) {
  if (m < 1) throw std::invalid_argument("count_states: m must be at least 1");
  StateCount c;
  auto pow3 = [](int k) {
    long long p = 1;
    for (int i = 0; i < k; ++i) p *= 3;
    return p;
  };
  for (int n = 0; n <= m; ++n) {
    c.homogeneous += pow3(n);
    c.inhomogeneous += binomial(m, n) * pow3(n);
    for (int l = 0; l <= m; ++l) c.otoc += binomial(m, n) * binomial(m, l) * pow3(n + l);
  }
  return c;
}

long long sector_state_count(int n, const std::vector<double>& eps, const SolveOptions& opt) {
  SolveOptions o = opt;
  o.include_zero_roots = false;
  long long total = 0;
  for (int N = 0; N <= n; ++N) {
    const SolveReport rep = solve_bethe(n, N, eps, {}, o);
    for (const BetheRootSet& s : rep.sets)
      if (s.kind == RootKind::regular) total += 2 * (n - N) + 1;
  }
  return total;
}

}  // namespace brickwork
