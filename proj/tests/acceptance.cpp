// Acceptance suite: one PASS/FAIL line per criterion, with wall time and the
// worst observed defect. Exit status is nonzero if any criterion fails.

#include "brickwork/bethe.hpp"
#include "brickwork/circuit.hpp"
#include "brickwork/cli.hpp"
#include "brickwork/gates.hpp"
#include "brickwork/spectral.hpp"
#include "brickwork/transfer.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace brickwork;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& name, double time_limit_s, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs > time_limit_s) {
    out.pass = false;
    out.detail << " [over time limit " << time_limit_s << " s]";
  }
  if (!out.pass) ++failures;
  std::printf("%s %2d %-28s %8.2f s %s\n", out.pass ? "PASS" : "FAIL", id, name.c_str(), secs, out.detail.str().c_str());
  std::fflush(stdout);
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

std::vector<double> draw_eps(std::mt19937_64& rng, int m) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> e(m);
  for (double& v : e) v = u(rng);
  return e;
}

// Clustered spectrum as a report carrying values and multiplicities only.
JordanReport clustered_report(const CMatrix& a) {
  JordanReport r;
  for (const SpectralCluster& c : cluster_spectrum(a)) r.eigenvalues.push_back({c.value, c.multiplicity, {}, {}, true});
  r.dimension = static_cast<int>(a.rows());
  return r;
}

double min_distance(cplx z, const std::vector<SpectralCluster>& s) {
  double best = INFINITY;
  for (const SpectralCluster& c : s) best = std::min(best, std::abs(c.value - z));
  return best;
}

}  // namespace

int main() {
  criterion(1, "gate identities", 1.0, [](Outcome& o) {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    const CMatrix id = CMatrix::Identity(4, 4);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double l = u(rng), m = u(rng);
      const CMatrix r = r_check(l).matrix;
      worst = std::max({worst, max_abs(r * r.adjoint() - id), max_abs(r * r_check(-l).matrix - id),
                        max_abs(r.adjoint() - r_check(-l).matrix), check_braiding(l, m)});
    }
    o.detail << "worst " << sci(worst);
    o.require(worst <= 1e-12, "residual <= 1e-12");
  });

  criterion(2, "trotter identity", 1.0, [](Outcome& o) {
    double worst = 0.0;
    for (auto [J, dt] : {std::pair{1.0, 0.1}, std::pair{0.7, 0.05}}) {
      CMatrix h = CMatrix::Zero(4, 4);
      for (int a = 1; a <= 3; ++a) h += -J * kron(pauli(a), pauli(a));
      const TrotterGate g = trotter_gate(J, dt);
      worst = std::max(worst, max_abs(g.phase * g.gate.matrix - (cplx(0.0, -dt) * h).exp()));
    }
    o.detail << "worst " << sci(worst);
    o.require(worst <= 1e-12, "residual <= 1e-12");
  });

  criterion(3, "commuting family", 30.0, [](Outcome& o) {
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    double worst = 0.0;
    for (int m = 1; m <= 3; ++m)
      for (bool shared : {false, true})
        for (int p = 0; p < 50; ++p) {
          const std::vector<double> eps = shared ? draw_eps(rng, m) : std::vector<double>{};
          worst = std::max(worst, check_commuting_family(m, {u(rng), u(rng)}, eps));
        }
    o.detail << "worst " << sci(worst) << " over 300 pairs";
    o.require(worst <= 1e-10, "commutator <= 1e-10");
  });

  criterion(4, "oracle equivalence", 300.0, [](Outcome& o) {
    double worst = 0.0;
    int compared = 0;
    for (double l : {0.5, 1.0})
      for (int t = 0; t <= 4; ++t) {
        ChainSpec spec;
        spec.L = 2 * t + 2;
        spec.t = t;
        spec.lambda = l;
        for (int x = -t; x <= t; x += 2) {
          const LightCone lc = light_cone(x, t);
          for (int b = 0; b < 4; ++b) {
            const std::array<cplx, 4> row = correlation_row(spec, x, b);
            for (int a = 0; a < 4; ++a) {
              worst = std::max(worst, std::abs(row[a] - correlation_via_tm(lc.m, lc.steps, a, b, l)));
              ++compared;
            }
          }
        }
      }
    o.detail << "worst " << sci(worst) << " over " << compared << " values";
    o.require(worst <= 1e-10, "agreement <= 1e-10");
  });

  criterion(5, "closed-form spectra", 60.0, [](Outcome& o) {
    double worst = 0.0;
    for (int m = 1; m <= 3; ++m)
      for (double l : {0.5, 1.0, 2.0}) {
        const ReferenceComparison cmp = compare_with_reference(
            clustered_report(build_transfer(m, l).matrix), merge_coincident(reference_spectrum(m, l)), 1e-8, false);
        worst = std::max(worst, cmp.worst_value_error);
        o.require(cmp.ok(), "m = " + std::to_string(m) + ", lambda = " + std::to_string(l));
      }
    o.detail << "worst value error " << sci(worst);
  });

  criterion(6, "jordan structure", 120.0, [](Outcome& o) {
    const JordanReport r2 = jordan_structure(build_transfer(2, 1.0));
    bool three_blocks = false;
    for (const EigenvalueJordanData& e : r2.eigenvalues)
      if (std::abs(e.value - 0.5) < 1e-8) three_blocks = e.blocks == std::vector<int>{3, 3, 3};
    o.require(three_blocks, "m = 2, lambda = 1: three 3x3 blocks at 1/2");
    int checked = 0;
    for (double l : {0.5, 1.0, 2.0})
      for (double tol : {1e-7, 1e-9}) {
        const JordanReport r = jordan_structure(build_transfer(3, l), tol);
        const ReferenceComparison cmp = compare_with_reference(r, merge_coincident(reference_spectrum(3, l)));
        o.require(cmp.ok(), "m = 3 blocks at lambda = " + std::to_string(l) + ", tol " + sci(tol));
        o.require(r.stable, "stability at lambda = " + std::to_string(l) + ", tol " + sci(tol));
        checked += cmp.entries;
      }
    o.detail << checked << " eigenvalue block multisets matched";
  });

  criterion(7, "bethe ansatz", 60.0, [](Outcome& o) {
    const double r = 1.0 / std::sqrt(3.0);
    bool found = false;
    for (const BetheRootSet& rs : solve_bethe(2, 2, {0.0, 0.0}).sets)
      if (rs.kind == RootKind::regular && rs.residual <= 1e-12 && rs.roots.size() == 2 &&
          std::abs(rs.roots[0] - cplx(0, -r)) < 1e-12 && std::abs(rs.roots[1] - cplx(0, r)) < 1e-12)
        found = true;
    o.require(found, "roots +-i/sqrt3 with residual <= 1e-12");

    const std::vector<double> e2{0.41, -0.73};
    double mid = INFINITY;
    for (const BetheRootSet& rs : solve_bethe(2, 1, e2).sets)
      if (rs.kind == RootKind::regular) mid = std::abs(rs.roots[0] - 0.5 * (e2[0] + e2[1]));
    o.require(mid <= 1e-10, "inhomogeneous single root at the midpoint");

    double worst = 0.0;
    int sets = 0;
    const double mu = 0.83;
    for (const std::vector<double>& eps : {std::vector<double>{0.0, 0.0}, std::vector<double>{0.27, -0.58}}) {
      std::vector<std::vector<SpectralCluster>> spectra;
      for (int m = 1; m <= 2; ++m)
        spectra.push_back(cluster_spectrum(build_transfer(m, mu, {eps.begin(), eps.begin() + m}).matrix));
      for (int n = 0; n <= 2; ++n)
        for (int N = 0; N <= n; ++N)
          for (const BetheRootSet& rs : solve_bethe(n, N, {eps.begin(), eps.begin() + n}).sets) {
            const cplx t = bethe_eigenvalue(mu, rs);
            for (int m = std::max(1, n); m <= 2; ++m) worst = std::max(worst, min_distance(t, spectra[m - 1]));
            ++sets;
          }
    }
    o.require(worst <= 1e-8, "eigenvalues in the spectrum to 1e-8");
    o.detail << "midpoint error " << sci(mid) << ", " << sets << " root sets, worst spectral distance " << sci(worst);
  });

  criterion(8, "completeness", 120.0, [](Outcome& o) {
    int cases = 0;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const std::vector<double> eps = sample_epsilons(3, seed);
      for (int m = 1; m <= 3; ++m) {
        const std::vector<double> e(eps.begin(), eps.begin() + m);
        o.require(jordan_structure(build_transfer(m, 0.77, e)).diagonalizable(),
                  "diagonalizable, seed " + std::to_string(seed) + ", m = " + std::to_string(m));
        long long total = 0;
        for (int n = 0; n <= m; ++n) {
          const VacuumOrbit orbit = vacuum_orbit(m, n, e);
          o.require(static_cast<long long>(orbit.states.size()) == binomial(m, n), "orbit size C(m, n)");
          for (const OrbitState& s : orbit.states) {
            std::vector<double> sub;
            for (int k : s.subset) sub.push_back(e[k]);
            total += sector_state_count(n, sub);
          }
        }
        o.require(total == count_states(m).inhomogeneous, "state count 4^m at m = " + std::to_string(m));
        ++cases;
      }
    }
    o.detail << cases << " (seed, m) cases";
  });

  criterion(9, "su(2) symmetry", 60.0, [](Outcome& o) {
    double alg = 0.0, comm = 0.0, qn = 0.0, spin1 = 0.0;
    for (int m = 1; m <= 3; ++m) {
      const Su2Generators g = su2_generators(m);
      alg = std::max(alg, su2_algebra_residual(g));
      const CMatrix tau = build_transfer(m, 0.63).matrix;
      for (const CMatrix* s : {&g.Sx, &g.Sy, &g.Sz}) comm = std::max(comm, commutator_residual(tau, *s));
      for (int n = 0; n <= m; ++n) {
        const CVector v = pseudo_vacuum(m, n);
        qn = std::max({qn, (g.Sz * v + double(n) * v).norm(), (g.S2 * v - double(n * (n + 1)) * v).norm()});
      }
      for (Side side : {Side::ket, Side::bra})
        for (int a = 1; a <= 3; ++a) {
          const CVector b = boundary_vector(m, a, side);
          spin1 = std::max(spin1, (g.S2 * b - 2.0 * b).norm());
        }
    }
    o.require(alg <= 1e-12, "algebra");
    o.require(comm <= 1e-10, "[tau, S]");
    o.require(qn <= 1e-12, "vacuum quantum numbers");
    o.require(spin1 <= 1e-12, "boundary vectors spin 1");
    for (double l : {0.5, 2.0}) {
      JordanReport summed;
      for (const MultipletRow& row : multiplet_table(build_transfer(3, l), su2_generators(3))) {
        auto it = std::find_if(summed.eigenvalues.begin(), summed.eigenvalues.end(),
                               [&](const EigenvalueJordanData& e) { return std::abs(e.value - row.eigenvalue) < 1e-9; });
        if (it == summed.eigenvalues.end()) {
          summed.eigenvalues.push_back({row.eigenvalue, 0, {}, {}, true});
          it = summed.eigenvalues.end() - 1;
        }
        it->multiplicity += row.degeneracy;
      }
      o.require(compare_with_reference(summed, merge_coincident(reference_spectrum(3, l)), 1e-8, false).ok(),
                "multiplet degeneracies at lambda = " + std::to_string(l));
    }
    o.detail << "algebra " << sci(alg) << ", commutators " << sci(comm) << ", quantum numbers " << sci(qn);
  });

  criterion(10, "otoc", 180.0, [](Outcome& o) {
    double comm = 0.0;
    for (int m = 1; m <= 2; ++m) comm = std::max(comm, check_commuting_family(m, {0.3, 1.0, 2.2}, {}, Kind::otoc));
    o.require(comm <= 1e-10, "OTOC transfer matrices commute");
    double worst = 0.0;
    for (int t = 0; t <= 3; ++t)
      for (int x = t; x >= std::max(-t, t - 2); x -= 2) {
        const LightCone lc = light_cone(x, t);
        ChainSpec spec;
        spec.L = 2 * t + 2;
        spec.t = t;
        spec.lambda = 1.0;
        worst = std::max(worst, std::abs(otoc_direct(spec, x, 3, 3) - otoc_via_tm(lc.m, lc.steps, 3, 3, 1.0)));
      }
    o.require(worst <= 1e-9, "direct OTOC equals transfer matrix");
    // The vacuum eigenvalue carries the exponent n + l and not n or l alone.
    const double mu = 0.71;
    const CMatrix tau = build_transfer(1, mu, {}, Kind::otoc).matrix;
    double exp_res = 0.0, alt = INFINITY;
    for (int n = 0; n <= 1; ++n)
      for (int l = 0; l <= 1; ++l) {
        const CVector v = otoc_pseudo_vacuum(1, n, l);
        exp_res = std::max(exp_res, (tau * v - otoc_vacuum_eigenvalue(mu, n, l) * v).norm());
        if (n + l == 2) alt = std::min(alt, (tau * v - otoc_vacuum_eigenvalue(mu, n, 0) * v).norm());
      }
    o.require(exp_res <= 1e-12 && alt > 1e-3, "vacuum exponent n + l");
    o.detail << "commutators " << sci(comm) << ", oracle " << sci(worst) << ", exponent residual " << sci(exp_res);
  });

  criterion(11, "generalized eigenvectors", 60.0, [](Outcome& o) {
    struct Case {
      int m;
      int n;
    };
    for (Case c : {Case{2, 1}, Case{3, 2}}) {
      BetheRootSet vac;
      vac.n = c.n;
      vac.epsilons.assign(c.n, 0.0);
      const RichardsonCheck coarse = richardson_check(c.m, vac, 1e-2, 1.0);
      const RichardsonCheck fine = richardson_check(c.m, vac, 1e-3, 1.0);
      const double decade = coarse.coarse / fine.coarse;
      o.require(fine.coarse <= 1e-5, "residual <= 1e-5 at m = " + std::to_string(c.m));
      o.require(coarse.ratio >= 2.0 && coarse.ratio <= 8.0 && fine.ratio >= 2.0 && fine.ratio <= 8.0,
                "halving ratio in [2, 8] at m = " + std::to_string(c.m));
      o.require(decade >= 100.0 / 4.0 && decade <= 100.0 * 4.0, "decade improvement ~ 100");
      o.detail << "m=" << c.m << ": res(1e-2) " << sci(coarse.coarse) << ", res(1e-3) " << sci(fine.coarse)
               << ", halving ratios " << coarse.ratio << "/" << fine.ratio << "; ";
    }
  });

  criterion(12, "spectrum sweep and nesting", 180.0, [](Outcome& o) {
    RunConfig cfg;
    cfg.command = "spectrum";
    cfg.m = 4;
    const nlohmann::json doc = cmd_spectrum(cfg);
    int bad = 0;
    for (const auto& n : doc["nesting"])
      if (!n["ok"].get<bool>()) ++bad;
    o.require(doc["nesting"].size() == 81u, "81 grid points");
    o.require(bad == 0, std::to_string(bad) + " grid points without nesting");
    o.detail << doc["rows"].size() << " rows, nesting at " << (doc["nesting"].size() - bad) << "/81 points";
  });

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "SOME FAILED", failures);
  return failures == 0 ? 0 : 1;
}
