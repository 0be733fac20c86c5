#include "brickwork/cli.hpp"

#include "brickwork/bethe.hpp"
#include "brickwork/circuit.hpp"
#include "brickwork/gates.hpp"
#include "brickwork/spectral.hpp"

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

namespace brickwork {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Platform-independent uniform draw on [0, 1).
double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform_draw(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit_draw(rng); }

json complex_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

std::string kind_name(Kind k) { return k == Kind::correlation ? "correlation" : "otoc"; }

json config_json(const RunConfig& cfg) {
  json j;
  j["command"] = cfg.command;
  j["m"] = cfg.m;
  j["lambda"] = {{"start", cfg.lambda_start}, {"stop", cfg.lambda_stop}, {"count", cfg.lambda_count}};
  j["eps"] = cfg.eps;
  j["eps_seed"] = cfg.eps_seed ? json(*cfg.eps_seed) : json(nullptr);
  j["kind"] = kind_name(cfg.kind);
  j["tol"] = cfg.tol;
  j["format"] = cfg.format;
  j["seed"] = cfg.seed;
  if (cfg.command == "correlate") {
    json pts = json::array();
    for (const auto& [x, t] : cfg.points) pts.push_back({{"x", x}, {"t", t}});
    j["points"] = pts;
    j["alpha"] = cfg.alpha;
    j["beta"] = cfg.beta;
  }
  if (cfg.command == "bethe") {
    j["n"] = cfg.n;
    j["N"] = cfg.N;
  }
  if (cfg.command == "verify") j["inject_wrong_normalization"] = cfg.inject_wrong_normalization;
  return j;
}

json provenance(const RunConfig& cfg, Clock::time_point start) {
  return json{{"artifact_version", kArtifactVersion}, {"seed", cfg.seed}, {"wall_time_s", seconds_since(start)}};
}

void validate(const RunConfig& cfg) {
  if (cfg.lambda_count < 1) throw std::invalid_argument("lambda count must be at least 1");
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (cfg.m < 1) throw std::invalid_argument("m must be at least 1");
  if (cfg.format != "json" && cfg.format != "csv") throw std::invalid_argument("format must be json or csv");
}

// ---------------------------------------------------------------- verify --

struct Check {
  std::string name;
  double residual = 0.0;
  double threshold = 0.0;
  bool expect_fail = false;  // negative control: passes when the defect is observed
  std::string metric = "max_abs";
  std::string detail;

  bool passed() const { return expect_fail ? residual > threshold : residual <= threshold; }
};

json check_json(const Check& c) {
  json j{{"name", c.name},         {"residual", c.residual}, {"threshold", c.threshold},
         {"metric", c.metric},     {"passed", c.passed()},   {"expected", c.expect_fail ? "fail" : "pass"}};
  j["status"] = c.expect_fail ? (c.passed() ? "expected_fail" : "unexpected_pass") : (c.passed() ? "pass" : "fail");
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

CMatrix exp_minus_i_dt_h(double J, double dt) {
  const CMatrix xx = kron(pauli(1), pauli(1)), yy = kron(pauli(2), pauli(2)), zz = kron(pauli(3), pauli(3));
  const CMatrix h = -J * (xx + yy + zz);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  const Eigen::VectorXcd phases = (-kI * dt * es.eigenvalues().cast<cplx>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

double min_distance(cplx z, const std::vector<SpectralCluster>& spectrum) {
  double best = INFINITY;
  for (const SpectralCluster& c : spectrum) best = std::min(best, std::abs(c.value - z));
  return best;
}

std::vector<Check> verify_checks(const RunConfig& cfg) {
  std::vector<Check> out;
  std::mt19937_64 rng(cfg.seed);
  auto run_check = [&](const std::string& name, double threshold, bool expect_fail, const std::string& metric,
                       const std::function<double(std::string&)>& body) {
    Check c;
    c.name = name;
    c.threshold = threshold;
    c.expect_fail = expect_fail;
    c.metric = metric;
    try {
      c.residual = body(c.detail);
    } catch (const std::exception& e) {
      c.residual = INFINITY;
      c.detail = std::string("exception: ") + e.what();
    }
    if (std::isnan(c.residual)) c.residual = INFINITY;
    out.push_back(c);
  };
  auto random_eps = [&](int count) {
    std::vector<double> e(count);
    for (double& v : e) v = uniform_draw(rng, -1.0, 1.0);
    return e;
  };

  run_check("gate_unitarity", 1e-12, false, "max_abs", [&](std::string&) {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double l = uniform_draw(rng, -5.0, 5.0);
      const CMatrix r = r_check(l).matrix;
      worst = std::max(worst, max_abs(r * r.adjoint() - CMatrix::Identity(4, 4)));
      worst = std::max(worst, max_abs(r * r_check(-l).matrix - CMatrix::Identity(4, 4)));
      worst = std::max(worst, max_abs(r.adjoint() - r_check(-l).matrix));
    }
    return worst;
  });
  run_check("braiding", 1e-12, false, "max_abs", [&](std::string&) {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) worst = std::max(worst, check_braiding(uniform_draw(rng, -3, 3), uniform_draw(rng, -3, 3)));
    return worst;
  });
  run_check("trotter", 1e-12, false, "max_abs", [&](std::string&) {
    double worst = 0.0;
    for (auto [J, dt] : {std::pair{1.0, 0.1}, std::pair{0.7, 0.05}}) {
      const TrotterGate g = trotter_gate(J, dt);
      worst = std::max(worst, max_abs(g.phase * g.gate.matrix - exp_minus_i_dt_h(J, dt)));
    }
    return worst;
  });
  run_check("spin1_lax", 1e-12, false, "max_abs", [&](std::string&) {
    double worst = 0.0;
    for (double l : {0.0, 0.3, 1.0, 2.5}) worst = std::max(worst, check_spin1_lax(l));
    return worst;
  });
  run_check("rtt", 1e-12, false, "max_abs", [&](std::string&) {
    double worst = 0.0;
    for (int m = 1; m <= 2; ++m)
      for (int i = 0; i < 3; ++i)
        worst = std::max(worst, rtt_residual(m, uniform_draw(rng, -2, 2), uniform_draw(rng, -2, 2), random_eps(m)));
    return worst;
  });
  run_check("commutation", 1e-10, false, "max_abs", [&](std::string&) {
    double worst = 0.0;
    for (int m = 1; m <= 3; ++m) {
      const std::vector<double> lambdas{uniform_draw(rng, 0, 4), uniform_draw(rng, 0, 4), uniform_draw(rng, 0, 4)};
      worst = std::max(worst, check_commuting_family(m, lambdas));
      worst = std::max(worst, check_commuting_family(m, lambdas, random_eps(m)));
    }
    return worst;
  });
  run_check("commutation_mismatched_eps", 1e-6, true, "max_abs", [&](std::string& detail) {
    detail = "tau(lambda | eps) and tau(mu | eps') with eps != eps' need not commute";
    const TransferMatrix a = build_transfer(2, 0.8, {0.3, -0.4});
    const TransferMatrix b = build_transfer(2, 1.7, {-0.6, 0.5});
    return commutator_residual(a.matrix, b.matrix);
  });
  run_check("permutation_covariance", 1e-12, false, "max_abs", [&](std::string&) {
    const std::vector<double> eps = random_eps(3);
    const std::vector<int> perm{2, 0, 1};
    const CMatrix w = permutation_unitary(3, perm, eps);
    const double l = uniform_draw(rng, 0, 3);
    return max_abs(build_transfer(3, l, eps).matrix - w.adjoint() * build_transfer(3, l, permute(eps, perm)).matrix * w);
  });
  run_check("b_operators_commute", 1e-12, false, "max_abs", [&](std::string&) {
    const std::vector<double> eps = random_eps(2);
    const CMatrix b1 = build_monodromy(2, cplx(0.4, 0.3), eps).B;
    const CMatrix b2 = build_monodromy(2, cplx(-1.1, 0.6), eps).B;
    return commutator_residual(b1, b2);
  });
  run_check("intertwiner", 1e-12, false, "max_abs", [&](std::string&) {
    double worst = 0.0;
    for (int m = 1; m <= 3; ++m) worst = std::max(worst, intertwiner_residual(m, 0.9));
    return worst;
  });
  run_check("nesting", 1e-8, false, "max_abs", [&](std::string& detail) {
    double worst = 0.0;
    for (double l : {0.5, 1.0, 2.0}) {
      const NestingReport rep = nesting_check(3, l, 1e-8);
      for (const NestingLevel& lvl : rep.levels) worst = std::max(worst, lvl.worst_distance);
      if (!rep.ok) detail = "unmatched eigenvalue at lambda = " + std::to_string(l);
    }
    return worst;
  });
  run_check("correlation_oracle", 1e-10, false, "max_abs", [&](std::string&) {
    double worst = 0.0;
    const double l = 0.7;
    for (int t = 0; t <= 3; ++t) {
      ChainSpec spec;
      spec.L = 2 * t + 2;
      spec.t = t;
      spec.lambda = l;
      for (int x = -t; x <= t; x += 2) {
        const LightCone lc = light_cone(x, t);
        for (int beta = 0; beta < 4; ++beta) {
          const std::array<cplx, 4> row = correlation_row(spec, x, beta);
          for (int alpha = 0; alpha < 4; ++alpha)
            worst = std::max(worst, std::abs(row[alpha] - correlation_via_tm(lc.m, lc.steps, alpha, beta, l)));
        }
      }
    }
    return worst;
  });
  run_check("bethe_eigenvalue", 1e-8, false, "max_abs", [&](std::string& detail) {
    // Every highest-weight root set of an n-site chain must reproduce an
    // eigenvalue of tau_m for m >= n, homogeneous and inhomogeneous.
    const double mu = 0.7;
    double worst = 0.0;
    int sets = 0;
    for (bool homogeneous : {true, false}) {
      const std::vector<double> eps_full = homogeneous ? std::vector<double>(2, 0.0) : std::vector<double>{0.35, -0.45};
      std::vector<std::vector<SpectralCluster>> spectra;
      for (int m = 1; m <= 2; ++m)
        spectra.push_back(cluster_spectrum(build_transfer(m, mu, {eps_full.begin(), eps_full.begin() + m}).matrix));
      for (int n = 0; n <= 2; ++n) {
        const std::vector<double> eps(eps_full.begin(), eps_full.begin() + n);
        for (int N = 0; N <= n; ++N) {
          SolveOptions opt;
          opt.seed = cfg.seed;
          opt.random_trials = 100;
          for (const BetheRootSet& rs : solve_bethe(n, N, eps, {}, opt).sets) {
            cplx t = bethe_eigenvalue(mu, rs);
            if (cfg.inject_wrong_normalization) t *= 2.0;
            for (int m = std::max(n, 1); m <= 2; ++m) worst = std::max(worst, min_distance(t, spectra[m - 1]));
            ++sets;
          }
        }
      }
    }
    detail = std::to_string(sets) + " root sets";
    return worst;
  });
  run_check("jordan_table", 0.0, false, "mismatch_count", [&](std::string& detail) {
    int mismatches = 0;
    for (double l : {0.5, 1.0, 2.0}) {
      const JordanReport rep = jordan_structure(build_transfer(3, l), 1e-8);
      const ReferenceComparison cmp = compare_with_reference(rep, merge_coincident(reference_spectrum(3, l)));
      mismatches += cmp.missing + cmp.wrong_degeneracy + cmp.wrong_blocks + cmp.extra + (rep.stable ? 0 : 1);
    }
    const JordanReport rep2 = jordan_structure(build_transfer(2, 1.0), 1e-8);
    const ReferenceComparison cmp2 = compare_with_reference(rep2, merge_coincident(reference_spectrum(2, 1.0)));
    mismatches += cmp2.missing + cmp2.wrong_degeneracy + cmp2.wrong_blocks + cmp2.extra;
    detail = "m = 3 at lambda in {0.5, 1, 2} and m = 2 at lambda = 1";
    return static_cast<double>(mismatches);
  });
  run_check("su2_algebra", 1e-12, false, "max_abs", [&](std::string&) {
    double worst = 0.0;
    for (int m = 1; m <= 3; ++m) worst = std::max(worst, su2_algebra_residual(su2_generators(m)));
    return worst;
  });
  run_check("su2_commutes_with_tau", 1e-10, false, "max_abs", [&](std::string&) {
    double worst = 0.0;
    for (int m = 1; m <= 3; ++m) {
      const Su2Generators g = su2_generators(m);
      const CMatrix tau = build_transfer(m, 0.9).matrix;
      for (const CMatrix* s : {&g.Sx, &g.Sy, &g.Sz}) worst = std::max(worst, commutator_residual(tau, *s));
    }
    return worst;
  });
  run_check("su2_multiplets", 0.0, false, "mismatch_count", [&](std::string&) {
    const TransferMatrix tm = build_transfer(3, 0.5);
    std::vector<ReferenceEigenvalue> ref = merge_coincident(reference_spectrum(3, 0.5));
    JordanReport summed;
    for (const MultipletRow& row : multiplet_table(tm, su2_generators(3))) {
      auto it = std::find_if(summed.eigenvalues.begin(), summed.eigenvalues.end(),
                             [&](const EigenvalueJordanData& e) { return std::abs(e.value - row.eigenvalue) < 1e-9; });
      if (it == summed.eigenvalues.end()) {
        summed.eigenvalues.push_back({row.eigenvalue, 0, {}, {}, true});
        it = summed.eigenvalues.end() - 1;
      }
      it->multiplicity += row.degeneracy;
    }
    const ReferenceComparison cmp = compare_with_reference(summed, ref, 1e-8, false);
    return static_cast<double>(cmp.missing + cmp.wrong_degeneracy + cmp.extra);
  });
  run_check("counting", 0.0, false, "mismatch_count", [&](std::string& detail) {
    int bad = 0;
    for (int m = 1; m <= 4; ++m) {
      const StateCount c = count_states(m);
      long long p3 = 1, p4 = 1, p16 = 1;
      for (int k = 0; k < m; ++k) {
        p3 *= 3;
        p4 *= 4;
        p16 *= 16;
      }
      bad += (c.homogeneous != (3 * p3 - 1) / 2) + (c.inhomogeneous != p4) + (c.otoc != p16);
    }
    const std::vector<double> eps = sample_epsilons(3, cfg.seed);
    for (int n = 1; n <= 3; ++n) {
      SolveOptions opt;
      opt.seed = cfg.seed;
      long long p = 1;
      for (int k = 0; k < n; ++k) p *= 3;
      bad += sector_state_count(n, {eps.begin(), eps.begin() + n}, opt) != p;
    }
    for (int m = 1; m <= 3; ++m)
      for (int n = 0; n <= m; ++n)
        bad += static_cast<long long>(vacuum_orbit(m, n, {eps.begin(), eps.begin() + m}).states.size()) != binomial(m, n);
    const JordanReport rep = jordan_structure(build_transfer(3, 0.8, eps), 1e-8);
    bad += rep.diagonalizable() ? 0 : 1;
    detail = "closed-form totals, inhomogeneous sector counts, vacuum orbits, diagonalizability";
    return static_cast<double>(bad);
  });
  run_check("otoc_commutation", 1e-10, false, "max_abs", [&](std::string&) {
    double worst = 0.0;
    for (int m = 1; m <= 2; ++m) worst = std::max(worst, check_commuting_family(m, {0.4, 1.3}, {}, Kind::otoc));
    return worst;
  });
  run_check("otoc_oracle", 1e-9, false, "max_abs", [&](std::string&) {
    double worst = 0.0;
    for (int t = 0; t <= 3; ++t)
      for (int x = t; x >= t - 2 && x >= -t; x -= 2) {
        const LightCone lc = light_cone(x, t);
        ChainSpec spec;
        spec.L = 2 * t + 2;
        spec.t = t;
        spec.lambda = 1.0;
        worst = std::max(worst, std::abs(otoc_via_tm(lc.m, lc.steps, 3, 3, 1.0) - otoc_direct(spec, x, 3, 3)));
      }
    return worst;
  });
  run_check("otoc_vacuum_exponent", 1e-12, false, "max_abs", [&](std::string&) {
    double worst = 0.0;
    const double mu = 0.8;
    const CMatrix tau = build_transfer(1, mu, {}, Kind::otoc).matrix;
    for (int n = 0; n <= 1; ++n)
      for (int l = 0; l <= 1; ++l) {
        const CVector v = otoc_pseudo_vacuum(1, n, l);
        worst = std::max(worst, (tau * v - otoc_vacuum_eigenvalue(mu, n, l) * v).norm());
      }
    return worst;
  });
  return out;
}

// ------------------------------------------------------------- argv utils --

std::pair<int, int> parse_point(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("point '" + text + "' must have the form x:t");
  std::size_t used_x = 0, used_t = 0;
  const std::string xs = text.substr(0, colon), ts = text.substr(colon + 1);
  int x = 0, t = 0;
  try {
    x = std::stoi(xs, &used_x);
    t = std::stoi(ts, &used_t);
  } catch (const std::exception&) {
    throw std::invalid_argument("point '" + text + "' must have the form x:t with integers");
  }
  if (used_x != xs.size() || used_t != ts.size())
    throw std::invalid_argument("point '" + text + "' must have the form x:t with integers");
  return {x, t};
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file " + path);
  f << text;
}

}  // namespace

std::vector<double> lambda_grid(const RunConfig& cfg) {
  if (cfg.lambda_count < 1) throw std::invalid_argument("lambda count must be at least 1");
  std::vector<double> grid(cfg.lambda_count);
  for (int i = 0; i < cfg.lambda_count; ++i)
    grid[i] = cfg.lambda_count == 1 ? cfg.lambda_start
                                    : cfg.lambda_start + (cfg.lambda_stop - cfg.lambda_start) * i / (cfg.lambda_count - 1);
  return grid;
}

std::vector<double> sample_epsilons(int count, std::uint64_t seed) {
  if (count > 20) throw std::invalid_argument("sample_epsilons: at most 20 values fit with gap 0.1");
  std::mt19937_64 rng(seed);
  std::vector<double> eps;
  while (static_cast<int>(eps.size()) < count) {
    const double e = uniform_draw(rng, -1.0, 1.0);
    if (std::all_of(eps.begin(), eps.end(), [&](double o) { return std::abs(o - e) >= 0.1; })) eps.push_back(e);
  }
  return eps;
}

std::vector<double> resolve_epsilons(const RunConfig& cfg, int count) {
  if (!cfg.eps.empty()) {
    if (static_cast<int>(cfg.eps.size()) < count)
      throw std::invalid_argument("need at least " + std::to_string(count) + " inhomogeneities");
    return {cfg.eps.begin(), cfg.eps.begin() + count};
  }
  if (cfg.eps_seed) {
    const std::vector<double> all = sample_epsilons(std::max(count, cfg.m), *cfg.eps_seed);
    return {all.begin(), all.begin() + count};
  }
  return std::vector<double>(count, 0.0);
}

json cmd_spectrum(const RunConfig& cfg) {
  const auto start = Clock::now();
  validate(cfg);
  const int cap = cfg.kind == Kind::correlation ? kMaxCorrelationM : kMaxOtocM;
  if (cfg.m > cap)
    throw ResourceError("spectrum: m = " + std::to_string(cfg.m) + " exceeds the dense cap " + std::to_string(cap));

  ConsensusOptions copt;
  copt.seed = cfg.seed;
  json rows = json::array(), nesting = json::array();
  bool nesting_ok = true;
  for (double l : lambda_grid(cfg)) {
    std::vector<std::vector<SpectralCluster>> spectra;
    for (int m = 1; m <= cfg.m; ++m) {
      const TransferMatrix tm = build_transfer(m, l, resolve_epsilons(cfg, m), cfg.kind);
      std::vector<SpectralCluster> clusters = cluster_spectrum(tm.matrix, copt);
      std::sort(clusters.begin(), clusters.end(), [](const SpectralCluster& a, const SpectralCluster& b) {
        return a.value.real() != b.value.real() ? a.value.real() < b.value.real() : a.value.imag() < b.value.imag();
      });
      for (const SpectralCluster& c : clusters)
        rows.push_back({{"m", m}, {"lambda", l}, {"re_t", c.value.real()}, {"im_t", c.value.imag()},
                        {"multiplicity", c.multiplicity}});
      spectra.push_back(std::move(clusters));
    }
    const NestingReport rep = nesting_check(spectra, l, cfg.tol);
    json levels = json::array();
    for (const NestingLevel& lvl : rep.levels)
      levels.push_back({{"m", lvl.m}, {"checked", lvl.checked}, {"unmatched", lvl.unmatched},
                        {"worst_distance", lvl.worst_distance}});
    nesting.push_back({{"lambda", l}, {"ok", rep.ok}, {"levels", levels}});
    nesting_ok = nesting_ok && rep.ok;
  }
  json doc;
  doc["schema"] = kSpectrumSchema;
  doc["config"] = config_json(cfg);
  doc["epsilons"] = resolve_epsilons(cfg, cfg.m);
  doc["rows"] = rows;
  doc["nesting"] = nesting;
  doc["nesting_ok"] = nesting_ok;
  doc["provenance"] = provenance(cfg, start);
  return doc;
}

std::string spectrum_csv(const json& spectrum) {
  std::ostringstream os;
  os << "# schema: " << kSpectrumCsvSchema << "; artifact " << kArtifactVersion << "; seed "
     << spectrum["provenance"]["seed"].get<std::uint64_t>() << "\n";
  os << "m,lambda,re_t,im_t,multiplicity\n";
  char buf[128];
  for (const json& r : spectrum["rows"]) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%d\n", r["m"].get<int>(), r["lambda"].get<double>(),
                  r["re_t"].get<double>(), r["im_t"].get<double>(), r["multiplicity"].get<int>());
    os << buf;
  }
  return os.str();
}

json cmd_correlate(const RunConfig& cfg) {
  const auto start = Clock::now();
  validate(cfg);
  if (cfg.alpha < 0 || cfg.alpha > 3 || cfg.beta < 0 || cfg.beta > 3)
    throw std::invalid_argument("alpha and beta must be Pauli indices 0..3");
  const bool homogeneous = cfg.eps.empty() && !cfg.eps_seed;
  const double l = cfg.lambda_start;
  json rows = json::array();
  for (const auto& [x, t] : cfg.points) {
    if (((t - x) % 2 + 2) % 2 != 0)
      throw std::invalid_argument("point (" + std::to_string(x) + ", " + std::to_string(t) +
                                  "): t - x is odd; only even offsets are reached by the folded transfer matrix");
    const LightCone lc = light_cone(x, t);
    const std::vector<double> eps = resolve_epsilons(cfg, lc.m);
    json row{{"x", x}, {"t", t}, {"m", lc.m}, {"steps", lc.steps}};
    const cplx tm = cfg.kind == Kind::correlation ? correlation_via_tm(lc.m, lc.steps, cfg.alpha, cfg.beta, l, eps)
                                                  : otoc_via_tm(lc.m, lc.steps, cfg.alpha, cfg.beta, l, eps);
    row["value_tm"] = complex_json(tm);
    const int L = 2 * t + 2;
    if (homogeneous && L <= kMaxOtocSites) {
      ChainSpec spec;
      spec.L = L;
      spec.t = t;
      spec.lambda = l;
      const cplx oracle = cfg.kind == Kind::correlation ? infinite_temp_correlation(spec, x, cfg.alpha, cfg.beta)
                                                        : otoc_direct(spec, x, cfg.alpha, cfg.beta);
      row["value_oracle"] = complex_json(oracle);
      row["abs_diff"] = std::abs(tm - oracle);
    } else {
      row["value_oracle"] = nullptr;
      row["abs_diff"] = nullptr;
    }
    rows.push_back(row);
  }
  json doc;
  doc["schema"] = kCorrelateSchema;
  doc["config"] = config_json(cfg);
  doc["lambda"] = l;
  doc["rows"] = rows;
  doc["provenance"] = provenance(cfg, start);
  return doc;
}

json cmd_verify(const RunConfig& cfg) {
  const auto start = Clock::now();
  validate(cfg);
  json checks = json::array();
  bool ok = true;
  int failed = 0;
  for (const Check& c : verify_checks(cfg)) {
    checks.push_back(check_json(c));
    if (!c.passed()) {
      ok = false;
      ++failed;
    }
  }
  json doc;
  doc["schema"] = kVerifySchema;
  doc["config"] = config_json(cfg);
  doc["checks"] = checks;
  doc["failed"] = failed;
  doc["ok"] = ok;
  doc["provenance"] = provenance(cfg, start);
  return doc;
}

json cmd_bethe(const RunConfig& cfg) {
  const auto start = Clock::now();
  validate(cfg);
  if (cfg.n < 0 || cfg.N < 0 || cfg.N > 2 * cfg.n) throw std::invalid_argument("bethe: need 0 <= N <= 2n");
  const std::vector<double> eps = resolve_epsilons(cfg, cfg.n);
  SolveOptions opt;
  opt.seed = cfg.seed;
  const SolveReport rep = solve_bethe(cfg.n, cfg.N, eps, {}, opt);
  const std::vector<double> grid = lambda_grid(cfg);
  json sets = json::array();
  for (const BetheRootSet& rs : rep.sets) {
    json roots = json::array();
    for (cplx r : rs.roots) roots.push_back(complex_json(r));
    json values = json::array();
    for (double mu : grid) {
      json v = nullptr;
      try {
        const cplx t = bethe_eigenvalue(mu, rs);
        if (std::isfinite(t.real()) && std::isfinite(t.imag())) v = complex_json(t);
      } catch (const std::domain_error&) {
        // spectral parameter on a rapidity: left null
      }
      values.push_back({{"lambda", mu}, {"value", v}});
    }
    sets.push_back({{"kind", to_string(rs.kind)},
                    {"roots", roots},
                    {"epsilons", rs.epsilons},
                    {"residual", rs.residual},
                    {"zero_sites", rs.zero_sites},
                    {"eigenvalues", values}});
  }
  json doc;
  doc["schema"] = kBetheSchema;
  doc["config"] = config_json(cfg);
  doc["epsilons"] = eps;
  doc["sets"] = sets;
  doc["solver"] = {{"attempts", rep.attempts},
                   {"converged", rep.converged},
                   {"rejected_singular", rep.rejected_singular},
                   {"rejected_divergent", rep.rejected_divergent},
                   {"rejected_coincident", rep.rejected_coincident},
                   {"diagnostics", rep.diagnostics}};
  doc["provenance"] = provenance(cfg, start);
  return doc;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Integrable brickwork circuits: transfer-matrix spectra, correlators and checks", "brickwork"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kArtifactVersion);

  RunConfig cfg;
  std::vector<std::string> points;
  std::uint64_t eps_seed = 0;
  std::string kind = "correlation";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--m", cfg.m, "Largest half-width")->envname("BRICKWORK_M");
    sub->add_option("--lambda-start", cfg.lambda_start, "First spectral parameter")->envname("BRICKWORK_LAMBDA_START");
    sub->add_option("--lambda-stop", cfg.lambda_stop, "Last spectral parameter")->envname("BRICKWORK_LAMBDA_STOP");
    sub->add_option("--lambda-count", cfg.lambda_count, "Number of grid points")->envname("BRICKWORK_LAMBDA_COUNT");
    auto* eps = sub->add_option("--eps", cfg.eps, "Inhomogeneities (comma list)")->delimiter(',')->envname("BRICKWORK_EPS");
    sub->add_option("--eps-seed", eps_seed, "Draw inhomogeneities from this seed")
        ->envname("BRICKWORK_EPS_SEED")
        ->excludes(eps);
    sub->add_option("--kind", kind, "correlation or otoc")
        ->check(CLI::IsMember({"correlation", "otoc"}))
        ->envname("BRICKWORK_KIND");
    sub->add_option("--tol", cfg.tol, "Matching tolerance")->envname("BRICKWORK_TOL");
    sub->add_option("--out", cfg.out, "Output file (default stdout)")->envname("BRICKWORK_OUT");
    sub->add_option("--format", cfg.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->envname("BRICKWORK_FORMAT");
    sub->add_option("--seed", cfg.seed, "Seed of all auxiliary randomness")->envname("BRICKWORK_SEED");
  };

  CLI::App* spectrum = app.add_subcommand("spectrum", "Transfer-matrix eigenvalues on a lambda grid, m = 1..M");
  add_common(spectrum);
  CLI::App* correlate = app.add_subcommand("correlate", "Correlators at space-time points");
  add_common(correlate);
  correlate->add_option("--points", points, "Points x:t (comma list)")->delimiter(',')->envname("BRICKWORK_POINTS");
  correlate->add_option("--alpha", cfg.alpha, "Pauli index at the origin")->envname("BRICKWORK_ALPHA");
  correlate->add_option("--beta", cfg.beta, "Pauli index at (x, t)")->envname("BRICKWORK_BETA");
  CLI::App* verify = app.add_subcommand("verify", "Full property suite; exit status 1 on failure");
  add_common(verify);
  verify->add_flag("--inject-wrong-normalization", cfg.inject_wrong_normalization,
                   "Negative control: corrupt the Bethe eigenvalue normalization");
  CLI::App* bethe = app.add_subcommand("bethe", "Bethe root sets and their eigenvalues on the lambda grid");
  add_common(bethe);
  bethe->add_option("--n", cfg.n, "Effective site count")->envname("BRICKWORK_N");
  bethe->add_option("--N", cfg.N, "Number of rapidities")->envname("BRICKWORK_NUM_ROOTS");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    cfg.command = app.get_subcommands().front()->get_name();
    cfg.kind = kind == "otoc" ? Kind::otoc : Kind::correlation;
    for (CLI::App* sub : app.get_subcommands())
      if (sub->count("--eps-seed") > 0) cfg.eps_seed = eps_seed;
    if (cfg.format == "csv" && cfg.command != "spectrum")
      throw std::invalid_argument("csv output is only available for spectrum");

    json doc;
    if (cfg.command == "spectrum") {
      doc = cmd_spectrum(cfg);
    } else if (cfg.command == "correlate") {
      for (const std::string& p : points) cfg.points.push_back(parse_point(p));
      if (cfg.points.empty()) cfg.points = {{0, 0}, {1, 1}, {2, 2}, {3, 3}};
      doc = cmd_correlate(cfg);
    } else if (cfg.command == "verify") {
      doc = cmd_verify(cfg);
    } else {
      doc = cmd_bethe(cfg);
    }
    write_output(cfg.out, cfg.format == "csv" ? spectrum_csv(doc) : doc.dump(2) + "\n");
    if (cfg.command == "verify") {
      for (const json& c : doc["checks"])
        std::cerr << (c["passed"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>() << "  residual "
                  << c["residual"] << " threshold " << c["threshold"] << "\n";
      return doc["ok"].get<bool>() ? kExitOk : kExitVerifyFailed;
    }
    return kExitOk;
  } catch (const ResourceError& e) {
    std::cerr << "resource cap: " << e.what() << "\n";
    return kExitResource;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerifyFailed;
  }
}

}  // namespace brickwork
