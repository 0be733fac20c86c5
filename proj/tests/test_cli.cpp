#include "brickwork/cli.hpp"
#include "brickwork/spectral.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace brickwork;
using nlohmann::json;

namespace {

json strip_wall_time(json doc) {
  doc["provenance"].erase("wall_time_s");
  return doc;
}

RunConfig spectrum_config(int m, double start, double stop, int count) {
  RunConfig cfg;
  cfg.command = "spectrum";
  cfg.m = m;
  cfg.lambda_start = start;
  cfg.lambda_stop = stop;
  cfg.lambda_count = count;
  return cfg;
}

int run_args(std::vector<std::string> args) {
  args.insert(args.begin(), "brickwork");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("brickwork_test_" + name)).string();
}

}  // namespace

TEST(Grid, EndPointsAndSinglePoint) {
  const std::vector<double> g = lambda_grid(spectrum_config(1, 0.0, 4.0, 81));
  ASSERT_EQ(g.size(), 81u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_EQ(g.back(), 4.0);
  EXPECT_NEAR(g[20], 1.0, 1e-15);
  EXPECT_EQ(lambda_grid(spectrum_config(1, 0.7, 4.0, 1)), std::vector<double>{0.7});
  EXPECT_THROW(lambda_grid(spectrum_config(1, 0.0, 1.0, 0)), std::invalid_argument);
}

TEST(Epsilons, SeededDrawsAreSeparatedAndReproducible) {
  const std::vector<double> a = sample_epsilons(6, 5), b = sample_epsilons(6, 5);
  EXPECT_EQ(a, b);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_GE(a[i], -1.0);
    EXPECT_LE(a[i], 1.0);
    for (std::size_t j = 0; j < i; ++j) EXPECT_GE(std::abs(a[i] - a[j]), 0.1);
  }
  RunConfig cfg;
  cfg.eps = {0.1, 0.2, 0.3};
  EXPECT_EQ(resolve_epsilons(cfg, 2), (std::vector<double>{0.1, 0.2}));
  EXPECT_THROW(resolve_epsilons(cfg, 4), std::invalid_argument);
  EXPECT_EQ(resolve_epsilons(RunConfig{}, 2), (std::vector<double>{0.0, 0.0}));
}

TEST(Spectrum, SingleColumnCurves) {
  const json doc = cmd_spectrum(spectrum_config(1, 0.0, 4.0, 81));
  EXPECT_EQ(doc["schema"], kSpectrumSchema);
  EXPECT_EQ(doc["rows"].size(), 2u * 81u);
  for (const json& r : doc["rows"]) {
    const double l = r["lambda"].get<double>(), re = r["re_t"].get<double>();
    const int mult = r["multiplicity"].get<int>();
    if (mult == 1) {
      EXPECT_NEAR(re, 1.0, 1e-12);
    } else {
      EXPECT_EQ(mult, 3);
      EXPECT_NEAR(re, l * l / (1.0 + l * l), 1e-12);
    }
    EXPECT_NEAR(r["im_t"].get<double>(), 0.0, 1e-12);
  }
}

TEST(Spectrum, ProjectorRowAtZero) {
  const json doc = cmd_spectrum(spectrum_config(3, 0.0, 0.0, 1));
  for (int m = 1; m <= 3; ++m) {
    int nonzero = 0;
    for (const json& r : doc["rows"])
      if (r["m"] == m && std::hypot(r["re_t"].get<double>(), r["im_t"].get<double>()) > 1e-10) {
        ++nonzero;
        EXPECT_EQ(r["multiplicity"], 1);
        EXPECT_NEAR(r["re_t"].get<double>(), 1.0, 1e-12);
      }
    EXPECT_EQ(nonzero, 1) << "m = " << m;
  }
}

TEST(Spectrum, NestingSummaryAndDeterminism) {
  const RunConfig cfg = spectrum_config(3, 0.5, 2.0, 4);
  const json a = cmd_spectrum(cfg), b = cmd_spectrum(cfg);
  EXPECT_TRUE(a["nesting_ok"].get<bool>());
  EXPECT_EQ(a["nesting"].size(), 4u);
  EXPECT_EQ(strip_wall_time(a).dump(), strip_wall_time(b).dump());
  EXPECT_EQ(a["provenance"]["seed"], cfg.seed);
  EXPECT_EQ(a["provenance"]["artifact_version"], kArtifactVersion);
}

TEST(Spectrum, CsvLayout) {
  const std::string csv = spectrum_csv(cmd_spectrum(spectrum_config(1, 2.0, 2.0, 1)));
  std::istringstream is(csv);
  std::string first, header, row;
  std::getline(is, first);
  std::getline(is, header);
  std::getline(is, row);
  EXPECT_NE(first.find(kSpectrumCsvSchema), std::string::npos);
  EXPECT_EQ(first[0], '#');
  EXPECT_EQ(header, "m,lambda,re_t,im_t,multiplicity");
  EXPECT_EQ(row.rfind("1,2,", 0), 0u);
  // Values round-trip through 17 significant digits.
  std::istringstream fields(row);
  std::string m, l, re;
  std::getline(fields, m, ',');
  std::getline(fields, l, ',');
  std::getline(fields, re, ',');
  const double v = std::stod(re);
  EXPECT_TRUE(std::abs(v - 0.8) < 1e-12 || std::abs(v - 1.0) < 1e-12);
}

TEST(Spectrum, CapsAreResourceErrors) {
  EXPECT_THROW(cmd_spectrum(spectrum_config(5, 0.0, 1.0, 1)), ResourceError);
  RunConfig cfg = spectrum_config(3, 0.0, 1.0, 1);
  cfg.kind = Kind::otoc;
  EXPECT_THROW(cmd_spectrum(cfg), ResourceError);
}

TEST(Correlate, EdgeSeriesAndOracle) {
  RunConfig cfg;
  cfg.command = "correlate";
  cfg.lambda_start = 1.0;
  cfg.points = {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {1, 3}};
  const json doc = cmd_correlate(cfg);
  EXPECT_EQ(doc["schema"], kCorrelateSchema);
  for (int t = 0; t <= 3; ++t)
    EXPECT_NEAR(doc["rows"][t]["value_tm"]["re"].get<double>(), std::pow(0.5, t), 1e-13);
  const json& r = doc["rows"][4];
  EXPECT_EQ(r["m"], 2);
  EXPECT_EQ(r["steps"], 2);
  EXPECT_LT(r["abs_diff"].get<double>(), 1e-10);
}

TEST(Correlate, IdentityIsOneAndOracleCutoff) {
  RunConfig cfg;
  cfg.command = "correlate";
  cfg.alpha = cfg.beta = 0;
  cfg.lambda_start = 0.6;
  cfg.points = {{0, 2}, {5, 5}};
  const json doc = cmd_correlate(cfg);
  for (const json& r : doc["rows"]) EXPECT_NEAR(r["value_tm"]["re"].get<double>(), 1.0, 1e-13);
  EXPECT_FALSE(doc["rows"][0]["value_oracle"].is_null());
  EXPECT_TRUE(doc["rows"][1]["value_oracle"].is_null());  // L = 12 exceeds the oracle cap
}

TEST(Correlate, OddOffsetIsAUsageError) {
  RunConfig cfg;
  cfg.command = "correlate";
  cfg.points = {{0, 1}};
  EXPECT_THROW(cmd_correlate(cfg), std::invalid_argument);
}

TEST(Bethe, TwoSiteRootsAndVacuumRecord) {
  RunConfig cfg;
  cfg.command = "bethe";
  cfg.n = 2;
  cfg.N = 2;
  cfg.lambda_count = 3;
  json doc = cmd_bethe(cfg);
  EXPECT_EQ(doc["schema"], kBetheSchema);
  bool found = false;
  for (const json& s : doc["sets"])
    if (s["kind"] == "regular") {
      found = true;
      for (const json& z : s["roots"]) {
        EXPECT_NEAR(z["re"].get<double>(), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(z["im"].get<double>()), 1.0 / std::sqrt(3.0), 1e-12);
      }
      EXPECT_EQ(s["eigenvalues"].size(), 3u);
    }
  EXPECT_TRUE(found);

  cfg.n = 1;
  cfg.N = 0;
  doc = cmd_bethe(cfg);
  ASSERT_EQ(doc["sets"].size(), 1u);
  EXPECT_TRUE(doc["sets"][0]["roots"].empty());
  EXPECT_NEAR(doc["sets"][0]["eigenvalues"][1]["value"]["re"].get<double>(), 0.8, 1e-14);  // lambda = 2
}

TEST(Bethe, ThreeSiteSweepHitsTheNewFormulas) {
  // Every n = 3 eigenvalue must be a closed-form entry of the three-column
  // table; together they must cover the seven entries absent at two columns.
  const std::vector<double> samples{0.5, 2.0};
  std::vector<std::vector<bool>> hit(samples.size());
  for (std::size_t s = 0; s < samples.size(); ++s) hit[s].assign(reference_spectrum(3, samples[s]).size(), false);
  for (int N = 0; N <= 3; ++N) {
    RunConfig cfg;
    cfg.command = "bethe";
    cfg.n = 3;
    cfg.N = N;
    cfg.lambda_start = samples.front();
    cfg.lambda_stop = samples.back();
    cfg.lambda_count = 2;
    const json doc = cmd_bethe(cfg);
    for (const json& set : doc["sets"])
      for (std::size_t s = 0; s < samples.size(); ++s) {
        const json& v = set["eigenvalues"][s]["value"];
        ASSERT_FALSE(v.is_null());
        const cplx t(v["re"].get<double>(), v["im"].get<double>());
        const std::vector<ReferenceEigenvalue> ref = reference_spectrum(3, samples[s]);
        bool matched = false;
        for (std::size_t k = 0; k < ref.size(); ++k)
          if (std::abs(t - ref[k].value) < 1e-6) {
            hit[s][k] = true;
            matched = true;
          }
        EXPECT_TRUE(matched) << "N = " << N << ", lambda = " << samples[s] << ", value " << t;
      }
  }
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const std::vector<ReferenceEigenvalue> ref = reference_spectrum(3, samples[s]);
    const std::vector<ReferenceEigenvalue> two = reference_spectrum(2, samples[s]);
    for (std::size_t k = 0; k < ref.size(); ++k) {
      const bool old = std::any_of(two.begin(), two.end(),
                                   [&](const ReferenceEigenvalue& e) { return e.formula == ref[k].formula; });
      if (!old) EXPECT_TRUE(hit[s][k]) << ref[k].formula;
    }
  }
}

TEST(Verify, DefaultSuitePassesAndControlsBehave) {
  RunConfig cfg;
  cfg.command = "verify";
  const json doc = cmd_verify(cfg);
  EXPECT_EQ(doc["schema"], kVerifySchema);
  EXPECT_TRUE(doc["ok"].get<bool>());
  bool control = false;
  for (const json& c : doc["checks"]) {
    EXPECT_TRUE(c.contains("residual"));
    EXPECT_TRUE(c.contains("threshold"));
    if (c["name"] == "commutation_mismatched_eps") {
      control = true;
      EXPECT_EQ(c["status"], "expected_fail");
    }
  }
  EXPECT_TRUE(control);

  cfg.inject_wrong_normalization = true;
  const json bad = cmd_verify(cfg);
  EXPECT_FALSE(bad["ok"].get<bool>());
  EXPECT_EQ(bad["failed"], 1);
  for (const json& c : bad["checks"])
    if (c["name"] == "bethe_eigenvalue") EXPECT_EQ(c["status"], "fail");
}

TEST(Run, ExitCodes) {
  const std::string out = temp_path("out.json");
  EXPECT_EQ(run_args({"spectrum", "--m", "1", "--lambda-count", "2", "--out", out}), kExitOk);
  {
    std::ifstream f(out);
    const json doc = json::parse(f);
    EXPECT_EQ(doc["rows"].size(), 4u);
  }
  EXPECT_EQ(run_args({"spectrum", "--m", "5", "--lambda-count", "1", "--out", out}), kExitResource);
  EXPECT_EQ(run_args({"correlate", "--points", "0:1", "--out", out}), kExitUsage);
  EXPECT_EQ(run_args({"correlate", "--points", "zero", "--out", out}), kExitUsage);
  EXPECT_EQ(run_args({"spectrum", "--no-such-flag"}), kExitUsage);
  EXPECT_EQ(run_args({"spectrum", "--tol", "-1", "--out", out}), kExitUsage);
  EXPECT_EQ(run_args({"correlate", "--format", "csv", "--out", out}), kExitUsage);
  EXPECT_EQ(run_args({"verify", "--inject-wrong-normalization", "--out", out}), kExitVerifyFailed);
  std::filesystem::remove(out);
}

TEST(Run, EnvironmentOverride) {
  const std::string out = temp_path("env.csv");
  ::setenv("BRICKWORK_M", "2", 1);
  ::setenv("BRICKWORK_FORMAT", "csv", 1);
  EXPECT_EQ(run_args({"spectrum", "--lambda-count", "1", "--lambda-start", "1", "--out", out}), kExitOk);
  ::unsetenv("BRICKWORK_M");
  ::unsetenv("BRICKWORK_FORMAT");
  std::ifstream f(out);
  std::string line;
  int rows = 0;
  bool has_m2 = false;
  while (std::getline(f, line))
    if (!line.empty() && line[0] != '#' && line[0] != 'm') {
      ++rows;
      has_m2 = has_m2 || line.rfind("2,", 0) == 0;
    }
  EXPECT_TRUE(has_m2);
  EXPECT_GT(rows, 2);
  std::filesystem::remove(out);
}
