#pragma once

// Batch front-end: spectrum sweeps, correlators, the verification suite and
// Bethe root exports, producing versioned JSON documents (and CSV for
// spectra). The command functions are pure apart from the recorded wall time;
// run() adds argument parsing, file output and exit codes.

#include "brickwork/transfer.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace brickwork {

inline constexpr const char* kArtifactVersion = "0.1.0";
inline constexpr const char* kSpectrumSchema = "brickwork.spectrum/1";
inline constexpr const char* kSpectrumCsvSchema = "brickwork.spectrum.csv/1";
inline constexpr const char* kCorrelateSchema = "brickwork.correlate/1";
inline constexpr const char* kVerifySchema = "brickwork.verify/1";
inline constexpr const char* kBetheSchema = "brickwork.bethe/1";

enum ExitCode : int { kExitOk = 0, kExitVerifyFailed = 1, kExitUsage = 2, kExitResource = 3 };

struct RunConfig {
  std::string command;
  int m = 1;
  double lambda_start = 0.0;
  double lambda_stop = 4.0;
  int lambda_count = 81;
  std::vector<double> eps;               // explicit inhomogeneities
  std::optional<std::uint64_t> eps_seed;  // or drawn from this seed
  Kind kind = Kind::correlation;
  double tol = 1e-8;
  std::string out;
  std::string format = "json";
  std::uint64_t seed = 20211;  // auxiliary randomness (clustering rotation, Bethe seeds)

  // correlate
  std::vector<std::pair<int, int>> points;  // (x, t)
  int alpha = 3;
  int beta = 3;

  // bethe
  int n = 1;
  int N = 0;

  // verify: negative-control hook that drops the 1/2 of the eigenvalue formula
  bool inject_wrong_normalization = false;
};

// Evenly spaced grid including both end points (a single point is lambda_start).
std::vector<double> lambda_grid(const RunConfig& cfg);

// Uniform draws on [-1, 1] with pairwise gap >= 0.1 from a fixed seed.
std::vector<double> sample_epsilons(int count, std::uint64_t seed);

// The first `count` inhomogeneities of the run: explicit list, seeded draw,
// or homogeneous zeros.
std::vector<double> resolve_epsilons(const RunConfig& cfg, int count);

nlohmann::json cmd_spectrum(const RunConfig& cfg);
std::string spectrum_csv(const nlohmann::json& spectrum);

nlohmann::json cmd_correlate(const RunConfig& cfg);

// Runs every check without stopping at the first failure; "ok" is false iff
// a check that is expected to pass fails.
nlohmann::json cmd_verify(const RunConfig& cfg);

nlohmann::json cmd_bethe(const RunConfig& cfg);

// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv);

}  // namespace brickwork
