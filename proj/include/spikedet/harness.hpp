#pragma once

// Monte Carlo error curves and statistic samples, plus the config/CSV files
// that drive and record them.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spikedet/rng.hpp"
#include "spikedet/wigner.hpp"

namespace spikedet {

enum class ExperimentMode { plain, transformed, adaptive };

std::string_view to_string(ExperimentMode m);

struct ExperimentConfig {
  Index n = 256;
  std::vector<double> omegas;
  int trials = 2000;
  Seed seed;
  NoiseSpec noise = NoiseSpec::goe();
  SpikePrior prior = SpikePrior::rademacher();
  ExperimentMode mode = ExperimentMode::plain;
  /// Output path; empty or "-" means standard output.
  std::string emit;
  /// Density for transformed mode; defaults to the one matching `noise`.
  std::optional<std::string> density;

  /// Throws std::invalid_argument on trials < 100, n < 2, omegas outside
  /// [0, 1), or a mode the noise family cannot support.
  void validate() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&);
};

/// One row of an error curve: empirical Type-I/Type-II rates and the
/// limiting error. `reliably_detectable` marks transformed rows with
/// omega * F >= 1, which are not simulated (rates are NaN).
struct ErrorCurvePoint {
  double omega = 0.0;
  double type1 = 0.0;
  double type2 = 0.0;
  double err_empirical = 0.0;
  double err_theory = 0.0;
  double std_error = 0.0;
  int trials = 0;
  bool reliably_detectable = false;
};

std::vector<ErrorCurvePoint> run_detection_experiment(const ExperimentConfig& cfg);

/// Plain and transformed tests evaluated on the same sampled matrices.
struct ComparisonPoint {
  ErrorCurvePoint plain;
  ErrorCurvePoint transformed;
};

std::vector<ComparisonPoint> run_transform_comparison(const ExperimentConfig& cfg);

/// One statistic value per trial. Trials with an eigenvalue past the log-det
/// singularity (signal_certain) keep the log|.| continuation of the
/// statistic so the upper tail is not truncated; the bulk_* moments cover
/// only the remaining trials.
struct StatisticSamples {
  std::vector<double> h0, h1;
  double mean0 = 0.0, var0 = 0.0, mean1 = 0.0, var1 = 0.0;
  double bulk_mean0 = 0.0, bulk_var0 = 0.0, bulk_mean1 = 0.0, bulk_var1 = 0.0;
  int signal_certain0 = 0, signal_certain1 = 0;
};

/// Statistic samples under each hypothesis at one omega (plain or
/// transformed statistic according to cfg.mode).
StatisticSamples histogram_L(const ExperimentConfig& cfg, double omega);

/// CSV with header
/// omega,type1,type2,err_empirical,err_theory,stderr,trials,n,seed,mode
/// (9 significant digits, LF line endings).
std::string format_csv(const std::vector<ErrorCurvePoint>& points, const ExperimentConfig& cfg);
void write_csv(const std::vector<ErrorCurvePoint>& points, const ExperimentConfig& cfg,
               const std::filesystem::path& path);

/// CSV for plain-vs-transformed comparisons.
std::string format_comparison_csv(const std::vector<ComparisonPoint>& points);

/// key=value lines, '#' comments. Keys: n, omegas (comma separated),
/// trials, seed, stream, noise, prior, mode, emit, density.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig read_config(const std::filesystem::path& path);
std::string format_config(const ExperimentConfig& cfg);

NoiseSpec parse_noise(std::string_view name);
std::string format_noise(const NoiseSpec& spec);
SpikePrior parse_prior(std::string_view name);
std::string format_prior(const SpikePrior& prior);

/// Worker threads from SWD_THREADS (0 or unset = hardware concurrency).
unsigned worker_threads();

}  // namespace spikedet
