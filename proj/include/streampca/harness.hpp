#pragma once

// Replicated convergence experiments: each replicate streams samples through
// one estimator and records losses on a checkpoint grid; replicates are then
// averaged and the decay exponent is fitted in log-log space.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "streampca/estimators.hpp"
#include "streampca/metrics.hpp"
#include "streampca/streams.hpp"

namespace streampca {

enum class Method { Krasulina, Oja, Ccipca };
enum class SourceKind { Gaussian, FixedDataset, Csv };

std::string_view to_string(Method method) noexcept;
std::string_view to_string(SourceKind source) noexcept;

/// Named spectra. "paper4" is {0.9 x 9, 1.0} (top gap 0.1, smallest
/// eigenvalue degenerate); "smallest-id" is {0.5, 1.0 x 9} (bottom gap 0.5).
std::optional<Vec> spectrum_preset(std::string_view name);

struct ExperimentConfig {
  Method method = Method::Krasulina;
  Target variant = Target::Largest;
  Vec spectrum;                // ascending; ignored for Csv sources
  std::string spectrum_preset;  // informational echo when a preset was used
  ScheduleParams schedule;
  double amnesic_l = 2.0;
  std::int64_t n_total = 0;
  int replicates = 1;
  std::vector<std::int64_t> checkpoints;  // empty = default grid
  std::uint64_t seed = 0;
  SourceKind source = SourceKind::Gaussian;
  std::filesystem::path csv_path;
  bool literal_singular_values = false;
  int threads = 0;  // 0 = hardware concurrency; never affects results
};

/// Throws InvalidConfig, InvalidSpectrum, InadmissibleSchedule or
/// DegenerateGap.
void validate_config(const ExperimentConfig& config);

Scheme scheme_for(Method method, Target variant);

/// 30 geometrically spaced integers from 10^2 to n_total (from 1 when
/// n_total < 100), always ending at n_total; {0} when n_total is 0.
std::vector<std::int64_t> default_checkpoints(std::int64_t n_total);

/// Everything replicates share: ground truth, the finite dataset (if any),
/// the checkpoint grid, and E||A_n||^2 for the rate envelope.
struct ExperimentContext {
  ExperimentConfig config;
  std::shared_ptr<const CovarianceModel> model;
  std::shared_ptr<const Matrix> dataset;  // null for the Gaussian source
  std::vector<std::int64_t> checkpoints;
  double moment = 0.0;
};

ExperimentContext prepare_experiment(const ExperimentConfig& config);

/// Raw per-checkpoint values of one replicate.
struct ReplicateTrace {
  std::vector<std::int64_t> n;
  std::vector<double> alignment_loss;
  std::vector<double> eigenvalue_estimate;  // single-sample estimator
  std::vector<double> eigenvalue_error;
  std::vector<double> rayleigh_error;  // |mu(V_n) - lambda| with the true Sigma
  std::vector<double> v_norm;
};

/// Deterministic in (context, replicate_index); the replicate generator is
/// seeded with config.seed + replicate_index.
ReplicateTrace run_single(const ExperimentContext& context, int replicate_index);
ReplicateTrace run_single(const ExperimentConfig& config, int replicate_index);

struct CurvePoint {
  std::int64_t n = 0;
  double mean_alignment_loss = 0.0;
  double mean_eigenvalue_error = 0.0;
  double stderr_align = 0.0;
  double stderr_eig = 0.0;
  double bound = 0.0;  // alignment-loss envelope
  double eigenvalue_bound = 0.0;
  double mean_eigenvalue_estimate = 0.0;
  double mean_rayleigh_error = 0.0;
  double stderr_rayleigh = 0.0;
};

/// Mean and standard error per checkpoint (stderr 0 for one replicate).
/// Throws GridMismatch when replicate grids differ.
std::vector<CurvePoint> aggregate(const std::vector<ReplicateTrace>& raw);

struct ExperimentResult {
  std::vector<CurvePoint> curve;
  std::optional<RateFit> alignment_fit;
  std::optional<RateFit> eigenvalue_fit;
  std::optional<RateFit> rayleigh_fit;
  CovarianceModel model;
  double moment = 0.0;
};

/// Fits use checkpoints with n >= n_total / 100.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace streampca
