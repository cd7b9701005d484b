#pragma once

// Losses, rate envelopes and the log-log slope fitter.

#include <cstdint>
#include <span>
#include <string_view>

#include "streampca/linalg.hpp"
#include "streampca/streams.hpp"

namespace streampca {

/// Which end of the spectrum an estimator targets.
enum class Target { Smallest, Largest };

enum class BoundKind { EigenvalueErr, AlignmentLoss };

std::string_view to_string(Target target) noexcept;

/// 1 - <v,theta>^2 / ||v||^2, the squared sine of the angle between v and a
/// unit vector theta.
double alignment_loss(std::span<const double> v, std::span<const double> theta);

double target_eigenvalue(const CovarianceModel& model, Target which);
Vec target_eigenvector(const CovarianceModel& model, Target which);
/// Gap adjacent to the targeted eigenvalue.
double target_gap(const CovarianceModel& model, Target which);
/// True when the gap is zero relative to the spectrum scale.
bool is_degenerate_gap(const CovarianceModel& model, Target which);

double eigenvalue_error(double estimate, const CovarianceModel& model, Target which);

/// ||Sigma v||^2/||v||^2 - mu(v)^2; non-negative, zero exactly on eigenvectors.
double f_value(const CovarianceModel& model, std::span<const double> v);

/// E||x x^T||^2 = E||x||^4 = 2 tr(Sigma^2) + tr(Sigma)^2 for Gaussian x.
double fourth_moment_gaussian(const CovarianceModel& model);

/// ||Sigma|| max(sqrt(moment), ||Sigma||) / sqrt(n), divided by the targeted
/// gap for the alignment loss. Throws DegenerateGap if that gap is zero.
double theoretical_bound(const CovarianceModel& model, std::int64_t n, BoundKind kind,
                         double moment, Target which = Target::Smallest);

struct RatePoint {
  double n = 0.0;
  double loss = 0.0;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points_used = 0;
  int points_dropped = 0;  // non-positive or non-finite losses
};

/// Ordinary least squares of log(loss) on log(n). Throws InsufficientData
/// with fewer than three usable points or fewer than two distinct n.
RateFit fit_rate_slope(std::span<const RatePoint> points);

}  // namespace streampca
