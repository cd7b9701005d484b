#include "streampca/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "streampca/error.hpp"

namespace streampca {

std::string_view to_string(Target target) noexcept {
  return target == Target::Smallest ? "smallest" : "largest";
}

double alignment_loss(std::span<const double> v, std::span<const double> theta) {
  if (v.size() != theta.size()) throw Error(Errc::DimensionMismatch, "alignment_loss");
  const double vv = squared_norm(v);
  if (vv == 0.0) throw Error(Errc::ZeroVector, "alignment_loss with v = 0");
  const double vt = dot(v, theta);
  return std::clamp(1.0 - vt * vt / vv, 0.0, 1.0);
}

double target_eigenvalue(const CovarianceModel& model, Target which) {
  return which == Target::Smallest ? model.eigenvalues.front() : model.eigenvalues.back();
}

Vec target_eigenvector(const CovarianceModel& model, Target which) {
  return model.eigenvector(which == Target::Smallest ? 0 : model.dim() - 1);
}

double target_gap(const CovarianceModel& model, Target which) {
  return which == Target::Smallest ? model.gap_min : model.gap_max;
}

bool is_degenerate_gap(const CovarianceModel& model, Target which) {
  const double scale = std::max(1.0, model.eigenvalues.back());
  return !(target_gap(model, which) > 1e-12 * scale);
}

double eigenvalue_error(double estimate, const CovarianceModel& model, Target which) {
  return std::abs(estimate - target_eigenvalue(model, which));
}

double f_value(const CovarianceModel& model, std::span<const double> v) {
  const double vv = squared_norm(v);
  if (vv == 0.0) throw Error(Errc::ZeroVector, "f_value with v = 0");
  const Vec sv = model.sigma.apply(v);
  const double mu = dot(sv, v) / vv;
  // Cauchy-Schwarz makes this non-negative; rounding can leave -eps.
  return std::max(0.0, squared_norm(sv) / vv - mu * mu);
}

double fourth_moment_gaussian(const CovarianceModel& model) {
  double tr = 0.0;
  double tr_sq = 0.0;
  for (double lambda : model.eigenvalues) {
    tr += lambda;
    tr_sq += lambda * lambda;
  }
  return 2.0 * tr_sq + tr * tr;
}

double theoretical_bound(const CovarianceModel& model, std::int64_t n, BoundKind kind,
                         double moment, Target which) {
  if (n < 1) throw Error(Errc::InsufficientData, "theoretical_bound needs n >= 1");
  if (!(moment >= 0.0)) throw Error(Errc::InvalidConfig, "moment must be non-negative");
  const double sigma_norm = model.eigenvalues.back();
  const double value = sigma_norm * std::max(std::sqrt(moment), sigma_norm) /
                       std::sqrt(static_cast<double>(n));
  if (kind == BoundKind::EigenvalueErr) return value;
  if (is_degenerate_gap(model, which)) {
    throw Error(Errc::DegenerateGap,
                std::string("zero eigen-gap for the ") + std::string(to_string(which)) +
                    " eigenpair");
  }
  return value / target_gap(model, which);
}

RateFit fit_rate_slope(std::span<const RatePoint> points) {
  std::vector<double> xs;
  std::vector<double> ys;
  RateFit fit;
  for (const RatePoint& p : points) {
    if (!(p.loss > 0.0) || !std::isfinite(p.loss) || !(p.n > 0.0) || !std::isfinite(p.n)) {
      ++fit.points_dropped;
      continue;
    }
    xs.push_back(std::log(p.n));
    ys.push_back(std::log(p.loss));
  }
  const std::size_t m = xs.size();
  if (m < 3) {
    throw Error(Errc::InsufficientData, "need at least 3 positive points, have " +
                                            std::to_string(m));
  }

  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mean_x += xs[i];
    mean_y += ys[i];
  }
  mean_x /= static_cast<double>(m);
  mean_y /= static_cast<double>(m);

  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = xs[i] - mean_x;
    const double dy = ys[i] - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw Error(Errc::InsufficientData, "all points share the same n");

  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += r * r;
  }
  // A flat series is fitted exactly by slope 0.
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.points_used = static_cast<int>(m);
  return fit;
}

}  // namespace streampca
