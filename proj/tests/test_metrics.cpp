#include <doctest.h>

#include <cmath>
#include <vector>

#include "streampca/error.hpp"
#include "streampca/metrics.hpp"

using namespace streampca;

namespace {

Vec top_gap() {
  Vec s(10, 0.9);
  s.back() = 1.0;
  return s;
}

Vec smallest_id() {
  Vec s(10, 1.0);
  s.front() = 0.5;
  return s;
}

Errc code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::InvalidConfig;
}

}  // namespace

TEST_CASE("alignment_loss") {
  const Vec theta{1.0, 0.0};
  CHECK(alignment_loss(theta, theta) == 0.0);
  CHECK(alignment_loss(Vec{0.0, 3.0}, theta) == 1.0);
  const double h = 1.0 / std::sqrt(2.0);
  CHECK(alignment_loss(Vec{h, h}, theta) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(code_of([&] { alignment_loss(Vec{0.0, 0.0}, theta); }) == Errc::ZeroVector);

  Rng rng = make_rng(1, RngStream::Replicate);
  std::normal_distribution<double> normal;
  const CovarianceModel model = make_covariance(top_gap(), 3);
  const Vec t = model.eigenvector(9);
  for (int i = 0; i < 1000; ++i) {
    Vec v(10);
    for (double& x : v) x = normal(rng);
    const double base = alignment_loss(v, t);
    REQUIRE(base >= 0.0);
    REQUIRE(base <= 1.0);
    for (double s : {-1.0, 1e-3, -250.0, 7.5}) {
      Vec sv = v;
      for (double& x : sv) x *= s;
      REQUIRE(std::abs(alignment_loss(sv, t) - base) <= 1e-12);
    }
  }
}

TEST_CASE("eigenvalue_error") {
  const CovarianceModel top = make_covariance(top_gap(), 1);
  const CovarianceModel bottom = make_covariance(smallest_id(), 1);
  CHECK(eigenvalue_error(0.9, top, Target::Smallest) == 0.0);
  CHECK(eigenvalue_error(1.05, top, Target::Largest) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(eigenvalue_error(0.45, bottom, Target::Smallest) == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("f_value") {
  const CovarianceModel diag12 = CovarianceModel::from_parts(Vec{1.0, 2.0}, Matrix::identity(2));
  CHECK(f_value(diag12, Vec{1.0, 1.0}) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(code_of([&] { f_value(diag12, Vec{0.0, 0.0}); }) == Errc::ZeroVector);

  for (const Vec& spectrum : {top_gap(), smallest_id(), Vec{0.1, 0.7, 2.0, 5.0}}) {
    const CovarianceModel model = make_covariance(spectrum, 5);
    for (std::size_t j = 0; j < model.dim(); ++j) {
      CHECK(f_value(model, model.eigenvector(j)) <= 1e-12);
    }
  }

  Rng rng = make_rng(6, RngStream::Replicate);
  std::normal_distribution<double> normal;
  const CovarianceModel model = make_covariance(Vec{0.1, 0.7, 2.0, 5.0}, 6);
  for (int i = 0; i < 10000; ++i) {
    Vec v(4);
    for (double& x : v) x = normal(rng);
    REQUIRE(f_value(model, v) >= 0.0);
  }
}

TEST_CASE("f_value vanishes quadratically near an eigenvector") {
  // For v = theta_j + eps theta_k:
  //   f = eps^2 (lambda_j - lambda_k)^2 / (1 + eps^2)^2.
  const Vec spectrum{0.1, 0.7, 2.0, 5.0};
  const CovarianceModel model = make_covariance(spectrum, 9);
  const std::size_t j = 1;
  const std::size_t k = 3;
  const Vec tj = model.eigenvector(j);
  const Vec tk = model.eigenvector(k);
  const double delta = spectrum[j] - spectrum[k];
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    Vec v(4);
    for (std::size_t i = 0; i < 4; ++i) v[i] = tj[i] + eps * tk[i];
    const double expected = eps * eps * delta * delta / std::pow(1.0 + eps * eps, 2);
    CHECK(f_value(model, v) == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("fourth_moment_gaussian") {
  CHECK(fourth_moment_gaussian(make_covariance(Vec(10, 1.0), 0)) == 120.0);
  CHECK(fourth_moment_gaussian(make_covariance(top_gap(), 0)) ==
        doctest::Approx(99.39).epsilon(1e-14));
  CHECK(fourth_moment_gaussian(make_covariance(Vec(3, 0.0), 0)) == 0.0);

  // E||x||^4 by Monte Carlo, within 3 standard errors.
  const CovarianceModel model = make_covariance(Vec{0.3, 1.0, 1.5, 4.0}, 17);
  Rng rng = make_rng(17, RngStream::Replicate);
  const int n = 100000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double sq = squared_norm(sample_gaussian(model, rng));
    sum += sq * sq;
    sum_sq += sq * sq * sq * sq;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / (n - 1));
  CHECK(std::abs(mean - fourth_moment_gaussian(model)) <= 3.0 * se);
}

TEST_CASE("theoretical_bound") {
  const CovarianceModel model = make_covariance(top_gap(), 2);
  const double tr = 9.1;
  // With moment = tr(Sigma)^2 the bound is 1.0 * 9.1 / (0.1 * 1000).
  CHECK(theoretical_bound(model, 1000000, BoundKind::AlignmentLoss, tr * tr, Target::Largest) ==
        doctest::Approx(0.091).epsilon(1e-12));

  const double m = fourth_moment_gaussian(model);
  for (std::int64_t n : {1, 37, 1000, 123456}) {
    const double at_n = theoretical_bound(model, n, BoundKind::AlignmentLoss, m, Target::Largest);
    const double at_4n =
        theoretical_bound(model, 4 * n, BoundKind::AlignmentLoss, m, Target::Largest);
    CHECK(at_4n == doctest::Approx(at_n / 2.0).epsilon(1e-14));

    const double eig = theoretical_bound(model, n, BoundKind::EigenvalueErr, m, Target::Largest);
    CHECK(at_n * model.gap_max == doctest::Approx(eig).epsilon(1e-14));
  }

  // ||Sigma|| dominates sqrt(moment): bound is ||Sigma||^2 / sqrt(n).
  const CovarianceModel big = make_covariance(Vec{1.0, 3.0}, 2);
  CHECK(theoretical_bound(big, 16, BoundKind::EigenvalueErr, 4.0, Target::Largest) ==
        doctest::Approx(9.0 / 4.0).epsilon(1e-15));

  CHECK(code_of([&] {
          theoretical_bound(model, 10, BoundKind::AlignmentLoss, m, Target::Smallest);
        }) == Errc::DegenerateGap);
  CHECK_NOTHROW(theoretical_bound(model, 10, BoundKind::EigenvalueErr, m, Target::Smallest));
}

TEST_CASE("fit_rate_slope on exact power laws") {
  const auto power_law = [](double scale, double exponent) {
    std::vector<RatePoint> pts;
    for (double n = 100; n <= 1e6; n *= 1.7) pts.push_back({n, scale * std::pow(n, exponent)});
    return pts;
  };

  RateFit half = fit_rate_slope(power_law(3.0, -0.5));
  CHECK(std::abs(half.slope + 0.5) <= 1e-12);
  CHECK(half.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(half.intercept - std::log(3.0)) <= 1e-10);

  CHECK(std::abs(fit_rate_slope(power_law(0.2, -1.0)).slope + 1.0) <= 1e-12);

  const RateFit flat = fit_rate_slope(power_law(4.0, 0.0));
  CHECK(flat.slope == 0.0);
  CHECK(flat.r_squared == 1.0);

  Rng rng = make_rng(3, RngStream::Replicate);
  std::uniform_real_distribution<double> exponent(-3.0, 3.0);
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  for (int i = 0; i < 200; ++i) {
    const double e = exponent(rng);
    REQUIRE(std::abs(fit_rate_slope(power_law(scale(rng), e)).slope - e) <= 1e-10);
  }
}

TEST_CASE("fit_rate_slope data handling") {
  std::vector<RatePoint> pts{{10, 1.0}, {20, 0.0}, {40, -1.0}, {80, 0.5}, {160, 0.25}};
  const RateFit fit = fit_rate_slope(pts);
  CHECK(fit.points_used == 3);
  CHECK(fit.points_dropped == 2);
  CHECK(fit.r_squared >= 0.0);
  CHECK(fit.r_squared <= 1.0);

  std::vector<RatePoint> two{{10, 1.0}, {20, 0.5}};
  CHECK(code_of([&] { fit_rate_slope(two); }) == Errc::InsufficientData);
  std::vector<RatePoint> same_n{{10, 1.0}, {10, 0.5}, {10, 0.25}};
  CHECK(code_of([&] { fit_rate_slope(same_n); }) == Errc::InsufficientData);
}
