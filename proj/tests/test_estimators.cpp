#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "streampca/error.hpp"
#include "streampca/estimators.hpp"

using namespace streampca;

namespace {

EstimatorState make_state(Vec v, Scheme scheme, std::int64_t step = 1, double l = 0.0) {
  EstimatorState s;
  s.v = std::move(v);
  s.scheme = scheme;
  s.step = step;
  s.amnesic_l = l;
  return s;
}

Vec random_vec(std::size_t d, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> normal;
  Vec v(d);
  for (double& x : v) x = scale * normal(rng);
  return v;
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

TEST_CASE("krasulina_xi examples") {
  const Vec v{0.6, 0.8};
  for (double x : krasulina_xi(v, v)) CHECK(std::abs(x) <= 1e-16);
  for (double x : krasulina_xi(Vec{-0.8, 0.6}, v)) CHECK(x == 0.0);
  CHECK(krasulina_xi(Vec{1.0, 1.0}, Vec{1.0, 0.0}) == Vec{0.0, 1.0});
  CHECK(code_of([] { krasulina_xi(Vec{1.0, 1.0}, Vec{0.0, 0.0}); }) == Errc::ZeroVector);
}

TEST_CASE("krasulina_xi properties") {
  Rng rng = make_rng(1, RngStream::Replicate);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  for (std::size_t d : {2u, 10u, 50u}) {
    for (int i = 0; i < 10000; ++i) {
      const Vec x = random_vec(d, rng, scale(rng));
      const Vec v = random_vec(d, rng, scale(rng));
      const Vec xi = krasulina_xi(x, v);
      const double xi_norm = norm(xi);
      REQUIRE(std::abs(dot(xi, v)) <= 1e-9 * xi_norm * norm(v));
      REQUIRE(xi_norm <= squared_norm(x) * norm(v));

      const double s = scale(rng);
      Vec sv = v;
      for (double& e : sv) e *= s;
      const Vec scaled = krasulina_xi(x, sv);
      // Rounding scales with the unreduced terms, ||x||^2 ||v||.
      const double magnitude = s * squared_norm(x) * norm(v);
      for (std::size_t k = 0; k < d; ++k) {
        REQUIRE(std::abs(scaled[k] - s * xi[k]) <= 1e-12 * magnitude);
      }
    }
  }
}

TEST_CASE("krasulina_step_min hand example") {
  const ScheduleParams schedule;  // gamma_{n+1} = 1/(n+1) = 0.5 at n = 1
  const auto [next, diag] =
      krasulina_step_min(make_state({1.0, 0.0}, Scheme::KrasulinaMin), Vec{1.0, 1.0}, schedule);
  CHECK(diag.gamma_used == 0.5);
  CHECK(diag.xi == Vec{0.0, 1.0});
  CHECK(diag.xi_norm == 1.0);
  CHECK(next.v == Vec{1.0, -0.5});
  CHECK(squared_norm(next.v) == 1.25);
  CHECK(next.step == 2);
}

TEST_CASE("krasulina_step_max hand example") {
  const auto [next, diag] = krasulina_step_max(make_state({1.0, 0.0}, Scheme::KrasulinaMax),
                                               Vec{1.0, 1.0}, ScheduleParams{});
  CHECK(next.v == Vec{1.0, 0.5});
  CHECK(squared_norm(next.v) == 1.25);
}

TEST_CASE("krasulina steps are no-ops for orthogonal samples") {
  for (Scheme scheme : {Scheme::KrasulinaMin, Scheme::KrasulinaMax}) {
    const EstimatorState before = make_state({0.0, 2.0, 0.0}, scheme, 5);
    const EstimatorState after = advance(before, Vec{3.0, 0.0, -1.0}, ScheduleParams{});
    CHECK(after.v == before.v);
    CHECK(after.step == 6);
  }
}

TEST_CASE("krasulina norm recursion and orthogonality along trajectories") {
  Rng rng = make_rng(2, RngStream::Replicate);
  ScheduleParams schedule;
  schedule.c = 3.0;
  for (Scheme scheme : {Scheme::KrasulinaMin, Scheme::KrasulinaMax}) {
    for (std::size_t d : {2u, 10u, 50u}) {
      EstimatorState state = init_state(d, scheme, rng);
      for (int i = 0; i < 3000; ++i) {
        const Vec x = random_vec(d, rng);
        const Vec v_before = state.v;
        const double before = squared_norm(state.v);
        auto [next, diag] = scheme == Scheme::KrasulinaMin
                                ? krasulina_step_min(std::move(state), x, schedule)
                                : krasulina_step_max(std::move(state), x, schedule);
        const double g = diag.gamma_used;
        const double expected = before + g * g * diag.xi_norm * diag.xi_norm;
        REQUIRE(std::abs(squared_norm(next.v) - expected) <= 1e-10 * expected);
        REQUIRE(std::abs(dot(diag.xi, v_before)) <= 1e-9 * diag.xi_norm * norm(v_before));
        REQUIRE(squared_norm(next.v) >= before);
        state = std::move(next);
      }
    }
  }
}

TEST_CASE("krasulina step errors") {
  const ScheduleParams schedule;
  CHECK(code_of([&] {
          krasulina_step_min(make_state({0.0, 0.0}, Scheme::KrasulinaMin), Vec{1.0, 1.0},
                             schedule);
        }) == Errc::ZeroVector);
  CHECK(code_of([&] {
          krasulina_step_min(make_state({1.0, 0.0}, Scheme::KrasulinaMin),
                             Vec{std::numeric_limits<double>::infinity(), 1.0}, schedule);
        }) == Errc::InvalidSample);
  CHECK(code_of([&] {
          krasulina_step_max(make_state({1.0, 0.0}, Scheme::KrasulinaMin), Vec{1.0, 1.0},
                             schedule);
        }) == Errc::SchemeMismatch);
  CHECK(code_of([&] {
          krasulina_step_min(make_state({1.0, 0.0}, Scheme::KrasulinaMin), Vec{1.0}, schedule);
        }) == Errc::DimensionMismatch);
}

TEST_CASE("oja_step") {
  ScheduleParams schedule;
  schedule.c = 2.0;  // gamma_2 = 1
  const EstimatorState next =
      oja_step(make_state({1.0, 0.0}, Scheme::Oja), Vec{1.0, 1.0}, schedule);
  const double r5 = std::sqrt(5.0);
  CHECK(next.v[0] == doctest::Approx(2.0 / r5).epsilon(1e-15));
  CHECK(next.v[1] == doctest::Approx(1.0 / r5).epsilon(1e-15));

  const EstimatorState same = oja_step(make_state({1.0, 0.0}, Scheme::Oja), Vec{0.0, 4.0}, schedule);
  CHECK(same.v == Vec{1.0, 0.0});

  Rng rng = make_rng(4, RngStream::Replicate);
  EstimatorState state = init_state(7, Scheme::Oja, rng);
  for (int i = 0; i < 1000; ++i) {
    state = oja_step(std::move(state), random_vec(7, rng, 3.0), ScheduleParams{});
    REQUIRE(std::abs(norm(state.v) - 1.0) <= 1e-12);
  }
}

TEST_CASE("ccipca_step coefficient arithmetic") {
  const EstimatorState next =
      ccipca_step(make_state({1.0, 0.0}, Scheme::Ccipca, 4, 2.0), Vec{1.0, 0.0});
  CHECK(next.v[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(next.v[1] == 0.0);
  CHECK(next.step == 5);

  // Orthogonal sample: pure shrink by (n-1-l)/n = (10-1-2)/10.
  const EstimatorState shrink =
      ccipca_step(make_state({2.0, 0.0}, Scheme::Ccipca, 10, 2.0), Vec{0.0, 5.0});
  CHECK(shrink.v[0] == doctest::Approx(2.0 * 0.7).epsilon(1e-15));
  CHECK(shrink.v[1] == 0.0);

  // Early steps clamp the retention coefficient at zero.
  const EstimatorState early =
      ccipca_step(make_state({1.0, 0.0}, Scheme::Ccipca, 1, 2.0), Vec{1.0, 1.0});
  CHECK(early.v == Vec{3.0, 3.0});
}

TEST_CASE("ccipca with l = 0 fixes an eigenvector") {
  const Vec theta{0.6, 0.0, 0.8};
  EstimatorState state = make_state(theta, Scheme::Ccipca, 1, 0.0);
  for (int i = 0; i < 1000; ++i) state = ccipca_step(std::move(state), theta);
  for (std::size_t k = 0; k < 3; ++k) CHECK(state.v[k] == doctest::Approx(theta[k]).epsilon(1e-12));

  CHECK(code_of([] { ccipca_step(make_state({0.0, 0.0}, Scheme::Ccipca), Vec{1.0, 0.0}); }) ==
        Errc::ZeroVector);
}

TEST_CASE("gamma_at and schedule admissibility") {
  ScheduleParams schedule;
  CHECK(gamma_at(schedule, 4) == 0.25);

  double partial = 0.0;
  for (int n = 1; n <= 100000; ++n) {
    const double g = gamma_at(schedule, n);
    partial += g * g;
    REQUIRE(partial < std::numbers::pi * std::numbers::pi / 6.0);
  }

  ScheduleParams offset{2.0, 0.75, 10};
  CHECK(gamma_at(offset, 6) == doctest::Approx(2.0 / std::pow(16.0, 0.75)).epsilon(1e-15));

  for (double alpha : {0.4, 0.5, 1.01}) {
    ScheduleParams bad;
    bad.alpha = alpha;
    CHECK_FALSE(bad.admissible());
    CHECK(code_of([&] { gamma_at(bad, 1); }) == Errc::InadmissibleSchedule);
  }
  ScheduleParams negative_c;
  negative_c.c = -1.0;
  CHECK(code_of([&] { validate_schedule(negative_c); }) == Errc::InadmissibleSchedule);
  CHECK(code_of([&] { gamma_at(schedule, 0); }) == Errc::InadmissibleSchedule);
}

TEST_CASE("init_state") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng = make_rng(seed, RngStream::Replicate);
    const EstimatorState s = init_state(10, Scheme::KrasulinaMax, rng, 3.0);
    CHECK(std::abs(norm(s.v) - 1.0) <= 1e-12);
    CHECK(s.step == 1);
    CHECK(s.amnesic_l == 3.0);

    Rng again = make_rng(seed, RngStream::Replicate);
    CHECK(init_state(10, Scheme::KrasulinaMax, again, 3.0).v == s.v);
  }
  Rng rng = make_rng(0, RngStream::Replicate);
  CHECK(std::abs(init_state(1, Scheme::Oja, rng).v[0]) == 1.0);
}

TEST_CASE("eigenvalue_estimate_single") {
  CHECK(eigenvalue_estimate_single(Vec{3.0, 0.0}, Vec{1.0, 0.0}) == 9.0);
  CHECK(eigenvalue_estimate_single(Vec{0.0, 3.0}, Vec{1.0, 0.0}) == 0.0);
  CHECK(eigenvalue_estimate_single(Vec{1.0, 0.0}, Vec{1.0, 1.0}) == doctest::Approx(0.5));
  CHECK(code_of([] { eigenvalue_estimate_single(Vec{1.0}, Vec{0.0}); }) == Errc::ZeroVector);

  // Unbiased for the eigenvalue along each eigenvector.
  const Vec spectrum{0.2, 0.5, 1.0, 4.0};
  const CovarianceModel model = make_covariance(spectrum, 12);
  Rng rng = make_rng(12, RngStream::Replicate);
  const int n = 10000;
  for (std::size_t j = 0; j < spectrum.size(); ++j) {
    const Vec theta = model.eigenvector(j);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double e = eigenvalue_estimate_single(sample_gaussian(model, rng), theta);
      sum += e;
      sum_sq += e * e;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum_sq / n - mean * mean) / (n - 1));
    CHECK(std::abs(mean - spectrum[j]) <= 3.0 * se);
  }
}
