#pragma once

// Single-eigenvector streaming update rules and learning-rate schedules.
//
// Every update takes the state by value and returns the successor, so a
// caller that moves its state in pays no allocation per step.

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

#include "streampca/linalg.hpp"
#include "streampca/streams.hpp"

namespace streampca {

enum class Scheme { KrasulinaMin, KrasulinaMax, Oja, Ccipca };

std::string_view to_string(Scheme scheme) noexcept;

/// gamma_n = c / (n + n0)^alpha. Admissible iff c > 0, n0 >= 0 and
/// alpha in (1/2, 1], i.e. sum gamma_n diverges while sum gamma_n^2 converges.
struct ScheduleParams {
  double c = 1.0;
  double alpha = 1.0;
  std::int64_t n0 = 0;

  bool admissible() const noexcept;
};

/// Throws InadmissibleSchedule.
void validate_schedule(const ScheduleParams& schedule);

double gamma_at(const ScheduleParams& schedule, std::int64_t n);

struct EstimatorState {
  Vec v;
  std::int64_t step = 1;  // index n of the current iterate V_n
  Scheme scheme = Scheme::KrasulinaMin;
  double amnesic_l = 0.0;  // CCIPCA only
};

struct UpdateDiagnostics {
  Vec xi;
  double gamma_used = 0.0;
  double xi_norm = 0.0;
};

/// <x,v> x - (<x,v>^2 / ||v||^2) v. Orthogonal to v, norm at most ||x||^2 ||v||.
Vec krasulina_xi(std::span<const double> x, std::span<const double> v);

/// V_{n+1} = V_n - gamma_{n+1} xi_{n+1}; converges to the smallest eigenvector.
std::pair<EstimatorState, UpdateDiagnostics> krasulina_step_min(
    EstimatorState state, std::span<const double> x, const ScheduleParams& schedule);

/// V_{n+1} = V_n + gamma_{n+1} xi_{n+1}; converges to the top eigenvector.
std::pair<EstimatorState, UpdateDiagnostics> krasulina_step_max(
    EstimatorState state, std::span<const double> x, const ScheduleParams& schedule);

/// V_{n+1} = normalize(V_n + gamma_{n+1} <x,V_n> x).
EstimatorState oja_step(EstimatorState state, std::span<const double> x,
                        const ScheduleParams& schedule);

/// Amnesic CCIPCA update with n = state.step:
///   v' = max(0, (n-1-l)/n) v + ((1+l)/n) <x, v/||v||> x.
/// ||v|| tracks the eigenvalue.
EstimatorState ccipca_step(EstimatorState state, std::span<const double> x);

/// Dispatches on state.scheme. CCIPCA ignores the schedule.
EstimatorState advance(EstimatorState state, std::span<const double> x,
                       const ScheduleParams& schedule);

/// Uniform random unit vector, step = 1.
EstimatorState init_state(std::size_t d, Scheme scheme, Rng& rng, double amnesic_l = 0.0);

/// <x,v>^2 / ||v||^2, the Rayleigh quotient of the rank-one A = x x^T.
double eigenvalue_estimate_single(std::span<const double> x, std::span<const double> v);

}  // namespace streampca
