#include "streampca/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "streampca/error.hpp"

namespace streampca {

std::string_view to_string(Scheme scheme) noexcept {
  switch (scheme) {
    case Scheme::KrasulinaMin: return "krasulina-min";
    case Scheme::KrasulinaMax: return "krasulina-max";
    case Scheme::Oja: return "oja";
    case Scheme::Ccipca: return "ccipca";
  }
  return "unknown";
}

bool ScheduleParams::admissible() const noexcept {
  return std::isfinite(c) && c > 0.0 && alpha > 0.5 && alpha <= 1.0 && n0 >= 0;
}

void validate_schedule(const ScheduleParams& schedule) {
  if (!schedule.admissible()) {
    throw Error(Errc::InadmissibleSchedule,
                "need c > 0, n0 >= 0 and alpha in (1/2, 1]; got c=" +
                    std::to_string(schedule.c) + " alpha=" + std::to_string(schedule.alpha) +
                    " n0=" + std::to_string(schedule.n0));
  }
}

double gamma_at(const ScheduleParams& schedule, std::int64_t n) {
  validate_schedule(schedule);
  if (n < 1) throw Error(Errc::InadmissibleSchedule, "step index must be >= 1");
  const double base = static_cast<double>(n + schedule.n0);
  return schedule.alpha == 1.0 ? schedule.c / base : schedule.c / std::pow(base, schedule.alpha);
}

namespace {

void check_inputs(const EstimatorState& state, std::span<const double> x, Scheme expected) {
  if (state.scheme != expected) {
    throw Error(Errc::SchemeMismatch, std::string("state is ") +
                                          std::string(to_string(state.scheme)) + ", update is " +
                                          std::string(to_string(expected)));
  }
  if (x.size() != state.v.size()) {
    throw Error(Errc::DimensionMismatch, "sample has dimension " + std::to_string(x.size()) +
                                             ", state has " + std::to_string(state.v.size()));
  }
  if (!all_finite(x)) throw Error(Errc::InvalidSample, "non-finite sample");
}

std::pair<EstimatorState, UpdateDiagnostics> krasulina_step(EstimatorState state,
                                                             std::span<const double> x,
                                                             const ScheduleParams& schedule,
                                                             double sign) {
  UpdateDiagnostics diag;
  diag.gamma_used = gamma_at(schedule, state.step + 1);
  diag.xi = krasulina_xi(x, state.v);
  diag.xi_norm = norm(diag.xi);
  const double step = sign * diag.gamma_used;
  for (std::size_t i = 0; i < state.v.size(); ++i) state.v[i] += step * diag.xi[i];
  ++state.step;
  return {std::move(state), std::move(diag)};
}

}  // namespace

Vec krasulina_xi(std::span<const double> x, std::span<const double> v) {
  if (x.size() != v.size()) throw Error(Errc::DimensionMismatch, "krasulina_xi");
  const double vv = squared_norm(v);
  if (vv == 0.0) throw Error(Errc::ZeroVector, "krasulina_xi with v = 0");
  const double xv = dot(x, v);
  const double ratio = xv / vv;
  // xi = <x,v> W with W = x - (<x,v>/||v||^2) v, W orthogonal to v.
  Vec xi(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) xi[i] = xv * (x[i] - ratio * v[i]);
  return xi;
}

std::pair<EstimatorState, UpdateDiagnostics> krasulina_step_min(
    EstimatorState state, std::span<const double> x, const ScheduleParams& schedule) {
  check_inputs(state, x, Scheme::KrasulinaMin);
  return krasulina_step(std::move(state), x, schedule, -1.0);
}

std::pair<EstimatorState, UpdateDiagnostics> krasulina_step_max(
    EstimatorState state, std::span<const double> x, const ScheduleParams& schedule) {
  check_inputs(state, x, Scheme::KrasulinaMax);
  return krasulina_step(std::move(state), x, schedule, +1.0);
}

EstimatorState oja_step(EstimatorState state, std::span<const double> x,
                        const ScheduleParams& schedule) {
  check_inputs(state, x, Scheme::Oja);
  const double gamma = gamma_at(schedule, state.step + 1);
  const double coeff = gamma * dot(x, state.v);
  for (std::size_t i = 0; i < state.v.size(); ++i) state.v[i] += coeff * x[i];
  const double len = norm(state.v);
  if (!(len >= 1e-300) || !std::isfinite(len)) {
    throw Error(Errc::DegenerateUpdate, "Oja update collapsed to norm " + std::to_string(len));
  }
  for (double& vi : state.v) vi /= len;
  ++state.step;
  return state;
}

EstimatorState ccipca_step(EstimatorState state, std::span<const double> x) {
  check_inputs(state, x, Scheme::Ccipca);
  const double len = norm(state.v);
  if (len == 0.0) throw Error(Errc::ZeroVector, "ccipca_step with v = 0");

  const double n = static_cast<double>(state.step);
  const double l = state.amnesic_l;
  const double keep = std::max(0.0, (n - 1.0 - l) / n);
  const double gain = (1.0 + l) / n * (dot(x, state.v) / len);
  for (std::size_t i = 0; i < state.v.size(); ++i) state.v[i] = keep * state.v[i] + gain * x[i];
  if (squared_norm(state.v) == 0.0) {
    throw Error(Errc::DegenerateUpdate, "CCIPCA update collapsed to the zero vector");
  }
  ++state.step;
  return state;
}

EstimatorState advance(EstimatorState state, std::span<const double> x,
                       const ScheduleParams& schedule) {
  switch (state.scheme) {
    case Scheme::KrasulinaMin: return krasulina_step_min(std::move(state), x, schedule).first;
    case Scheme::KrasulinaMax: return krasulina_step_max(std::move(state), x, schedule).first;
    case Scheme::Oja: return oja_step(std::move(state), x, schedule);
    case Scheme::Ccipca: return ccipca_step(std::move(state), x);
  }
  return state;
}

EstimatorState init_state(std::size_t d, Scheme scheme, Rng& rng, double amnesic_l) {
  if (d == 0) throw Error(Errc::DimensionMismatch, "dimension must be >= 1");
  std::normal_distribution<double> normal;
  EstimatorState state;
  state.scheme = scheme;
  state.amnesic_l = amnesic_l;
  state.v.resize(d);
  double len = 0.0;
  do {
    for (double& vi : state.v) vi = normal(rng);
    len = norm(state.v);
  } while (len == 0.0);
  for (double& vi : state.v) vi /= len;
  return state;
}

double eigenvalue_estimate_single(std::span<const double> x, std::span<const double> v) {
  if (x.size() != v.size()) throw Error(Errc::DimensionMismatch, "eigenvalue_estimate_single");
  const double vv = squared_norm(v);
  if (vv == 0.0) throw Error(Errc::ZeroVector, "eigenvalue_estimate_single with v = 0");
  const double xv = dot(x, v);
  return xv * xv / vv;
}

}  // namespace streampca
