#include "streampca/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "streampca/error.hpp"

namespace streampca {

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::Krasulina: return "krasulina";
    case Method::Oja: return "oja";
    case Method::Ccipca: return "ccipca";
  }
  return "unknown";
}

std::string_view to_string(SourceKind source) noexcept {
  switch (source) {
    case SourceKind::Gaussian: return "gaussian";
    case SourceKind::FixedDataset: return "fixed";
    case SourceKind::Csv: return "csv";
  }
  return "unknown";
}

std::optional<Vec> spectrum_preset(std::string_view name) {
  if (name == "paper4") {
    Vec s(10, 0.9);
    s.back() = 1.0;
    return s;
  }
  if (name == "smallest-id") {
    Vec s(10, 1.0);
    s.front() = 0.5;
    return s;
  }
  return std::nullopt;
}

Scheme scheme_for(Method method, Target variant) {
  switch (method) {
    case Method::Krasulina:
      return variant == Target::Smallest ? Scheme::KrasulinaMin : Scheme::KrasulinaMax;
    case Method::Oja: return Scheme::Oja;
    case Method::Ccipca: return Scheme::Ccipca;
  }
  return Scheme::KrasulinaMin;
}

namespace {

[[noreturn]] void config_error(const std::string& message) {
  throw Error(Errc::InvalidConfig, message);
}

void check_gap(const CovarianceModel& model, Target variant) {
  if (is_degenerate_gap(model, variant)) {
    throw Error(Errc::DegenerateGap, std::string("the ") + std::string(to_string(variant)) +
                                         " eigenvalue is not separated from its neighbour");
  }
}

CovarianceModel model_from_data(const Matrix& x) {
  Spectrum spectrum = sym_eigen(sample_covariance(x));
  for (double& lambda : spectrum.eigenvalues) lambda = std::max(lambda, 0.0);
  return CovarianceModel::from_parts(std::move(spectrum.eigenvalues),
                                     std::move(spectrum.eigenvectors));
}

double mean_fourth_power(const Matrix& x) {
  double acc = 0.0;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double sq = squared_norm(x.row(r));
    acc += sq * sq;
  }
  return acc / static_cast<double>(x.rows());
}

}  // namespace

void validate_config(const ExperimentConfig& config) {
  if (config.replicates < 1) config_error("replicates must be >= 1");
  if (config.n_total < 0) config_error("n_total must be >= 0");
  if (!std::isfinite(config.amnesic_l) || config.amnesic_l < 0.0) {
    config_error("amnesic_l must be finite and >= 0");
  }
  if (config.threads < 0) config_error("threads must be >= 0");
  validate_schedule(config.schedule);
  if (config.method != Method::Krasulina && config.variant == Target::Smallest) {
    config_error(std::string(to_string(config.method)) +
                 " only estimates the top eigenvector; use variant=largest");
  }

  for (std::size_t i = 0; i < config.checkpoints.size(); ++i) {
    const auto n = config.checkpoints[i];
    if (n < 0 || n > config.n_total) config_error("checkpoints must lie in [0, n_total]");
    if (i > 0 && n <= config.checkpoints[i - 1]) {
      config_error("checkpoints must be strictly ascending");
    }
  }

  if (config.source == SourceKind::Csv) {
    if (config.csv_path.empty()) config_error("source=csv requires csv_path");
    return;
  }
  validate_spectrum(config.spectrum);
  const std::size_t d = config.spectrum.size();
  if (d < 2) config_error("dimension must be >= 2");
  if (config.source == SourceKind::FixedDataset &&
      config.n_total < static_cast<std::int64_t>(d)) {
    throw Error(Errc::InsufficientSamples, "source=fixed needs n_total >= d");
  }
  // The gap only depends on the spectrum, so an identity basis will do.
  Vec effective = config.spectrum;
  if (config.source == SourceKind::FixedDataset && config.literal_singular_values) {
    for (double& s : effective) s *= s;
  }
  check_gap(CovarianceModel::from_parts(std::move(effective), Matrix::identity(d)),
            config.variant);
}

std::vector<std::int64_t> default_checkpoints(std::int64_t n_total) {
  if (n_total <= 0) return {0};
  constexpr int kPoints = 30;
  const double lo = n_total >= 100 ? 100.0 : 1.0;
  const double hi = static_cast<double>(n_total);
  std::vector<std::int64_t> grid;
  for (int i = 0; i < kPoints; ++i) {
    const double t = static_cast<double>(i) / (kPoints - 1);
    const auto n = static_cast<std::int64_t>(std::llround(lo * std::pow(hi / lo, t)));
    if (grid.empty() || n > grid.back()) grid.push_back(std::min(n, n_total));
  }
  if (grid.back() != n_total) grid.push_back(n_total);
  return grid;
}

ExperimentContext prepare_experiment(const ExperimentConfig& config) {
  validate_config(config);
  ExperimentContext ctx;
  ctx.config = config;
  ctx.checkpoints =
      config.checkpoints.empty() ? default_checkpoints(config.n_total) : config.checkpoints;

  switch (config.source) {
    case SourceKind::Gaussian: {
      auto model = std::make_shared<const CovarianceModel>(
          make_covariance(config.spectrum, config.seed));
      ctx.moment = fourth_moment_gaussian(*model);
      ctx.model = std::move(model);
      break;
    }
    case SourceKind::FixedDataset: {
      const CovarianceModel base = make_covariance(config.spectrum, config.seed);
      DatasetOptions options;
      options.literal_singular_values = config.literal_singular_values;
      ctx.dataset = std::make_shared<const Matrix>(build_fixed_dataset(
          base, static_cast<std::size_t>(config.n_total), config.seed, options));
      break;
    }
    case SourceKind::Csv: {
      ctx.dataset = std::make_shared<const Matrix>(read_csv(config.csv_path));
      if (ctx.dataset->cols() < 2) config_error("csv data must have at least 2 columns");
      if (static_cast<std::int64_t>(ctx.dataset->rows()) < config.n_total) {
        throw Error(Errc::InsufficientSamples,
                    config.csv_path.string() + " has " + std::to_string(ctx.dataset->rows()) +
                        " rows, n_total is " + std::to_string(config.n_total));
      }
      break;
    }
  }

  // Finite datasets are scored against the eigenpairs of their own sample
  // covariance, whichever way they were produced.
  if (ctx.dataset) {
    auto model = std::make_shared<const CovarianceModel>(model_from_data(*ctx.dataset));
    check_gap(*model, config.variant);
    ctx.moment = mean_fourth_power(*ctx.dataset);
    ctx.model = std::move(model);
  }
  return ctx;
}

ReplicateTrace run_single(const ExperimentContext& context, int replicate_index) {
  const ExperimentConfig& config = context.config;
  const CovarianceModel& model = *context.model;
  const std::size_t d = model.dim();
  const Target variant = config.variant;
  const Vec theta = target_eigenvector(model, variant);
  const double lambda = target_eigenvalue(model, variant);

  Rng rng = make_rng(config.seed + static_cast<std::uint64_t>(replicate_index),
                     RngStream::Replicate);
  EstimatorState state =
      init_state(d, scheme_for(config.method, variant), rng, config.amnesic_l);

  std::unique_ptr<SampleStream> stream;
  if (context.dataset) {
    stream = std::make_unique<MatrixStream>(context.dataset);
  } else {
    stream = std::make_unique<GaussianStream>(context.model, std::move(rng));
  }

  ReplicateTrace trace;
  const auto record = [&](std::int64_t n, const Vec* x) {
    const double mu = rayleigh_quotient(model.sigma, state.v);
    // Before the first sample there is no A_n; fall back to mu(V_1).
    const double estimate = x ? eigenvalue_estimate_single(*x, state.v) : mu;
    trace.n.push_back(n);
    trace.alignment_loss.push_back(alignment_loss(state.v, theta));
    trace.eigenvalue_estimate.push_back(estimate);
    trace.eigenvalue_error.push_back(std::abs(estimate - lambda));
    trace.rayleigh_error.push_back(std::abs(mu - lambda));
    trace.v_norm.push_back(norm(state.v));
  };

  const auto& grid = context.checkpoints;
  std::size_t next = 0;
  if (next < grid.size() && grid[next] == 0) {
    record(0, nullptr);
    ++next;
  }
  const bool krasulina = config.method == Method::Krasulina;
  Vec x(d);
  for (std::int64_t k = 1; k <= config.n_total && next < grid.size(); ++k) {
    if (!stream->next(x)) {
      throw Error(Errc::InsufficientSamples, "sample stream ended at n=" + std::to_string(k));
    }
    state = advance(std::move(state), x, config.schedule);
    if (krasulina) {
      // ||V_n|| only grows; rescaling keeps it finite without moving the direction.
      const double len = norm(state.v);
      if (len > 1e100) {
        for (double& vi : state.v) vi /= len;
      }
    }
    if (k == grid[next]) {
      record(k, &x);
      ++next;
    }
  }
  return trace;
}

ReplicateTrace run_single(const ExperimentConfig& config, int replicate_index) {
  return run_single(prepare_experiment(config), replicate_index);
}

namespace {

void mean_and_stderr(const std::vector<ReplicateTrace>& raw,
                     std::vector<double> ReplicateTrace::*column, std::size_t i, double& mean,
                     double& stderr_out) {
  const double count = static_cast<double>(raw.size());
  double sum = 0.0;
  for (const auto& r : raw) sum += (r.*column)[i];
  mean = sum / count;
  if (raw.size() < 2) {
    stderr_out = 0.0;
    return;
  }
  double ss = 0.0;
  for (const auto& r : raw) {
    const double dev = (r.*column)[i] - mean;
    ss += dev * dev;
  }
  stderr_out = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
}

}  // namespace

std::vector<CurvePoint> aggregate(const std::vector<ReplicateTrace>& raw) {
  if (raw.empty()) throw Error(Errc::InsufficientData, "aggregate of zero replicates");
  const auto& grid = raw.front().n;
  for (const auto& r : raw) {
    if (r.n != grid || r.alignment_loss.size() != grid.size() ||
        r.eigenvalue_error.size() != grid.size() || r.rayleigh_error.size() != grid.size() ||
        r.eigenvalue_estimate.size() != grid.size()) {
      throw Error(Errc::GridMismatch, "replicates do not share a checkpoint grid");
    }
  }

  std::vector<CurvePoint> curve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CurvePoint& p = curve[i];
    p.n = grid[i];
    double unused = 0.0;
    mean_and_stderr(raw, &ReplicateTrace::alignment_loss, i, p.mean_alignment_loss,
                    p.stderr_align);
    mean_and_stderr(raw, &ReplicateTrace::eigenvalue_error, i, p.mean_eigenvalue_error,
                    p.stderr_eig);
    mean_and_stderr(raw, &ReplicateTrace::rayleigh_error, i, p.mean_rayleigh_error,
                    p.stderr_rayleigh);
    mean_and_stderr(raw, &ReplicateTrace::eigenvalue_estimate, i, p.mean_eigenvalue_estimate,
                    unused);
  }
  return curve;
}

namespace {

std::vector<ReplicateTrace> run_replicates(const ExperimentContext& ctx) {
  const int replicates = ctx.config.replicates;
  int threads = ctx.config.threads;
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, replicates);

  std::vector<ReplicateTrace> traces(static_cast<std::size_t>(replicates));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(replicates));
  std::atomic<int> next{0};
  const auto worker = [&] {
    for (int r = next++; r < replicates; r = next++) {
      try {
        traces[static_cast<std::size_t>(r)] = run_single(ctx, r);
      } catch (...) {
        errors[static_cast<std::size_t>(r)] = std::current_exception();
      }
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  // Report the lowest failing replicate so errors are schedule independent.
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return traces;
}

std::optional<RateFit> fit_tail(const std::vector<CurvePoint>& curve, std::int64_t n_total,
                                double CurvePoint::*column) {
  std::vector<RatePoint> points;
  for (const auto& p : curve) {
    if (p.n < 1 || p.n * 100 < n_total) continue;
    points.push_back({static_cast<double>(p.n), p.*column});
  }
  try {
    return fit_rate_slope(points);
  } catch (const Error& e) {
    if (e.code() == Errc::InsufficientData) return std::nullopt;
    throw;
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const ExperimentContext ctx = prepare_experiment(config);
  ExperimentResult result;
  result.curve = aggregate(run_replicates(ctx));
  result.model = *ctx.model;
  result.moment = ctx.moment;

  for (CurvePoint& p : result.curve) {
    const std::int64_t n = std::max<std::int64_t>(p.n, 1);
    p.bound = theoretical_bound(result.model, n, BoundKind::AlignmentLoss, ctx.moment,
                                config.variant);
    p.eigenvalue_bound =
        theoretical_bound(result.model, n, BoundKind::EigenvalueErr, ctx.moment, config.variant);
  }
  result.alignment_fit = fit_tail(result.curve, config.n_total, &CurvePoint::mean_alignment_loss);
  result.eigenvalue_fit =
      fit_tail(result.curve, config.n_total, &CurvePoint::mean_eigenvalue_error);
  result.rayleigh_fit = fit_tail(result.curve, config.n_total, &CurvePoint::mean_rayleigh_error);
  return result;
}

}  // namespace streampca
