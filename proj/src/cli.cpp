#include "streampca/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "streampca/error.hpp"

namespace streampca::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void bad_config(const std::string& message) {
  throw Error(Errc::InvalidConfig, message);
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "scheme",   "variant",    "d",         "spectrum", "c",
      "alpha",    "n0",         "amnesic_l", "n_total",  "replicates",
      "checkpoints", "seed",    "source",    "csv_path", "literal_singular_values"};
  return keys;
}

double get_number(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (!v.is_number()) bad_config(std::string(key) + " must be a number");
  return v.get<double>();
}

std::int64_t get_integer(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (!v.is_number_integer()) bad_config(std::string(key) + " must be an integer");
  return v.get<std::int64_t>();
}

std::string get_string(const json& doc, const char* key) {
  const json& v = doc.at(key);
  if (!v.is_string()) bad_config(std::string(key) + " must be a string");
  return v.get<std::string>();
}

Method parse_method(const std::string& s) {
  if (s == "krasulina") return Method::Krasulina;
  if (s == "oja") return Method::Oja;
  if (s == "ccipca") return Method::Ccipca;
  bad_config("unknown scheme '" + s + "' (expected krasulina, oja or ccipca)");
}

Target parse_variant(const std::string& s) {
  if (s == "smallest") return Target::Smallest;
  if (s == "largest") return Target::Largest;
  bad_config("unknown variant '" + s + "' (expected smallest or largest)");
}

SourceKind parse_source(const std::string& s) {
  if (s == "gaussian") return SourceKind::Gaussian;
  if (s == "fixed") return SourceKind::FixedDataset;
  if (s == "csv") return SourceKind::Csv;
  bad_config("unknown source '" + s + "' (expected gaussian, fixed or csv)");
}

void set_spectrum(ExperimentConfig& config, const json& value) {
  if (value.is_string()) {
    const std::string name = value.get<std::string>();
    auto preset = spectrum_preset(name);
    if (!preset) bad_config("unknown spectrum preset '" + name + "'");
    config.spectrum = std::move(*preset);
    config.spectrum_preset = name;
    return;
  }
  if (!value.is_array()) bad_config("spectrum must be an array of numbers or a preset name");
  config.spectrum.clear();
  config.spectrum_preset.clear();
  for (const json& x : value) {
    if (!x.is_number()) bad_config("spectrum entries must be numbers");
    config.spectrum.push_back(x.get<double>());
  }
}

}  // namespace

ExperimentConfig config_from_json(const json& doc) {
  if (!doc.is_object()) bad_config("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!known_keys().count(key)) bad_config("unknown config key '" + key + "'");
  }

  ExperimentConfig config;
  config.n_total = 100000;
  config.replicates = 50;
  if (doc.contains("scheme")) config.method = parse_method(get_string(doc, "scheme"));
  if (doc.contains("variant")) config.variant = parse_variant(get_string(doc, "variant"));
  if (doc.contains("spectrum")) set_spectrum(config, doc.at("spectrum"));
  if (doc.contains("c")) config.schedule.c = get_number(doc, "c");
  if (doc.contains("alpha")) config.schedule.alpha = get_number(doc, "alpha");
  if (doc.contains("n0")) config.schedule.n0 = get_integer(doc, "n0");
  if (doc.contains("amnesic_l")) config.amnesic_l = get_number(doc, "amnesic_l");
  if (doc.contains("n_total")) config.n_total = get_integer(doc, "n_total");
  if (doc.contains("replicates")) {
    const auto r = get_integer(doc, "replicates");
    if (r < 1 || r > 1'000'000) bad_config("replicates must be in [1, 10^6]");
    config.replicates = static_cast<int>(r);
  }
  if (doc.contains("seed")) {
    const json& v = doc.at("seed");
    if (!v.is_number_unsigned()) bad_config("seed must be a non-negative integer");
    config.seed = v.get<std::uint64_t>();
  }
  if (doc.contains("checkpoints")) {
    const json& v = doc.at("checkpoints");
    if (!v.is_array()) bad_config("checkpoints must be an array of integers");
    for (const json& n : v) {
      if (!n.is_number_integer()) bad_config("checkpoints must be integers");
      config.checkpoints.push_back(n.get<std::int64_t>());
    }
  }
  if (doc.contains("source")) config.source = parse_source(get_string(doc, "source"));
  if (doc.contains("csv_path")) config.csv_path = get_string(doc, "csv_path");
  if (doc.contains("literal_singular_values")) {
    const json& v = doc.at("literal_singular_values");
    if (!v.is_boolean()) bad_config("literal_singular_values must be a boolean");
    config.literal_singular_values = v.get<bool>();
  }

  if (config.source != SourceKind::Csv && config.spectrum.empty()) {
    bad_config("spectrum is required unless source is csv");
  }
  if (doc.contains("d")) {
    const auto d = get_integer(doc, "d");
    if (config.source != SourceKind::Csv && d != static_cast<std::int64_t>(config.spectrum.size())) {
      bad_config("d = " + std::to_string(d) + " does not match the spectrum length " +
                 std::to_string(config.spectrum.size()));
    }
  }
  validate_config(config);
  return config;
}

namespace {

json read_config_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) bad_config("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    bad_config(path.string() + ": " + e.what());
  }
  if (!doc.is_object()) bad_config("config must be a JSON object");
  return doc;
}

}  // namespace

ExperimentConfig load_config(const fs::path& path) {
  return config_from_json(read_config_json(path));
}

json config_to_json(const ExperimentConfig& config) {
  json doc;
  doc["scheme"] = std::string(to_string(config.method));
  doc["variant"] = std::string(to_string(config.variant));
  doc["source"] = std::string(to_string(config.source));
  if (config.source == SourceKind::Csv) {
    doc["csv_path"] = config.csv_path.string();
  } else {
    doc["d"] = config.spectrum.size();
    if (!config.spectrum_preset.empty()) {
      doc["spectrum"] = config.spectrum_preset;
    } else {
      doc["spectrum"] = config.spectrum;
    }
  }
  doc["c"] = config.schedule.c;
  doc["alpha"] = config.schedule.alpha;
  doc["n0"] = config.schedule.n0;
  doc["amnesic_l"] = config.amnesic_l;
  doc["n_total"] = config.n_total;
  doc["replicates"] = config.replicates;
  doc["seed"] = config.seed;
  if (!config.checkpoints.empty()) doc["checkpoints"] = config.checkpoints;
  if (config.literal_singular_values) doc["literal_singular_values"] = true;
  return doc;
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_curves_csv(const fs::path& path, const ExperimentConfig& config,
                      const ExperimentResult& result) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  out << "scheme,variant,n,mean_align_loss,stderr_align,mean_eig_err,stderr_eig,bound\n";
  const std::string prefix =
      std::string(to_string(config.method)) + "," + std::string(to_string(config.variant)) + ",";
  for (const CurvePoint& p : result.curve) {
    out << prefix << p.n << ',' << format_double(p.mean_alignment_loss) << ','
        << format_double(p.stderr_align) << ',' << format_double(p.mean_eigenvalue_error) << ','
        << format_double(p.stderr_eig) << ',' << format_double(p.bound) << '\n';
  }
  out.flush();
  if (!out) throw Error(Errc::IoError, "write failure on " + path.string());
}

namespace {

json fit_json(const std::optional<RateFit>& fit) {
  if (!fit) return nullptr;
  return json{{"slope", fit->slope},
              {"intercept", fit->intercept},
              {"r_squared", fit->r_squared},
              {"points_used", fit->points_used},
              {"points_dropped", fit->points_dropped}};
}

}  // namespace

json summary_json(const ExperimentConfig& config, const ExperimentResult& result) {
  json doc;
  doc["config"] = config_to_json(config);
  doc["seed"] = config.seed;
  doc["model"] = {{"eigenvalues", result.model.eigenvalues},
                  {"gap", target_gap(result.model, config.variant)},
                  {"fourth_moment", result.moment}};
  doc["fits"] = {{"alignment", fit_json(result.alignment_fit)},
                 {"eigenvalue", fit_json(result.eigenvalue_fit)},
                 {"rayleigh", fit_json(result.rayleigh_fit)}};
  if (!result.curve.empty()) {
    const CurvePoint& last = result.curve.back();
    doc["final"] = {{"n", last.n},
                    {"mean_align_loss", last.mean_alignment_loss},
                    {"stderr_align", last.stderr_align},
                    {"mean_eig_err", last.mean_eigenvalue_error},
                    {"stderr_eig", last.stderr_eig},
                    {"mean_eig_estimate", last.mean_eigenvalue_estimate},
                    {"mean_rayleigh_err", last.mean_rayleigh_error},
                    {"stderr_rayleigh", last.stderr_rayleigh},
                    {"align_bound", last.bound},
                    {"eig_bound", last.eigenvalue_bound}};
  }
  json diag = json::array();
  for (const CurvePoint& p : result.curve) {
    diag.push_back({{"n", p.n},
                    {"mean_rayleigh_err", p.mean_rayleigh_error},
                    {"stderr_rayleigh", p.stderr_rayleigh},
                    {"mean_eig_estimate", p.mean_eigenvalue_estimate},
                    {"eig_bound", p.eigenvalue_bound}});
  }
  doc["diagnostics"] = std::move(diag);
  return doc;
}

int threads_from_env() {
  const char* raw = std::getenv(kThreadsEnv);
  if (raw == nullptr || *raw == '\0') return 0;
  char* end = nullptr;
  const long value = std::strtol(raw, &end, 10);
  if (*end != '\0' || value < 1 || value > 4096) {
    bad_config(std::string(kThreadsEnv) + " must be a positive integer, got '" + raw + "'");
  }
  return static_cast<int>(value);
}

int exit_code_for(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidConfig:
    case Errc::InvalidSpectrum:
    case Errc::InadmissibleSchedule:
    case Errc::DegenerateGap:
    case Errc::InsufficientSamples:
      return kExitUsage;
    default:
      return kExitRuntime;
  }
}

// ---------------------------------------------------------------- commands

namespace {

struct Overrides {
  std::optional<int> replicates;
  std::optional<std::int64_t> n_total;
  std::optional<std::uint64_t> seed;
  std::optional<double> c;
  std::optional<double> alpha;
  std::optional<std::int64_t> n0;
  std::optional<std::string> scheme;
  std::optional<std::string> variant;
  std::optional<std::string> source;
  std::optional<std::string> csv;

  void attach(CLI::App& app) {
    app.add_option("--replicates", replicates, "Number of independent replicates");
    app.add_option("--n-total", n_total, "Samples streamed per replicate");
    app.add_option("--seed", seed, "Base seed");
    app.add_option("--c", c, "Learning-rate constant c");
    app.add_option("--alpha", alpha, "Learning-rate decay exponent");
    app.add_option("--n0", n0, "Learning-rate offset");
    app.add_option("--scheme", scheme, "krasulina | oja | ccipca");
    app.add_option("--variant", variant, "smallest | largest");
    app.add_option("--source", source, "gaussian | fixed | csv");
    app.add_option("--csv", csv, "CSV sample file (implies --source csv)");
  }

  ExperimentConfig apply(const fs::path& path) const {
    json doc = read_config_json(path);
    if (replicates) doc["replicates"] = *replicates;
    if (n_total) doc["n_total"] = *n_total;
    if (seed) doc["seed"] = *seed;
    if (c) doc["c"] = *c;
    if (alpha) doc["alpha"] = *alpha;
    if (n0) doc["n0"] = *n0;
    if (scheme) doc["scheme"] = *scheme;
    if (variant) doc["variant"] = *variant;
    if (source) doc["source"] = *source;
    if (csv) {
      doc["csv_path"] = *csv;
      doc["source"] = "csv";
    }
    ExperimentConfig config = config_from_json(doc);
    config.threads = threads_from_env();
    return config;
  }
};

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  out << doc.dump(2) << '\n';
  out.flush();
  if (!out) throw Error(Errc::IoError, "write failure on " + path.string());
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + dir.string() + ": " + ec.message());
}

std::string describe_fit(const std::optional<RateFit>& fit) {
  if (!fit) return "n/a";
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << fit->slope << " (r2 " << fit->r_squared << ")";
  return s.str();
}

int cmd_run(const fs::path& config_path, const fs::path& out_dir, const Overrides& overrides,
            std::ostream& out) {
  const ExperimentConfig config = overrides.apply(config_path);
  const ExperimentResult result = run_experiment(config);
  ensure_directory(out_dir);
  write_curves_csv(out_dir / "curves.csv", config, result);
  write_json(out_dir / "summary.json", summary_json(config, result));
  out << "wrote " << (out_dir / "curves.csv").string() << " (" << result.curve.size()
      << " checkpoints)\n"
      << "alignment slope " << describe_fit(result.alignment_fit) << ", eigenvalue slope "
      << describe_fit(result.eigenvalue_fit) << ", rayleigh slope "
      << describe_fit(result.rayleigh_fit) << '\n';
  return kExitOk;
}

std::string fit_field(const std::optional<RateFit>& fit, double RateFit::*member) {
  return fit ? format_double((*fit).*member) : std::string("nan");
}

int cmd_sweep_c(const fs::path& config_path, std::vector<double> grid, const fs::path& out_dir,
                const Overrides& overrides, std::ostream& out) {
  if (grid.empty()) bad_config("--c-grid must not be empty");
  for (double c : grid) {
    if (!(c > 0.0) || !std::isfinite(c)) bad_config("--c-grid values must be positive");
  }
  std::sort(grid.begin(), grid.end());
  const ExperimentConfig base = overrides.apply(config_path);

  std::ostringstream rows;
  rows << "c,n,final_align_loss,final_eig_err,final_rayleigh_err,align_slope,align_r2,"
          "eig_slope,eig_r2,rayleigh_slope,rayleigh_r2\n";
  for (double c : grid) {
    ExperimentConfig config = base;
    config.schedule.c = c;
    const ExperimentResult result = run_experiment(config);
    const CurvePoint& last = result.curve.back();
    rows << format_double(c) << ',' << last.n << ',' << format_double(last.mean_alignment_loss)
         << ',' << format_double(last.mean_eigenvalue_error) << ','
         << format_double(last.mean_rayleigh_error) << ','
         << fit_field(result.alignment_fit, &RateFit::slope) << ','
         << fit_field(result.alignment_fit, &RateFit::r_squared) << ','
         << fit_field(result.eigenvalue_fit, &RateFit::slope) << ','
         << fit_field(result.eigenvalue_fit, &RateFit::r_squared) << ','
         << fit_field(result.rayleigh_fit, &RateFit::slope) << ','
         << fit_field(result.rayleigh_fit, &RateFit::r_squared) << '\n';
    out << "c=" << format_double(c) << " final alignment loss "
        << format_double(last.mean_alignment_loss) << ", slope "
        << describe_fit(result.alignment_fit) << '\n';
  }

  ensure_directory(out_dir);
  const fs::path path = out_dir / "sweep.csv";
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  file << rows.str();
  file.flush();
  if (!file) throw Error(Errc::IoError, "write failure on " + path.string());
  return kExitOk;
}

struct OracleTrial {
  double residual = 0.0;        // max_j ||M q_j - lambda_j q_j|| / (1 + |lambda_j|)
  double reconstruction = 0.0;  // ||Q diag(lambda) Q^T - M||_F / ||M||_F
  double orthogonality = 0.0;   // max |Q^T Q - I|
  bool sorted = true;
};

OracleTrial check_random_symmetric(std::size_t d, std::uint64_t seed) {
  Rng rng = make_rng(seed, RngStream::Oracle);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  SymMat m(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) m.set(i, j, uniform(rng));

  const Spectrum s = sym_eigen(m);
  OracleTrial t;
  for (std::size_t j = 0; j < d; ++j) {
    const Vec q = s.vector(j);
    Vec r = m.apply(q);
    for (std::size_t i = 0; i < d; ++i) r[i] -= s.eigenvalues[j] * q[i];
    t.residual = std::max(t.residual, norm(r) / (1.0 + std::abs(s.eigenvalues[j])));
    if (j > 0 && s.eigenvalues[j] < s.eigenvalues[j - 1]) t.sorted = false;
  }
  double err = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      double rec = 0.0;
      double gram = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        rec += s.eigenvectors(i, j) * s.eigenvalues[j] * s.eigenvectors(k, j);
        gram += s.eigenvectors(j, i) * s.eigenvectors(j, k);
      }
      err += (rec - m(i, k)) * (rec - m(i, k));
      t.orthogonality = std::max(t.orthogonality, std::abs(gram - (i == k ? 1.0 : 0.0)));
    }
  }
  const double scale = m.frobenius_norm();
  t.reconstruction = scale > 0.0 ? std::sqrt(err) / scale : std::sqrt(err);
  return t;
}

int cmd_oracle_check(int d, int trials, std::uint64_t seed, std::ostream& out,
                     std::ostream& err) {
  if (d < 2) bad_config("--d must be >= 2");
  if (trials < 1) bad_config("--trials must be >= 1");

  out << std::left << std::setw(8) << "trial" << std::setw(22) << "seed" << std::setw(14)
      << "residual" << std::setw(14) << "reconstr" << std::setw(14) << "orthog"
      << "status\n";
  int failures = 0;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t trial_seed = seed + static_cast<std::uint64_t>(t);
    const OracleTrial r = check_random_symmetric(static_cast<std::size_t>(d), trial_seed);
    const bool ok =
        r.sorted && r.residual <= 1e-10 && r.reconstruction <= 1e-9 && r.orthogonality <= 1e-10;
    if (!ok) {
      ++failures;
      err << "oracle-check failed for seed " << trial_seed << '\n';
    }
    out << std::setw(8) << t << std::setw(22) << trial_seed << std::scientific
        << std::setprecision(2) << std::setw(14) << r.residual << std::setw(14)
        << r.reconstruction << std::setw(14) << r.orthogonality << std::defaultfloat
        << (ok ? "pass" : "FAIL") << '\n';
  }
  out << (failures == 0 ? "all " + std::to_string(trials) + " trials passed"
                        : std::to_string(failures) + " of " + std::to_string(trials) +
                              " trials failed")
      << " (d=" << d << ")\n";
  return failures == 0 ? kExitOk : kExitRuntime;
}

int cmd_gen_data(const std::optional<std::string>& preset, const std::vector<double>& spectrum,
                 std::int64_t n, std::uint64_t seed, const fs::path& out_path, bool literal,
                 std::ostream& out) {
  Vec lambdas;
  if (preset) {
    auto values = spectrum_preset(*preset);
    if (!values) bad_config("unknown preset '" + *preset + "'");
    lambdas = std::move(*values);
  } else {
    lambdas = spectrum;
  }
  if (lambdas.empty()) bad_config("either --preset or --spectrum is required");
  validate_spectrum(lambdas);
  if (n < static_cast<std::int64_t>(lambdas.size())) {
    throw Error(Errc::InsufficientSamples, "--n must be >= d");
  }

  const CovarianceModel model = make_covariance(lambdas, seed);
  DatasetOptions options;
  options.literal_singular_values = literal;
  const Matrix x = build_fixed_dataset(model, static_cast<std::size_t>(n), seed, options);

  if (out_path.has_parent_path()) ensure_directory(out_path.parent_path());
  write_csv(out_path, x);

  Vec covariance_eigenvalues = model.eigenvalues;
  if (literal) {
    for (double& l : covariance_eigenvalues) l *= l;
  }
  json vectors = json::array();
  for (std::size_t j = 0; j < model.dim(); ++j) vectors.push_back(model.eigenvector(j));
  json truth = {{"d", model.dim()},
                {"n", n},
                {"seed", seed},
                {"spectrum", model.eigenvalues},
                {"literal_singular_values", literal},
                {"eigenvalues", covariance_eigenvalues},
                {"eigenvectors", vectors}};
  if (preset) truth["preset"] = *preset;
  const fs::path truth_path = out_path.parent_path() / "truth.json";
  write_json(truth_path, truth);
  out << "wrote " << n << " x " << model.dim() << " dataset to " << out_path.string()
      << " and ground truth to " << truth_path.string() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Streaming PCA estimators and convergence-rate experiments", "streampca"};
  app.require_subcommand(1);

  Overrides run_overrides;
  std::string run_config;
  std::string run_out;
  auto* run = app.add_subcommand("run", "Run a replicated convergence experiment");
  run->add_option("config", run_config, "JSON experiment config")->required();
  run->add_option("--out", run_out, "Output directory")->required();
  run_overrides.attach(*run);

  Overrides sweep_overrides;
  std::string sweep_config;
  std::string sweep_out;
  std::vector<double> c_grid;
  auto* sweep = app.add_subcommand("sweep-c", "Repeat an experiment over learning-rate constants");
  sweep->add_option("config", sweep_config, "JSON experiment config")->required();
  sweep->add_option("--c-grid", c_grid, "Comma separated list of c values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--out", sweep_out, "Output directory")->required();
  sweep_overrides.attach(*sweep);

  int oracle_d = 10;
  int oracle_trials = 100;
  std::uint64_t oracle_seed = 0;
  auto* oracle = app.add_subcommand("oracle-check", "Validate the Jacobi eigensolver");
  oracle->add_option("--d", oracle_d, "Matrix dimension")->capture_default_str();
  oracle->add_option("--trials", oracle_trials, "Number of random matrices")->capture_default_str();
  oracle->add_option("--seed", oracle_seed, "Base seed")->capture_default_str();

  std::optional<std::string> gen_preset;
  std::vector<double> gen_spectrum;
  std::int64_t gen_n = 0;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  bool gen_literal = false;
  auto* gen = app.add_subcommand("gen-data", "Write an SVD-constructed dataset as CSV");
  auto* preset_opt = gen->add_option("--preset", gen_preset, "paper4 | smallest-id");
  auto* spectrum_opt =
      gen->add_option("--spectrum", gen_spectrum, "Ascending eigenvalues")->delimiter(',');
  preset_opt->excludes(spectrum_opt);
  gen->add_option("--n", gen_n, "Number of rows")->required();
  gen->add_option("--seed", gen_seed, "Seed")->capture_default_str();
  gen->add_option("--out", gen_out, "CSV output path")->required();
  gen->add_flag("--literal-singular-values", gen_literal,
                "Use the eigenvalues themselves as singular values");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    if (app.get_subcommands().empty()) err << app.help();
    return kExitUsage;
  }

  try {
    if (*run) return cmd_run(run_config, run_out, run_overrides, out);
    if (*sweep) return cmd_sweep_c(sweep_config, c_grid, sweep_out, sweep_overrides, out);
    if (*oracle) return cmd_oracle_check(oracle_d, oracle_trials, oracle_seed, out, err);
    if (*gen) {
      return cmd_gen_data(gen_preset, gen_spectrum, gen_n, gen_seed, gen_out, gen_literal, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace streampca::cli
