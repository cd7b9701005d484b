#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "streampca/cli.hpp"
#include "streampca/error.hpp"
#include "streampca/estimators.hpp"
#include "streampca/harness.hpp"
#include "streampca/linalg.hpp"
#include "streampca/metrics.hpp"
#include "streampca/streams.hpp"

namespace py = pybind11;
using namespace streampca;

namespace {

using Rows = std::vector<Vec>;

Rows to_rows(const Matrix& m) {
  Rows rows(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows[r].assign(row.begin(), row.end());
  }
  return rows;
}

Rows to_rows(const SymMat& m) { return to_rows(m.to_dense()); }

Matrix from_rows(const Rows& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  Matrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw Error(Errc::DimensionMismatch, "ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

Target parse_target(const std::string& s) {
  if (s == "smallest") return Target::Smallest;
  if (s == "largest") return Target::Largest;
  throw Error(Errc::InvalidConfig, "target must be 'smallest' or 'largest'");
}

BoundKind parse_kind(const std::string& s) {
  if (s == "alignment") return BoundKind::AlignmentLoss;
  if (s == "eigenvalue") return BoundKind::EigenvalueErr;
  throw Error(Errc::InvalidConfig, "kind must be 'alignment' or 'eigenvalue'");
}

py::tuple step_result(const std::pair<EstimatorState, UpdateDiagnostics>& r) {
  return py::make_tuple(r.first, r.second.xi, r.second.gamma_used);
}

// The experiment result as JSON: the CLI summary plus the full curve.
std::string run_experiment_json(const std::string& config_text) {
  const ExperimentConfig config = cli::config_from_json(nlohmann::json::parse(config_text));
  const ExperimentResult result = run_experiment(config);
  nlohmann::json doc = cli::summary_json(config, result);
  nlohmann::json curve = nlohmann::json::array();
  for (const CurvePoint& p : result.curve) {
    curve.push_back({{"n", p.n},
                     {"mean_align_loss", p.mean_alignment_loss},
                     {"stderr_align", p.stderr_align},
                     {"mean_eig_err", p.mean_eigenvalue_error},
                     {"stderr_eig", p.stderr_eig},
                     {"bound", p.bound}});
  }
  doc["curve"] = std::move(curve);
  return doc.dump();
}

}  // namespace

PYBIND11_MODULE(_streampca, m) {
  m.doc() = "Streaming single-eigenvector estimators";

  py::register_exception<Error>(m, "StreamPcaError", PyExc_ValueError);

  m.def(
      "sym_eigen",
      [](const Rows& rows, double tol) {
        const Spectrum s = sym_eigen(SymMat::from_upper(from_rows(rows)), tol);
        Rows vectors;
        for (std::size_t j = 0; j < s.eigenvalues.size(); ++j) vectors.push_back(s.vector(j));
        return py::make_tuple(s.eigenvalues, vectors);
      },
      py::arg("matrix"), py::arg("tol") = 1e-12,
      "Ascending eigenvalues and the matching unit eigenvectors of a symmetric matrix.");

  py::class_<CovarianceModel>(m, "CovarianceModel")
      .def_readonly("eigenvalues", &CovarianceModel::eigenvalues)
      .def_readonly("gap_min", &CovarianceModel::gap_min)
      .def_readonly("gap_max", &CovarianceModel::gap_max)
      .def_property_readonly("dim", &CovarianceModel::dim)
      .def_property_readonly("sigma",
                             [](const CovarianceModel& c) { return to_rows(c.sigma); })
      .def("eigenvector", &CovarianceModel::eigenvector, py::arg("j"));

  m.def(
      "make_covariance",
      [](const Vec& eigenvalues, std::uint64_t seed) { return make_covariance(eigenvalues, seed); },
      py::arg("eigenvalues"), py::arg("seed"));
  m.def(
      "build_fixed_dataset",
      [](const CovarianceModel& model, std::size_t n, std::uint64_t seed, bool literal) {
        DatasetOptions options;
        options.literal_singular_values = literal;
        return to_rows(build_fixed_dataset(model, n, seed, options));
      },
      py::arg("model"), py::arg("n"), py::arg("seed"), py::arg("literal_singular_values") = false);
  m.def(
      "sample_covariance", [](const Rows& x) { return to_rows(sample_covariance(from_rows(x))); },
      py::arg("x"));

  py::class_<ScheduleParams>(m, "Schedule")
      .def(py::init([](double c, double alpha, std::int64_t n0) {
             return ScheduleParams{c, alpha, n0};
           }),
           py::arg("c") = 1.0, py::arg("alpha") = 1.0, py::arg("n0") = 0)
      .def_readwrite("c", &ScheduleParams::c)
      .def_readwrite("alpha", &ScheduleParams::alpha)
      .def_readwrite("n0", &ScheduleParams::n0)
      .def("gamma", &gamma_at, py::arg("n"));

  py::class_<EstimatorState>(m, "State")
      .def(py::init([](Vec v, std::int64_t step, double amnesic_l) {
             EstimatorState s;
             s.v = std::move(v);
             s.step = step;
             s.amnesic_l = amnesic_l;
             return s;
           }),
           py::arg("v"), py::arg("step") = 1, py::arg("amnesic_l") = 0.0)
      .def_readwrite("v", &EstimatorState::v)
      .def_readwrite("step", &EstimatorState::step);

  m.def(
      "krasulina_xi", [](const Vec& x, const Vec& v) { return krasulina_xi(x, v); }, py::arg("x"),
      py::arg("v"));
  m.def(
      "krasulina_step_min",
      [](EstimatorState s, const Vec& x, const ScheduleParams& schedule) {
        s.scheme = Scheme::KrasulinaMin;
        return step_result(krasulina_step_min(std::move(s), x, schedule));
      },
      py::arg("state"), py::arg("x"), py::arg("schedule"),
      "Returns (next_state, xi, gamma).");
  m.def(
      "krasulina_step_max",
      [](EstimatorState s, const Vec& x, const ScheduleParams& schedule) {
        s.scheme = Scheme::KrasulinaMax;
        return step_result(krasulina_step_max(std::move(s), x, schedule));
      },
      py::arg("state"), py::arg("x"), py::arg("schedule"),
      "Returns (next_state, xi, gamma).");
  m.def(
      "oja_step",
      [](EstimatorState s, const Vec& x, const ScheduleParams& schedule) {
        s.scheme = Scheme::Oja;
        return oja_step(std::move(s), x, schedule);
      },
      py::arg("state"), py::arg("x"), py::arg("schedule"));
  m.def(
      "ccipca_step",
      [](EstimatorState s, const Vec& x) {
        s.scheme = Scheme::Ccipca;
        return ccipca_step(std::move(s), x);
      },
      py::arg("state"), py::arg("x"));

  m.def(
      "alignment_loss", [](const Vec& v, const Vec& theta) { return alignment_loss(v, theta); },
      py::arg("v"), py::arg("theta"));
  m.def(
      "f_value", [](const CovarianceModel& model, const Vec& v) { return f_value(model, v); },
      py::arg("model"), py::arg("v"));
  m.def("fourth_moment_gaussian", &fourth_moment_gaussian, py::arg("model"));
  m.def(
      "theoretical_bound",
      [](const CovarianceModel& model, std::int64_t n, double moment, const std::string& kind,
         const std::string& which) {
        return theoretical_bound(model, n, parse_kind(kind), moment, parse_target(which));
      },
      py::arg("model"), py::arg("n"), py::arg("moment"), py::arg("kind") = "alignment",
      py::arg("which") = "smallest");
  m.def(
      "fit_rate_slope",
      [](const Vec& n, const Vec& loss) {
        if (n.size() != loss.size()) throw Error(Errc::DimensionMismatch, "n and loss differ");
        std::vector<RatePoint> points;
        for (std::size_t i = 0; i < n.size(); ++i) points.push_back({n[i], loss[i]});
        const RateFit f = fit_rate_slope(points);
        py::dict out;
        out["slope"] = f.slope;
        out["intercept"] = f.intercept;
        out["r_squared"] = f.r_squared;
        out["points_used"] = f.points_used;
        out["points_dropped"] = f.points_dropped;
        return out;
      },
      py::arg("n"), py::arg("loss"));

  m.def("_run_experiment_json", &run_experiment_json, py::arg("config_json"));
}
