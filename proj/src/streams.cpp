#include "streampca/streams.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>

#include "streampca/error.hpp"

namespace streampca {

Rng make_rng(std::uint64_t seed, RngStream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

void validate_spectrum(std::span<const double> eigenvalues) {
  if (eigenvalues.empty()) throw Error(Errc::InvalidSpectrum, "empty spectrum");
  for (std::size_t j = 0; j < eigenvalues.size(); ++j) {
    const double lambda = eigenvalues[j];
    if (!std::isfinite(lambda) || lambda < 0.0) {
      throw Error(Errc::InvalidSpectrum,
                  "eigenvalue " + std::to_string(j) + " must be finite and non-negative");
    }
    if (j > 0 && lambda < eigenvalues[j - 1]) {
      throw Error(Errc::InvalidSpectrum, "eigenvalues must be ascending");
    }
  }
}

CovarianceModel CovarianceModel::from_parts(Vec eigenvalues, Matrix basis) {
  validate_spectrum(eigenvalues);
  const std::size_t d = eigenvalues.size();
  if (basis.rows() != d || basis.cols() != d) {
    throw Error(Errc::DimensionMismatch, "basis must be d x d");
  }
  const Matrix gram = basis.transposed() * basis;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double expected = i == j ? 1.0 : 0.0;
      if (std::abs(gram(i, j) - expected) > 1e-10) {
        throw Error(Errc::InvalidMatrix, "basis is not orthonormal");
      }
    }
  }

  SymMat sigma(d);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = r; c < d; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += basis(r, j) * eigenvalues[j] * basis(c, j);
      sigma.set(r, c, s);
    }
  }

  CovarianceModel model;
  if (d >= 2) {
    model.gap_min = eigenvalues[1] - eigenvalues[0];
    model.gap_max = eigenvalues[d - 1] - eigenvalues[d - 2];
  }
  model.eigenvalues = std::move(eigenvalues);
  model.basis = std::move(basis);
  model.sigma = std::move(sigma);
  return model;
}

CovarianceModel make_covariance(std::span<const double> eigenvalues, std::uint64_t seed) {
  validate_spectrum(eigenvalues);
  Rng rng = make_rng(seed, RngStream::Model);
  Matrix basis = random_orthogonal(eigenvalues.size(), rng);
  return CovarianceModel::from_parts(Vec(eigenvalues.begin(), eigenvalues.end()),
                                     std::move(basis));
}

Matrix orthonormalize_columns(Matrix m) {
  const std::size_t n = m.rows();
  const std::size_t d = m.cols();
  if (n < d) throw Error(Errc::InvalidMatrix, "need rows >= cols to orthonormalize");

  // Work on the transpose so every column is contiguous.
  Matrix cols = m.transposed();
  for (std::size_t j = 0; j < d; ++j) {
    auto cj = cols.row(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        auto ck = cols.row(k);
        const double proj = dot(ck, cj);
        for (std::size_t i = 0; i < n; ++i) cj[i] -= proj * ck[i];
      }
    }
    const double len = norm(cj);
    if (!(len > 0.0) || !std::isfinite(len)) {
      throw Error(Errc::InvalidMatrix, "rank-deficient input to orthonormalize_columns");
    }
    for (double& x : cj) x /= len;
  }
  return cols.transposed();
}

Matrix random_orthogonal(std::size_t d, Rng& rng) {
  std::normal_distribution<double> normal;
  Matrix g(d, d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) g(r, c) = normal(rng);
  return orthonormalize_columns(std::move(g));
}

void sample_gaussian(const CovarianceModel& model, Rng& rng, std::span<double> out) {
  const std::size_t d = model.dim();
  if (out.size() != d) throw Error(Errc::DimensionMismatch, "sample_gaussian output size");
  std::normal_distribution<double> normal;
  // Scaled coordinates in the eigenbasis.
  Vec z(d);
  for (std::size_t j = 0; j < d; ++j) z[j] = std::sqrt(model.eigenvalues[j]) * normal(rng);
  for (std::size_t r = 0; r < d; ++r) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += model.basis(r, j) * z[j];
    out[r] = s;
  }
}

Vec sample_gaussian(const CovarianceModel& model, Rng& rng) {
  Vec x(model.dim());
  sample_gaussian(model, rng, x);
  return x;
}

Matrix build_fixed_dataset(const CovarianceModel& model, std::size_t n, std::uint64_t seed,
                           DatasetOptions options) {
  const std::size_t d = model.dim();
  if (n < d) {
    throw Error(Errc::InsufficientSamples,
                "fixed dataset needs n >= d (n=" + std::to_string(n) +
                    ", d=" + std::to_string(d) + ")");
  }
  Rng rng = make_rng(seed, RngStream::Dataset);
  std::normal_distribution<double> normal;
  Matrix g(n, d);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) g(r, c) = normal(rng);
  const Matrix u = orthonormalize_columns(std::move(g));

  const double root_n = std::sqrt(static_cast<double>(n));
  // W = diag(s) Q^T, so X = sqrt(n) U W.
  Matrix w(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    const double lambda = model.eigenvalues[j];
    const double s = options.literal_singular_values ? lambda : std::sqrt(lambda);
    for (std::size_t c = 0; c < d; ++c) w(j, c) = root_n * s * model.basis(c, j);
  }
  return u * w;
}

SymMat sample_covariance(const Matrix& x) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  if (n == 0) throw Error(Errc::EmptyStream, "sample covariance of zero rows");
  Matrix acc(d, d);
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = x.row(r);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) acc(i, j) += row[i] * row[j];
  }
  SymMat out(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) out.set(i, j, acc(i, j) / static_cast<double>(n));
  return out;
}

bool GaussianStream::next(std::span<double> out) {
  sample_gaussian(*model_, rng_, out);
  return true;
}

bool MatrixStream::next(std::span<double> out) {
  if (cursor_ >= rows_->rows()) return false;
  if (out.size() != rows_->cols()) throw Error(Errc::DimensionMismatch, "MatrixStream::next");
  const auto row = rows_->row(cursor_++);
  std::copy(row.begin(), row.end(), out.begin());
  return true;
}

// ---------------------------------------------------------------- CSV

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size() && std::isfinite(out);
}

// Parses a comma separated row; false if any field is not a finite number.
bool parse_row(std::string_view line, Vec& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::string_view field =
        line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                          : comma - start);
    double value = 0.0;
    if (!parse_double(field, value)) return false;
    out.push_back(value);
    if (comma == std::string_view::npos) return true;
    start = comma + 1;
  }
}

}  // namespace

Matrix read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());

  std::vector<double> values;
  std::size_t width = 0;
  std::size_t rows = 0;
  bool first_content_line = true;
  std::string line;
  Vec row;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (trim(line).empty()) continue;
    const bool ok = parse_row(line, row);
    if (first_content_line) {
      first_content_line = false;
      if (!ok) continue;  // header
    }
    if (!ok) {
      throw Error(Errc::ParseError,
                  path.string() + ": non-numeric field on row " + std::to_string(line_no));
    }
    if (rows == 0) {
      width = row.size();
    } else if (row.size() != width) {
      throw Error(Errc::ParseError, path.string() + ": row " + std::to_string(line_no) +
                                        " has " + std::to_string(row.size()) +
                                        " fields, expected " + std::to_string(width));
    }
    values.insert(values.end(), row.begin(), row.end());
    ++rows;
  }
  if (in.bad()) throw Error(Errc::IoError, "read failure on " + path.string());
  if (rows == 0) throw Error(Errc::EmptyStream, path.string() + " has no data rows");

  Matrix m(rows, width);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < width; ++c) m(r, c) = values[r * width + c];
  return m;
}

std::unique_ptr<MatrixStream> stream_from_csv(const std::filesystem::path& path) {
  return std::make_unique<MatrixStream>(std::make_shared<const Matrix>(read_csv(path)));
}

void write_csv(const std::filesystem::path& path, const Matrix& x) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  for (std::size_t c = 0; c < x.cols(); ++c) out << (c ? ",x" : "x") << c;
  out << '\n';
  char buf[32];
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", x(r, c));
      if (c) out << ',';
      out << buf;
    }
    out << '\n';
  }
  out.flush();
  if (!out) throw Error(Errc::IoError, "write failure on " + path.string());
}

}  // namespace streampca
