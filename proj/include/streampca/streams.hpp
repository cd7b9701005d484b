#pragma once

// Ground-truth covariance models, Gaussian sampling, the SVD-built fixed
// dataset, and CSV sample ingestion.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <random>
#include <span>

#include "streampca/linalg.hpp"

namespace streampca {

using Rng = std::mt19937_64;

/// Independent generator families derived from one user seed. Mixing the tag
/// into the seed sequence keeps e.g. the model basis and replicate 0 from
/// sharing a stream when they are given the same seed.
enum class RngStream : std::uint32_t {
  Model = 1,
  Dataset = 2,
  Replicate = 3,
  Oracle = 4,
};

Rng make_rng(std::uint64_t seed, RngStream stream);

/// Sigma = basis * diag(eigenvalues) * basis^T with eigenvalues ascending.
struct CovarianceModel {
  Vec eigenvalues;
  Matrix basis;  // column j is theta_j
  SymMat sigma;
  double gap_min = 0.0;  // lambda_2 - lambda_1
  double gap_max = 0.0;  // lambda_d - lambda_{d-1}

  std::size_t dim() const noexcept { return eigenvalues.size(); }
  Vec eigenvector(std::size_t j) const { return basis.col(j); }

  /// Validates the spectrum and basis and derives sigma and the gaps.
  static CovarianceModel from_parts(Vec eigenvalues, Matrix basis);
};

/// Throws InvalidSpectrum unless the values are non-empty, finite,
/// non-negative and ascending.
void validate_spectrum(std::span<const double> eigenvalues);

CovarianceModel make_covariance(std::span<const double> eigenvalues, std::uint64_t seed);

/// Orthonormalizes the columns of `m` (rows >= cols) with twice-applied
/// modified Gram-Schmidt. The implied R factor has a positive diagonal, which
/// makes the result Haar-distributed when `m` is Gaussian.
Matrix orthonormalize_columns(Matrix m);

Matrix random_orthogonal(std::size_t d, Rng& rng);

/// X = basis * diag(sqrt(lambda)) * z with z ~ N(0, I).
Vec sample_gaussian(const CovarianceModel& model, Rng& rng);
void sample_gaussian(const CovarianceModel& model, Rng& rng, std::span<double> out);

struct DatasetOptions {
  /// Use lambda_j (rather than sqrt(lambda_j)) as singular values, so the
  /// sample covariance has eigenvalues lambda_j^2.
  bool literal_singular_values = false;
};

/// X = sqrt(n) * U * diag(s) * Q^T, with U an n x d matrix of orthonormal
/// columns drawn from `seed` and Q the model basis. With the default options
/// (1/n) X^T X equals the model covariance up to rounding.
Matrix build_fixed_dataset(const CovarianceModel& model, std::size_t n, std::uint64_t seed,
                           DatasetOptions options = {});

/// (1/n) X^T X.
SymMat sample_covariance(const Matrix& x);

class SampleStream {
 public:
  virtual ~SampleStream() = default;

  virtual std::size_t dim() const = 0;
  /// Number of samples for finite streams.
  virtual std::optional<std::size_t> length() const = 0;
  /// Writes the next sample into `out` (size dim()); false once exhausted.
  virtual bool next(std::span<double> out) = 0;
};

class GaussianStream final : public SampleStream {
 public:
  GaussianStream(std::shared_ptr<const CovarianceModel> model, Rng rng)
      : model_(std::move(model)), rng_(std::move(rng)) {}

  std::size_t dim() const override { return model_->dim(); }
  std::optional<std::size_t> length() const override { return std::nullopt; }
  bool next(std::span<double> out) override;

 private:
  std::shared_ptr<const CovarianceModel> model_;
  Rng rng_;
};

/// Serves the rows of a matrix in order.
class MatrixStream final : public SampleStream {
 public:
  explicit MatrixStream(std::shared_ptr<const Matrix> rows) : rows_(std::move(rows)) {}

  std::size_t dim() const override { return rows_->cols(); }
  std::optional<std::size_t> length() const override { return rows_->rows(); }
  bool next(std::span<double> out) override;

  const Matrix& matrix() const { return *rows_; }

 private:
  std::shared_ptr<const Matrix> rows_;
  std::size_t cursor_ = 0;
};

/// Reads a CSV of one observation per row. A first row that does not parse
/// as numbers is treated as a header. Throws IoError, ParseError (with the
/// 1-based line number) or EmptyStream.
Matrix read_csv(const std::filesystem::path& path);

std::unique_ptr<MatrixStream> stream_from_csv(const std::filesystem::path& path);

/// Writes rows with a "x0,x1,..." header and 17 significant digits.
void write_csv(const std::filesystem::path& path, const Matrix& x);

}  // namespace streampca
