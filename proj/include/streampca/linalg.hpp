#pragma once

// Dense vector / symmetric-matrix primitives and the cyclic Jacobi
// eigensolver used as the offline ground-truth oracle.

#include <cstddef>
#include <span>
#include <vector>

namespace streampca {

using Vec = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> v);
double norm(std::span<const double> v);
bool all_finite(std::span<const double> v);

/// Row-major dense matrix of arbitrary shape.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  static Matrix identity(std::size_t d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  Vec col(std::size_t c) const;

  std::span<const double> data() const noexcept { return data_; }

  Matrix transposed() const;
  Matrix operator*(const Matrix& rhs) const;
  Vec operator*(std::span<const double> v) const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Square symmetric matrix. Every write goes to both triangles, so
/// M(i,j) == M(j,i) holds bit-for-bit.
class SymMat {
 public:
  SymMat() = default;
  explicit SymMat(std::size_t d);

  static SymMat identity(std::size_t d);
  static SymMat diagonal(std::span<const double> diag);
  /// Builds from a square dense matrix; the upper triangle is authoritative.
  static SymMat from_upper(const Matrix& m);

  std::size_t size() const noexcept { return d_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * d_ + j]; }
  void set(std::size_t i, std::size_t j, double value);

  Vec apply(std::span<const double> v) const;
  double frobenius_norm() const;
  Matrix to_dense() const;

  bool operator==(const SymMat&) const = default;

 private:
  std::size_t d_ = 0;
  std::vector<double> data_;
};

/// Eigenpairs sorted ascending; column j of `eigenvectors` pairs with
/// `eigenvalues[j]`. Each eigenvector has its largest-magnitude entry positive.
struct Spectrum {
  Vec eigenvalues;
  Matrix eigenvectors;

  Vec vector(std::size_t j) const { return eigenvectors.col(j); }
};

inline constexpr double kDefaultJacobiTol = 1e-12;
inline constexpr int kMaxJacobiSweeps = 100;

/// Row-cyclic Jacobi. Sweeps until the largest off-diagonal magnitude is at
/// most tol * ||M||_F. Throws InvalidMatrix on non-finite input and
/// NoConvergence after kMaxJacobiSweeps sweeps.
Spectrum sym_eigen(const SymMat& m, double tol = kDefaultJacobiTol);

double operator_norm(const SymMat& m);
double trace(const SymMat& m);

/// <Mv, v> / ||v||^2. Throws ZeroVector for v = 0.
double rayleigh_quotient(const SymMat& m, std::span<const double> v);

}  // namespace streampca
