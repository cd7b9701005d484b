#include "streampca/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "streampca/error.hpp"

namespace streampca {

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* where) {
  if (a != b) {
    throw Error(Errc::DimensionMismatch, std::string(where) + ": sizes " +
                                             std::to_string(a) + " and " +
                                             std::to_string(b));
  }
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

double norm(std::span<const double> v) { return std::sqrt(squared_norm(v)); }

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// ---------------------------------------------------------------- Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::identity(std::size_t d) {
  Matrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0;
  return m;
}

Vec Matrix::col(std::size_t c) const {
  Vec out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  require_same_size(cols_, rhs.rows_, "Matrix product");
  Matrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const double a = (*this)(i, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
    }
  }
  return out;
}

Vec Matrix::operator*(std::span<const double> v) const {
  require_same_size(cols_, v.size(), "Matrix-vector product");
  Vec out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = dot(row(r), v);
  return out;
}

// ---------------------------------------------------------------- SymMat

SymMat::SymMat(std::size_t d) : d_(d), data_(d * d, 0.0) {}

SymMat SymMat::identity(std::size_t d) {
  SymMat m(d);
  for (std::size_t i = 0; i < d; ++i) m.set(i, i, 1.0);
  return m;
}

SymMat SymMat::diagonal(std::span<const double> diag) {
  SymMat m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m.set(i, i, diag[i]);
  return m;
}

SymMat SymMat::from_upper(const Matrix& m) {
  require_same_size(m.rows(), m.cols(), "SymMat::from_upper");
  SymMat s(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j) s.set(i, j, m(i, j));
  return s;
}

void SymMat::set(std::size_t i, std::size_t j, double value) {
  data_[i * d_ + j] = value;
  data_[j * d_ + i] = value;
}

Vec SymMat::apply(std::span<const double> v) const {
  require_same_size(d_, v.size(), "SymMat::apply");
  Vec out(d_);
  for (std::size_t i = 0; i < d_; ++i) {
    out[i] = dot(std::span<const double>(data_.data() + i * d_, d_), v);
  }
  return out;
}

double SymMat::frobenius_norm() const { return norm(data_); }

Matrix SymMat::to_dense() const {
  Matrix m(d_, d_);
  for (std::size_t i = 0; i < d_; ++i)
    for (std::size_t j = 0; j < d_; ++j) m(i, j) = (*this)(i, j);
  return m;
}

// ---------------------------------------------------------------- Jacobi

namespace {

double max_off_diagonal(const std::vector<double>& a, std::size_t d) {
  double off = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) off = std::max(off, std::abs(a[i * d + j]));
  return off;
}

// Applies the rotation that annihilates a(p,q), keeping `a` exactly symmetric,
// and accumulates it into the eigenvector matrix `v`.
void rotate(std::vector<double>& a, Matrix& v, std::size_t d, std::size_t p, std::size_t q) {
  const double apq = a[p * d + q];
  if (apq == 0.0) return;

  const double theta = (a[q * d + q] - a[p * d + p]) / (2.0 * apq);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 1.0 / (2.0 * theta);
  } else {
    t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  for (std::size_t k = 0; k < d; ++k) {
    if (k == p || k == q) continue;
    const double akp = a[k * d + p];
    const double akq = a[k * d + q];
    const double new_kp = c * akp - s * akq;
    const double new_kq = s * akp + c * akq;
    a[k * d + p] = a[p * d + k] = new_kp;
    a[k * d + q] = a[q * d + k] = new_kq;
  }
  a[p * d + p] -= t * apq;
  a[q * d + q] += t * apq;
  a[p * d + q] = a[q * d + p] = 0.0;

  for (std::size_t k = 0; k < d; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

void fix_sign(Matrix& vectors, std::size_t col) {
  std::size_t best = 0;
  double best_abs = -1.0;
  for (std::size_t r = 0; r < vectors.rows(); ++r) {
    const double x = std::abs(vectors(r, col));
    if (x > best_abs) {
      best_abs = x;
      best = r;
    }
  }
  if (vectors(best, col) < 0.0) {
    for (std::size_t r = 0; r < vectors.rows(); ++r) vectors(r, col) = -vectors(r, col);
  }
}

}  // namespace

Spectrum sym_eigen(const SymMat& m, double tol) {
  const std::size_t d = m.size();
  if (d == 0) throw Error(Errc::InvalidMatrix, "empty matrix");
  if (!(tol > 0.0)) throw Error(Errc::InvalidMatrix, "tolerance must be positive");

  std::vector<double> a(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) a[i * d + j] = m(i, j);
  if (!all_finite(a)) throw Error(Errc::InvalidMatrix, "non-finite entry");

  const double threshold = tol * m.frobenius_norm();
  Matrix v = Matrix::identity(d);

  int sweeps = 0;
  while (max_off_diagonal(a, d) > threshold) {
    if (sweeps == kMaxJacobiSweeps) {
      throw Error(Errc::NoConvergence,
                  "no convergence after " + std::to_string(kMaxJacobiSweeps) + " sweeps");
    }
    for (std::size_t p = 0; p + 1 < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q) rotate(a, v, d, p, q);
    ++sweeps;
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a[i * d + i] < a[j * d + j];
  });

  Spectrum out{Vec(d), Matrix(d, d)};
  for (std::size_t j = 0; j < d; ++j) {
    const std::size_t src = order[j];
    out.eigenvalues[j] = a[src * d + src];
    for (std::size_t r = 0; r < d; ++r) out.eigenvectors(r, j) = v(r, src);
    fix_sign(out.eigenvectors, j);
  }
  return out;
}

double operator_norm(const SymMat& m) {
  const Spectrum s = sym_eigen(m);
  return std::max(std::abs(s.eigenvalues.front()), std::abs(s.eigenvalues.back()));
}

double trace(const SymMat& m) {
  double t = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) t += m(i, i);
  return t;
}

double rayleigh_quotient(const SymMat& m, std::span<const double> v) {
  const double vv = squared_norm(v);
  if (vv == 0.0) throw Error(Errc::ZeroVector, "rayleigh_quotient of the zero vector");
  return dot(m.apply(v), v) / vv;
}

}  // namespace streampca
