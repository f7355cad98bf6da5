#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "pdls/error.hpp"

namespace pdls {

/// Dense real vector.
class Vec {
 public:
  Vec() = default;
  explicit Vec(std::size_t n, double fill = 0.0) : data_(n, fill) {}
  Vec(std::initializer_list<double> init) : data_(init) {}

  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  bool operator==(const Vec&) const = default;

 private:
  std::vector<double> data_;
};

/// Dense real matrix, column-major. Column-major keeps each k_j(t) — a
/// column of the pre-conditioner — contiguous.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  /// Builds from row-major initializer lists: {{1,2},{3,4}} is the matrix
  /// with first row (1,2).
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[c * rows_ + r]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[c * rows_ + r]; }

  double* col(std::size_t c) { return data_.data() + c * rows_; }
  const double* col(std::size_t c) const { return data_.data() + c * rows_; }

  Vec col_copy(std::size_t c) const;
  void set_col(std::size_t c, const Vec& v);

  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Eigendecomposition of a symmetric matrix: S = V diag(values) V^T,
/// values ascending, columns of V orthonormal.
struct EigenResult {
  std::vector<double> values;
  DenseMatrix vectors;
};

// All reductions below run in ascending index order; repeated calls on
// identical inputs are bit-identical.

Vec matvec(const DenseMatrix& m, const Vec& v);
Vec transpose_matvec(const DenseMatrix& m, const Vec& v);
DenseMatrix matmul(const DenseMatrix& lhs, const DenseMatrix& rhs);
DenseMatrix transpose(const DenseMatrix& m);

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix sub(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix scaled(const DenseMatrix& m, double s);
/// m + s*I
DenseMatrix add_scaled_identity(const DenseMatrix& m, double s);

Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec scaled(const Vec& v, double s);
/// y += a*x
void axpy(double a, const Vec& x, Vec& y);

double dot(const Vec& a, const Vec& b);
/// Euclidean 2-norm.
double norm2(const Vec& v);
double frobenius_norm(const DenseMatrix& m);
double max_abs(const DenseMatrix& m);
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);
double max_abs_diff(const Vec& a, const Vec& b);

bool all_finite(const Vec& v);
bool all_finite(const DenseMatrix& m);
bool is_symmetric(const DenseMatrix& m, double rel_tol = 1e-12);

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
/// Input must be square and symmetric to 1e-12 relative.
EigenResult sym_eig(const DenseMatrix& s);

/// Direct solve of S X = rhs for symmetric positive definite S via
/// Cholesky. Analysis/oracle use only; the iterative protocol never
/// inverts anything.
DenseMatrix solve_spd(const DenseMatrix& s, const DenseMatrix& rhs);
Vec solve_spd(const DenseMatrix& s, const Vec& rhs);

}  // namespace pdls
