#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace qrdft {

class LinalgError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  Matrix transpose() const;
  /// Leading `n` columns.
  Matrix left_cols(std::size_t n) const;
  /// Leading `n` rows.
  Matrix top_rows(std::size_t n) const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
Matrix matmul(const Matrix& a, const Matrix& b);
/// aᵀ b without forming the transpose.
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// a bᵀ without forming the transpose.
Matrix matmul_nt(const Matrix& a, const Matrix& b);

double max_abs(const Matrix& a);
double frobenius_norm(const Matrix& a);
/// ‖a − b‖∞ elementwise.
double max_abs_diff(const Matrix& a, const Matrix& b);
bool is_symmetric(const Matrix& a, double rel_tol = 1e-10);
Matrix symmetrized(const Matrix& a);

struct SymEigen {
  std::vector<double> values;  // ascending
  Matrix vectors;              // columns are eigenvectors
};

/// Symmetric eigendecomposition by cyclic Jacobi rotations. Each
/// eigenvector is signed so that its largest-magnitude entry is positive.
SymEigen sym_eigh(const Matrix& a);

struct QR {
  Matrix q;  // rows × cols, orthonormal columns
  Matrix r;  // cols × cols, upper triangular with positive diagonal
};

/// Thin QR by modified Gram-Schmidt with one reorthogonalization pass.
QR qr_positive(const Matrix& w);

/// Lower-triangular L with L Lᵀ = A.
Matrix cholesky_spd(const Matrix& a);

/// Symmetric A^{-1/2}.
Matrix inv_sqrt_spd(const Matrix& a);

/// Inverse of a lower-triangular matrix.
Matrix invert_lower(const Matrix& l);
/// Inverse of an upper-triangular matrix.
Matrix invert_upper(const Matrix& u);

}  // namespace qrdft
