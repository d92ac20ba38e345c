#pragma once

#include "moptree/complex.hpp"

#include <vector>

namespace moptree {

template <class F>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, F(0)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  F& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const F& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      m(i, i) = F(1);
    }
    return m;
  }

  std::vector<F> operator*(const std::vector<F>& x) const {
    std::vector<F> y(rows_, F(0));
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) {
        y[i] += (*this)(i, j) * x[j];
      }
    }
    return y;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<F> a_;
};

template <class F>
struct LinearSolution {
  std::vector<F> x;
  real_of_t<F> residual;  // ||Ax - b||_inf / ||b||_inf
  int det_sign = 0;       // real fields only; 0 for complex
};

// Exact fields: Gaussian elimination with full pivoting on nonzero entries.
// Float fields: partial-pivot LU plus one step of iterative refinement; the
// relative residual must not exceed `threshold` (negative selects default).
template <class F>
LinearSolution<F> solve_linear_report(const Matrix<F>& a, const std::vector<F>& b,
                                      const real_of_t<F>& threshold = real_of_t<F>(-1));

template <class F>
std::vector<F> solve_linear(const Matrix<F>& a, const std::vector<F>& b,
                            const real_of_t<F>& threshold = real_of_t<F>(-1)) {
  return solve_linear_report(a, b, threshold).x;
}

// Sign of det(a); 0 when singular (exact) or numerically singular (float).
template <class F>
int determinant_sign(const Matrix<F>& a);

// Least-squares-free solve of a consistent overdetermined system (rows >= cols)
// with full column rank; `residual` reports the max abs residual over all rows.
template <class F>
LinearSolution<F> solve_consistent(const Matrix<F>& a, const std::vector<F>& b);

// Symmetric eigendecomposition by cyclic Jacobi rotations. Columns of
// `vectors` are orthonormal eigenvectors; values sorted ascending.
struct SymmetricEigen {
  std::vector<BigFloat> values;
  Matrix<BigFloat> vectors;
};
SymmetricEigen symmetric_eigen(const Matrix<BigFloat>& a);

}  // namespace moptree
