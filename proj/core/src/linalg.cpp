#include "moptree/linalg.hpp"

#include <algorithm>
#include <numeric>

namespace moptree {

namespace {

template <class F>
real_of_t<F> inf_norm(const std::vector<F>& v) {
  real_of_t<F> m(0);
  for (const auto& x : v) {
    real_of_t<F> a = magnitude(x);
    if (a > m) {
      m = a;
    }
  }
  return m;
}

template <class F>
real_of_t<F> matrix_max(const Matrix<F>& a) {
  real_of_t<F> m(0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      real_of_t<F> v = magnitude(a(i, j));
      if (v > m) {
        m = v;
      }
    }
  }
  return m;
}

template <class F>
int sign_of(const F& x) {
  if constexpr (std::is_same_v<F, real_of_t<F>>) {
    return x > 0 ? 1 : (x < 0 ? -1 : 0);
  } else {
    return 0;
  }
}

template <class F>
std::vector<F> residual_vector(const Matrix<F>& a, const std::vector<F>& x, const std::vector<F>& b) {
  std::vector<F> r = b;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      r[i] -= a(i, j) * x[j];
    }
  }
  return r;
}

template <class F>
LinearSolution<F> solve_exact(Matrix<F> a, std::vector<F> b) {
  const std::size_t n = a.rows();
  std::vector<std::size_t> col(n);
  std::iota(col.begin(), col.end(), 0);
  int sign = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pr = n;
    std::size_t pc = n;
    for (std::size_t j = k; j < n && pr == n; ++j) {
      for (std::size_t i = k; i < n; ++i) {
        if (!is_zero(a(i, col[j]))) {
          pr = i;
          pc = j;
          break;
        }
      }
    }
    if (pr == n) {
      throw Error(ErrorCode::SingularMatrix, "zero pivot at step " + std::to_string(k));
    }
    if (pr != k) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(pr, j), a(k, j));
      }
      std::swap(b[pr], b[k]);
      sign = -sign;
    }
    if (pc != k) {
      std::swap(col[pc], col[k]);
      sign = -sign;
    }
    const F piv = a(k, col[k]);
    sign *= sign_of(piv);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (is_zero(a(i, col[k]))) {
        continue;
      }
      F f = a(i, col[k]) / piv;
      for (std::size_t j = k; j < n; ++j) {
        a(i, col[j]) -= f * a(k, col[j]);
      }
      b[i] -= f * b[k];
    }
  }
  std::vector<F> x(n, F(0));
  for (std::size_t kk = n; kk-- > 0;) {
    F s = b[kk];
    for (std::size_t j = kk + 1; j < n; ++j) {
      s -= a(kk, col[j]) * x[col[j]];
    }
    x[col[kk]] = s / a(kk, col[kk]);
  }
  LinearSolution<F> out;
  out.x = std::move(x);
  out.residual = real_of_t<F>(0);
  out.det_sign = sign;
  return out;
}

template <class F>
struct LU {
  Matrix<F> lu;
  std::vector<std::size_t> perm;
  int sign = 1;
};

template <class F>
LU<F> factor(Matrix<F> a) {
  const std::size_t n = a.rows();
  LU<F> f;
  f.perm.resize(n);
  std::iota(f.perm.begin(), f.perm.end(), 0);
  const real_of_t<F> scale = matrix_max(a);
  const real_of_t<F> tiny = scale * ldexp(real_of_t<F>(1), -static_cast<int>(current_precision_bits()) + 8);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    real_of_t<F> best = magnitude(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      real_of_t<F> v = magnitude(a(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best <= tiny) {
      throw Error(ErrorCode::SingularMatrix, "pivot below tolerance at step " + std::to_string(k));
    }
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(p, j), a(k, j));
      }
      std::swap(f.perm[p], f.perm[k]);
      f.sign = -f.sign;
    }
    f.sign *= sign_of(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      F m = a(i, k) / a(k, k);
      a(i, k) = m;
      for (std::size_t j = k + 1; j < n; ++j) {
        a(i, j) -= m * a(k, j);
      }
    }
  }
  f.lu = std::move(a);
  return f;
}

template <class F>
std::vector<F> lu_solve(const LU<F>& f, const std::vector<F>& b) {
  const std::size_t n = b.size();
  std::vector<F> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    F s = b[f.perm[i]];
    for (std::size_t j = 0; j < i; ++j) {
      s -= f.lu(i, j) * y[j];
    }
    y[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    F s = y[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      s -= f.lu(i, j) * y[j];
    }
    y[i] = s / f.lu(i, i);
  }
  return y;
}

template <class F>
LinearSolution<F> solve_float(const Matrix<F>& a, const std::vector<F>& b, real_of_t<F> threshold) {
  LU<F> f = factor(a);
  std::vector<F> x = lu_solve(f, b);
  std::vector<F> r = residual_vector(a, x, b);
  std::vector<F> dx = lu_solve(f, r);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] += dx[i];
  }
  r = residual_vector(a, x, b);
  real_of_t<F> bn = inf_norm(b);
  real_of_t<F> res = inf_norm(r);
  if (bn > 0) {
    res /= bn;
  }
  if (threshold < 0) {
    threshold = default_tolerance<real_of_t<F>>();
  }
  if (res > threshold) {
    throw Error(ErrorCode::ResidualTooLarge, "relative residual " + to_string(BigFloat(res), 6));
  }
  LinearSolution<F> out;
  out.x = std::move(x);
  out.residual = res;
  out.det_sign = f.sign;
  return out;
}

}  // namespace

template <class F>
LinearSolution<F> solve_linear_report(const Matrix<F>& a, const std::vector<F>& b, const real_of_t<F>& threshold) {
  if (a.rows() != a.cols() || a.rows() != b.size() || a.rows() == 0) {
    throw Error(ErrorCode::InvalidConfig, "solve_linear needs a nonempty square system");
  }
  if constexpr (is_exact_v<real_of_t<F>>) {
    return solve_exact(a, b);
  } else {
    return solve_float(a, b, threshold);
  }
}

template <class F>
int determinant_sign(const Matrix<F>& a) {
  if (a.rows() == 0) {
    return 1;
  }
  try {
    if constexpr (is_exact_v<real_of_t<F>>) {
      return solve_exact(a, std::vector<F>(a.rows(), F(0))).det_sign;
    } else {
      return factor(a).sign;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SingularMatrix) {
      return 0;
    }
    throw;
  }
}

template <class F>
LinearSolution<F> solve_consistent(const Matrix<F>& a0, const std::vector<F>& b0) {
  const std::size_t m = a0.rows();
  const std::size_t n = a0.cols();
  LinearSolution<F> out;
  out.residual = real_of_t<F>(0);
  if (n == 0) {
    out.residual = inf_norm(b0);
    return out;
  }
  if (m < n) {
    throw Error(ErrorCode::InvalidConfig, "solve_consistent needs rows >= cols");
  }
  Matrix<F> a = a0;
  std::vector<F> b = b0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = m;
    real_of_t<F> best(0);
    for (std::size_t i = k; i < m; ++i) {
      real_of_t<F> v = magnitude(a(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
      if constexpr (is_exact_v<real_of_t<F>>) {
        if (p != m) {
          break;
        }
      }
    }
    if (p == m) {
      throw Error(ErrorCode::SingularMatrix, "rank deficient column " + std::to_string(k));
    }
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(p, j), a(k, j));
      }
      std::swap(b[p], b[k]);
    }
    for (std::size_t i = k + 1; i < m; ++i) {
      if (is_zero(a(i, k))) {
        continue;
      }
      F f = a(i, k) / a(k, k);
      for (std::size_t j = k; j < n; ++j) {
        a(i, j) -= f * a(k, j);
      }
      b[i] -= f * b[k];
    }
  }
  std::vector<F> x(n, F(0));
  for (std::size_t kk = n; kk-- > 0;) {
    F s = b[kk];
    for (std::size_t j = kk + 1; j < n; ++j) {
      s -= a(kk, j) * x[j];
    }
    x[kk] = s / a(kk, kk);
  }
  out.residual = inf_norm(residual_vector(a0, x, b0));
  out.x = std::move(x);
  return out;
}

SymmetricEigen symmetric_eigen(const Matrix<BigFloat>& a0) {
  const std::size_t n = a0.rows();
  Matrix<BigFloat> a = a0;
  Matrix<BigFloat> v = Matrix<BigFloat>::identity(n);
  const BigFloat eps = ldexp(BigFloat(1), -static_cast<int>(current_precision_bits()) + 4);
  for (int sweep = 0; sweep < 100; ++sweep) {
    BigFloat off(0);
    BigFloat total(0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        BigFloat s = a(i, j) * a(i, j);
        total += s;
        if (i != j) {
          off += s;
        }
      }
    }
    if (off <= eps * eps * total) {
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0) {
          continue;
        }
        BigFloat theta = (a(q, q) - a(p, p)) / (2 * a(p, q));
        BigFloat t = (theta >= 0 ? BigFloat(1) : BigFloat(-1)) / (abs(theta) + sqrt(theta * theta + 1));
        BigFloat c = 1 / sqrt(t * t + 1);
        BigFloat s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          BigFloat akp = a(k, p);
          BigFloat akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          BigFloat apk = a(p, k);
          BigFloat aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          BigFloat vkp = v(k, p);
          BigFloat vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  SymmetricEigen out;
  out.vectors = Matrix<BigFloat>(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values.push_back(a(order[k], order[k]));
    for (std::size_t i = 0; i < n; ++i) {
      out.vectors(i, k) = v(i, order[k]);
    }
  }
  return out;
}

#define MOPTREE_INSTANTIATE_LINALG(F)                                                                     \
  template LinearSolution<F> solve_linear_report<F>(const Matrix<F>&, const std::vector<F>&,              \
                                                    const real_of_t<F>&);                                 \
  template int determinant_sign<F>(const Matrix<F>&);                                                     \
  template LinearSolution<F> solve_consistent<F>(const Matrix<F>&, const std::vector<F>&);

MOPTREE_INSTANTIATE_LINALG(Rational)
MOPTREE_INSTANTIATE_LINALG(BigFloat)
MOPTREE_INSTANTIATE_LINALG(Complex<Rational>)
MOPTREE_INSTANTIATE_LINALG(Complex<BigFloat>)

}  // namespace moptree
