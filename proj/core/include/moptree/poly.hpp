#pragma once

#include "moptree/complex.hpp"

#include <vector>

namespace moptree {

// Dense polynomial, coefficients in ascending degree, trailing zeros trimmed.
template <class T>
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<T> coeffs) : c_(std::move(coeffs)) { trim(); }

  static Poly constant(const T& v) { return Poly(std::vector<T>{v}); }
  static Poly x() { return Poly(std::vector<T>{T(0), T(1)}); }

  // -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  bool is_monic() const { return !c_.empty() && c_.back() == 1; }
  const std::vector<T>& coeffs() const { return c_; }
  // Coefficient of x^k, zero beyond the degree.
  T coeff(int k) const { return k >= 0 && k < static_cast<int>(c_.size()) ? c_[k] : T(0); }
  T leading() const { return c_.empty() ? T(0) : c_.back(); }

  T operator()(const T& x) const {
    T acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
      acc = acc * x + *it;
    }
    return acc;
  }

  Complex<T> operator()(const Complex<T>& z) const {
    Complex<T> acc;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
      acc = acc * z + Complex<T>(*it);
    }
    return acc;
  }

  Poly derivative() const {
    std::vector<T> d;
    for (std::size_t k = 1; k < c_.size(); ++k) {
      d.push_back(T(c_[k] * static_cast<int>(k)));
    }
    return Poly(std::move(d));
  }

  Poly shifted_up() const {  // x * p
    if (c_.empty()) {
      return {};
    }
    std::vector<T> d(c_.size() + 1, T(0));
    for (std::size_t k = 0; k < c_.size(); ++k) {
      d[k + 1] = c_[k];
    }
    return Poly(std::move(d));
  }

  Poly& operator+=(const Poly& o) {
    if (o.c_.size() > c_.size()) {
      c_.resize(o.c_.size(), T(0));
    }
    for (std::size_t k = 0; k < o.c_.size(); ++k) {
      c_[k] += o.c_[k];
    }
    trim();
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    if (o.c_.size() > c_.size()) {
      c_.resize(o.c_.size(), T(0));
    }
    for (std::size_t k = 0; k < o.c_.size(); ++k) {
      c_[k] -= o.c_[k];
    }
    trim();
    return *this;
  }
  Poly& operator*=(const T& s) {
    for (auto& v : c_) {
      v *= s;
    }
    trim();
    return *this;
  }

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, const T& s) { return a *= s; }
  friend Poly operator*(const T& s, Poly a) { return a *= s; }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.c_.empty() || b.c_.empty()) {
      return {};
    }
    std::vector<T> d(a.c_.size() + b.c_.size() - 1, T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      for (std::size_t j = 0; j < b.c_.size(); ++j) {
        d[i + j] += a.c_[i] * b.c_[j];
      }
    }
    return Poly(std::move(d));
  }
  friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }

  // Largest coefficient magnitude; zero for the zero polynomial.
  T max_abs_coeff() const {
    T m(0);
    for (const auto& v : c_) {
      T a = abs_value(v);
      if (a > m) {
        m = a;
      }
    }
    return m;
  }

  template <class U>
  Poly<U> convert() const {
    std::vector<U> d;
    d.reserve(c_.size());
    for (const auto& v : c_) {
      d.push_back(U(v));
    }
    return Poly<U>(std::move(d));
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) {
      c_.pop_back();
    }
  }
  std::vector<T> c_;
};

}  // namespace moptree
