#pragma once

#include "moptree/scalar.hpp"

#include <string>

namespace moptree {

// std::complex is unspecified for non-builtin value types, so this is a
// minimal field implementation that also works over exact rationals.
template <class T>
struct Complex {
  T re{0};
  T im{0};

  Complex() = default;
  Complex(const T& r) : re(r), im(0) {}  // NOLINT(google-explicit-constructor)
  Complex(const T& r, const T& i) : re(r), im(i) {}
  Complex(int r) : re(r), im(0) {}  // NOLINT(google-explicit-constructor)

  Complex& operator+=(const Complex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Complex& operator-=(const Complex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  Complex& operator*=(const Complex& o) {
    T r = re * o.re - im * o.im;
    T i = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(i);
    return *this;
  }
  Complex& operator/=(const Complex& o) {
    T den = o.re * o.re + o.im * o.im;
    if (den == 0) {
      throw Error(ErrorCode::DivisionByZero, "complex division by zero");
    }
    T r = (re * o.re + im * o.im) / den;
    T i = (im * o.re - re * o.im) / den;
    re = std::move(r);
    im = std::move(i);
    return *this;
  }

  friend Complex operator+(Complex a, const Complex& b) { return a += b; }
  friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
  friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
  friend Complex operator/(Complex a, const Complex& b) { return a /= b; }
  friend Complex operator-(const Complex& a) { return Complex(T(-a.re), T(-a.im)); }
  friend bool operator==(const Complex& a, const Complex& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const Complex& a, const Complex& b) { return !(a == b); }
};

template <class T>
Complex<T> conj(const Complex<T>& z) {
  return Complex<T>(z.re, T(-z.im));
}

template <class T>
T norm2(const Complex<T>& z) {
  return z.re * z.re + z.im * z.im;
}

template <class T>
bool is_zero(const Complex<T>& z) {
  return z.re == 0 && z.im == 0;
}

inline BigFloat abs(const Complex<BigFloat>& z) {
  return sqrt(norm2(z));
}

inline BigFloat arg(const Complex<BigFloat>& z) {
  return atan2(z.im, z.re);
}

// Principal branch.
inline Complex<BigFloat> log(const Complex<BigFloat>& z) {
  return Complex<BigFloat>(BigFloat(log(abs(z))), arg(z));
}

inline Complex<BigFloat> exp(const Complex<BigFloat>& z) {
  BigFloat r = exp(z.re);
  return Complex<BigFloat>(BigFloat(r * cos(z.im)), BigFloat(r * sin(z.im)));
}

// Principal branch, Re >= 0.
inline Complex<BigFloat> sqrt(const Complex<BigFloat>& z) {
  BigFloat r = abs(z);
  if (r == 0) {
    return Complex<BigFloat>();
  }
  BigFloat u = sqrt((r + abs(z.re)) / 2);
  if (z.re >= 0) {
    return Complex<BigFloat>(u, BigFloat(z.im / (2 * u)));
  }
  BigFloat v = z.im >= 0 ? u : BigFloat(-u);
  return Complex<BigFloat>(BigFloat(abs(z.im) / (2 * u)), v);
}

template <class T>
Complex<BigFloat> to_bigfloat(const Complex<T>& z) {
  return Complex<BigFloat>(to_bigfloat(z.re), to_bigfloat(z.im));
}

template <class T>
Complex<T> from_rational(const Complex<Rational>& z) {
  return Complex<T>(from_rational<T>(z.re), from_rational<T>(z.im));
}

// Magnitude proxy used for pivoting and tolerance checks.
template <class T>
T magnitude(const T& x) {
  return abs_value(x);
}

template <class T>
T magnitude(const Complex<T>& z) {
  return abs_value(z.re) + abs_value(z.im);
}

template <class T>
struct real_of {
  using type = T;
};
template <class T>
struct real_of<Complex<T>> {
  using type = T;
};
template <class F>
using real_of_t = typename real_of<F>::type;

// Parses "re,im" or "re" with rational components.
Complex<Rational> parse_complex(const std::string& text);

}  // namespace moptree
