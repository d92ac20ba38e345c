#pragma once

#include "moptree/mop.hpp"
#include "moptree/quadrature.hpp"
#include "moptree/systems.hpp"

#include <cstdint>
#include <random>

namespace moptree::test {

inline Rational q(long p, long r = 1) { return Rational(p) / r; }

// Lebesgue on [-1,-1/2] and [1/2,1].
inline SystemSpec symmetric_system() { return lebesgue_system({{q(-1), q(-1, 2)}, {q(1, 2), q(1)}}); }

inline SystemSpec legendre_system() { return lebesgue_system({{q(-1), q(1)}}); }

inline SystemSpec float_system(SystemSpec s, unsigned bits = 256) {
  s.backend.backend = Backend::bigfloat;
  s.backend.precision_bits = bits;
  return s;
}

inline bool close(const BigFloat& a, const BigFloat& b, const BigFloat& tol) { return abs(a - b) <= tol; }

inline bool close(const Complex<BigFloat>& a, const Complex<BigFloat>& b, const BigFloat& tol) {
  return abs(a - b) <= tol;
}

inline BigFloat tol(int exp10) { return pow(BigFloat(10), exp10); }

// Rationals with small numerators and denominators, reproducible per seed.
inline Rational random_rational(std::mt19937_64& rng, int span = 9) {
  std::uniform_int_distribution<int> num(-span, span);
  std::uniform_int_distribution<int> den(1, span);
  return Rational(num(rng)) / den(rng);
}

}  // namespace moptree::test
