#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

namespace moptree {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;
using BigFloat = boost::multiprecision::mpfr_float;

enum class Backend { rational, bigfloat };

enum class ErrorCode {
  ParseError,
  InvalidConfig,
  OverlappingIntervals,
  UnorderedIntervals,
  DuplicateHermiteShift,
  InvalidWeight,
  BackendMismatch,
  SingularMatrix,
  ResidualTooLarge,
  RootCountMismatch,
  NoConvergence,
  PointOnSupport,
  PointNotInterior,
  NotAbsolutelyContinuous,
  SingularMomentSystem,
  EqualMeans,
  NotNormal,
  ProvenanceMismatch,
  ZeroDenominator,
  IdentityViolated,
  BoundViolated,
  SizeLimitExceeded,
  MissingCoefficient,
  NonpositiveW,
  NonpositiveA,
  SolveFailed,
  NearSpectrum,
  DenominatorZero,
  DivisionByZero,
  NewtonDiverged,
  BranchTrackingFailed,
  IterationDiverged,
  UnboundedSystem,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string context);
  ErrorCode code() const { return code_; }
  const std::string& context() const { return context_; }

 private:
  ErrorCode code_;
  std::string context_;
};

// Config-class errors map to CLI exit code 2, everything else to 3.
bool is_config_error(ErrorCode code);

template <class T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

struct ScalarContext {
  Backend backend = Backend::rational;
  unsigned precision_bits = 256;
  // 0 selects the default 2^(-precision_bits/2).
  double residual_threshold = 0.0;

  double threshold() const;
};

unsigned digits10_for_bits(unsigned bits);
unsigned current_precision_bits();

// Sets the default BigFloat precision for the lifetime of the scope.
class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_digits10_;
};

// Accepts "p/q", "p", and plain decimals such as "-0.25".
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);
std::string to_string(const BigFloat& x, int digits10 = 0);

template <class T>
T from_rational(const Rational& q) {
  if constexpr (is_exact_v<T>) {
    return q;
  } else {
    return T(q);
  }
}

template <class T>
BigFloat to_bigfloat(const T& x) {
  if constexpr (is_exact_v<T>) {
    return BigFloat(x);
  } else {
    return x;
  }
}

template <class T>
double to_double(const T& x) {
  return static_cast<double>(x);
}

template <class T>
bool is_zero(const T& x) {
  return x == 0;
}

template <class T>
T abs_value(const T& x) {
  return x < 0 ? T(-x) : x;
}

// 2^(-bits/2) at the current precision; zero for exact arithmetic.
template <class T>
T default_tolerance() {
  if constexpr (is_exact_v<T>) {
    return T(0);
  } else {
    return ldexp(T(1), -static_cast<int>(current_precision_bits() / 2));
  }
}

Rational pow_int(const Rational& x, unsigned k);
Rational binomial(unsigned n, unsigned k);

}  // namespace moptree
