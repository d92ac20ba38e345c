#include "moptree/complex.hpp"

#include <cmath>
#include <sstream>

namespace moptree {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::OverlappingIntervals: return "OverlappingIntervals";
    case ErrorCode::UnorderedIntervals: return "UnorderedIntervals";
    case ErrorCode::DuplicateHermiteShift: return "DuplicateHermiteShift";
    case ErrorCode::InvalidWeight: return "InvalidWeight";
    case ErrorCode::BackendMismatch: return "BackendMismatch";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorCode::RootCountMismatch: return "RootCountMismatch";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::PointOnSupport: return "PointOnSupport";
    case ErrorCode::PointNotInterior: return "PointNotInterior";
    case ErrorCode::NotAbsolutelyContinuous: return "NotAbsolutelyContinuous";
    case ErrorCode::SingularMomentSystem: return "SingularMomentSystem";
    case ErrorCode::EqualMeans: return "EqualMeans";
    case ErrorCode::NotNormal: return "NotNormal";
    case ErrorCode::ProvenanceMismatch: return "ProvenanceMismatch";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::IdentityViolated: return "IdentityViolated";
    case ErrorCode::BoundViolated: return "BoundViolated";
    case ErrorCode::SizeLimitExceeded: return "SizeLimitExceeded";
    case ErrorCode::MissingCoefficient: return "MissingCoefficient";
    case ErrorCode::NonpositiveW: return "NonpositiveW";
    case ErrorCode::NonpositiveA: return "NonpositiveA";
    case ErrorCode::SolveFailed: return "SolveFailed";
    case ErrorCode::NearSpectrum: return "NearSpectrum";
    case ErrorCode::DenominatorZero: return "DenominatorZero";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::BranchTrackingFailed: return "BranchTrackingFailed";
    case ErrorCode::IterationDiverged: return "IterationDiverged";
    case ErrorCode::UnboundedSystem: return "UnboundedSystem";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, std::string context)
    : std::runtime_error(std::string(error_name(code)) + ": " + context), code_(code), context_(std::move(context)) {}

bool is_config_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::InvalidConfig:
    case ErrorCode::OverlappingIntervals:
    case ErrorCode::UnorderedIntervals:
    case ErrorCode::DuplicateHermiteShift:
    case ErrorCode::InvalidWeight:
    case ErrorCode::BackendMismatch:
    case ErrorCode::SizeLimitExceeded:
      return true;
    default:
      return false;
  }
}

double ScalarContext::threshold() const {
  if (residual_threshold > 0) {
    return residual_threshold;
  }
  return std::ldexp(1.0, -static_cast<int>(precision_bits / 2));
}

unsigned digits10_for_bits(unsigned bits) {
  return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

unsigned current_precision_bits() {
  // mpfr_float keeps precision in decimal digits; report the bit count the
  // allocated numbers actually carry.
  BigFloat probe(0);
  return static_cast<unsigned>(mpfr_get_prec(probe.backend().data()));
}

PrecisionScope::PrecisionScope(unsigned bits) : saved_digits10_(BigFloat::default_precision()) {
  if (bits < 64) {
    throw Error(ErrorCode::InvalidConfig, "precision_bits must be at least 64");
  }
  BigFloat::default_precision(digits10_for_bits(bits));
}

PrecisionScope::~PrecisionScope() { BigFloat::default_precision(saved_digits10_); }

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto bad = [&]() { return Error(ErrorCode::ParseError, "not a rational: \"" + s + "\""); };
  if (s.empty()) {
    throw bad();
  }
  try {
    auto dot = s.find('.');
    auto e = s.find_first_of("eE");
    if (dot == std::string::npos && e == std::string::npos) {
      Rational q(s);
      return q;
    }
    // Decimal literal: convert exactly.
    std::string mant = e == std::string::npos ? s : s.substr(0, e);
    long exp10 = e == std::string::npos ? 0 : std::stol(s.substr(e + 1));
    bool neg = !mant.empty() && mant[0] == '-';
    if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
      mant = mant.substr(1);
    }
    auto d = mant.find('.');
    std::string digits = mant;
    if (d != std::string::npos) {
      exp10 -= static_cast<long>(mant.size() - d - 1);
      digits = mant.substr(0, d) + mant.substr(d + 1);
    }
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
      throw bad();
    }
    // A leading zero would select octal in the Integer constructor.
    digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
    Integer num(digits);
    Rational q(num);
    if (exp10 > 0) {
      q *= Rational(pow(Integer(10), static_cast<unsigned>(exp10)));
    } else if (exp10 < 0) {
      q /= Rational(pow(Integer(10), static_cast<unsigned>(-exp10)));
    }
    return neg ? Rational(-q) : q;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw bad();
  }
}

std::string to_string(const Rational& q) { return q.str(); }

std::string to_string(const BigFloat& x, int digits10) {
  std::ostringstream os;
  int d = digits10 > 0 ? digits10 : static_cast<int>(x.precision());
  os << std::setprecision(d) << std::scientific << x;
  return os.str();
}

Rational pow_int(const Rational& x, unsigned k) {
  Rational r(1);
  Rational b = x;
  while (k > 0) {
    if (k & 1U) {
      r *= b;
    }
    b *= b;
    k >>= 1U;
  }
  return r;
}

Rational binomial(unsigned n, unsigned k) {
  if (k > n) {
    return Rational(0);
  }
  Integer r(1);
  for (unsigned i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
  }
  return Rational(r);
}

Complex<Rational> parse_complex(const std::string& text) {
  auto comma = text.find(',');
  if (comma == std::string::npos) {
    return Complex<Rational>(parse_rational(text), Rational(0));
  }
  return Complex<Rational>(parse_rational(text.substr(0, comma)), parse_rational(text.substr(comma + 1)));
}

}  // namespace moptree
