#include "moptree/systems.hpp"

#include "json.hpp"
#include "moptree/quadrature.hpp"

#include <boost/math/constants/constants.hpp>

#include <fstream>
#include <mutex>
#include <sstream>

namespace moptree {

namespace {

using json = nlohmann::json;

Rational json_rational(const json& v, const std::string& where) {
  if (v.is_string()) {
    return parse_rational(v.get<std::string>());
  }
  if (v.is_number_integer()) {
    return Rational(v.get<long long>());
  }
  if (v.is_number_float()) {
    return parse_rational(v.dump());
  }
  throw Error(ErrorCode::ParseError, where + ": expected a rational string");
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error(ErrorCode::ParseError, where + ": missing \"" + key + "\"");
  }
  return obj.at(key);
}

WeightSpec parse_weight(const json& w, const std::string& where) {
  WeightSpec spec;
  std::string kind = require(w, "kind", where).get<std::string>();
  if (kind == "lebesgue") {
    spec.kind = WeightKind::lebesgue;
  } else if (kind == "power-endpoint") {
    spec.kind = WeightKind::power_endpoint;
    spec.alpha = json_rational(require(w, "alpha", where), where + ".alpha");
    spec.beta = json_rational(require(w, "beta", where), where + ".beta");
  } else if (kind == "polynomial") {
    spec.kind = WeightKind::polynomial;
    const json& cs = require(w, "coeffs", where);
    if (!cs.is_array() || cs.empty()) {
      throw Error(ErrorCode::ParseError, where + ".coeffs: expected a nonempty array");
    }
    for (const auto& c : cs) {
      spec.coeffs.push_back(json_rational(c, where + ".coeffs"));
    }
  } else if (kind == "gaussian") {
    spec.kind = WeightKind::gaussian;
    spec.c = w.contains("c") ? json_rational(w.at("c"), where + ".c") : Rational(0);
  } else {
    throw Error(ErrorCode::ParseError, where + ": unknown weight kind \"" + kind + "\"");
  }
  return spec;
}

const char* weight_kind_name(WeightKind k) {
  switch (k) {
    case WeightKind::lebesgue: return "lebesgue";
    case WeightKind::power_endpoint: return "power-endpoint";
    case WeightKind::polynomial: return "polynomial";
    case WeightKind::gaussian: return "gaussian";
  }
  return "lebesgue";
}

const char* system_kind_name(SystemKind k) {
  switch (k) {
    case SystemKind::angelesco: return "angelesco";
    case SystemKind::hermite: return "hermite";
    case SystemKind::single: return "single";
  }
  return "angelesco";
}

// Number of distinct real roots of p in (a, b), by Sturm sequences.
int sturm_count(const Poly<Rational>& p, const Rational& a, const Rational& b) {
  std::vector<Poly<Rational>> seq{p, p.derivative()};
  while (!seq.back().is_zero() && seq.back().degree() > 0) {
    Poly<Rational> r = seq[seq.size() - 2];
    const Poly<Rational>& q = seq.back();
    while (!r.is_zero() && r.degree() >= q.degree()) {
      Rational f = r.leading() / q.leading();
      std::vector<Rational> shift(r.degree() - q.degree() + 1, Rational(0));
      shift.back() = f;
      r -= Poly<Rational>(shift) * q;
    }
    if (r.is_zero()) {
      break;
    }
    seq.push_back(r * Rational(-1));
  }
  auto variations = [&](const Rational& x) {
    int v = 0;
    int prev = 0;
    for (const auto& s : seq) {
      Rational val = s(x);
      int sg = val > 0 ? 1 : (val < 0 ? -1 : 0);
      if (sg != 0) {
        if (prev != 0 && sg != prev) {
          ++v;
        }
        prev = sg;
      }
    }
    return v;
  };
  int count = variations(a) - variations(b);
  if (p(b) == 0) {
    --count;
  }
  return count;
}

Poly<Rational> power_poly(const Rational& shift, int sign, int k) {
  // (sign * (x - shift))^k
  Poly<Rational> base(std::vector<Rational>{Rational(-sign * shift), Rational(sign)});
  Poly<Rational> r = Poly<Rational>::constant(Rational(1));
  for (int i = 0; i < k; ++i) {
    r = r * base;
  }
  return r;
}

bool is_integer(const Rational& q) { return denominator(q) == 1; }

// int_a^b x^l dx
Rational lebesgue_moment(const Rational& a, const Rational& b, int l) {
  return (pow_int(b, l + 1) - pow_int(a, l + 1)) / (l + 1);
}

// q(z) = int (W(z) - W(x)) / (z - x) dx over [a, b].
Poly<Rational> markov_correction(const Poly<Rational>& w, const Rational& a, const Rational& b) {
  std::vector<Rational> q(std::max(0, w.degree()), Rational(0));
  for (int k = 1; k <= w.degree(); ++k) {
    for (int i = 0; i < k; ++i) {
      q[i] += w.coeff(k) * lebesgue_moment(a, b, k - 1 - i);
    }
  }
  return Poly<Rational>(q);
}

BigFloat gaussian_half_width() {
  return sqrt(BigFloat(current_precision_bits()) * log(BigFloat(2))) + 3;
}

BigFloat bf(const Rational& q) { return BigFloat(q); }

BigFloat beta_fn(const BigFloat& x, const BigFloat& y) {
  BigFloat gx;
  BigFloat gy;
  BigFloat gxy;
  mpfr_gamma(gx.backend().data(), x.backend().data(), MPFR_RNDN);
  mpfr_gamma(gy.backend().data(), y.backend().data(), MPFR_RNDN);
  BigFloat s = x + y;
  mpfr_gamma(gxy.backend().data(), s.backend().data(), MPFR_RNDN);
  return gx * gy / gxy;
}

}  // namespace

SystemSpec parse_system(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("system JSON: ") + e.what());
  }
  SystemSpec sys;
  try {
    std::string kind = require(doc, "kind", "system").get<std::string>();
    if (kind == "angelesco") {
      sys.kind = SystemKind::angelesco;
    } else if (kind == "hermite") {
      sys.kind = SystemKind::hermite;
    } else if (kind == "single") {
      sys.kind = SystemKind::single;
    } else {
      throw Error(ErrorCode::ParseError, "system.kind: unknown kind \"" + kind + "\"");
    }
    const json& ms = require(doc, "measures", "system");
    if (!ms.is_array() || ms.empty()) {
      throw Error(ErrorCode::ParseError, "system.measures: expected a nonempty array");
    }
    for (std::size_t i = 0; i < ms.size(); ++i) {
      std::string where = "system.measures[" + std::to_string(i) + "]";
      MeasureSpec m;
      const json& iv = require(ms[i], "interval", where);
      if (iv.is_string() && iv.get<std::string>() == "R") {
        m.whole_line = true;
      } else if (iv.is_array() && iv.size() == 2) {
        m.lo = json_rational(iv[0], where + ".interval");
        m.hi = json_rational(iv[1], where + ".interval");
      } else {
        throw Error(ErrorCode::ParseError, where + ".interval: expected [a, b] or \"R\"");
      }
      m.weight = parse_weight(require(ms[i], "weight", where), where + ".weight");
      sys.measures.push_back(std::move(m));
    }
    if (doc.contains("backend")) {
      const json& b = doc.at("backend");
      std::string type = require(b, "type", "system.backend").get<std::string>();
      if (type == "rational") {
        sys.backend.backend = Backend::rational;
      } else if (type == "bigfloat") {
        sys.backend.backend = Backend::bigfloat;
        if (b.contains("bits")) {
          int bits = b.at("bits").get<int>();
          if (bits < 64) {
            throw Error(ErrorCode::InvalidConfig, "system.backend.bits must be at least 64");
          }
          sys.backend.precision_bits = static_cast<unsigned>(bits);
        }
      } else {
        throw Error(ErrorCode::ParseError, "system.backend.type: unknown backend \"" + type + "\"");
      }
    } else if (sys.kind == SystemKind::hermite) {
      sys.backend.backend = Backend::bigfloat;
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("system JSON: ") + e.what());
  }
  validate(sys);
  return sys;
}

SystemSpec load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::InvalidConfig, "cannot open system file " + path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_system(ss.str());
}

std::string system_to_json(const SystemSpec& sys) {
  nlohmann::ordered_json doc;
  doc["kind"] = system_kind_name(sys.kind);
  doc["measures"] = nlohmann::ordered_json::array();
  for (const auto& m : sys.measures) {
    nlohmann::ordered_json jm;
    if (m.whole_line) {
      jm["interval"] = "R";
    } else {
      jm["interval"] = {to_string(m.lo), to_string(m.hi)};
    }
    nlohmann::ordered_json w;
    w["kind"] = weight_kind_name(m.weight.kind);
    if (m.weight.kind == WeightKind::power_endpoint) {
      w["alpha"] = to_string(m.weight.alpha);
      w["beta"] = to_string(m.weight.beta);
    } else if (m.weight.kind == WeightKind::polynomial) {
      w["coeffs"] = nlohmann::ordered_json::array();
      for (const auto& c : m.weight.coeffs) {
        w["coeffs"].push_back(to_string(c));
      }
    } else if (m.weight.kind == WeightKind::gaussian) {
      w["c"] = to_string(m.weight.c);
    }
    jm["weight"] = w;
    doc["measures"].push_back(jm);
  }
  nlohmann::ordered_json b;
  if (sys.backend.backend == Backend::rational) {
    b["type"] = "rational";
  } else {
    b["type"] = "bigfloat";
    b["bits"] = sys.backend.precision_bits;
  }
  doc["backend"] = b;
  return doc.dump(2);
}

Geometry validate(const SystemSpec& sys) {
  const int d = sys.d();
  if (d < 1) {
    throw Error(ErrorCode::InvalidConfig, "system needs at least one measure");
  }
  if (sys.kind == SystemKind::single && d != 1) {
    throw Error(ErrorCode::InvalidConfig, "single kind needs exactly one measure");
  }
  for (int j = 0; j < d; ++j) {
    const MeasureSpec& m = sys.measures[j];
    std::string where = "measure " + std::to_string(j + 1);
    if (m.whole_line != (m.weight.kind == WeightKind::gaussian)) {
      throw Error(ErrorCode::InvalidWeight, where + ": gaussian weights go with the whole line and only there");
    }
    if (!m.whole_line && !(m.lo < m.hi)) {
      throw Error(ErrorCode::InvalidWeight, where + ": empty interval");
    }
    if (m.weight.kind == WeightKind::power_endpoint && (m.weight.alpha < 0 || m.weight.beta < 0)) {
      throw Error(ErrorCode::InvalidWeight, where + ": negative endpoint exponent");
    }
    if (m.weight.kind == WeightKind::polynomial) {
      Poly<Rational> w(m.weight.coeffs);
      if (w.is_zero() || w((m.lo + m.hi) / 2) <= 0 || sturm_count(w, m.lo, m.hi) != 0) {
        throw Error(ErrorCode::InvalidWeight, where + ": polynomial weight not positive on the open interval");
      }
    }
  }
  Geometry g;
  if (sys.kind == SystemKind::hermite) {
    for (int j = 0; j < d; ++j) {
      if (!sys.measures[j].whole_line) {
        throw Error(ErrorCode::InvalidWeight, "hermite kind needs gaussian weights on the real line");
      }
      for (int k = 0; k < j; ++k) {
        if (sys.measures[j].weight.c == sys.measures[k].weight.c) {
          throw Error(ErrorCode::DuplicateHermiteShift, "shift c = " + to_string(sys.measures[j].weight.c) +
                                                            " repeated (measures " + std::to_string(k + 1) + ", " +
                                                            std::to_string(j + 1) + ")");
        }
      }
    }
    g.bounded = false;
    return g;
  }
  for (int j = 0; j < d; ++j) {
    if (sys.measures[j].whole_line) {
      throw Error(ErrorCode::InvalidWeight, "only hermite systems may use the whole line");
    }
  }
  for (int j = 0; j + 1 < d; ++j) {
    const auto& a = sys.measures[j];
    const auto& b = sys.measures[j + 1];
    if (!(a.lo < b.lo)) {
      if (b.hi < a.lo) {
        throw Error(ErrorCode::UnorderedIntervals, "intervals " + std::to_string(j + 1) + " and " +
                                                       std::to_string(j + 2) + " are not increasing");
      }
      throw Error(ErrorCode::OverlappingIntervals, "intervals " + std::to_string(j + 1) + " and " +
                                                       std::to_string(j + 2) + " overlap");
    }
    if (!(a.hi < b.lo)) {
      throw Error(ErrorCode::OverlappingIntervals, "intervals " + std::to_string(j + 1) + " and " +
                                                       std::to_string(j + 2) + " overlap");
    }
    g.gaps.push_back(b.lo - a.hi);
  }
  g.hull_lo = sys.measures.front().lo;
  g.hull_hi = sys.measures.back().hi;
  g.R = std::max(abs_value(g.hull_lo), abs_value(g.hull_hi));
  if (!g.gaps.empty()) {
    g.g_min = *std::min_element(g.gaps.begin(), g.gaps.end());
  }
  return g;
}

SystemSpec lebesgue_system(const std::vector<std::pair<Rational, Rational>>& intervals) {
  SystemSpec sys;
  sys.kind = intervals.size() == 1 ? SystemKind::single : SystemKind::angelesco;
  for (const auto& [a, b] : intervals) {
    MeasureSpec m;
    m.lo = a;
    m.hi = b;
    sys.measures.push_back(m);
  }
  validate(sys);
  return sys;
}

SystemSpec hermite_system(const std::vector<Rational>& shifts) {
  SystemSpec sys;
  sys.kind = SystemKind::hermite;
  sys.backend.backend = Backend::bigfloat;
  for (const auto& c : shifts) {
    MeasureSpec m;
    m.whole_line = true;
    m.weight.kind = WeightKind::gaussian;
    m.weight.c = c;
    sys.measures.push_back(m);
  }
  validate(sys);
  return sys;
}

std::optional<Poly<Rational>> polynomial_weight(const MeasureSpec& m) {
  switch (m.weight.kind) {
    case WeightKind::lebesgue:
      return Poly<Rational>::constant(Rational(1));
    case WeightKind::polynomial:
      return Poly<Rational>(m.weight.coeffs);
    case WeightKind::power_endpoint:
      if (is_integer(m.weight.alpha) && is_integer(m.weight.beta)) {
        int a = static_cast<int>(numerator(m.weight.alpha));
        int b = static_cast<int>(numerator(m.weight.beta));
        return power_poly(m.lo, 1, a) * power_poly(m.hi, -1, b);
      }
      return std::nullopt;
    case WeightKind::gaussian:
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<Rational> exact_moment(const MeasureSpec& m, int l) {
  auto w = polynomial_weight(m);
  if (!w) {
    return std::nullopt;
  }
  Rational s(0);
  for (int k = 0; k <= w->degree(); ++k) {
    s += w->coeff(k) * lebesgue_moment(m.lo, m.hi, l + k);
  }
  return s;
}

BigFloat weight_value(const MeasureSpec& m, const BigFloat& x) {
  switch (m.weight.kind) {
    case WeightKind::lebesgue:
      return BigFloat(1);
    case WeightKind::polynomial:
      return Poly<Rational>(m.weight.coeffs).convert<BigFloat>()(x);
    case WeightKind::power_endpoint: {
      BigFloat u = x - bf(m.lo);
      BigFloat v = bf(m.hi) - x;
      if (u < 0 || v < 0) {
        return BigFloat(0);
      }
      return BigFloat(pow(u, bf(m.weight.alpha)) * pow(v, bf(m.weight.beta)));
    }
    case WeightKind::gaussian:
      return BigFloat(exp(-x * x + bf(m.weight.c) * x));
  }
  return BigFloat(0);
}

namespace {

std::vector<BigFloat> float_moments(const MeasureSpec& m, int l_max) {
  std::vector<BigFloat> out;
  if (m.weight.kind == WeightKind::gaussian) {
    const BigFloat c = bf(m.weight.c);
    const BigFloat pi = boost::math::constants::pi<BigFloat>();
    out.push_back(BigFloat(sqrt(pi) * exp(c * c / 4)));
    if (l_max >= 1) {
      out.push_back(BigFloat(c / 2 * out[0]));
    }
    for (int l = 1; l < l_max; ++l) {
      out.push_back(BigFloat((c * out[l] + l * out[l - 1]) / 2));
    }
    return out;
  }
  // Non-integer power-endpoint weight: Beta-function expansion around x = a.
  const BigFloat a = bf(m.lo);
  const BigFloat len = bf(m.hi - m.lo);
  const BigFloat al = bf(m.weight.alpha);
  const BigFloat be = bf(m.weight.beta);
  const BigFloat scale = pow(len, al + be + 1);
  std::vector<BigFloat> beta_k;  // B(alpha+k+1, beta+1)
  beta_k.push_back(beta_fn(al + 1, be + 1));
  for (int k = 1; k <= l_max; ++k) {
    beta_k.push_back(BigFloat(beta_k.back() * (al + k) / (al + be + 1 + k)));
  }
  for (int l = 0; l <= l_max; ++l) {
    BigFloat s(0);
    for (int k = 0; k <= l; ++k) {
      s += BigFloat(binomial(l, k)) * pow(a, l - k) * pow(len, k) * beta_k[k];
    }
    out.push_back(BigFloat(scale * s));
  }
  return out;
}

}  // namespace

template <class T>
MomentTable<T>::MomentTable(SystemSpec sys) : sys_(std::move(sys)), geom_(validate(sys_)) {
  m_.resize(sys_.d());
  if constexpr (is_exact_v<T>) {
    for (const auto& m : sys_.measures) {
      if (!polynomial_weight(m)) {
        throw Error(ErrorCode::BackendMismatch, "exact backend needs rational moments; weight kind " +
                                                    std::string(weight_kind_name(m.weight.kind)) +
                                                    " has irrational moments");
      }
    }
  }
}

template <class T>
void MomentTable<T>::extend(int l_max) const {
  std::unique_lock lock(mutex_);
  for (int j = 0; j < d(); ++j) {
    auto& row = m_[j];
    if (static_cast<int>(row.size()) > l_max) {
      continue;
    }
    const MeasureSpec& ms = sys_.measures[j];
    if (polynomial_weight(ms)) {
      for (int l = static_cast<int>(row.size()); l <= l_max; ++l) {
        row.push_back(from_rational<T>(*exact_moment(ms, l)));
      }
    } else {
      if constexpr (is_exact_v<T>) {
        throw Error(ErrorCode::BackendMismatch, "irrational moment on exact backend");
      } else {
        // Recomputed wholesale so the recursion stays consistent.
        row = float_moments(ms, std::max(l_max, 2 * static_cast<int>(row.size())));
      }
    }
  }
}

template <class T>
T MomentTable<T>::moment(int j, int l) const {
  {
    std::shared_lock lock(mutex_);
    if (l < static_cast<int>(m_[j].size())) {
      return m_[j][l];
    }
  }
  extend(l);
  std::shared_lock lock(mutex_);
  return m_[j][l];
}

template <class T>
std::vector<T> MomentTable<T>::moments(int j, int l_max) const {
  moment(j, l_max);
  std::shared_lock lock(mutex_);
  return std::vector<T>(m_[j].begin(), m_[j].begin() + l_max + 1);
}

Complex<BigFloat> markov(const SystemSpec& sys, int j, const Complex<BigFloat>& z) {
  using C = Complex<BigFloat>;
  const MeasureSpec& m = sys.measures.at(j);
  if (z.im == 0 && (m.whole_line || (z.re >= bf(m.lo) && z.re <= bf(m.hi)))) {
    throw Error(ErrorCode::PointOnSupport, "markov function evaluated on the support of measure " +
                                               std::to_string(j + 1));
  }
  if (auto w = polynomial_weight(m)) {
    C ratio = (z - C(bf(m.lo))) / (z - C(bf(m.hi)));
    C wz = w->convert<BigFloat>()(z);
    C q = markov_correction(*w, m.lo, m.hi).convert<BigFloat>()(z);
    return wz * log(ratio) - q;
  }
  auto integrand = [&](const BigFloat& x) { return C(weight_value(m, x)) / (z - C(x)); };
  if (m.whole_line) {
    BigFloat center = bf(m.weight.c) / 2;
    BigFloat h = gaussian_half_width();
    return quadrature<C>(integrand, center - h, center + h, 32, BigFloat(-1), 10);
  }
  int levels = static_cast<int>(current_precision_bits() / 2) + 8;
  return quadrature_graded<C>(integrand, bf(m.lo), bf(m.hi), 32, levels);
}

Complex<BigFloat> markov_boundary(const SystemSpec& sys, int j, const BigFloat& x, int side) {
  using C = Complex<BigFloat>;
  const MeasureSpec& m = sys.measures.at(j);
  BigFloat lo = m.whole_line ? BigFloat(bf(m.weight.c) / 2 - gaussian_half_width()) : bf(m.lo);
  BigFloat hi = m.whole_line ? BigFloat(bf(m.weight.c) / 2 + gaussian_half_width()) : bf(m.hi);
  if (!(x > lo && x < hi)) {
    throw Error(ErrorCode::PointNotInterior, "boundary value requested outside the open interval");
  }
  BigFloat wx = weight_value(m, x);
  BigFloat pv;
  if (auto w = polynomial_weight(m)) {
    pv = wx * log((x - lo) / (hi - x)) - markov_correction(*w, m.lo, m.hi).convert<BigFloat>()(x);
  } else {
    auto integrand = [&](const BigFloat& t) -> BigFloat {
      if (t == x) {
        return BigFloat(0);
      }
      return BigFloat((weight_value(m, t) - wx) / (x - t));
    };
    int levels = static_cast<int>(current_precision_bits() / 2) + 8;
    // Split at x so the removable point sits on a panel boundary.
    pv = quadrature_graded<BigFloat>(integrand, lo, x, 32, levels) +
         quadrature_graded<BigFloat>(integrand, x, hi, 32, levels) + wx * log((x - lo) / (hi - x));
  }
  const BigFloat pi = boost::math::constants::pi<BigFloat>();
  return C(pv, BigFloat(side >= 0 ? BigFloat(-pi * wx) : BigFloat(pi * wx)));
}

template <class T>
GammaConstants<T> gamma_constants(const MomentTable<T>& mt, const std::vector<T>& kappa) {
  const int d = mt.d();
  if (d < 2) {
    throw Error(ErrorCode::InvalidConfig, "gamma constants need d >= 2");
  }
  if (static_cast<int>(kappa.size()) != d) {
    throw Error(ErrorCode::InvalidConfig, "kappa has the wrong length");
  }
  GammaConstants<T> out;
  out.gamma.assign(d, T(0));
  try {
    for (int j = 0; j < d; ++j) {
      // Constants A^(i)_{1-e_j}, i != j, with A^(j) = 0.
      Matrix<T> a(d - 1, d - 1);
      std::vector<T> rhs(d - 1, T(0));
      rhs[d - 2] = T(1);
      for (int l = 0; l < d - 1; ++l) {
        int col = 0;
        for (int i = 0; i < d; ++i) {
          if (i == j) {
            continue;
          }
          a(l, col++) = mt.moment(i, l);
        }
      }
      std::vector<T> c = solve_linear(a, rhs);
      int col = 0;
      for (int i = 0; i < d; ++i) {
        if (i == j) {
          continue;
        }
        out.gamma[i] -= kappa[j] * c[col++];
      }
    }
    Matrix<T> a(d, d);
    std::vector<T> rhs(d, T(0));
    rhs[d - 1] = T(1);
    for (int l = 0; l < d; ++l) {
      for (int i = 0; i < d; ++i) {
        a(l, i) = mt.moment(i, l);
      }
    }
    out.gamma_tilde = solve_linear(a, rhs);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SingularMatrix) {
      throw Error(ErrorCode::SingularMomentSystem, e.context());
    }
    throw;
  }
  return out;
}

template <class T>
T xi_constant(const MomentTable<T>& mt) {
  if (mt.d() != 2) {
    throw Error(ErrorCode::InvalidConfig, "Xi is defined for d = 2");
  }
  T diff = mt.moment(1, 1) / mt.moment(1, 0) - mt.moment(0, 1) / mt.moment(0, 0);
  if (is_zero(diff)) {
    throw Error(ErrorCode::EqualMeans, "the two measures have equal means");
  }
  return T(1) / diff;
}

template class MomentTable<Rational>;
template class MomentTable<BigFloat>;
template GammaConstants<Rational> gamma_constants<Rational>(const MomentTable<Rational>&, const std::vector<Rational>&);
template GammaConstants<BigFloat> gamma_constants<BigFloat>(const MomentTable<BigFloat>&, const std::vector<BigFloat>&);
template Rational xi_constant<Rational>(const MomentTable<Rational>&);
template BigFloat xi_constant<BigFloat>(const MomentTable<BigFloat>&);

}  // namespace moptree
