#include "suites.hpp"

#include "moptree/asymptotics.hpp"
#include "moptree/spectral.hpp"

#include <algorithm>
#include <sstream>

namespace moptree::cli {

using ordered_json = nlohmann::ordered_json;

void SuiteResult::add(Check c) { checks.push_back(std::move(c)); }

void SuiteResult::finish() {
  if (status == "skipped") {
    return;
  }
  status = "pass";
  for (const auto& c : checks) {
    if (c.status == "fail") {
      status = "fail";
    }
  }
}

ordered_json SuiteResult::to_json() const {
  ordered_json j;
  j["suite"] = suite;
  j["status"] = status;
  if (!note.empty()) {
    j["note"] = note;
  }
  j["checks"] = ordered_json::array();
  for (const auto& c : checks) {
    ordered_json cj;
    cj["name"] = c.name;
    cj["status"] = c.status;
    cj["residual"] = c.residual;
    if (!c.note.empty()) {
      cj["note"] = c.note;
    }
    j["checks"].push_back(cj);
  }
  return j;
}

std::vector<Complex<Rational>> default_green_points() {
  using CQ = Complex<Rational>;
  return {CQ(2, 1),  CQ(2, -1), CQ(5),       CQ(0, 3),     CQ(-2),
          CQ(Rational(3, 2), Rational(1, 2)), CQ(-3, 2), CQ(4, -1), CQ(-1, -2), CQ(7)};
}

namespace {

template <class T>
std::string text(const T& x) {
  if constexpr (is_exact_v<T>) {
    return to_string(x);
  } else {
    return to_string(x, 12);
  }
}

template <class T>
T threshold(const SystemSpec& sys) {
  if constexpr (is_exact_v<T>) {
    return T(0);
  } else {
    return T(sys.backend.threshold());
  }
}

template <class T>
Check residual_check(std::string name, const T& residual, const T& thr, std::string note = {}) {
  bool ok = is_exact_v<T> ? residual == 0 : residual <= thr;
  return {std::move(name), ok ? "pass" : "fail", text(residual), std::move(note)};
}

// Exact comparisons only need a zero test; the squared modulus keeps it rational.
template <class T>
T modulus(const Complex<T>& z) {
  if constexpr (is_exact_v<T>) {
    return norm2(z);
  } else {
    return T(abs(z));
  }
}

template <class T>
Complex<T> convert(const Complex<Rational>& z) {
  return Complex<T>(from_rational<T>(z.re), from_rational<T>(z.im));
}

MultiIndex window_or_default(const SuiteOptions& opt, int d, int fill) {
  return opt.window.d() == d ? opt.window : MultiIndex(std::vector<int>(d, fill));
}

template <class T>
void identities(const SystemSpec& sys, const SuiteOptions& opt, SuiteResult& r) {
  auto table = make_table<T>(sys);
  const Family<T>& fam = table->family();
  const int d = sys.d();
  const MultiIndex w = window_or_default(opt, d, 3);
  const T thr = threshold<T>(sys);

  T res2(0), res1(0);
  for (const auto& n : box_indices(w)) {
    res2 = std::max(res2, abs_value(type2_residual(fam, n)));
    if (n.total() > 0) {
      res1 = std::max(res1, abs_value(type1_residual(fam, n)));
    }
  }
  r.add(residual_check("type II orthogonality", res2, thr, "window " + w.str()));
  r.add(residual_check("type I orthogonality and normalization", res1, thr, "window " + w.str()));

  auto rec = verify_recurrences(*table, w);
  Check rc = residual_check("nearest-neighbor recurrences", rec.max_residual, thr,
                            std::to_string(rec.checked) + " relations");
  rc.status = rec.ok ? "pass" : "fail";
  for (const auto& f : rec.failures) {
    rc.note += "; " + f;
  }
  r.add(rc);

  if (d >= 2) {
    T worst(0);
    int count = 0;
    for (const auto& n : box_indices(w)) {
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          if (i == j) {
            continue;
          }
          for (const T& x : consistency(*table, n, i, j)) {
            worst = std::max(worst, abs_value(x));
          }
          ++count;
        }
      }
    }
    r.add(residual_check("consistency relations", worst, thr, std::to_string(count) + " (n, i, j) triples"));
  }

  // Tree eigen identities, type II on the finite tree of the window and
  // type I on a truncated tree.
  std::vector<T> e1(d, T(0));
  e1[0] = 1;
  std::vector<T> flat(d, T(1) / T(d));
  // Real points are only off the support for compact systems.
  std::vector<Complex<T>> zs{Complex<T>(T(1) / 2, T(1))};
  if (validate(sys).bounded) {
    zs.push_back(Complex<T>(T(3)));
  }
  BigFloat worst2(0), worst1(0);
  bool zero2 = true, zero1 = true;
  const int D = std::min(8, w.total());
  for (const auto& kappa : {e1, flat}) {
    auto op = assemble_finite<T>(*table, kappa, w, !is_exact_v<T>);
    auto inf = d >= 2 ? assemble_infinite<T>(*table, kappa, D, !is_exact_v<T>) : op;
    for (const auto& z : zs) {
      auto e2 = eigen_residual(op, fam, z, ResidualKind::type2);
      worst2 = std::max(worst2, e2.max_residual);
      zero2 = zero2 && e2.exact_zero;
      if (d >= 2) {
        auto er = eigen_residual(inf, fam, z, ResidualKind::type1);
        worst1 = std::max(worst1, er.max_residual);
        zero1 = zero1 && er.exact_zero;
      }
    }
  }
  const BigFloat fthr(sys.backend.threshold());
  auto tree_check = [&](std::string name, const BigFloat& worst, bool zero, std::string note) {
    bool ok = is_exact_v<T> ? zero : worst <= fthr;
    return Check{std::move(name), ok ? "pass" : "fail", is_exact_v<T> && zero ? "0" : to_string(worst, 12),
                 std::move(note)};
  };
  r.add(tree_check("tree type II eigen identity", worst2, zero2, "finite tree " + w.str()));
  if (d >= 2) {
    r.add(tree_check("tree type I eigen identity (interior rows)", worst1, zero1,
                     "truncated depth " + std::to_string(D)));
  } else {
    r.add({"tree type I eigen identity (interior rows)", "skipped", "", "the gamma constants need d >= 2"});
  }

  Check sl{"step-line relation", "pass", "", "n <= " + std::to_string(opt.step_line_max)};
  try {
    auto s = step_line(fam, opt.step_line_max);
    sl = residual_check(sl.name, s.max_residual, thr, sl.note);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::IdentityViolated) {
      throw;
    }
    sl.status = "fail";
    sl.note += "; " + e.context();
  }
  r.add(sl);
}

template <class T>
void bounds(const SystemSpec& sys, const SuiteOptions& opt, SuiteResult& r) {
  auto table = make_table<T>(sys);
  const MultiIndex w = window_or_default(opt, sys.d(), 3);
  auto rep = bounds_and_order(*table, w);
  if (rep.skipped) {
    r.status = "skipped";
    r.note = rep.note;
    return;
  }
  std::ostringstream note;
  note << rep.checked << " coefficients in " << w.str() << "; max a " << text(rep.max_a) << " <= " << text(rep.a_bound)
       << "; max |b| " << text(rep.max_abs_b) << " <= " << text(rep.b_bound);
  for (const auto& f : rep.failures) {
    note << "; " << f;
  }
  r.add({"bounds and ordering", rep.ok ? "pass" : "fail", text(rep.max_a), note.str()});
}

template <class T>
void interlacing_suite(const SystemSpec& sys, const SuiteOptions& opt, SuiteResult& r) {
  if (!validate(sys).bounded) {
    r.status = "skipped";
    r.note = "interlacing is checked interval by interval; the supports are unbounded";
    return;
  }
  auto fam = make_family<T>(sys);
  const int d = sys.d();
  const MultiIndex w = window_or_default(opt, d, 3);
  for (int j = 0; j < d; ++j) {
    for (int k = j; k < d; ++k) {
      int bad = 0, count = 0;
      std::string first;
      for (const auto& n : box_indices(w)) {
        ++count;
        if (!interlacing(*fam, n, j, k)) {
          if (bad++ == 0) {
            first = n.str();
          }
        }
      }
      Check c{"interlacing (" + std::to_string(j + 1) + "," + std::to_string(k + 1) + ")", bad == 0 ? "pass" : "fail",
              std::to_string(bad), std::to_string(count) + " indices"};
      if (bad > 0) {
        c.note += "; first failure at " + first;
      }
      r.add(c);
    }
  }
}

template <class T>
void green(const SystemSpec& sys, const SuiteOptions& opt, SuiteResult& r) {
  const int d = sys.d();
  MultiIndex N = opt.green_N;
  if (N.d() != d) {
    std::vector<int> v(d, 2);
    v[0] = 3;
    N = MultiIndex(v);
  }
  auto table = make_table<T>(sys);
  const Family<T>& fam = table->family();
  const auto zs = opt.z.empty() ? default_green_points() : opt.z;
  // Floats must agree to 10^-30 or the backend threshold, whichever is looser.
  T thr = threshold<T>(sys);
  if constexpr (!is_exact_v<T>) {
    thr = std::max(thr, T(BigFloat(1e-30)));
  }

  std::vector<std::pair<std::string, std::vector<T>>> kappas;
  for (int j = 0; j < d; ++j) {
    std::vector<T> e(d, T(0));
    e[j] = 1;
    kappas.push_back({"e" + std::to_string(j + 1), e});
  }
  if (d > 1) {
    kappas.push_back({"uniform", std::vector<T>(d, T(1) / T(d))});
  }

  for (const auto& [name, kappa] : kappas) {
    auto op = assemble_finite<T>(*table, kappa, N, false);
    T worst(0);
    for (const auto& zq : zs) {
      const Complex<T> z = convert<T>(zq);
      auto column = resolvent_column(op, 0, z);
      for (int Y = 0; Y < op.size(); ++Y) {
        worst = std::max(worst, modulus<T>(column[Y] - green_formula_finite(fam, op, Y, z).value));
      }
      auto root = green_direct(op, 0, 0, z).value;
      Complex<T> inv(0);
      for (int j = 0; j < d; ++j) {
        if (!is_zero(kappa[j])) {
          inv += Complex<T>(kappa[j]) / cf_finite<T>(*table, N, j, z).value;
        }
      }
      worst = std::max(worst, modulus<T>(root - Complex<T>(1) / inv));
      worst = std::max(worst, modulus<T>(root - column[0]));
    }
    r.add(residual_check("direct / formula / continued fraction, kappa " + name, worst, thr,
                         N.str() + ", " + std::to_string(op.size()) + " vertices, " + std::to_string(zs.size()) +
                             " points"));
  }
}

void asymptotics(const SystemSpec& sys, SuiteResult& r) {
  if (!validate(sys).bounded) {
    r.status = "skipped";
    r.note = "UnboundedSystem: the surface map needs compact supports";
    return;
  }
  using CB = Complex<BigFloat>;
  auto map = solve_surface(sys);
  const BigFloat thr(sys.backend.threshold());
  r.add({"surface map", map.residual <= thr && map.pattern_ok ? "pass" : "fail", to_string(map.residual, 12),
         map.pattern_ok ? "critical points interlace the poles" : "critical points out of pattern"});

  std::vector<CB> zs;
  for (const auto& q : default_green_points()) {
    bool on_cut = false;
    for (const auto& m : sys.measures) {
      on_cut = on_cut || (q.im == 0 && m.lo <= q.re && q.re <= m.hi);
    }
    if (!on_cut) {
      zs.push_back(CB(to_bigfloat(q.re), to_bigfloat(q.im)));
    }
  }
  BigFloat alg(0), msys(0);
  const BigFloat R = to_bigfloat(validate(sys).R);
  for (const auto& z : zs) {
    alg = std::max(alg, algebraic_residual(map, z));
    if (z.im > 0 || abs(z) > R + 1) {
      auto sol = solve_M_system(map.A, map.B, z);
      for (int j = 0; j < sys.d(); ++j) {
        msys = std::max(msys, BigFloat(abs(sol.M[j] - ratio_limit(map, j, z).M)));
      }
    }
  }
  r.add(residual_check("algebraic system at the chi parametrization", alg, BigFloat(1e-25),
                      std::to_string(zs.size()) + " points"));
  r.add(residual_check("Nevanlinna solve vs -Upsilon/A", msys, BigFloat(1e-20)));
  if (sys.d() == 1) {
    const auto& iv = map.endpoints[0];
    BigFloat len = iv.second - iv.first;
    BigFloat err = std::max(BigFloat(abs(map.A[0] - len * len / 16)), BigFloat(abs(map.B[0] - (iv.first + iv.second) / 2)));
    r.add(residual_check("single interval constants", err, BigFloat(1e-25), "A = |I|^2/16, B = midpoint"));
  }
}

template <class Fn>
SuiteResult dispatch(const std::string& name, const SystemSpec& sys, Fn&& fn) {
  SuiteResult r;
  r.suite = name;
  if (sys.backend.backend == Backend::rational) {
    fn(Rational{}, r);
  } else {
    fn(BigFloat{}, r);
  }
  r.finish();
  return r;
}

}  // namespace

SuiteResult verify_identities(const SystemSpec& sys, const SuiteOptions& opt) {
  return dispatch("identities", sys, [&](auto tag, SuiteResult& r) { identities<decltype(tag)>(sys, opt, r); });
}

SuiteResult verify_bounds(const SystemSpec& sys, const SuiteOptions& opt) {
  return dispatch("bounds", sys, [&](auto tag, SuiteResult& r) { bounds<decltype(tag)>(sys, opt, r); });
}

SuiteResult verify_interlacing(const SystemSpec& sys, const SuiteOptions& opt) {
  return dispatch("interlacing", sys,
                  [&](auto tag, SuiteResult& r) { interlacing_suite<decltype(tag)>(sys, opt, r); });
}

SuiteResult verify_green_crosscheck(const SystemSpec& sys, const SuiteOptions& opt) {
  return dispatch("green-crosscheck", sys, [&](auto tag, SuiteResult& r) { green<decltype(tag)>(sys, opt, r); });
}

SuiteResult verify_asymptotics(const SystemSpec& sys, const SuiteOptions&) {
  SuiteResult r;
  r.suite = "asymptotics";
  asymptotics(sys, r);
  r.finish();
  return r;
}

std::vector<SuiteResult> verify_suite(const std::string& name, const SystemSpec& sys, const SuiteOptions& opt) {
  if (name == "identities") {
    return {verify_identities(sys, opt)};
  }
  if (name == "bounds") {
    return {verify_bounds(sys, opt)};
  }
  if (name == "interlacing") {
    return {verify_interlacing(sys, opt)};
  }
  if (name == "green-crosscheck") {
    return {verify_green_crosscheck(sys, opt)};
  }
  if (name == "asymptotics") {
    return {verify_asymptotics(sys, opt)};
  }
  if (name == "all") {
    return {verify_identities(sys, opt), verify_bounds(sys, opt), verify_interlacing(sys, opt),
            verify_green_crosscheck(sys, opt), verify_asymptotics(sys, opt)};
  }
  throw Error(ErrorCode::InvalidConfig, "unknown verify suite '" + name + "'");
}

}  // namespace moptree::cli
