#include "moptree/asymptotics.hpp"

#include "moptree/linalg.hpp"
#include "moptree/spectral.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <sstream>

namespace moptree {

namespace {

using CB = Complex<BigFloat>;

BigFloat tight_tolerance() { return ldexp(BigFloat(1), -static_cast<int>(current_precision_bits() * 7 / 8)); }

std::vector<BigFloat> sorted_endpoints(const std::vector<Interval>& iv) {
  std::vector<BigFloat> e;
  for (const auto& [lo, hi] : iv) {
    e.push_back(lo);
    e.push_back(hi);
  }
  return e;
}

struct NewtonState {
  std::vector<BigFloat> A, B, w;
};

BigFloat surface_residual(const NewtonState& s, const std::vector<BigFloat>& e) {
  const std::size_t d = s.A.size();
  BigFloat worst(0);
  for (std::size_t k = 0; k < 2 * d; ++k) {
    BigFloat z = s.w[k], dz(1);
    for (std::size_t i = 0; i < d; ++i) {
      BigFloat r = 1 / (s.w[k] - s.B[i]);
      z += s.A[i] * r;
      dz -= s.A[i] * r * r;
    }
    worst = std::max({worst, BigFloat(abs(z - e[k])), BigFloat(abs(dz))});
  }
  return worst;
}

// Damped Newton on the 4d unknowns (A, B, w). Returns false when it stalls.
bool newton_surface(NewtonState& s, const std::vector<BigFloat>& e, int& iterations) {
  const std::size_t d = s.A.size(), n = 4 * d;
  const BigFloat tol = tight_tolerance();
  BigFloat res = surface_residual(s, e);
  for (int it = 0; it < 200; ++it) {
    if (res <= tol) {
      return true;
    }
    ++iterations;
    Matrix<BigFloat> J(n, n);
    std::vector<BigFloat> F(n);
    for (std::size_t k = 0; k < 2 * d; ++k) {
      const BigFloat& w = s.w[k];
      BigFloat z = w, dz(1), d2z(0);
      for (std::size_t i = 0; i < d; ++i) {
        BigFloat r = 1 / (w - s.B[i]);
        z += s.A[i] * r;
        dz -= s.A[i] * r * r;
        d2z += 2 * s.A[i] * r * r * r;
        // rows k: z(w_k) - e_k; rows 2d + k: z'(w_k)
        J(k, i) = r;
        J(k, d + i) = s.A[i] * r * r;
        J(2 * d + k, i) = -r * r;
        J(2 * d + k, d + i) = -2 * s.A[i] * r * r * r;
      }
      J(k, 2 * d + k) = dz;
      J(2 * d + k, 2 * d + k) = d2z;
      F[k] = -(z - e[k]);
      F[2 * d + k] = -dz;
    }
    std::vector<BigFloat> step;
    try {
      step = solve_linear(J, F);
    } catch (const Error&) {
      return false;
    }
    BigFloat lambda(1);
    bool accepted = false;
    for (int half = 0; half < 30; ++half) {
      NewtonState trial = s;
      for (std::size_t i = 0; i < d; ++i) {
        trial.A[i] += lambda * step[i];
        trial.B[i] += lambda * step[d + i];
      }
      for (std::size_t k = 0; k < 2 * d; ++k) {
        trial.w[k] += lambda * step[2 * d + k];
      }
      bool valid = true;
      for (std::size_t i = 0; i < d; ++i) {
        valid = valid && trial.A[i] > 0 && trial.w[2 * i] < trial.B[i] && trial.B[i] < trial.w[2 * i + 1];
      }
      if (valid) {
        BigFloat r = surface_residual(trial, e);
        if (r < res) {
          s = std::move(trial);
          res = r;
          accepted = true;
          break;
        }
      }
      lambda /= 2;
    }
    if (!accepted) {
      return false;
    }
  }
  return res <= tol;
}

NewtonState single_interval_guess(const std::vector<Interval>& iv) {
  NewtonState s;
  for (const auto& [lo, hi] : iv) {
    BigFloat A = (hi - lo) * (hi - lo) / 16, B = (lo + hi) / 2, r = sqrt(A);
    s.A.push_back(A);
    s.B.push_back(B);
    s.w.push_back(B - r);
    s.w.push_back(B + r);
  }
  return s;
}

// Intervals pushed apart from their common center by the factor 1 + spread.
std::vector<Interval> spread_out(const std::vector<Interval>& iv, const BigFloat& spread) {
  BigFloat center(0);
  for (const auto& [lo, hi] : iv) {
    center += (lo + hi) / 2;
  }
  center /= iv.size();
  std::vector<Interval> out;
  for (const auto& [lo, hi] : iv) {
    BigFloat shift = ((lo + hi) / 2 - center) * spread;
    out.emplace_back(lo + shift, hi + shift);
  }
  return out;
}

CB newton_root(const SurfaceMap& map, const CB& target, CB w, bool& ok) {
  const BigFloat tol = tight_tolerance();
  for (int it = 0; it < 60; ++it) {
    CB f = surface_z(map, w) - target;
    CB step = f / surface_dz(map, w);
    w -= step;
    if (abs(step) <= tol * std::max(BigFloat(1), BigFloat(abs(w)))) {
      ok = true;
      return w;
    }
  }
  ok = false;
  return w;
}

}  // namespace

Complex<BigFloat> surface_z(const SurfaceMap& map, const Complex<BigFloat>& w) {
  CB z = w;
  for (int i = 0; i < map.d; ++i) {
    z += CB(map.A[i]) / (w - CB(map.B[i]));
  }
  return z;
}

Complex<BigFloat> surface_dz(const SurfaceMap& map, const Complex<BigFloat>& w) {
  CB dz(1);
  for (int i = 0; i < map.d; ++i) {
    CB r = CB(1) / (w - CB(map.B[i]));
    dz -= CB(map.A[i]) * r * r;
  }
  return dz;
}

SurfaceMap solve_surface(const std::vector<Interval>& endpoints) {
  if (endpoints.empty()) {
    throw Error(ErrorCode::InvalidConfig, "no intervals");
  }
  for (std::size_t i = 0; i < endpoints.size(); ++i) {
    if (!(endpoints[i].first < endpoints[i].second)) {
      throw Error(ErrorCode::InvalidConfig, "interval " + std::to_string(i + 1) + " is empty");
    }
    if (i > 0 && !(endpoints[i - 1].second < endpoints[i].first)) {
      throw Error(ErrorCode::OverlappingIntervals, "intervals must be ordered and disjoint");
    }
  }
  SurfaceMap map;
  map.d = static_cast<int>(endpoints.size());
  map.endpoints = endpoints;

  NewtonState s = single_interval_guess(endpoints);
  bool done = newton_surface(s, sorted_endpoints(endpoints), map.iterations);
  if (!done) {
    // Homotopy in the separation: start far apart, where the single-interval
    // maps are nearly exact, and pull the intervals back in.
    const BigFloat far(64);
    s = single_interval_guess(spread_out(endpoints, far));
    if (!newton_surface(s, sorted_endpoints(spread_out(endpoints, far)), map.iterations)) {
      throw Error(ErrorCode::NewtonDiverged, "surface solve fails even for widely separated intervals");
    }
    BigFloat t(0), dt = BigFloat(1) / 8;
    while (t < 1) {
      BigFloat next = std::min(BigFloat(1), BigFloat(t + dt));
      NewtonState trial = s;
      if (newton_surface(trial, sorted_endpoints(spread_out(endpoints, far * (1 - next))), map.iterations)) {
        s = std::move(trial);
        t = next;
        ++map.continuation_steps;
        dt = std::min(BigFloat(dt * 2), BigFloat(1) / 4);
      } else {
        dt /= 2;
        if (dt < ldexp(BigFloat(1), -30)) {
          throw Error(ErrorCode::NewtonDiverged,
                      "separation homotopy stalled at t = " + to_string(t, 10) + "; try wider gaps");
        }
      }
    }
  }
  map.A = s.A;
  map.B = s.B;
  map.critical_points = s.w;
  map.residual = surface_residual(s, sorted_endpoints(endpoints));
  map.pattern_ok = true;
  for (int i = 0; i < map.d; ++i) {
    map.pattern_ok = map.pattern_ok && s.A[i] > 0 && s.w[2 * i] < s.B[i] && s.B[i] < s.w[2 * i + 1];
    if (i > 0) {
      map.pattern_ok = map.pattern_ok && s.w[2 * i - 1] < s.w[2 * i];
    }
  }
  return map;
}

SurfaceMap solve_surface(const SystemSpec& sys) {
  std::vector<Interval> iv;
  for (const auto& m : sys.measures) {
    if (m.whole_line) {
      throw Error(ErrorCode::UnboundedSystem, "conformal map needs bounded intervals");
    }
    iv.emplace_back(to_bigfloat(m.lo), to_bigfloat(m.hi));
  }
  return solve_surface(iv);
}

Complex<BigFloat> chi_interval(const Interval& iv, const Complex<BigFloat>& z) {
  const auto& [a, b] = iv;
  CB root = sqrt((z - CB(a)) * (z - CB(b)));
  // Principal sqrt has Re >= 0; the branch ~ z flips it where Re z < center.
  CB c((a + b) / 2);
  if ((root.re * (z - c).re + root.im * (z - c).im) < 0) {
    root = -root;
  }
  return (z + c + root) / CB(2);
}

Complex<BigFloat> chi_sheet0(const SurfaceMap& map, const Complex<BigFloat>& z) {
  if (is_zero(z.im)) {
    for (const auto& [lo, hi] : map.endpoints) {
      if (z.re >= lo && z.re <= hi) {
        throw Error(ErrorCode::BranchTrackingFailed, "z = " + to_string(z.re, 20) + " lies on a cut");
      }
    }
  }
  const BigFloat big(1e6);
  CB start(big, z.im < 0 ? BigFloat(-big / 10) : BigFloat(big / 10));
  if (abs(z) >= abs(start)) {
    start = z;
  }
  // w ~ z - sum A / z on the unbounded sheet.
  CB w = start;
  for (int i = 0; i < map.d; ++i) {
    w -= CB(map.A[i]) / start;
  }
  bool ok = false;
  w = newton_root(map, start, w, ok);
  if (!ok) {
    throw Error(ErrorCode::BranchTrackingFailed, "no root near the starting point");
  }
  // Points z + (start - z) q^k approach z along the segment.
  BigFloat frac(1), q(0.7);
  const BigFloat scale = abs(start - z);
  while (frac > 0) {
    BigFloat next = frac * q;
    if (next * scale < ldexp(BigFloat(1), -40)) {
      next = 0;
    }
    CB target = z + (start - z) * CB(next);
    CB trial = newton_root(map, target, w, ok);
    // A converged step must stay within a few linearized step lengths.
    const BigFloat moved = scale * (frac - next) / abs(surface_dz(map, w));
    if (ok && abs(trial - w) <= 4 * moved + ldexp(BigFloat(1), -60)) {
      w = trial;
      frac = next;
      q = std::min(BigFloat(q * q), BigFloat(0.7));
      if (q < BigFloat(0.3)) {
        q = BigFloat(0.3);
      }
    } else {
      q = (1 + q) / 2;
      if (1 - q < ldexp(BigFloat(1), -40)) {
        throw Error(ErrorCode::BranchTrackingFailed,
                    "continuation stalled near " + to_string(target.re, 12) + " + " + to_string(target.im, 12) + "i");
      }
    }
  }
  return w;
}

RatioLimit ratio_limit(const SurfaceMap& map, int j, const Complex<BigFloat>& z) {
  if (j < 0 || j >= map.d) {
    throw Error(ErrorCode::InvalidConfig, "label out of range");
  }
  RatioLimit r;
  r.chi = chi_sheet0(map, z);
  r.limit = CB(1) / (r.chi - CB(map.B[j]));
  r.upsilon = CB(map.A[j]) * r.limit;
  r.M = -r.limit;
  return r;
}

BigFloat algebraic_residual(const SurfaceMap& map, const Complex<BigFloat>& z) {
  const CB w = chi_sheet0(map, z);
  std::vector<CB> Y(map.d);
  CB sum;
  for (int i = 0; i < map.d; ++i) {
    Y[i] = CB(map.A[i]) / (w - CB(map.B[i]));
    sum += Y[i];
  }
  BigFloat worst(0);
  for (int j = 0; j < map.d; ++j) {
    worst = std::max(worst, abs(CB(map.A[j]) / Y[j] + CB(map.B[j]) + sum - z));
  }
  return worst;
}

NevanlinnaSolution solve_M_system(const std::vector<BigFloat>& A, const std::vector<BigFloat>& B,
                                  const Complex<BigFloat>& z) {
  const int d = static_cast<int>(A.size());
  if (d == 0 || static_cast<int>(B.size()) != d) {
    throw Error(ErrorCode::InvalidConfig, "A and B must have the same positive length");
  }
  if (z.im < 0) {
    auto s = solve_M_system(A, B, conj(z));
    s.z = z;
    for (auto& m : s.M) {
      m = conj(m);
    }
    return s;
  }
  if (is_zero(z)) {
    throw Error(ErrorCode::IterationDiverged, "z = 0 is not admissible");
  }
  auto map = [&](const std::vector<CB>& M) {
    CB s;
    for (int i = 0; i < d; ++i) {
      s += CB(A[i]) * M[i];
    }
    std::vector<CB> out(d);
    for (int j = 0; j < d; ++j) {
      out[j] = CB(1) / (CB(B[j]) - z - s);
    }
    return out;
  };
  auto residual = [&](const std::vector<CB>& M) {
    CB s;
    for (int i = 0; i < d; ++i) {
      s += CB(A[i]) * M[i];
    }
    BigFloat worst(0);
    for (int j = 0; j < d; ++j) {
      worst = std::max(worst, abs(z - (CB(-1) / M[j] + CB(B[j]) - s)));
    }
    return worst;
  };

  NevanlinnaSolution sol;
  sol.z = z;
  const BigFloat tol = tight_tolerance();
  BigFloat damping(0.5);
  std::vector<CB> M;
  bool converged = false;
  for (int restart = 0; restart < 6 && !converged; ++restart) {
    sol.restarts = restart;
    M.assign(d, CB(-1) / z);
    for (int it = 0; it < 20000; ++it) {
      ++sol.iterations;
      std::vector<CB> F;
      try {
        F = map(M);
      } catch (const Error&) {
        break;
      }
      BigFloat change(0), size(0);
      for (int j = 0; j < d; ++j) {
        CB next = (CB(1) - CB(damping)) * M[j] + CB(damping) * F[j];
        change = std::max(change, abs(next - M[j]));
        size = std::max(size, abs(next));
        M[j] = next;
      }
      if (!(size < BigFloat(1e12))) {
        break;
      }
      // Loose stop; Newton finishes the job.
      if (change <= sqrt(tol) * std::max(BigFloat(1), size)) {
        converged = true;
        break;
      }
    }
    damping /= 2;
  }
  if (!converged) {
    throw Error(ErrorCode::IterationDiverged, "fixed point did not settle after restarts");
  }
  // Newton on f_j = M_j (B_j - z - sum A_i M_i) - 1.
  for (int it = 0; it < 30; ++it) {
    CB s;
    for (int i = 0; i < d; ++i) {
      s += CB(A[i]) * M[i];
    }
    Matrix<CB> J(d, d);
    std::vector<CB> f(d);
    for (int j = 0; j < d; ++j) {
      CB g = CB(B[j]) - z - s;
      f[j] = -(M[j] * g - CB(1));
      for (int k = 0; k < d; ++k) {
        J(j, k) = -M[j] * CB(A[k]);
      }
      J(j, j) += g;
    }
    auto step = solve_linear(J, f);
    BigFloat size(0);
    for (int j = 0; j < d; ++j) {
      M[j] += step[j];
      size = std::max(size, abs(step[j]));
    }
    if (size <= tol) {
      break;
    }
  }
  sol.M = M;
  sol.residual = residual(M);
  if (z.im > 0) {
    for (int j = 0; j < d; ++j) {
      if (!(M[j].im > 0)) {
        throw Error(ErrorCode::IterationDiverged, "solution left the Nevanlinna branch (Im M_" +
                                                      std::to_string(j + 1) + " <= 0)");
      }
    }
  }
  if (sol.residual > sqrt(tol)) {
    throw Error(ErrorCode::IterationDiverged, "residual " + to_string(sol.residual, 6) + " after polishing");
  }
  return sol;
}

MultiIndex direction_index(const std::vector<Rational>& c, int m) {
  const int d = static_cast<int>(c.size());
  std::vector<int> n(d);
  for (int i = 0; i < d; ++i) {
    Rational x = c[i] * m * d + Rational(1, 2);
    n[i] = static_cast<int>(Integer(numerator(x) / denominator(x)));
  }
  return MultiIndex(n);
}

ConvergenceReport convergence_study(const SystemSpec& sys, const std::vector<Rational>& c, int m_max,
                                    const std::vector<Complex<BigFloat>>& z_grid) {
  ConvergenceReport rep;
  rep.c = c;
  rep.z_grid = z_grid;
  const int d = sys.d();
  if (static_cast<int>(c.size()) != d || m_max < 3) {
    throw Error(ErrorCode::InvalidConfig, "direction needs d entries and m_max >= 3");
  }
  Rational total(0);
  for (const auto& x : c) {
    if (x <= 0) {
      throw Error(ErrorCode::InvalidConfig, "direction entries must be positive");
    }
    total += x;
  }
  if (total != 1) {
    throw Error(ErrorCode::InvalidConfig, "direction entries must sum to 1");
  }
  for (const auto& m : sys.measures) {
    if (m.whole_line) {
      rep.skipped = true;
      rep.note = std::string(error_name(ErrorCode::UnboundedSystem)) +
                 ": the limits need bounded supports (Hermite coefficients grow without bound)";
      return rep;
    }
  }
  rep.map = solve_surface(sys);

  const MultiIndex top = direction_index(c, m_max);
  std::unique_ptr<CoefficientProvider<BigFloat>> owned;
  std::shared_ptr<RecurrenceTable<BigFloat>> table;
  bool polynomial = true;
  for (const auto& m : sys.measures) {
    polynomial = polynomial && polynomial_weight(m).has_value();
  }
  const CoefficientProvider<BigFloat>* coef = nullptr;
  if (polynomial) {
    owned = std::make_unique<PropagatedCoefficients<BigFloat>>(sys, top.total() + 1);
    coef = owned.get();
    rep.coefficients = Provenance::propagated;
  } else {
    table = make_table<BigFloat>(sys);
    coef = table.get();
    rep.coefficients = Provenance::por_formula;
  }

  std::vector<std::vector<CB>> M(z_grid.size(), std::vector<CB>(d));
  for (std::size_t k = 0; k < z_grid.size(); ++k) {
    for (int j = 0; j < d; ++j) {
      M[k][j] = ratio_limit(rep.map, j, z_grid[k]).M;
    }
  }
  for (int m = 1; m <= m_max; ++m) {
    const MultiIndex n = direction_index(c, m);
    rep.indices.push_back(n);
    for (int j = 0; j < d; ++j) {
      ConvergenceRow row;
      row.m = m;
      row.j = j;
      row.a_err = abs(coef->a(n, j) - rep.map.A[j]);
      row.b_err = abs(coef->b(n, j) - rep.map.B[j]);
      for (std::size_t k = 0; k < z_grid.size(); ++k) {
        // cf_finite gives -P_n / P_{n+e_j}.
        CB cf = cf_finite<BigFloat>(*coef, n, j, z_grid[k]).value;
        row.ratio_err.push_back(abs(cf - M[k][j]));
      }
      rep.rows.push_back(std::move(row));
    }
  }

  auto zname = [](const CB& z) { return "(" + to_string(z.re, 6) + "," + to_string(z.im, 6) + ")"; };
  auto add_stream = [&](const std::string& name, auto pick) {
    ConvergenceStream s;
    s.name = name;
    for (const auto& row : rep.rows) {
      if (auto v = pick(row)) {
        s.errors.push_back(*v);
      }
    }
    const int third = (m_max + 2) / 3;
    BigFloat first(0), last(0);
    for (int i = 0; i < third; ++i) {
      first = std::max(first, s.errors[i]);
      last = std::max(last, s.errors[m_max - 1 - i]);
    }
    // A stream sitting at rounding level from the start (b = 0 for a symmetric
    // interval) has nothing left to decrease.
    s.decreasing = last < first || first <= ldexp(BigFloat(1), -static_cast<int>(current_precision_bits() / 2));
    // Least squares of log err against log m over the second half.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int m = (m_max + 1) / 2; m <= m_max; ++m) {
      double e = to_double(s.errors[m - 1]);
      if (e > 0) {
        double x = std::log(static_cast<double>(m)), y = std::log(e);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
      }
    }
    if (cnt >= 2) {
      s.slope = -(cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    }
    rep.streams.push_back(std::move(s));
  };
  for (int j = 0; j < d; ++j) {
    const std::string lab = std::to_string(j + 1);
    add_stream("a" + lab, [j](const ConvergenceRow& r) -> std::optional<BigFloat> {
      return r.j == j ? std::optional<BigFloat>(r.a_err) : std::nullopt;
    });
    add_stream("b" + lab, [j](const ConvergenceRow& r) -> std::optional<BigFloat> {
      return r.j == j ? std::optional<BigFloat>(r.b_err) : std::nullopt;
    });
    for (std::size_t k = 0; k < z_grid.size(); ++k) {
      add_stream("ratio" + lab + "@" + zname(z_grid[k]), [j, k](const ConvergenceRow& r) -> std::optional<BigFloat> {
        return r.j == j ? std::optional<BigFloat>(r.ratio_err[k]) : std::nullopt;
      });
    }
  }
  rep.ok = std::all_of(rep.streams.begin(), rep.streams.end(), [](const auto& s) { return s.decreasing; });
  return rep;
}

std::string surface_to_json(const SurfaceMap& map) {
  nlohmann::ordered_json out;
  auto list = [](const std::vector<BigFloat>& xs) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& x : xs) {
      arr.push_back(to_string(x));
    }
    return arr;
  };
  out["d"] = map.d;
  out["A"] = list(map.A);
  out["B"] = list(map.B);
  auto ends = nlohmann::ordered_json::array();
  for (const auto& [lo, hi] : map.endpoints) {
    ends.push_back({to_string(lo), to_string(hi)});
  }
  out["endpoints"] = ends;
  out["critical_points"] = list(map.critical_points);
  out["residual"] = to_string(map.residual, 6);
  out["iterations"] = map.iterations;
  out["continuation_steps"] = map.continuation_steps;
  out["pattern_ok"] = map.pattern_ok;
  out["precision_bits"] = current_precision_bits();
  return out.dump(1) + "\n";
}

std::string convergence_to_csv(const ConvergenceReport& rep) {
  std::ostringstream os;
  os << "m,j,z_re,z_im,a_err,b_err,ratio_err\n";
  for (const auto& row : rep.rows) {
    for (std::size_t k = 0; k < rep.z_grid.size(); ++k) {
      os << row.m << ',' << row.j + 1 << ',' << to_string(rep.z_grid[k].re, 20) << ','
         << to_string(rep.z_grid[k].im, 20) << ',' << to_string(row.a_err, 12) << ',' << to_string(row.b_err, 12)
         << ',' << to_string(row.ratio_err[k], 12) << '\n';
    }
  }
  return os.str();
}

}  // namespace moptree
