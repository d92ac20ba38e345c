#include "moptree/recurrence.hpp"

#include "moptree/quadrature.hpp"

#include <algorithm>
#include <mutex>

namespace moptree {

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::por_formula: return "por-formula";
    case Provenance::coefficient_match: return "coefficient-match";
    case Provenance::propagated: return "propagated";
    case Provenance::constant: return "constant";
  }
  return "por-formula";
}

namespace {

// int P x^k dmu_j
template <class T>
T shifted_integral(const MomentTable<T>& mt, int j, const Poly<T>& p, int k) {
  T acc(0);
  for (int i = 0; i <= p.degree(); ++i) {
    acc += p.coeffs()[i] * mt.moment(j, i + k);
  }
  return acc;
}

template <class T>
bool agree(const T& x, const T& y, const T& tol) {
  if constexpr (is_exact_v<T>) {
    return x == y;
  } else {
    T scale = std::max(T(1), T(std::max(abs_value(x), abs_value(y))));
    return abs_value(T(x - y)) <= tol * scale;
  }
}

template <class T>
std::string show(const T& v) {
  if constexpr (is_exact_v<T>) {
    return to_string(v);
  } else {
    return to_string(v, 20);
  }
}

}  // namespace

template <class T>
RecurrenceTable<T>::RecurrenceTable(std::shared_ptr<const Family<T>> fam, T tolerance)
    : fam_(std::move(fam)), tol_(tolerance < 0 ? default_tolerance<T>() : tolerance) {}

template <class T>
T RecurrenceTable<T>::moment_of_form(const MultiIndex& n) const {
  const int N = n.total();
  if (N == 0) {
    return T(0);
  }
  const auto& t = fam_->type1(n);
  T acc(0);
  for (int j = 0; j < d(); ++j) {
    acc += shifted_integral(fam_->moments(), j, t.A[j], N);
  }
  return acc;
}

template <class T>
CoefficientRoutes<T> RecurrenceTable<T>::compute(const MultiIndex& n, int j) const {
  const auto& mt = fam_->moments();
  const int N = n.total();
  const MultiIndex up = n.plus(j);
  const Poly<T>& P = fam_->type2(n).P;
  const Poly<T>& Pup = fam_->type2(up).P;
  CoefficientRoutes<T> r;

  r.b_por = moment_of_form(up) - moment_of_form(n);
  r.b_match = P.coeff(N - 1) - Pup.coeff(N);

  if (n[j] > 0) {
    const MultiIndex down = n.minus(j);
    T num = shifted_integral(mt, j, P, n[j]);
    T den = shifted_integral(mt, j, fam_->type2(down).P, n[j] - 1);
    if (is_zero(den)) {
      throw Error(ErrorCode::ZeroDenominator, "a at " + n.str() + ", j = " + std::to_string(j + 1));
    }
    r.a_por = num / den;

    // x P_n - P_{n+e_j} - b P_n = sum_l a_{n,l} P_{n-e_l}
    Poly<T> rem = P.shifted_up() - Pup - P * r.b_match;
    std::vector<int> labels;
    for (int l = 0; l < d(); ++l) {
      if (n[l] > 0) {
        labels.push_back(l);
      }
    }
    Matrix<T> a(N, labels.size());
    std::vector<T> rhs(N);
    for (int k = 0; k < N; ++k) {
      rhs[k] = rem.coeff(k);
      for (std::size_t c = 0; c < labels.size(); ++c) {
        a(k, c) = fam_->type2(n.minus(labels[c])).P.coeff(k);
      }
    }
    auto sol = solve_consistent(a, rhs);
    for (std::size_t c = 0; c < labels.size(); ++c) {
      if (labels[c] == j) {
        r.a_match = sol.x[c];
      }
    }
  }

  if (!agree(r.a_por, r.a_match, tol_) || !agree(r.b_por, r.b_match, tol_)) {
    throw Error(ErrorCode::ProvenanceMismatch, "at " + n.str() + ", j = " + std::to_string(j + 1) + ": a " +
                                                   show(r.a_por) + " vs " + show(r.a_match) + ", b " +
                                                   show(r.b_por) + " vs " + show(r.b_match));
  }
  return r;
}

template <class T>
const CoefficientRoutes<T>& RecurrenceTable<T>::routes(const MultiIndex& n, int j) const {
  if (n.d() != d() || j < 0 || j >= d()) {
    throw Error(ErrorCode::InvalidConfig, "coefficient request " + n.str() + ", j = " + std::to_string(j + 1));
  }
  auto key = std::make_pair(n, j);
  {
    std::shared_lock lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) {
      return *it->second;
    }
  }
  auto value = std::make_unique<CoefficientRoutes<T>>(compute(n, j));
  std::unique_lock lock(mutex_);
  auto [it, inserted] = cache_.emplace(key, std::move(value));
  return *it->second;
}

template <class T>
void RecurrenceTable<T>::fill(const MultiIndex& window) const {
  for (const auto& n : box_indices(window)) {
    for (int j = 0; j < d(); ++j) {
      routes(n, j);
    }
  }
}

template <class T>
std::vector<std::pair<std::pair<MultiIndex, int>, CoefficientRoutes<T>>> RecurrenceTable<T>::entries() const {
  std::shared_lock lock(mutex_);
  std::vector<std::pair<std::pair<MultiIndex, int>, CoefficientRoutes<T>>> out;
  for (const auto& [k, v] : cache_) {
    out.emplace_back(k, *v);
  }
  return out;
}

template <class T>
ConstantCoefficients<T>::ConstantCoefficients(std::vector<T> A, std::vector<T> B) : A_(std::move(A)), B_(std::move(B)) {
  if (A_.size() != B_.size() || A_.empty()) {
    throw Error(ErrorCode::InvalidConfig, "A and B must have the same positive length");
  }
  for (std::size_t i = 0; i < A_.size(); ++i) {
    if (!(A_[i] > 0)) {
      throw Error(ErrorCode::NonpositiveA, "A_" + std::to_string(i + 1) + " must be positive");
    }
  }
}

template <class T>
void jacobi_coefficients(const MeasureSpec& m, int count, std::vector<T>& alpha, std::vector<T>& beta) {
  auto w = polynomial_weight(m);
  if (m.whole_line || !w) {
    throw Error(ErrorCode::InvalidConfig, "one-measure coefficients need a bounded polynomial weight");
  }
  alpha.assign(count, T(0));
  beta.assign(count, T(0));
  if constexpr (is_exact_v<T>) {
    SystemSpec single;
    single.kind = SystemKind::single;
    single.measures = {m};
    MomentTable<Rational> mt(single);
    Poly<Rational> prev, cur = Poly<Rational>::constant(1);
    Rational prev_norm(1);
    for (int k = 0; k < count; ++k) {
      Rational norm = integrate(mt, 0, cur * cur);
      beta[k] = integrate(mt, 0, cur.shifted_up() * cur) / norm;
      if (k > 0) {
        alpha[k] = norm / prev_norm;
      }
      Poly<Rational> next = cur.shifted_up() - cur * beta[k] - prev * alpha[k];
      prev = std::move(cur);
      cur = std::move(next);
      prev_norm = norm;
    }
  } else {
    const int K = count + w->degree() / 2 + 2;
    const GaussRule& rule = gauss_legendre(K);
    BigFloat lo(m.lo), hi(m.hi);
    BigFloat half = (hi - lo) / 2, mid = (hi + lo) / 2;
    Poly<BigFloat> wf = w->convert<BigFloat>();
    std::vector<BigFloat> x(K), W(K), p_prev(K, BigFloat(0)), p(K, BigFloat(1));
    for (int i = 0; i < K; ++i) {
      x[i] = mid + half * rule.nodes[i];
      W[i] = rule.weights[i] * half * wf(x[i]);
    }
    BigFloat prev_norm(1);
    for (int k = 0; k < count; ++k) {
      BigFloat norm(0), xnorm(0);
      for (int i = 0; i < K; ++i) {
        BigFloat t = W[i] * p[i] * p[i];
        norm += t;
        xnorm += t * x[i];
      }
      beta[k] = xnorm / norm;
      if (k > 0) {
        alpha[k] = norm / prev_norm;
      }
      for (int i = 0; i < K; ++i) {
        BigFloat next = (x[i] - beta[k]) * p[i] - alpha[k] * p_prev[i];
        p_prev[i] = std::move(p[i]);
        p[i] = std::move(next);
      }
      prev_norm = norm;
    }
  }
}

namespace {

void compositions(int total, int d, std::vector<int>& cur, std::vector<MultiIndex>& out) {
  const int pos = static_cast<int>(cur.size());
  if (pos == d - 1) {
    cur.push_back(total);
    out.emplace_back(cur);
    cur.pop_back();
    return;
  }
  for (int v = total; v >= 0; --v) {
    cur.push_back(v);
    compositions(total - v, d, cur, out);
    cur.pop_back();
  }
}

}  // namespace

template <class T>
PropagatedCoefficients<T>::PropagatedCoefficients(const SystemSpec& sys, int max_level)
    : d_(sys.d()), max_level_(max_level) {
  validate(sys);
  std::vector<std::vector<T>> alpha(d_), beta(d_);
  for (int i = 0; i < d_; ++i) {
    jacobi_coefficients<T>(sys.measures[i], max_level + 1, alpha[i], beta[i]);
  }
  Cell zero{std::vector<T>(d_, T(0)), std::vector<T>(d_)};
  for (int i = 0; i < d_; ++i) {
    zero.b[i] = beta[i][0];
  }
  cells_.emplace(MultiIndex::zero(d_), std::move(zero));

  auto nonzero = [](const T& v, const MultiIndex& at) {
    if (is_zero(v)) {
      throw Error(ErrorCode::DivisionByZero, "propagation denominator vanished near " + at.str());
    }
  };

  for (int level = 1; level <= max_level; ++level) {
    std::vector<MultiIndex> layer;
    std::vector<int> cur;
    compositions(level, d_, cur, layer);
    // a on the whole layer first: the b step needs a at two layer indices.
    for (const auto& m : layer) {
      Cell c{std::vector<T>(d_, T(0)), std::vector<T>(d_, T(0))};
      for (int i = 0; i < d_; ++i) {
        if (m[i] == 0) {
          continue;
        }
        if (m[i] == level) {
          c.a[i] = alpha[i][level];
          continue;
        }
        int j = 0;
        while (j == i || m[j] == 0) {
          ++j;
        }
        // a_{n,i}(b_{n,j} - b_{n,i}) = a_{n+e_j,i}(b_{n-e_i,j} - b_{n-e_i,i}), n = m - e_j
        const MultiIndex n = m.minus(j);
        const Cell& cn = cells_.at(n);
        const Cell& cl = cells_.at(n.minus(i));
        T den = cl.b[j] - cl.b[i];
        nonzero(den, m);
        c.a[i] = cn.a[i] * (cn.b[j] - cn.b[i]) / den;
      }
      cells_.emplace(m, std::move(c));
    }
    for (const auto& m : layer) {
      Cell& c = cells_.at(m);
      for (int i = 0; i < d_; ++i) {
        if (m[i] == level) {
          c.b[i] = beta[i][level];
          continue;
        }
        int j = 0;
        while (j == i || m[j] == 0) {
          ++j;
        }
        // b_{n+e_j,i} = b_{n,i} + S / (b_{n,j} - b_{n,i}),
        // S = sum_k a_{n+e_j,k} - sum_k a_{n+e_i,k}, n = m - e_j
        const MultiIndex n = m.minus(j);
        const Cell& cn = cells_.at(n);
        const Cell& other = cells_.at(n.plus(i));
        T S(0);
        for (int k = 0; k < d_; ++k) {
          S += c.a[k] - other.a[k];
        }
        T den = cn.b[j] - cn.b[i];
        nonzero(den, m);
        c.b[i] = cn.b[i] + S / den;
      }
    }
  }
}

template <class T>
const typename PropagatedCoefficients<T>::Cell& PropagatedCoefficients<T>::cell(const MultiIndex& n) const {
  auto it = cells_.find(n);
  if (it == cells_.end()) {
    throw Error(ErrorCode::MissingCoefficient,
                "index " + n.str() + " beyond propagated level " + std::to_string(max_level_));
  }
  return it->second;
}

template <class T>
T PropagatedCoefficients<T>::a(const MultiIndex& n, int j) const {
  return cell(n).a.at(j);
}

template <class T>
T PropagatedCoefficients<T>::b(const MultiIndex& n, int j) const {
  return cell(n).b.at(j);
}

template <class T>
void IdentityReport<T>::record(const T& residual, const T& threshold, const std::string& what) {
  ++checked;
  if (residual > max_residual) {
    max_residual = residual;
  }
  if (residual > threshold) {
    ok = false;
    failures.push_back(what + ": residual " + show(residual));
  }
}

namespace {

template <class T>
T scaled_threshold(const T& scale) {
  if constexpr (is_exact_v<T>) {
    return T(0);
  } else {
    return default_tolerance<T>() * std::max(T(1), scale);
  }
}

}  // namespace

template <class T>
IdentityReport<T> verify_recurrences(const RecurrenceTable<T>& table, const MultiIndex& window) {
  const Family<T>& fam = table.family();
  const int d = fam.d();
  IdentityReport<T> rep;
  for (const auto& n : box_indices(window)) {
    const Poly<T>& P = fam.type2(n).P;
    for (int j = 0; j < d; ++j) {
      Poly<T> r = P.shifted_up() - fam.type2(n.plus(j)).P - P * table.b(n, j);
      T scale = P.max_abs_coeff();
      for (int l = 0; l < d; ++l) {
        if (n[l] > 0) {
          const Poly<T>& Pl = fam.type2(n.minus(l)).P;
          r -= Pl * table.a(n, l);
          scale = std::max(scale, Pl.max_abs_coeff());
        }
      }
      rep.record(r.max_abs_coeff(), scaled_threshold(scale),
                 "type II relation at " + n.str() + ", j = " + std::to_string(j + 1));
    }
  }

  // Form relations on each component, n in N^d.
  for (const auto& n : box_indices(window)) {
    if (!n.all_positive()) {
      continue;
    }
    const auto& Qn = fam.type1(n);
    for (int j = 0; j < d; ++j) {
      const MultiIndex down = n.minus(j);
      const bool has_down = down.total() > 0;
      const T bj = table.b(down, j);
      for (int m = 0; m <= d; ++m) {
        if (m == 0 && n.total() < 2) {
          continue;
        }
        auto comp = [m](const TypeI<T>& t) -> const Poly<T>& { return m == 0 ? t.A0 : t.A[m - 1]; };
        const Poly<T>& An = comp(Qn);
        Poly<T> r = An.shifted_up() - An * bj;
        T scale = An.max_abs_coeff();
        if (has_down) {
          r -= comp(fam.type1(down));
        }
        for (int i = 0; i < d; ++i) {
          const Poly<T>& Ai = comp(fam.type1(n.plus(i)));
          r -= Ai * table.a(n, i);
          scale = std::max(scale, Ai.max_abs_coeff());
        }
        rep.record(r.max_abs_coeff(), scaled_threshold(scale),
                   "form relation at " + n.str() + ", j = " + std::to_string(j + 1) + ", component " +
                       std::to_string(m));
      }
    }
  }
  return rep;
}

template <class T>
std::array<T, 3> consistency(const CoefficientProvider<T>& c, const MultiIndex& n, int i, int j) {
  const MultiIndex ni = n.plus(i), nj = n.plus(j);
  std::array<T, 3> r;
  r[0] = (c.b(ni, j) - c.b(n, j)) - (c.b(nj, i) - c.b(n, i));
  T sa(0);
  for (int k = 0; k < c.d(); ++k) {
    sa += c.a(nj, k) - c.a(ni, k);
  }
  r[1] = sa - (c.b(nj, i) * c.b(n, j) - c.b(ni, j) * c.b(n, i));
  if (n[i] == 0) {
    // Both a factors vanish by convention.
    r[2] = T(0);
  } else {
    const MultiIndex low = n.minus(i);
    r[2] = c.a(n, i) * (c.b(n, j) - c.b(n, i)) - c.a(nj, i) * (c.b(low, j) - c.b(low, i));
  }
  return r;
}

template <class T>
BoundsReport<T> bounds_and_order(const RecurrenceTable<T>& table, const MultiIndex& window) {
  BoundsReport<T> rep;
  const auto& sys = table.family().moments().system();
  const auto& geo = table.family().moments().geometry();
  const int d = sys.d();
  if (!geo.bounded) {
    rep.skipped = true;
    rep.note = "unbounded coefficients (Gaussian weights); bounds do not apply";
    return rep;
  }
  const T hull = from_rational<T>(geo.hull_hi - geo.hull_lo);
  const T sup_x = from_rational<T>(geo.R);
  rep.b_bound = d == 1 ? sup_x : T(7 * sup_x);
  std::vector<T> a_bound(d);
  for (int j = 0; j < d; ++j) {
    T half = from_rational<T>((sys.measures[j].hi - sys.measures[j].lo) / 2);
    T f = half * half;
    for (int k = 1; k < d; ++k) {
      f *= hull / from_rational<T>(geo.g_min);
    }
    a_bound[j] = f;
    rep.a_bound = std::max(rep.a_bound, f);
  }
  auto fail = [&](const std::string& s) {
    rep.ok = false;
    rep.failures.push_back(s);
  };
  for (const auto& n : box_indices(window)) {
    for (int j = 0; j < d; ++j) {
      ++rep.checked;
      const std::string at = n.str() + ", j = " + std::to_string(j + 1);
      T a = table.a(n, j), b = table.b(n, j);
      rep.max_a = std::max(rep.max_a, a);
      rep.max_abs_b = std::max(rep.max_abs_b, abs_value(b));
      if (n[j] > 0 && !(a > 0)) {
        fail("a not positive at " + at);
      }
      if (a > a_bound[j]) {
        fail("a above bound at " + at + ": " + show(a));
      }
      if (abs_value(b) > rep.b_bound) {
        fail("|b| above bound at " + at + ": " + show(b));
      }
      if (j + 1 < d && !(b < table.b(n, j + 1))) {
        fail("b not increasing in j at " + at);
      }
    }
  }
  return rep;
}

namespace {

template <class T>
std::vector<RootBracket<T>> all_zeros(const Family<T>& fam, const MultiIndex& n) {
  std::vector<RootBracket<T>> out;
  for (auto& v : type2_zeros(fam, n)) {
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

// x_1 < y_1 < x_2 < ... with |x| = |y| + 1, or x_1 < y_1 < ... < x_m < y_m
// when the sizes agree.
template <class T>
bool strictly_alternate(const std::vector<RootBracket<T>>& x, const std::vector<RootBracket<T>>& y) {
  if (x.size() != y.size() && x.size() != y.size() + 1) {
    return false;
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(x[i].hi < y[i].lo)) {
      return false;
    }
    if (i + 1 < x.size() && !(y[i].hi < x[i + 1].lo)) {
      return false;
    }
  }
  return true;
}

}  // namespace

template <class T>
bool interlacing(const Family<T>& fam, const MultiIndex& n, int j, int k) {
  auto zn = all_zeros(fam, n);
  auto zj = all_zeros(fam, n.plus(j));
  auto zk = all_zeros(fam, n.plus(k));
  if (!strictly_alternate(zj, zn) || !strictly_alternate(zk, zn)) {
    return false;
  }
  if (j == k) {
    return true;
  }
  return j < k ? strictly_alternate(zj, zk) : strictly_alternate(zk, zj);
}

MultiIndex step_line_index(int d, int n) {
  const int m = n / d, i = n % d;
  std::vector<int> v(d, m);
  for (int k = 0; k < i; ++k) {
    v[k] = m + 1;
  }
  return MultiIndex(std::move(v));
}

template <class T>
StepLineTable<T> step_line(const Family<T>& fam, int n_max) {
  const int d = fam.d();
  StepLineTable<T> out;
  out.d = d;
  for (int n = 0; n <= n_max; ++n) {
    const Poly<T>& P = fam.type2(step_line_index(d, n)).P;
    Poly<T> r = P.shifted_up() - fam.type2(step_line_index(d, n + 1)).P;
    T scale = P.max_abs_coeff();
    std::vector<T> g(d + 1, T(0));
    for (int k = 0; k <= d && n - k >= 0; ++k) {
      const Poly<T>& Pk = fam.type2(step_line_index(d, n - k)).P;
      g[k] = r.coeff(n - k);
      r -= Pk * g[k];
      scale = std::max(scale, Pk.max_abs_coeff());
    }
    T res = r.max_abs_coeff();
    out.max_residual = std::max(out.max_residual, res);
    if (res > scaled_threshold(scale)) {
      throw Error(ErrorCode::IdentityViolated, "step-line relation at n = " + std::to_string(n) +
                                                   " leaves residual " + show(res));
    }
    out.gamma.push_back(std::move(g));
  }
  return out;
}

std::vector<BigFloat> step_line_limits(const std::vector<BigFloat>& A, const std::vector<BigFloat>& B, int i) {
  const int d = static_cast<int>(A.size());
  std::vector<BigFloat> out(d + 1, BigFloat(0));
  out[0] = B[i];
  for (const auto& a : A) {
    out[1] += a;
  }
  for (int k = 2; k <= d; ++k) {
    for (int j = 0; j < d; ++j) {
      BigFloat prod = A[j];
      for (int l = 0; l <= k - 2; ++l) {
        // 1-based B_{i-l}, cyclic; 0-based slot (i - l - 1) mod d.
        int s = ((i - l - 1) % d + d) % d;
        prod *= B[j] - B[s];
      }
      out[k] += prod;
    }
  }
  return out;
}

#define MOPTREE_INSTANTIATE(T)                                                                        \
  template class RecurrenceTable<T>;                                                                 \
  template class ConstantCoefficients<T>;                                                            \
  template class PropagatedCoefficients<T>;                                                          \
  template struct IdentityReport<T>;                                                                 \
  template void jacobi_coefficients<T>(const MeasureSpec&, int, std::vector<T>&, std::vector<T>&);  \
  template IdentityReport<T> verify_recurrences<T>(const RecurrenceTable<T>&, const MultiIndex&);    \
  template std::array<T, 3> consistency<T>(const CoefficientProvider<T>&, const MultiIndex&, int, int); \
  template BoundsReport<T> bounds_and_order<T>(const RecurrenceTable<T>&, const MultiIndex&);        \
  template bool interlacing<T>(const Family<T>&, const MultiIndex&, int, int);                       \
  template StepLineTable<T> step_line<T>(const Family<T>&, int);

MOPTREE_INSTANTIATE(Rational)
MOPTREE_INSTANTIATE(BigFloat)

#undef MOPTREE_INSTANTIATE

}  // namespace moptree
