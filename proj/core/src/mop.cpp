#include "moptree/mop.hpp"

#include <mutex>
#include <numeric>
#include <sstream>

namespace moptree {

MultiIndex::MultiIndex(std::vector<int> n) : n_(std::move(n)) {
  for (int v : n_) {
    if (v < 0) {
      throw Error(ErrorCode::InvalidConfig, "multi-index with negative component");
    }
  }
}

MultiIndex MultiIndex::unit(int d, int j) {
  std::vector<int> n(d, 0);
  n.at(j) = 1;
  return MultiIndex(std::move(n));
}

int MultiIndex::total() const { return std::accumulate(n_.begin(), n_.end(), 0); }

MultiIndex MultiIndex::plus(int j) const {
  MultiIndex r = *this;
  ++r.n_.at(j);
  return r;
}

MultiIndex MultiIndex::minus(int j) const {
  if (n_.at(j) == 0) {
    throw Error(ErrorCode::InvalidConfig, "cannot lower component " + std::to_string(j + 1) + " of " + str());
  }
  MultiIndex r = *this;
  --r.n_[j];
  return r;
}

bool MultiIndex::all_positive() const {
  for (int v : n_) {
    if (v <= 0) {
      return false;
    }
  }
  return true;
}

bool MultiIndex::within(const MultiIndex& bound) const {
  if (bound.d() != d()) {
    return false;
  }
  for (int j = 0; j < d(); ++j) {
    if (n_[j] > bound.n_[j]) {
      return false;
    }
  }
  return true;
}

std::string MultiIndex::str() const {
  std::string s = "(";
  for (int j = 0; j < d(); ++j) {
    if (j) {
      s += ",";
    }
    s += std::to_string(n_[j]);
  }
  return s + ")";
}

MultiIndex parse_multi_index(const std::string& text) {
  std::string t;
  for (char c : text) {
    if (c != '(' && c != ')' && c != ' ') {
      t += c;
    }
  }
  std::vector<int> n;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      int v = std::stoi(item, &used);
      if (used != item.size()) {
        throw std::invalid_argument(item);
      }
      n.push_back(v);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "bad multi-index '" + text + "'");
    }
  }
  if (n.empty()) {
    throw Error(ErrorCode::ParseError, "empty multi-index");
  }
  return MultiIndex(std::move(n));
}

std::vector<MultiIndex> box_indices(const MultiIndex& bound) {
  std::vector<MultiIndex> out;
  std::vector<int> cur(bound.d(), 0);
  while (true) {
    out.emplace_back(cur);
    int k = bound.d() - 1;
    while (k >= 0 && cur[k] == bound[k]) {
      cur[k] = 0;
      --k;
    }
    if (k < 0) {
      break;
    }
    ++cur[k];
  }
  return out;
}

template <class T>
T integrate(const MomentTable<T>& mt, int j, const Poly<T>& p) {
  T acc(0);
  for (int k = 0; k <= p.degree(); ++k) {
    acc += p.coeffs()[k] * mt.moment(j, k);
  }
  return acc;
}

template <class T>
Poly<T> associated(const MomentTable<T>& mt, int j, const Poly<T>& p) {
  // (z^k - x^k)/(z - x) = sum_{i<k} z^i x^{k-1-i}
  const int deg = p.degree();
  if (deg < 1) {
    return {};
  }
  std::vector<T> m = mt.moments(j, deg - 1);
  std::vector<T> out(deg, T(0));
  for (int i = 0; i < deg; ++i) {
    for (int k = i + 1; k <= deg; ++k) {
      out[i] += p.coeffs()[k] * m[k - 1 - i];
    }
  }
  return Poly<T>(std::move(out));
}

namespace {

// Rows (j, l < n_j), columns x^k for k < |n|: the type II moment matrix.
// The type I matrix is its transpose.
template <class T>
Matrix<T> type2_matrix(const std::vector<std::vector<T>>& m, const MultiIndex& n) {
  const int N = n.total();
  Matrix<T> a(N, N);
  int row = 0;
  for (int j = 0; j < n.d(); ++j) {
    for (int l = 0; l < n[j]; ++l, ++row) {
      for (int k = 0; k < N; ++k) {
        a(row, k) = m[j][l + k];
      }
    }
  }
  return a;
}

template <class T>
std::vector<std::vector<T>> moment_rows(const MomentTable<T>& mt, int l_max) {
  std::vector<std::vector<T>> m;
  for (int j = 0; j < mt.d(); ++j) {
    m.push_back(mt.moments(j, l_max));
  }
  return m;
}

template <class T>
bool is_singular_error(const Error& e) {
  return e.code() == ErrorCode::SingularMatrix || e.code() == ErrorCode::ResidualTooLarge;
}

}  // namespace

template <class T>
Family<T>::Family(std::shared_ptr<const MomentTable<T>> mt) : mt_(std::move(mt)) {}

template <class T>
TypeII<T> Family<T>::solve_type2(const MultiIndex& n) const {
  if (n.d() != d()) {
    throw Error(ErrorCode::InvalidConfig, "index " + n.str() + " does not match d = " + std::to_string(d()));
  }
  const int N = n.total();
  TypeII<T> out;
  out.index = n;
  std::vector<T> coef(N + 1, T(0));
  coef[N] = T(1);
  if (N > 0) {
    auto m = moment_rows(*mt_, 2 * N);
    Matrix<T> a = type2_matrix(m, n);
    std::vector<T> rhs;
    for (int j = 0; j < n.d(); ++j) {
      for (int l = 0; l < n[j]; ++l) {
        rhs.push_back(T(-m[j][l + N]));
      }
    }
    std::vector<T> x;
    try {
      x = solve_linear(a, rhs);
    } catch (const Error& e) {
      if (is_singular_error<T>(e)) {
        throw Error(ErrorCode::NotNormal, "type II system at " + n.str() + ": " + e.context());
      }
      throw;
    }
    for (int k = 0; k < N; ++k) {
      coef[k] = x[k];
    }
  }
  out.P = Poly<T>(std::move(coef));
  for (int j = 0; j < d(); ++j) {
    out.assoc.push_back(associated(*mt_, j, out.P));
  }
  return out;
}

template <class T>
TypeI<T> Family<T>::solve_type1(const MultiIndex& n) const {
  if (n.d() != d()) {
    throw Error(ErrorCode::InvalidConfig, "index " + n.str() + " does not match d = " + std::to_string(d()));
  }
  const int N = n.total();
  if (N < 1) {
    throw Error(ErrorCode::InvalidConfig, "type I forms need |n| >= 1");
  }
  auto m = moment_rows(*mt_, 2 * N);
  // Unknowns: coefficients of A^(j) grouped by j; rows l = 0..N-1.
  Matrix<T> a(N, N);
  for (int l = 0; l < N; ++l) {
    int col = 0;
    for (int j = 0; j < n.d(); ++j) {
      for (int k = 0; k < n[j]; ++k, ++col) {
        a(l, col) = m[j][l + k];
      }
    }
  }
  std::vector<T> rhs(N, T(0));
  rhs[N - 1] = T(1);
  std::vector<T> x;
  try {
    x = solve_linear(a, rhs);
  } catch (const Error& e) {
    if (is_singular_error<T>(e)) {
      throw Error(ErrorCode::NotNormal, "type I system at " + n.str() + ": " + e.context());
    }
    throw;
  }
  TypeI<T> out;
  out.index = n;
  int col = 0;
  for (int j = 0; j < n.d(); ++j) {
    std::vector<T> c(x.begin() + col, x.begin() + col + n[j]);
    col += n[j];
    out.A.emplace_back(std::move(c));
    out.A0 += associated(*mt_, j, out.A.back());
  }
  return out;
}

template <class T>
const TypeII<T>& Family<T>::type2(const MultiIndex& n) const {
  {
    std::shared_lock lock(mutex_);
    auto it = type2_.find(n);
    if (it != type2_.end()) {
      return *it->second;
    }
  }
  auto value = std::make_unique<TypeII<T>>(solve_type2(n));
  std::unique_lock lock(mutex_);
  auto [it, inserted] = type2_.emplace(n, std::move(value));
  return *it->second;
}

template <class T>
const TypeI<T>& Family<T>::type1(const MultiIndex& n) const {
  {
    std::shared_lock lock(mutex_);
    auto it = type1_.find(n);
    if (it != type1_.end()) {
      return *it->second;
    }
  }
  auto value = std::make_unique<TypeI<T>>(solve_type1(n));
  std::unique_lock lock(mutex_);
  auto [it, inserted] = type1_.emplace(n, std::move(value));
  return *it->second;
}

template <class T>
T type2_residual(const Family<T>& fam, const MultiIndex& n) {
  const auto& t = fam.type2(n);
  T worst(0);
  for (int j = 0; j < n.d(); ++j) {
    Poly<T> q = t.P;
    for (int l = 0; l < n[j]; ++l) {
      T r = abs_value(integrate(fam.moments(), j, q));
      if (r > worst) {
        worst = r;
      }
      q = q.shifted_up();
    }
  }
  if (t.P.degree() != n.total() || !t.P.is_monic()) {
    return T(1);
  }
  return worst;
}

template <class T>
T type1_residual(const Family<T>& fam, const MultiIndex& n) {
  const auto& t = fam.type1(n);
  const int N = n.total();
  T worst(0);
  for (int l = 0; l < N; ++l) {
    T s(0);
    for (int j = 0; j < n.d(); ++j) {
      for (int k = 0; k <= t.A[j].degree(); ++k) {
        s += t.A[j].coeffs()[k] * fam.moments().moment(j, l + k);
      }
    }
    T target = l == N - 1 ? T(1) : T(0);
    T r = abs_value(T(s - target));
    if (r > worst) {
      worst = r;
    }
  }
  for (int j = 0; j < n.d(); ++j) {
    if (t.A[j].degree() > n[j] - 1) {
      return T(1);
    }
  }
  return worst;
}

template <class T>
NormalityReport normality_report(const std::vector<std::vector<T>>& moments, const MultiIndex& n) {
  NormalityReport r;
  const int N = n.total();
  if (N == 0) {
    r.normal = true;
    r.degP = 0;
    r.detSign = 1;
    return r;
  }
  for (int j = 0; j < n.d(); ++j) {
    if (static_cast<int>(moments.at(j).size()) < 2 * N) {
      throw Error(ErrorCode::InvalidConfig, "not enough moments for " + n.str());
    }
  }
  Matrix<T> a = type2_matrix(moments, n);
  r.detSign = determinant_sign(a);
  r.normal = r.detSign != 0;
  // Nonsingular type II matrix forces deg P = |n|; otherwise a solution of
  // lower degree exists.
  r.degP = r.normal ? N : -1;
  if (!r.normal) {
    // Smallest degree of a nonzero polynomial meeting the homogeneous
    // conditions: first k whose leading k+1 columns are dependent.
    for (int deg = 0; deg < N && r.degP < 0; ++deg) {
      Matrix<T> gram(deg + 1, deg + 1);
      for (int p = 0; p <= deg; ++p) {
        for (int q = 0; q <= deg; ++q) {
          T s(0);
          for (int i = 0; i < N; ++i) {
            s += a(i, p) * a(i, q);
          }
          gram(p, q) = s;
        }
      }
      if (determinant_sign(gram) == 0) {
        r.degP = deg;
      }
    }
  }
  return r;
}

template <class T>
NormalityReport normality_report(const MomentTable<T>& mt, const MultiIndex& n) {
  return normality_report(moment_rows(mt, 2 * std::max(n.total(), 1)), n);
}

template <class T>
std::vector<std::vector<RootBracket<T>>> type2_zeros(const Family<T>& fam, const MultiIndex& n) {
  const auto& sys = fam.moments().system();
  const auto& t = fam.type2(n);
  std::vector<std::vector<RootBracket<T>>> out;
  for (int j = 0; j < n.d(); ++j) {
    const auto& m = sys.measures[j];
    if (m.whole_line) {
      throw Error(ErrorCode::InvalidConfig, "zeros per interval need bounded supports");
    }
    out.push_back(isolate_root_brackets(t.P, from_rational<T>(m.lo), from_rational<T>(m.hi), n[j]));
  }
  return out;
}

template <class T>
std::vector<RootBracket<T>> type1_zeros(const Family<T>& fam, const MultiIndex& n, int j) {
  const auto& m = fam.moments().system().measures.at(j);
  if (m.whole_line) {
    throw Error(ErrorCode::InvalidConfig, "zeros per interval need bounded supports");
  }
  if (n[j] <= 1) {
    return {};
  }
  return isolate_root_brackets(fam.type1(n).A[j], from_rational<T>(m.lo), from_rational<T>(m.hi), n[j] - 1);
}

template <class T>
SecondKindValues second_kind(const Family<T>& fam, const MultiIndex& n, const Complex<BigFloat>& z) {
  const auto& sys = fam.moments().system();
  const auto& t2 = fam.type2(n);
  std::vector<Complex<BigFloat>> mu;
  for (int j = 0; j < fam.d(); ++j) {
    mu.push_back(markov(sys, j, z));
  }
  SecondKindValues out;
  const Poly<BigFloat> P = t2.P.template convert<BigFloat>();
  const Complex<BigFloat> pz = P(z);
  for (int j = 0; j < fam.d(); ++j) {
    out.R.push_back(pz * mu[j] - t2.assoc[j].template convert<BigFloat>()(z));
  }
  if (n.total() == 0) {
    out.L = Complex<BigFloat>();
    return out;
  }
  const auto& t1 = fam.type1(n);
  Complex<BigFloat> L = Complex<BigFloat>() - t1.A0.template convert<BigFloat>()(z);
  for (int j = 0; j < fam.d(); ++j) {
    L = L + t1.A[j].template convert<BigFloat>()(z) * mu[j];
  }
  out.L = L;
  return out;
}

template <class T>
FormParts<T> form_parts(const Family<T>& fam, const MultiIndex& n, const Complex<T>& z) {
  const auto& t1 = fam.type1(n);
  FormParts<T> out;
  for (int j = 0; j < fam.d(); ++j) {
    out.coef.push_back(t1.A[j](z));
  }
  out.coef0 = t1.A0(z);
  return out;
}

#define MOPTREE_INSTANTIATE(T)                                                                               \
  template T integrate<T>(const MomentTable<T>&, int, const Poly<T>&);                                      \
  template Poly<T> associated<T>(const MomentTable<T>&, int, const Poly<T>&);                               \
  template class Family<T>;                                                                                 \
  template T type2_residual<T>(const Family<T>&, const MultiIndex&);                                        \
  template T type1_residual<T>(const Family<T>&, const MultiIndex&);                                        \
  template NormalityReport normality_report<T>(const MomentTable<T>&, const MultiIndex&);                   \
  template NormalityReport normality_report<T>(const std::vector<std::vector<T>>&, const MultiIndex&);      \
  template std::vector<std::vector<RootBracket<T>>> type2_zeros<T>(const Family<T>&, const MultiIndex&);    \
  template std::vector<RootBracket<T>> type1_zeros<T>(const Family<T>&, const MultiIndex&, int);            \
  template SecondKindValues second_kind<T>(const Family<T>&, const MultiIndex&, const Complex<BigFloat>&);  \
  template FormParts<T> form_parts<T>(const Family<T>&, const MultiIndex&, const Complex<T>&);

MOPTREE_INSTANTIATE(Rational)
MOPTREE_INSTANTIATE(BigFloat)

#undef MOPTREE_INSTANTIATE

}  // namespace moptree
