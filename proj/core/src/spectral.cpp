#include "moptree/spectral.hpp"

#include "moptree/linalg.hpp"
#include "moptree/quadrature.hpp"
#include "moptree/systems.hpp"

#include <boost/math/constants/constants.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace moptree {

const char* green_method_name(GreenMethod m) {
  switch (m) {
    case GreenMethod::direct_solve: return "direct-solve";
    case GreenMethod::polynomial_formula: return "polynomial-formula";
    case GreenMethod::continued_fraction: return "continued-fraction";
  }
  return "direct-solve";
}

namespace {

template <class T>
BigFloat magnitude(const Complex<T>& v) {
  return abs(Complex<BigFloat>(to_bigfloat(v.re), to_bigfloat(v.im)));
}

// v * sqrt(ratio); exact only when ratio is a rational square.
template <class T>
Complex<T> times_sqrt(const Complex<T>& v, const T& ratio) {
  if constexpr (is_exact_v<T>) {
    Integer num = numerator(ratio), den = denominator(ratio);
    Integer rn = sqrt(num), rd = sqrt(den);
    if (rn * rn != num || rd * rd != den) {
      throw Error(ErrorCode::InvalidConfig,
                  "symmetrized exact value is irrational here (m ratio " + to_string(ratio) + "); use the K-form");
    }
    return v * Complex<T>(Rational(rn) / Rational(rd));
  } else {
    return v * Complex<T>(sqrt(ratio));
  }
}

constexpr int kDenseLimit = 400;

template <class T>
std::vector<Complex<T>> dense_column(const TreeOperator<T>& op, int X, const Complex<T>& z, int at) {
  const Tree& t = *op.tree;
  const int n = t.size();
  auto near = [&](const std::string& why) {
    return Error(ErrorCode::NearSpectrum, "zero pivot at vertex " + std::to_string(at) + " (projection " +
                                              t.projection(at).str() + "), " + why);
  };
  if (n > kDenseLimit) {
    throw near("tree too large for the dense fallback");
  }
  Matrix<Complex<T>> m(n, n);
  for (int v = 0; v < n; ++v) {
    m(v, v) = Complex<T>(op.V[v]) - z;
    if (v > 0) {
      m(v, t.parent[v]) = Complex<T>(1);
      m(t.parent[v], v) = Complex<T>(op.W[v]);
    }
  }
  std::vector<Complex<T>> e(n);
  e[X] = Complex<T>(1);
  try {
    return solve_linear(m, e);
  } catch (const Error& err) {
    throw near(std::string("operator singular at z: ") + err.what());
  }
}

}  // namespace

template <class T>
std::vector<Complex<T>> resolvent_column(const TreeOperator<T>& op, int X, const Complex<T>& z) {
  const Tree& t = *op.tree;
  const int n = t.size();
  if (X < 0 || X >= n) {
    throw Error(ErrorCode::InvalidConfig, "vertex " + std::to_string(X) + " out of range");
  }
  std::vector<Complex<T>> inv(n), rhs(n), u(n);
  rhs[X] = Complex<T>(1);
  for (int v = n - 1; v >= 0; --v) {
    Complex<T> piv = Complex<T>(op.V[v]) - z;
    for (int c = t.first_child[v]; c < t.first_child[v] + t.child_count[v]; ++c) {
      piv -= Complex<T>(op.W[c]) * inv[c];
      if (!is_zero(rhs[c])) {
        rhs[v] -= Complex<T>(op.W[c]) * rhs[c] * inv[c];
      }
    }
    if (is_zero(piv)) {
      // z is an eigenvalue of the subtree at v; (K - z) itself may still be invertible.
      return dense_column(op, X, z, v);
    }
    inv[v] = Complex<T>(1) / piv;
  }
  u[0] = rhs[0] * inv[0];
  for (int v = 1; v < n; ++v) {
    u[v] = (rhs[v] - u[t.parent[v]]) * inv[v];
  }

  if constexpr (!is_exact_v<T>) {
    BigFloat scale = abs(z), umax(0), worst(0);
    for (int v = 0; v < n; ++v) {
      scale = std::max(scale, BigFloat(abs(op.V[v]) + op.W[v]));
      umax = std::max(umax, abs(u[v]));
    }
    for (int v = 0; v < n; ++v) {
      Complex<T> r = (Complex<T>(op.V[v]) - z) * u[v];
      if (v > 0) {
        r += u[t.parent[v]];
      }
      for (int c = t.first_child[v]; c < t.first_child[v] + t.child_count[v]; ++c) {
        r += Complex<T>(op.W[c]) * u[c];
      }
      if (v == X) {
        r -= Complex<T>(1);
      }
      worst = std::max(worst, abs(r));
    }
    BigFloat tol = sqrt(default_tolerance<BigFloat>()) * std::max(BigFloat(1), BigFloat(scale * umax));
    if (worst > tol) {
      throw Error(ErrorCode::NearSpectrum, "resolvent residual " + to_string(worst, 6) + " at z = " +
                                               to_string(z.re, 12) + " + " + to_string(z.im, 12) + "i");
    }
  }
  return u;
}

template <class T>
GreenValue<T> green_direct(const TreeOperator<T>& op, int Y, int X, const Complex<T>& z) {
  auto colX = resolvent_column(op, X, z);
  auto colY = resolvent_column(op, Y, conj(z));
  const Complex<T> g = colX.at(Y);
  // m_X^2 G_K(Y,X,z) = m_Y^2 conj(G_K(X,Y,conj z))
  Complex<T> lhs = Complex<T>(op.msq[X]) * g;
  Complex<T> rhs = Complex<T>(op.msq[Y]) * conj(colY[X]);
  bool ok;
  if constexpr (is_exact_v<T>) {
    ok = lhs == rhs;
  } else {
    ok = abs(lhs - rhs) <= sqrt(default_tolerance<T>()) * std::max(T(1), T(abs(lhs)));
  }
  if (!ok) {
    throw Error(ErrorCode::SolveFailed, "resolvent symmetry fails between vertices " + std::to_string(X) + " and " +
                                            std::to_string(Y));
  }
  GreenValue<T> out;
  out.Y = Y;
  out.X = X;
  out.z = z;
  out.value = op.symmetrized ? times_sqrt(g, T(op.msq[X] / op.msq[Y])) : g;
  out.method = GreenMethod::direct_solve;
  return out;
}

template <class T>
GreenValue<T> green_formula_finite(const Family<T>& fam, const TreeOperator<T>& op, int Y, const Complex<T>& z) {
  const Tree& t = *op.tree;
  if (t.kind != TreeKind::finite) {
    throw Error(ErrorCode::InvalidConfig, "finite-tree formula on a truncated tree");
  }
  Complex<T> den;
  for (int j = 0; j < t.d; ++j) {
    if (op.kappa[j] != 0) {
      den += Complex<T>(op.kappa[j]) * fam.type2(t.N.plus(j)).P(z);
    }
  }
  if (is_zero(den)) {
    throw Error(ErrorCode::DenominatorZero, "sum kappa_j P_{N+e_j} vanishes at z");
  }
  Complex<T> g = -fam.type2(t.projection(Y)).P(z) / den;
  GreenValue<T> out;
  out.Y = Y;
  out.X = 0;
  out.z = z;
  out.value = op.symmetrized ? times_sqrt(g, T(1 / op.msq[Y])) : g;
  out.method = GreenMethod::polynomial_formula;
  return out;
}

template <class T>
GreenValue<T> cf_finite(const CoefficientProvider<T>& c, const MultiIndex& N, int j, const Complex<T>& z) {
  const int d = c.d();
  std::map<MultiIndex, Complex<T>> inv;  // 1 / M^(1)_n
  auto label_inverse = [&](const MultiIndex& n, const Complex<T>& base, int l) {
    // 1/M^(l) = 1/M^(1) + b_{n,l} - b_{n,1}
    return l == 0 ? base : base + Complex<T>(c.b(n, l)) - Complex<T>(c.b(n, 0));
  };
  auto fail = [&](const MultiIndex& n) {
    throw Error(ErrorCode::DivisionByZero, "continued fraction breaks down at " + n.str());
  };
  // Indices in increasing total order so every lower neighbor is ready.
  std::vector<MultiIndex> order = box_indices(N);
  std::stable_sort(order.begin(), order.end(),
                   [](const MultiIndex& a, const MultiIndex& b) { return a.total() < b.total(); });
  for (const auto& n : order) {
    Complex<T> den = Complex<T>(c.b(n, 0)) - z;
    for (int l = 0; l < d; ++l) {
      if (n[l] == 0) {
        continue;
      }
      const MultiIndex low = n.minus(l);
      Complex<T> il = label_inverse(low, inv.at(low), l);
      if (is_zero(il)) {
        fail(low);
      }
      den -= Complex<T>(c.a(n, l)) / il;
    }
    if (is_zero(den)) {
      fail(n);
    }
    inv.emplace(n, den);
  }
  Complex<T> top = label_inverse(N, inv.at(N), j);
  if (is_zero(top)) {
    fail(N);
  }
  GreenValue<T> out;
  out.z = z;
  out.value = Complex<T>(1) / top;
  out.method = GreenMethod::continued_fraction;
  return out;
}

Complex<BigFloat> theta_formula(const MomentTable<BigFloat>& mt, const std::vector<BigFloat>& kappa,
                                const Complex<BigFloat>& z) {
  auto g = gamma_constants(mt, kappa);
  Complex<BigFloat> num, den;
  for (int j = 0; j < mt.d(); ++j) {
    auto m = markov(mt.system(), j, z);
    num += Complex<BigFloat>(g.gamma_tilde[j]) * m;
    den += Complex<BigFloat>(g.gamma[j]) * m;
  }
  if (is_zero(den)) {
    throw Error(ErrorCode::DenominatorZero, "sum gamma_j mu_j^ vanishes");
  }
  return num / den;
}

Complex<BigFloat> theta_formula_d2(const MomentTable<BigFloat>& mt, const std::vector<BigFloat>& kappa,
                                   const Complex<BigFloat>& z) {
  if (mt.d() != 2) {
    throw Error(ErrorCode::InvalidConfig, "closed form needs d = 2");
  }
  const BigFloat xi = xi_constant(mt);
  const Complex<BigFloat> n1(mt.moment(0, 0)), n2(mt.moment(1, 0));
  const auto m1 = markov(mt.system(), 0, z), m2 = markov(mt.system(), 1, z);
  Complex<BigFloat> den = Complex<BigFloat>(kappa[1]) * m1 * n2 + Complex<BigFloat>(kappa[0]) * m2 * n1;
  if (is_zero(den)) {
    throw Error(ErrorCode::DenominatorZero, "closed-form denominator vanishes");
  }
  return Complex<BigFloat>(xi) * (m1 * n2 - m2 * n1) / den;
}

ThetaValues theta_infinite(const RecurrenceTable<BigFloat>& table, const std::vector<BigFloat>& kappa,
                           const Complex<BigFloat>& z, int D) {
  auto op = assemble_infinite(table, kappa, D, false);
  ThetaValues out;
  out.truncated = resolvent_column(op, 0, z)[0];
  out.formula = theta_formula(table.family().moments(), kappa, z);
  return out;
}

Complex<BigFloat> green_formula_infinite(const RecurrenceTable<BigFloat>& table, const TreeOperator<BigFloat>& op,
                                         int Y, const Complex<BigFloat>& z) {
  const auto& mt = table.family().moments();
  auto g = gamma_constants(mt, op.kappa);
  Complex<BigFloat> den;
  for (int j = 0; j < mt.d(); ++j) {
    den += Complex<BigFloat>(g.gamma[j]) * markov(mt.system(), j, z);
  }
  if (is_zero(den)) {
    throw Error(ErrorCode::DenominatorZero, "sum gamma_j mu_j^ vanishes");
  }
  Complex<BigFloat> L = second_kind(table.family(), op.tree->projection(Y), z).L;
  Complex<BigFloat> gk = L / den;
  return op.symmetrized ? gk / Complex<BigFloat>(sqrt(op.msq[Y])) : gk;
}

Complex<BigFloat> cf_infinite(const RecurrenceTable<BigFloat>& table, const std::vector<BigFloat>& kappa,
                              const Complex<BigFloat>& z, int D) {
  if (D < 1) {
    throw Error(ErrorCode::InvalidConfig, "continued fraction needs depth >= 1");
  }
  const int d = table.d();
  const int base = d;  // |Pi(root)|
  std::map<MultiIndex, Complex<BigFloat>> Lcache;
  auto L = [&](const MultiIndex& n) {
    auto it = Lcache.find(n);
    if (it == Lcache.end()) {
      it = Lcache.emplace(n, second_kind(table.family(), n, z).L).first;
    }
    return it->second;
  };
  std::map<std::pair<MultiIndex, int>, Complex<BigFloat>> memo;
  auto inverse = [](const Complex<BigFloat>& v, const MultiIndex& at) {
    if (is_zero(v)) {
      throw Error(ErrorCode::DivisionByZero, "continued fraction breaks down at " + at.str());
    }
    return Complex<BigFloat>(1) / v;
  };
  // Theta of the subtree hanging at a vertex with projection p and label l.
  std::function<Complex<BigFloat>(const MultiIndex&, int)> theta = [&](const MultiIndex& p, int l) {
    auto key = std::make_pair(p, l);
    auto it = memo.find(key);
    if (it != memo.end()) {
      return it->second;
    }
    const MultiIndex up = p.minus(l);
    Complex<BigFloat> v;
    if (p.total() - base == D) {
      Complex<BigFloat> lu = L(up);
      v = -L(p) * inverse(lu, up);
    } else {
      Complex<BigFloat> den = Complex<BigFloat>(table.b(up, l)) - z;
      for (int i = 0; i < d; ++i) {
        den -= Complex<BigFloat>(table.a(p, i)) * theta(p.plus(i), i);
      }
      v = inverse(den, p);
    }
    memo.emplace(key, v);
    return v;
  };
  const MultiIndex one = MultiIndex::ones(d);
  Complex<BigFloat> den = -z;
  for (int j = 0; j < d; ++j) {
    den += Complex<BigFloat>(kappa[j] * table.b(one.minus(j), j));
  }
  for (int i = 0; i < d; ++i) {
    den -= Complex<BigFloat>(table.a(one, i)) * theta(one.plus(i), i);
  }
  return inverse(den, one);
}

BigFloat density_kuk1(const MomentTable<BigFloat>& mt, const BigFloat& x) {
  if (mt.d() != 2) {
    throw Error(ErrorCode::InvalidConfig, "the density formula needs d = 2");
  }
  const auto& sys = mt.system();
  const BigFloat xi = xi_constant(mt);
  const BigFloat ratio = mt.moment(0, 0) / mt.moment(1, 0);
  auto inside = [&](int j) {
    const auto& m = sys.measures[j];
    return x > to_bigfloat(m.lo) && x < to_bigfloat(m.hi);
  };
  if (inside(0)) {
    // w_2 = 0 here; mu_2^ is real and negative left of Delta_2.
    auto m1 = markov_boundary(sys, 0, x, +1);
    BigFloat m2 = markov(sys, 1, Complex<BigFloat>(x)).re;
    return xi * ratio * (-m2 * weight_value(sys.measures[0], x)) / norm2(m1);
  }
  if (inside(1)) {
    BigFloat m1 = markov(sys, 0, Complex<BigFloat>(x)).re;
    return xi * ratio * weight_value(sys.measures[1], x) / m1;
  }
  throw Error(ErrorCode::PointNotInterior, to_string(x, 20) + " is not interior to either interval");
}

BigFloat density_mass(const MomentTable<BigFloat>& mt, int order, int levels) {
  BigFloat total(0);
  for (const auto& m : mt.system().measures) {
    total += quadrature_graded<BigFloat>([&](const BigFloat& x) { return density_kuk1(mt, x); }, to_bigfloat(m.lo),
                                         to_bigfloat(m.hi), order, levels);
  }
  return total;
}

DensitySamples sample_density(const MomentTable<BigFloat>& mt, int panels, int order) {
  DensitySamples s;
  const GaussRule& rule = gauss_legendre(order);
  for (const auto& m : mt.system().measures) {
    const BigFloat lo = to_bigfloat(m.lo), width = (to_bigfloat(m.hi) - lo) / panels;
    for (int p = 0; p < panels; ++p) {
      const BigFloat a = lo + width * p, half = width / 2;
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        BigFloat t = a + half * (1 + rule.nodes[k]);
        s.t.push_back(t);
        s.weighted.push_back(rule.weights[k] * half * density_kuk1(mt, t));
      }
    }
  }
  return s;
}

BigFloat smooth_density(const DensitySamples& s, const BigFloat& x, const BigFloat& eps) {
  const BigFloat pi = boost::math::constants::pi<BigFloat>();
  BigFloat acc(0);
  for (std::size_t k = 0; k < s.t.size(); ++k) {
    BigFloat dx = x - s.t[k];
    acc += s.weighted[k] * eps / (pi * (dx * dx + eps * eps));
  }
  return acc;
}

template <class T>
TkReport<T> multiplication_Tk(const RecurrenceTable<T>& table, int k_max, int D) {
  const Family<T>& fam = table.family();
  const auto& mt = fam.moments();
  if (fam.d() != 2) {
    throw Error(ErrorCode::InvalidConfig, "multiplication operators need d = 2");
  }
  const MultiIndex zero = MultiIndex::zero(2);
  const T shift = table.b(zero, 0) - table.b(zero, 1);
  const T a2 = fam.type1(MultiIndex({1, 1})).A[1].coeff(0);
  TkReport<T> rep;
  rep.T_k.push_back(Poly<T>::constant(T(1)));
  for (int k = 0; k < k_max; ++k) {
    const Poly<T>& tk = rep.T_k.back();
    T c = shift * a2 * integrate(mt, 1, tk.shifted_up());
    rep.T_k.push_back(tk.shifted_up() + Poly<T>::constant(c));
  }

  auto op = assemble_infinite(table, {T(1), T(0)}, D, false);
  const Tree& t = *op.tree;
  std::vector<T> f(t.size(), T(0));
  f[0] = T(1);
  const int kmax = std::min(k_max, D - 2);
  for (int k = 0; k <= kmax; ++k) {
    std::map<MultiIndex, T> rhs;
    for (int v = 0; v < t.size(); ++v) {
      const MultiIndex n = t.projection(v);
      auto it = rhs.find(n);
      if (it == rhs.end()) {
        const auto& q = fam.type1(n);
        T s(0);
        for (int j = 0; j < 2; ++j) {
          s += integrate(mt, j, (rep.T_k[k] * q.A[j]).shifted_up());
        }
        it = rhs.emplace(n, s).first;
      }
      ++rep.checked;
      T diff = f[v] - it->second;
      if (!is_zero(diff)) {
        BigFloat r = abs(to_bigfloat(diff)) / sqrt(to_bigfloat(op.msq[v]));
        rep.max_residual = std::max(rep.max_residual, r);
        if constexpr (is_exact_v<T>) {
          rep.ok = false;
        } else if (r > sqrt(default_tolerance<BigFloat>())) {
          rep.ok = false;
        }
      }
    }
    // f <- K f
    std::vector<T> g(t.size());
    for (int v = 0; v < t.size(); ++v) {
      T acc = op.V[v] * f[v];
      if (v > 0) {
        acc += f[t.parent[v]];
      }
      for (int c = t.first_child[v]; c < t.first_child[v] + t.child_count[v]; ++c) {
        acc += op.W[c] * f[c];
      }
      g[v] = std::move(acc);
    }
    f = std::move(g);
  }
  return rep;
}

SupportReport spectral_support_check(const RecurrenceTable<BigFloat>& table, const MultiIndex& N, int j,
                                     const BigFloat& weight_cutoff, const BigFloat& root_tolerance) {
  std::vector<BigFloat> kappa(table.d(), BigFloat(0));
  kappa.at(j) = 1;
  auto op = assemble_finite(table, kappa, N, true);
  const Tree& t = *op.tree;
  SupportReport rep;
  rep.vertices = t.size();
  // Lanczos from e_O with full reorthogonalization: the Krylov space of the
  // root vector carries exactly the root spectral measure.
  const int n = t.size();
  auto matvec = [&](const std::vector<BigFloat>& x) {
    std::vector<BigFloat> y(n);
    for (int v = 0; v < n; ++v) {
      BigFloat acc = op.V[v] * x[v];
      if (v > 0) {
        acc += op.upper(v) * x[t.parent[v]];
      }
      for (int c = t.first_child[v]; c < t.first_child[v] + t.child_count[v]; ++c) {
        acc += op.upper(c) * x[c];
      }
      y[v] = std::move(acc);
    }
    return y;
  };
  auto dot = [&](const std::vector<BigFloat>& x, const std::vector<BigFloat>& y) {
    BigFloat acc(0);
    for (int v = 0; v < n; ++v) {
      acc += x[v] * y[v];
    }
    return acc;
  };
  const BigFloat stop = sqrt(default_tolerance<BigFloat>()) * operator_norm_bound(op);
  std::vector<std::vector<BigFloat>> basis{std::vector<BigFloat>(n, BigFloat(0))};
  basis[0][0] = 1;
  std::vector<BigFloat> alpha, beta;
  while (true) {
    std::vector<BigFloat> r = matvec(basis.back());
    alpha.push_back(dot(r, basis.back()));
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) {
        BigFloat h = dot(r, q);
        for (int v = 0; v < n; ++v) {
          r[v] -= h * q[v];
        }
      }
    }
    BigFloat nr = sqrt(dot(r, r));
    if (nr <= stop || static_cast<int>(basis.size()) == n) {
      break;
    }
    beta.push_back(nr);
    for (auto& x : r) {
      x /= nr;
    }
    basis.push_back(std::move(r));
  }
  const int k_dim = static_cast<int>(alpha.size());
  Matrix<BigFloat> T(k_dim, k_dim);
  for (int k = 0; k < k_dim; ++k) {
    T(k, k) = alpha[k];
    if (k + 1 < k_dim) {
      T(k, k + 1) = T(k + 1, k) = beta[k];
    }
  }
  auto eig = symmetric_eigen(T);
  const auto& fam = table.family();
  std::vector<BigFloat> roots;
  for (const auto& v : type2_zeros(fam, N.plus(j))) {
    for (const auto& b : v) {
      roots.push_back(b.mid());
    }
  }
  std::vector<BigFloat> all_w(k_dim);
  for (int k = 0; k < k_dim; ++k) {
    all_w[k] = eig.vectors(0, k) * eig.vectors(0, k);
    rep.weight_sum += all_w[k];
    if (all_w[k] <= weight_cutoff) {
      continue;
    }
    const BigFloat& lam = eig.values[k];
    BigFloat best = -1;
    for (const auto& r : roots) {
      BigFloat dist = abs(lam - r);
      if (best < 0 || dist < best) {
        best = dist;
      }
    }
    rep.max_root_distance = std::max(rep.max_root_distance, best);
    if (best < 0 || best > root_tolerance) {
      rep.ok = false;
      rep.failures.push_back("eigenvalue " + to_string(lam, 20) + " with weight " + to_string(all_w[k], 6) +
                             " is off the zeros");
    }
    if (rep.eigenvalues.empty() || lam - rep.eigenvalues.back() > root_tolerance) {
      ++rep.distinct_support;
    }
    rep.eigenvalues.push_back(lam);
    rep.weights.push_back(all_w[k]);
  }
  const std::vector<Complex<BigFloat>> points{
      {BigFloat(2), BigFloat(1)}, {BigFloat(-3), BigFloat(0)}, {BigFloat(5), BigFloat(0)},
      {BigFloat(3) / 10, BigFloat(7) / 10}, {BigFloat(0), BigFloat(3)}};
  const auto& PN = fam.type2(N).P;
  const auto& PN1 = fam.type2(N.plus(j)).P;
  for (const auto& z : points) {
    Complex<BigFloat> s;
    for (int k = 0; k < k_dim; ++k) {
      s += Complex<BigFloat>(all_w[k]) / (Complex<BigFloat>(eig.values[k]) - z);
    }
    Complex<BigFloat> m = -PN(z) / PN1(z);
    rep.max_transform_error = std::max(rep.max_transform_error, abs(s - m));
  }
  if (rep.max_transform_error > root_tolerance) {
    rep.ok = false;
    rep.failures.push_back("Stieltjes transform differs by " + to_string(rep.max_transform_error, 6));
  }
  if (abs(rep.weight_sum - 1) > root_tolerance) {
    rep.ok = false;
    rep.failures.push_back("weights sum to " + to_string(rep.weight_sum, 20));
  }
  return rep;
}

std::vector<int> random_path(int d, int steps, std::uint64_t seed, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial)};
  std::mt19937_64 gen(seq);
  std::uniform_int_distribution<int> pick(0, d - 1);
  std::vector<int> labels(steps);
  for (auto& l : labels) {
    l = pick(gen);
  }
  return labels;
}

RandomPathReport random_path_stats(const CoefficientProvider<BigFloat>& c, const std::vector<BigFloat>& A,
                                   int steps, std::uint64_t seed, int trials) {
  const int d = c.d();
  if (static_cast<int>(A.size()) != d || steps < 1 || trials < 2) {
    throw Error(ErrorCode::InvalidConfig, "random path needs d limits, steps >= 1 and trials >= 2");
  }
  RandomPathReport rep;
  rep.steps = steps;
  rep.trials = trials;
  rep.seed = seed;
  BigFloat target(0);
  for (const auto& a : A) {
    target += log(a);
  }
  rep.target = to_double(BigFloat(target / (2 * d)));
  for (int trial = 0; trial < trials; ++trial) {
    MultiIndex n = MultiIndex::ones(d);
    BigFloat log_inv_m(0);
    for (int l : random_path(d, steps, seed, trial)) {
      // m_child = m / sqrt(a_{n,l})
      log_inv_m += log(c.a(n, l)) / 2;
      n = n.plus(l);
    }
    rep.rates.push_back(to_double(BigFloat(log_inv_m / steps)));
  }
  double sum = 0;
  for (double r : rep.rates) {
    sum += r;
  }
  rep.mean = sum / trials;
  double sq = 0;
  for (double r : rep.rates) {
    sq += (r - rep.mean) * (r - rep.mean);
  }
  rep.stddev = std::sqrt(sq / (trials - 1));
  rep.stderr_mean = rep.stddev / std::sqrt(static_cast<double>(trials));
  rep.within_3se = std::abs(rep.mean - rep.target) <= 3 * rep.stderr_mean;
  rep.relative_error = std::abs(rep.mean - rep.target) / std::abs(rep.target);
  return rep;
}

#define MOPTREE_INSTANTIATE(T)                                                                                 \
  template std::vector<Complex<T>> resolvent_column<T>(const TreeOperator<T>&, int, const Complex<T>&);       \
  template GreenValue<T> green_direct<T>(const TreeOperator<T>&, int, int, const Complex<T>&);                \
  template GreenValue<T> green_formula_finite<T>(const Family<T>&, const TreeOperator<T>&, int,               \
                                                 const Complex<T>&);                                          \
  template GreenValue<T> cf_finite<T>(const CoefficientProvider<T>&, const MultiIndex&, int, const Complex<T>&); \
  template TkReport<T> multiplication_Tk<T>(const RecurrenceTable<T>&, int, int);

MOPTREE_INSTANTIATE(Rational)
MOPTREE_INSTANTIATE(BigFloat)

#undef MOPTREE_INSTANTIATE

}  // namespace moptree
