#include "moptree/trees.hpp"

#include "moptree/systems.hpp"

#include "json.hpp"

#include <climits>
#include <cstdlib>
#include <map>
#include <sstream>

namespace moptree {

MultiIndex Tree::projection(int v) const {
  std::vector<int> n(proj.begin() + static_cast<std::ptrdiff_t>(v) * d,
                     proj.begin() + static_cast<std::ptrdiff_t>(v + 1) * d);
  return MultiIndex(std::move(n));
}

std::vector<int> Tree::leaves() const {
  std::vector<int> out;
  for (int v = 0; v < size(); ++v) {
    if (child_count[v] == 0) {
      out.push_back(v);
    }
  }
  return out;
}

std::vector<int> Tree::path_to_root(int v) const {
  std::vector<int> out;
  for (; v >= 0; v = parent[v]) {
    out.push_back(v);
  }
  return out;
}

long long vertex_cap() {
  const char* env = std::getenv("MOP_TREES_MAX_VERTICES");
  if (env == nullptr || *env == '\0') {
    return 1000000;
  }
  char* end = nullptr;
  long long v = std::strtoll(env, &end, 10);
  if (*end != '\0' || v <= 0) {
    throw Error(ErrorCode::InvalidConfig, std::string("MOP_TREES_MAX_VERTICES must be a positive integer, got '") +
                                              env + "'");
  }
  return v;
}

namespace {

long long sat_add(long long a, long long b) { return a > LLONG_MAX - b ? LLONG_MAX : a + b; }

long long count_from(const MultiIndex& n, std::map<MultiIndex, long long>& memo) {
  auto it = memo.find(n);
  if (it != memo.end()) {
    return it->second;
  }
  long long c = 1;
  for (int i = 0; i < n.d(); ++i) {
    if (n[i] > 0) {
      c = sat_add(c, count_from(n.minus(i), memo));
    }
  }
  memo.emplace(n, c);
  return c;
}

long long resolve_cap(long long max_vertices) { return max_vertices > 0 ? max_vertices : vertex_cap(); }

void check_size(long long count, long long cap, const std::string& what) {
  if (count > cap) {
    throw Error(ErrorCode::SizeLimitExceeded,
                what + " has " + (count == LLONG_MAX ? std::string("too many") : std::to_string(count)) +
                    " vertices, cap " + std::to_string(cap));
  }
}

}  // namespace

long long finite_tree_size(const MultiIndex& N) {
  std::map<MultiIndex, long long> memo;
  return count_from(N, memo);
}

long long truncated_tree_size(int d, int D) {
  long long total = 0, layer = 1;
  for (int k = 0; k <= D; ++k) {
    total = sat_add(total, layer);
    layer = layer > LLONG_MAX / d ? LLONG_MAX : layer * d;
  }
  return total;
}

std::shared_ptr<const Tree> build_finite(const MultiIndex& N, long long max_vertices) {
  const int d = N.d();
  if (d == 0) {
    throw Error(ErrorCode::InvalidConfig, "empty multi-index");
  }
  for (int i = 0; i < d; ++i) {
    if (N[i] < 0) {
      throw Error(ErrorCode::InvalidConfig, "negative component in " + N.str());
    }
  }
  const long long count = finite_tree_size(N);
  check_size(count, resolve_cap(max_vertices), "tree for " + N.str());

  auto t = std::make_shared<Tree>();
  t->kind = TreeKind::finite;
  t->d = d;
  t->N = N;
  t->depth_limit = N.total();
  t->parent.reserve(count);
  t->parent.push_back(-1);
  t->label.push_back(-1);
  t->depth.push_back(0);
  t->proj = N.components();
  for (int v = 0; v < t->size(); ++v) {
    t->first_child.push_back(t->size());
    int kids = 0;
    for (int i = 0; i < d; ++i) {
      if (t->projection(v, i) == 0) {
        continue;
      }
      for (int k = 0; k < d; ++k) {
        t->proj.push_back(t->projection(v, k) - (k == i ? 1 : 0));
      }
      t->parent.push_back(v);
      t->label.push_back(i);
      t->depth.push_back(t->depth[v] + 1);
      ++kids;
    }
    t->child_count.push_back(kids);
  }
  return t;
}

std::shared_ptr<const Tree> build_truncated(int d, int D, long long max_vertices) {
  if (d < 1 || D < 0) {
    throw Error(ErrorCode::InvalidConfig, "truncated tree needs d >= 1 and D >= 0");
  }
  const long long count = truncated_tree_size(d, D);
  check_size(count, resolve_cap(max_vertices), "depth-" + std::to_string(D) + " tree");

  auto t = std::make_shared<Tree>();
  t->kind = TreeKind::truncated;
  t->d = d;
  t->depth_limit = D;
  t->parent.reserve(count);
  t->label.reserve(count);
  t->depth.reserve(count);
  t->proj.reserve(count * d);
  t->parent.push_back(-1);
  t->label.push_back(-1);
  t->depth.push_back(0);
  t->proj.assign(d, 1);
  for (int v = 0; v < t->size(); ++v) {
    t->first_child.push_back(t->size());
    if (t->depth[v] == D) {
      t->child_count.push_back(0);
      continue;
    }
    for (int i = 0; i < d; ++i) {
      for (int k = 0; k < d; ++k) {
        t->proj.push_back(t->projection(v, k) + (k == i ? 1 : 0));
      }
      t->parent.push_back(v);
      t->label.push_back(i);
      t->depth.push_back(t->depth[v] + 1);
    }
    t->child_count.push_back(d);
  }
  return t;
}

template <class T>
T TreeOperator<T>::upper(int v) const {
  if (!symmetrized) {
    return W[v];
  }
  if constexpr (is_exact_v<T>) {
    throw Error(ErrorCode::InvalidConfig, "symmetrized exact operator entries are irrational");
  } else {
    return sqrt(W[v]);
  }
}

template <class T>
T TreeOperator<T>::lower(int v) const {
  return symmetrized ? upper(v) : T(1);
}

namespace {

template <class T>
void check_kappa(const std::vector<T>& kappa, int d) {
  if (static_cast<int>(kappa.size()) != d) {
    throw Error(ErrorCode::InvalidConfig, "kappa needs " + std::to_string(d) + " entries");
  }
  T sum(0);
  for (const auto& k : kappa) {
    if (k < 0) {
      throw Error(ErrorCode::InvalidConfig, "kappa entries must be nonnegative");
    }
    sum += k;
  }
  if (abs_value(T(sum - 1)) > default_tolerance<T>()) {
    throw Error(ErrorCode::InvalidConfig, "kappa must sum to 1");
  }
}

template <class T>
void finish(TreeOperator<T>& op, const CoefficientProvider<T>* c) {
  const Tree& t = *op.tree;
  op.msq.assign(t.size(), T(1));
  for (int v = 1; v < t.size(); ++v) {
    if (!(op.W[v] > 0)) {
      throw Error(ErrorCode::NonpositiveW, "W at vertex " + std::to_string(v) + " (projection " +
                                               t.projection(v).str() + ") is not positive");
    }
    op.msq[v] = op.msq[t.parent[v]] / op.W[v];
  }
  if (auto table = dynamic_cast<const RecurrenceTable<T>*>(c)) {
    op.unbounded = !table->family().moments().geometry().bounded;
  }
  if (c != nullptr) {
    op.coefficients = c->provenance();
  }
}

}  // namespace

template <class T>
TreeOperator<T> assemble_finite(const CoefficientProvider<T>& c, const std::vector<T>& kappa, const MultiIndex& N,
                                bool symmetrize, long long max_vertices) {
  if (N.d() != c.d()) {
    throw Error(ErrorCode::InvalidConfig, "index " + N.str() + " does not match d = " + std::to_string(c.d()));
  }
  check_kappa(kappa, c.d());
  TreeOperator<T> op;
  op.tree = build_finite(N, max_vertices);
  op.symmetrized = symmetrize;
  op.kappa = kappa;
  const Tree& t = *op.tree;
  op.V.resize(t.size());
  op.W.resize(t.size());
  op.V[0] = T(0);
  for (int j = 0; j < t.d; ++j) {
    if (kappa[j] != 0) {
      op.V[0] += kappa[j] * c.b(N, j);
    }
  }
  op.W[0] = T(1);
  // Coefficients repeat across vertices with equal projections.
  std::map<std::pair<MultiIndex, int>, std::pair<T, T>> seen;
  for (int v = 1; v < t.size(); ++v) {
    const MultiIndex n = t.projection(v);
    const int l = t.label[v];
    auto key = std::make_pair(n, l);
    auto it = seen.find(key);
    if (it == seen.end()) {
      it = seen.emplace(key, std::make_pair(c.b(n, l), c.a(n.plus(l), l))).first;
    }
    op.V[v] = it->second.first;
    op.W[v] = it->second.second;
  }
  finish(op, &c);
  return op;
}

template <class T>
TreeOperator<T> assemble_infinite(const CoefficientProvider<T>& c, const std::vector<T>& kappa, int D, bool symmetrize,
                                  long long max_vertices) {
  const int d = c.d();
  check_kappa(kappa, d);
  TreeOperator<T> op;
  op.tree = build_truncated(d, D, max_vertices);
  op.symmetrized = symmetrize;
  op.kappa = kappa;
  const Tree& t = *op.tree;
  op.V.resize(t.size());
  op.W.resize(t.size());
  op.V[0] = T(0);
  const MultiIndex one = MultiIndex::ones(d);
  for (int j = 0; j < d; ++j) {
    if (kappa[j] != 0) {
      op.V[0] += kappa[j] * c.b(one.minus(j), j);
    }
  }
  op.W[0] = T(1);
  std::map<std::pair<MultiIndex, int>, std::pair<T, T>> seen;
  for (int v = 1; v < t.size(); ++v) {
    const MultiIndex up = t.projection(t.parent[v]);
    const int l = t.label[v];
    auto key = std::make_pair(up, l);
    auto it = seen.find(key);
    if (it == seen.end()) {
      it = seen.emplace(key, std::make_pair(c.b(up, l), c.a(up, l))).first;
    }
    op.V[v] = it->second.first;
    op.W[v] = it->second.second;
  }
  finish(op, &c);
  return op;
}

template <class T>
TreeOperator<T> assemble_constant(const std::vector<T>& A, const std::vector<T>& B, const std::vector<T>& kappa, int D,
                                  long long max_vertices) {
  ConstantCoefficients<T> cc(A, B);  // validates A > 0
  const int d = cc.d();
  check_kappa(kappa, d);
  TreeOperator<T> op;
  op.tree = build_truncated(d, D, max_vertices);
  op.symmetrized = true;
  op.kappa = kappa;
  const Tree& t = *op.tree;
  op.V.resize(t.size());
  op.W.resize(t.size());
  op.V[0] = T(0);
  for (int j = 0; j < d; ++j) {
    op.V[0] += kappa[j] * B[j];
  }
  op.W[0] = T(1);
  for (int v = 1; v < t.size(); ++v) {
    op.V[v] = B[t.label[v]];
    op.W[v] = A[t.label[v]];
  }
  finish<T>(op, nullptr);
  op.coefficients = Provenance::constant;
  return op;
}

template <class T>
BigFloat operator_norm_bound(const TreeOperator<T>& op) {
  BigFloat v(0), w(0);
  for (int i = 0; i < op.size(); ++i) {
    v = std::max(v, BigFloat(abs(to_bigfloat(op.V[i]))));
    if (i > 0) {
      w = std::max(w, BigFloat(to_bigfloat(op.W[i])));
    }
  }
  return v + (op.tree->d + 1) * sqrt(w);
}

template <class T>
std::vector<Complex<T>> apply(const TreeOperator<T>& op, const std::vector<Complex<T>>& f) {
  const Tree& t = *op.tree;
  std::vector<Complex<T>> y(t.size());
  for (int v = 0; v < t.size(); ++v) {
    Complex<T> acc = Complex<T>(op.V[v]) * f[v];
    if (v > 0) {
      acc += Complex<T>(op.lower(v)) * f[t.parent[v]];
    }
    for (int c = t.first_child[v]; c < t.first_child[v] + t.child_count[v]; ++c) {
      acc += Complex<T>(op.upper(c)) * f[c];
    }
    y[v] = std::move(acc);
  }
  return y;
}

namespace {

// ((K - z) f)_v with the K-form entries, whatever form op is stored in.
template <class T, class F>
F k_row(const TreeOperator<T>& op, const std::vector<F>& f, const F& z, int v) {
  const Tree& t = *op.tree;
  F acc = (F(op.V[v]) - z) * f[v];
  if (v > 0) {
    acc += f[t.parent[v]];
  }
  for (int c = t.first_child[v]; c < t.first_child[v] + t.child_count[v]; ++c) {
    acc += F(op.W[c]) * f[c];
  }
  return acc;
}

// |r| / m_v: converts a K-form residual to the symmetrized scale.
template <class T>
BigFloat scaled(const Complex<T>& r, const T& msq) {
  Complex<BigFloat> rb(to_bigfloat(r.re), to_bigfloat(r.im));
  return abs(rb) / sqrt(to_bigfloat(msq));
}

}  // namespace

template <class T>
EigenResidual eigen_residual(const TreeOperator<T>& op, const Family<T>& fam, const Complex<T>& z, ResidualKind kind) {
  const Tree& t = *op.tree;
  EigenResidual out;
  out.exact_zero = is_exact_v<T>;
  auto record = [&](const Complex<T>& r, int v) {
    ++out.rows;
    if (!is_zero(r)) {
      out.exact_zero = false;
    }
    out.max_residual = std::max(out.max_residual, scaled(r, op.msq[v]));
  };

  if (kind == ResidualKind::type2) {
    if (t.kind != TreeKind::finite) {
      throw Error(ErrorCode::InvalidConfig, "type2 residual needs a finite tree");
    }
    std::map<MultiIndex, Complex<T>> P;
    std::vector<Complex<T>> f(t.size());
    for (int v = 0; v < t.size(); ++v) {
      MultiIndex n = t.projection(v);
      auto it = P.find(n);
      if (it == P.end()) {
        it = P.emplace(n, fam.type2(n).P(z)).first;
      }
      f[v] = it->second;
    }
    Complex<T> c;
    for (int j = 0; j < t.d; ++j) {
      if (op.kappa[j] != 0) {
        c += Complex<T>(op.kappa[j]) * fam.type2(t.N.plus(j)).P(z);
      }
    }
    for (int v = 0; v < t.size(); ++v) {
      Complex<T> r = k_row(op, f, z, v);
      if (v == 0) {
        r += c;
      }
      record(r, v);
    }
    return out;
  }

  if (t.kind != TreeKind::truncated) {
    throw Error(ErrorCode::InvalidConfig, "type1 residual needs a truncated tree");
  }
  const int d = t.d;
  const auto gamma = gamma_constants(fam.moments(), op.kappa).gamma;
  std::vector<int> rows;
  for (int v = 0; v < t.size(); ++v) {
    if (t.depth[v] < t.depth_limit) {
      rows.push_back(v);
    }
  }
  if constexpr (is_exact_v<T>) {
    // Component m = 0 is the polynomial part, m >= 1 the coefficient of mu_m^.
    std::map<MultiIndex, FormParts<T>> parts;
    std::vector<std::vector<Complex<T>>> f(d + 1, std::vector<Complex<T>>(t.size()));
    for (int v = 0; v < t.size(); ++v) {
      MultiIndex n = t.projection(v);
      auto it = parts.find(n);
      if (it == parts.end()) {
        it = parts.emplace(n, form_parts(fam, n, z)).first;
      }
      f[0][v] = -it->second.coef0;
      for (int m = 1; m <= d; ++m) {
        f[m][v] = it->second.coef[m - 1];
      }
    }
    for (int v : rows) {
      for (int m = 0; m <= d; ++m) {
        Complex<T> r = k_row(op, f[m], z, v);
        if (v == 0 && m > 0) {
          r -= Complex<T>(gamma[m - 1]);
        }
        record(r, v);
      }
    }
  } else {
    std::map<MultiIndex, Complex<BigFloat>> L;
    std::vector<Complex<T>> f(t.size());
    for (int v = 0; v < t.size(); ++v) {
      MultiIndex n = t.projection(v);
      auto it = L.find(n);
      if (it == L.end()) {
        it = L.emplace(n, second_kind(fam, n, z).L).first;
      }
      f[v] = it->second;
    }
    Complex<T> rhs;
    for (int j = 0; j < d; ++j) {
      rhs += Complex<T>(gamma[j]) * markov(fam.moments().system(), j, z);
    }
    for (int v : rows) {
      Complex<T> r = k_row(op, f, z, v);
      if (v == 0) {
        r -= rhs;
      }
      record(r, v);
    }
  }
  return out;
}

BigFloat boundary_residual(const TreeOperator<BigFloat>& op, const CoefficientProvider<BigFloat>& c,
                           const Family<BigFloat>& fam, const Complex<BigFloat>& z) {
  const Tree& t = *op.tree;
  std::map<MultiIndex, Complex<BigFloat>> cache;
  auto L = [&](const MultiIndex& n) {
    auto it = cache.find(n);
    if (it == cache.end()) {
      it = cache.emplace(n, second_kind(fam, n, z).L).first;
    }
    return it->second;
  };
  BigFloat worst(0);
  for (int v = 0; v < t.size(); ++v) {
    if (t.depth[v] != t.depth_limit) {
      continue;
    }
    // sqrt(W_c) l_c = W_c L_c / m_v
    const MultiIndex n = t.projection(v);
    Complex<BigFloat> acc;
    for (int l = 0; l < t.d; ++l) {
      acc += Complex<BigFloat>(c.a(n, l)) * L(n.plus(l));
    }
    worst = std::max(worst, BigFloat(abs(acc) / sqrt(op.msq[v])));
  }
  return worst;
}

std::string tree_to_json(const Tree& t) {
  nlohmann::ordered_json out;
  out["kind"] = t.kind == TreeKind::finite ? "finite" : "truncated";
  out["d"] = t.d;
  if (t.kind == TreeKind::finite) {
    out["N"] = t.N.components();
  } else {
    out["depth"] = t.depth_limit;
  }
  auto& vs = out["vertices"] = nlohmann::ordered_json::array();
  for (int v = 0; v < t.size(); ++v) {
    nlohmann::ordered_json rec;
    rec["id"] = v;
    rec["parent"] = t.parent[v] < 0 ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(t.parent[v]);
    rec["label"] = t.label[v] < 0 ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(t.label[v] + 1);
    rec["projection"] = t.projection(v).components();
    rec["depth"] = t.depth[v];
    vs.push_back(std::move(rec));
  }
  return out.dump(1) + "\n";
}

namespace {

template <class T>
std::pair<std::string, std::string> entry_text(const T& w, bool root_edge_sqrt) {
  if constexpr (is_exact_v<T>) {
    if (root_edge_sqrt) {
      return {to_string(BigFloat(sqrt(to_bigfloat(w)))), ""};
    }
    return {to_string(to_bigfloat(w)), to_string(w)};
  } else {
    return {to_string(root_edge_sqrt ? BigFloat(sqrt(w)) : w), ""};
  }
}

}  // namespace

template <class T>
std::string operator_to_csv(const TreeOperator<T>& op) {
  const Tree& t = *op.tree;
  std::ostringstream os;
  const std::string tag = is_exact_v<T> ? "exact" : std::to_string(current_precision_bits()) + " bits";
  os << "row,col,value(" << tag << "),exact\n";
  auto emit = [&](int r, int c, const std::pair<std::string, std::string>& e) {
    os << r << ',' << c << ',' << e.first << ',' << e.second << '\n';
  };
  for (int v = 0; v < t.size(); ++v) {
    if (v > 0) {
      emit(v, t.parent[v], op.symmetrized ? entry_text(op.W[v], true) : entry_text(T(1), false));
    }
    emit(v, v, entry_text(op.V[v], false));
    for (int c = t.first_child[v]; c < t.first_child[v] + t.child_count[v]; ++c) {
      emit(v, c, entry_text(op.W[c], op.symmetrized));
    }
  }
  return os.str();
}

#define MOPTREE_INSTANTIATE(T)                                                                                 \
  template struct TreeOperator<T>;                                                                            \
  template TreeOperator<T> assemble_finite<T>(const CoefficientProvider<T>&, const std::vector<T>&,           \
                                              const MultiIndex&, bool, long long);                            \
  template TreeOperator<T> assemble_infinite<T>(const CoefficientProvider<T>&, const std::vector<T>&, int, bool, \
                                                long long);                                                   \
  template TreeOperator<T> assemble_constant<T>(const std::vector<T>&, const std::vector<T>&,                 \
                                                const std::vector<T>&, int, long long);                       \
  template BigFloat operator_norm_bound<T>(const TreeOperator<T>&);                                           \
  template std::vector<Complex<T>> apply<T>(const TreeOperator<T>&, const std::vector<Complex<T>>&);          \
  template EigenResidual eigen_residual<T>(const TreeOperator<T>&, const Family<T>&, const Complex<T>&,       \
                                           ResidualKind);                                                     \
  template std::string operator_to_csv<T>(const TreeOperator<T>&);

MOPTREE_INSTANTIATE(Rational)
MOPTREE_INSTANTIATE(BigFloat)

#undef MOPTREE_INSTANTIATE

}  // namespace moptree
