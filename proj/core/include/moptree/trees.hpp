#pragma once

#include "moptree/recurrence.hpp"

#include <memory>
#include <string>
#include <vector>

namespace moptree {

enum class TreeKind { finite, truncated };

// Vertices in breadth-first order with children sorted by label, so the
// children of v occupy the contiguous id range [first_child[v], +child_count[v]).
// Labels are 0-based; the root has label -1 and parent -1.
struct Tree {
  TreeKind kind = TreeKind::finite;
  int d = 0;
  MultiIndex N;         // finite kind
  int depth_limit = 0;  // truncated kind: D; finite kind: |N|

  std::vector<int> parent;
  std::vector<int> label;
  std::vector<int> depth;
  std::vector<int> first_child;
  std::vector<int> child_count;
  std::vector<int> proj;  // flattened, d entries per vertex

  int size() const { return static_cast<int>(parent.size()); }
  int projection(int v, int i) const { return proj[static_cast<std::size_t>(v) * d + i]; }
  MultiIndex projection(int v) const;
  std::vector<int> leaves() const;
  // Vertices from v up to the root, v first.
  std::vector<int> path_to_root(int v) const;
};

// Reads MOP_TREES_MAX_VERTICES, default 10^6.
long long vertex_cap();

// Number of vertices of the finite tree (saturates at LLONG_MAX).
long long finite_tree_size(const MultiIndex& N);
long long truncated_tree_size(int d, int D);

std::shared_ptr<const Tree> build_finite(const MultiIndex& N, long long max_vertices = -1);
std::shared_ptr<const Tree> build_truncated(int d, int D, long long max_vertices = -1);

// Operator on a tree. K-form rows: f_parent + V f + sum_children W_child f_child.
// The symmetrized form has sqrt(W) on both sides of every edge. W[root] = 1.
// msq[v] = m_v^2 = prod over path(v, root) of 1/W.
template <class T>
struct TreeOperator {
  std::shared_ptr<const Tree> tree;
  bool symmetrized = false;
  std::vector<T> kappa;
  std::vector<T> V;
  std::vector<T> W;
  std::vector<T> msq;
  Provenance coefficients = Provenance::por_formula;
  bool unbounded = false;  // Hermite-type coefficients

  int size() const { return tree->size(); }
  // Entry (parent(v), v) and (v, parent(v)); floats only when symmetrized.
  T upper(int v) const;
  T lower(int v) const;
};

// V_Y = b_{Pi(Y), l_Y} (root: sum kappa_j b_{N,j}); W_Y = a_{Pi(parent), l_Y}.
template <class T>
TreeOperator<T> assemble_finite(const CoefficientProvider<T>& c, const std::vector<T>& kappa, const MultiIndex& N,
                                bool symmetrize, long long max_vertices = -1);

// Depth-D Dirichlet truncation of the operator on the homogeneous tree rooted
// at (1,...,1): V_Y = b_{Pi(parent), l_Y} (root: sum kappa_j b_{1-e_j,j}),
// W_Y = a_{Pi(parent), l_Y}.
template <class T>
TreeOperator<T> assemble_infinite(const CoefficientProvider<T>& c, const std::vector<T>& kappa, int D, bool symmetrize,
                                  long long max_vertices = -1);

// Homogeneous limit operator: diagonal B_{l_Y} (root sum kappa_i B_i),
// off-diagonals sqrt(A_i).
template <class T>
TreeOperator<T> assemble_constant(const std::vector<T>& A, const std::vector<T>& B, const std::vector<T>& kappa, int D,
                                  long long max_vertices = -1);

// sup |V| + (d + 1) sup sqrt(W): bounds the operator norm.
template <class T>
BigFloat operator_norm_bound(const TreeOperator<T>& op);

// y = op f in the operator's own form. Exact symmetrized operators have
// irrational entries and are refused.
template <class T>
std::vector<Complex<T>> apply(const TreeOperator<T>& op, const std::vector<Complex<T>>& f);

enum class ResidualKind { type2, type1 };

struct EigenResidual {
  BigFloat max_residual{0};  // sup over checked rows of |((J - z) p - rhs)_Y|
  bool exact_zero = false;   // exact backend: every checked row vanished identically
  int rows = 0;
};

// type2 (finite trees): J p - z p + (sum kappa_j P_{N+e_j}(z)) e_O with
// p_Y = P_{Pi(Y)}(z) / m_Y. type1 (truncated trees): (J - z) l - (sum gamma_j
// mu_j^(z)) e_O with l_Y = L_{Pi(Y)}(z) / m_Y, on rows of depth < D. On the exact
// backend the type1 check runs component-wise on the Markov-function
// coefficients of L.
template <class T>
EigenResidual eigen_residual(const TreeOperator<T>& op, const Family<T>& fam, const Complex<T>& z, ResidualKind kind);

// Boundary rows (depth D) of the type1 check: sup over boundary vertices of
// |sum over the cut-off children of sqrt(a) l_child|; floats only.
BigFloat boundary_residual(const TreeOperator<BigFloat>& op, const CoefficientProvider<BigFloat>& c,
                           const Family<BigFloat>& fam, const Complex<BigFloat>& z);

// {"vertices":[{"id","parent","label","projection","depth"}]}, labels 1-based.
std::string tree_to_json(const Tree& t);
// row,col,value triplets in row-major order.
template <class T>
std::string operator_to_csv(const TreeOperator<T>& op);

}  // namespace moptree
