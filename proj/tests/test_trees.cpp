#include "doctest.h"
#include "support.hpp"

#include "moptree/trees.hpp"

#include "json.hpp"

#include <algorithm>
#include <cstdlib>

using namespace moptree;
using moptree::test::q;

namespace {

// Every monotone lattice path from n down to 0, as label sequences.
void enumerate_paths(const MultiIndex& n, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (n.total() == 0) {
    out.push_back(cur);
    return;
  }
  for (int i = 0; i < n.d(); ++i) {
    if (n[i] > 0) {
      cur.push_back(i);
      enumerate_paths(n.minus(i), cur, out);
      cur.pop_back();
    }
  }
}

std::vector<std::vector<int>> leaf_paths(const Tree& t) {
  std::vector<std::vector<int>> out;
  for (int leaf : t.leaves()) {
    std::vector<int> labels;
    for (int v : t.path_to_root(leaf)) {
      if (v != 0) {
        labels.push_back(t.label[v]);
      }
    }
    std::reverse(labels.begin(), labels.end());
    out.push_back(labels);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_SUITE("trees") {

TEST_CASE("small finite trees") {
  auto t11 = build_finite(MultiIndex({1, 1}));
  CHECK(t11->size() == 5);
  CHECK(t11->leaves().size() == 2);

  auto t21 = build_finite(MultiIndex({2, 1}));
  CHECK(t21->size() == 9);
  CHECK(t21->leaves().size() == 3);
  std::vector<MultiIndex> expect{MultiIndex({2, 1}), MultiIndex({1, 1}), MultiIndex({2, 0}),
                                 MultiIndex({0, 1}), MultiIndex({1, 0}), MultiIndex({1, 0}),
                                 MultiIndex({0, 0}), MultiIndex({0, 0}), MultiIndex({0, 0})};
  for (int v = 0; v < 9; ++v) {
    CHECK(t21->projection(v) == expect[v]);
  }
  CHECK(t21->label[1] == 0);
  CHECK(t21->label[2] == 1);
  CHECK(build_finite(MultiIndex({3, 3}))->leaves().size() == 20);
}

TEST_CASE("untwining reproduces every lattice path") {
  for (const auto& N : box_indices(MultiIndex({4, 4}))) {
    auto t = build_finite(N);
    std::vector<std::vector<int>> paths;
    std::vector<int> cur;
    enumerate_paths(N, cur, paths);
    std::sort(paths.begin(), paths.end());
    CHECK(leaf_paths(*t) == paths);
    CHECK(t->size() == finite_tree_size(N));
    for (int v = 1; v < t->size(); ++v) {
      CHECK(t->projection(t->parent[v]) == t->projection(v).plus(t->label[v]));
    }
  }
  auto t3 = build_finite(MultiIndex({3, 2, 3}));
  std::vector<std::vector<int>> paths;
  std::vector<int> cur;
  enumerate_paths(MultiIndex({3, 2, 3}), cur, paths);
  std::sort(paths.begin(), paths.end());
  CHECK(leaf_paths(*t3) == paths);
  CHECK(paths.size() == 560);  // 8! / (3! 2! 3!)
}

TEST_CASE("truncated trees") {
  auto t = build_truncated(2, 2);
  REQUIRE(t->size() == 7);
  std::vector<MultiIndex> expect{MultiIndex({1, 1}), MultiIndex({2, 1}), MultiIndex({1, 2}), MultiIndex({3, 1}),
                                 MultiIndex({2, 2}), MultiIndex({2, 2}), MultiIndex({1, 3})};
  for (int v = 0; v < 7; ++v) {
    CHECK(t->projection(v) == expect[v]);
  }
  CHECK(build_truncated(2, 0)->size() == 1);
  CHECK(build_truncated(3, 2)->size() == 13);
  CHECK(build_truncated(2, 3)->size() == 15);
  CHECK(truncated_tree_size(2, 10) == 2047);
}

TEST_CASE("size cap") {
  CHECK_THROWS_AS(build_finite(MultiIndex({6, 6}), 100), Error);
  try {
    build_truncated(2, 30);
    FAIL("expected SizeLimitExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SizeLimitExceeded);
  }
  setenv("MOP_TREES_MAX_VERTICES", "10", 1);
  CHECK(vertex_cap() == 10);
  CHECK_THROWS_AS(build_truncated(2, 3), Error);
  setenv("MOP_TREES_MAX_VERTICES", "ten", 1);
  CHECK_THROWS_AS(vertex_cap(), Error);
  unsetenv("MOP_TREES_MAX_VERTICES");
  CHECK(vertex_cap() == 1000000);
}

TEST_CASE("d = 1 gives the classical Jacobi matrix") {
  auto t = make_table<Rational>(test::legendre_system());
  const int N = 5;
  auto op = assemble_finite<Rational>(*t, {q(1)}, MultiIndex({N}), true);
  REQUIRE(op.size() == N + 1);
  // Vertex v has projection N - v; the chain reversed is J_N.
  for (int v = 0; v <= N; ++v) {
    CHECK(op.tree->projection(v, 0) == N - v);
    CHECK(op.V[v] == t->b(MultiIndex({N - v}), 0));
    if (v > 0) {
      CHECK(op.W[v] == q((N - v + 1) * (N - v + 1), 4 * (N - v + 1) * (N - v + 1) - 1));
    }
  }
}

TEST_CASE("finite operator entries") {
  auto t = make_table<Rational>(test::symmetric_system());
  const MultiIndex N({2, 2});
  auto e1 = assemble_finite<Rational>(*t, {q(1), q(0)}, N, true);
  auto e2 = assemble_finite<Rational>(*t, {q(0), q(1)}, N, true);
  CHECK(e1.V[0] - e2.V[0] == t->b(N, 0) - t->b(N, 1));
  for (int v = 1; v < e1.size(); ++v) {
    CHECK(e1.V[v] == e2.V[v]);
    CHECK(e1.W[v] == e2.W[v]);
    CHECK(e1.W[v] > 0);
    CHECK(e1.W[v] <= q(1, 8));
    // Symmetrization: m_v^2 W_v = m_parent^2.
    CHECK(e1.msq[v] * e1.W[v] == e1.msq[e1.tree->parent[v]]);
  }

  auto f = make_table<BigFloat>(test::float_system(test::symmetric_system()));
  auto op = assemble_finite<BigFloat>(*f, {BigFloat(1) / 2, BigFloat(1) / 2}, N, true);
  for (int v = 1; v < op.size(); ++v) {
    CHECK(op.upper(v) == op.lower(v));
    CHECK(test::close(op.upper(v) * op.upper(v), op.W[v], test::tol(-70)));
  }
  auto k = assemble_finite<BigFloat>(*f, {BigFloat(1) / 2, BigFloat(1) / 2}, N, false);
  // J = m^-1 K m entrywise on every edge.
  for (int v = 1; v < op.size(); ++v) {
    BigFloat mv = sqrt(k.msq[v]), mp = sqrt(k.msq[k.tree->parent[v]]);
    CHECK(test::close(k.upper(v) * mv / mp, op.upper(v), test::tol(-70)));
    CHECK(test::close(k.lower(v) * mp / mv, op.lower(v), test::tol(-70)));
  }
  CHECK_THROWS_AS(assemble_finite<Rational>(*t, {q(1, 2), q(1, 3)}, N, true), Error);
  CHECK_THROWS_AS(e1.upper(1), Error);
}

TEST_CASE("type II eigen identity on finite trees") {
  auto t = make_table<Rational>(test::symmetric_system());
  for (auto kappa : {std::vector<Rational>{q(1), q(0)}, std::vector<Rational>{q(1, 3), q(2, 3)}}) {
    auto op = assemble_finite<Rational>(*t, kappa, MultiIndex({2, 2}), true);
    for (auto z : {Complex<Rational>(3), Complex<Rational>(q(1, 2), q(1))}) {
      auto r = eigen_residual(op, t->family(), z, ResidualKind::type2);
      CHECK(r.exact_zero);
      CHECK(r.max_residual == 0);
      CHECK(r.rows == op.size());
    }
  }
  // The relation is specific to the recurrence coefficients.
  auto op = assemble_finite<Rational>(*t, {q(1), q(0)}, MultiIndex({2, 2}), true);
  op.V[3] += 1;
  CHECK_FALSE(eigen_residual(op, t->family(), Complex<Rational>(3), ResidualKind::type2).exact_zero);

  auto f = make_table<BigFloat>(test::float_system(test::symmetric_system()));
  auto opf = assemble_finite<BigFloat>(*f, {BigFloat(0), BigFloat(1)}, MultiIndex({3, 2}), true);
  auto rf = eigen_residual(opf, f->family(), Complex<BigFloat>(BigFloat(2), BigFloat(1)), ResidualKind::type2);
  CHECK(rf.max_residual < test::tol(-60));
}

TEST_CASE("type I identity on truncated trees") {
  auto t = make_table<Rational>(test::symmetric_system());
  for (auto kappa : {std::vector<Rational>{q(0), q(1)}, std::vector<Rational>{q(1, 2), q(1, 2)}}) {
    auto op = assemble_infinite<Rational>(*t, kappa, 8, true);
    auto r = eigen_residual(op, t->family(), Complex<Rational>(5), ResidualKind::type1);
    CHECK(r.exact_zero);
    CHECK(r.rows == 3 * 255);
  }

  auto f = make_table<BigFloat>(test::float_system(test::symmetric_system()));
  std::vector<BigFloat> kappa{BigFloat(0), BigFloat(1)};
  Complex<BigFloat> z(5);
  auto op = assemble_infinite<BigFloat>(*f, kappa, 6, true);
  CHECK(eigen_residual(op, f->family(), z, ResidualKind::type1).max_residual < test::tol(-50));
  BigFloat prev = -1;
  for (int D = 2; D <= 8; ++D) {
    auto opD = assemble_infinite<BigFloat>(*f, kappa, D, true);
    BigFloat b = boundary_residual(opD, *f, f->family(), z);
    CHECK(b > 0);
    if (prev > 0) {
      CHECK(b <= BigFloat(0.9) * prev);
    }
    prev = b;
  }
}

TEST_CASE("kappa = e_1 and e_2 differ by a rank-one root term") {
  auto t = make_table<Rational>(test::symmetric_system());
  auto e1 = assemble_infinite<Rational>(*t, {q(1), q(0)}, 5, true);
  auto e2 = assemble_infinite<Rational>(*t, {q(0), q(1)}, 5, true);
  const MultiIndex o = MultiIndex::zero(2);
  CHECK(e1.V[0] - e2.V[0] == t->b(MultiIndex({0, 1}), 0) - t->b(MultiIndex({1, 0}), 1));
  CHECK(e1.V[0] - e2.V[0] == t->b(o, 0) - t->b(o, 1));
  for (int v = 1; v < e1.size(); ++v) {
    CHECK(e1.V[v] == e2.V[v]);
    CHECK(e1.W[v] == e2.W[v]);
  }
  // Children carry a at the parent projection with the child's label.
  CHECK(e1.W[2] == t->a(MultiIndex({1, 1}), 1));
  CHECK(e1.V[2] == t->b(MultiIndex({1, 1}), 1));
}

TEST_CASE("constant and Hermite operators") {
  auto c = assemble_constant<Rational>({q(1, 4), q(1, 9)}, {q(-1), q(1)}, {q(1, 2), q(1, 2)}, 4);
  CHECK(c.V[0] == 0);
  for (int v = 1; v < c.size(); ++v) {
    CHECK(c.W[v] == (c.tree->label[v] == 0 ? q(1, 4) : q(1, 9)));
    CHECK(c.V[v] == (c.tree->label[v] == 0 ? -1 : 1));
  }
  CHECK_THROWS_AS(assemble_constant<Rational>({q(0), q(1)}, {q(0), q(1)}, {q(1), q(0)}, 2), Error);

  auto h = make_table<BigFloat>(hermite_system({q(0), q(1)}));
  auto op = assemble_infinite<BigFloat>(*h, {BigFloat(1), BigFloat(0)}, 4, true);
  CHECK(op.unbounded);
  // Leftmost path: W = a_{Pi(parent),1} = (parent n_1) / 2 grows with depth.
  int v = 0;
  for (int k = 1; k <= 4; ++k) {
    v = op.tree->first_child[v];
    CHECK(test::close(op.W[v], BigFloat(k) / 2, test::tol(-40)));
  }

  auto s = make_table<BigFloat>(test::float_system(test::symmetric_system()));
  BigFloat bound0 = operator_norm_bound(assemble_infinite<BigFloat>(*s, {BigFloat(1), BigFloat(0)}, 3, true));
  BigFloat bound1 = operator_norm_bound(assemble_infinite<BigFloat>(*s, {BigFloat(1), BigFloat(0)}, 7, true));
  CHECK(bound1 <= 1 + 3 * sqrt(BigFloat(1) / 8));
  CHECK(bound0 <= bound1);
}

TEST_CASE("dumps") {
  auto t = build_finite(MultiIndex({2, 1}));
  auto j = nlohmann::json::parse(tree_to_json(*t));
  REQUIRE(j["vertices"].size() == 9);
  CHECK(j["vertices"][0]["parent"].is_null());
  CHECK(j["vertices"][2]["label"] == 2);
  CHECK(j["vertices"][2]["projection"] == std::vector<int>{2, 0});
  CHECK(tree_to_json(*t) == tree_to_json(*build_finite(MultiIndex({2, 1}))));
  CHECK(nlohmann::json::parse(tree_to_json(*build_truncated(2, 3)))["vertices"].size() == 15);

  auto tab = make_table<Rational>(test::symmetric_system());
  auto op = assemble_finite<Rational>(*tab, {q(1), q(0)}, MultiIndex({1, 1}), false);
  std::string csv = operator_to_csv(op);
  CHECK(csv.rfind("row,col,value(exact),exact\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 5 + 2 * 4);
  CHECK(csv == operator_to_csv(assemble_finite<Rational>(*tab, {q(1), q(0)}, MultiIndex({1, 1}), false)));
}

}  // TEST_SUITE
