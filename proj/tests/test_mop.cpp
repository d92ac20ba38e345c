#include "doctest.h"
#include "support.hpp"

#include <algorithm>

using namespace moptree;
using moptree::test::q;

namespace {

// Monic orthogonal polynomials of one measure by Gram-Schmidt on the
// monomials; only inner products from moments, no linear solve.
std::vector<Poly<Rational>> gram_schmidt(const MomentTable<Rational>& mt, int n_max) {
  auto inner = [&](const Poly<Rational>& a, const Poly<Rational>& b) { return integrate(mt, 0, a * b); };
  std::vector<Poly<Rational>> out;
  Poly<Rational> mono = Poly<Rational>::constant(1);
  for (int n = 0; n <= n_max; ++n) {
    Poly<Rational> p = mono;
    for (const auto& e : out) {
      p -= e * (inner(mono, e) / inner(e, e));
    }
    out.push_back(p);
    mono = mono.shifted_up();
  }
  return out;
}

Complex<BigFloat> cz(double re, double im) { return Complex<BigFloat>(BigFloat(re), BigFloat(im)); }

}  // namespace

TEST_SUITE("mop") {

TEST_CASE("multi-index arithmetic") {
  MultiIndex n({2, 0, 1});
  CHECK(n.total() == 3);
  CHECK(n.plus(1) == MultiIndex({2, 1, 1}));
  CHECK(n.minus(0) == MultiIndex({1, 0, 1}));
  CHECK_FALSE(n.can_minus(1));
  CHECK_THROWS_AS(n.minus(1), Error);
  CHECK(n.str() == "(2,0,1)");
  CHECK(parse_multi_index("(3,2)") == MultiIndex({3, 2}));
  CHECK(parse_multi_index("4") == MultiIndex({4}));
  CHECK_THROWS_AS(parse_multi_index("1,x"), Error);
  CHECK_THROWS_AS(parse_multi_index("1,-1"), Error);
  CHECK(box_indices(MultiIndex({1, 2})).size() == 6);
  CHECK(box_indices(MultiIndex({1, 2})).back() == MultiIndex({1, 2}));
}

TEST_CASE("low type II polynomials") {
  Family<Rational> fam(std::make_shared<MomentTable<Rational>>(test::symmetric_system()));
  const auto& t0 = fam.type2(MultiIndex::zero(2));
  CHECK(t0.P == Poly<Rational>::constant(1));
  for (const auto& a : t0.assoc) CHECK(a.is_zero());
  for (int j = 0; j < 2; ++j) {
    const auto& t = fam.type2(MultiIndex::unit(2, j));
    Rational mean = fam.moments().moment(j, 1) / fam.moments().moment(j, 0);
    CHECK(t.P == Poly<Rational>(std::vector<Rational>{-mean, q(1)}));
  }
}

TEST_CASE("Legendre against Gram-Schmidt") {
  auto mt = std::make_shared<MomentTable<Rational>>(test::legendre_system());
  Family<Rational> fam(mt);
  auto gs = gram_schmidt(*mt, 8);
  CHECK(fam.type2(MultiIndex({2})).P == Poly<Rational>(std::vector<Rational>{q(-1, 3), q(0), q(1)}));
  for (int n = 0; n <= 8; ++n) {
    CHECK(fam.type2(MultiIndex({n})).P == gs[n]);
  }
  // A_n = P_{n-1} / ||P_{n-1}||^2
  for (int n = 1; n <= 6; ++n) {
    Rational norm2 = integrate(*mt, 0, gs[n - 1] * gs[n - 1]);
    CHECK(fam.type1(MultiIndex({n})).A[0] == gs[n - 1] * (1 / norm2));
  }
  CHECK(fam.type1(MultiIndex({1})).A[0] == Poly<Rational>::constant(1 / mt->moment(0, 0)));
}

TEST_CASE("type I at (1,1) for the symmetric system") {
  auto mt = std::make_shared<MomentTable<Rational>>(test::symmetric_system());
  Family<Rational> fam(mt);
  // Cramer's rule on [[m10, m20], [m11, m21]] (c1, c2) = (0, 1).
  Rational a = mt->moment(0, 0), b = mt->moment(1, 0), c = mt->moment(0, 1), d = mt->moment(1, 1);
  Rational det = a * d - b * c;
  Rational c1 = -b / det, c2 = a / det;
  const auto& t = fam.type1(MultiIndex({1, 1}));
  CHECK(t.A[0] == Poly<Rational>::constant(c1));
  CHECK(t.A[1] == Poly<Rational>::constant(c2));
  CHECK(c1 == q(-4, 3));
  CHECK(c2 == q(4, 3));
  CHECK_THROWS_AS(fam.type1(MultiIndex::zero(2)), Error);
  // Boundary convention.
  CHECK(fam.type1(MultiIndex({2, 0})).A[1].is_zero());
}

TEST_CASE("orthogonality residuals are exactly zero") {
  Family<Rational> fam(std::make_shared<MomentTable<Rational>>(test::symmetric_system()));
  for (const auto& n : box_indices(MultiIndex({5, 5}))) {
    CHECK(type2_residual(fam, n) == 0);
    if (n.total() > 0) {
      CHECK(type1_residual(fam, n) == 0);
    }
  }
  auto mt3 = std::make_shared<MomentTable<Rational>>(
      lebesgue_system({{q(-3), q(-2)}, {q(-1, 2), q(1, 2)}, {q(1), q(3)}}));
  Family<Rational> f3(mt3);
  for (const auto& n : box_indices(MultiIndex({2, 2, 2}))) {
    CHECK(type2_residual(f3, n) == 0);
    if (n.total() > 0) {
      CHECK(type1_residual(f3, n) == 0);
    }
  }
}

TEST_CASE("float residuals and agreement with exact values") {
  Family<Rational> ex(std::make_shared<MomentTable<Rational>>(test::symmetric_system()));
  Family<BigFloat> fl(std::make_shared<MomentTable<BigFloat>>(test::float_system(test::symmetric_system())));
  const BigFloat bound = 10 * ldexp(BigFloat(1), -128);
  for (const auto& n : box_indices(MultiIndex({6, 6}))) {
    CHECK(type2_residual(fl, n) <= bound);
    const auto& pe = ex.type2(n).P;
    const auto& pf = fl.type2(n).P;
    for (int k = 0; k <= n.total(); ++k) {
      CHECK(test::close(pf.coeff(k), BigFloat(pe.coeff(k)), test::tol(-40)));
    }
    if (n.total() > 0) {
      CHECK(type1_residual(fl, n) <= bound * std::max(BigFloat(1), BigFloat(ex.type1(n).A[0].max_abs_coeff())));
    }
  }
}

TEST_CASE("uniqueness under permuted equations") {
  auto mt = std::make_shared<MomentTable<Rational>>(test::symmetric_system());
  Family<Rational> fam(mt);
  for (const auto& n : {MultiIndex({3, 2}), MultiIndex({1, 4}), MultiIndex({4, 4})}) {
    const int N = n.total();
    std::vector<std::pair<int, int>> rows;
    for (int j = 0; j < 2; ++j)
      for (int l = 0; l < n[j]; ++l) rows.emplace_back(j, l);
    std::reverse(rows.begin(), rows.end());
    std::rotate(rows.begin(), rows.begin() + 1, rows.end());
    Matrix<Rational> a(N, N);
    std::vector<Rational> rhs;
    for (int r = 0; r < N; ++r) {
      auto [j, l] = rows[r];
      for (int k = 0; k < N; ++k) a(r, k) = mt->moment(j, l + k);
      rhs.push_back(-mt->moment(j, l + N));
    }
    auto x = solve_linear(a, rhs);
    x.push_back(1);
    CHECK(Poly<Rational>(x) == fam.type2(n).P);
  }
}

TEST_CASE("normality") {
  MomentTable<Rational> mt(test::symmetric_system());
  for (const auto& n : box_indices(MultiIndex({6, 6}))) {
    auto r = normality_report(mt, n);
    CHECK(r.normal);
    CHECK(r.degP == n.total());
  }
  MomentTable<Rational> one(lebesgue_system({{q(0), q(1)}}));
  for (int n = 0; n < 10; ++n) CHECK(normality_report(one, MultiIndex({n})).normal);

  // (mu, mu): the two rows of the (1,1) system coincide.
  std::vector<Rational> m = one.moments(0, 6);
  auto r = normality_report(std::vector<std::vector<Rational>>{m, m}, MultiIndex({1, 1}));
  CHECK_FALSE(r.normal);
  CHECK(r.detSign == 0);
  CHECK(r.degP == 1);
}

TEST_CASE("zeros of type II and type I polynomials") {
  Family<Rational> fam(std::make_shared<MomentTable<Rational>>(test::symmetric_system()));
  auto z = type2_zeros(fam, MultiIndex({2, 2}));
  REQUIRE(z[0].size() == 2);
  REQUIRE(z[1].size() == 2);
  // Symmetry x -> -x swaps the intervals, and P_{(2,2)} is even.
  const auto& P = fam.type2(MultiIndex({2, 2})).P;
  for (int k = 1; k <= 3; k += 2) CHECK(P.coeff(k) == 0);
  for (int i = 0; i < 2; ++i) {
    CHECK(z[0][i].lo == -z[1][1 - i].hi);
    CHECK(z[0][i].hi == -z[1][1 - i].lo);
  }
  auto z31 = type2_zeros(fam, MultiIndex({3, 1}));
  CHECK(z31[0].size() == 3);
  CHECK(z31[1].size() == 1);
  CHECK(type1_zeros(fam, MultiIndex({2, 2}), 0).size() == 1);
  CHECK(type1_zeros(fam, MultiIndex({4, 3}), 1).size() == 2);
  // Simple zeros in the symmetric float family too.
  Family<BigFloat> fl(std::make_shared<MomentTable<BigFloat>>(test::float_system(test::symmetric_system())));
  auto zf = type2_zeros(fl, MultiIndex({1, 1}));
  CHECK(zf[0].size() == 1);
  CHECK(zf[1].size() == 1);
}

TEST_CASE("second kind functions") {
  auto sys = test::symmetric_system();
  Family<Rational> fam(std::make_shared<MomentTable<Rational>>(sys));
  auto z = cz(0.3, 1.7);
  auto s0 = second_kind(fam, MultiIndex::zero(2), z);
  for (int j = 0; j < 2; ++j) CHECK(test::close(s0.R[j], markov(sys, j, z), test::tol(-70)));

  Complex<BigFloat> big(BigFloat(6000), BigFloat(8000));
  auto s = second_kind(fam, MultiIndex({2, 2}), big);
  Complex<BigFloat> zn = big * big * big * big;
  CHECK(abs(s.L * zn - Complex<BigFloat>(1)) <= BigFloat(10) / abs(big));

  // R^(j) = O(z^{-n_j-1}): scaling z by 10 scales |R^(j)| by about 10^{-n_j-1}.
  MultiIndex n({3, 1});
  Complex<BigFloat> z1(BigFloat(40), BigFloat(30)), z2 = z1 * Complex<BigFloat>(10);
  auto r1 = second_kind(fam, n, z1), r2 = second_kind(fam, n, z2);
  for (int j = 0; j < 2; ++j) {
    BigFloat ratio = abs(r2.R[j]) / abs(r1.R[j]);
    BigFloat expected = pow(BigFloat(10), -(n[j] + 1));
    CHECK(ratio / expected > BigFloat(0.8));
    CHECK(ratio / expected < BigFloat(1.25));
  }

  // Direct integral oracle for L on the two intervals.
  const auto& t1 = fam.type1(n);
  auto zz = cz(0.1, 0.6);
  Complex<BigFloat> direct;
  for (int j = 0; j < 2; ++j) {
    Poly<BigFloat> A = t1.A[j].convert<BigFloat>();
    auto f = [&](const BigFloat& x) { return Complex<BigFloat>(A(x)) / (zz - Complex<BigFloat>(x)); };
    direct = direct + quadrature<Complex<BigFloat>>(f, BigFloat(sys.measures[j].lo), BigFloat(sys.measures[j].hi));
  }
  CHECK(test::close(second_kind(fam, n, zz).L, direct, test::tol(-50)));

  auto parts = form_parts(fam, n, Complex<Rational>(q(1, 3), q(2)));
  Complex<BigFloat> zp(BigFloat(1) / 3, BigFloat(2));
  Complex<BigFloat> L = -to_bigfloat(parts.coef0);
  for (int j = 0; j < 2; ++j) L = L + to_bigfloat(parts.coef[j]) * markov(sys, j, zp);
  CHECK(test::close(L, second_kind(fam, n, zp).L, test::tol(-60)));
}

TEST_CASE("decay certificate for the linear forms") {
  auto sys = test::symmetric_system();
  Family<Rational> fam(std::make_shared<MomentTable<Rational>>(sys));
  const BigFloat R = 1;
  std::vector<Complex<BigFloat>> pts{cz(2, 0), cz(0, 3), cz(-4, 4), cz(5, -6), cz(-10, 0)};
  for (const auto& n : box_indices(MultiIndex({5, 5}))) {
    if (n.total() == 0 || n.total() > 10) continue;
    for (const auto& z : pts) {
      BigFloat bound = pow(abs(z) - R, -n.total());
      CHECK(abs(second_kind(fam, n, z).L) <= bound);
    }
  }
}

TEST_CASE("d=1 Cauchy-Schwarz bound") {
  auto sys = lebesgue_system({{q(-1), q(1)}});
  auto mt = std::make_shared<MomentTable<Rational>>(sys);
  Family<Rational> fam(mt);
  for (int n = 0; n <= 10; ++n) {
    const auto& P = fam.type2(MultiIndex({n})).P;
    BigFloat normP = sqrt(BigFloat(integrate(*mt, 0, P * P)));
    for (const auto& z : {cz(2.5, 0), cz(0, 2.1), cz(-3, 4)}) {
      BigFloat bound = 2 * sqrt(BigFloat(2)) * pow(abs(z), -n - 1) * normP;
      CHECK(abs(second_kind(fam, MultiIndex({n}), z).R[0]) <= bound);
    }
  }
}

TEST_CASE("Hermite family is float only") {
  auto sys = hermite_system({q(0), q(1)});
  Family<BigFloat> fam(std::make_shared<MomentTable<BigFloat>>(sys));
  for (const auto& n : box_indices(MultiIndex({3, 3}))) {
    CHECK(type2_residual(fam, n) <= ldexp(BigFloat(1), -120));
  }
  CHECK_THROWS_AS(Family<Rational>(std::make_shared<MomentTable<Rational>>(sys)).type2(MultiIndex({1, 0})), Error);
}

}  // TEST_SUITE
