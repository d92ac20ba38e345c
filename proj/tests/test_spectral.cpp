#include "doctest.h"
#include "support.hpp"

#include "moptree/spectral.hpp"

#include <boost/math/constants/constants.hpp>

#include <algorithm>

using namespace moptree;
using moptree::test::q;

namespace {

using CB = Complex<BigFloat>;
using CQ = Complex<Rational>;

// Monic Legendre by the three-term recurrence.
template <class T>
Complex<T> monic_legendre(int n, const Complex<T>& z) {
  Complex<T> prev(1), cur = z;
  if (n == 0) {
    return prev;
  }
  for (int k = 1; k < n; ++k) {
    Complex<T> next = z * cur - Complex<T>(T(k * k) / T(4 * k * k - 1)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

std::vector<BigFloat> bf(std::initializer_list<double> xs) {
  std::vector<BigFloat> out;
  for (double x : xs) {
    out.emplace_back(x);
  }
  return out;
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("single vertex resolvent") {
  auto t = make_table<Rational>(test::symmetric_system());
  auto op = assemble_finite<Rational>(*t, {q(1), q(0)}, MultiIndex::zero(2), false);
  REQUIRE(op.size() == 1);
  CQ z(q(1), q(2));
  // b_{0,1} is the mean of the first measure, -3/4.
  CQ expect = CQ(1) / (CQ(q(-3, 4)) - z);
  CHECK(green_direct(op, 0, 0, z).value == expect);
  CHECK(green_formula_finite(t->family(), op, 0, z).value == expect);
  CHECK(cf_finite<Rational>(*t, MultiIndex::zero(2), 0, z).value == expect);
}

TEST_CASE("d = 1 Green function is the Legendre ratio") {
  auto t = make_table<Rational>(test::legendre_system());
  for (int n = 0; n <= 5; ++n) {
    for (bool sym : {false, true}) {
      auto op = assemble_finite<Rational>(*t, {q(1)}, MultiIndex({n}), sym);
      for (CQ z : {CQ(2), CQ(q(1, 3), q(1, 2))}) {
        CQ expect = -monic_legendre(n, z) / monic_legendre(n + 1, z);
        CHECK(green_direct(op, 0, 0, z).value == expect);
        CHECK(cf_finite<Rational>(*t, MultiIndex({n}), 0, z).value == expect);
      }
    }
  }
}

TEST_CASE("resolvent symmetry") {
  auto f = make_table<BigFloat>(test::float_system(test::symmetric_system()));
  auto J = assemble_finite<BigFloat>(*f, {BigFloat(1) / 3, BigFloat(2) / 3}, MultiIndex({2, 2}), true);
  CB z(BigFloat(1), BigFloat(1));
  for (int Y = 0; Y < J.size(); Y += 3) {
    for (int X = 0; X < J.size(); X += 4) {
      auto a = green_direct(J, Y, X, z).value;
      auto b = green_direct(J, X, Y, z).value;
      CHECK(test::close(a, b, test::tol(-60)));
      // Hermitian: G(Y,X,conj z) = conj G(X,Y,z).
      CHECK(test::close(green_direct(J, Y, X, conj(z)).value, conj(b), test::tol(-60)));
    }
  }
  // K-form: G_K(Y,X) m_X^2 = G_K(X,Y) m_Y^2.
  auto t = make_table<Rational>(test::symmetric_system());
  auto K = assemble_finite<Rational>(*t, {q(1), q(0)}, MultiIndex({2, 1}), false);
  CQ zq(q(1, 2), q(1));
  for (int Y = 0; Y < K.size(); ++Y) {
    for (int X = 0; X < K.size(); ++X) {
      CHECK(green_direct(K, Y, X, zq).value * CQ(K.msq[X]) == green_direct(K, X, Y, zq).value * CQ(K.msq[Y]));
    }
  }
}

TEST_CASE("formula matches the direct solve on every vertex") {
  auto f = make_table<BigFloat>(test::float_system(test::symmetric_system()));
  const MultiIndex N({2, 1});
  CB z(BigFloat(2), BigFloat(1));
  for (bool sym : {false, true}) {
    auto op = assemble_finite<BigFloat>(*f, {BigFloat(0), BigFloat(1)}, N, sym);
    for (int Y = 0; Y < op.size(); ++Y) {
      CHECK(test::close(green_direct(op, Y, 0, z).value, green_formula_finite(f->family(), op, Y, z).value,
                        test::tol(-30)));
    }
  }
  auto t = make_table<Rational>(test::symmetric_system());
  auto K = assemble_finite<Rational>(*t, {q(1, 4), q(3, 4)}, MultiIndex({2, 2}), false);
  for (int Y = 0; Y < K.size(); ++Y) {
    CHECK(green_direct(K, Y, 0, CQ(3)).value == green_formula_finite(t->family(), K, Y, CQ(3)).value);
  }
}

TEST_CASE("direct, formula and continued fraction agree at the root") {
  auto t = make_table<Rational>(test::symmetric_system());
  auto f = make_table<BigFloat>(test::float_system(test::symmetric_system()));
  for (const auto& N : box_indices(MultiIndex({3, 2}))) {
    for (int j = 0; j < 2; ++j) {
      std::vector<Rational> kq(2, q(0));
      kq[j] = 1;
      CQ z(q(1, 2), q(1, 3));
      auto op = assemble_finite<Rational>(*t, kq, N, false);
      auto g = green_direct(op, 0, 0, z).value;
      CHECK(g == green_formula_finite(t->family(), op, 0, z).value);
      CHECK(g == cf_finite<Rational>(*t, N, j, z).value);
      CHECK(g == -t->family().type2(N).P(z) / t->family().type2(N.plus(j)).P(z));

      std::vector<BigFloat> kf(2, BigFloat(0));
      kf[j] = 1;
      CB zf(BigFloat(-0.2), BigFloat(0.1));
      auto opf = assemble_finite<BigFloat>(*f, kf, N, true);
      auto gf = green_direct(opf, 0, 0, zf).value;
      CHECK(test::close(gf, green_formula_finite(f->family(), opf, 0, zf).value, test::tol(-50)));
      CHECK(test::close(gf, cf_finite<BigFloat>(*f, N, j, zf).value, test::tol(-50)));
    }
  }
  CHECK(std::string(green_method_name(GreenMethod::continued_fraction)) == "continued-fraction");
}

TEST_CASE("label change in the continued fraction") {
  auto t = make_table<Rational>(test::symmetric_system());
  const MultiIndex N({2, 3});
  CQ z(q(2), q(1, 5));
  auto m0 = cf_finite<Rational>(*t, N, 0, z).value;
  auto m1 = cf_finite<Rational>(*t, N, 1, z).value;
  CHECK(CQ(1) / m1 - CQ(1) / m0 == CQ(t->b(N, 1) - t->b(N, 0)));
}

TEST_CASE("near the spectrum") {
  auto t = make_table<Rational>(test::legendre_system());
  auto op = assemble_finite<Rational>(*t, {q(1)}, MultiIndex({1}), false);
  // P_1 = x vanishes at 0 for N = (0); for N = (1) the leaf pivot vanishes
  // but P_2 = x^2 - 1/3 does not, so the dense fallback answers.
  auto op0 = assemble_finite<Rational>(*t, {q(1)}, MultiIndex({0}), false);
  CHECK_THROWS_AS(green_direct(op0, 0, 0, CQ(0)), Error);
  CHECK(green_direct(op, 0, 0, CQ(0)).value == CQ(q(0)));
  CHECK(green_direct(op, 1, 0, CQ(0)).value == CQ(q(3)));
}

TEST_CASE("Theta formulas") {
  auto f = make_table<BigFloat>(test::float_system(test::symmetric_system()));
  const auto& mt = f->family().moments();
  for (auto kappa : {bf({0, 1}), bf({1, 0}), std::vector<BigFloat>{BigFloat(1) / 3, BigFloat(2) / 3}}) {
    for (CB z : {CB(BigFloat(2), BigFloat(1)), CB(BigFloat(0), BigFloat(3)), CB(BigFloat(-5))}) {
      CHECK(test::close(theta_formula(mt, kappa, z), theta_formula_d2(mt, kappa, z), test::tol(-60)));
    }
  }
  auto half = bf({0.5, 0.5});
  for (double y : {0.1, 1.0, 7.0}) {
    CB th = theta_formula(mt, half, CB(BigFloat(0), BigFloat(y)));
    CHECK(abs(th.re) < test::tol(-60));
    CHECK(th.im > 0);
  }
  // Nevanlinna: Im z > 0 gives Im Theta > 0; z Theta -> -1.
  for (auto kappa : {bf({0, 1}), bf({0.25, 0.75})}) {
    for (CB z : {CB(BigFloat(0.7), BigFloat(0.01)), CB(BigFloat(-0.6), BigFloat(0.2)), CB(BigFloat(0), BigFloat(1))}) {
      CHECK(theta_formula(mt, kappa, z).im > 0);
    }
    BigFloat prev = -1;
    for (double r : {10.0, 100.0, 1000.0}) {
      CB z(BigFloat(r), BigFloat(r / 3));
      BigFloat dev = abs(z * theta_formula(mt, kappa, z) + CB(1)) * abs(z);
      CHECK(dev < 2);
      if (prev > 0) {
        CHECK(abs(dev - prev) < 1);
      }
      prev = dev;
    }
  }
}

TEST_CASE("truncations and the continued fraction approach Theta") {
  auto f = make_table<BigFloat>(test::float_system(test::symmetric_system()));
  const auto& mt = f->family().moments();
  auto kappa = bf({0, 1});
  CB z(BigFloat(5));
  BigFloat prev = -1;
  for (int D = 2; D <= 8; D += 2) {
    auto tv = theta_infinite(*f, kappa, z, D);
    BigFloat err = abs(tv.truncated - tv.formula);
    if (prev > 0) {
      CHECK(err < prev);
    }
    prev = err;
  }
  CHECK(prev < test::tol(-3));
  for (CB zz : {z, CB(BigFloat(2), BigFloat(1)), CB(BigFloat(0.1), BigFloat(0.4))}) {
    CHECK(test::close(cf_infinite(*f, kappa, zz, 10), theta_formula(mt, kappa, zz), test::tol(-20)));
  }
  auto op = assemble_infinite<BigFloat>(*f, kappa, 3, true);
  CHECK(test::close(green_formula_infinite(*f, op, 0, z), theta_formula(mt, kappa, z), test::tol(-60)));
  // Deeper vertices against a deep truncation, K-form on both sides.
  auto deep = assemble_infinite<BigFloat>(*f, kappa, 10, false);
  auto col = resolvent_column(deep, 0, z);
  for (int Y = 1; Y < 7; ++Y) {
    CHECK(test::close(col[Y], green_formula_infinite(*f, deep, Y, z), test::tol(-4)));
  }
  auto sym = assemble_infinite<BigFloat>(*f, kappa, 3, true);
  auto ksym = assemble_infinite<BigFloat>(*f, kappa, 3, false);
  for (int Y = 1; Y < sym.size(); ++Y) {
    CHECK(test::close(green_formula_infinite(*f, sym, Y, z) * CB(sqrt(sym.msq[Y])),
                      green_formula_infinite(*f, ksym, Y, z), test::tol(-60)));
  }
}

TEST_CASE("density for kappa = (0, 1)") {
  auto f = make_table<BigFloat>(test::float_system(test::symmetric_system(), 128));
  const auto& mt = f->family().moments();
  for (double x : {-0.9, -0.75, -0.6, 0.55, 0.75, 0.95}) {
    CHECK(density_kuk1(mt, BigFloat(x)) > 0);
  }
  CHECK_THROWS_AS(density_kuk1(mt, BigFloat(0)), Error);
  CHECK_THROWS_AS(density_kuk1(mt, BigFloat(1)), Error);
  // Imaginary part of Theta just above the axis.
  for (double x : {-0.8, 0.7}) {
    CB th = theta_formula(mt, bf({0, 1}), CB(BigFloat(x), BigFloat(1e-20)));
    CHECK(test::close(th.im / boost::math::constants::pi<BigFloat>(), density_kuk1(mt, BigFloat(x)), test::tol(-12)));
  }
  CHECK(abs(density_mass(mt, 16, 30) - 1) < test::tol(-4));
}

TEST_CASE("multiplication polynomials") {
  auto t = make_table<Rational>(test::symmetric_system());
  auto rep = multiplication_Tk<Rational>(*t, 5, 7);
  REQUIRE(rep.T_k.size() == 6);
  for (int k = 0; k <= 5; ++k) {
    CHECK(rep.T_k[k].degree() == k);
    CHECK(rep.T_k[k].coeff(k) == 1);
  }
  CHECK(rep.ok);
  CHECK(rep.checked > 0);
  CHECK(rep.max_residual == 0);

  auto f = make_table<BigFloat>(test::float_system(test::symmetric_system()));
  auto rf = multiplication_Tk<BigFloat>(*f, 4, 6);
  CHECK(rf.ok);
  CHECK(rf.max_residual < test::tol(-50));
}

TEST_CASE("finite-tree spectral measures") {
  auto leg = make_table<BigFloat>(test::float_system(test::legendre_system()));
  auto r = spectral_support_check(*leg, MultiIndex({4}), 0);
  CHECK(r.ok);
  REQUIRE(r.eigenvalues.size() == 5);
  // Atoms at the Gauss nodes; the root is the top of the chain, so the weight
  // is the residue P_4(x) / P_5'(x) rather than the Gauss weight.
  const GaussRule& gl = gauss_legendre(5);
  const BigFloat h = test::tol(-30);
  for (int k = 0; k < 5; ++k) {
    const BigFloat x = gl.nodes[k];
    CHECK(test::close(r.eigenvalues[k], x, test::tol(-40)));
    BigFloat d5 = (monic_legendre(5, CB(x + h)).re - monic_legendre(5, CB(x - h)).re) / (2 * h);
    CHECK(test::close(r.weights[k], monic_legendre(4, CB(x)).re / d5, test::tol(-40)));
  }
  CHECK(test::close(r.weights[2], BigFloat(9) / 25, test::tol(-60)));

  auto f = make_table<BigFloat>(test::float_system(test::symmetric_system()));
  for (int j = 0; j < 2; ++j) {
    auto s = spectral_support_check(*f, MultiIndex({2, 1}), j);
    CHECK(s.ok);
    CHECK(s.vertices == 9);
    CHECK(s.distinct_support <= 4);
    CHECK(test::close(s.weight_sum, BigFloat(1), test::tol(-40)));
    for (const auto& msg : s.failures) {
      MESSAGE(msg);
    }
  }
  auto big = spectral_support_check(*f, MultiIndex({4, 4}), 1);
  CHECK(big.ok);
  CHECK(big.vertices == 251);
  CHECK(big.distinct_support <= 9);
}

TEST_CASE("random descent") {
  ConstantCoefficients<BigFloat> c(bf({0.25, 0.25}), bf({-1, 1}));
  auto r = random_path_stats(c, bf({0.25, 0.25}), 50, 7, 10);
  CHECK(r.stddev == doctest::Approx(0).epsilon(1e-12));
  CHECK(r.mean == doctest::Approx(std::log(0.25) / 2));
  CHECK(r.target == doctest::Approx(std::log(0.25) / 2));

  CHECK(random_path(2, 30, 11, 3) == random_path(2, 30, 11, 3));
  CHECK(random_path(2, 30, 11, 3) != random_path(2, 30, 11, 4));
  ConstantCoefficients<BigFloat> u(bf({0.25, 0.04}), bf({-1, 1}));
  auto a = random_path_stats(u, bf({0.25, 0.04}), 200, 5, 40);
  auto b = random_path_stats(u, bf({0.25, 0.04}), 200, 5, 40);
  CHECK(a.rates == b.rates);
  CHECK(a.stddev > 0);
  CHECK(a.within_3se);
  CHECK_THROWS_AS(random_path_stats(u, bf({0.25}), 10, 1, 5), Error);
}

}  // TEST_SUITE
