#pragma once

#include "moptree/complex.hpp"

#include <vector>

namespace moptree {

struct GaussRule {
  std::vector<BigFloat> nodes;    // on [-1, 1], ascending
  std::vector<BigFloat> weights;  // sum to 2
};

// Gauss-Legendre rule of the given order at the current precision (cached).
const GaussRule& gauss_legendre(int order);

template <class R, class Fn>
R gauss_apply(const Fn& f, const BigFloat& lo, const BigFloat& hi, const GaussRule& rule) {
  BigFloat half = (hi - lo) / 2;
  BigFloat mid = (hi + lo) / 2;
  R acc(0);
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    BigFloat x = mid + half * rule.nodes[k];
    acc += R(f(x)) * R(rule.weights[k]);
  }
  return acc * R(half);
}

// Adaptive Gauss-Legendre: doubles the order until successive values agree to
// `tol` relative to max(1, |value|).
template <class R, class Fn>
R quadrature(const Fn& f, const BigFloat& lo, const BigFloat& hi, int order = 16, BigFloat tol = BigFloat(-1),
             int max_doublings = 8) {
  if (order < 1) {
    throw Error(ErrorCode::InvalidConfig, "quadrature order must be positive");
  }
  if (tol < 0) {
    tol = default_tolerance<BigFloat>();
  }
  R prev = gauss_apply<R>(f, lo, hi, gauss_legendre(order));
  for (int k = 0; k < max_doublings; ++k) {
    order *= 2;
    R next = gauss_apply<R>(f, lo, hi, gauss_legendre(order));
    BigFloat scale = abs(next);
    if (scale < 1) {
      scale = 1;
    }
    if (abs(next - prev) <= tol * scale) {
      return next;
    }
    prev = next;
  }
  throw Error(ErrorCode::NoConvergence, "Gauss-Legendre did not settle after " + std::to_string(max_doublings) +
                                            " doublings");
}

// Composite fixed-order rule on panels halving in width toward both ends;
// suited to integrable endpoint singularities. The uncovered end pieces have
// width (hi-lo)*2^-(levels+1).
template <class R, class Fn>
R quadrature_graded(const Fn& f, const BigFloat& lo, const BigFloat& hi, int order, int levels) {
  const GaussRule& rule = gauss_legendre(order);
  BigFloat half = (hi - lo) / 2;
  R acc(0);
  BigFloat outer(1);
  for (int k = 0; k < levels; ++k) {
    BigFloat inner = outer / 2;
    acc += gauss_apply<R>(f, BigFloat(lo + half * inner), BigFloat(lo + half * outer), rule);
    acc += gauss_apply<R>(f, BigFloat(hi - half * outer), BigFloat(hi - half * inner), rule);
    outer = inner;
  }
  return acc;
}

}  // namespace moptree
