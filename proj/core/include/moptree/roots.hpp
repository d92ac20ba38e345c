#pragma once

#include "moptree/poly.hpp"

#include <vector>

namespace moptree {

template <class T>
struct RootBracket {
  T lo;
  T hi;
  T mid() const { return (lo + hi) / 2; }
};

// Finds the expected number of simple roots of p in the open interval
// (lo, hi) by sign changes on a refining grid, then bisects each bracket to
// width <= `width` (negative selects 2^(-bits/2)*(hi-lo) for floats and
// 2^-64*(hi-lo) for rationals).
template <class T>
std::vector<RootBracket<T>> isolate_root_brackets(const Poly<T>& p, const T& lo, const T& hi, int expected_count,
                                                  const T& width = T(-1));

template <class T>
std::vector<T> isolate_roots(const Poly<T>& p, const T& lo, const T& hi, int expected_count,
                             const T& width = T(-1)) {
  std::vector<T> out;
  for (const auto& b : isolate_root_brackets(p, lo, hi, expected_count, width)) {
    out.push_back(b.mid());
  }
  return out;
}

}  // namespace moptree
