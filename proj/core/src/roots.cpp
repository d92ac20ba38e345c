#include "moptree/roots.hpp"

namespace moptree {

namespace {

template <class T>
int sgn(const T& v) {
  return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

template <class T>
std::vector<RootBracket<T>> scan(const Poly<T>& p, const T& lo, const T& hi, int cells) {
  std::vector<RootBracket<T>> found;
  T step = (hi - lo) / cells;
  T x0 = lo;
  int s0 = sgn(p(lo));
  for (int k = 1; k <= cells; ++k) {
    T x1 = k == cells ? hi : T(lo + step * k);
    int s1 = sgn(p(x1));
    if (s1 == 0 && k < cells) {
      found.push_back({x1, x1});
    } else if (s0 != 0 && s1 != 0 && s0 != s1) {
      found.push_back({x0, x1});
    }
    x0 = x1;
    s0 = s1;
  }
  return found;
}

}  // namespace

template <class T>
std::vector<RootBracket<T>> isolate_root_brackets(const Poly<T>& p, const T& lo, const T& hi, int expected_count,
                                                  const T& width) {
  if (expected_count < 0 || !(lo < hi)) {
    throw Error(ErrorCode::InvalidConfig, "isolate_roots needs lo < hi and a nonnegative count");
  }
  if (expected_count == 0) {
    return {};
  }
  T target = width;
  if (target < 0) {
    if constexpr (is_exact_v<T>) {
      target = (hi - lo) / pow_int(Rational(2), 64);
    } else {
      target = (hi - lo) * default_tolerance<T>();
    }
  }
  int cells = 4 * std::max(1, p.degree());
  std::vector<RootBracket<T>> found;
  for (int level = 0; level < 16; ++level, cells *= 2) {
    found = scan(p, lo, hi, cells);
    if (static_cast<int>(found.size()) >= expected_count) {
      break;
    }
  }
  if (static_cast<int>(found.size()) != expected_count) {
    throw Error(ErrorCode::RootCountMismatch, "expected " + std::to_string(expected_count) + " roots, found " +
                                                  std::to_string(found.size()));
  }
  for (auto& b : found) {
    if (b.lo == b.hi) {
      continue;
    }
    int slo = sgn(p(b.lo));
    while (b.hi - b.lo > target) {
      T m = b.mid();
      int sm = sgn(p(m));
      if (sm == 0) {
        b.lo = m;
        b.hi = m;
        break;
      }
      if (sm == slo) {
        b.lo = m;
      } else {
        b.hi = m;
      }
    }
  }
  return found;
}

template std::vector<RootBracket<Rational>> isolate_root_brackets<Rational>(const Poly<Rational>&, const Rational&,
                                                                            const Rational&, int, const Rational&);
template std::vector<RootBracket<BigFloat>> isolate_root_brackets<BigFloat>(const Poly<BigFloat>&, const BigFloat&,
                                                                            const BigFloat&, int, const BigFloat&);

}  // namespace moptree
