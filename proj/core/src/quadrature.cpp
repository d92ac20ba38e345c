#include "moptree/quadrature.hpp"

#include <boost/math/constants/constants.hpp>

#include <map>
#include <memory>
#include <mutex>

namespace moptree {

namespace {

GaussRule build_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const BigFloat pi = boost::math::constants::pi<BigFloat>();
  const BigFloat eps = ldexp(BigFloat(1), -static_cast<int>(current_precision_bits()) + 6);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev-like initial guess, refined in double first then in full precision.
    BigFloat x = cos(pi * (i + BigFloat(0.75)) / (n + BigFloat(0.5)));
    BigFloat dp;
    for (int it = 0; it < 100; ++it) {
      BigFloat p0(1);
      BigFloat p1 = x;
      for (int k = 2; k <= n; ++k) {
        BigFloat p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = std::move(p1);
        p1 = std::move(p2);
      }
      if (n == 1) {
        p0 = 1;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      BigFloat dx = p1 / dp;
      x -= dx;
      if (abs(dx) <= eps) {
        break;
      }
    }
    BigFloat w = 2 / ((1 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) {
    rule.nodes[n / 2] = 0;
  }
  return rule;
}

std::mutex cache_mutex;
std::map<std::pair<int, unsigned>, std::unique_ptr<GaussRule>> cache;

}  // namespace

const GaussRule& gauss_legendre(int order) {
  if (order < 1) {
    throw Error(ErrorCode::InvalidConfig, "Gauss-Legendre order must be positive");
  }
  const unsigned bits = current_precision_bits();
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto key = std::make_pair(order, bits);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_unique<GaussRule>(build_rule(order))).first;
  }
  return *it->second;
}

}  // namespace moptree
