#include "besovkit/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace bk {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Legendre P_n and P_n' at x by the three-term recurrence.
std::pair<double, double> legendre(std::size_t n, double x) {
  double p0 = 1.0, p1 = x;
  for (std::size_t k = 2; k <= n; ++k) {
    double p2 = ((2.0 * double(k) - 1.0) * x * p1 - (double(k) - 1.0) * p0) / double(k);
    p0 = p1;
    p1 = p2;
  }
  double dp = double(n) * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

GaussRule compute_rule(std::size_t n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (double(i) + 0.75) / (double(n) + 0.5));
    for (int it = 0; it < 100; ++it) {
      auto [p, dp] = legendre(n, x);
      double dx = -p / dp;
      x += dx;
      if (std::abs(dx) < 1e-15) break;
    }
    auto [p, dp] = legendre(n, x);
    (void)p;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.weights[i] = w;
    r.nodes[n - 1 - i] = x;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) {
    r.nodes[n / 2] = 0.0;
    auto [p, dp] = legendre(n, 0.0);
    (void)p;
    r.weights[n / 2] = 2.0 / (dp * dp);
  }
  return r;
}

} // namespace

const GaussRule& GaussRule::of_order(std::size_t n) {
  static std::mutex mtx;
  static std::map<std::size_t, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
  return it->second;
}

Panel map_rule(const GaussRule& rule, double a, double b) {
  Panel p;
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  p.t.reserve(rule.nodes.size());
  p.w.reserve(rule.nodes.size());
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    p.t.push_back(mid + half * rule.nodes[i]);
    p.w.push_back(half * rule.weights[i]);
  }
  return p;
}

} // namespace bk
