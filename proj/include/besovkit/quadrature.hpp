#pragma once

#include <cstddef>
#include <vector>

namespace bk {

// Gauss-Legendre rule on [-1, 1]; nodes are Legendre roots found by Newton
// iteration from the Chebyshev initial guess.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  static const GaussRule& of_order(std::size_t n);
};

// Nodes/weights mapped to [a, b].
struct Panel {
  std::vector<double> t;
  std::vector<double> w;
};

Panel map_rule(const GaussRule& rule, double a, double b);

} // namespace bk
