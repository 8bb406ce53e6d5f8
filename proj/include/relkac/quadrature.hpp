#pragma once

#include <vector>

namespace relkac {

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Cached; safe to call concurrently.
const GaussRule& gauss_legendre(int n);

// n-point rule on [a, b].
template <class F>
auto integrate_gl(F&& f, double a, double b, int n) {
  const GaussRule& g = gauss_legendre(n);
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  auto sum = f(c + h * g.nodes[0]) * g.weights[0];
  for (int i = 1; i < n; ++i) sum += f(c + h * g.nodes[i]) * g.weights[i];
  return sum * h;
}

}  // namespace relkac
