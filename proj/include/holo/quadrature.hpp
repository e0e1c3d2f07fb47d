#pragma once

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "holo/error.hpp"

namespace holo::quad {

inline constexpr int kDefaultOrder = 32;
inline constexpr double kDefaultTol = 1e-11;

struct Options {
  int order = kDefaultOrder;   ///< Gauss-Legendre nodes per panel
  double tol = kDefaultTol;    ///< agreement required between a panel and its two halves
  int max_depth = 40;          ///< bisection depth limit
};

/// Nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached rule of the given order (Newton iteration on P_n).
const GaussLegendreRule& gauss_legendre(int order);

inline double magnitude(std::complex<double> v) { return std::abs(v); }
inline double magnitude(double v) { return std::abs(v); }
template <class Derived>
double magnitude(const Eigen::MatrixBase<Derived>& v) {
  return v.norm();
}

/// Adaptive composite Gauss-Legendre on [a, b]. A panel is accepted when its
/// value agrees with the sum over its two halves to tol * max(1, |I|) scaled by
/// the panel's share of [a, b]. Throws Numerical/NonConvergence past max_depth.
template <class F>
auto integrate(F&& f, double a, double b, const Options& opt = {}) -> decltype(f(a)) {
  using T = decltype(f(a));
  const auto& rule = gauss_legendre(opt.order);

  auto panel = [&](double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    T sum = f(mid + half * rule.nodes[0]) * (rule.weights[0] * half);
    for (size_t i = 1; i < rule.nodes.size(); ++i) sum += f(mid + half * rule.nodes[i]) * (rule.weights[i] * half);
    return sum;
  };

  struct Item {
    double lo, hi;
    T value;
    int depth;
  };
  T whole = panel(a, b);
  const double scale = std::max(1.0, magnitude(whole));
  const double length = std::abs(b - a);
  T total = whole * 0.0;
  std::vector<Item> stack;
  stack.push_back({a, b, std::move(whole), 0});
  while (!stack.empty()) {
    Item it = std::move(stack.back());
    stack.pop_back();
    const double mid = 0.5 * (it.lo + it.hi);
    T left = panel(it.lo, mid);
    T right = panel(mid, it.hi);
    T refined = left + right;
    const double share = length > 0.0 ? std::abs(it.hi - it.lo) / length : 1.0;
    if (magnitude(T(refined - it.value)) <= opt.tol * scale * share) {
      total += refined;
      continue;
    }
    if (it.depth + 1 > opt.max_depth) {
      throw numerical_error("NonConvergence", "adaptive quadrature exceeded its depth limit");
    }
    stack.push_back({mid, it.hi, std::move(right), it.depth + 1});
    stack.push_back({it.lo, mid, std::move(left), it.depth + 1});
  }
  return total;
}

}  // namespace holo::quad
