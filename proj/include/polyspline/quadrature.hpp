#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include "polyspline/errors.hpp"

namespace polyspline {

/// n-point Gauss-Legendre rule on [-1, 1], nodes from Newton iteration on P_n.
class GaussLegendre {
 public:
  explicit GaussLegendre(int n) : nodes_(n), weights_(n) {
    if (n < 1) throw InputError("Gauss-Legendre order must be positive");
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= n; ++j) {
          const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes_[i] = -x;
      nodes_[n - 1 - i] = x;
      weights_[i] = weights_[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }

  int order() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

  /// Composite rule with `panels` equal panels on [a, b].
  template <class F>
  auto integrate(F&& f, double a, double b, int panels = 1) const {
    using R = decltype(f(a));
    R sum{};
    const double width = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      const double lo = a + p * width;
      const double half = 0.5 * width, mid = lo + half;
      for (std::size_t i = 0; i < nodes_.size(); ++i) sum += weights_[i] * half * f(mid + half * nodes_[i]);
    }
    return sum;
  }

  /// Integral over [a, inf), a > 0, through r = a/u on u in (0, 1].
  template <class F>
  auto integrateToInfinity(F&& f, double a, int panels = 1) const {
    return integrate([&](double u) { return f(a / u) * (a / (u * u)); }, 0.0, 1.0, panels);
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Shared, lazily built rule of the given order.
inline const GaussLegendre& gaussLegendre(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussLegendre>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussLegendre>(n);
  return *slot;
}

}  // namespace polyspline
