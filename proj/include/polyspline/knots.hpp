#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "polyspline/errors.hpp"

namespace polyspline {

/// Strictly increasing positive interpolation radii r_1 < ... < r_n.
class KnotSet {
 public:
  static constexpr double kMinRadius = 1e-12;

  explicit KnotSet(std::vector<double> radii) : radii_(std::move(radii)) {
    if (radii_.empty()) throw InputError("knot set must contain at least one radius");
    for (std::size_t j = 0; j < radii_.size(); ++j) {
      if (!(radii_[j] >= kMinRadius))
        throw InputError("radius " + std::to_string(radii_[j]) + " at index " + std::to_string(j) +
                         " is not positive");
      if (j > 0 && !(radii_[j] > radii_[j - 1]))
        throw InputError("radii must be strictly increasing (index " + std::to_string(j) + ")");
    }
  }

  std::size_t size() const { return radii_.size(); }
  double operator[](std::size_t j) const { return radii_[j]; }
  double front() const { return radii_.front(); }
  double back() const { return radii_.back(); }
  std::span<const double> radii() const { return radii_; }
  const std::vector<double>& vector() const { return radii_; }

  /// Largest gap between consecutive radii (0 for a single radius).
  double meshSize() const {
    double h = 0.0;
    for (std::size_t j = 1; j < radii_.size(); ++j) h = std::max(h, radii_[j] - radii_[j - 1]);
    return h;
  }

  /// The knot set dilated by lambda > 0.
  KnotSet scaled(double lambda) const {
    auto r = radii_;
    for (auto& x : r) x *= lambda;
    return KnotSet(std::move(r));
  }

  /// n equispaced radii on [a, b].
  static KnotSet uniform(double a, double b, std::size_t n) {
    if (n == 1) return KnotSet({a});
    std::vector<double> r(n);
    for (std::size_t j = 0; j < n; ++j) r[j] = a + (b - a) * static_cast<double>(j) / static_cast<double>(n - 1);
    r.back() = b;
    return KnotSet(std::move(r));
  }

  friend bool operator==(const KnotSet&, const KnotSet&) = default;

 private:
  std::vector<double> radii_;
};

}  // namespace polyspline
