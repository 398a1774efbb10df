#pragma once

// Reproducible random instances and the built-in data catalogue used by the
// verification suites, the convergence study and the surface study.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "polyspline/errors.hpp"
#include "polyspline/jet.hpp"
#include "polyspline/knots.hpp"
#include "polyspline/spline.hpp"
#include "polyspline/surface.hpp"

namespace polyspline {

/// mt19937_64 with distributions written out explicitly, so that a seed
/// produces the same stream on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * unit(); }
  /// Uniform on {lo, ..., hi}.
  int integer(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }
  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

/// n knots on [lo, hi] whose consecutive gaps are at least minGap times the
/// average gap.
inline KnotSet randomKnots(Rng& rng, std::size_t n, double lo, double hi, double minGap = 0.2) {
  if (n == 1) return KnotSet({rng.uniform(lo, hi)});
  std::vector<double> gaps(n - 1);
  double total = 0.0;
  for (auto& g : gaps) total += (g = minGap + rng.unit());
  std::vector<double> r{lo};
  for (std::size_t i = 0; i + 1 < n; ++i) r.push_back(r.back() + (hi - lo) * gaps[i] / total);
  r.back() = hi;
  return KnotSet(std::move(r));
}

/// A random frequency with 1 <= |k| <= maxK and a random sign.
inline int randomFrequency(Rng& rng, int minK, int maxK) {
  const int a = rng.integer(minK, maxK);
  return rng.coin() ? a : -a;
}

/// A C^infinity function vanishing at every knot and supported in (lo, hi):
///   psi(r) = amplitude * p(r) * prod_j (r - r_j) * exp(-1 / (1 - u^2)),
/// u = (2r - lo - hi) / (hi - lo), p a polynomial with random coefficients.
class KnotBump {
 public:
  KnotBump(const KnotSet& knots, double lo, double hi, std::vector<double> poly, double amplitude = 1.0)
      : knots_(knots.vector()), lo_(lo), hi_(hi), poly_(std::move(poly)), amplitude_(amplitude) {
    if (!(lo >= 0.0 && lo < knots.front() && hi > knots.back()))
      throw InputError("bump support must contain all knots");
  }

  /// Support (r_1 - delta, r_n + delta) with delta = frac * min(r_1, r_n - r_1 or r_1).
  static KnotBump random(Rng& rng, const KnotSet& knots, double amplitude = 1.0) {
    const double width = knots.size() > 1 ? knots.back() - knots.front() : knots.front();
    const double delta = std::min(knots.front(), width) * rng.uniform(0.2, 0.6);
    std::vector<double> poly(3);
    for (auto& c : poly) c = rng.uniform(-1.0, 1.0);
    poly[0] += poly[0] < 0.0 ? -1.0 : 1.0;
    return KnotBump(knots, knots.front() - delta, knots.back() + delta, std::move(poly), amplitude);
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }

  Jet<double> operator()(double r) const {
    if (r <= lo_ || r >= hi_) return constantJet(0.0);
    const Jet<double> x = variable(r);
    Jet<double> p = constantJet(0.0);
    for (auto it = poly_.rbegin(); it != poly_.rend(); ++it) p = p * x + constantJet(*it);
    for (double rj : knots_) p = p * (x - constantJet(rj));
    const Jet<double> u = (x * 2.0 - constantJet(lo_ + hi_)) * (1.0 / (hi_ - lo_));
    return p * exp(-1.0 * reciprocal(constantJet(1.0) - u * u)) * amplitude_;
  }

 private:
  std::vector<double> knots_;
  double lo_, hi_;
  std::vector<double> poly_;
  double amplitude_;
};

/// A random member of S_k(knots).  For |k| >= 2 it is the dilation sum
/// sum_j c_j phi_k(r / r_j); for |k| = 1, where dilates of phi_k only span
/// multiples of r, it is the spline interpolating random values on every
/// other knot, which is also a member of S_k(knots).
inline BeppoLeviSpline<double> randomMember(Rng& rng, int k, const KnotSet& knots) {
  const auto a = detail::checkedFrequency(k);
  if (a >= 2) {
    std::vector<double> c(knots.size());
    for (auto& x : c) x = rng.uniform(-1.0, 1.0);
    return dilationSum<double>(k, knots, c);
  }
  std::vector<double> sub, values;
  for (std::size_t j = 0; j < knots.size(); j += 2) sub.push_back(knots[j]);
  if (knots.size() > 1 && sub.back() != knots.back()) sub.push_back(knots.back());
  for (std::size_t j = 0; j < sub.size(); ++j) values.push_back(rng.uniform(-1.0, 1.0));
  return buildInterpolant<double>(k, KnotSet(sub), values);
}

// ---------------------------------------------------------------------------
// Built-in data

/// Catalogue of radial data functions for the convergence study.
///   powexp : g(r) = r^|k| e^{-r}
///   zero   : g = 0
inline JetFunction<double> builtinDatum(const std::string& id, int k) {
  const double a = static_cast<double>(detail::checkedFrequency(k));
  if (id == "powexp")
    return [a](double r) {
      const Jet<double> x = variable(r);
      const double p = std::pow(r, a);
      const Jet<double> power{p, a * std::pow(r, a - 1.0), a * (a - 1.0) * std::pow(r, a - 2.0)};
      return power * exp(-1.0 * x);
    };
  if (id == "zero") return [](double) { return constantJet(0.0); };
  throw InputError("unknown datum '" + id + "' (known: powexp, zero)");
}

/// The zero-mean reference surface f(r, theta) = sum_{1 <= |k| <= 3} f_k(r) e^{ik theta}
/// with f_k(r) = c_k r^k e^{-r} and f_{-k} = conj(f_k).
inline ModalSurface manufacturedSurface() {
  static const Complex c[3] = {{1.0, 0.5}, {-0.6, 0.8}, {0.4, -0.3}};
  ModalSurface f;
  for (int k = 1; k <= 3; ++k) {
    const auto g = builtinDatum("powexp", k);
    const Complex ck = c[k - 1];
    f.modes.push_back([g, ck](double r) { return toComplex(g(r)) * ck; });
  }
  return f;
}

/// Samples a modal surface on the circles r_j at M equispaced angles.
inline std::vector<std::vector<double>> sampleCurves(const ModalSurface& f, const KnotSet& radii, int samples) {
  std::vector<std::vector<double>> curves(radii.size(), std::vector<double>(static_cast<std::size_t>(samples)));
  for (std::size_t j = 0; j < radii.size(); ++j)
    for (int i = 0; i < samples; ++i)
      curves[j][static_cast<std::size_t>(i)] =
          f(radii[j], -std::numbers::pi + 2.0 * std::numbers::pi * i / samples);
  return curves;
}

}  // namespace polyspline
