#pragma once

#include <cmath>
#include <complex>
#include <functional>

namespace polyspline {

/// Value together with its first two derivatives at a point.
template <class T>
struct Jet {
  T value{};
  T d1{};
  T d2{};

  const T& operator[](int m) const { return m == 0 ? value : (m == 1 ? d1 : d2); }

  Jet operator-() const { return {-value, -d1, -d2}; }
  friend Jet operator+(const Jet& a, const Jet& b) {
    return {a.value + b.value, a.d1 + b.d1, a.d2 + b.d2};
  }
  friend Jet operator-(const Jet& a, const Jet& b) {
    return {a.value - b.value, a.d1 - b.d1, a.d2 - b.d2};
  }
  friend Jet operator*(const Jet& a, const Jet& b) {
    return {a.value * b.value, a.d1 * b.value + a.value * b.d1,
            a.d2 * b.value + 2.0 * a.d1 * b.d1 + a.value * b.d2};
  }
  friend Jet operator*(const Jet& a, T s) { return {a.value * s, a.d1 * s, a.d2 * s}; }
  friend Jet operator*(T s, const Jet& a) { return a * s; }
};

/// The identity function r -> r as a jet.
inline Jet<double> variable(double r) { return {r, 1.0, 0.0}; }

template <class T>
Jet<T> constantJet(T c) {
  return {c, T{}, T{}};
}

inline Jet<double> exp(const Jet<double>& g) {
  const double e = std::exp(g.value);
  return {e, e * g.d1, e * (g.d2 + g.d1 * g.d1)};
}

inline Jet<double> reciprocal(const Jet<double>& w) {
  const double inv = 1.0 / w.value;
  return {inv, -w.d1 * inv * inv, (2.0 * w.d1 * w.d1 - w.value * w.d2) * inv * inv * inv};
}

template <class T>
Jet<std::complex<double>> toComplex(const Jet<T>& j) {
  return {j.value, j.d1, j.d2};
}

/// A function of r known through its 2-jet, e.g. data functions and test functions.
template <class T>
using JetFunction = std::function<Jet<T>(double)>;

}  // namespace polyspline
