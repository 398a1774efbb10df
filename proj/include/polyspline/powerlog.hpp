#pragma once

// Exact calculus on finite sums  sum_i c_i r^{a_i} (ln r)^{m_i}.
//
// Every spline piece, kernel generator and operator image handled by the
// library lives in this class.  Exponents are exact rationals so that the
// operator identities (annihilation, factorizations) cancel to exact zeros.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "polyspline/errors.hpp"
#include "polyspline/rational.hpp"

namespace polyspline {

template <class T>
struct is_complex : std::false_type {};
template <class R>
struct is_complex<std::complex<R>> : std::true_type {};
template <class T>
inline constexpr bool is_complex_v = is_complex<T>::value;

inline double conjugate(double x) { return x; }
template <class R>
std::complex<R> conjugate(const std::complex<R>& z) {
  return std::conj(z);
}

inline double realPart(double x) { return x; }
template <class R>
R realPart(const std::complex<R>& z) {
  return z.real();
}

/// One term  coeff * r^exponent * (ln r)^logPower.
template <class T>
struct PowerLogTerm {
  T coeff{};
  Rational exponent{};
  int logPower = 0;

  T operator()(double r) const {
    if (r == 0.0) {
      if (exponent > Rational(0)) return T{};
      if (exponent == Rational(0) && logPower == 0) return coeff;
      return coeff * std::numeric_limits<double>::infinity();
    }
    double v = exponent.isInteger() ? std::pow(r, static_cast<double>(exponent.num()))
                                    : std::pow(r, exponent.toDouble());
    if (logPower > 0) v *= std::pow(std::log(r), logPower);
    return coeff * v;
  }
};

template <class T>
class PowerLogExpr {
 public:
  using Term = PowerLogTerm<T>;

  /// Relative magnitude below which merged coefficients are dropped.
  static constexpr double kDropTolerance = 1e-14;

  PowerLogExpr() = default;
  explicit PowerLogExpr(std::vector<Term> terms) : terms_(std::move(terms)) {
    normalize();
  }

  static PowerLogExpr monomial(T coeff, Rational exponent, int logPower = 0) {
    return PowerLogExpr({Term{coeff, exponent, logPower}});
  }
  static PowerLogExpr constant(T c) { return monomial(c, Rational(0)); }

  const std::vector<Term>& terms() const { return terms_; }
  bool isZero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Coefficient of r^exponent (ln r)^logPower, zero if absent.
  T coefficient(Rational exponent, int logPower = 0) const {
    for (const auto& t : terms_)
      if (t.exponent == exponent && t.logPower == logPower) return t.coeff;
    return T{};
  }

  double maxAbsCoefficient() const {
    double m = 0.0;
    for (const auto& t : terms_) m = std::max(m, std::abs(t.coeff));
    return m;
  }

  T operator()(double r) const {
    T sum{};
    for (const auto& t : terms_) sum += t(r);
    return sum;
  }

  PowerLogExpr conj() const {
    auto out = terms_;
    for (auto& t : out) t.coeff = conjugate(t.coeff);
    return PowerLogExpr(std::move(out));
  }

  PowerLogExpr& operator+=(const PowerLogExpr& o) {
    terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
    normalize();
    return *this;
  }
  PowerLogExpr& operator-=(const PowerLogExpr& o) { return *this += (-o); }
  PowerLogExpr& operator*=(T s) {
    for (auto& t : terms_) t.coeff *= s;
    normalize();
    return *this;
  }

  friend PowerLogExpr operator+(PowerLogExpr a, const PowerLogExpr& b) { return a += b; }
  friend PowerLogExpr operator-(PowerLogExpr a, const PowerLogExpr& b) { return a -= b; }
  friend PowerLogExpr operator*(PowerLogExpr a, T s) { return a *= s; }
  friend PowerLogExpr operator*(T s, PowerLogExpr a) { return a *= s; }
  PowerLogExpr operator-() const {
    auto out = terms_;
    for (auto& t : out) t.coeff = -t.coeff;
    return PowerLogExpr(std::move(out));
  }

  friend PowerLogExpr operator*(const PowerLogExpr& a, const PowerLogExpr& b) {
    std::vector<Term> out;
    out.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& s : a.terms_)
      for (const auto& t : b.terms_)
        out.push_back({s.coeff * t.coeff, s.exponent + t.exponent, s.logPower + t.logPower});
    return PowerLogExpr(std::move(out));
  }

  /// Structural equality of the normalized term sets (exact coefficients).
  friend bool operator==(const PowerLogExpr& a, const PowerLogExpr& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i) {
      const auto& s = a.terms_[i];
      const auto& t = b.terms_[i];
      if (s.exponent != t.exponent || s.logPower != t.logPower || s.coeff != t.coeff)
        return false;
    }
    return true;
  }

  std::string toString() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (const auto& t : terms_) {
      if (!first) os << " + ";
      first = false;
      os << "(" << t.coeff << ")";
      if (!(t.exponent == Rational(0))) os << "*r^" << t.exponent;
      if (t.logPower == 1) os << "*ln(r)";
      if (t.logPower > 1) os << "*ln(r)^" << t.logPower;
    }
    return os.str();
  }

  template <class U>
  PowerLogExpr<U> cast() const {
    std::vector<PowerLogTerm<U>> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) out.push_back({static_cast<U>(t.coeff), t.exponent, t.logPower});
    return PowerLogExpr<U>(std::move(out));
  }

 private:
  void normalize() {
    std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) {
      if (a.exponent != b.exponent) return a.exponent < b.exponent;
      return a.logPower < b.logPower;
    });
    std::vector<Term> merged;
    merged.reserve(terms_.size());
    for (const auto& t : terms_) {
      if (!merged.empty() && merged.back().exponent == t.exponent &&
          merged.back().logPower == t.logPower) {
        merged.back().coeff += t.coeff;
      } else {
        merged.push_back(t);
      }
    }
    double maxAbs = 0.0;
    for (const auto& t : merged) maxAbs = std::max(maxAbs, std::abs(t.coeff));
    const double cut = kDropTolerance * maxAbs;
    std::erase_if(merged, [cut](const Term& t) { return t.coeff == T{} || std::abs(t.coeff) < cut; });
    terms_ = std::move(merged);
  }

  std::vector<Term> terms_;
};

using RealExpr = PowerLogExpr<double>;
using ComplexExpr = PowerLogExpr<std::complex<double>>;

/// r^exponent (ln r)^logPower with unit coefficient.
template <class T = double>
PowerLogExpr<T> rpow(Rational exponent, int logPower = 0) {
  return PowerLogExpr<T>::monomial(T(1), exponent, logPower);
}

// ---------------------------------------------------------------------------
// Differential operators

template <class T>
PowerLogExpr<T> differentiate(const PowerLogExpr<T>& e) {
  std::vector<PowerLogTerm<T>> out;
  out.reserve(2 * e.size());
  for (const auto& t : e.terms()) {
    const Rational lowered = t.exponent - Rational(1);
    if (!(t.exponent == Rational(0)))
      out.push_back({t.coeff * t.exponent.toDouble(), lowered, t.logPower});
    if (t.logPower > 0)
      out.push_back({t.coeff * static_cast<double>(t.logPower), lowered, t.logPower - 1});
  }
  return PowerLogExpr<T>(std::move(out));
}

template <class T>
PowerLogExpr<T> differentiate(const PowerLogExpr<T>& e, int order) {
  PowerLogExpr<T> out = e;
  for (int i = 0; i < order; ++i) out = differentiate(out);
  return out;
}

/// Multiplication by r^beta.
template <class T>
PowerLogExpr<T> multiplyPower(const PowerLogExpr<T>& e, Rational beta) {
  auto terms = e.terms();
  for (auto& t : terms) t.exponent = t.exponent + beta;
  return PowerLogExpr<T>(std::move(terms));
}

/// The Euler operator r d/dr.
template <class T>
PowerLogExpr<T> applyEuler(const PowerLogExpr<T>& e) {
  return multiplyPower(differentiate(e), Rational(1));
}

/// r^power * (r d/dr + s_1) ... (r d/dr + s_p) e, rightmost factor applied first.
template <class T>
PowerLogExpr<T> applyEulerProduct(const PowerLogExpr<T>& e, const std::vector<Rational>& shifts,
                                  Rational power) {
  PowerLogExpr<T> out = e;
  for (auto it = shifts.rbegin(); it != shifts.rend(); ++it)
    out = applyEuler(out) + out * T(it->toDouble());
  return multiplyPower(out, power);
}

namespace detail {
inline std::int64_t checkedFrequency(int k) {
  if (k == 0) throw UnsupportedFrequency("frequency k = 0 is not supported by the L_k operators");
  return k < 0 ? -static_cast<std::int64_t>(k) : k;
}

// The operators below have small integer coefficients, so their images of a
// unit monomial are exact.  Applying them term by term and scaling afterwards
// keeps every kernel member mapped to an exact zero.
template <class T, class Op>
PowerLogExpr<T> termwise(const PowerLogExpr<T>& e, Op&& op) {
  std::vector<PowerLogTerm<T>> out;
  for (const auto& t : e.terms()) {
    const RealExpr image = op(RealExpr::monomial(1.0, t.exponent, t.logPower));
    for (const auto& u : image.terms()) out.push_back({t.coeff * u.coeff, u.exponent, u.logPower});
  }
  return PowerLogExpr<T>(std::move(out));
}

inline RealExpr unitGk(std::int64_t a, const RealExpr& e) {
  const auto d1 = differentiate(e);
  const auto d2 = differentiate(d1);
  auto inner = d2 - multiplyPower(d1, Rational(-1)) * (2.0 * a + 1.0) +
               multiplyPower(e, Rational(-2)) * static_cast<double>(a * (a + 2));
  return multiplyPower(inner, Rational(-1));
}

inline RealExpr unitRk(std::int64_t a, const RealExpr& e) {
  const auto d1 = differentiate(e);
  const auto d2 = differentiate(d1);
  auto inner = d2 + multiplyPower(d1, Rational(-1)) * (2.0 * a - 1.0) +
               multiplyPower(e, Rational(-2)) * static_cast<double>(a * (a - 2));
  return multiplyPower(inner, Rational(-1));
}

inline RealExpr unitMkAdjoint(std::int64_t a, const RealExpr& e) {
  return differentiate(multiplyPower(e, Rational(1, 2)), 2) -
         differentiate(multiplyPower(e, Rational(-1, 2))) -
         multiplyPower(e, Rational(-3, 2)) * static_cast<double>(a * a);
}
}  // namespace detail

/// B_k = d^2/dr^2 + r^{-1} d/dr - k^2 r^{-2}, the radial part of the Laplacian.
template <class T>
PowerLogExpr<T> applyBesselLaplacian(int k, const PowerLogExpr<T>& e) {
  const double k2 = static_cast<double>(k) * k;
  return detail::termwise(e, [k2](const RealExpr& u) {
    const auto d1 = differentiate(u);
    return differentiate(d1) + multiplyPower(d1, Rational(-1)) - multiplyPower(u, Rational(-2)) * k2;
  });
}

/// G_k = r^{-1} [ d^2/dr^2 - (2|k|+1) r^{-1} d/dr + |k|(|k|+2) r^{-2} ].
template <class T>
PowerLogExpr<T> applyGk(int k, const PowerLogExpr<T>& e) {
  const auto a = detail::checkedFrequency(k);
  return detail::termwise(e, [a](const RealExpr& u) { return detail::unitGk(a, u); });
}

/// R_k = r^{-1} [ d^2/dr^2 + (2|k|-1) r^{-1} d/dr + |k|(|k|-2) r^{-2} ].
template <class T>
PowerLogExpr<T> applyRk(int k, const PowerLogExpr<T>& e) {
  const auto a = detail::checkedFrequency(k);
  return detail::termwise(e, [a](const RealExpr& u) { return detail::unitRk(a, u); });
}

/// L_k = r (d^2/dr^2 + r^{-1} d/dr - k^2 r^{-2})^2.
template <class T>
PowerLogExpr<T> applyLk(int k, const PowerLogExpr<T>& e) {
  detail::checkedFrequency(k);
  return detail::termwise(e, [k](const RealExpr& u) {
    return multiplyPower(applyBesselLaplacian(k, applyBesselLaplacian(k, u)), Rational(1));
  });
}

/// M_k = r^{-3/2} (r d/dr - |k|)(r d/dr + |k|).
template <class T>
PowerLogExpr<T> applyMk(int k, const PowerLogExpr<T>& e) {
  const auto a = detail::checkedFrequency(k);
  return detail::termwise(e, [a](const RealExpr& u) {
    return applyEulerProduct(u, {Rational(-a), Rational(a)}, Rational(-3, 2));
  });
}

/// Formal adjoint of M_k = r^{1/2} D^2 + r^{-1/2} D - k^2 r^{-3/2}, i.e.
/// v -> D^2 (r^{1/2} v) - D (r^{-1/2} v) - k^2 r^{-3/2} v.
template <class T>
PowerLogExpr<T> applyMkAdjoint(int k, const PowerLogExpr<T>& e) {
  const auto a = detail::checkedFrequency(k);
  return detail::termwise(e, [a](const RealExpr& u) { return detail::unitMkAdjoint(a, u); });
}

// ---------------------------------------------------------------------------
// Integration

/// Antiderivative, term by term.  For a != -1,
///   int r^a (ln r)^m = r^{a+1} sum_i (-1)^i m!/(m-i)! (ln r)^{m-i} / (a+1)^{i+1},
/// and int r^{-1} (ln r)^m = (ln r)^{m+1} / (m+1).
template <class T>
PowerLogExpr<T> antiderivative(const PowerLogExpr<T>& e) {
  std::vector<PowerLogTerm<T>> out;
  for (const auto& t : e.terms()) {
    if (t.exponent == Rational(-1)) {
      out.push_back({t.coeff / static_cast<double>(t.logPower + 1), Rational(0), t.logPower + 1});
      continue;
    }
    const Rational raised = t.exponent + Rational(1);
    const double inv = 1.0 / raised.toDouble();
    double factor = inv;  // (-1)^i m!/(m-i)! / (a+1)^{i+1}
    for (int i = 0; i <= t.logPower; ++i) {
      out.push_back({t.coeff * factor, raised, t.logPower - i});
      factor *= -static_cast<double>(t.logPower - i) * inv;
    }
  }
  return PowerLogExpr<T>(std::move(out));
}

/// Exact value of the integral of e over [a, b]; a >= 0, b may be +infinity.
/// Each normalized term must converge on its own at an improper endpoint.
template <class T>
T integrateExact(const PowerLogExpr<T>& e, double a, double b) {
  if (!(a >= 0.0) || !(b >= a))
    throw InputError("integrateExact: need 0 <= a <= b, got [" + std::to_string(a) + ", " +
                     std::to_string(b) + "]");
  if (a == b) return T{};
  const bool atZero = a == 0.0;
  const bool atInfinity = std::isinf(b);
  T sum{};
  for (const auto& t : e.terms()) {
    if (atZero && !(t.exponent > Rational(-1)))
      throw DivergenceError("integral diverges at r = 0 for term " +
                            PowerLogExpr<T>({t}).toString());
    if (atInfinity && !(t.exponent < Rational(-1)))
      throw DivergenceError("integral diverges at r = infinity for term " +
                            PowerLogExpr<T>({t}).toString());
    const auto anti = antiderivative(PowerLogExpr<T>({t}));
    const T upper = atInfinity ? T{} : anti(b);
    const T lower = atZero ? T{} : anti(a);
    sum += upper - lower;
  }
  return sum;
}

/// Largest coefficient difference between two expressions, relative to
/// max(1, largest coefficient of either side).
template <class T>
double coefficientDefect(const PowerLogExpr<T>& a, const PowerLogExpr<T>& b) {
  const double scale = std::max({1.0, a.maxAbsCoefficient(), b.maxAbsCoefficient()});
  double worst = 0.0;
  for (const auto& t : a.terms())
    worst = std::max(worst, std::abs(t.coeff - b.coefficient(t.exponent, t.logPower)));
  for (const auto& t : b.terms())
    worst = std::max(worst, std::abs(t.coeff - a.coefficient(t.exponent, t.logPower)));
  return worst / scale;
}

}  // namespace polyspline
