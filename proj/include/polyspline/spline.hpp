#pragma once

// Interpolatory Beppo Levi L_k-splines, k != 0.
//
// A spline on knots r_1 < ... < r_n is stored piecewise: a head piece on
// (0, r_1) in Ker G_k, one piece per (r_j, r_{j+1}) in Ker L_k and a tail
// piece on (r_n, inf) in Ker R_k.  Every piece keeps its own reference radius
// s and is the expression e(x) evaluated at x = r / s, which keeps the
// coefficients O(1) regardless of |k| and the magnitude of the radii.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "polyspline/errors.hpp"
#include "polyspline/jet.hpp"
#include "polyspline/knots.hpp"
#include "polyspline/linalg.hpp"
#include "polyspline/powerlog.hpp"

namespace polyspline {

/// x -> e(x) used as r -> e(r / scale).
template <class T>
class Piece {
 public:
  Piece() : Piece(1.0, PowerLogExpr<T>{}) {}
  Piece(double scale, PowerLogExpr<T> expr) : scale_(scale) {
    if (!(scale > 0.0)) throw InputError("piece scale must be positive");
    derivs_[0] = std::move(expr);
    derivs_[1] = differentiate(derivs_[0]);
    derivs_[2] = differentiate(derivs_[1]);
  }

  double scale() const { return scale_; }
  const PowerLogExpr<T>& expr() const { return derivs_[0]; }

  /// m-th derivative with respect to r, m in {0, 1, 2}.
  T operator()(double r, int m = 0) const {
    return derivs_[m](r / scale_) / std::pow(scale_, m);
  }
  Jet<T> jet(double r) const {
    const double x = r / scale_;
    return {derivs_[0](x), derivs_[1](x) / scale_, derivs_[2](x) / (scale_ * scale_)};
  }

  friend bool operator==(const Piece& a, const Piece& b) {
    return a.scale_ == b.scale_ && a.derivs_[0] == b.derivs_[0];
  }

 private:
  double scale_;
  std::array<PowerLogExpr<T>, 3> derivs_;
};

template <class T>
class BeppoLeviSpline {
 public:
  BeppoLeviSpline(int k, KnotSet knots, Piece<T> head, std::vector<Piece<T>> interior, Piece<T> tail,
                  std::vector<T> values, double systemResidual = 0.0)
      : k_(k),
        knots_(std::move(knots)),
        head_(std::move(head)),
        interior_(std::move(interior)),
        tail_(std::move(tail)),
        values_(std::move(values)),
        residual_(systemResidual) {
    if (k_ == 0) throw UnsupportedFrequency("Beppo Levi L_k-splines require k != 0");
    if (interior_.size() + 1 != knots_.size())
      throw InputError("spline needs exactly n - 1 interior pieces");
    if (values_.size() != knots_.size()) throw InputError("spline needs one value per knot");
  }

  int k() const { return k_; }
  int absK() const { return k_ < 0 ? -k_ : k_; }
  const KnotSet& knots() const { return knots_; }
  const Piece<T>& head() const { return head_; }
  const std::vector<Piece<T>>& interior() const { return interior_; }
  const Piece<T>& tail() const { return tail_; }
  const std::vector<T>& values() const { return values_; }
  double systemResidual() const { return residual_; }

  /// Pieces in order: head, interior..., tail.
  std::size_t pieceCount() const { return interior_.size() + 2; }
  const Piece<T>& piece(std::size_t i) const {
    if (i == 0) return head_;
    if (i == pieceCount() - 1) return tail_;
    return interior_[i - 1];
  }

  /// Index of the piece that owns r; interior pieces own the closed knot interval.
  std::size_t pieceIndex(double r) const {
    if (r < knots_.front() || (knots_.size() == 1 && r == knots_.front())) return 0;
    if (r > knots_.back()) return pieceCount() - 1;
    const auto radii = knots_.radii();
    const auto it = std::upper_bound(radii.begin(), radii.end(), r);
    const auto j = std::min<std::size_t>(static_cast<std::size_t>(it - radii.begin()) - 1, interior_.size() - 1);
    return j + 1;
  }

  /// Breakpoints 0, r_1, ..., r_n, +inf delimiting the pieces.
  std::vector<double> breakpoints() const {
    std::vector<double> b{0.0};
    b.insert(b.end(), knots_.radii().begin(), knots_.radii().end());
    b.push_back(std::numeric_limits<double>::infinity());
    return b;
  }

  T operator()(double r, int m = 0) const { return piece(pieceIndex(r))(r, m); }
  Jet<T> jet(double r) const { return piece(pieceIndex(r)).jet(r); }

  friend bool operator==(const BeppoLeviSpline&, const BeppoLeviSpline&) = default;

 private:
  int k_;
  KnotSet knots_;
  Piece<T> head_;
  std::vector<Piece<T>> interior_;
  Piece<T> tail_;
  std::vector<T> values_;
  double residual_;
};

/// m-th derivative (m <= 2) of the spline at r >= 0.
template <class T>
T evaluate(const BeppoLeviSpline<T>& s, double r, int m = 0) {
  if (m < 0 || m > 2) throw InputError("derivative order must be 0, 1 or 2");
  if (!(r >= 0.0)) throw InputError("spline evaluation requires r >= 0");
  return s(r, m);
}

/// The single-knot spline with phi_k(1) = 1:
///   phi_k(r) = r^|k| [(1+|k|) + (1-|k|) r^2] / 2        for 0 <= r <= 1,
///   phi_k(r) = r^-|k| [(1-|k|) + (1+|k|) r^2] / 2       for r > 1.
inline double phiK(int k, double r) {
  const double a = static_cast<double>(detail::checkedFrequency(k));
  if (r <= 1.0) return 0.5 * std::pow(r, a) * ((1.0 + a) + (1.0 - a) * r * r);
  return 0.5 * std::pow(r, -a) * ((1.0 - a) + (1.0 + a) * r * r);
}

namespace detail {

/// Head branch of phi_k in x:  ((1+a) x^a + (1-a) x^{a+2}) / 2.
inline RealExpr phiHead(std::int64_t a) {
  return rpow(Rational(a)) * (0.5 * (1.0 + a)) + rpow(Rational(a + 2)) * (0.5 * (1.0 - a));
}
/// Tail branch of phi_k in x:  ((1-a) x^-a + (1+a) x^{2-a}) / 2.
inline RealExpr phiTail(std::int64_t a) {
  return rpow(Rational(-a)) * (0.5 * (1.0 - a)) + rpow(Rational(2 - a)) * (0.5 * (1.0 + a));
}

/// Local basis of Ker L_k in x = r / r_j.
inline std::array<RealExpr, 4> kernelBasis(std::int64_t a) {
  if (a == 1) return {rpow(Rational(3)), rpow(Rational(1)), rpow(Rational(1), 1), rpow(Rational(-1))};
  return {rpow(Rational(a + 2)), rpow(Rational(a)), rpow(Rational(2 - a)), rpow(Rational(-a))};
}

template <class T>
constexpr int scalarColumns() {
  return is_complex_v<T> ? 2 : 1;
}

template <class T>
T assembleScalar(const Eigen::MatrixXd& x, Eigen::Index row) {
  if constexpr (is_complex_v<T>) {
    return T(x(row, 0), x(row, 1));
  } else {
    return x(row, 0);
  }
}

template <class T>
void storeScalar(Eigen::MatrixXd& b, Eigen::Index row, const T& v) {
  if constexpr (is_complex_v<T>) {
    b(row, 0) = v.real();
    b(row, 1) = v.imag();
  } else {
    b(row, 0) = v;
  }
}

/// Head on (0, r_1) in Ker G_k matching value v and r-scaled slope d = r_1 s'(r_1).
template <class T>
Piece<T> headFromC1(std::int64_t a, double r1, T v, T d) {
  const T p = (d - static_cast<double>(a) * v) * 0.5;
  const T q = v - p;
  return Piece<T>(r1, PowerLogExpr<T>({{p, Rational(a + 2), 0}, {q, Rational(a), 0}}));
}

/// Tail on (r_n, inf) in Ker R_k matching value v and r-scaled slope d = r_n s'(r_n).
template <class T>
Piece<T> tailFromC1(std::int64_t a, double rn, T v, T d) {
  const T p = (d + static_cast<double>(a) * v) * 0.5;
  const T q = v - p;
  return Piece<T>(rn, PowerLogExpr<T>({{p, Rational(2 - a), 0}, {q, Rational(-a), 0}}));
}

}  // namespace detail

/// The unique Beppo Levi L_k-spline on `knots` taking `values` at the knots.
///
/// For n >= 2 the interior of [r_1, r_n] is found from the 4(n-1) square
/// system of interpolation rows, three C^2 rows per interior knot and the two
/// end rows (rD - |k|)(rD - |k| - 2) s = 0 at r_1+ and (rD + |k|)(rD + |k| - 2) s = 0
/// at r_n-; the head and tail then follow from C^1 matching.  Complex data are
/// solved as two real right-hand sides of the same factorization.
template <class T>
BeppoLeviSpline<T> buildInterpolant(int k, const KnotSet& knots, std::span<const T> values,
                                    double maxResidual = 1e-6) {
  const auto a = detail::checkedFrequency(k);
  const std::size_t n = knots.size();
  if (values.size() != n)
    throw InputError("expected " + std::to_string(n) + " values, got " + std::to_string(values.size()));
  std::vector<T> nu(values.begin(), values.end());

  if (n == 1) {
    const T v = nu[0];
    Piece<T> head(knots[0], detail::phiHead(a).template cast<T>() * v);
    Piece<T> tail(knots[0], detail::phiTail(a).template cast<T>() * v);
    return BeppoLeviSpline<T>(k, knots, std::move(head), {}, std::move(tail), std::move(nu));
  }

  const auto basis = detail::kernelBasis(a);
  std::array<std::array<RealExpr, 3>, 4> d;
  std::array<RealExpr, 4> endHead, endTail;
  for (int i = 0; i < 4; ++i) {
    d[i][0] = basis[i];
    d[i][1] = differentiate(basis[i]);
    d[i][2] = differentiate(d[i][1]);
    endHead[i] = applyEulerProduct(basis[i], {Rational(-a), Rational(-a - 2)}, Rational(0));
    endTail[i] = applyEulerProduct(basis[i], {Rational(a), Rational(a - 2)}, Rational(0));
  }

  const std::size_t segments = n - 1;
  const auto size = static_cast<Eigen::Index>(4 * segments);
  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(size, size);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(size, detail::scalarColumns<T>());
  auto col = [](std::size_t seg, int i) { return static_cast<Eigen::Index>(4 * seg + i); };
  Eigen::Index row = 0;

  for (std::size_t j = 0; j < segments; ++j, ++row) {
    for (int i = 0; i < 4; ++i) mat(row, col(j, i)) = d[i][0](1.0);
    detail::storeScalar(rhs, row, nu[j]);
  }
  const double lastRatio = knots[n - 1] / knots[n - 2];
  for (int i = 0; i < 4; ++i) mat(row, col(segments - 1, i)) = d[i][0](lastRatio);
  detail::storeScalar(rhs, row, nu[n - 1]);
  ++row;

  // C^2 at interior knots, in the dimensionless form r^m d^m/dr^m.
  for (std::size_t q = 1; q + 1 < n; ++q) {
    const double ratio = knots[q] / knots[q - 1];
    for (int m = 0; m < 3; ++m, ++row) {
      for (int i = 0; i < 4; ++i) {
        mat(row, col(q - 1, i)) = std::pow(ratio, m) * d[i][m](ratio);
        mat(row, col(q, i)) = -d[i][m](1.0);
      }
    }
  }

  for (int i = 0; i < 4; ++i) mat(row, col(0, i)) = endHead[i](1.0);
  ++row;
  for (int i = 0; i < 4; ++i) mat(row, col(segments - 1, i)) = endTail[i](lastRatio);
  ++row;

  const auto sol = solveDense(mat, rhs, maxResidual);

  std::vector<Piece<T>> interior;
  interior.reserve(segments);
  for (std::size_t j = 0; j < segments; ++j) {
    PowerLogExpr<T> e;
    for (int i = 0; i < 4; ++i) e += basis[i].template cast<T>() * detail::assembleScalar<T>(sol.x, col(j, i));
    interior.emplace_back(knots[j], std::move(e));
  }

  const auto& first = interior.front().expr();
  const auto head = detail::headFromC1<T>(a, knots[0], first(1.0), differentiate(first)(1.0));
  const auto& last = interior.back().expr();
  const auto tail =
      detail::tailFromC1<T>(a, knots[n - 1], last(lastRatio), lastRatio * differentiate(last)(lastRatio));

  return BeppoLeviSpline<T>(k, knots, head, std::move(interior), tail, std::move(nu), sol.relativeResidual);
}

template <class T>
BeppoLeviSpline<T> buildInterpolant(int k, const KnotSet& knots, const std::vector<T>& values,
                                    double maxResidual = 1e-6) {
  return buildInterpolant<T>(k, knots, std::span<const T>(values), maxResidual);
}

/// The function r -> sum_j c_j phi_k(r / r_j) written as a piecewise spline.
template <class T>
BeppoLeviSpline<T> dilationSum(int k, const KnotSet& knots, std::span<const T> coefficients) {
  const auto a = detail::checkedFrequency(k);
  const std::size_t n = knots.size();
  if (coefficients.size() != n) throw InputError("one coefficient per knot required");
  const auto headBranch = detail::phiHead(a);
  const auto tailBranch = detail::phiTail(a);

  // Branch in x = r / s for the dilate centred at r_j, with rho = s / r_j.
  auto dilate = [&](const RealExpr& branch, double rho, T c) {
    std::vector<PowerLogTerm<T>> terms;
    for (const auto& t : branch.terms())
      terms.push_back({c * (t.coeff * std::pow(rho, t.exponent.toDouble())), t.exponent, 0});
    return PowerLogExpr<T>(std::move(terms));
  };
  auto pieceAt = [&](double s, std::size_t tailCount) {
    PowerLogExpr<T> e;
    for (std::size_t j = 0; j < n; ++j)
      e += dilate(j < tailCount ? tailBranch : headBranch, s / knots[j], coefficients[j]);
    return Piece<T>(s, std::move(e));
  };

  Piece<T> head = pieceAt(knots[0], 0);
  std::vector<Piece<T>> interior;
  for (std::size_t i = 0; i + 1 < n; ++i) interior.push_back(pieceAt(knots[i], i + 1));
  Piece<T> tail = pieceAt(knots[n - 1], n);

  std::vector<T> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    T v{};
    for (std::size_t j = 0; j < n; ++j) v += coefficients[j] * phiK(k, knots[i] / knots[j]);
    values[i] = v;
  }
  return BeppoLeviSpline<T>(k, knots, std::move(head), std::move(interior), std::move(tail), std::move(values));
}

template <class T>
struct CollocationResult {
  std::vector<T> coefficients;
  BeppoLeviSpline<T> spline;
  /// Relative residual of the collocation system after refinement.
  double residual = 0.0;
};

/// Interpolant as a combination of dilates sum_j a_j phi_k(r / r_j), |k| >= 2.
///
/// With t = ln r, phi_k(r_i / r_j) = (r_i / r_j) psi_k(t_i - t_j), so the
/// collocation system is solved through the symmetric positive definite
/// matrix [psi_k(t_i - t_j)] by Cholesky, for b_j = a_j / r_j.
template <class T>
CollocationResult<T> buildByCollocation(int k, const KnotSet& knots, std::span<const T> values,
                                        double maxResidual = 1e-6) {
  const auto a = detail::checkedFrequency(k);
  if (a < 2) throw UnsupportedFrequency("the dilation representation does not exist for |k| = 1");
  const std::size_t n = knots.size();
  if (values.size() != n)
    throw InputError("expected " + std::to_string(n) + " values, got " + std::to_string(values.size()));

  const auto size = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd gram(size, size);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double t = std::log(knots[i]) - std::log(knots[j]);
      const double at = static_cast<double>(a) * std::abs(t);
      gram(i, j) = 0.5 * std::exp(-at) *
                   ((1.0 - a) * std::exp(-std::abs(t)) + (1.0 + a) * std::exp(std::abs(t)));
    }
  Eigen::MatrixXd rhs(size, detail::scalarColumns<T>());
  for (std::size_t i = 0; i < n; ++i) detail::storeScalar(rhs, i, T(values[i] / knots[i]));

  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success)
    throw ConstructionError("collocation matrix is not numerically positive definite", 1.0);
  Eigen::MatrixXd b = llt.solve(rhs);
  b += llt.solve(rhs - gram * b);
  const double residual = detail::relativeResidual(gram, b, rhs);
  if (!b.allFinite() || !(residual <= maxResidual))
    throw ConstructionError("collocation system residual " + std::to_string(residual), residual);

  std::vector<T> coeffs(n);
  for (std::size_t j = 0; j < n; ++j) coeffs[j] = detail::assembleScalar<T>(b, j) * knots[j];
  auto spline = dilationSum<T>(k, knots, coeffs);
  return {std::move(coeffs), std::move(spline), residual};
}

template <class T>
CollocationResult<T> buildByCollocation(int k, const KnotSet& knots, const std::vector<T>& values,
                                        double maxResidual = 1e-6) {
  return buildByCollocation<T>(k, knots, std::span<const T>(values), maxResidual);
}

/// Coefficient norms of G_k applied to the head and R_k applied to the tail.
template <class T>
std::pair<double, double> endConditionResiduals(const BeppoLeviSpline<T>& s) {
  return {applyGk(s.k(), s.head().expr()).maxAbsCoefficient(),
          applyRk(s.k(), s.tail().expr()).maxAbsCoefficient()};
}

/// Largest coefficient norm of L_k applied to an interior piece (0 if none).
template <class T>
double interiorKernelResidual(const BeppoLeviSpline<T>& s) {
  double worst = 0.0;
  for (const auto& p : s.interior()) worst = std::max(worst, applyLk(s.k(), p.expr()).maxAbsCoefficient());
  return worst;
}

/// Largest jump of r^m d^m s/dr^m, m = 0, 1, 2, across the knots, relative to
/// the largest such one-sided quantity (or 1 if everything vanishes).
template <class T>
double continuityDefect(const BeppoLeviSpline<T>& s) {
  double jump = 0.0, scale = 0.0;
  const auto& knots = s.knots();
  for (std::size_t j = 0; j < knots.size(); ++j) {
    const double r = knots[j];
    const auto& left = s.piece(j);
    const auto& right = s.piece(j + 1);
    for (int m = 0; m < 3; ++m) {
      const T l = left(r, m) * std::pow(r, m);
      const T rr = right(r, m) * std::pow(r, m);
      jump = std::max(jump, std::abs(l - rr));
      scale = std::max({scale, std::abs(l), std::abs(rr)});
    }
  }
  return scale > 0.0 ? jump / scale : jump;
}

/// Largest |s(r_j) - value_j| relative to max |value_j|.
template <class T>
double interpolationDefect(const BeppoLeviSpline<T>& s) {
  double worst = 0.0, scale = 0.0;
  for (std::size_t j = 0; j < s.knots().size(); ++j) {
    worst = std::max(worst, std::abs(s(s.knots()[j]) - s.values()[j]));
    scale = std::max(scale, std::abs(s.values()[j]));
  }
  return scale > 0.0 ? worst / scale : worst;
}

}  // namespace polyspline
