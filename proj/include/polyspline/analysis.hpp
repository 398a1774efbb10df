#pragma once

// Energy seminorm, variational checks and convergence harness for
// Beppo Levi L_k-splines.
//
// The k-th energy of psi is
//   ||psi||_k^2 = int_0^inf { |psi''|^2 + 2k^2 |psi/r^2 - psi'/r|^2
//                             + |k^2 psi/r^2 - psi'/r|^2 } r dr .

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "polyspline/errors.hpp"
#include "polyspline/jet.hpp"
#include "polyspline/knots.hpp"
#include "polyspline/parallel.hpp"
#include "polyspline/powerlog.hpp"
#include "polyspline/quadrature.hpp"
#include "polyspline/spline.hpp"

namespace polyspline {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct EnergyValue {
  /// The squared energy ||f||_k^2.
  double value = 0.0;
  int k = 0;
  /// |k| = 1: the energy only vanishes modulo multiples of r.
  bool isSeminorm = false;

  double norm() const { return std::sqrt(std::max(value, 0.0)); }
};

struct QuadratureOptions {
  int order = 32;
  int panels = 1;
};

namespace detail {
inline EnergyValue makeEnergy(int k, double value) {
  return {value, k, k == 1 || k == -1};
}
}  // namespace detail

/// Energy integrand (including the weight r) at r from the 2-jet of f.
template <class T>
double energyDensity(int k, double r, const Jet<T>& f) {
  const double k2 = static_cast<double>(k) * k;
  const T a = f.value / (r * r) - f.d1 / r;
  const T b = k2 * f.value / (r * r) - f.d1 / r;
  return (std::norm(f.d2) + 2.0 * k2 * std::norm(a) + std::norm(b)) * r;
}

/// Symbolic energy integrand r { |e''|^2 + 2k^2 |e/r^2 - e'/r|^2 + |k^2 e/r^2 - e'/r|^2 }.
template <class T>
RealExpr energyIntegrand(int k, const PowerLogExpr<T>& e) {
  const double k2 = static_cast<double>(k) * k;
  const auto d1 = differentiate(e);
  const auto d2 = differentiate(d1);
  const auto a = multiplyPower(e, Rational(-2)) - multiplyPower(d1, Rational(-1));
  const auto b = multiplyPower(e, Rational(-2)) * T(k2) - multiplyPower(d1, Rational(-1));
  const auto sum = d2 * d2.conj() + (a * a.conj()) * T(2.0 * k2) + b * b.conj();
  const auto weighted = multiplyPower(sum, Rational(1));
  std::vector<PowerLogTerm<double>> real;
  for (const auto& t : weighted.terms())
    real.push_back({realPart(t.coeff), t.exponent, t.logPower});
  return RealExpr(std::move(real));
}

/// Closed-form energy of r -> e(r / scale) over [a, b], b possibly infinite.
/// The energy density is homogeneous of degree -4 in r, so the integral equals
/// scale^-2 times the energy of e over [a / scale, b / scale].
template <class T>
double pieceEnergy(int k, const PowerLogExpr<T>& e, double scale, double a, double b) {
  const auto integrand = energyIntegrand(k, e);
  const double upper = std::isinf(b) ? b : b / scale;
  return integrateExact(integrand, a / scale, upper) / (scale * scale);
}

/// Closed-form energy of a spline: exact integration of every piece,
/// including the improper head and tail pieces.
template <class T>
EnergyValue energy(const BeppoLeviSpline<T>& s) {
  const auto bp = s.breakpoints();
  double total = 0.0;
  for (std::size_t i = 0; i < s.pieceCount(); ++i) {
    const auto& p = s.piece(i);
    total += pieceEnergy(s.k(), p.expr(), p.scale(), bp[i], bp[i + 1]);
  }
  return detail::makeEnergy(s.k(), total);
}

/// Closed-form energy of a single expression over (0, inf).
template <class T>
EnergyValue energy(int k, const PowerLogExpr<T>& e) {
  detail::checkedFrequency(k);
  return detail::makeEnergy(k, pieceEnergy(k, e, 1.0, 0.0, kInfinity));
}

namespace detail {

/// Contribution of the dyadic shell [lo, 2 lo].
template <class T>
double shellEnergy(int k, const JetFunction<T>& f, double lo, int order) {
  return gaussLegendre(order).integrate([&](double r) { return energyDensity(k, r, f(r)); }, lo, 2.0 * lo);
}

/// Heuristic divergence test at an improper end: the energy in dyadic shells
/// approaching the end point must decay, unless it is negligible next to
/// `total`.  Necessary, not sufficient, for convergence.
template <class T>
void requireDecayingShells(int k, const JetFunction<T>& f, double anchor, bool atZero, double total,
                           int order) {
  const double nearShell = atZero ? anchor * std::ldexp(1.0, -12) : anchor * std::ldexp(1.0, 12);
  const double farShell = atZero ? anchor * std::ldexp(1.0, -24) : anchor * std::ldexp(1.0, 24);
  const double cNear = shellEnergy(k, f, nearShell, order);
  const double cFar = shellEnergy(k, f, farShell, order);
  const bool negligible = cFar <= 1e-12 * std::abs(total);
  if (!std::isfinite(cNear) || !std::isfinite(cFar) || (!negligible && !(cFar < 0.9 * cNear)))
    throw DivergenceError(std::string("energy integral does not converge at r = ") +
                          (atZero ? "0" : "infinity") + " (shell energies " + std::to_string(cNear) + " -> " +
                          std::to_string(cFar) + ")");
}

}  // namespace detail

/// Energy of a function given through its 2-jet, by composite Gauss-Legendre
/// quadrature over consecutive breakpoints.  A final breakpoint of +inf is
/// handled through r = a / u.  Improper ends are screened for divergence.
template <class T>
EnergyValue energyQuadrature(int k, const JetFunction<T>& f, std::span<const double> breakpoints,
                             QuadratureOptions opt = {}) {
  detail::checkedFrequency(k);
  if (breakpoints.size() < 2) throw InputError("energy quadrature needs at least two breakpoints");
  const auto& rule = gaussLegendre(opt.order);
  auto density = [&](double r) { return energyDensity(k, r, f(r)); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i], b = breakpoints[i + 1];
    if (std::isinf(b) && !(a > 0.0 && std::isfinite(a)))
      throw InputError("an infinite quadrature segment needs a finite positive left end");
    total += std::isinf(b) ? rule.integrateToInfinity(density, a, opt.panels)
                           : rule.integrate(density, a, b, opt.panels);
  }
  if (!std::isfinite(total)) throw DivergenceError("energy quadrature produced a non-finite value");
  const std::size_t last = breakpoints.size() - 1;
  if (breakpoints.front() == 0.0)
    detail::requireDecayingShells(k, f, std::isfinite(breakpoints[1]) ? breakpoints[1] : 1.0, true, total,
                                  opt.order);
  if (std::isinf(breakpoints[last]))
    detail::requireDecayingShells(k, f, breakpoints[last - 1], false, total, opt.order);
  return detail::makeEnergy(k, total);
}

// ---------------------------------------------------------------------------
// Orthogonality

/// R_k f from the 2-jet of f.
template <class T>
T applyRkPointwise(int k, double r, const Jet<T>& f) {
  const double a = static_cast<double>(detail::checkedFrequency(k));
  return (f.d2 + (2.0 * a - 1.0) * f.d1 / r + a * (a - 2.0) * f.value / (r * r)) / r;
}

template <class T>
struct OrthogonalityResult {
  /// I_k = int_0^{r_n} r^3 (R_k eta) conj(R_k psi) dr.
  T defect{};
  /// ||r^{3/2} R_k eta|| and ||r^{3/2} R_k psi|| in L^2(0, r_n).
  double etaScale = 0.0;
  double psiScale = 0.0;
  /// |I_k| / (etaScale psiScale), 0 when either scale vanishes.
  double normalized = 0.0;
};

/// Composite Gauss-Legendre evaluation of I_k over the pieces (0, r_1),
/// (r_1, r_2), ..., (r_{n-1}, r_n); R_k eta vanishes beyond r_n.
/// Throws PreconditionError when psi does not vanish at a knot (within
/// knotTolerance times max(1, sup |psi| at the quadrature nodes)) unless the
/// check is disabled.
template <class T>
OrthogonalityResult<T> orthogonalityDefect(const BeppoLeviSpline<T>& eta, const JetFunction<T>& psi,
                                           QuadratureOptions opt = {.order = 32, .panels = 16},
                                           bool requireVanishing = true, double knotTolerance = 1e-10) {
  const int k = eta.k();
  const auto& rule = gaussLegendre(opt.order);
  const auto bp = eta.breakpoints();
  T cross{};
  double etaSq = 0.0, psiSq = 0.0, psiMax = 0.0;
  for (std::size_t i = 0; i + 2 < bp.size(); ++i) {
    const auto& piece = eta.piece(i);
    cross += rule.integrate(
        [&](double r) {
          const Jet<T> p = psi(r);
          psiMax = std::max(psiMax, std::abs(p.value));
          const T re = applyRkPointwise(k, r, piece.jet(r));
          const T rp = applyRkPointwise(k, r, p);
          return r * r * r * re * conjugate(rp);
        },
        bp[i], bp[i + 1], opt.panels);
    etaSq += rule.integrate(
        [&](double r) { return r * r * r * std::norm(applyRkPointwise(k, r, piece.jet(r))); }, bp[i], bp[i + 1],
        opt.panels);
    psiSq += rule.integrate([&](double r) { return r * r * r * std::norm(applyRkPointwise(k, r, psi(r))); },
                            bp[i], bp[i + 1], opt.panels);
  }
  if (requireVanishing) {
    const double tol = knotTolerance * std::max(1.0, psiMax);
    for (std::size_t j = 0; j < eta.knots().size(); ++j) {
      const double v = std::abs(psi(eta.knots()[j]).value);
      if (v > tol)
        throw PreconditionError("test function does not vanish at knot " + std::to_string(j) + " (|psi| = " +
                                std::to_string(v) + ")");
    }
  }
  OrthogonalityResult<T> out;
  out.defect = cross;
  out.etaScale = std::sqrt(etaSq);
  out.psiScale = std::sqrt(psiSq);
  const double denom = out.etaScale * out.psiScale;
  out.normalized = denom > 0.0 ? std::abs(cross) / denom : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Optimality

/// An admissible competitor g for the interpolation problem solved by a spline.
template <class T>
struct Competitor {
  JetFunction<T> function;
  /// g coincides with the spline on [tailStart, inf); +inf when unknown.
  double tailStart = kInfinity;
  /// Points where g is less smooth (e.g. ends of a compactly supported bump).
  std::vector<double> breakpoints;
};

struct PythagorasResult {
  double lhs = 0.0;  ///< ||g||_k^2
  double rhs = 0.0;  ///< ||sigma||_k^2 + ||g - sigma||_k^2
  double defect = 0.0;  ///< |lhs - rhs| / lhs
  double splineEnergy = 0.0;
  double differenceEnergy = 0.0;
  bool splineIsMinimal = false;  ///< ||sigma||_k <= ||g||_k
};

/// Checks ||g||^2 = ||sigma||^2 + ||g - sigma||^2 for a competitor g with the
/// same knot values.  ||sigma|| is computed in closed form; ||g|| and
/// ||g - sigma|| by quadrature, except that the part of g beyond tailStart is
/// integrated exactly as the spline tail.
template <class T>
PythagorasResult pythagorasCheck(const BeppoLeviSpline<T>& sigma, const Competitor<T>& g,
                                 QuadratureOptions opt = {.order = 32, .panels = 16},
                                 double knotTolerance = 1e-10) {
  const int k = sigma.k();
  const auto& knots = sigma.knots();
  double scale = 1.0;
  for (const auto& v : sigma.values()) scale = std::max(scale, std::abs(v));
  for (std::size_t j = 0; j < knots.size(); ++j) {
    const double diff = std::abs(g.function(knots[j]).value - sigma(knots[j]));
    if (diff > knotTolerance * scale)
      throw PreconditionError("competitor does not interpolate the spline values at knot " + std::to_string(j) +
                              " (difference " + std::to_string(diff) + ")");
  }

  std::vector<double> bp{0.0};
  for (double r : knots.radii()) bp.push_back(r);
  for (double r : g.breakpoints)
    if (r > 0.0 && std::isfinite(r)) bp.push_back(r);
  const bool exactTail = std::isfinite(g.tailStart);
  if (exactTail) bp.push_back(std::max(g.tailStart, knots.back()));
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  if (exactTail) {
    while (bp.back() > std::max(g.tailStart, knots.back())) bp.pop_back();
  } else {
    bp.push_back(kInfinity);
  }

  const JetFunction<T> diff = [&](double r) { return g.function(r) - sigma.jet(r); };
  double lhs = energyQuadrature(k, g.function, bp, opt).value;
  if (exactTail) lhs += pieceEnergy(k, sigma.tail().expr(), sigma.tail().scale(), bp.back(), kInfinity);
  const double diffEnergy = energyQuadrature(k, diff, bp, opt).value;
  const double splineEnergy = energy(sigma).value;

  PythagorasResult out;
  out.lhs = lhs;
  out.splineEnergy = splineEnergy;
  out.differenceEnergy = diffEnergy;
  out.rhs = splineEnergy + diffEnergy;
  out.defect = lhs > 0.0 ? std::abs(lhs - out.rhs) / lhs : std::abs(lhs - out.rhs);
  out.splineIsMinimal = splineEnergy <= lhs;
  return out;
}

// ---------------------------------------------------------------------------
// Log-coordinate kernel

namespace detail {
inline double checkedKernelFrequency(int k) {
  const auto a = checkedFrequency(k);
  if (a < 2) throw UnsupportedFrequency("psi_k is only defined for |k| >= 2");
  return static_cast<double>(a);
}
}  // namespace detail

/// psi_k(t) = e^{-t} phi_k(e^t) = e^{-|k||t|} [(1-|k|) e^{-|t|} + (1+|k|) e^{|t|}] / 2.
inline double psiKernel(int k, double t) {
  const double a = detail::checkedKernelFrequency(k);
  const double s = std::abs(t);
  return 0.5 * std::exp(-a * s) * ((1.0 - a) * std::exp(-s) + (1.0 + a) * std::exp(s));
}

/// Fourier transform of psi_k:  4|k|(k^2-1) / ([(|k|-1)^2 + tau^2] [(|k|+1)^2 + tau^2]).
inline double psiKernelFT(int k, double tau) {
  const double a = detail::checkedKernelFrequency(k);
  const double t2 = tau * tau;
  return 4.0 * a * (a * a - 1.0) / (((a - 1.0) * (a - 1.0) + t2) * ((a + 1.0) * (a + 1.0) + t2));
}

// ---------------------------------------------------------------------------
// Convergence harness

struct ErrorReport {
  int k = 0;
  std::size_t n = 0;
  double h = 0.0;
  double r1 = 0.0;
  double rn = 0.0;
  /// Index m = 0, 1: error of g - sigma and of g' - sigma' on [r_1, r_n].
  std::array<double, 2> errLinf{};
  std::array<double, 2> errL2{};
  std::array<double, 2> boundLinf{};
  std::array<double, 2> boundL2{};
  /// ||g||_k.
  double energy = 0.0;

  bool withinBounds() const {
    for (int m = 0; m < 2; ++m)
      if (!(errLinf[m] <= boundLinf[m]) || !(errL2[m] <= boundL2[m])) return false;
    return true;
  }
};

struct ErrorStudyOptions {
  int quadOrder = 32;
  /// Uniform sample points per knot interval for the sup-norm errors.
  int gridPerSegment = 64;
  /// Breakpoints for the quadrature of ||g||_k; the last may be +inf.
  std::vector<double> energyBreakpoints{0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, kInfinity};
  int energyPanels = 4;
};

struct ErrorStudyResult {
  std::vector<ErrorReport> reports;
  /// Least-squares slopes of log(error) against log(h), coarsest level
  /// dropped when at least three levels are present; NaN when undefined.
  std::array<double, 2> slopeL2{};
  std::array<double, 2> slopeLinf{};
};

/// Least-squares slope of log y against log x over entries with y > 0.
inline double logLogSlope(std::span<const double> x, std::span<const double> y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0) || !(x[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    ++count;
  }
  if (count < 2) return std::numeric_limits<double>::quiet_NaN();
  const double den = count * sxx - sx * sx;
  return den == 0.0 ? std::numeric_limits<double>::quiet_NaN() : (count * sxy - sx * sy) / den;
}

/// Interpolates g at each knot set of the family and measures the errors
/// against the right-hand sides h^{3/2-m} ||g||_k / (2^{1-m} sqrt(r_1)) (sup
/// norm) and h^{2-m} ||g||_k / (2^{1-m} sqrt(r_1)) (L^2 norm) on [r_1, r_n].
inline ErrorStudyResult errorStudy(int k, const JetFunction<double>& g, const std::vector<KnotSet>& family,
                                   const ErrorStudyOptions& opt = {}) {
  detail::checkedFrequency(k);
  const double gNorm =
      energyQuadrature(k, g, opt.energyBreakpoints, {.order = opt.quadOrder, .panels = opt.energyPanels}).norm();

  ErrorStudyResult out;
  out.reports.resize(family.size());
  parallelFor(family.size(), [&](std::size_t level) {
    const auto& knots = family[level];
    if (knots.size() < 2) throw InputError("error study needs at least two knots per level");
    std::vector<double> values(knots.size());
    for (std::size_t j = 0; j < knots.size(); ++j) values[j] = g(knots[j]).value;
    const auto sigma = buildInterpolant<double>(k, knots, values);

    ErrorReport rep;
    rep.k = k;
    rep.n = knots.size();
    rep.h = knots.meshSize();
    rep.r1 = knots.front();
    rep.rn = knots.back();
    rep.energy = gNorm;
    const auto& rule = gaussLegendre(opt.quadOrder);
    std::array<double, 2> l2sq{};
    for (std::size_t j = 0; j + 1 < knots.size(); ++j) {
      const double a = knots[j], b = knots[j + 1];
      for (int i = 0; i <= opt.gridPerSegment; ++i) {
        const double r = a + (b - a) * i / opt.gridPerSegment;
        const auto gj = g(r);
        const auto sj = sigma.jet(r);
        for (int m = 0; m < 2; ++m) rep.errLinf[m] = std::max(rep.errLinf[m], std::abs(gj[m] - sj[m]));
      }
      for (int m = 0; m < 2; ++m)
        l2sq[m] += rule.integrate(
            [&](double r) {
              const double e = g(r)[m] - sigma.jet(r)[m];
              return e * e;
            },
            a, b);
    }
    for (int m = 0; m < 2; ++m) {
      rep.errL2[m] = std::sqrt(l2sq[m]);
      const double factor = 1.0 / (std::pow(2.0, 1 - m) * std::sqrt(rep.r1));
      rep.boundLinf[m] = factor * std::pow(rep.h, 1.5 - m) * gNorm;
      rep.boundL2[m] = factor * std::pow(rep.h, 2.0 - m) * gNorm;
    }
    out.reports[level] = rep;
  });

  const std::size_t skip = out.reports.size() >= 3 ? 1 : 0;
  std::vector<double> hs;
  std::array<std::vector<double>, 2> l2, linf;
  for (std::size_t i = skip; i < out.reports.size(); ++i) {
    hs.push_back(out.reports[i].h);
    for (int m = 0; m < 2; ++m) {
      l2[m].push_back(out.reports[i].errL2[m]);
      linf[m].push_back(out.reports[i].errLinf[m]);
    }
  }
  for (int m = 0; m < 2; ++m) {
    out.slopeL2[m] = logLogSlope(hs, l2[m]);
    out.slopeLinf[m] = logLogSlope(hs, linf[m]);
  }
  return out;
}

}  // namespace polyspline
