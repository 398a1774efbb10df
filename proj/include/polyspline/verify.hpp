#pragma once

// Verification suite: operator identities, structural checks of a spline and
// the variational identities (orthogonality, Pythagoras) on random test
// functions.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "polyspline/analysis.hpp"
#include "polyspline/instances.hpp"
#include "polyspline/powerlog.hpp"
#include "polyspline/spline.hpp"

namespace polyspline {

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool skipped = false;
  std::string note;
};

struct VerifyTolerances {
  /// Orthogonality and Pythagoras defects.
  double variational = 1e-6;
  double continuity = 1e-8;
  double interpolation = 1e-10;
  double representation = 1e-8;
  double factorization = 1e-12;
};

inline Check makeCheck(std::string name, double value, double tolerance) {
  return {std::move(name), value, tolerance, std::isfinite(value) && value <= tolerance, false, {}};
}

/// Generators of Ker L_k, Ker G_k and Ker R_k in the variable r.
inline std::array<RealExpr, 4> kernelGenerators(int k) { return detail::kernelBasis(detail::checkedFrequency(k)); }

/// Largest coefficient of L_k, G_k, R_k applied to their kernel generators;
/// exactly zero when the identities hold.
inline double annihilationDefect(int k) {
  const auto a = detail::checkedFrequency(k);
  double worst = 0.0;
  for (const auto& g : kernelGenerators(k)) worst = std::max(worst, applyLk(k, g).maxAbsCoefficient());
  for (const auto& e : {rpow(Rational(a + 2)), rpow(Rational(a))})
    worst = std::max(worst, applyGk(k, e).maxAbsCoefficient());
  for (const auto& e : {rpow(Rational(2 - a)), rpow(Rational(-a))})
    worst = std::max(worst, applyRk(k, e).maxAbsCoefficient());
  return worst;
}

/// Largest coefficient defect of L_k = G_k r^3 R_k and L_k = M_k^* M_k on
/// the monomials r^-3, ..., r^5.
inline double factorizationDefect(int k) {
  double worst = 0.0;
  for (int j = -3; j <= 5; ++j) {
    const auto u = rpow(Rational(j));
    const auto lk = applyLk(k, u);
    worst = std::max(worst, coefficientDefect(applyGk(k, multiplyPower(applyRk(k, u), Rational(3))), lk));
    worst = std::max(worst, coefficientDefect(applyMkAdjoint(k, applyMk(k, u)), lk));
  }
  return worst;
}

/// Sup of |f - g| over `points` equispaced samples of [0, upper], relative to
/// max(sup |f|, tiny).
template <class F, class G>
double relativeSupDifference(const F& f, const G& g, double upper, int points = 2000) {
  double diff = 0.0, scale = 0.0;
  for (int i = 0; i <= points; ++i) {
    const double r = upper * i / points;
    diff = std::max(diff, std::abs(f(r) - g(r)));
    scale = std::max(scale, std::abs(f(r)));
  }
  return scale > 0.0 ? diff / scale : diff;
}

/// Checks of one real spline: the exact operator identities for its k,
/// end conditions, continuity, interpolation, the representation by dilates
/// (|k| >= 2), and orthogonality and Pythagoras against a random bump
/// vanishing at the knots.
inline std::vector<Check> verifySpline(const BeppoLeviSpline<double>& s, Rng& rng, const VerifyTolerances& tol = {},
                                       int quadOrder = 32) {
  std::vector<Check> out;
  const int k = s.k();
  out.push_back(makeCheck("annihilation", annihilationDefect(k), 0.0));
  out.push_back(makeCheck("factorization", factorizationDefect(k), tol.factorization));
  const auto [head, tail] = endConditionResiduals(s);
  out.push_back(makeCheck("end_condition_head", head, 0.0));
  out.push_back(makeCheck("end_condition_tail", tail, 0.0));
  out.push_back(makeCheck("interior_kernel", interiorKernelResidual(s), 0.0));
  out.push_back(makeCheck("continuity", continuityDefect(s), tol.continuity));
  out.push_back(makeCheck("interpolation", interpolationDefect(s), tol.interpolation));

  if (s.absK() >= 2) {
    const auto col = buildByCollocation<double>(k, s.knots(), s.values());
    out.push_back(makeCheck(
        "representation",
        relativeSupDifference([&](double r) { return s(r); }, [&](double r) { return col.spline(r); },
                              2.0 * s.knots().back()),
        tol.representation));
  } else {
    Check c{"representation", 0.0, tol.representation, true, true,
            "not applicable for |k| = 1: the dilates of phi_k do not span the spline space"};
    out.push_back(c);
  }

  const QuadratureOptions q{.order = quadOrder, .panels = 16};
  const auto bump = KnotBump::random(rng, s.knots());
  const JetFunction<double> psi = [&](double r) { return bump(r); };
  const auto ortho = orthogonalityDefect(s, psi, q);
  out.push_back(makeCheck("orthogonality", ortho.normalized, tol.variational));

  Competitor<double> g{[&](double r) { return s.jet(r) + bump(r); }, bump.hi(), {bump.lo(), bump.hi()}};
  const auto py = pythagorasCheck(s, g, q);
  out.push_back(makeCheck("pythagoras", py.defect, tol.variational));
  Check minimal = makeCheck("minimal_energy", py.splineEnergy - py.lhs, 0.0);
  minimal.pass = py.splineEnergy < py.lhs;
  out.push_back(minimal);
  return out;
}

inline bool allPass(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

}  // namespace polyspline
