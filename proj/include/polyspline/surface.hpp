#pragma once

// Transfinite interpolation of curves on concentric circles r = r_j by a
// biharmonic polyspline surface s(r, theta) = sum_k s_k(r) e^{ik theta}.
// Every non-zero mode s_k is the Beppo Levi L_k-spline interpolating the
// discrete Fourier coefficients of the curves; the k = 0 mode is delegated to
// a pluggable radial profile.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polyspline/analysis.hpp"
#include "polyspline/errors.hpp"
#include "polyspline/jet.hpp"
#include "polyspline/knots.hpp"
#include "polyspline/parallel.hpp"
#include "polyspline/quadrature.hpp"
#include "polyspline/spline.hpp"

namespace polyspline {

using Complex = std::complex<double>;

struct TransfiniteDataset {
  KnotSet radii;
  /// Number M of equispaced samples theta_i = -pi + 2 pi i / M per curve.
  int samples = 0;
  /// Truncation order K; modes |k| <= K are kept.
  int truncation = 0;
  /// curves[j][i] = mu_j(theta_i).
  std::vector<std::vector<double>> curves;
  /// fourier[j][k + K] = (1/M) sum_i e^{-ik theta_i} mu_j(theta_i).
  std::vector<std::vector<Complex>> fourier;
  /// Per curve: sum_{|k| <= K} |mu_hat_k| (1 + |k|)^2.
  std::vector<double> wienerSums;
  /// Per curve: the same weighted sum over K < |k| <= M/2.
  std::vector<double> outOfBand;
  /// Per curve: out-of-band mass above 1e-8 of the total weighted mass.
  std::vector<bool> leakage;

  double theta(int i) const { return -std::numbers::pi + 2.0 * std::numbers::pi * i / samples; }
  Complex coefficient(std::size_t j, int k) const { return fourier[j][static_cast<std::size_t>(k + truncation)]; }
  /// Coefficients of mode k across all curves.
  std::vector<Complex> mode(int k) const {
    std::vector<Complex> out(radii.size());
    for (std::size_t j = 0; j < radii.size(); ++j) out[j] = coefficient(j, k);
    return out;
  }
  bool anyLeakage() const {
    for (bool b : leakage)
      if (b) return true;
    return false;
  }
};

namespace detail {

inline Complex dftCoefficient(std::span<const double> samples, int k) {
  const auto m = static_cast<int>(samples.size());
  Complex sum{};
  for (int i = 0; i < m; ++i) {
    const double theta = -std::numbers::pi + 2.0 * std::numbers::pi * i / m;
    sum += samples[i] * std::polar(1.0, -k * theta);
  }
  return sum / static_cast<double>(m);
}

/// Weighted mass of modes K < |k| <= M/2 (the Nyquist mode of even M once).
inline double outOfBandMass(std::span<const double> samples, int truncation) {
  const auto m = static_cast<int>(samples.size());
  double mass = 0.0;
  for (int k = truncation + 1; 2 * k <= m; ++k) {
    const double w = (1.0 + k) * (1.0 + k);
    mass += std::abs(dftCoefficient(samples, k)) * w;
    if (2 * k != m) mass += std::abs(dftCoefficient(samples, -k)) * w;
  }
  return mass;
}

inline double inBandMass(std::span<const double> samples, int truncation) {
  double mass = 0.0;
  for (int k = -truncation; k <= truncation; ++k)
    mass += std::abs(dftCoefficient(samples, k)) * (1.0 + std::abs(k)) * (1.0 + std::abs(k));
  return mass;
}

}  // namespace detail

/// Relative out-of-band mass below which a truncation is accepted.
inline constexpr double kTruncationTolerance = 1e-8;

/// Samples curves on the equispaced grid and computes their discrete Fourier
/// coefficients.  truncation < 0 selects the smallest K whose out-of-band
/// weighted mass is below 1e-8 of the total for every curve.  When explicit
/// angles are given they must be the grid -pi + 2 pi i / M.
inline TransfiniteDataset ingest(const KnotSet& radii, std::vector<std::vector<double>> curves, int truncation,
                                 const std::optional<std::vector<double>>& thetas = std::nullopt) {
  if (curves.size() != radii.size())
    throw InputError("expected " + std::to_string(radii.size()) + " curves, got " + std::to_string(curves.size()));
  const auto m = static_cast<int>(curves.front().size());
  if (m < 1) throw InputError("curves must have at least one sample");
  for (const auto& c : curves)
    if (static_cast<int>(c.size()) != m) throw InputError("all curves must have the same number of samples");
  if (thetas) {
    if (static_cast<int>(thetas->size()) != m) throw InputError("angle grid size does not match the curves");
    for (int i = 0; i < m; ++i) {
      const double expected = -std::numbers::pi + 2.0 * std::numbers::pi * i / m;
      if (std::abs((*thetas)[i] - expected) > 1e-12)
        throw InputError("angles must be equispaced on [-pi, pi) starting at -pi");
    }
  }
  const int maxK = (m - 1) / 2;
  if (truncation < 0) {
    truncation = 0;
    for (const auto& c : curves) {
      int kc = 0;
      while (kc < maxK) {
        const double out = detail::outOfBandMass(c, kc);
        const double total = out + detail::inBandMass(c, kc);
        if (out <= kTruncationTolerance * total) break;
        ++kc;
      }
      truncation = std::max(truncation, kc);
    }
  }
  if (m < 2 * truncation + 1)
    throw InputError("need at least 2K + 1 = " + std::to_string(2 * truncation + 1) + " samples per curve, got " +
                     std::to_string(m));

  TransfiniteDataset d{radii, m, truncation, std::move(curves), {}, {}, {}, {}};
  for (const auto& c : d.curves) {
    std::vector<Complex> coeffs;
    for (int k = -truncation; k <= truncation; ++k) coeffs.push_back(detail::dftCoefficient(c, k));
    const double in = detail::inBandMass(c, truncation);
    const double out = detail::outOfBandMass(c, truncation);
    d.fourier.push_back(std::move(coeffs));
    d.wienerSums.push_back(in);
    d.outOfBand.push_back(out);
    d.leakage.push_back(out > kTruncationTolerance * (in + out) && out > 1e-14);
  }
  return d;
}

// ---------------------------------------------------------------------------
// Zero mode

/// Radial profile used for the k = 0 mode.
class ZeroModeProfile {
 public:
  virtual ~ZeroModeProfile() = default;
  virtual Jet<double> jet(double r) const = 0;
  virtual std::string name() const = 0;
  /// Whether the profile is the variational k = 0 spline (the default is not).
  virtual bool variational() const { return false; }
  /// Which member of the one-parameter surface family this realizes.
  virtual std::string variant() const { return "unspecified"; }
};

/// C^2 natural cubic spline through (r_j, values_j), extended linearly beyond
/// [r_1, r_n]; a constant for a single radius.  Plumbing for the k = 0 mode.
class NaturalCubicZeroMode : public ZeroModeProfile {
 public:
  NaturalCubicZeroMode(const KnotSet& knots, std::span<const double> values)
      : x_(knots.vector()), y_(values.begin(), values.end()), m_(x_.size(), 0.0) {
    if (y_.size() != x_.size()) throw InputError("zero mode needs one value per radius");
    const std::size_t n = x_.size();
    if (n < 3) return;
    // Tridiagonal system for the interior second derivatives.
    std::vector<double> diag(n, 0.0), upper(n, 0.0), rhs(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
      diag[i] = (h0 + h1) / 3.0;
      upper[i] = h1 / 6.0;
      rhs[i] = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
    }
    for (std::size_t i = 2; i + 1 < n; ++i) {
      const double lower = (x_[i] - x_[i - 1]) / 6.0;
      const double f = lower / diag[i - 1];
      diag[i] -= f * upper[i - 1];
      rhs[i] -= f * rhs[i - 1];
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
      m_[i] = (rhs[i] - upper[i] * m_[i + 1]) / diag[i];
      if (i == 1) break;
    }
  }

  Jet<double> jet(double r) const override {
    const std::size_t n = x_.size();
    if (n == 1) return {y_[0], 0.0, 0.0};
    if (r <= x_.front()) {
      const double s = slope(0, x_.front());
      return {y_.front() + s * (r - x_.front()), s, 0.0};
    }
    if (r >= x_.back()) {
      const double s = slope(n - 2, x_.back());
      return {y_.back() + s * (r - x_.back()), s, 0.0};
    }
    const auto it = std::upper_bound(x_.begin(), x_.end(), r);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - r) / h, b = (r - x_[i]) / h;
    const double v = a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
    const double d1 = (y_[i + 1] - y_[i]) / h + ((1.0 - 3.0 * a * a) * m_[i] + (3.0 * b * b - 1.0) * m_[i + 1]) * h / 6.0;
    const double d2 = a * m_[i] + b * m_[i + 1];
    return {v, d1, d2};
  }

  std::string name() const override { return "natural-cubic"; }

 private:
  /// First derivative of interval i evaluated at its end point r.
  double slope(std::size_t i, double r) const {
    const double h = x_[i + 1] - x_[i];
    const double a = (x_[i + 1] - r) / h, b = (r - x_[i]) / h;
    return (y_[i + 1] - y_[i]) / h + ((1.0 - 3.0 * a * a) * m_[i] + (3.0 * b * b - 1.0) * m_[i + 1]) * h / 6.0;
  }

  std::vector<double> x_, y_, m_;
};

using ZeroModeStrategy =
    std::function<std::shared_ptr<const ZeroModeProfile>(const KnotSet&, std::span<const double>)>;

inline ZeroModeStrategy naturalCubicZeroMode() {
  return [](const KnotSet& knots, std::span<const double> values) {
    return std::make_shared<const NaturalCubicZeroMode>(knots, values);
  };
}

/// Strategy lookup by name, for artifacts read back from disk.
inline ZeroModeStrategy zeroModeStrategy(const std::string& name) {
  if (name == "natural-cubic") return naturalCubicZeroMode();
  throw InputError("unknown zero-mode strategy '" + name + "'");
}

// ---------------------------------------------------------------------------
// Surface model

class SurfaceModel {
 public:
  SurfaceModel(KnotSet radii, std::vector<BeppoLeviSpline<Complex>> modes, std::vector<double> zeroValues,
               std::shared_ptr<const ZeroModeProfile> zeroMode)
      : radii_(std::move(radii)),
        modes_(std::move(modes)),
        zeroValues_(std::move(zeroValues)),
        zeroMode_(std::move(zeroMode)) {
    for (std::size_t i = 0; i < modes_.size(); ++i)
      if (modes_[i].k() != static_cast<int>(i) + 1) throw InputError("surface modes must be k = 1, 2, ..., K");
  }

  const KnotSet& radii() const { return radii_; }
  int truncation() const { return static_cast<int>(modes_.size()); }
  /// Spline of mode k >= 1.
  const BeppoLeviSpline<Complex>& spline(int k) const { return modes_.at(static_cast<std::size_t>(k - 1)); }
  const std::vector<BeppoLeviSpline<Complex>>& splines() const { return modes_; }
  const std::vector<double>& zeroValues() const { return zeroValues_; }
  const ZeroModeProfile& zeroMode() const { return *zeroMode_; }

  /// d^m/dr^m of the amplitude s_k(r) for any |k| <= K; s_{-k} = conj(s_k).
  Complex modeDerivative(int k, double r, int m) const {
    if (k == 0) return zeroMode_->jet(r)[m];
    const Complex v = spline(std::abs(k))(r, m);
    return k > 0 ? v : std::conj(v);
  }

  /// d^m/dr^m s(r, theta), summed over conjugate pairs so the result is real.
  double operator()(double r, double theta, int m = 0) const {
    double sum = zeroMode_->jet(r)[m];
    for (const auto& s : modes_) sum += 2.0 * (s(r, m) * std::polar(1.0, s.k() * theta)).real();
    return sum;
  }

 private:
  KnotSet radii_;
  std::vector<BeppoLeviSpline<Complex>> modes_;
  std::vector<double> zeroValues_;
  std::shared_ptr<const ZeroModeProfile> zeroMode_;
};

/// Builds one spline per mode 1 <= k <= K from the dataset coefficients (the
/// -k modes follow by conjugation) and the zero mode from the strategy.
/// Mode builds run concurrently; a failure names the offending k.
inline SurfaceModel buildSurface(const TransfiniteDataset& d, const ZeroModeStrategy& zeroStrategy = naturalCubicZeroMode()) {
  std::vector<std::optional<BeppoLeviSpline<Complex>>> built(static_cast<std::size_t>(d.truncation));
  parallelFor(built.size(), [&](std::size_t i) {
    const int k = static_cast<int>(i) + 1;
    try {
      built[i] = buildInterpolant<Complex>(k, d.radii, d.mode(k));
    } catch (const ConstructionError& e) {
      throw ConstructionError("mode k = " + std::to_string(k) + ": " + e.what(), e.residual());
    } catch (const InputError& e) {
      throw InputError("mode k = " + std::to_string(k) + ": " + e.what());
    }
  });
  std::vector<BeppoLeviSpline<Complex>> modes;
  modes.reserve(built.size());
  for (auto& b : built) modes.push_back(std::move(*b));
  std::vector<double> zero(d.radii.size());
  for (std::size_t j = 0; j < zero.size(); ++j) zero[j] = d.coefficient(j, 0).real();
  auto profile = zeroStrategy(d.radii, zero);
  return SurfaceModel(d.radii, std::move(modes), std::move(zero), std::move(profile));
}

/// d^m/dr^m s(r, theta) for m in {0, 1, 2}.
inline double evaluateSurface(const SurfaceModel& s, double r, double theta, int m = 0) {
  if (!(r >= 0.0)) throw InputError("surface evaluation requires r >= 0");
  if (m < 0 || m > 2) throw InputError("radial derivative order must be 0, 1 or 2");
  return s(r, theta, m);
}

// ---------------------------------------------------------------------------
// Reference surfaces and the annulus error

/// A surface given by its Fourier amplitudes: modes[k - 1] is f_k for k >= 1,
/// f_{-k} = conj(f_k); an empty zeroMode means zero mean.
struct ModalSurface {
  std::vector<JetFunction<Complex>> modes;
  JetFunction<double> zeroMode;

  int truncation() const { return static_cast<int>(modes.size()); }
  double operator()(double r, double theta, int m = 0) const {
    double sum = zeroMode ? zeroMode(r)[m] : 0.0;
    for (std::size_t i = 0; i < modes.size(); ++i)
      sum += 2.0 * (modes[i](r)[m] * std::polar(1.0, static_cast<double>(i + 1) * theta)).real();
    return sum;
  }
};

/// Mode jets of a surface model in the same shape as ModalSurface.
inline ModalSurface modalView(const SurfaceModel& s) {
  ModalSurface out;
  for (const auto& spline : s.splines()) {
    const auto* p = &spline;
    out.modes.push_back([p](double r) { return p->jet(r); });
  }
  return out;
}

namespace detail {

/// Integrand of the polar Beppo Levi energy at (r, theta), weight r included,
/// from the jets of the non-zero modes k = 1..K.
inline double polarEnergyDensity(std::span<const Jet<Complex>> jets, double r, double theta) {
  double frr = 0, ft = 0, ftr = 0, ftt = 0, fr = 0;
  for (std::size_t i = 0; i < jets.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    const Complex e = std::polar(1.0, k * theta);
    const Complex ik(0.0, k);
    frr += 2.0 * (jets[i].d2 * e).real();
    fr += 2.0 * (jets[i].d1 * e).real();
    ft += 2.0 * (ik * jets[i].value * e).real();
    ftr += 2.0 * (ik * jets[i].d1 * e).real();
    ftt += 2.0 * (-k * k * jets[i].value * e).real();
  }
  const double a = ft / (r * r) - ftr / r;
  const double b = ftt / (r * r) + fr / r;
  return (frr * frr + 2.0 * a * a + b * b) * r;
}

inline int thetaPoints(int truncation) { return std::max(64, 4 * truncation + 8); }

}  // namespace detail

/// Tensor-product quadrature of the polar Beppo Levi energy of the non-zero
/// modes over r in consecutive breakpoints (last may be +inf) and theta in
/// [-pi, pi): Gauss-Legendre in r, trapezoid in theta (exact for the
/// trigonometric polynomials involved).
inline double polarEnergyQuadrature(const ModalSurface& f, std::span<const double> breakpoints,
                                    QuadratureOptions opt = {.order = 32, .panels = 4}) {
  const int nt = detail::thetaPoints(f.truncation());
  const auto& rule = gaussLegendre(opt.order);
  auto ring = [&](double r) {
    std::vector<Jet<Complex>> jets;
    for (const auto& m : f.modes) jets.push_back(m(r));
    double sum = 0.0;
    for (int i = 0; i < nt; ++i) sum += detail::polarEnergyDensity(jets, r, -std::numbers::pi + 2.0 * std::numbers::pi * i / nt);
    return sum * 2.0 * std::numbers::pi / nt;
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i], b = breakpoints[i + 1];
    total += std::isinf(b) ? rule.integrateToInfinity(ring, a, opt.panels) : rule.integrate(ring, a, b, opt.panels);
  }
  return total;
}

/// 2 pi sum_{k != 0} ||f_k||_k^2 with the mode energies by quadrature.
inline double plancherelEnergy(const ModalSurface& f, std::span<const double> breakpoints,
                               QuadratureOptions opt = {.order = 32, .panels = 4}) {
  double sum = 0.0;
  for (std::size_t i = 0; i < f.modes.size(); ++i)
    sum += 2.0 * energyQuadrature<Complex>(static_cast<int>(i) + 1, f.modes[i], breakpoints, opt).value;
  return 2.0 * std::numbers::pi * sum;
}

/// 2 pi sum_{k != 0} ||s_k||_k^2 with every mode energy in closed form.
inline double plancherelEnergy(const SurfaceModel& s) {
  double sum = 0.0;
  for (const auto& spline : s.splines()) sum += 2.0 * energy(spline).value;
  return 2.0 * std::numbers::pi * sum;
}

/// Polar Beppo Levi energy of the non-zero modes of a surface model: 2-D
/// quadrature over 0 < r < r_n plus the exact mode-wise energy of the tails.
inline double polarEnergy(const SurfaceModel& s, QuadratureOptions opt = {.order = 32, .panels = 4}) {
  std::vector<double> bp{0.0};
  for (double r : s.radii().radii()) bp.push_back(r);
  double total = polarEnergyQuadrature(modalView(s), bp, opt);
  for (const auto& spline : s.splines())
    total += 2.0 * std::numbers::pi * 2.0 *
             pieceEnergy(spline.k(), spline.tail().expr(), spline.tail().scale(), s.radii().back(), kInfinity);
  return total;
}

struct SurfaceError {
  int m = 0;
  /// (int_{r_1}^{r_n} int |d^m/dr^m (f - s)|^2 r dtheta dr)^{1/2}.
  double measured = 0.0;
  /// 2^{m-1} sqrt(r_n / r_1) h^{2-m} ||f||_BL, NaN when not applicable.
  double boundRHS = std::numeric_limits<double>::quiet_NaN();
  double blNorm = std::numeric_limits<double>::quiet_NaN();
  /// False when the reference has a k = 0 mode; the bound is then not checked.
  bool boundChecked = false;
  std::string warning;

  bool withinBound() const { return !boundChecked || measured <= boundRHS; }
};

struct SurfaceErrorOptions {
  QuadratureOptions radial{.order = 32, .panels = 2};
  /// Breakpoints for the mode energies of the reference.
  std::vector<double> energyBreakpoints{0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, kInfinity};
  QuadratureOptions energy{.order = 32, .panels = 4};
};

/// Annulus L^2 error of d^m/dr^m (f - s) against the right-hand side built
/// from ||f||_BL^2 = 2 pi sum_k ||f_k||_k^2.
inline SurfaceError surfaceErrorL2(const SurfaceModel& s, const ModalSurface& f, int m,
                                   const SurfaceErrorOptions& opt = {}) {
  if (m < 0 || m > 1) throw InputError("surface error is defined for m in {0, 1}");
  const auto& knots = s.radii();
  const int nt = detail::thetaPoints(std::max(s.truncation(), f.truncation()));
  const auto& rule = gaussLegendre(opt.radial.order);
  double sq = 0.0;
  for (std::size_t j = 0; j + 1 < knots.size(); ++j) {
    sq += rule.integrate(
        [&](double r) {
          double ring = 0.0;
          for (int i = 0; i < nt; ++i) {
            const double theta = -std::numbers::pi + 2.0 * std::numbers::pi * i / nt;
            const double e = f(r, theta, m) - s(r, theta, m);
            ring += e * e;
          }
          return ring * 2.0 * std::numbers::pi / nt * r;
        },
        knots[j], knots[j + 1], opt.radial.panels);
  }
  SurfaceError out;
  out.m = m;
  out.measured = std::sqrt(sq);
  if (f.zeroMode) {
    out.warning = "reference has a k = 0 mode; bound not checked";
    return out;
  }
  out.blNorm = std::sqrt(plancherelEnergy(f, opt.energyBreakpoints, opt.energy));
  out.boundRHS = std::pow(2.0, m - 1) * std::sqrt(knots.back() / knots.front()) *
                 std::pow(knots.meshSize(), 2.0 - m) * out.blNorm;
  out.boundChecked = true;
  return out;
}

// ---------------------------------------------------------------------------
// Mesh export

/// Writes `r,theta,x,y,z` rows, z = s(r, theta), with 17 significant digits.
inline void exportMesh(const SurfaceModel& s, std::span<const double> rGrid, std::span<const double> thetaGrid,
                       const std::string& path) {
  if (rGrid.empty() || thetaGrid.empty()) throw InputError("mesh grids must be nonempty");
  std::ofstream out(path);
  if (!out) throw InputError("cannot open mesh file '" + path + "' for writing");
  out << "r,theta,x,y,z\n";
  char line[160];
  for (double r : rGrid)
    for (double t : thetaGrid) {
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r, t, r * std::cos(t), r * std::sin(t),
                    s(r, t));
      out << line;
    }
  if (!out) throw InputError("failed writing mesh file '" + path + "'");
}

}  // namespace polyspline
