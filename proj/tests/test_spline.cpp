#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "polyspline/instances.hpp"
#include "polyspline/spline.hpp"

using namespace polyspline;

namespace {

// Reference construction straight from the definition: head in
// span{r^{a+2}, r^a}, interior pieces in Ker L_k, tail in span{r^{2-a}, r^-a},
// interpolation from both sides and C^1, C^2 at every knot, all in raw
// monomials of r and solved by full-pivot LU.
struct Oracle {
  int a;
  std::vector<double> knots;
  std::vector<double> coef;

  static double basis(int a, int which, double r, int m) {
    auto pw = [&](double e) {
      if (m == 0) return std::pow(r, e);
      if (m == 1) return e * std::pow(r, e - 1);
      return e * (e - 1) * std::pow(r, e - 2);
    };
    if (a == 1 && which == 2) {  // r ln r
      if (m == 0) return r * std::log(r);
      if (m == 1) return std::log(r) + 1.0;
      return 1.0 / r;
    }
    const double e[4] = {a + 2.0, static_cast<double>(a), 2.0 - a, -static_cast<double>(a)};
    return pw(e[which]);
  }
  // Piece p: 0 head, 1..n-1 interior, n tail; local unknown offsets.
  // For a = 1 the tail kernel is span{r, r^-1}.
  static std::vector<int> members(int a, int p, int n) {
    if (p == 0) return {0, 1};
    if (p == n) return a == 1 ? std::vector<int>{1, 3} : std::vector<int>{2, 3};
    return {0, 1, 2, 3};
  }
  static int offset(int p) { return p == 0 ? 0 : 2 + 4 * (p - 1); }

  Oracle(int k, std::vector<double> r, const std::vector<double>& v) : a(std::abs(k)), knots(std::move(r)) {
    const int n = static_cast<int>(knots.size());
    const int size = 4 * n;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(size, size);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(size);
    // Adds sign * (d^m/dr^m of piece p at r) to the current row.
    auto add = [&](int row, int p, double r, int m, double sign) {
      const auto mem = members(a, p, n);
      for (std::size_t q = 0; q < mem.size(); ++q) A(row, offset(p) + static_cast<int>(q)) += sign * basis(a, mem[q], r, m);
    };
    int row = 0;
    for (int j = 0; j < n; ++j) {
      const double r = knots[j];
      add(row, j, r, 0, 1.0);
      b(row++) = v[j];
      add(row, j + 1, r, 0, 1.0);
      b(row++) = v[j];
      for (int m = 1; m <= 2; ++m, ++row) {
        add(row, j, r, m, 1.0);
        add(row, j + 1, r, m, -1.0);
      }
    }
    Eigen::VectorXd x = A.fullPivLu().solve(b);
    coef.assign(x.data(), x.data() + x.size());
  }

  double operator()(double r) const {
    const int n = static_cast<int>(knots.size());
    int p = 0;
    while (p < n && r > knots[p]) ++p;
    const auto mem = members(a, p, n);
    double s = 0.0;
    for (std::size_t q = 0; q < mem.size(); ++q) s += coef[offset(p) + q] * basis(a, mem[q], r, 0);
    return s;
  }
};

double supDiff(const std::function<double(double)>& f, const std::function<double(double)>& g, double hi,
               int pts = 1000) {
  double d = 0.0;
  for (int i = 0; i <= pts; ++i) d = std::max(d, std::abs(f(hi * i / pts) - g(hi * i / pts)));
  return d;
}

}  // namespace

TEST(KnotSet, Validation) {
  EXPECT_THROW(KnotSet({}), InputError);
  EXPECT_THROW(KnotSet({1.0, 1.0}), InputError);
  EXPECT_THROW(KnotSet({2.0, 1.0}), InputError);
  EXPECT_THROW(KnotSet({0.0, 1.0}), InputError);
  EXPECT_THROW(KnotSet({1e-13, 1.0}), InputError);
  const KnotSet k({1.0, 1.5, 3.0});
  EXPECT_DOUBLE_EQ(k.meshSize(), 1.5);
  EXPECT_DOUBLE_EQ(KnotSet::uniform(1.0, 2.0, 5).meshSize(), 0.25);
}

TEST(PhiK, SpotValues) {
  for (int k = -12; k <= 12; ++k) {
    if (k == 0) continue;
    EXPECT_DOUBLE_EQ(phiK(k, 1.0), 1.0);
    EXPECT_EQ(phiK(k, 0.0), 0.0);
  }
  EXPECT_DOUBLE_EQ(phiK(2, 0.5), 0.34375);
  EXPECT_DOUBLE_EQ(phiK(2, 2.0), 1.375);
  EXPECT_EQ(phiK(5, 0.0), 0.0);
  EXPECT_THROW(phiK(0, 1.0), UnsupportedFrequency);
  // phi_1(r) = r on both branches.
  for (double r : {0.3, 1.0, 2.7}) EXPECT_DOUBLE_EQ(phiK(1, r), r);
}

TEST(PhiK, IsC2AtOne) {
  for (int k = 1; k <= 9; ++k) {
    const auto s = buildInterpolant<double>(k, KnotSet({1.0}), std::vector<double>{1.0});
    EXPECT_LE(continuityDefect(s), 1e-14) << k;
    const auto [h, t] = endConditionResiduals(s);
    EXPECT_EQ(h, 0.0);
    EXPECT_EQ(t, 0.0);
    for (double r : {0.2, 0.9, 1.0, 1.7, 5.0}) EXPECT_NEAR(s(r), phiK(k, r), 1e-15);
  }
}

TEST(BuildInterpolant, SingleKnotIsScaledPhi) {
  const auto s = buildInterpolant<double>(2, KnotSet({1.0}), std::vector<double>{5.0});
  for (double r : {0.0, 0.25, 0.5, 1.0, 2.0, 7.0}) EXPECT_NEAR(s(r), 5.0 * phiK(2, r), 1e-14);
  EXPECT_DOUBLE_EQ(evaluate(s, 1.0), 5.0);
  const auto t = buildInterpolant<double>(3, KnotSet({2.0}), std::vector<double>{-1.5});
  for (double r : {0.5, 2.0, 3.3}) EXPECT_NEAR(t(r), -1.5 * phiK(3, r / 2.0), 1e-14);
}

TEST(BuildInterpolant, TwoKnotDefiningConditions) {
  const auto s = buildInterpolant<double>(2, KnotSet({1.0, 2.0}), std::vector<double>{1.0, 0.0});
  EXPECT_NEAR(s(1.0), 1.0, 1e-14);
  EXPECT_NEAR(s(2.0), 0.0, 1e-14);
  const auto [h, t] = endConditionResiduals(s);
  EXPECT_EQ(h, 0.0);
  EXPECT_EQ(t, 0.0);
  EXPECT_EQ(interiorKernelResidual(s), 0.0);
  EXPECT_LE(continuityDefect(s), 1e-12);
}

TEST(BuildInterpolant, RecoversDilationSum) {
  const KnotSet knots({1.0, 1.5, 2.5});
  const std::vector<double> c{2.0, 0.0, -1.0};
  auto g = [](double r) { return 2.0 * phiK(3, r) - phiK(3, r / 2.5); };
  std::vector<double> v;
  for (double r : knots.radii()) v.push_back(g(r));
  const auto s = buildInterpolant<double>(3, knots, v);
  EXPECT_LE(supDiff(g, [&](double r) { return s(r); }, 6.0), 1e-8);
  const auto d = dilationSum<double>(3, knots, c);
  EXPECT_LE(supDiff(g, [&](double r) { return d(r); }, 6.0), 1e-13);
}

TEST(BuildInterpolant, MatchesIndependentMonomialOracle) {
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const int k = randomFrequency(rng, 1, 5);
    const auto n = static_cast<std::size_t>(rng.integer(2, 6));
    const auto knots = randomKnots(rng, n, 0.8, 1.8, 0.3);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    const auto s = buildInterpolant<double>(k, knots, v);
    const Oracle o(k, knots.vector(), v);
    const double d = supDiff([&](double r) { return o(r); }, [&](double r) { return s(r); }, 3.0);
    EXPECT_LE(d, 1e-9) << "k=" << k << " n=" << n;
  }
}

TEST(BuildInterpolant, Errors) {
  const KnotSet knots({1.0, 2.0});
  EXPECT_THROW(buildInterpolant<double>(0, knots, std::vector<double>{1, 2}), UnsupportedFrequency);
  EXPECT_THROW(buildInterpolant<double>(2, knots, std::vector<double>{1}), InputError);
}

TEST(Evaluate, ContractAndSpotValues) {
  const auto s = buildInterpolant<double>(2, KnotSet({1.0}), std::vector<double>{1.0});
  EXPECT_DOUBLE_EQ(evaluate(s, 0.5), 0.34375);
  EXPECT_DOUBLE_EQ(evaluate(s, 2.0), 1.375);
  EXPECT_EQ(evaluate(s, 0.0), 0.0);
  EXPECT_THROW(evaluate(s, 1.0, 3), InputError);
  EXPECT_THROW(evaluate(s, -0.1), InputError);
  // phi_2'(r) = 3r - 2r^3 on the head.
  EXPECT_NEAR(evaluate(s, 0.5, 1), 1.5 - 0.25, 1e-14);
  EXPECT_NEAR(evaluate(s, 0.5, 2), 3.0 - 1.5, 1e-14);
}

TEST(Properties, Linearity) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = randomFrequency(rng, 1, 8);
    const auto n = static_cast<std::size_t>(rng.integer(1, 9));
    const auto knots = randomKnots(rng, n, 0.5, 3.0);
    std::vector<double> v(n), w(n), mix(n);
    const double al = rng.uniform(-2, 2), be = rng.uniform(-2, 2);
    for (std::size_t j = 0; j < n; ++j) {
      v[j] = rng.uniform(-1, 1);
      w[j] = rng.uniform(-1, 1);
      mix[j] = al * v[j] + be * w[j];
    }
    const auto sv = buildInterpolant<double>(k, knots, v);
    const auto sw = buildInterpolant<double>(k, knots, w);
    const auto sm = buildInterpolant<double>(k, knots, mix);
    for (int i = 0; i <= 300; ++i) {
      const double r = 2.0 * knots.back() * i / 300;
      EXPECT_NEAR(sm(r), al * sv(r) + be * sw(r), 1e-10) << "k=" << k << " r=" << r;
    }
  }
}

TEST(Properties, DilationCovariance) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = randomFrequency(rng, 1, 8);
    const auto n = static_cast<std::size_t>(rng.integer(1, 8));
    const auto knots = randomKnots(rng, n, 0.5, 3.0);
    const double lambda = rng.uniform(0.1, 10.0);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-1, 1);
    const auto s = buildInterpolant<double>(k, knots, v);
    const auto sl = buildInterpolant<double>(k, knots.scaled(lambda), v);
    for (int i = 0; i <= 300; ++i) {
      const double r = 2.0 * knots.back() * i / 300;
      EXPECT_NEAR(sl(lambda * r), s(r), 1e-9) << "k=" << k;
    }
  }
}

TEST(Properties, ConjugateSymmetryIsExact) {
  Rng rng(9);
  for (int k = 1; k <= 8; ++k) {
    const auto knots = randomKnots(rng, 5, 1.0, 2.0);
    std::vector<double> v(5);
    for (auto& x : v) x = rng.uniform(-1, 1);
    const auto a = buildInterpolant<double>(k, knots, v);
    const auto b = buildInterpolant<double>(-k, knots, v);
    for (std::size_t i = 0; i < a.pieceCount(); ++i) EXPECT_EQ(a.piece(i), b.piece(i));
  }
}

TEST(Properties, StructuralDecayOfEndPieces) {
  Rng rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = randomFrequency(rng, 1, 8);
    const int a = std::abs(k);
    const auto n = static_cast<std::size_t>(rng.integer(1, 7));
    const auto knots = randomKnots(rng, n, 0.5, 2.0);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-1, 1);
    const auto s = buildInterpolant<double>(k, knots, v);
    for (const auto& t : s.head().expr().terms()) {
      EXPECT_EQ(t.logPower, 0);
      EXPECT_TRUE(t.exponent == Rational(a) || t.exponent == Rational(a + 2)) << t.exponent;
    }
    for (const auto& t : s.tail().expr().terms()) {
      EXPECT_EQ(t.logPower, 0);
      EXPECT_TRUE(t.exponent == Rational(-a) || t.exponent == Rational(2 - a)) << t.exponent;
    }
  }
}

TEST(Properties, RecoveryOfRandomMembers) {
  Rng rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const int k = randomFrequency(rng, 2, 8);
    const auto n = static_cast<std::size_t>(rng.integer(2, 10));
    const auto knots = randomKnots(rng, n, rng.uniform(0.3, 2.0), rng.uniform(2.5, 6.0));
    std::vector<double> c(n);
    for (auto& x : c) x = rng.uniform(-1, 1);
    const auto member = buildByCollocation<double>(k, knots, dilationSum<double>(k, knots, c).values()).spline;
    const auto s = buildInterpolant<double>(k, knots, member.values());
    double scale = 0.0;
    for (int i = 0; i <= 1000; ++i) scale = std::max(scale, std::abs(member(2.0 * knots.back() * i / 1000)));
    EXPECT_LE(supDiff([&](double r) { return member(r); }, [&](double r) { return s(r); }, 2.0 * knots.back()),
              1e-8 * scale)
        << "k=" << k << " n=" << n;
  }
}

TEST(Properties, SubsetSplineIsAMemberForKOne) {
  Rng rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    const auto knots = randomKnots(rng, static_cast<std::size_t>(rng.integer(3, 9)), 0.5, 3.0);
    const auto member = randomMember(rng, 1, knots);
    std::vector<double> v;
    for (double r : knots.radii()) v.push_back(member(r));
    const auto s = buildInterpolant<double>(1, knots, v);
    EXPECT_LE(supDiff([&](double r) { return member(r); }, [&](double r) { return s(r); }, 6.0), 1e-9);
  }
}

TEST(BuildInterpolant, ComplexDataSolveAsRealAndImaginaryParts) {
  const KnotSet knots({1.0, 1.3, 2.0, 2.2});
  const std::vector<std::complex<double>> v{{1, 2}, {-0.5, 0.3}, {0.2, -1}, {0, 0.5}};
  std::vector<double> re, im;
  for (const auto& z : v) re.push_back(z.real()), im.push_back(z.imag());
  const auto s = buildInterpolant<std::complex<double>>(3, knots, v);
  const auto sr = buildInterpolant<double>(3, knots, re);
  const auto si = buildInterpolant<double>(3, knots, im);
  for (double r : {0.3, 1.0, 1.7, 2.1, 4.0}) {
    EXPECT_NEAR(s(r).real(), sr(r), 1e-13);
    EXPECT_NEAR(s(r).imag(), si(r), 1e-13);
  }
}

TEST(Collocation, Examples) {
  const auto one = buildByCollocation<double>(4, KnotSet({1.7}), std::vector<double>{2.5});
  ASSERT_EQ(one.coefficients.size(), 1u);
  EXPECT_DOUBLE_EQ(one.coefficients[0], 2.5);

  const KnotSet knots({1.0, 2.0});
  const auto col = buildByCollocation<double>(2, knots, std::vector<double>{1.0, 0.0});
  const auto pw = buildInterpolant<double>(2, knots, std::vector<double>{1.0, 0.0});
  EXPECT_LE(supDiff([&](double r) { return col.spline(r); }, [&](double r) { return pw(r); }, 4.0), 1e-8);

  const auto zero = buildByCollocation<double>(3, KnotSet({1.0, 1.5, 2.0}), std::vector<double>{0, 0, 0});
  for (double c : zero.coefficients) EXPECT_EQ(c, 0.0);

  EXPECT_THROW(buildByCollocation<double>(1, knots, std::vector<double>{1, 0}), UnsupportedFrequency);
  EXPECT_THROW(buildByCollocation<double>(-1, knots, std::vector<double>{1, 0}), UnsupportedFrequency);
}

TEST(Collocation, CoefficientsReproduceDataThroughPhi) {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = randomFrequency(rng, 2, 8);
    const auto n = static_cast<std::size_t>(rng.integer(1, 10));
    const auto knots = randomKnots(rng, n, 0.5, 4.0);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-1, 1);
    const auto col = buildByCollocation<double>(k, knots, v);
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) sum += col.coefficients[j] * phiK(k, knots[i] / knots[j]);
      EXPECT_NEAR(sum, v[i], 1e-10);
    }
  }
}

TEST(EndConditions, DetectForeignHeadPiece) {
  const int a = 3;
  const auto good = buildInterpolant<double>(a, KnotSet({1.0}), std::vector<double>{1.0});
  const BeppoLeviSpline<double> bad(a, good.knots(), Piece<double>(1.0, rpow(Rational(2 - a))), {}, good.tail(),
                                    good.values());
  const auto [h, t] = endConditionResiduals(bad);
  EXPECT_GT(h, 0.0);
  EXPECT_EQ(t, 0.0);
}

TEST(Spline, PieceLookup) {
  const auto s = buildInterpolant<double>(2, KnotSet({1.0, 2.0, 3.0}), std::vector<double>{1, 2, 3});
  EXPECT_EQ(s.pieceIndex(0.5), 0u);
  EXPECT_EQ(s.pieceIndex(1.0), 1u);
  EXPECT_EQ(s.pieceIndex(1.5), 1u);
  EXPECT_EQ(s.pieceIndex(2.0), 2u);
  EXPECT_EQ(s.pieceIndex(3.0), 2u);
  EXPECT_EQ(s.pieceIndex(3.5), 3u);
  EXPECT_EQ(s.breakpoints().size(), 5u);
}
