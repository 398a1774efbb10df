#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <string>
#include <vector>

#include "polyspline/instances.hpp"
#include "polyspline/io.hpp"

using namespace polyspline;

namespace {

std::string tempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("polyspline_io_" + name)).string();
}

template <class T>
void expectSameSpline(const BeppoLeviSpline<T>& a, const BeppoLeviSpline<T>& b) {
  ASSERT_EQ(a.k(), b.k());
  ASSERT_TRUE(a.knots() == b.knots());
  for (double r = 0.0; r <= 2.0 * a.knots().back(); r += 0.037)
    for (int m = 0; m <= 2; ++m) EXPECT_EQ(a(r, m), b(r, m)) << "r=" << r << " m=" << m;
}

}  // namespace

TEST(Json, ExpressionRoundTrip) {
  const auto e = rpow(Rational(3, 2)) * 0.1 + rpow(Rational(-2), 1) * -7.25 + rpow(Rational(0)) * (1.0 / 3.0);
  const auto back = exprFromJson<double>(Json::parse(toJson(e).dump()));
  EXPECT_TRUE(back == e);
}

TEST(Json, RealSplineRoundTripIsExact) {
  Rng rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    const int k = randomFrequency(rng, 1, 8);
    const auto knots = randomKnots(rng, static_cast<std::size_t>(rng.integer(1, 6)), 0.3, 3.0);
    std::vector<double> v(knots.size());
    for (auto& x : v) x = rng.uniform(-1, 1);
    const auto s = buildInterpolant<double>(k, knots, v);
    const auto path = tempPath("spline.json");
    writeJsonFile(path, toJson(s));
    const auto back = splineFromJson<double>(readJsonFile(path));
    expectSameSpline(s, back);
    EXPECT_EQ(back.values(), s.values());
    std::filesystem::remove(path);
  }
}

TEST(Json, ComplexSplineRoundTripIsExact) {
  const std::vector<Complex> v{{1.0, -0.5}, {0.25, 2.0}, {-1.0, 0.0}};
  const auto s = buildInterpolant<Complex>(-3, KnotSet({0.7, 1.1, 2.9}), v);
  const auto back = splineFromJson<Complex>(Json::parse(toJson(s).dump()));
  expectSameSpline(s, back);
  EXPECT_EQ(back.values(), v);
}

TEST(Json, MalformedSplinesAreInputErrors) {
  const auto s = buildInterpolant<double>(2, KnotSet({1.0, 2.0}), std::vector<double>{1.0, 0.0});
  auto j = toJson(s);
  j.erase("pieces");
  EXPECT_THROW(splineFromJson<double>(j), InputError);
  j = toJson(s);
  j["pieces"].erase(1);
  EXPECT_THROW(splineFromJson<double>(j), InputError);
  j = toJson(s);
  j["pieces"][0]["terms"][0]["exponent"] = "1/0";
  EXPECT_ANY_THROW(splineFromJson<double>(j));
  EXPECT_THROW(detail::scalarFromJson<Complex>(Json::array({1.0})), InputError);
}

TEST(Json, SurfaceRoundTrip) {
  const KnotSet radii({1.0, 1.6, 2.3});
  const auto s = buildSurface(ingest(radii, sampleCurves(manufacturedSurface(), radii, 16), 3));
  const auto back = surfaceFromJson(Json::parse(toJson(s).dump()));
  EXPECT_EQ(back.truncation(), 3);
  for (double r : {0.0, 0.9, 1.9, 4.0})
    for (double t : {-1.0, 0.3, 2.0}) EXPECT_EQ(back(r, t), s(r, t));
  auto j = toJson(s);
  j["zero_mode"]["strategy"] = "unknown";
  EXPECT_THROW(surfaceFromJson(j), InputError);
}

TEST(Json, DatasetParsing) {
  Json j{{"radii", {1.0, 2.0}}, {"theta_samples", 4}, {"curves", {{1, 2, 3, 4}, {0, 0, 0, 0}}}, {"truncation", 1}};
  const auto d = datasetFromJson(j);
  EXPECT_EQ(d.samples, 4);
  EXPECT_EQ(d.truncation, 1);
  j["theta_samples"] = 5;
  EXPECT_THROW(datasetFromJson(j), InputError);
  j.erase("theta_samples");
  j.erase("truncation");
  EXPECT_EQ(datasetFromJson(j).truncation, 1);
  j.erase("radii");
  EXPECT_THROW(datasetFromJson(j), InputError);
}

TEST(Json, ReportsUseNullForNonFinite) {
  SurfaceError e;
  e.warning = "w";
  const auto j = toJson(e);
  EXPECT_TRUE(j["bound"].is_null());
  EXPECT_EQ(j["warning"], "w");
  EXPECT_TRUE(j["within_bound"].get<bool>());
}

TEST(Files, MissingAndMalformed) {
  EXPECT_THROW(readJsonFile("/nonexistent/x.json"), InputError);
  const auto path = tempPath("bad.json");
  writeTextFile(path, "{ not json");
  EXPECT_THROW(readJsonFile(path), InputError);
  std::filesystem::remove(path);
  EXPECT_THROW(writeTextFile("/nonexistent/dir/x", "x"), InputError);
}

TEST(Csv, ParsesWithAndWithoutHeader) {
  const auto path = tempPath("in.csv");
  writeTextFile(path, "r,value\n1,0.5\r\n2.5, -1e-3\n\n");
  auto s = readRadialCsv(path);
  EXPECT_EQ(s.radii, (std::vector<double>{1.0, 2.5}));
  EXPECT_EQ(s.values, (std::vector<double>{0.5, -1e-3}));
  writeTextFile(path, "3,4\n");
  s = readRadialCsv(path);
  EXPECT_EQ(s.radii.size(), 1u);
  std::filesystem::remove(path);
}

TEST(Csv, ErrorsNameTheLine) {
  const auto path = tempPath("bad.csv");
  writeTextFile(path, "r,value\n1,2\n2,x\n");
  try {
    readRadialCsv(path);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
  writeTextFile(path, "r,value\n");
  EXPECT_THROW(readRadialCsv(path), InputError);
  std::filesystem::remove(path);
  EXPECT_THROW(readRadialCsv(path), InputError);
}

TEST(Format, SeventeenDigitsRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) EXPECT_EQ(std::stod(formatDouble(v)), v);
  EXPECT_EQ(formatDouble(3.0), "3");
}
