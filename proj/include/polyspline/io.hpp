#pragma once

// JSON artifacts and CSV input for splines, error reports and surfaces.

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "polyspline/analysis.hpp"
#include "polyspline/errors.hpp"
#include "polyspline/knots.hpp"
#include "polyspline/powerlog.hpp"
#include "polyspline/spline.hpp"
#include "polyspline/surface.hpp"

namespace polyspline {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

namespace detail {

template <class T>
Json scalarToJson(const T& v) {
  if constexpr (is_complex_v<T>) {
    return Json::array({v.real(), v.imag()});
  } else {
    return v;
  }
}

template <class T>
T scalarFromJson(const Json& j) {
  if constexpr (is_complex_v<T>) {
    if (j.is_number()) return T(j.get<double>(), 0.0);
    if (!j.is_array() || j.size() != 2) throw InputError("complex scalar must be [re, im]");
    return T(j[0].get<double>(), j[1].get<double>());
  } else {
    if (!j.is_number()) throw InputError("expected a real number");
    return j.get<double>();
  }
}

/// Looks up a required member, with a readable error.
inline const Json& member(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace detail

template <class T>
Json toJson(const PowerLogExpr<T>& e) {
  Json terms = Json::array();
  for (const auto& t : e.terms())
    terms.push_back({{"coeff", detail::scalarToJson(t.coeff)}, {"exponent", t.exponent.toString()},
                     {"logPower", t.logPower}});
  return terms;
}

template <class T>
PowerLogExpr<T> exprFromJson(const Json& j) {
  if (!j.is_array()) throw InputError("term list must be an array");
  std::vector<PowerLogTerm<T>> terms;
  for (const auto& t : j) {
    const int m = detail::member(t, "logPower").get<int>();
    if (m < 0) throw InputError("log power must be non-negative");
    terms.push_back({detail::scalarFromJson<T>(detail::member(t, "coeff")),
                     Rational::parse(detail::member(t, "exponent").get<std::string>()), m});
  }
  return PowerLogExpr<T>(std::move(terms));
}

template <class T>
Json toJson(const Piece<T>& p) {
  return {{"scale", p.scale()}, {"terms", toJson(p.expr())}};
}

template <class T>
Piece<T> pieceFromJson(const Json& j) {
  return Piece<T>(detail::member(j, "scale").get<double>(), exprFromJson<T>(detail::member(j, "terms")));
}

/// Spline artifact: pieces in order head, interior..., tail.
template <class T>
Json toJson(const BeppoLeviSpline<T>& s) {
  Json values = Json::array();
  for (const auto& v : s.values()) values.push_back(detail::scalarToJson(v));
  Json pieces = Json::array();
  for (std::size_t i = 0; i < s.pieceCount(); ++i) pieces.push_back(toJson(s.piece(i)));
  return {{"k", s.k()},
          {"knots", s.knots().vector()},
          {"values", values},
          {"system_residual", s.systemResidual()},
          {"pieces", pieces}};
}

template <class T>
BeppoLeviSpline<T> splineFromJson(const Json& j) {
  const int k = detail::member(j, "k").get<int>();
  KnotSet knots(detail::member(j, "knots").get<std::vector<double>>());
  std::vector<T> values;
  for (const auto& v : detail::member(j, "values")) values.push_back(detail::scalarFromJson<T>(v));
  const auto& pj = detail::member(j, "pieces");
  if (!pj.is_array() || pj.size() != knots.size() + 1)
    throw InputError("spline artifact needs n + 1 pieces");
  std::vector<Piece<T>> interior;
  for (std::size_t i = 1; i + 1 < pj.size(); ++i) interior.push_back(pieceFromJson<T>(pj[i]));
  const double residual = j.contains("system_residual") ? j.at("system_residual").get<double>() : 0.0;
  return BeppoLeviSpline<T>(k, std::move(knots), pieceFromJson<T>(pj.front()), std::move(interior),
                            pieceFromJson<T>(pj.back()), std::move(values), residual);
}

inline Json toJson(const ErrorReport& r) {
  return {{"k", r.k},
          {"n", r.n},
          {"h", r.h},
          {"errLinf0", r.errLinf[0]},
          {"errLinf1", r.errLinf[1]},
          {"errL2_0", r.errL2[0]},
          {"errL2_1", r.errL2[1]},
          {"boundLinf0", r.boundLinf[0]},
          {"boundLinf1", r.boundLinf[1]},
          {"boundL2_0", r.boundL2[0]},
          {"boundL2_1", r.boundL2[1]},
          {"energy", r.energy},
          {"within_bounds", r.withinBounds()}};
}

/// NaN and infinity are not representable in JSON; they become null.
inline Json finiteOrNull(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json toJson(const SurfaceError& e) {
  Json j{{"m", e.m},
         {"measured", e.measured},
         {"bound", finiteOrNull(e.boundRHS)},
         {"bl_norm", finiteOrNull(e.blNorm)},
         {"bound_checked", e.boundChecked},
         {"within_bound", e.withinBound()}};
  if (!e.warning.empty()) j["warning"] = e.warning;
  return j;
}

/// Surface artifact: radii, the k >= 1 mode splines and the zero-mode data.
inline Json toJson(const SurfaceModel& s) {
  Json modes = Json::array();
  for (const auto& spline : s.splines()) modes.push_back(toJson(spline));
  return {{"truncation", s.truncation()},
          {"radii", s.radii().vector()},
          {"modes", modes},
          {"zero_mode",
           {{"strategy", s.zeroMode().name()},
            {"variational", s.zeroMode().variational()},
            {"variant", s.zeroMode().variant()},
            {"values", s.zeroValues()}}}};
}

inline SurfaceModel surfaceFromJson(const Json& j) {
  KnotSet radii(detail::member(j, "radii").get<std::vector<double>>());
  std::vector<BeppoLeviSpline<Complex>> modes;
  for (const auto& m : detail::member(j, "modes")) modes.push_back(splineFromJson<Complex>(m));
  const auto& zero = detail::member(j, "zero_mode");
  const auto values = detail::member(zero, "values").get<std::vector<double>>();
  auto profile = zeroModeStrategy(detail::member(zero, "strategy").get<std::string>())(radii, values);
  for (const auto& m : modes)
    if (!(m.knots() == radii)) throw InputError("surface mode knots differ from the surface radii");
  return SurfaceModel(std::move(radii), std::move(modes), values, std::move(profile));
}

/// Dataset input {"radii": [...], "theta_samples": M, "curves": [[...], ...],
/// "truncation": K}; a missing or negative truncation selects K automatically.
inline TransfiniteDataset datasetFromJson(const Json& j) {
  KnotSet radii(detail::member(j, "radii").get<std::vector<double>>());
  auto curves = detail::member(j, "curves").get<std::vector<std::vector<double>>>();
  if (curves.empty()) throw InputError("dataset has no curves");
  if (j.contains("theta_samples")) {
    const auto m = j.at("theta_samples").get<std::size_t>();
    for (const auto& c : curves)
      if (c.size() != m) throw InputError("curve length differs from theta_samples = " + std::to_string(m));
  }
  const int truncation = j.contains("truncation") ? j.at("truncation").get<int>() : -1;
  return ingest(radii, std::move(curves), truncation);
}

inline Json readJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw InputError("malformed JSON in '" + path + "': " + e.what());
  }
}

inline void writeTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw InputError("failed writing '" + path + "'");
}

inline void writeJsonFile(const std::string& path, const Json& j) { writeTextFile(path, j.dump(2) + "\n"); }

struct RadialSamples {
  std::vector<double> radii;
  std::vector<double> values;
};

/// Reads `r,value` rows; a first line that does not parse as numbers is a header.
inline RadialSamples readRadialCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  RadialSamples out;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto comma = line.find(',');
    double r = 0.0, v = 0.0;
    bool ok = comma != std::string::npos;
    if (ok) {
      try {
        std::size_t p1 = 0, p2 = 0;
        const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
        r = std::stod(a, &p1);
        v = std::stod(b, &p2);
        ok = a.find_first_not_of(" \t", p1) == std::string::npos && b.find_first_not_of(" \t", p2) == std::string::npos;
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (!ok) {
      if (lineNo == 1 && out.radii.empty()) continue;
      throw InputError(path + ":" + std::to_string(lineNo) + ": expected 'r,value'");
    }
    out.radii.push_back(r);
    out.values.push_back(v);
  }
  if (out.radii.empty()) throw InputError("'" + path + "' contains no data rows");
  return out;
}

/// Formats a double with 17 significant digits.
inline std::string formatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace polyspline
