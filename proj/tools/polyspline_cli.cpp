// polyspline: batch commands for Beppo Levi L_k-splines and transfinite
// polyspline surfaces.
//
//   interp    CSV r,value  -> spline artifact (JSON) + dense samples (CSV)
//   eval      spline artifact -> values / derivatives at given radii
//   energy    spline artifact -> closed-form energy with a quadrature cross-check
//   verify    spline artifact or random instances -> verification report
//   converge  built-in datum on refined uniform knots -> error reports
//   surface   dataset JSON (or --study) -> surface artifact + mesh / study report
//   mesh      surface artifact -> mesh CSV
//
// Exit codes: 0 success, 2 input error, 3 numerical failure, 4 verification failure.

#include <CLI11.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "polyspline/analysis.hpp"
#include "polyspline/instances.hpp"
#include "polyspline/io.hpp"
#include "polyspline/spline.hpp"
#include "polyspline/surface.hpp"
#include "polyspline/verify.hpp"

namespace ps = polyspline;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitVerification = 4;

struct RunConfig {
  std::string command;
  std::string input;
  std::string output;
  std::optional<int> k;
  double tol = 1e-6;
  int quadOrder = 32;
  int truncation = -1;
  std::uint64_t seed = 1;
  int levels = 4;
  // Command-specific settings.
  std::vector<double> at;
  int deriv = 0;
  int samples = 401;
  int instances = 5;
  std::string datum = "powexp";
  bool study = false;
  std::string mesh;
  int meshR = 33;
  int meshTheta = 64;
  double rMax = 0.0;
};

void validate(const RunConfig& c) {
  if (!(c.tol > 0.0)) throw ps::InputError("--tol must be positive");
  if (c.quadOrder < 2 || c.quadOrder > 256) throw ps::InputError("--quad-order must be in [2, 256]");
  if (c.k && *c.k == 0) throw ps::UnsupportedFrequency("--k must be non-zero");
  if (c.levels < 1 || c.levels > 12) throw ps::InputError("--levels must be in [1, 12]");
  if (c.deriv < 0 || c.deriv > 2) throw ps::InputError("--deriv must be 0, 1 or 2");
}

ps::Json header(const RunConfig& c) {
  return {{"schema_version", ps::kSchemaVersion}, {"command", c.command}, {"seed", c.seed}};
}

void emit(const RunConfig& c, const ps::Json& doc) {
  if (c.output.empty() || c.output == "-")
    std::cout << doc.dump(2) << "\n";
  else
    ps::writeJsonFile(c.output, doc);
}

int requireK(const RunConfig& c) {
  if (!c.k) throw ps::InputError("--k is required for '" + c.command + "'");
  return *c.k;
}

std::string requireInput(const RunConfig& c) {
  if (c.input.empty()) throw ps::InputError("--input is required for '" + c.command + "'");
  return c.input;
}

ps::Json checksToJson(const std::vector<ps::Check>& checks) {
  ps::Json out = ps::Json::array();
  for (const auto& ch : checks) {
    ps::Json j{{"name", ch.name}, {"value", ps::finiteOrNull(ch.value)}, {"tolerance", ch.tolerance},
               {"pass", ch.pass}};
    if (ch.skipped) j["skipped"] = true;
    if (!ch.note.empty()) j["note"] = ch.note;
    out.push_back(j);
  }
  return out;
}

/// Spline artifacts from `interp` are real; complex ones come from surfaces.
bool isComplexArtifact(const ps::Json& spline) {
  for (const auto& p : spline.at("pieces"))
    for (const auto& t : p.at("terms"))
      if (t.at("coeff").is_array()) return true;
  return false;
}

const ps::Json& splineSection(const ps::Json& doc) { return doc.contains("spline") ? doc.at("spline") : doc; }

// ---------------------------------------------------------------------------

int runInterp(const RunConfig& c) {
  const int k = requireK(c);
  const auto data = ps::readRadialCsv(requireInput(c));
  const ps::KnotSet knots(data.radii);
  const auto s = ps::buildInterpolant<double>(k, knots, data.values, c.tol);
  const auto [head, tail] = ps::endConditionResiduals(s);

  auto doc = header(c);
  doc["spline"] = ps::toJson(s);
  doc["diagnostics"] = {{"end_condition_head", head},
                        {"end_condition_tail", tail},
                        {"continuity_defect", ps::continuityDefect(s)},
                        {"interpolation_defect", ps::interpolationDefect(s)}};
  emit(c, doc);

  if (!c.output.empty() && c.output != "-") {
    std::string csv = "r,value,d1,d2\n";
    const double upper = 2.0 * knots.back();
    const int n = std::max(2, c.samples);
    for (int i = 0; i < n; ++i) {
      const double r = upper * i / (n - 1);
      const auto j = s.jet(r);
      csv += ps::formatDouble(r) + "," + ps::formatDouble(j.value) + "," + ps::formatDouble(j.d1) + "," +
             ps::formatDouble(j.d2) + "\n";
    }
    ps::writeTextFile(c.output + ".samples.csv", csv);
  }
  return kExitOk;
}

template <class T>
ps::Json evalPoints(const ps::Json& spline, const RunConfig& c) {
  const auto s = ps::splineFromJson<T>(spline);
  ps::Json points = ps::Json::array();
  for (double r : c.at)
    points.push_back({{"r", r}, {"value", ps::detail::scalarToJson(ps::evaluate(s, r, c.deriv))}});
  return points;
}

int runEval(const RunConfig& c) {
  const auto doc = ps::readJsonFile(requireInput(c));
  const auto& spline = splineSection(doc);
  if (c.at.empty()) throw ps::InputError("--at requires at least one radius");
  auto out = header(c);
  out["k"] = spline.at("k");
  out["deriv"] = c.deriv;
  out["points"] = isComplexArtifact(spline) ? evalPoints<ps::Complex>(spline, c) : evalPoints<double>(spline, c);
  emit(c, out);
  return kExitOk;
}

template <class T>
ps::Json energyReport(const ps::Json& spline, const RunConfig& c) {
  const auto s = ps::splineFromJson<T>(spline);
  const auto exact = ps::energy(s);
  const ps::JetFunction<T> f = [&](double r) { return s.jet(r); };
  const auto bp = s.breakpoints();
  const auto quad = ps::energyQuadrature<T>(s.k(), f, bp, {.order = c.quadOrder, .panels = 4});
  const double rel = exact.value > 0.0 ? std::abs(quad.value - exact.value) / exact.value : std::abs(quad.value);
  return {{"k", s.k()},           {"energy", exact.value},    {"norm", exact.norm()},
          {"is_seminorm", exact.isSeminorm}, {"quadrature", quad.value}, {"relative_difference", rel}};
}

int runEnergy(const RunConfig& c) {
  const auto doc = ps::readJsonFile(requireInput(c));
  const auto& spline = splineSection(doc);
  auto out = header(c);
  out["result"] = isComplexArtifact(spline) ? energyReport<ps::Complex>(spline, c) : energyReport<double>(spline, c);
  emit(c, out);
  return kExitOk;
}

int runVerify(const RunConfig& c) {
  ps::Rng rng(c.seed);
  ps::VerifyTolerances tol;
  tol.variational = c.tol;
  auto out = header(c);
  ps::Json instances = ps::Json::array();
  bool pass = true;

  auto record = [&](const ps::BeppoLeviSpline<double>& s) {
    const auto checks = ps::verifySpline(s, rng, tol, c.quadOrder);
    pass = pass && ps::allPass(checks);
    instances.push_back({{"k", s.k()}, {"knots", s.knots().vector()}, {"checks", checksToJson(checks)},
                         {"pass", ps::allPass(checks)}});
  };

  if (!c.input.empty()) {
    const auto doc = ps::readJsonFile(c.input);
    const auto& spline = splineSection(doc);
    if (isComplexArtifact(spline)) throw ps::InputError("verify expects a real spline artifact");
    record(ps::splineFromJson<double>(spline));
  } else {
    if (c.instances < 1) throw ps::InputError("--instances must be positive");
    for (int i = 0; i < c.instances; ++i) {
      const int k = c.k ? *c.k : ps::randomFrequency(rng, 1, 8);
      const auto n = static_cast<std::size_t>(rng.integer(2, 8));
      const auto knots = ps::randomKnots(rng, n, rng.uniform(0.5, 1.5), rng.uniform(2.0, 4.0));
      std::vector<double> values(n);
      for (auto& v : values) v = rng.uniform(-1.0, 1.0);
      record(ps::buildInterpolant<double>(k, knots, values));
    }
  }
  out["tolerance"] = c.tol;
  out["instances"] = instances;
  out["pass"] = pass;
  emit(c, out);
  return pass ? kExitOk : kExitVerification;
}

int runConverge(const RunConfig& c) {
  const int k = c.k ? *c.k : 2;
  const auto g = ps::builtinDatum(c.datum, k);
  std::vector<ps::KnotSet> family;
  for (int l = 0; l < c.levels; ++l) family.push_back(ps::KnotSet::uniform(1.0, 2.0, (std::size_t{4} << l) + 1));
  ps::ErrorStudyOptions opt;
  opt.quadOrder = c.quadOrder;
  const auto study = ps::errorStudy(k, g, family, opt);

  auto out = header(c);
  out["k"] = k;
  out["datum"] = c.datum;
  ps::Json reports = ps::Json::array();
  bool within = true;
  for (const auto& r : study.reports) {
    reports.push_back(ps::toJson(r));
    within = within && r.withinBounds();
  }
  out["reports"] = reports;
  out["slopes"] = {{"L2_0", ps::finiteOrNull(study.slopeL2[0])},
                   {"L2_1", ps::finiteOrNull(study.slopeL2[1])},
                   {"Linf_0", ps::finiteOrNull(study.slopeLinf[0])},
                   {"Linf_1", ps::finiteOrNull(study.slopeLinf[1])}};
  out["within_bounds"] = within;
  emit(c, out);
  return within ? kExitOk : kExitVerification;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

std::vector<double> thetaGrid(int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = -std::numbers::pi + 2.0 * std::numbers::pi * i / n;
  return v;
}

void writeMesh(const RunConfig& c, const ps::SurfaceModel& s, const std::string& path) {
  if (c.meshR < 1 || c.meshTheta < 1) throw ps::InputError("mesh grids must be nonempty");
  const double rMax = c.rMax > 0.0 ? c.rMax : 1.5 * s.radii().back();
  ps::exportMesh(s, linspace(0.0, rMax, c.meshR), thetaGrid(c.meshTheta), path);
}

int runSurfaceStudy(const RunConfig& c) {
  const auto f = ps::manufacturedSurface();
  auto out = header(c);
  ps::Json levels = ps::Json::array();
  bool within = true;
  std::vector<double> hs, err0;
  for (int l = 0; l < c.levels; ++l) {
    const auto radii = ps::KnotSet::uniform(1.0, 2.0, (std::size_t{4} << l) + 1);
    const int samples = 32;
    const auto d = ps::ingest(radii, ps::sampleCurves(f, radii, samples), c.truncation >= 0 ? c.truncation : 3);
    const auto s = ps::buildSurface(d);
    ps::Json errors = ps::Json::array();
    for (int m = 0; m < 2; ++m) {
      const auto e = ps::surfaceErrorL2(s, f, m);
      within = within && e.withinBound();
      errors.push_back(ps::toJson(e));
      if (m == 0) {
        hs.push_back(radii.meshSize());
        err0.push_back(e.measured);
      }
    }
    const double closed = ps::plancherelEnergy(s);
    const double polar = ps::polarEnergy(s);
    levels.push_back({{"n", radii.size()},
                      {"h", radii.meshSize()},
                      {"truncation", d.truncation},
                      {"errors", errors},
                      {"plancherel_energy", closed},
                      {"polar_energy", polar},
                      {"energy_relative_difference", std::abs(closed - polar) / std::max(closed, 1e-300)}});
  }
  out["reference"] = "modes 1..3, f_k(r) = c_k r^k e^{-r}, zero mean";
  out["levels"] = levels;
  out["slope_L2_0"] = ps::finiteOrNull(ps::logLogSlope(hs, err0));
  out["within_bounds"] = within;
  emit(c, out);
  return within ? kExitOk : kExitVerification;
}

int runSurface(const RunConfig& c) {
  if (c.study) return runSurfaceStudy(c);
  auto doc = ps::readJsonFile(requireInput(c));
  if (c.truncation >= 0) doc["truncation"] = c.truncation;
  const auto d = ps::datasetFromJson(doc);
  const auto s = ps::buildSurface(d);

  double reproduction = 0.0, scale = 0.0;
  for (std::size_t j = 0; j < d.radii.size(); ++j)
    for (int i = 0; i < d.samples; ++i) {
      const double v = d.curves[j][static_cast<std::size_t>(i)];
      reproduction = std::max(reproduction, std::abs(s(d.radii[j], d.theta(i)) - v));
      scale = std::max(scale, std::abs(v));
    }

  auto out = header(c);
  out["surface"] = ps::toJson(s);
  out["diagnostics"] = {{"wiener_sums", d.wienerSums},
                        {"out_of_band", d.outOfBand},
                        {"leakage", d.leakage},
                        {"max_sample_deviation", reproduction},
                        {"plancherel_energy", ps::plancherelEnergy(s)},
                        {"zero_mode_note", "k = 0 mode uses the natural-cubic radial interpolant; it is not the "
                                           "variational k = 0 spline"}};
  emit(c, out);
  if (!c.mesh.empty()) writeMesh(c, s, c.mesh);
  return kExitOk;
}

int runMesh(const RunConfig& c) {
  const auto doc = ps::readJsonFile(requireInput(c));
  const auto s = ps::surfaceFromJson(doc.contains("surface") ? doc.at("surface") : doc);
  if (c.output.empty()) throw ps::InputError("--output is required for 'mesh'");
  writeMesh(c, s, c.output);
  return kExitOk;
}

int dispatch(const RunConfig& c) {
  validate(c);
  if (c.command == "interp") return runInterp(c);
  if (c.command == "eval") return runEval(c);
  if (c.command == "energy") return runEnergy(c);
  if (c.command == "verify") return runVerify(c);
  if (c.command == "converge") return runConverge(c);
  if (c.command == "surface") return runSurface(c);
  if (c.command == "mesh") return runMesh(c);
  throw ps::InputError("unknown command '" + c.command + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Beppo Levi L_k-splines and transfinite polyspline surfaces"};
  app.require_subcommand(1);
  RunConfig cfg;
  int k = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--input,-i", cfg.input, "Input file");
    sub->add_option("--output,-o", cfg.output, "Output file (default: stdout)");
    sub->add_option("--k", k, "Frequency k != 0");
    sub->add_option("--tol", cfg.tol, "Tolerance (construction residual / verification defect)");
    sub->add_option("--quad-order", cfg.quadOrder, "Gauss-Legendre order");
    sub->add_option("--truncation", cfg.truncation, "Fourier truncation K (negative: automatic)");
    sub->add_option("--seed", cfg.seed, "Seed for randomized suites");
    sub->add_option("--levels", cfg.levels, "Refinement levels");
  };

  auto* interp = app.add_subcommand("interp", "Interpolate r,value data");
  common(interp);
  interp->add_option("--samples", cfg.samples, "Rows of the dense sample CSV");
  auto* eval = app.add_subcommand("eval", "Evaluate a spline artifact");
  common(eval);
  eval->add_option("--at", cfg.at, "Radii")->expected(1, -1);
  eval->add_option("--deriv", cfg.deriv, "Derivative order 0, 1 or 2");
  auto* energy = app.add_subcommand("energy", "Energy of a spline artifact");
  common(energy);
  auto* verify = app.add_subcommand("verify", "Verification suite");
  common(verify);
  verify->add_option("--instances", cfg.instances, "Random instances when no input is given");
  auto* converge = app.add_subcommand("converge", "Convergence study on uniform knots in [1, 2]");
  common(converge);
  converge->add_option("--datum", cfg.datum, "Built-in datum: powexp, zero");
  auto* surface = app.add_subcommand("surface", "Transfinite surface from curves on circles");
  common(surface);
  surface->add_flag("--study", cfg.study, "Run the manufactured-surface error study");
  surface->add_option("--mesh", cfg.mesh, "Also write a mesh CSV");
  surface->add_option("--mesh-r", cfg.meshR, "Radial mesh points");
  surface->add_option("--mesh-theta", cfg.meshTheta, "Angular mesh points");
  surface->add_option("--r-max", cfg.rMax, "Outer mesh radius (default 1.5 r_n)");
  auto* mesh = app.add_subcommand("mesh", "Mesh CSV from a surface artifact");
  common(mesh);
  mesh->add_option("--mesh-r", cfg.meshR, "Radial mesh points");
  mesh->add_option("--mesh-theta", cfg.meshTheta, "Angular mesh points");
  mesh->add_option("--r-max", cfg.rMax, "Outer mesh radius (default 1.5 r_n)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (app.get_subcommands().front()->count("--k") > 0) cfg.k = k;

  try {
    return dispatch(cfg);
  } catch (const ps::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ps::DivergenceError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ps::ConstructionError& e) {
    std::cerr << "numerical failure: " << e.what() << " (residual " << e.residual() << ")\n";
    return kExitNumerical;
  } catch (const ps::Json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}
