// Acceptance gate for the verification engine.  Each criterion below runs a
// fixed, seeded experiment with tolerances pinned in code and prints exactly
// one PASS/FAIL line.  The process exits 0 only if every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "warpcheck/closed_forms.hpp"
#include "warpcheck/doubly_warped.hpp"
#include "warpcheck/expr.hpp"
#include "warpcheck/geometry.hpp"
#include "warpcheck/map_calculus.hpp"
#include "warpcheck/verify.hpp"

namespace {

using namespace warpcheck;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << std::scientific << v;
  return os.str();
}

double max_abs(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

unsigned full(const std::string& id) { return formula_catalog(id).full_mask(); }

bool verdict_ok(const FieldReport& r) {
  return r.verdict == "match" || r.verdict == "corrected-match";
}

std::vector<Vec> joint_points(const DwpSpace& s, int count, std::uint64_t seed,
                              double fiber_shrink = 1.0) {
  ChartBox box = s.base.chart;
  for (const auto& iv : s.fiber.chart) {
    const double mid = 0.5 * (iv.first + iv.second);
    const double half = 0.5 * (iv.second - iv.first) * fiber_shrink;
    box.emplace_back(mid - half, mid + half);
  }
  return sample_points(box, count, seed);
}

// Criterion 1: the repaired product connection agrees with Christoffel
// symbols of the assembled warped metric on three geometries, 100 points
// each, within 1e-9 and 10 seconds.
Outcome criterion_connection() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (const char* name : {"cfg-a", "cfg-c", "cfg-r22"}) {
    VerifyConfig cfg = builtin_config(name);
    cfg.samples = 100;
    cfg.tol = 1e-9;
    const FieldReport r = run_case(cfg, "connection");
    if (!verdict_ok(r) || r.max_abs_err > 1e-9)
      return {false, std::string(name) + " verdict " + r.verdict + " max abs err " +
                         num(r.max_abs_err)};
    worst = std::max(worst, r.max_abs_err);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > 10.0) return {false, "exceeded 10 s budget: " + num(secs) + " s"};
  return {true, "max abs err " + num(worst) + " over 3 geometries x 100 points"};
}

// Criterion 2: the curvature relation either matches the oracle at 1e-8 or
// the report isolates the failing term; with the fiber warping identically 1
// the transcribed relation itself must match.  30 second budget.
Outcome criterion_curvature() {
  const auto t0 = std::chrono::steady_clock::now();
  bool isolated_somewhere = false;
  for (const std::string& name : builtin_config_names()) {
    VerifyConfig cfg = builtin_config(name);
    cfg.samples = 60;
    cfg.tol = 1e-8;
    const FieldReport r = run_case(cfg, "curvature");
    if (!verdict_ok(r)) return {false, name + ": verdict " + r.verdict};
    if (r.verdict == "corrected-match") {
      if (r.ledger.empty() || r.ledger.front().term.empty())
        return {false, name + ": correction accepted but not recorded"};
      isolated_somewhere = true;
    }
  }
  for (const char* name : {"cfg-c", "cfg-swap"}) {  // fiber warping == 1
    VerifyConfig cfg = builtin_config(name);
    cfg.samples = 60;
    cfg.tol = 1e-8;
    cfg.printed_forms_only = true;
    const FieldReport r = run_case(cfg, "curvature");
    if (r.verdict != "match")
      return {false, std::string(name) + ": transcribed relation verdict " + r.verdict +
                         " max abs err " + num(r.max_abs_err)};
  }
  if (!isolated_somewhere)
    return {false, "no configuration exercised the recorded correction"};
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > 30.0) return {false, "exceeded 30 s budget: " + num(secs) + " s"};
  return {true, "oracle matched on all 6 configs; single-warping reduction exact as transcribed"};
}

// Criterion 3: inclusion tension and bitension closed forms match the
// generic-pipeline oracle at 1e-6 on three configurations, 100 points per
// case, with the Laplacian-coefficient repair recorded.  60 second budget.
Outcome criterion_inclusion_fields() {
  const auto t0 = std::chrono::steady_clock::now();
  bool laplacian_repair_recorded = false;
  double worst = 0.0;
  for (const char* name : {"cfg-a", "cfg-b", "cfg-swap"}) {
    for (const char* id : {"inclusion-b", "inclusion-f"}) {
      VerifyConfig cfg = builtin_config(name);
      cfg.samples = 100;
      cfg.tol = 1e-6;
      const FieldReport r = run_case(cfg, id);
      if (!verdict_ok(r))
        return {false, std::string(name) + "/" + id + ": verdict " + r.verdict +
                           " max abs err " + num(r.max_abs_err)};
      worst = std::max(worst, r.max_abs_err);
      for (const LedgerEntry& e : r.ledger)
        if (e.term == "Laplacian term") laplacian_repair_recorded = true;
    }
  }
  if (!laplacian_repair_recorded)
    return {false, "Laplacian-coefficient repair never appeared in a ledger"};
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > 60.0) return {false, "exceeded 60 s budget: " + num(secs) + " s"};
  return {true, "max abs err " + num(worst) + "; Laplacian-coefficient repair recorded"};
}

// Criterion 4: on the flat-base configuration the inclusion at level 0 is
// visibly tense yet second-order quiet, while level 0.5 is not.
Outcome criterion_flat_base_levels() {
  const DwpSpace s = space_from_config(builtin_config("cfg-b"));
  const BiharmonicClass at0 = classify_inclusion(s, FactorSide::base, {0.0}, 1e-6);
  if (at0.verdict != BiharmonicVerdict::proper_biharmonic)
    return {false, std::string("level 0 classified ") + to_string(at0.verdict)};
  if (at0.tension_norm < 0.4)
    return {false, "level 0 tension norm " + num(at0.tension_norm) + " < 0.4"};
  if (at0.bitension_norm > 1e-8)
    return {false, "level 0 bitension norm " + num(at0.bitension_norm) + " > 1e-8"};
  const BiharmonicClass at05 = classify_inclusion(s, FactorSide::base, {0.5}, 1e-6);
  if (at05.bitension_norm < 1e-3)
    return {false, "level 0.5 bitension norm " + num(at05.bitension_norm) + " < 1e-3"};
  if (at05.verdict != BiharmonicVerdict::not_biharmonic)
    return {false, std::string("level 0.5 classified ") + to_string(at05.verdict)};
  return {true, "level 0: |tau| " + num(at0.tension_norm) + ", |tau2| " +
                    num(at0.bitension_norm) + "; level 0.5: |tau2| " +
                    num(at05.bitension_norm)};
}

// Criterion 5: with the base warping constant and the squared fiber warping
// linear, every sampled inclusion level is properly biharmonic.
Outcome criterion_linear_warping_family() {
  const MetricPatch base = euclidean_patch("line", 1, {{-1.0, 1.0}}, "x");
  const MetricPatch fiber = euclidean_patch("ray", 1, {{1.0, 3.0}}, "y");
  const DwpSpace s = make_dwp("linear-square", base, fiber, parse("1", {"x1"}),
                              parse("y1", {"y1"}));
  std::mt19937_64 rng(5u);
  std::uniform_real_distribution<double> dist(1.05, 2.95);
  for (int k = 0; k < 50; ++k) {
    const double y0 = dist(rng);
    const BiharmonicClass c = classify_inclusion(s, FactorSide::base, {y0}, 1e-6, 15);
    if (c.verdict != BiharmonicVerdict::proper_biharmonic)
      return {false, "level " + num(y0) + " classified " + to_string(c.verdict) +
                         " (|tau| " + num(c.tension_norm) + ", |tau2| " +
                         num(c.bitension_norm) + ")"};
  }
  return {true, "50/50 sampled levels properly biharmonic"};
}

// Criterion 6: across 20 seeded pairs of nonconstant warpings drawn from a
// four-function family, no inclusion of either factor is properly
// biharmonic.
Outcome criterion_no_proper_pairs() {
  const auto family = [](int which, double a, const std::string& v) -> std::string {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3);
    switch (which) {
      case 0: os << "exp(" << 2.0 * a << "*" << v << ")"; break;
      case 1: os << "(2+sin(" << a << "*" << v << "))^2"; break;
      case 2: os << "(1+" << v << "^2)^2"; break;
      default: os << "(2+" << v << ")^2"; break;
    }
    return os.str();
  };
  std::mt19937_64 rng(20260813u);
  std::uniform_int_distribution<int> pick(0, 3);
  std::uniform_real_distribution<double> amp(0.5, 1.5);
  int proper = 0, indeterminate = 0;
  for (int k = 0; k < 20; ++k) {
    const std::string b2 = family(pick(rng), amp(rng), "x1");
    const std::string f2 = family(pick(rng), amp(rng), "y1");
    const MetricPatch base = euclidean_patch("b", 1, {{-1.0, 1.0}}, "x");
    const MetricPatch fiber = euclidean_patch("f", 1, {{-1.0, 1.0}}, "y");
    const DwpSpace s = make_dwp("pair", base, fiber, parse(b2, {"x1"}), parse(f2, {"y1"}));
    for (const FactorSide side : {FactorSide::base, FactorSide::fiber}) {
      for (const double level : {-0.4, 0.3}) {
        const BiharmonicClass c = classify_inclusion(s, side, {level}, 1e-6, 12);
        if (c.verdict == BiharmonicVerdict::proper_biharmonic) {
          ++proper;
          return {false, "pair b2=" + b2 + " f2=" + f2 + " level " + num(level) +
                             " classified proper_biharmonic"};
        }
        if (c.verdict == BiharmonicVerdict::indeterminate) ++indeterminate;
      }
    }
  }
  std::ostringstream os;
  os << "0 proper among 20 pairs x 2 sides x 2 levels (" << indeterminate
     << " indeterminate)";
  return {proper == 0, os.str()};
}

// Criterion 7: the product-map bitension decomposes into the projection slot
// and the operator slot, matching the generic-pipeline oracle: identity map
// at 1e-6, a doubled fiber map at 1e-6, and the mirror identity at 1e-9.
Outcome criterion_product_decomposition() {
  const DwpSpace s = space_from_config(builtin_config("cfg-a"));
  const unsigned tau_m = full("product-domain-tension");
  const unsigned proj_m = full("projection-base-bitension");
  const unsigned op_m = full("product-domain-operator");

  double worst_id = 0.0;
  {
    const SmoothMap id = identity_map(s.fiber);
    const SmoothMap psi = product_map_domain_warped(s, FactorSide::fiber, id);
    for (const Vec& p : joint_points(s, 30, 71u)) {
      const ProductDomainFields fld = product_domain_warped(s, id, p, tau_m, proj_m, op_m);
      const Vec oracle = bitension_oracle(psi, p);
      Vec diff = join_vector(fld.bitension);
      for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= oracle[i];
      worst_id = std::max(worst_id, max_abs(diff));
      Vec proj = projection_bitension(s, FactorSide::base, p, proj_m);
      for (std::size_t i = 0; i < proj.size(); ++i)
        worst_id = std::max(worst_id, std::abs(proj[i] - fld.bitension.base[i]));
    }
    if (worst_id > 1e-6) return {false, "identity fiber map err " + num(worst_id)};
  }

  double worst_two = 0.0;
  {
    const SmoothMap twice =
        make_map("doubled", s.fiber, s.fiber, {parse("2*y1", {"y1"})});
    const SmoothMap psi = product_map_domain_warped(s, FactorSide::fiber, twice);
    for (const Vec& p : joint_points(s, 30, 72u, 0.45)) {
      const ProductDomainFields fld =
          product_domain_warped(s, twice, p, tau_m, proj_m, op_m);
      const Vec oracle = bitension_oracle(psi, p);
      Vec diff = join_vector(fld.bitension);
      for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= oracle[i];
      Vec tdiff = join_vector(fld.tension);
      const Vec toracle = tension(psi, p);
      for (std::size_t i = 0; i < tdiff.size(); ++i) tdiff[i] -= toracle[i];
      worst_two = std::max({worst_two, max_abs(diff), max_abs(tdiff)});
    }
    if (worst_two > 1e-6) return {false, "doubled fiber map err " + num(worst_two)};
  }

  double worst_mirror = 0.0;
  {
    const SmoothMap id = identity_map(s.base);
    const SmoothMap psi = product_map_domain_warped(s, FactorSide::base, id);
    const unsigned mtau = full("product-domain-mirror-tension");
    const unsigned mproj = full("projection-fiber-bitension");
    const unsigned mop = full("product-domain-mirror-operator");
    for (const Vec& p : joint_points(s, 30, 73u)) {
      const ProductDomainFields fld = product_domain_warped_mirror(s, id, p, mtau, mproj, mop);
      const Vec oracle = bitension_oracle(psi, p);
      Vec diff = join_vector(fld.bitension);
      for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= oracle[i];
      const Vec pb = projection_bitension(s, FactorSide::base, p, proj_m);
      const Vec pf = projection_bitension(s, FactorSide::fiber, p, mproj);
      for (std::size_t i = 0; i < pb.size(); ++i)
        diff.push_back(pb[i] - fld.bitension.base[i]);
      for (std::size_t j = 0; j < pf.size(); ++j)
        diff.push_back(pf[j] - fld.bitension.fiber[j]);
      worst_mirror = std::max(worst_mirror, max_abs(diff));
    }
    if (worst_mirror > 1e-9) return {false, "mirror identity err " + num(worst_mirror)};
  }
  return {true, "errs: identity " + num(worst_id) + ", doubled " + num(worst_two) +
                    ", mirror " + num(worst_mirror)};
}

// Criterion 8: the codomain-warped biharmonicity conditions vanish, under at
// least one documented reading of each ambiguous term, on configurations the
// oracle certifies as biharmonic; failing readings are reported.
Outcome criterion_codomain_conditions() {
  const double tol = 1e-8;
  std::vector<std::string> reading_failures;

  const auto check_config = [&](const DwpSpace& s, const SmoothMap& phi,
                                const std::vector<Vec>& pts, const std::string& label,
                                std::string* err) -> bool {
    for (const Vec& p : pts) {
      const CodomainConditions c = codomain_warped_conditions(s, phi, p);
      const double oracle =
          std::max(max_abs(c.oracle_bitension.base), max_abs(c.oracle_bitension.fiber));
      if (oracle > tol) {
        *err = label + ": oracle bitension " + num(oracle) + " not zero";
        return false;
      }
      const double base_r[2] = {max_abs(c.base_condition_compose),
                                max_abs(c.base_condition_pullback)};
      const double fiber_r[2] = {max_abs(c.fiber_condition_compose),
                                 max_abs(c.fiber_condition_pullback)};
      bool any_combo = false;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          if (base_r[i] <= tol && fiber_r[j] <= tol) {
            any_combo = true;
          } else {
            reading_failures.push_back(label + " reading (" +
                                       (i ? "pullback" : "compose") + "," +
                                       (j ? "pullback" : "compose") + ") residual " +
                                       num(std::max(base_r[i], fiber_r[j])));
          }
        }
      if (!any_combo) {
        *err = label + ": no documented reading vanishes";
        return false;
      }
    }
    return true;
  };

  std::string err;
  {
    const MetricPatch base = euclidean_patch("b", 1, {{-1.0, 1.0}}, "x");
    const MetricPatch fiber = euclidean_patch("f", 1, {{-1.0, 1.0}}, "y");
    const DwpSpace flat =
        make_dwp("flat", base, fiber, parse("1", {"x1"}), parse("1", {"y1"}));
    if (!check_config(flat, identity_map(flat.fiber), joint_points(flat, 20, 81u),
                      "constant warpings / identity", &err))
      return {false, err};
    const SmoothMap twice =
        make_map("doubled", flat.fiber, flat.fiber, {parse("2*y1", {"y1"})});
    if (!check_config(flat, twice, joint_points(flat, 20, 82u, 0.45),
                      "constant warpings / doubled fiber map", &err))
      return {false, err};
  }

  int certified = 0;
  std::mt19937_64 rng(83u);
  std::uniform_real_distribution<double> adist(0.0, 2.0);
  for (int k = 0; k < 4; ++k) {
    const double a = adist(rng);
    std::ostringstream b2;
    b2 << std::fixed << std::setprecision(3) << "exp(" << 2.0 * a << "*x1)";
    const MetricPatch base = euclidean_patch("b", 1, {{-1.0, 1.0}}, "x");
    const MetricPatch fiber = euclidean_patch("f", 1, {{-1.0, 1.0}}, "y");
    const DwpSpace s =
        make_dwp("swept", base, fiber, parse(b2.str(), {"x1"}), parse("1", {"y1"}));
    const SmoothMap constmap =
        make_map("const", s.fiber, s.fiber, {parse("0.2", {"y1"})});
    if (!check_config(s, constmap, joint_points(s, 12, 84u + static_cast<unsigned>(k)),
                      "exponential base sweep a=" + num(a), &err))
      return {false, err};
    ++certified;
  }
  if (certified == 0) return {false, "sweep produced no oracle-certified configuration"};

  std::ostringstream os;
  os << "conditions vanish on 2 constant-warping configs and " << certified
     << " swept exponential configs";
  if (!reading_failures.empty())
    os << "; " << reading_failures.size() << " reading failures recorded, first: "
       << reading_failures.front();
  return {true, os.str()};
}

// Criterion 9: a portfolio of ten harmonic maps has second-order tension
// below 1e-9 at 100 seeded points each.
Outcome criterion_harmonic_portfolio() {
  std::vector<SmoothMap> maps;

  const MetricPatch line = euclidean_patch("line", 1, {{-1.0, 1.0}}, "x");
  const MetricPatch plane = euclidean_patch("plane", 2, {{-1.0, 1.0}, {-1.0, 1.0}}, "x");
  const std::vector<std::string> uc{"u1", "u2"};
  const MetricPatch cap = make_patch("cap", {{0.3, 2.8}, {-3.0, 3.0}}, uc,
                                     {parse("1", uc), parse("0", uc), parse("0", uc),
                                      parse("sin(u1)^2", uc)});
  const MetricPatch tline = euclidean_patch("tline", 1, {{-1.0, 1.0}}, "t");

  maps.push_back(identity_map(line));
  maps.push_back(make_map("affine", line, line, {parse("0.5*x1+0.2", {"x1"})}));
  maps.push_back(make_map("const-drop", plane, line, {parse("0.3", {"x1", "x2"})}));
  maps.push_back(make_map("linear-plane", plane, plane,
                          {parse("0.3*x1-0.2*x2", {"x1", "x2"}),
                           parse("0.1*x1+0.5*x2", {"x1", "x2"})}));
  {
    const MetricPatch b = euclidean_patch("pb", 1, {{-1.0, 1.0}}, "x");
    const MetricPatch f = euclidean_patch("pf", 1, {{-1.0, 1.0}}, "y");
    const DwpSpace plain = make_dwp("plain", b, f, parse("1", {"x1"}), parse("1", {"y1"}));
    maps.push_back(projection_map(plain, FactorSide::base));
    const DwpSpace fwarp =
        make_dwp("fwarp", b, f, parse("1", {"x1"}), parse("2+sin(y1)", {"y1"}));
    maps.push_back(projection_map(fwarp, FactorSide::base));
    const DwpSpace bwarp =
        make_dwp("bwarp", b, f, parse("exp(2*x1)", {"x1"}), parse("1", {"y1"}));
    maps.push_back(inclusion_map(bwarp, FactorSide::base, {0.2}));
  }
  maps.push_back(identity_map(cap));
  maps.push_back(make_map("cap-drop", cap, line, {parse("0.1", {"u1", "u2"})}));
  maps.push_back(make_map("meridian", tline, cap,
                          {parse("t1+1.5", {"t1"}), parse("0.5", {"t1"})}));

  double worst = 0.0;
  std::uint64_t seed = 90u;
  for (const SmoothMap& f : maps) {
    const std::vector<Vec> pts = sample_points(f.source.chart, 100, seed++);
    double here = 0.0;
    for (const Vec& p : pts) here = std::max(here, max_abs(bitension_oracle(f, p)));
    if (here > 1e-9)
      return {false, f.name + ": max |tau2| " + num(here) + " > 1e-9"};
    worst = std::max(worst, here);
  }
  return {true, "10 maps x 100 points, max |tau2| " + num(worst)};
}

// Criterion 10: two end-to-end CLI runs with the same seed produce reports
// that are byte-identical once the timestamp line is removed.
Outcome criterion_deterministic_reports() {
  const char* env = std::getenv("WARPCHECK_BIN");
  const std::string bin = env != nullptr ? env : "./warpcheck";
  const std::string r1 = "/tmp/warpcheck_acceptance_run1.json";
  const std::string r2 = "/tmp/warpcheck_acceptance_run2.json";
  const auto run = [&](const std::string& out) {
    const std::string cmd = bin +
                            " verify --config cfg-a --case all --seed 42 --format json "
                            "--report " +
                            out + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  if (run(r1) != 0) return {false, "first CLI run failed (binary: " + bin + ")"};
  if (run(r2) != 0) return {false, "second CLI run failed"};
  const auto strip = [](const std::string& path) {
    std::ifstream in(path);
    std::ostringstream kept;
    std::string linebuf;
    while (std::getline(in, linebuf))
      if (linebuf.find("generated_at") == std::string::npos) kept << linebuf << '\n';
    return kept.str();
  };
  const std::string a = strip(r1), b = strip(r2);
  std::remove(r1.c_str());
  std::remove(r2.c_str());
  if (a.empty()) return {false, "report file was empty"};
  if (a != b) return {false, "reports differ beyond the timestamp"};
  return {true, "reports byte-identical after dropping the timestamp line"};
}

}  // namespace

int main() {
  struct Row {
    const char* label;
    std::function<Outcome()> fn;
  };
  const std::vector<Row> rows = {
      {"repaired product connection matches the Christoffel oracle", criterion_connection},
      {"curvature relation matches or isolates its failing term", criterion_curvature},
      {"inclusion tension/bitension closed forms match the oracle", criterion_inclusion_fields},
      {"flat-base inclusion levels classify as computed", criterion_flat_base_levels},
      {"linear squared warping is properly biharmonic at every level", criterion_linear_warping_family},
      {"no proper biharmonic inclusion among doubly nonconstant warpings", criterion_no_proper_pairs},
      {"product-map bitension decomposes into projection and operator slots", criterion_product_decomposition},
      {"codomain-warped conditions vanish on oracle-certified configs", criterion_codomain_conditions},
      {"harmonic-map portfolio has vanishing second-order tension", criterion_harmonic_portfolio},
      {"seeded verification runs are byte-identical up to timestamp", criterion_deterministic_reports},
  };
  bool all = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = rows[i].fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream line;
    line << "[" << std::setw(2) << (i + 1) << "/10] " << (o.pass ? "PASS" : "FAIL") << "  "
         << rows[i].label << " — " << o.detail << " (" << std::fixed
         << std::setprecision(2) << secs << " s)";
    std::cout << line.str() << std::endl;
    all = all && o.pass;
  }
  std::cout << (all ? "acceptance: all 10 criteria passed" : "acceptance: FAILURES present")
            << std::endl;
  return all ? 0 : 1;
}
