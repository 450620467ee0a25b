#include "warpcheck/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <nlohmann/json.hpp>

#include "warpcheck/rng.hpp"

namespace warpcheck {
namespace {

using ordered_json = nlohmann::ordered_json;

// Error value recorded when a form cannot be evaluated at all (for example a
// transcribed form that requires equal factor dimensions). Finite so that it
// survives JSON round trips.
constexpr double kUnevaluable = 9e99;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

double max_abs(const Vec& v) {
  double e = 0.0;
  for (double c : v) e = std::max(e, std::abs(c));
  return e;
}

double max_abs_diff_vec(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) return kUnevaluable;
  double e = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

Vec join_split(const SplitVector& v) { return join_vector(v); }

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void run_points(int n, RunMode mode, const std::function<void(int)>& body) {
#if defined(WARPCHECK_HAVE_OPENMP)
  if (mode == RunMode::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < n; ++k) body(k);
    return;
  }
#else
  (void)mode;
#endif
  for (int k = 0; k < n; ++k) body(k);
}

// ---------------------------------------------------------------------------
// Equation sweeps and the correction ladder.
// ---------------------------------------------------------------------------

// One comparable formula inside a case: a closed form (parameterized by a
// correction mask) against an oracle, both evaluated per sampled point.
struct EquationSweep {
  std::string id;                            ///< catalog id ("" = no catalog)
  std::function<Vec(int)> oracle;            ///< reference value at point k
  std::function<Vec(int, unsigned)> closed;  ///< closed form at point k
};

struct MaskError {
  double abs = 0.0;
  double rel = 0.0;
  bool pass(double tol) const { return abs <= tol || rel <= tol; }
};

// Correction masks in retry order: the transcribed form, then each single
// correction, then cumulative prefixes up to the fully corrected form.
std::vector<unsigned> mask_ladder(unsigned bits) {
  std::vector<unsigned> out{0u};
  for (unsigned i = 0; i < bits; ++i) {
    const unsigned single = 1u << i;
    if (std::find(out.begin(), out.end(), single) == out.end()) out.push_back(single);
  }
  for (unsigned i = 2; i <= bits; ++i) {
    const unsigned prefix = (1u << i) - 1u;
    if (std::find(out.begin(), out.end(), prefix) == out.end()) out.push_back(prefix);
  }
  return out;
}

struct SweepContext {
  int points = 0;
  double tol = 1e-6;
  RunMode mode = RunMode::parallel;
  bool printed_only = false;
};

MaskError sweep_mask(const EquationSweep& eq, const std::vector<Vec>& oracle_values,
                     unsigned mask, const SweepContext& ctx) {
  std::vector<double> abs_err(static_cast<std::size_t>(ctx.points), 0.0);
  std::vector<double> rel_err(static_cast<std::size_t>(ctx.points), 0.0);
  run_points(ctx.points, ctx.mode, [&](int k) {
    double a = kUnevaluable;
    try {
      const Vec closed = eq.closed(k, mask);
      a = max_abs_diff_vec(closed, oracle_values[static_cast<std::size_t>(k)]);
    } catch (const FormNotEvaluable&) {
      a = kUnevaluable;
    } catch (const DomainError&) {
      a = kUnevaluable;
    }
    abs_err[static_cast<std::size_t>(k)] = a;
    const double scale = std::max(max_abs(oracle_values[static_cast<std::size_t>(k)]), 1e-9);
    rel_err[static_cast<std::size_t>(k)] = a >= kUnevaluable ? kUnevaluable : a / scale;
  });
  MaskError out;
  for (int k = 0; k < ctx.points; ++k) {
    out.abs = std::max(out.abs, abs_err[static_cast<std::size_t>(k)]);
    out.rel = std::max(out.rel, rel_err[static_cast<std::size_t>(k)]);
  }
  return out;
}

// Runs the ladder for one equation and folds the outcome into the report.
void run_equation(const EquationSweep& eq, const SweepContext& ctx, FieldReport& report) {
  std::vector<Vec> oracle_values(static_cast<std::size_t>(ctx.points));
  std::vector<int> oracle_bad(static_cast<std::size_t>(ctx.points), 0);
  run_points(ctx.points, ctx.mode, [&](int k) {
    try {
      oracle_values[static_cast<std::size_t>(k)] = eq.oracle(k);
    } catch (const DomainError&) {
      oracle_bad[static_cast<std::size_t>(k)] = 1;
    }
  });
  for (int k = 0; k < ctx.points; ++k) {
    if (oracle_bad[static_cast<std::size_t>(k)]) {
      report.verdict = "error";
      report.notes.push_back("oracle for '" + eq.id + "' failed at sample " + std::to_string(k));
      return;
    }
  }

  const unsigned bits =
      eq.id.empty() ? 0u : static_cast<unsigned>(formula_catalog(eq.id).corrections.size());
  std::vector<unsigned> ladder = ctx.printed_only ? std::vector<unsigned>{0u} : mask_ladder(bits);

  const MaskError printed = sweep_mask(eq, oracle_values, 0u, ctx);
  MaskError accepted = printed;
  unsigned accepted_mask = 0u;
  bool resolved = printed.pass(ctx.tol);
  if (!resolved) {
    for (std::size_t i = 1; i < ladder.size() && !resolved; ++i) {
      const MaskError err = sweep_mask(eq, oracle_values, ladder[i], ctx);
      if (err.pass(ctx.tol)) {
        accepted = err;
        accepted_mask = ladder[i];
        resolved = true;
      }
    }
  }
  if (!resolved && bits > 0 && !ctx.printed_only) {
    // Report the fully corrected form's error as the final state.
    accepted_mask = (1u << bits) - 1u;
    accepted = sweep_mask(eq, oracle_values, accepted_mask, ctx);
  }

  report.max_abs_err = std::max(report.max_abs_err, accepted.abs);
  report.max_rel_err = std::max(report.max_rel_err, accepted.rel);

  auto worse = [](const std::string& a, const std::string& b) {
    auto rank = [](const std::string& v) {
      if (v == "error") return 3;
      if (v == "mismatch") return 2;
      if (v == "corrected-match") return 1;
      return 0;
    };
    return rank(a) >= rank(b) ? a : b;
  };

  if (resolved && accepted_mask == 0u) {
    report.verdict = worse(report.verdict, "match");
    return;
  }
  if (resolved) {
    report.verdict = worse(report.verdict, "corrected-match");
    const FormulaCatalog& cat = formula_catalog(eq.id);
    for (unsigned i = 0; i < bits; ++i) {
      if ((accepted_mask >> i) & 1u) {
        const CorrectionNote& note = cat.corrections[i];
        report.ledger.push_back(
            {eq.id, note.term, note.printed, note.corrected, printed.abs, accepted.abs});
      }
    }
    return;
  }
  report.verdict = worse(report.verdict, "mismatch");
  report.notes.push_back("equation '" + eq.id + "' exceeds tolerance even fully corrected: abs " +
                         format_double(accepted.abs) + ", rel " + format_double(accepted.rel));
}

// ---------------------------------------------------------------------------
// Case construction.
// ---------------------------------------------------------------------------

std::vector<Vec> sample_box(const std::vector<std::pair<double, double>>& box, int count,
                            SplitMix64& rng, double margin) {
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    Vec p(box.size());
    for (std::size_t i = 0; i < box.size(); ++i) {
      const double lo = box[i].first, hi = box[i].second;
      const double pad = margin * (hi - lo);
      p[i] = rng.uniform(lo + pad, hi - pad);
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<std::pair<double, double>> joint_box(const DwpSpace& s) {
  std::vector<std::pair<double, double>> box = s.base.chart;
  box.insert(box.end(), s.fiber.chart.begin(), s.fiber.chart.end());
  return box;
}

SmoothMap identity_self_map(const MetricPatch& pat) {
  std::vector<ScalarFieldExpr> comps;
  for (int i = 0; i < pat.dim; ++i) comps.emplace_back(exprb::var(i), pat.coords);
  return make_map(pat.name + "-id", pat, pat, comps);
}

SmoothMap map_from_config(const VerifyConfig& cfg, const DwpSpace& s, FactorSide wanted_side,
                          FieldReport& report) {
  if (cfg.phi.has_value() && cfg.phi->side == wanted_side) {
    const MetricPatch& factor = wanted_side == FactorSide::fiber ? s.fiber : s.base;
    std::vector<ScalarFieldExpr> comps;
    for (const std::string& c : cfg.phi->components) comps.emplace_back(parse(c, factor.coords));
    return make_map(cfg.name + "-phi", factor, factor, comps);
  }
  report.notes.push_back(std::string("no ") +
                         (wanted_side == FactorSide::fiber ? "fiber" : "base") +
                         "-side map configured; using the identity");
  return identity_self_map(wanted_side == FactorSide::fiber ? s.fiber : s.base);
}

FieldReport make_report(const std::string& case_id, int points) {
  FieldReport r;
  r.case_id = case_id;
  r.verdict = "match";
  r.points = points;
  return r;
}

void run_connection_case(const VerifyConfig& cfg, const DwpSpace& s, const SweepContext& ctx,
                         FieldReport& report) {
  SplitMix64 rng(cfg.seed ^ fnv1a("connection"));
  const std::vector<Vec> pts = sample_box(joint_box(s), ctx.points, rng, 0.01);

  EquationSweep eq;
  eq.id = "product-connection";
  eq.oracle = [&s, &pts](int k) { return christoffel(s.product_warped, pts[static_cast<std::size_t>(k)]).symbols; };
  eq.closed = [&s, &pts](int k, unsigned mask) {
    ConnectionForm form = ConnectionForm::fully_corrected;
    if (mask == 0u)
      form = ConnectionForm::printed;
    else if (mask == 1u)
      form = ConnectionForm::slots_swapped;
    else if (mask == 3u)
      form = ConnectionForm::fully_corrected;
    else
      throw FormNotEvaluable("no connection variant applies only the warp-factor correction");
    return dwp_connection_closed(s, pts[static_cast<std::size_t>(k)], form);
  };
  run_equation(eq, ctx, report);
}

void run_curvature_case(const VerifyConfig& cfg, const DwpSpace& s, const SweepContext& ctx,
                        FieldReport& report) {
  SplitMix64 rng(cfg.seed ^ fnv1a("curvature"));
  const int d = s.m + s.n;
  std::vector<Vec> pts;
  std::vector<Vec> xs, ys, zs;
  pts.reserve(static_cast<std::size_t>(ctx.points));
  for (int k = 0; k < ctx.points; ++k) {
    pts.push_back(sample_box(joint_box(s), 1, rng, 0.01).front());
    Vec x(static_cast<std::size_t>(d)), y(static_cast<std::size_t>(d)), z(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < d; ++i) y[static_cast<std::size_t>(i)] = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < d; ++i) z[static_cast<std::size_t>(i)] = rng.uniform(-1.0, 1.0);
    xs.push_back(std::move(x));
    ys.push_back(std::move(y));
    zs.push_back(std::move(z));
  }

  EquationSweep eq;
  eq.id = "curvature-difference";
  eq.oracle = [&](int k) {
    const auto kk = static_cast<std::size_t>(k);
    return dwp_curvature_oracle(s, pts[kk], xs[kk], ys[kk], zs[kk]);
  };
  eq.closed = [&](int k, unsigned mask) {
    const auto kk = static_cast<std::size_t>(k);
    const CurvatureForm form =
        mask == 0u ? CurvatureForm::printed_grouped : CurvatureForm::difference_tensor;
    return dwp_curvature_relation(s, pts[kk], xs[kk], ys[kk], zs[kk], form);
  };
  run_equation(eq, ctx, report);
}

void run_inclusion_case(const VerifyConfig& cfg, const DwpSpace& s, FactorSide side,
                        const SweepContext& ctx, FieldReport& report) {
  const char* tag = side == FactorSide::base ? "inclusion-b" : "inclusion-f";
  SplitMix64 rng(cfg.seed ^ fnv1a(tag));
  const MetricPatch& included = side == FactorSide::base ? s.base : s.fiber;
  const MetricPatch& other = side == FactorSide::base ? s.fiber : s.base;

  std::vector<Vec> pts, levels;
  std::vector<SmoothMap> incs;
  for (int k = 0; k < ctx.points; ++k) {
    pts.push_back(sample_box(included.chart, 1, rng, 0.01).front());
    levels.push_back(sample_box(other.chart, 1, rng, 0.01).front());
    incs.push_back(inclusion_map(s, side, levels.back()));
  }

  EquationSweep ten;
  ten.id = side == FactorSide::base ? "inclusion-base-tension" : "inclusion-fiber-tension";
  ten.oracle = [&](int k) { return tension(incs[static_cast<std::size_t>(k)], pts[static_cast<std::size_t>(k)]); };
  ten.closed = [&, side](int k, unsigned mask) {
    const auto kk = static_cast<std::size_t>(k);
    return join_split(inclusion_tension(s, side, pts[kk], levels[kk], mask));
  };
  run_equation(ten, ctx, report);

  EquationSweep bit;
  bit.id = side == FactorSide::base ? "inclusion-base-bitension" : "inclusion-fiber-bitension";
  bit.oracle = [&](int k) { return bitension_oracle(incs[static_cast<std::size_t>(k)], pts[static_cast<std::size_t>(k)]); };
  bit.closed = [&, side](int k, unsigned mask) {
    const auto kk = static_cast<std::size_t>(k);
    return join_split(inclusion_bitension(s, side, pts[kk], levels[kk], mask));
  };
  run_equation(bit, ctx, report);
}

void run_projection_case(const VerifyConfig& cfg, const DwpSpace& s, FactorSide side,
                         const SweepContext& ctx, FieldReport& report) {
  const char* tag = side == FactorSide::base ? "proj-first" : "proj-second";
  SplitMix64 rng(cfg.seed ^ fnv1a(tag));
  const std::vector<Vec> pts = sample_box(joint_box(s), ctx.points, rng, 0.01);
  const SmoothMap proj = projection_map(s, side);

  EquationSweep ten;
  ten.id = side == FactorSide::base ? "projection-base-tension" : "projection-fiber-tension";
  ten.oracle = [&](int k) { return tension(proj, pts[static_cast<std::size_t>(k)]); };
  ten.closed = [&, side](int k, unsigned mask) {
    return projection_tension(s, side, pts[static_cast<std::size_t>(k)], mask);
  };
  run_equation(ten, ctx, report);

  EquationSweep bit;
  bit.id = side == FactorSide::base ? "projection-base-bitension" : "projection-fiber-bitension";
  bit.oracle = [&](int k) { return bitension_oracle(proj, pts[static_cast<std::size_t>(k)]); };
  bit.closed = [&, side](int k, unsigned mask) {
    return projection_bitension(s, side, pts[static_cast<std::size_t>(k)], mask);
  };
  run_equation(bit, ctx, report);
}

void run_product_domain_case(const VerifyConfig& cfg, const DwpSpace& s, bool mirror,
                             const SweepContext& ctx, FieldReport& report) {
  const char* tag = mirror ? "product-dom-mirror" : "product-dom";
  SplitMix64 rng(cfg.seed ^ fnv1a(tag));
  const FactorSide phi_side = mirror ? FactorSide::base : FactorSide::fiber;
  const SmoothMap phi = map_from_config(cfg, s, phi_side, report);
  try {
    require_harmonic(phi);
  } catch (const DomainError& e) {
    report.verdict = "error";
    report.notes.push_back(e.what());
    return;
  }
  const SmoothMap big = product_map_domain_warped(s, phi_side, phi);
  const std::vector<Vec> pts = sample_box(joint_box(s), ctx.points, rng, 0.01);

  const std::string ten_id = mirror ? "product-domain-mirror-tension" : "product-domain-tension";
  const std::string proj_id =
      mirror ? "projection-fiber-bitension" : "projection-base-bitension";
  const std::string op_id = mirror ? "product-domain-mirror-operator" : "product-domain-operator";
  const unsigned proj_full = formula_catalog(proj_id).full_mask();
  const unsigned op_full = formula_catalog(op_id).full_mask();

  const auto fields = [&](int k, unsigned tm, unsigned pm, unsigned om) {
    const Vec& p = pts[static_cast<std::size_t>(k)];
    return mirror ? product_domain_warped_mirror(s, phi, p, tm, pm, om)
                  : product_domain_warped(s, phi, p, tm, pm, om);
  };

  EquationSweep ten;
  ten.id = ten_id;
  ten.oracle = [&](int k) { return tension(big, pts[static_cast<std::size_t>(k)]); };
  ten.closed = [&](int k, unsigned mask) {
    return join_split(fields(k, mask, proj_full, op_full).tension);
  };
  run_equation(ten, ctx, report);

  // Bitension slots are governed by separate catalogs: the projection part on
  // the unmapped factor and the operator acting on the mapped factor.
  EquationSweep projpart;
  projpart.id = proj_id;
  projpart.oracle = [&](int k) {
    const SplitVector sv = split_vector(s, bitension_oracle(big, pts[static_cast<std::size_t>(k)]));
    return mirror ? sv.fiber : sv.base;
  };
  projpart.closed = [&](int k, unsigned mask) {
    const SplitVector sv = fields(k, 0u, mask, op_full).bitension;
    return mirror ? sv.fiber : sv.base;
  };
  run_equation(projpart, ctx, report);

  EquationSweep oppart;
  oppart.id = op_id;
  oppart.oracle = [&](int k) {
    const SplitVector sv = split_vector(s, bitension_oracle(big, pts[static_cast<std::size_t>(k)]));
    return mirror ? sv.base : sv.fiber;
  };
  oppart.closed = [&](int k, unsigned mask) {
    return fields(k, 0u, proj_full, mask).operator_value;
  };
  run_equation(oppart, ctx, report);
}

void run_product_codomain_case(const VerifyConfig& cfg, const DwpSpace& s,
                               const SweepContext& ctx, FieldReport& report) {
  SplitMix64 rng(cfg.seed ^ fnv1a("product-cod"));
  const SmoothMap phi = map_from_config(cfg, s, FactorSide::fiber, report);
  try {
    require_harmonic(phi);
  } catch (const DomainError& e) {
    report.verdict = "error";
    report.notes.push_back(e.what());
    return;
  }
  const SmoothMap big = product_map_codomain_warped(s, phi);
  const std::vector<Vec> pts = sample_box(joint_box(s), ctx.points, rng, 0.01);

  EquationSweep ten;
  ten.id = "";  // derived form with no printed variant to correct
  ten.oracle = [&](int k) { return tension(big, pts[static_cast<std::size_t>(k)]); };
  ten.closed = [&](int k, unsigned) {
    return join_split(codomain_warped_tension(s, phi, pts[static_cast<std::size_t>(k)]));
  };
  run_equation(ten, ctx, report);

  // Vanishing-condition diagnostics: the biharmonicity conditions must vanish
  // exactly when the bitension oracle does, under at least one reading of
  // their ambiguous terms.
  struct Combo {
    ConditionReading base_reading, fiber_reading;
    const char* label;
  };
  const Combo combos[] = {
      {ConditionReading::compose, ConditionReading::compose, "base=compose, fiber=compose"},
      {ConditionReading::compose, ConditionReading::pullback, "base=compose, fiber=pullback"},
      {ConditionReading::pullback, ConditionReading::compose, "base=pullback, fiber=compose"},
      {ConditionReading::pullback, ConditionReading::pullback, "base=pullback, fiber=pullback"},
  };

  std::vector<CodomainConditions> conds(static_cast<std::size_t>(ctx.points));
  std::vector<int> bad(static_cast<std::size_t>(ctx.points), 0);
  run_points(ctx.points, ctx.mode, [&](int k) {
    try {
      conds[static_cast<std::size_t>(k)] = codomain_warped_conditions(s, phi, pts[static_cast<std::size_t>(k)]);
    } catch (const DomainError&) {
      bad[static_cast<std::size_t>(k)] = 1;
    }
  });
  for (int k = 0; k < ctx.points; ++k) {
    if (bad[static_cast<std::size_t>(k)]) {
      report.verdict = "error";
      report.notes.push_back("vanishing conditions failed to evaluate at sample " +
                             std::to_string(k));
      return;
    }
  }

  bool any_combo_ok = false;
  for (const Combo& combo : combos) {
    int disagreements = 0;
    double worst_cond_on_zero = 0.0;  // condition magnitude where the oracle vanishes
    double worst_oracle_on_zero = 0.0;  // oracle magnitude where the condition vanishes
    for (int k = 0; k < ctx.points; ++k) {
      const CodomainConditions& cc = conds[static_cast<std::size_t>(k)];
      const Vec& bcond = combo.base_reading == ConditionReading::compose
                             ? cc.base_condition_compose
                             : cc.base_condition_pullback;
      const Vec& fcond = combo.fiber_reading == ConditionReading::compose
                             ? cc.fiber_condition_compose
                             : cc.fiber_condition_pullback;
      const double cond_norm = std::max(max_abs(bcond), max_abs(fcond));
      const double oracle_norm =
          std::max(max_abs(cc.oracle_bitension.base), max_abs(cc.oracle_bitension.fiber));
      const bool cond_zero = cond_norm <= ctx.tol;
      const bool oracle_zero = oracle_norm <= ctx.tol;
      if (cond_zero != oracle_zero) {
        ++disagreements;
        if (oracle_zero) worst_cond_on_zero = std::max(worst_cond_on_zero, cond_norm);
        if (cond_zero) worst_oracle_on_zero = std::max(worst_oracle_on_zero, oracle_norm);
      }
    }
    if (disagreements == 0) {
      any_combo_ok = true;
    } else {
      report.ledger.push_back({"codomain-vanishing-conditions", combo.label,
                               "condition vanishes exactly when the bitension does",
                               "disagrees at " + std::to_string(disagreements) + " of " +
                                   std::to_string(ctx.points) + " samples",
                               worst_cond_on_zero, worst_oracle_on_zero});
    }
  }
  if (!any_combo_ok) {
    report.verdict = "mismatch";
    report.notes.push_back(
        "no reading of the vanishing conditions agrees with the bitension oracle");
  }
}

void run_corollaries_case(const VerifyConfig& cfg, const DwpSpace& s, const SweepContext& ctx,
                          FieldReport& report) {
  SplitMix64 rng(cfg.seed ^ fnv1a("corollaries"));
  const int levels = std::min(ctx.points, 20);
  report.points = 2 * levels;
  int disagreements = 0;
  int undecided = 0;
  for (const FactorSide side : {FactorSide::base, FactorSide::fiber}) {
    const MetricPatch& other = side == FactorSide::base ? s.fiber : s.base;
    for (int k = 0; k < levels; ++k) {
      const Vec level = sample_box(other.chart, 1, rng, 0.01).front();
      const BiharmonicClass c = classify_inclusion(s, side, level, ctx.tol);
      if (!c.condition_verdict.has_value() || c.verdict == BiharmonicVerdict::indeterminate) {
        ++undecided;
        continue;
      }
      if (*c.condition_verdict != c.verdict) {
        ++disagreements;
        report.notes.push_back(std::string("classification disagreement on the ") +
                               (side == FactorSide::base ? "base" : "fiber") +
                               " inclusion: sampled verdict " + to_string(c.verdict) +
                               ", analytic condition " + to_string(*c.condition_verdict));
      }
    }
  }
  report.max_abs_err = static_cast<double>(disagreements);
  report.max_rel_err = report.points > 0
                           ? static_cast<double>(disagreements) / report.points
                           : 0.0;
  if (undecided > 0)
    report.notes.push_back(std::to_string(undecided) +
                           " levels skipped (analytic condition not applicable or verdict "
                           "indeterminate)");
  if (disagreements > 0) report.verdict = "mismatch";
}

}  // namespace

// ---------------------------------------------------------------------------
// Public API.
// ---------------------------------------------------------------------------

std::vector<std::string> case_ids() {
  return {"connection",  "curvature",   "inclusion-b", "inclusion-f", "proj-first",
          "proj-second", "product-dom", "product-dom-mirror", "product-cod", "corollaries"};
}

std::vector<std::string> builtin_config_names() {
  return {"cfg-a", "cfg-b", "cfg-c", "cfg-swap", "cfg-r22", "cfg-prod"};
}

VerifyConfig builtin_config(const std::string& name) {
  VerifyConfig cfg;
  cfg.name = name;
  cfg.base = {1, {{-1.0, 1.0}}, {}, {}};
  cfg.fiber = {1, {{-1.0, 1.0}}, {}, {}};
  if (name == "cfg-a") {
    cfg.b2 = "exp(2*x1)";
    cfg.f2 = "exp(2*y1)";
  } else if (name == "cfg-b") {
    cfg.b2 = "1";
    cfg.f2 = "2+sin(y1)";
  } else if (name == "cfg-c") {
    cfg.base = {2, {{0.3, 2.8}, {-3.0, 3.0}}, {}, {"1", "0", "0", "sin(x1)^2"}};
    cfg.b2 = "(2+cos(x1))^2";
    cfg.f2 = "1";
  } else if (name == "cfg-swap") {
    cfg.b2 = "2+sin(x1)";
    cfg.f2 = "1";
  } else if (name == "cfg-r22") {
    cfg.base = {2,
                {{-1.0, 1.0}, {-1.0, 1.0}},
                {},
                {"1+0.1*x2^2", "0.05*x1*x2", "0.05*x1*x2", "1.2+0.1*x1^2"}};
    cfg.fiber = {2,
                 {{-1.0, 1.0}, {-1.0, 1.0}},
                 {},
                 {"1.1+0.1*y2^2", "0.04*y1*y2", "0.04*y1*y2", "1+0.08*y1^2"}};
    cfg.b2 = "2+0.3*x1+0.1*x2^2";
    cfg.f2 = "1.5+0.2*y1+0.1*y2^2";
  } else if (name == "cfg-prod") {
    cfg.b2 = "exp(2*x1)";
    cfg.f2 = "exp(2*y1)";
    // Harmonic non-identity fiber map whose image stays inside the chart, so
    // every case (including the codomain-warped one) is well posed.
    cfg.phi = MapConfig{FactorSide::fiber, {"0.5*y1+0.1"}};
  } else {
    throw std::invalid_argument("unknown builtin configuration '" + name + "'");
  }
  return cfg;
}

std::vector<Vec> sample_points(const std::vector<std::pair<double, double>>& chart, int count,
                               std::uint64_t seed, double margin) {
  SplitMix64 rng(seed);
  return sample_box(chart, count, rng, margin);
}

DwpSpace space_from_config(const VerifyConfig& cfg) {
  const auto build_patch = [](const FactorConfig& fc, const std::string& name,
                              const std::string& prefix) {
    if (static_cast<int>(fc.chart.size()) != fc.dim)
      throw std::invalid_argument("factor '" + name + "': chart size must equal dim");
    std::vector<std::string> coords = fc.coords;
    if (coords.empty())
      for (int i = 1; i <= fc.dim; ++i) coords.push_back(prefix + std::to_string(i));
    if (fc.metric.empty()) {
      MetricPatch p = euclidean_patch(name, fc.dim, fc.chart, prefix);
      if (!fc.coords.empty()) p = make_patch(name, fc.chart, coords, [&] {
        std::vector<ScalarFieldExpr> comps;
        for (int i = 0; i < fc.dim; ++i)
          for (int j = 0; j < fc.dim; ++j)
            comps.push_back(parse(i == j ? "1" : "0", coords));
        return comps;
      }());
      return p;
    }
    if (static_cast<int>(fc.metric.size()) != fc.dim * fc.dim)
      throw std::invalid_argument("factor '" + name + "': metric needs dim^2 components");
    std::vector<ScalarFieldExpr> comps;
    for (const std::string& c : fc.metric) comps.push_back(parse(c, coords));
    return make_patch(name, fc.chart, coords, comps);
  };
  const MetricPatch base = build_patch(cfg.base, cfg.name + "-B", "x");
  const MetricPatch fiber = build_patch(cfg.fiber, cfg.name + "-F", "y");
  return make_dwp(cfg.name, base, fiber, parse(cfg.b2, base.coords),
                  parse(cfg.f2, fiber.coords));
}

FieldReport run_case(const VerifyConfig& cfg, const std::string& case_id, RunMode mode) {
  if (cfg.samples <= 0) throw std::invalid_argument("samples must be positive");
  if (cfg.tol <= 0.0) throw std::invalid_argument("tolerance must be positive");
  if (cfg.jet_order < 4 || cfg.jet_order > kMaxJetOrder)
    throw std::invalid_argument("jet order must lie in [4, " + std::to_string(kMaxJetOrder) +
                                "]: the second-order fields consume four derivative orders");

  FieldReport report = make_report(case_id, cfg.samples);
  SweepContext ctx{cfg.samples, cfg.tol, mode, cfg.printed_forms_only};

  DwpSpace s = [&] {
    try {
      return space_from_config(cfg);
    } catch (const std::exception& e) {
      throw std::invalid_argument("invalid configuration '" + cfg.name + "': " + e.what());
    }
  }();

  try {
    if (case_id == "connection") {
      run_connection_case(cfg, s, ctx, report);
    } else if (case_id == "curvature") {
      run_curvature_case(cfg, s, ctx, report);
    } else if (case_id == "inclusion-b") {
      run_inclusion_case(cfg, s, FactorSide::base, ctx, report);
    } else if (case_id == "inclusion-f") {
      run_inclusion_case(cfg, s, FactorSide::fiber, ctx, report);
    } else if (case_id == "proj-first") {
      run_projection_case(cfg, s, FactorSide::base, ctx, report);
    } else if (case_id == "proj-second") {
      run_projection_case(cfg, s, FactorSide::fiber, ctx, report);
    } else if (case_id == "product-dom") {
      run_product_domain_case(cfg, s, /*mirror=*/false, ctx, report);
    } else if (case_id == "product-dom-mirror") {
      run_product_domain_case(cfg, s, /*mirror=*/true, ctx, report);
    } else if (case_id == "product-cod") {
      run_product_codomain_case(cfg, s, ctx, report);
    } else if (case_id == "corollaries") {
      run_corollaries_case(cfg, s, ctx, report);
    } else {
      throw std::invalid_argument("unknown case '" + case_id + "'");
    }
  } catch (const DomainError& e) {
    report.verdict = "error";
    report.notes.push_back(e.what());
  }
  return report;
}

std::vector<FieldReport> run_suite(const VerifyConfig& cfg, RunMode mode) {
  std::vector<std::string> wanted = cfg.cases;
  if (wanted.empty() ||
      std::find(wanted.begin(), wanted.end(), "all") != wanted.end())
    wanted = case_ids();
  std::vector<FieldReport> out;
  out.reserve(wanted.size());
  for (const std::string& id : wanted) out.push_back(run_case(cfg, id, mode));
  return out;
}

bool all_passed(const std::vector<FieldReport>& reports) {
  for (const FieldReport& r : reports)
    if (r.verdict == "mismatch" || r.verdict == "error") return false;
  return true;
}

// ---------------------------------------------------------------------------
// Config I/O and report serialization.
// ---------------------------------------------------------------------------

VerifyConfig parse_config(const std::string& json_text) {
  const ordered_json j = ordered_json::parse(json_text);
  VerifyConfig cfg;
  cfg.name = j.value("name", std::string("unnamed"));

  const auto parse_factor = [](const ordered_json& fj, const char* what) {
    FactorConfig fc;
    if (!fj.contains("dim")) throw std::invalid_argument(std::string(what) + ": missing dim");
    fc.dim = fj.at("dim").get<int>();
    if (!fj.contains("chart")) throw std::invalid_argument(std::string(what) + ": missing chart");
    for (const auto& iv : fj.at("chart"))
      fc.chart.emplace_back(iv.at(0).get<double>(), iv.at(1).get<double>());
    if (fj.contains("coords")) fc.coords = fj.at("coords").get<std::vector<std::string>>();
    if (fj.contains("metric") && !fj.at("metric").is_string()) {
      for (const auto& row : fj.at("metric"))
        for (const auto& c : row) fc.metric.push_back(c.get<std::string>());
    }
    return fc;
  };
  if (!j.contains("base") || !j.contains("fiber"))
    throw std::invalid_argument("configuration needs 'base' and 'fiber' factors");
  cfg.base = parse_factor(j.at("base"), "base");
  cfg.fiber = parse_factor(j.at("fiber"), "fiber");

  if (j.contains("b2"))
    cfg.b2 = j.at("b2").get<std::string>();
  else if (j.contains("b"))
    cfg.b2 = "(" + j.at("b").get<std::string>() + ")^2";
  else
    throw std::invalid_argument("configuration needs 'b2' (or 'b')");
  if (j.contains("f2"))
    cfg.f2 = j.at("f2").get<std::string>();
  else if (j.contains("f"))
    cfg.f2 = "(" + j.at("f").get<std::string>() + ")^2";
  else
    throw std::invalid_argument("configuration needs 'f2' (or 'f')");

  if (j.contains("phi")) {
    MapConfig mc;
    const std::string side = j.at("phi").value("side", std::string("fiber"));
    if (side == "base")
      mc.side = FactorSide::base;
    else if (side == "fiber")
      mc.side = FactorSide::fiber;
    else
      throw std::invalid_argument("phi side must be 'base' or 'fiber'");
    mc.components = j.at("phi").at("components").get<std::vector<std::string>>();
    cfg.phi = std::move(mc);
  }

  if (j.contains("cases")) cfg.cases = j.at("cases").get<std::vector<std::string>>();
  cfg.samples = j.value("samples", cfg.samples);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("tolerances")) {
    cfg.tol = j.at("tolerances").value("tol", cfg.tol);
    cfg.jet_order = j.at("tolerances").value("jet_order", cfg.jet_order);
  }
  cfg.tol = j.value("tol", cfg.tol);
  cfg.jet_order = j.value("jet_order", cfg.jet_order);
  return cfg;
}

VerifyConfig load_config(const std::string& path_or_builtin) {
  const std::vector<std::string> names = builtin_config_names();
  if (std::find(names.begin(), names.end(), path_or_builtin) != names.end())
    return builtin_config(path_or_builtin);
  std::ifstream in(path_or_builtin);
  if (!in) throw std::invalid_argument("cannot open configuration '" + path_or_builtin + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

ordered_json report_to_json(const FieldReport& r) {
  ordered_json out;
  out["case"] = r.case_id;
  out["verdict"] = r.verdict;
  out["max_abs_err"] = r.max_abs_err;
  out["max_rel_err"] = r.max_rel_err;
  out["points"] = r.points;
  out["ledger"] = ordered_json::array();
  for (const LedgerEntry& e : r.ledger) {
    ordered_json je;
    je["equation"] = e.equation;
    je["term"] = e.term;
    je["printed"] = e.printed;
    je["corrected"] = e.corrected;
    je["err_before"] = e.err_before;
    je["err_after"] = e.err_after;
    out["ledger"].push_back(std::move(je));
  }
  out["notes"] = r.notes;
  return out;
}

}  // namespace

std::string to_json(const std::vector<FieldReport>& reports, const VerifyConfig& cfg,
                    const std::string& timestamp) {
  ordered_json out;
  out["config"] = {{"name", cfg.name},
                   {"samples", cfg.samples},
                   {"seed", cfg.seed},
                   {"tol", cfg.tol},
                   {"jet_order", cfg.jet_order},
                   {"printed_forms_only", cfg.printed_forms_only}};
  out["generated_at"] = timestamp;
  out["reports"] = ordered_json::array();
  for (const FieldReport& r : reports) out["reports"].push_back(report_to_json(r));
  return out.dump(2) + "\n";
}

std::string to_csv(const std::vector<FieldReport>& reports) {
  std::ostringstream out;
  out << "case,verdict,max_abs_err,max_rel_err,points,corrections\n";
  for (const FieldReport& r : reports) {
    out << r.case_id << ',' << r.verdict << ',' << format_double(r.max_abs_err) << ','
        << format_double(r.max_rel_err) << ',' << r.points << ',' << r.ledger.size() << '\n';
  }
  return out.str();
}

std::string to_text(const std::vector<FieldReport>& reports, const VerifyConfig& cfg,
                    const std::string& timestamp) {
  std::ostringstream out;
  out << "verification report for configuration '" << cfg.name << "'";
  if (!timestamp.empty()) out << " (generated at " << timestamp << ")";
  out << "\n  samples=" << cfg.samples << " seed=" << cfg.seed << " tol="
      << format_double(cfg.tol) << "\n\n";
  for (const FieldReport& r : reports) {
    out << "[" << r.verdict << "] " << r.case_id << "  abs=" << format_double(r.max_abs_err)
        << " rel=" << format_double(r.max_rel_err) << " points=" << r.points << "\n";
    for (const LedgerEntry& e : r.ledger) {
      out << "    correction (" << e.equation << ") " << e.term << ": " << e.printed << "  ->  "
          << e.corrected << "  [err " << format_double(e.err_before) << " -> "
          << format_double(e.err_after) << "]\n";
    }
    for (const std::string& n : r.notes) out << "    note: " << n << "\n";
  }
  out << "\noverall: " << (all_passed(reports) ? "PASS" : "FAIL") << "\n";
  return out.str();
}

}  // namespace warpcheck
