#include "warpcheck/closed_forms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "warpcheck/rng.hpp"

namespace warpcheck {
namespace {

using exprb::call;
using exprb::div;
using exprb::mul;
using exprb::num;
using exprb::var;

// ---------------------------------------------------------------------------
// Small expression helpers derived from the squared warping functions.
// ---------------------------------------------------------------------------

// (1/2) log(w2)  ==  log of the warping function itself.
ScalarFieldExpr log_warping(const ScalarFieldExpr& w2) {
  return ScalarFieldExpr(mul(num(0.5), call(Builtin::log, w2.root())), w2.vars());
}

// 1 / w2.
ScalarFieldExpr inverse_warping(const ScalarFieldExpr& w2) {
  return ScalarFieldExpr(div(num(1.0), w2.root()), w2.vars());
}

Vec zeros(int d) { return Vec(static_cast<std::size_t>(d), 0.0); }

Vec scaled(double c, const Vec& v) {
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = c * v[i];
  return out;
}

void axpy(double c, const Vec& v, Vec& acc) {
  for (std::size_t i = 0; i < v.size(); ++i) acc[i] += c * v[i];
}

// Contravariant gradient jets of a scalar expression on a factor patch.
std::vector<Jet> gradient_jets(const MetricPatch& pat, const ScalarFieldExpr& h,
                               const Vec& p, int order) {
  const Jet hj = eval_jet(h, p, order + 1);
  return grad_of_scalar_jets(pat, p, hj, order);
}

// Jet (to `order`) of the squared metric norm of the gradient of h at p.
Jet gradient_norm2_jet(const MetricPatch& pat, const ScalarFieldExpr& h,
                       const Vec& p, int order) {
  const int d = pat.dim;
  const JetLayout* ly = JetLayout::get(d, order);
  const std::vector<Jet> gm = metric_jets(pat, p, order);
  const std::vector<Jet> gi = jet_mat_inverse(gm, d);
  const Jet hj = eval_jet(h, p, order + 1);
  std::vector<Jet> dh;
  dh.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) dh.push_back(derivative(hj, i).truncated(order));
  Jet acc = Jet::constant(ly, 0.0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      acc = acc + gi[static_cast<std::size_t>(i * d + j)].truncated(order) * dh[static_cast<std::size_t>(i)] * dh[static_cast<std::size_t>(j)];
  return acc;
}

double gradient_norm2_value(const MetricPatch& pat, const ScalarFieldExpr& h, const Vec& p) {
  const Vec gv = grad(pat, h, p);
  return inner(metric_values(pat, p), gv, gv);
}

// Contravariant gradient (values) of the scalar whose jet is given.
Vec gradient_of_jet(const MetricPatch& pat, const Vec& p, const Jet& scalar_jet) {
  const std::vector<Jet> gj = grad_of_scalar_jets(pat, p, scalar_jet, 0);
  Vec out(static_cast<std::size_t>(pat.dim));
  for (int i = 0; i < pat.dim; ++i) out[static_cast<std::size_t>(i)] = gj[static_cast<std::size_t>(i)].value();
  return out;
}

double euclid_norm(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Swapped-space view: fiber-side formulas reuse the base-side code on the
// space with the two factors (and their warpings) exchanged.
DwpSpace swapped_space(const DwpSpace& s) {
  return make_dwp(s.name + "-swapped", s.fiber, s.base, s.f2, s.b2);
}

SplitVector swap_slots(SplitVector v) {
  std::swap(v.base, v.fiber);
  return v;
}

Vec joint_point(const Vec& x, const Vec& y) {
  Vec p = x;
  p.insert(p.end(), y.begin(), y.end());
  return p;
}

void check_factor_point(const MetricPatch& pat, const Vec& p, const char* what) {
  if (static_cast<int>(p.size()) != pat.dim)
    throw DomainError(std::string(what) + ": expected " + std::to_string(pat.dim) +
                      " coordinates, got " + std::to_string(p.size()));
  if (!point_in_chart(pat, p))
    throw DomainError(std::string(what) + ": point lies outside the chart of '" + pat.name + "'");
}

void check_mask(const FormulaCatalog& cat, unsigned mask) {
  if (mask > cat.full_mask())
    throw std::invalid_argument("correction mask " + std::to_string(mask) +
                                " out of range for formula '" + cat.id + "'");
}

bool bit(unsigned mask, unsigned i) { return (mask >> i) & 1u; }

// φ must be a smooth self-map of the given factor (source and target charts
// coincide with the factor patch).
void check_self_map(const SmoothMap& phi, const MetricPatch& factor, const char* what) {
  if (phi.source.dim != factor.dim || phi.target.dim != factor.dim)
    throw DomainError(std::string(what) + ": map '" + phi.name +
                      "' is not a self-map of factor '" + factor.name + "'");
  if (phi.source.coords != factor.coords || phi.target.coords != factor.coords)
    throw DomainError(std::string(what) + ": map '" + phi.name +
                      "' must use the coordinates of factor '" + factor.name + "'");
}

// Jet of the energy density e(φ) = (1/2) g_F^{rs}(y) (g_F)_{ab}(φ(y)) ∂_r φ^a ∂_s φ^b
// at the point y, in source variables, to the requested order.
Jet energy_density_jet(const SmoothMap& phi, const Vec& y, int order) {
  const int d = phi.source.dim;
  const JetLayout* ly = JetLayout::get(d, order);
  const std::vector<Jet> gm_src = metric_jets(phi.source, y, order);
  const std::vector<Jet> gi_src = jet_mat_inverse(gm_src, d);
  const std::vector<Jet> mj = map_jets(phi, y, order + 1);
  const Vec phiy = map_values(phi, y);
  const int dt = phi.target.dim;
  // Target metric components as jets in source variables via composition.
  std::vector<Jet> gt;
  gt.reserve(static_cast<std::size_t>(dt * dt));
  std::vector<Jet> inner_trunc;
  inner_trunc.reserve(mj.size());
  for (const Jet& c : mj) inner_trunc.push_back(c.truncated(order));
  for (int a = 0; a < dt; ++a)
    for (int b = 0; b < dt; ++b) {
      const Jet outer = eval_jet(phi.target.comp(a, b), phiy, order);
      gt.push_back(compose(outer, inner_trunc));
    }
  std::vector<Jet> dphi;  // dphi[a*d + r] = ∂_r φ^a as a jet of order `order`
  dphi.reserve(static_cast<std::size_t>(dt * d));
  for (int a = 0; a < dt; ++a)
    for (int r = 0; r < d; ++r)
      dphi.push_back(derivative(mj[static_cast<std::size_t>(a)], r).truncated(order));
  Jet acc = Jet::constant(ly, 0.0);
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s)
      for (int a = 0; a < dt; ++a)
        for (int b = 0; b < dt; ++b)
          acc = acc + gi_src[static_cast<std::size_t>(r * d + s)].truncated(order) *
                          gt[static_cast<std::size_t>(a * dt + b)] *
                          dphi[static_cast<std::size_t>(a * d + r)] *
                          dphi[static_cast<std::size_t>(b * d + s)];
  return Jet::constant(ly, 0.5) * acc;
}

// Jets (order 2) of the vector field v = dφ(M) along φ, where M is a vector
// field on the source given by jets of order 2.
std::vector<Jet> pushforward_field_jets(const SmoothMap& phi, const Vec& y,
                                        const std::vector<Jet>& m_jets) {
  const int d = phi.source.dim;
  const int dt = phi.target.dim;
  const std::vector<Jet> mj = map_jets(phi, y, 3);
  std::vector<Jet> out;
  out.reserve(static_cast<std::size_t>(dt));
  const JetLayout* ly = JetLayout::get(d, 2);
  for (int a = 0; a < dt; ++a) {
    Jet acc = Jet::constant(ly, 0.0);
    for (int r = 0; r < d; ++r)
      acc = acc + derivative(mj[static_cast<std::size_t>(a)], r).truncated(2) *
                      m_jets[static_cast<std::size_t>(r)].truncated(2);
    out.push_back(acc);
  }
  return out;
}

Vec sample_chart_point(const MetricPatch& pat, SplitMix64& rng, double pad = 0.02) {
  Vec p(static_cast<std::size_t>(pat.dim));
  for (int i = 0; i < pat.dim; ++i) {
    const double lo = pat.chart[static_cast<std::size_t>(i)].first;
    const double hi = pat.chart[static_cast<std::size_t>(i)].second;
    const double margin = pad * (hi - lo);
    p[static_cast<std::size_t>(i)] = rng.uniform(lo + margin, hi - margin);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Formula catalog registry.
// ---------------------------------------------------------------------------

std::map<std::string, FormulaCatalog> build_registry() {
  std::map<std::string, FormulaCatalog> reg;
  auto add = [&reg](FormulaCatalog cat) {
    const std::string id = cat.id;
    reg.emplace(id, std::move(cat));
  };

  add({"inclusion-base-tension",
       {{"warp factor", "-(m/2) (0, grad f^2)", "-(m/(2 b^2)) (0, grad f^2)"}}});
  add({"inclusion-fiber-tension",
       {{"warp factor", "-(n/2) (grad b^2, 0)", "-(n/(2 f^2)) (grad b^2, 0)"}}});

  add({"inclusion-base-bitension",
       {{"base-slot term", "-(m^2/(8 b^2)) |grad f^2|^2 (grad b^2, 0)",
         "+(m (4-m)/(8 b^4 f0^2)) |grad f^2|^2 (grad b^2, 0)"},
        {"Laplacian term", "(m/2) L(ln b) (0, grad f^2)", "(m/b^2) L(ln b) (0, grad f^2)"},
        {"gradient-norm term", "(m^2/8) (0, grad |grad f^2|^2)",
         "(m^2/(8 b^4)) (0, grad |grad f^2|^2)"}}});
  add({"inclusion-fiber-bitension",
       {{"fiber-slot term", "-(n^2/(8 f^2)) |grad b^2|^2 (0, grad f^2)",
         "+(n (4-n)/(8 f^4 b0^2)) |grad b^2|^2 (0, grad f^2)"},
        {"Laplacian term", "(n/2) L(ln b) (grad b^2, 0)", "(n/f^2) L(ln f) (grad b^2, 0)"},
        {"gradient-norm term", "(n^2/8) (grad |grad b^2|^2, 0)",
         "(n^2/(8 f^4)) (grad |grad b^2|^2, 0)"}}});

  add({"inclusion-base-laplacian",
       {{"base-slot term", "-(m/(8 b^2 f0^2)) |grad f^2|^2 (grad b^2, 0)",
         "+(3 m/(8 b^4 f0^2)) |grad f^2|^2 (grad b^2, 0)"},
        {"fiber-slot bracket",
         "[m^2 |grad f^2|^2/(8 f0^2) - (m/(8 b^4)) |grad b^2|^2] (0, grad f^2)",
         "[(m/(4 b^4)) L(b^2) - (3 m/(8 b^6)) |grad b^2|^2 + m^2 |grad f^2|^2/(8 b^4 f0^2)] "
         "(0, grad f^2)"}}});
  add({"inclusion-fiber-laplacian",
       {{"fiber-slot term", "-(n/(8 f^2 b0^2)) |grad b^2|^2 (0, grad f^2)",
         "+(3 n/(8 f^4 b0^2)) |grad b^2|^2 (0, grad f^2)"},
        {"base-slot bracket",
         "[n^2 |grad b^2|^2/(8 b0^2) - (n/(8 f^4)) |grad f^2|^2] (grad b^2, 0)",
         "[(n/(4 f^4)) L(f^2) - (3 n/(8 f^6)) |grad f^2|^2 + n^2 |grad b^2|^2/(8 f^4 b0^2)] "
         "(grad b^2, 0)"}}});

  add({"projection-base-tension",
       {{"warp factor", "n grad(ln b)", "(n/f^2) grad(ln b)"}}});
  add({"projection-fiber-tension",
       {{"warp factor", "m grad(ln f)", "(m/b^2) grad(ln f)"}}});

  add({"projection-base-bitension",
       {{"second-derivative prefactor",
         "(n/f^2) (trace nabla^2 W + Ric W),  W = grad(ln b)",
         "(n/f^4) (trace nabla^2 W + Ric W)"},
        {"gradient-norm prefactor", "(n^2/2) grad |W|^2", "(n^2/(2 f^4)) grad |W|^2"},
        {"fiber-sourced term", "absent",
         "(n/(b^2 f^6)) [(2 - m/2) |grad f^2|^2 - f^2 L(f^2)] W"}}});
  add({"projection-fiber-bitension",
       {{"second-derivative prefactor",
         "(m/b^2) (trace nabla^2 M + Ric M),  M = grad(ln f)",
         "(m/b^4) (trace nabla^2 M + Ric M)"},
        {"gradient-norm prefactor", "(m^2/2) grad |M|^2", "(m^2/(2 b^4)) grad |M|^2"},
        {"base-sourced term", "absent",
         "(m/(f^2 b^6)) [(2 - n/2) |grad b^2|^2 - b^2 L(b^2)] M"}}});

  add({"product-domain-tension",
       {{"base slot", "n (W, 0)", "(n/f^2) (W, 0)"},
        {"fiber slot", "m (0, dphi(M))", "(m/b^2) (0, dphi(M))"}}});
  add({"product-domain-operator",
       {{"Jacobi coefficient", "-(m/b^2) J_phi(v)", "-(m/b^4) J_phi(v)"},
        {"derivative term", "(m^2/2) grad |v|^2",
         "(m^2/b^4) (pullback derivative of v along M)"},
        {"scalar term", "absent",
         "m [(1/f^2) L(1/b^2) - n |grad b^2|^2/(2 b^6 f^2)] v"}}});
  add({"product-domain-mirror-tension",
       {{"fiber slot", "m (0, M)", "(m/b^2) (0, M)"},
        {"base slot", "n (dphi(W), 0)", "(n/f^2) (dphi(W), 0)"}}});
  add({"product-domain-mirror-operator",
       {{"Jacobi coefficient", "-(n/f^2) J_phi(v)", "-(n/f^4) J_phi(v)"},
        {"derivative term", "(n^2/2) grad |v|^2",
         "(n^2/f^4) (pullback derivative of v along W)"},
        {"scalar term", "absent",
         "n [(1/b^2) L(1/f^2) - m |grad f^2|^2/(2 f^6 b^2)] v"}}});

  add({"product-connection",
       {{"argument slots", "warping differentiated in same-factor slot",
         "warping differentiated in opposite-factor slot"},
        {"warp factors", "plain-product trailing terms",
         "trailing terms scaled by the warping factors"}}});
  add({"curvature-difference",
       {{"mixed terms", "wedge-style grouped curvature relation",
         "difference-tensor identity built from the corrected connection"}}});

  return reg;
}

const std::map<std::string, FormulaCatalog>& registry() {
  static const std::map<std::string, FormulaCatalog> reg = build_registry();
  return reg;
}

// ---------------------------------------------------------------------------
// Base-side evaluators (fiber side is obtained on the swapped space).
// ---------------------------------------------------------------------------

// Shared ingredients for the base-factor inclusion formulas at (x, level).
struct InclusionData {
  double m = 0;
  double b2x = 0;      // b^2(x)
  double f20 = 0;      // f^2(level)
  Vec H;               // grad_B b^2 at x
  Vec G0;              // grad_F f^2 at level
  double N0 = 0;       // |grad_F f^2|^2 at level
  double Ntil = 0;     // |grad_B b^2|^2 at x
  Vec gradN0;          // grad_F |grad_F f^2|^2 at level
  double lap_lnb = 0;  // L_B(ln b) at x
  double lap_b2 = 0;   // L_B(b^2) at x
};

InclusionData inclusion_data(const DwpSpace& s, const Vec& x, const Vec& level) {
  check_factor_point(s.base, x, "inclusion point");
  check_factor_point(s.fiber, level, "inclusion level");
  InclusionData d;
  d.m = static_cast<double>(s.m);
  d.b2x = s.b2.eval_value(x);
  d.f20 = s.f2.eval_value(level);
  d.H = grad(s.base, s.b2, x);
  d.G0 = grad(s.fiber, s.f2, level);
  d.N0 = inner(metric_values(s.fiber, level), d.G0, d.G0);
  d.Ntil = inner(metric_values(s.base, x), d.H, d.H);
  d.gradN0 = gradient_of_jet(s.fiber, level, gradient_norm2_jet(s.fiber, s.f2, level, 1));
  d.lap_lnb = laplace_beltrami(s.base, log_warping(s.b2), x);
  d.lap_b2 = laplace_beltrami(s.base, s.b2, x);
  return d;
}

SplitVector inclusion_tension_base(const DwpSpace& s, const Vec& x, const Vec& level,
                                   unsigned mask) {
  const InclusionData d = inclusion_data(s, x, level);
  const double c = bit(mask, 0) ? -d.m / (2.0 * d.b2x) : -d.m / 2.0;
  return {zeros(s.m), scaled(c, d.G0)};
}

SplitVector inclusion_bitension_base(const DwpSpace& s, const Vec& x, const Vec& level,
                                     unsigned mask) {
  const InclusionData d = inclusion_data(s, x, level);
  const double b4 = d.b2x * d.b2x;
  const double c_base = bit(mask, 0)
                            ? d.m * (4.0 - d.m) * d.N0 / (8.0 * b4 * d.f20)
                            : -(d.m * d.m) / (8.0 * d.b2x) * d.N0;
  const double c_lap = (bit(mask, 1) ? d.m / d.b2x : d.m / 2.0) * d.lap_lnb;
  const double c_grad = bit(mask, 2) ? d.m * d.m / (8.0 * b4) : d.m * d.m / 8.0;
  SplitVector out{scaled(c_base, d.H), scaled(c_lap, d.G0)};
  axpy(c_grad, d.gradN0, out.fiber);
  return out;
}

SplitVector inclusion_laplacian_base(const DwpSpace& s, const Vec& x, const Vec& level,
                                     unsigned mask) {
  const InclusionData d = inclusion_data(s, x, level);
  const double b4 = d.b2x * d.b2x;
  const double b6 = b4 * d.b2x;
  const double c_base = bit(mask, 0)
                            ? 3.0 * d.m * d.N0 / (8.0 * b4 * d.f20)
                            : -d.m * d.N0 / (8.0 * d.b2x * d.f20);
  const double c_fiber =
      bit(mask, 1)
          ? d.m / (4.0 * b4) * d.lap_b2 - 3.0 * d.m / (8.0 * b6) * d.Ntil +
                d.m * d.m * d.N0 / (8.0 * b4 * d.f20)
          : d.m * d.m * d.N0 / (8.0 * d.f20) - d.m / (8.0 * b4) * d.Ntil;
  return {scaled(c_base, d.H), scaled(c_fiber, d.G0)};
}

Vec projection_tension_base(const DwpSpace& s, const Vec& p, unsigned mask) {
  SplitVector sv = split_vector(s, p);
  const Vec& x = sv.base;
  const Vec& y = sv.fiber;
  check_factor_point(s.base, x, "projection point (base part)");
  check_factor_point(s.fiber, y, "projection point (fiber part)");
  const Vec W = grad(s.base, log_warping(s.b2), x);
  const double n = static_cast<double>(s.n);
  const double c = bit(mask, 0) ? n / s.f2.eval_value(y) : n;
  return scaled(c, W);
}

Vec projection_bitension_base(const DwpSpace& s, const Vec& p, unsigned mask) {
  SplitVector sv = split_vector(s, p);
  const Vec& x = sv.base;
  const Vec& y = sv.fiber;
  check_factor_point(s.base, x, "projection point (base part)");
  check_factor_point(s.fiber, y, "projection point (fiber part)");

  const double n = static_cast<double>(s.n);
  const double m = static_cast<double>(s.m);
  const double f2y = s.f2.eval_value(y);
  const double b2x = s.b2.eval_value(x);

  const ScalarFieldExpr lnb = log_warping(s.b2);
  const std::vector<Jet> Wjets = gradient_jets(s.base, lnb, x, 2);
  Vec Wvals(static_cast<std::size_t>(s.m));
  for (int i = 0; i < s.m; ++i) Wvals[static_cast<std::size_t>(i)] = Wjets[static_cast<std::size_t>(i)].value();

  const Vec trace2 = trace_nabla2_vector(s.base, x, Wjets);
  const Vec ricW = ricci_sharp(s.base, x, Wvals);

  // |W|^2 as a jet, then its gradient.
  const int d = s.m;
  const JetLayout* ly = JetLayout::get(d, 1);
  const std::vector<Jet> gm = metric_jets(s.base, x, 1);
  Jet q = Jet::constant(ly, 0.0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      q = q + gm[static_cast<std::size_t>(i * d + j)] * Wjets[static_cast<std::size_t>(i)].truncated(1) *
                  Wjets[static_cast<std::size_t>(j)].truncated(1);
  const Vec gradQ = gradient_of_jet(s.base, x, q);

  const double Ny = gradient_norm2_value(s.fiber, s.f2, y);
  const double lap_f2 = laplace_beltrami(s.fiber, s.f2, y);

  const double c1 = bit(mask, 0) ? n / (f2y * f2y) : n / f2y;
  const double c2 = bit(mask, 1) ? n * n / (2.0 * f2y * f2y) : n * n / 2.0;
  const double c3 = bit(mask, 2)
                        ? n / (b2x * f2y * f2y * f2y) * ((2.0 - m / 2.0) * Ny - f2y * lap_f2)
                        : 0.0;

  Vec out = zeros(s.m);
  axpy(c1, trace2, out);
  axpy(c1, ricW, out);
  axpy(c2, gradQ, out);
  axpy(c3, Wvals, out);
  return out;
}

// Λ-operator (fiber-target) for the domain-warped product map with φ on the
// fiber factor: acts on v = dφ(M), M = grad_F(ln f).
Vec domain_operator_base(const DwpSpace& s, const SmoothMap& phi, const Vec& x, const Vec& y,
                         unsigned mask) {
  const double m = static_cast<double>(s.m);
  const double n = static_cast<double>(s.n);
  const double b2x = s.b2.eval_value(x);
  const double f2y = s.f2.eval_value(y);
  const double b4 = b2x * b2x;

  const ScalarFieldExpr lnf = log_warping(s.f2);
  const std::vector<Jet> Mjets = gradient_jets(s.fiber, lnf, y, 2);
  Vec Mvals(static_cast<std::size_t>(s.n));
  for (int a = 0; a < s.n; ++a) Mvals[static_cast<std::size_t>(a)] = Mjets[static_cast<std::size_t>(a)].value();

  const std::vector<Jet> vjets = pushforward_field_jets(phi, y, Mjets);
  Vec vvals(vjets.size());
  for (std::size_t a = 0; a < vjets.size(); ++a) vvals[a] = vjets[a].value();

  const Vec J = jacobi(phi, y, vjets);

  Vec deriv_term;
  if (bit(mask, 1)) {
    deriv_term = pullback_derivative(phi, y, vjets, Mvals);
  } else {
    // grad_F |v|^2 with |v|^2(y) = (g_F)_{ab}(φ(y)) v^a(y) v^b(y).
    const int d = s.n;
    const JetLayout* ly = JetLayout::get(d, 1);
    const std::vector<Jet> mj = map_jets(phi, y, 2);
    std::vector<Jet> inner_trunc;
    inner_trunc.reserve(mj.size());
    for (const Jet& c : mj) inner_trunc.push_back(c.truncated(1));
    const Vec phiy = map_values(phi, y);
    Jet q = Jet::constant(ly, 0.0);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        const Jet gab = compose(eval_jet(s.fiber.comp(a, b), phiy, 1), inner_trunc);
        q = q + gab * vjets[static_cast<std::size_t>(a)].truncated(1) *
                    vjets[static_cast<std::size_t>(b)].truncated(1);
      }
    deriv_term = gradient_of_jet(s.fiber, y, q);
  }

  const double cJ = bit(mask, 0) ? -m / b4 : -m / b2x;
  const double cD = bit(mask, 1) ? m * m / b4 : m * m / 2.0;
  double cS = 0.0;
  if (bit(mask, 2)) {
    const double lap_invb2 = laplace_beltrami(s.base, inverse_warping(s.b2), x);
    const double Ntil = gradient_norm2_value(s.base, s.b2, x);
    cS = m * (lap_invb2 / f2y - n * Ntil / (2.0 * b4 * b2x * f2y));
  }

  Vec out = zeros(s.n);
  axpy(cJ, J, out);
  axpy(cD, deriv_term, out);
  axpy(cS, vvals, out);
  return out;
}

ProductDomainFields product_domain_base(const DwpSpace& s, const SmoothMap& phi, const Vec& p,
                                        unsigned tau_mask, unsigned proj_mask, unsigned op_mask) {
  check_self_map(phi, s.fiber, "domain-warped product map");
  SplitVector sv = split_vector(s, p);
  const Vec& x = sv.base;
  const Vec& y = sv.fiber;
  check_factor_point(s.base, x, "product point (base part)");
  check_factor_point(s.fiber, y, "product point (fiber part)");

  const double m = static_cast<double>(s.m);
  const double n = static_cast<double>(s.n);
  const double b2x = s.b2.eval_value(x);
  const double f2y = s.f2.eval_value(y);

  // Pointwise harmonicity guard; callers should run require_harmonic for a
  // chart-wide validation before sweeping.
  {
    const Vec tau_phi = tension(phi, y);
    if (euclid_norm(tau_phi) > 1e-6)
      throw DomainError("domain-warped product map: '" + phi.name +
                        "' is not harmonic at the evaluation point (|tension| = " +
                        std::to_string(euclid_norm(tau_phi)) + ")");
  }

  ProductDomainFields out;

  const Vec W = grad(s.base, log_warping(s.b2), x);
  const Vec M = grad(s.fiber, log_warping(s.f2), y);
  const Vec dphiM = differential(phi, y, M);
  const double cb = bit(tau_mask, 0) ? n / f2y : n;
  const double cf = bit(tau_mask, 1) ? m / b2x : m;
  out.tension = {scaled(cb, W), scaled(cf, dphiM)};

  out.operator_value = domain_operator_base(s, phi, x, y, op_mask);
  out.bitension = {projection_bitension_base(s, p, proj_mask), out.operator_value};
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public API.
// ---------------------------------------------------------------------------

const FormulaCatalog& formula_catalog(const std::string& id) {
  const auto& reg = registry();
  const auto it = reg.find(id);
  if (it == reg.end()) throw std::invalid_argument("unknown formula id '" + id + "'");
  return it->second;
}

std::vector<std::string> formula_ids() {
  std::vector<std::string> out;
  for (const auto& [id, cat] : registry()) out.push_back(id);
  return out;
}

SmoothMap inclusion_map(const DwpSpace& s, FactorSide side, const Vec& level) {
  if (side == FactorSide::base) {
    check_factor_point(s.fiber, level, "inclusion level");
    std::vector<ScalarFieldExpr> comps;
    comps.reserve(static_cast<std::size_t>(s.m + s.n));
    for (int i = 0; i < s.m; ++i) comps.emplace_back(var(i), s.base.coords);
    for (int j = 0; j < s.n; ++j)
      comps.emplace_back(num(level[static_cast<std::size_t>(j)]), s.base.coords);
    return make_map(s.name + "-inclusion-base", s.base, s.product_warped, comps);
  }
  check_factor_point(s.base, level, "inclusion level");
  std::vector<ScalarFieldExpr> comps;
  comps.reserve(static_cast<std::size_t>(s.m + s.n));
  for (int i = 0; i < s.m; ++i)
    comps.emplace_back(num(level[static_cast<std::size_t>(i)]), s.fiber.coords);
  for (int j = 0; j < s.n; ++j) comps.emplace_back(var(j), s.fiber.coords);
  return make_map(s.name + "-inclusion-fiber", s.fiber, s.product_warped, comps);
}

SmoothMap projection_map(const DwpSpace& s, FactorSide side) {
  const auto& coords = s.product_warped.coords;
  if (side == FactorSide::base) {
    std::vector<ScalarFieldExpr> comps;
    for (int i = 0; i < s.m; ++i) comps.emplace_back(var(i), coords);
    return make_map(s.name + "-projection-base", s.product_warped, s.base, comps);
  }
  std::vector<ScalarFieldExpr> comps;
  for (int j = 0; j < s.n; ++j) comps.emplace_back(var(s.m + j), coords);
  return make_map(s.name + "-projection-fiber", s.product_warped, s.fiber, comps);
}

SmoothMap product_map_domain_warped(const DwpSpace& s, FactorSide phi_side,
                                    const SmoothMap& phi) {
  const auto& coords = s.product_warped.coords;
  std::vector<ScalarFieldExpr> comps;
  comps.reserve(static_cast<std::size_t>(s.m + s.n));
  if (phi_side == FactorSide::fiber) {
    check_self_map(phi, s.fiber, "domain-warped product map");
    for (int i = 0; i < s.m; ++i) comps.emplace_back(var(i), coords);
    std::vector<int> remap(static_cast<std::size_t>(s.n));
    for (int j = 0; j < s.n; ++j) remap[static_cast<std::size_t>(j)] = s.m + j;
    for (const ScalarFieldExpr& c : phi.components) comps.push_back(c.with_vars(coords, remap));
  } else {
    check_self_map(phi, s.base, "domain-warped product map");
    std::vector<int> remap(static_cast<std::size_t>(s.m));
    for (int i = 0; i < s.m; ++i) remap[static_cast<std::size_t>(i)] = i;
    for (const ScalarFieldExpr& c : phi.components) comps.push_back(c.with_vars(coords, remap));
    for (int j = 0; j < s.n; ++j) comps.emplace_back(var(s.m + j), coords);
  }
  return make_map(s.name + "-product-domain", s.product_warped, s.product_plain, comps);
}

SmoothMap product_map_codomain_warped(const DwpSpace& s, const SmoothMap& phi) {
  check_self_map(phi, s.fiber, "codomain-warped product map");
  const auto& coords = s.product_plain.coords;
  std::vector<ScalarFieldExpr> comps;
  comps.reserve(static_cast<std::size_t>(s.m + s.n));
  for (int i = 0; i < s.m; ++i) comps.emplace_back(var(i), coords);
  std::vector<int> remap(static_cast<std::size_t>(s.n));
  for (int j = 0; j < s.n; ++j) remap[static_cast<std::size_t>(j)] = s.m + j;
  for (const ScalarFieldExpr& c : phi.components) comps.push_back(c.with_vars(coords, remap));
  return make_map(s.name + "-product-codomain", s.product_plain, s.product_warped, comps);
}

void require_harmonic(const SmoothMap& phi, double tol, int samples, std::uint64_t seed) {
  SplitMix64 rng(seed);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const Vec y = sample_chart_point(phi.source, rng);
    worst = std::max(worst, euclid_norm(tension(phi, y)));
  }
  if (worst > tol) {
    std::ostringstream msg;
    msg << "map '" << phi.name << "' is not harmonic: max |tension| = " << worst
        << " over " << samples << " samples (tolerance " << tol << ")";
    throw DomainError(msg.str());
  }
}

SplitVector inclusion_tension(const DwpSpace& s, FactorSide side, const Vec& point,
                              const Vec& level, unsigned mask) {
  check_mask(formula_catalog(side == FactorSide::base ? "inclusion-base-tension"
                                                      : "inclusion-fiber-tension"),
             mask);
  if (side == FactorSide::base) return inclusion_tension_base(s, point, level, mask);
  return swap_slots(inclusion_tension_base(swapped_space(s), point, level, mask));
}

SplitVector inclusion_bitension(const DwpSpace& s, FactorSide side, const Vec& point,
                                const Vec& level, unsigned mask) {
  check_mask(formula_catalog(side == FactorSide::base ? "inclusion-base-bitension"
                                                      : "inclusion-fiber-bitension"),
             mask);
  if (side == FactorSide::base) return inclusion_bitension_base(s, point, level, mask);
  return swap_slots(inclusion_bitension_base(swapped_space(s), point, level, mask));
}

SplitVector inclusion_laplacian_term(const DwpSpace& s, FactorSide side, const Vec& point,
                                     const Vec& level, unsigned mask) {
  check_mask(formula_catalog(side == FactorSide::base ? "inclusion-base-laplacian"
                                                      : "inclusion-fiber-laplacian"),
             mask);
  if (side == FactorSide::base) return inclusion_laplacian_base(s, point, level, mask);
  return swap_slots(inclusion_laplacian_base(swapped_space(s), point, level, mask));
}

const char* to_string(BiharmonicVerdict v) {
  switch (v) {
    case BiharmonicVerdict::harmonic: return "harmonic";
    case BiharmonicVerdict::proper_biharmonic: return "proper_biharmonic";
    case BiharmonicVerdict::not_biharmonic: return "not_biharmonic";
    case BiharmonicVerdict::indeterminate: return "indeterminate";
  }
  return "unknown";
}

BiharmonicClass classify_inclusion(const DwpSpace& s, FactorSide side, const Vec& level,
                                   double tol, int samples, std::uint64_t seed) {
  if (tol <= 0.0) throw std::invalid_argument("classification tolerance must be positive");
  if (samples <= 0) throw std::invalid_argument("classification needs at least one sample");

  // Work on the base side of a possibly swapped space so one code path serves both.
  const DwpSpace w = (side == FactorSide::fiber) ? swapped_space(s) : s;

  const SmoothMap inc = inclusion_map(w, FactorSide::base, level);
  SplitMix64 rng(seed);
  double tension_max = 0.0;
  double bitension_max = 0.0;
  double bconst_max = 0.0;
  for (int k = 0; k < samples; ++k) {
    const Vec x = sample_chart_point(w.base, rng);
    const Vec tau = tension(inc, x);
    const Vec tau2 = bitension_oracle(inc, x);
    const Vec img = map_values(inc, x);
    const Vec g = metric_values(w.product_warped, img);
    tension_max = std::max(tension_max, std::sqrt(std::max(0.0, inner(g, tau, tau))));
    bitension_max = std::max(bitension_max, std::sqrt(std::max(0.0, inner(g, tau2, tau2))));
    const Vec H = grad(w.base, w.b2, x);
    bconst_max = std::max(bconst_max, std::sqrt(std::max(0.0, inner(metric_values(w.base, x), H, H))));
  }

  // Three-way band: zero when comfortably under tol, nonzero when comfortably
  // above, undecided in between.
  enum class Band { zero, nonzero, undecided };
  const auto band = [tol](double v) {
    if (v <= tol / 10.0) return Band::zero;
    if (v >= 10.0 * tol) return Band::nonzero;
    return Band::undecided;
  };

  BiharmonicClass out;
  out.tol = tol;
  out.tension_norm = tension_max;
  out.bitension_norm = bitension_max;

  const Band bt = band(tension_max);
  const Band b2 = band(bitension_max);
  if (bt == Band::undecided) {
    out.verdict = BiharmonicVerdict::indeterminate;
  } else if (bt == Band::zero) {
    out.verdict = BiharmonicVerdict::harmonic;
  } else if (b2 == Band::undecided) {
    out.verdict = BiharmonicVerdict::indeterminate;
  } else if (b2 == Band::zero) {
    out.verdict = BiharmonicVerdict::proper_biharmonic;
  } else {
    out.verdict = BiharmonicVerdict::not_biharmonic;
  }

  // Analytic side conditions evaluated at the level: criticality of the
  // opposite warping and of its gradient-norm, plus constancy of the
  // same-side warping across the sampled chart.
  const Vec G0 = grad(w.fiber, w.f2, level);
  const double critf = std::sqrt(std::max(0.0, inner(metric_values(w.fiber, level), G0, G0)));
  const Vec gradN0 =
      gradient_of_jet(w.fiber, level, gradient_norm2_jet(w.fiber, w.f2, level, 1));
  const double critN =
      std::sqrt(std::max(0.0, inner(metric_values(w.fiber, level), gradN0, gradN0)));

  const Band zb = band(bconst_max);
  const Band zf = band(critf);
  const Band zn = band(critN);
  if (zf == Band::zero) {
    out.condition_verdict = BiharmonicVerdict::harmonic;
  } else if (zf == Band::nonzero) {
    if (zb == Band::zero) {
      if (zn == Band::zero)
        out.condition_verdict = BiharmonicVerdict::proper_biharmonic;
      else if (zn == Band::nonzero)
        out.condition_verdict = BiharmonicVerdict::not_biharmonic;
    } else if (zb == Band::nonzero && w.m != 4) {
      // With a nonconstant same-side warping the leading bitension term
      // carries the factor m (4 - m); it only vanishes for m == 4, so skip
      // the analytic call in that edge case.
      out.condition_verdict = BiharmonicVerdict::not_biharmonic;
    }
  }
  return out;
}

Vec projection_tension(const DwpSpace& s, FactorSide side, const Vec& p, unsigned mask) {
  check_mask(formula_catalog(side == FactorSide::base ? "projection-base-tension"
                                                      : "projection-fiber-tension"),
             mask);
  if (side == FactorSide::base) return projection_tension_base(s, p, mask);
  const DwpSpace w = swapped_space(s);
  const SplitVector sv = split_vector(s, p);
  return projection_tension_base(w, joint_point(sv.fiber, sv.base), mask);
}

Vec projection_bitension(const DwpSpace& s, FactorSide side, const Vec& p, unsigned mask) {
  check_mask(formula_catalog(side == FactorSide::base ? "projection-base-bitension"
                                                      : "projection-fiber-bitension"),
             mask);
  if (side == FactorSide::base) return projection_bitension_base(s, p, mask);
  const DwpSpace w = swapped_space(s);
  const SplitVector sv = split_vector(s, p);
  return projection_bitension_base(w, joint_point(sv.fiber, sv.base), mask);
}

ProductDomainFields product_domain_warped(const DwpSpace& s, const SmoothMap& phi, const Vec& p,
                                          unsigned tau_mask, unsigned proj_mask,
                                          unsigned op_mask) {
  check_mask(formula_catalog("product-domain-tension"), tau_mask);
  check_mask(formula_catalog("projection-base-bitension"), proj_mask);
  check_mask(formula_catalog("product-domain-operator"), op_mask);
  return product_domain_base(s, phi, p, tau_mask, proj_mask, op_mask);
}

ProductDomainFields product_domain_warped_mirror(const DwpSpace& s, const SmoothMap& phi,
                                                 const Vec& p, unsigned tau_mask,
                                                 unsigned proj_mask, unsigned op_mask) {
  check_mask(formula_catalog("product-domain-mirror-tension"), tau_mask);
  check_mask(formula_catalog("projection-fiber-bitension"), proj_mask);
  check_mask(formula_catalog("product-domain-mirror-operator"), op_mask);
  const DwpSpace w = swapped_space(s);
  const SplitVector sv = split_vector(s, p);
  // In the swapped space the (tension, bitension) slots come back exchanged;
  // the operator value already lives on the original base factor.
  ProductDomainFields f =
      product_domain_base(w, phi, joint_point(sv.fiber, sv.base), tau_mask, proj_mask, op_mask);
  f.tension = swap_slots(f.tension);
  f.bitension = swap_slots(f.bitension);
  return f;
}

SplitVector codomain_warped_tension(const DwpSpace& s, const SmoothMap& phi, const Vec& p) {
  check_self_map(phi, s.fiber, "codomain-warped product map");
  SplitVector sv = split_vector(s, p);
  const Vec& x = sv.base;
  const Vec& y = sv.fiber;
  check_factor_point(s.base, x, "product point (base part)");
  check_factor_point(s.fiber, y, "product point (fiber part)");

  const Vec phiy = map_values(phi, y);
  check_factor_point(s.fiber, phiy, "image of the fiber point under phi");
  const double e = energy_density(phi, y);
  const double f2p = s.f2.eval_value(phiy);
  const double b2x = s.b2.eval_value(x);
  const Vec H = grad(s.base, s.b2, x);
  const Vec Gp = grad(s.fiber, s.f2, phiy);
  const double m = static_cast<double>(s.m);
  return {scaled(-e / f2p, H), scaled(-m / (2.0 * b2x), Gp)};
}

CodomainConditions codomain_warped_conditions(const DwpSpace& s, const SmoothMap& phi,
                                              const Vec& p) {
  check_self_map(phi, s.fiber, "codomain-warped product map");
  SplitVector sv = split_vector(s, p);
  const Vec& x = sv.base;
  const Vec& y = sv.fiber;
  check_factor_point(s.base, x, "product point (base part)");
  check_factor_point(s.fiber, y, "product point (fiber part)");
  const Vec phiy = map_values(phi, y);
  check_factor_point(s.fiber, phiy, "image of the fiber point under phi");

  const double m = static_cast<double>(s.m);
  const double b2x = s.b2.eval_value(x);
  const double f2p = s.f2.eval_value(phiy);
  const double e = energy_density(phi, y);

  const Vec H = grad(s.base, s.b2, x);
  const Vec Gp = grad(s.fiber, s.f2, phiy);
  const double Np = inner(metric_values(s.fiber, phiy), Gp, Gp);
  const double Ntil = inner(metric_values(s.base, x), H, H);
  const Vec gradNtil =
      gradient_of_jet(s.base, x, gradient_norm2_jet(s.base, s.b2, x, 1));

  const std::vector<Jet> Hjets = gradient_jets(s.base, s.b2, x, 2);
  const Vec traceH = trace_nabla2_vector(s.base, x, Hjets);
  const Vec ricH = ricci_sharp(s.base, x, H);

  const double lap_b2 = laplace_beltrami(s.base, s.b2, x);
  const double lap_lnb = laplace_beltrami(s.base, log_warping(s.b2), x);

  const ScalarFieldExpr lnf = log_warping(s.f2);
  const std::vector<Jet> mj2 = map_jets(phi, y, 2);
  std::vector<Jet> mj2_trunc;
  for (const Jet& c : mj2) mj2_trunc.push_back(c.truncated(2));

  // Ambiguous scalar slots: "apply the fiber Laplacian to h, then compose
  // with φ" versus "pull h back along φ, then apply the fiber Laplacian".
  const double s1_compose = laplace_beltrami(s.fiber, s.f2, phiy);
  const double s2_compose = laplace_beltrami(s.fiber, lnf, phiy);
  const Jet f2_pull = compose(eval_jet(s.f2, phiy, 2), mj2_trunc);
  const Jet lnf_pull = compose(eval_jet(lnf, phiy, 2), mj2_trunc);
  const double s1_pullback = laplace_of_scalar_jets(s.fiber, y, f2_pull);
  const double s2_pullback = laplace_of_scalar_jets(s.fiber, y, lnf_pull);

  const auto base_condition = [&](double s1, double s2) {
    Vec out = zeros(s.m);
    axpy(-e, traceH, out);
    axpy(-e, ricH, out);
    axpy(e * e / 2.0, gradNtil, out);
    const double c = (m / 4.0) * (e / f2p - m / (2.0 * b2x)) * Np + (m / (4.0 * b2x)) * s1 +
                     (e / 2.0) * s2;
    axpy(c, H, out);
    return out;
  };

  // Jacobi operator applied to the section y ↦ grad_F f^2 (φ(y)).
  const std::vector<Jet> Gjets_at_phiy = gradient_jets(s.fiber, s.f2, phiy, 2);
  std::vector<Jet> Gsection;
  Gsection.reserve(Gjets_at_phiy.size());
  for (const Jet& c : Gjets_at_phiy) Gsection.push_back(compose(c, mj2_trunc));
  const Vec JG = jacobi(phi, y, Gsection);

  const Vec gradNp =
      gradient_of_jet(s.fiber, phiy, gradient_norm2_jet(s.fiber, s.f2, phiy, 1));

  // Ambiguous vector slot: push the gradient of e(φ) forward, or take the
  // gradient of the composed scalar.
  const Jet e_jet_at_y = energy_density_jet(phi, y, 1);
  const Vec grad_e_at_y = gradient_of_jet(s.fiber, y, e_jet_at_y);
  Vec E_pullback = grad_e_at_y;
  Vec E_compose;
  {
    const Jet e_jet_at_phiy = energy_density_jet(phi, phiy, 1);
    const Vec grad_e_at_phiy = gradient_of_jet(s.fiber, phiy, e_jet_at_phiy);
    E_compose = differential(phi, y, grad_e_at_phiy);
  }

  const auto fiber_condition = [&](const Vec& E) {
    Vec out = zeros(s.n);
    axpy(-m / 2.0, JG, out);
    axpy(m * m / 8.0, gradNp, out);
    const double c = -(e / 2.0) * (e / f2p - m / (2.0 * b2x)) * Ntil +
                     (e / (2.0 * f2p)) * lap_b2 + (m / 4.0) * lap_lnb;
    axpy(c, Gp, out);
    axpy(-Ntil / (2.0 * b2x), E, out);
    return out;
  };

  CodomainConditions out;
  out.base_condition_compose = base_condition(s1_compose, s2_compose);
  out.base_condition_pullback = base_condition(s1_pullback, s2_pullback);
  out.fiber_condition_compose = fiber_condition(E_compose);
  out.fiber_condition_pullback = fiber_condition(E_pullback);

  const SmoothMap full = product_map_codomain_warped(s, phi);
  const Vec tau2 = bitension_oracle(full, p);
  out.oracle_bitension = split_vector(s, tau2);
  return out;
}

}  // namespace warpcheck
