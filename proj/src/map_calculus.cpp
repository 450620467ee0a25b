// SPDX-License-Identifier: MIT
#include "warpcheck/map_calculus.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>

namespace warpcheck {

namespace {

size_t sq(int dim, int i, int j) {
  return static_cast<size_t>(i) * static_cast<size_t>(dim) + static_cast<size_t>(j);
}

std::vector<double> invert_values_local(const MetricPatch& m, const Vec& p) {
  // Reuse the jet inverter at order 0 to keep a single pivoting policy.
  std::vector<Jet> ginv = jet_mat_inverse(metric_jets(m, p, 0), m.dim);
  std::vector<double> out;
  out.reserve(ginv.size());
  for (const auto& j : ginv) out.push_back(j.value());
  return out;
}

/// Orthonormal source frame at p (Gram-Schmidt); rows are frame vectors.
std::vector<Vec> source_frame(const MetricPatch& m, const Vec& p) {
  const int d = m.dim;
  const std::vector<double> g = metric_values(m, p);
  std::vector<Vec> frame;
  frame.reserve(static_cast<size_t>(d));
  for (int a = 0; a < d; ++a) {
    Vec e(static_cast<size_t>(d), 0.0);
    e[static_cast<size_t>(a)] = 1.0;
    for (const Vec& prev : frame) {
      const double proj = inner(g, e, prev);
      for (int i = 0; i < d; ++i) e[static_cast<size_t>(i)] -= proj * prev[static_cast<size_t>(i)];
    }
    const double len2 = inner(g, e, e);
    if (!(len2 > 1e-14)) throw DomainError("metric is not positive definite at point");
    const double inv_len = 1.0 / std::sqrt(len2);
    for (double& c : e) c *= inv_len;
    frame.push_back(std::move(e));
  }
  return frame;
}

/// Trace of a bilinear array A_{ij} (values) against the source metric.
Vec trace_bilinear(const MetricPatch& m, const Vec& p, int tdim,
                   const std::function<double(int, int, int)>& entry, TraceMode mode) {
  const int d = m.dim;
  Vec out(static_cast<size_t>(tdim), 0.0);
  if (mode == TraceMode::contraction) {
    const std::vector<double> ginv = invert_values_local(m, p);
    for (int a = 0; a < tdim; ++a) {
      double acc = 0.0;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) acc += ginv[sq(d, i, j)] * entry(a, i, j);
      out[static_cast<size_t>(a)] = acc;
    }
  } else {
    const std::vector<Vec> frame = source_frame(m, p);
    for (int a = 0; a < tdim; ++a) {
      double acc = 0.0;
      for (const Vec& e : frame)
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j)
            acc += e[static_cast<size_t>(i)] * e[static_cast<size_t>(j)] * entry(a, i, j);
      out[static_cast<size_t>(a)] = acc;
    }
  }
  return out;
}

struct SecondDerivativeData {
  std::vector<Jet> t;  // (∇^φ_j v)^a, order 1, [a][j]
  std::vector<double> a2;  // ((∇^φ)² v)^a_{ij}, [a][i][j]
};

/// Assembles first and second pullback covariant derivatives of a section.
SecondDerivativeData second_pullback_derivative(const SmoothMap& f, const Vec& p,
                                                const std::vector<Jet>& v) {
  const int sd = f.source.dim;
  const int td = f.target.dim;
  if (static_cast<int>(v.size()) != td)
    throw DomainError("section component count does not match target dimension");
  for (const auto& j : v)
    if (j.layout()->order() < 2) throw DomainError("section jets must have order >= 2");

  const std::vector<Jet> mj = map_jets(f, p, 2);
  const std::vector<Jet> gphi = christoffel_along(f, p, 1);
  auto gp = [&](int a, int b, int c) -> const Jet& {
    return gphi[(static_cast<size_t>(a) * td + b) * static_cast<size_t>(td) + c];
  };
  const std::vector<Jet> sgam = christoffel_jets(f.source, p, 0);
  auto sg = [&](int k, int i, int j) {
    return sgam[(static_cast<size_t>(k) * sd + i) * static_cast<size_t>(sd) + j].value();
  };

  std::vector<Jet> dphi;  // ∂_jφ^b, order 1, [b][j]
  dphi.reserve(static_cast<size_t>(td) * sd);
  for (int b = 0; b < td; ++b)
    for (int j = 0; j < sd; ++j) dphi.push_back(derivative(mj[static_cast<size_t>(b)], j));
  auto dp = [&](int b, int j) -> const Jet& { return dphi[sq(sd, b, j)]; };

  SecondDerivativeData out;
  out.t.reserve(static_cast<size_t>(td) * sd);
  for (int a = 0; a < td; ++a)
    for (int j = 0; j < sd; ++j) {
      Jet acc = derivative(v[static_cast<size_t>(a)], j).truncated(1);
      for (int b = 0; b < td; ++b)
        for (int c = 0; c < td; ++c)
          acc += gp(a, b, c) * dp(b, j) * v[static_cast<size_t>(c)].truncated(1);
      out.t.push_back(std::move(acc));
    }
  auto tat = [&](int a, int j) -> const Jet& { return out.t[sq(sd, a, j)]; };

  out.a2.assign(static_cast<size_t>(td) * sd * sd, 0.0);
  for (int a = 0; a < td; ++a)
    for (int i = 0; i < sd; ++i)
      for (int j = 0; j < sd; ++j) {
        double acc = tat(a, j).deriv(i);
        for (int b = 0; b < td; ++b)
          for (int c = 0; c < td; ++c)
            acc += gp(a, b, c).value() * dp(b, i).value() * tat(c, j).value();
        for (int k = 0; k < sd; ++k) acc -= sg(k, i, j) * tat(a, k).value();
        out.a2[(static_cast<size_t>(a) * sd + i) * static_cast<size_t>(sd) + j] = acc;
      }
  return out;
}

/// trace_g R(dφ, v) dφ at p, with [R(X,Y)Z]^a = R^a_{bcd} Z^b X^c Y^d.
Vec curvature_term(const SmoothMap& f, const Vec& p, const Vec& vval, TraceMode mode) {
  const int sd = f.source.dim;
  const int td = f.target.dim;
  const Vec phip = map_values(f, p);
  const CurvatureAt cur = curvature(f.target, phip);
  const std::vector<Jet> mj = map_jets(f, p, 1);
  std::vector<double> dphi(static_cast<size_t>(td) * sd);
  for (int b = 0; b < td; ++b)
    for (int j = 0; j < sd; ++j) dphi[sq(sd, b, j)] = mj[static_cast<size_t>(b)].deriv(j);
  auto entry = [&](int a, int i, int j) {
    // [R(dφ_i, v) dφ_j]^a = R^a_{bcd} (dφ_j)^b (dφ_i)^c v^d
    double acc = 0.0;
    for (int b = 0; b < td; ++b)
      for (int c = 0; c < td; ++c)
        for (int dcomp = 0; dcomp < td; ++dcomp)
          acc += cur.riem(a, b, c, dcomp) * dphi[sq(sd, b, j)] * dphi[sq(sd, c, i)] *
                 vval[static_cast<size_t>(dcomp)];
    return acc;
  };
  return trace_bilinear(f.source, p, td, entry, mode);
}

}  // namespace

SmoothMap make_map(std::string name, MetricPatch source, MetricPatch target,
                   std::vector<ScalarFieldExpr> components) {
  if (static_cast<int>(components.size()) != target.dim)
    throw std::invalid_argument("map component count must equal target dimension");
  for (const auto& c : components) {
    if (!c.valid()) throw std::invalid_argument("map component expression is empty");
    if (c.vars() != source.coords)
      throw std::invalid_argument("map components must use the source coordinates");
  }
  SmoothMap f;
  f.name = std::move(name);
  f.source = std::move(source);
  f.target = std::move(target);
  f.components = std::move(components);
  return f;
}

SmoothMap identity_map(const MetricPatch& m) {
  std::vector<ScalarFieldExpr> comps;
  comps.reserve(static_cast<size_t>(m.dim));
  for (const auto& c : m.coords) comps.push_back(parse(c, m.coords));
  return make_map("id_" + m.name, m, m, std::move(comps));
}

Vec map_values(const SmoothMap& f, const Vec& p) {
  Vec out;
  out.reserve(f.components.size());
  for (const auto& c : f.components) out.push_back(c.eval_value(p));
  return out;
}

std::vector<Jet> map_jets(const SmoothMap& f, const Vec& p, int order) {
  if (static_cast<int>(p.size()) != f.source.dim)
    throw DomainError("point dimension does not match map source");
  std::vector<Jet> out;
  out.reserve(f.components.size());
  for (const auto& c : f.components) out.push_back(eval_jet(c, p, order));
  return out;
}

Vec differential(const SmoothMap& f, const Vec& p, const Vec& x) {
  if (x.size() != static_cast<size_t>(f.source.dim))
    throw DomainError("vector dimension does not match map source");
  const std::vector<Jet> mj = map_jets(f, p, 1);
  Vec out(static_cast<size_t>(f.target.dim), 0.0);
  for (int a = 0; a < f.target.dim; ++a)
    for (int i = 0; i < f.source.dim; ++i)
      out[static_cast<size_t>(a)] += mj[static_cast<size_t>(a)].deriv(i) * x[static_cast<size_t>(i)];
  return out;
}

std::vector<Jet> christoffel_along(const SmoothMap& f, const Vec& p, int order) {
  const Vec phip = map_values(f, p);
  const std::vector<Jet> tgam = christoffel_jets(f.target, phip, order);
  std::vector<Jet> inner_jets = map_jets(f, p, order);
  std::vector<Jet> out;
  out.reserve(tgam.size());
  for (const auto& g : tgam) out.push_back(compose(g, inner_jets));
  return out;
}

SectionJets section_from_exprs(std::vector<ScalarFieldExpr> components) {
  return [components = std::move(components)](const Vec& p, int order) {
    std::vector<Jet> out;
    out.reserve(components.size());
    for (const auto& c : components) out.push_back(eval_jet(c, p, order));
    return out;
  };
}

std::vector<Jet> tension_jets(const SmoothMap& f, const Vec& p, int order) {
  if (order < 0 || order > 2) throw DomainError("tension jets support orders 0..2");
  const int sd = f.source.dim;
  const int td = f.target.dim;
  const std::vector<Jet> mj = map_jets(f, p, order + 2);

  std::vector<Jet> gtrunc;
  const std::vector<Jet> gj = metric_jets(f.source, p, order);
  gtrunc.reserve(gj.size());
  for (const auto& j : gj) gtrunc.push_back(j);
  const std::vector<Jet> ginv = jet_mat_inverse(std::move(gtrunc), sd);

  const std::vector<Jet> sgam = christoffel_jets(f.source, p, order);
  auto sg = [&](int k, int i, int j) -> const Jet& {
    return sgam[(static_cast<size_t>(k) * sd + i) * static_cast<size_t>(sd) + j];
  };
  const std::vector<Jet> gphi = christoffel_along(f, p, order);
  auto gp = [&](int a, int b, int c) -> const Jet& {
    return gphi[(static_cast<size_t>(a) * td + b) * static_cast<size_t>(td) + c];
  };

  // ∂_iφ^a truncated to the working order, and second derivatives.
  std::vector<Jet> dphi(static_cast<size_t>(td) * sd, Jet{});
  for (int a = 0; a < td; ++a)
    for (int i = 0; i < sd; ++i)
      dphi[sq(sd, a, i)] = derivative(mj[static_cast<size_t>(a)], i);

  const JetLayout* layout = ginv[0].layout();
  std::vector<Jet> tau(static_cast<size_t>(td), Jet::constant(layout, 0.0));
  for (int a = 0; a < td; ++a) {
    Jet acc = Jet::constant(layout, 0.0);
    for (int i = 0; i < sd; ++i)
      for (int j = 0; j < sd; ++j) {
        Jet hess = derivative(dphi[sq(sd, a, i)], j);  // order `order`
        for (int k = 0; k < sd; ++k)
          hess -= sg(k, i, j) * dphi[sq(sd, a, k)].truncated(order);
        for (int b = 0; b < td; ++b)
          for (int c = 0; c < td; ++c)
            hess += gp(a, b, c) * dphi[sq(sd, b, i)].truncated(order) *
                    dphi[sq(sd, c, j)].truncated(order);
        acc += ginv[sq(sd, i, j)] * hess;
      }
    tau[static_cast<size_t>(a)] = std::move(acc);
  }
  return tau;
}

Vec tension(const SmoothMap& f, const Vec& p) {
  const std::vector<Jet> tau = tension_jets(f, p, 0);
  Vec out;
  out.reserve(tau.size());
  for (const auto& j : tau) out.push_back(j.value());
  return out;
}

double energy_density(const SmoothMap& f, const Vec& p) {
  const int sd = f.source.dim;
  const int td = f.target.dim;
  const std::vector<double> ginv = invert_values_local(f.source, p);
  const std::vector<double> h = metric_values(f.target, map_values(f, p));
  const std::vector<Jet> mj = map_jets(f, p, 1);
  double acc = 0.0;
  for (int i = 0; i < sd; ++i)
    for (int j = 0; j < sd; ++j) {
      double s = 0.0;
      for (int a = 0; a < td; ++a)
        for (int b = 0; b < td; ++b)
          s += h[sq(td, a, b)] * mj[static_cast<size_t>(a)].deriv(i) *
               mj[static_cast<size_t>(b)].deriv(j);
      acc += ginv[sq(sd, i, j)] * s;
    }
  return 0.5 * acc;
}

Vec pullback_derivative(const SmoothMap& f, const Vec& p, const std::vector<Jet>& v,
                        const Vec& x) {
  const int sd = f.source.dim;
  const int td = f.target.dim;
  if (static_cast<int>(v.size()) != td)
    throw DomainError("section component count does not match target dimension");
  if (x.size() != static_cast<size_t>(sd))
    throw DomainError("direction dimension does not match map source");
  const std::vector<Jet> gphi = christoffel_along(f, p, 0);
  const std::vector<Jet> mj = map_jets(f, p, 1);
  Vec out(static_cast<size_t>(td), 0.0);
  for (int a = 0; a < td; ++a) {
    double acc = 0.0;
    for (int i = 0; i < sd; ++i) {
      double di = v[static_cast<size_t>(a)].deriv(i);
      for (int b = 0; b < td; ++b)
        for (int c = 0; c < td; ++c)
          di += gphi[(static_cast<size_t>(a) * td + b) * static_cast<size_t>(td) + c].value() *
                mj[static_cast<size_t>(b)].deriv(i) * v[static_cast<size_t>(c)].value();
      acc += di * x[static_cast<size_t>(i)];
    }
    out[static_cast<size_t>(a)] = acc;
  }
  return out;
}

Vec rough_laplacian(const SmoothMap& f, const Vec& p, const std::vector<Jet>& v,
                    TraceMode mode) {
  const SecondDerivativeData data = second_pullback_derivative(f, p, v);
  const int sd = f.source.dim;
  auto entry = [&](int a, int i, int j) {
    return data.a2[(static_cast<size_t>(a) * sd + i) * static_cast<size_t>(sd) + j];
  };
  Vec tr = trace_bilinear(f.source, p, f.target.dim, entry, mode);
  for (double& c : tr) c = -c;
  return tr;
}

Vec rough_laplacian(const SmoothMap& f, const Vec& p, const SectionJets& v, TraceMode mode) {
  return rough_laplacian(f, p, v(p, 2), mode);
}

Vec jacobi(const SmoothMap& f, const Vec& p, const std::vector<Jet>& v, TraceMode mode) {
  Vec out = rough_laplacian(f, p, v, mode);
  Vec vval;
  vval.reserve(v.size());
  for (const auto& j : v) vval.push_back(j.value());
  const Vec curv = curvature_term(f, p, vval, mode);
  for (size_t a = 0; a < out.size(); ++a) out[a] += curv[a];
  return out;
}

Vec jacobi(const SmoothMap& f, const Vec& p, const SectionJets& v, TraceMode mode) {
  return jacobi(f, p, v(p, 2), mode);
}

Vec bitension_oracle(const SmoothMap& f, const Vec& p, TraceMode mode) {
  const std::vector<Jet> tau = tension_jets(f, p, 2);
  Vec out = jacobi(f, p, tau, mode);
  for (double& c : out) c = -c;
  return out;
}

}  // namespace warpcheck
