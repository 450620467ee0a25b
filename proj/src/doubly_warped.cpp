// SPDX-License-Identifier: MIT
#include "warpcheck/doubly_warped.hpp"

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <utility>

namespace warpcheck {

namespace {

size_t idx3(int d, int c, int a, int b) {
  return (static_cast<size_t>(c) * d + a) * static_cast<size_t>(d) + b;
}

ScalarFieldExpr lift_expr(const ScalarFieldExpr& e, const std::vector<std::string>& joint,
                          int offset) {
  std::vector<int> map(e.vars().size());
  for (size_t i = 0; i < map.size(); ++i) map[i] = static_cast<int>(i) + offset;
  return e.with_vars(joint, map);
}

struct PointData {
  Vec x, y;          // factor points
  double b2v = 0.0, f2v = 0.0;
  Vec w;             // grad_B b² at x (m components)
  Vec g;             // grad_F f² at y (n components)
  Vec db2;           // ∂_i b² (m components)
  Vec df2;           // ∂_β f² (n components)
  std::vector<double> gb, gf;  // factor metric values
};

PointData point_data(const DwpSpace& s, const Vec& p) {
  if (static_cast<int>(p.size()) != s.m + s.n)
    throw DomainError("point dimension does not match product dimension");
  PointData d;
  d.x.assign(p.begin(), p.begin() + s.m);
  d.y.assign(p.begin() + s.m, p.end());
  d.b2v = s.b2.eval_value(d.x);
  d.f2v = s.f2.eval_value(d.y);
  if (!(d.b2v > 0.0) || !(d.f2v > 0.0))
    throw DomainError("warping functions must be positive on the chart");
  d.w = grad(s.base, s.b2, d.x);
  d.g = grad(s.fiber, s.f2, d.y);
  const Jet b2j = eval_jet(s.b2, d.x, 1);
  const Jet f2j = eval_jet(s.f2, d.y, 1);
  d.db2.resize(static_cast<size_t>(s.m));
  for (int i = 0; i < s.m; ++i) d.db2[static_cast<size_t>(i)] = b2j.deriv(i);
  d.df2.resize(static_cast<size_t>(s.n));
  for (int i = 0; i < s.n; ++i) d.df2[static_cast<size_t>(i)] = f2j.deriv(i);
  d.gb = metric_values(s.base, d.x);
  d.gf = metric_values(s.fiber, d.y);
  return d;
}

}  // namespace

DwpSpace make_dwp(std::string name, MetricPatch base, MetricPatch fiber, ScalarFieldExpr b2,
                  ScalarFieldExpr f2) {
  for (const auto& bc : base.coords)
    if (std::find(fiber.coords.begin(), fiber.coords.end(), bc) != fiber.coords.end())
      throw std::invalid_argument("base and fiber coordinate names must be disjoint");
  if (!b2.valid() || b2.vars() != base.coords)
    throw std::invalid_argument("base warping must use the base coordinates");
  if (!f2.valid() || f2.vars() != fiber.coords)
    throw std::invalid_argument("fiber warping must use the fiber coordinates");

  DwpSpace s;
  s.name = std::move(name);
  s.m = base.dim;
  s.n = fiber.dim;
  const int d = s.m + s.n;

  std::vector<std::string> joint = base.coords;
  joint.insert(joint.end(), fiber.coords.begin(), fiber.coords.end());
  ChartBox box = base.chart;
  box.insert(box.end(), fiber.chart.begin(), fiber.chart.end());

  s.b2_lift = lift_expr(b2, joint, 0);
  s.f2_lift = lift_expr(f2, joint, s.m);

  const ScalarFieldExpr zero = parse("0", joint);
  std::vector<ScalarFieldExpr> warped(static_cast<size_t>(d) * d, zero);
  std::vector<ScalarFieldExpr> plain(static_cast<size_t>(d) * d, zero);
  for (int i = 0; i < s.m; ++i)
    for (int j = 0; j < s.m; ++j) {
      const ScalarFieldExpr gij = lift_expr(base.comp(i, j), joint, 0);
      plain[static_cast<size_t>(i) * d + j] = gij;
      warped[static_cast<size_t>(i) * d + j] =
          ScalarFieldExpr(exprb::mul(s.f2_lift.root(), gij.root()), joint);
    }
  for (int a = 0; a < s.n; ++a)
    for (int b = 0; b < s.n; ++b) {
      const ScalarFieldExpr gab = lift_expr(fiber.comp(a, b), joint, s.m);
      plain[static_cast<size_t>(s.m + a) * d + (s.m + b)] = gab;
      warped[static_cast<size_t>(s.m + a) * d + (s.m + b)] =
          ScalarFieldExpr(exprb::mul(s.b2_lift.root(), gab.root()), joint);
    }
  // Mirror the upper triangle so symmetry is structural, not coincidental.
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      warped[static_cast<size_t>(j) * d + i] = warped[static_cast<size_t>(i) * d + j];
      plain[static_cast<size_t>(j) * d + i] = plain[static_cast<size_t>(i) * d + j];
    }
  s.product_warped = make_patch(s.name + "-warped", box, joint, std::move(warped));
  s.product_plain = make_patch(s.name + "-plain", box, joint, std::move(plain));
  s.base = std::move(base);
  s.fiber = std::move(fiber);
  s.b2 = std::move(b2);
  s.f2 = std::move(f2);
  return s;
}

SplitVector split_vector(const DwpSpace& s, const Vec& v) {
  if (static_cast<int>(v.size()) != s.m + s.n)
    throw DomainError("vector dimension does not match product dimension");
  SplitVector out;
  out.base.assign(v.begin(), v.begin() + s.m);
  out.fiber.assign(v.begin() + s.m, v.end());
  return out;
}

Vec join_vector(const SplitVector& v) {
  Vec out = v.base;
  out.insert(out.end(), v.fiber.begin(), v.fiber.end());
  return out;
}

std::vector<double> dwp_connection_closed(const DwpSpace& s, const Vec& p, ConnectionForm form) {
  const int m = s.m, n = s.n, d = m + n;
  const PointData pd = point_data(s, p);
  const ChristoffelAt gb = christoffel(s.base, pd.x);
  const ChristoffelAt gf = christoffel(s.fiber, pd.y);
  std::vector<double> out(static_cast<size_t>(d) * d * d, 0.0);

  // Factor connections.
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) out[idx3(d, k, i, j)] = gb.at(k, i, j);
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) out[idx3(d, m + c, m + a, m + b)] = gf.at(c, a, b);

  // Mixed-input blocks: Γ^k_{iβ} = ∂_β(ln f) δ^k_i and Γ^γ_{iβ} = ∂_i(ln b) δ^γ_β.
  for (int i = 0; i < m; ++i)
    for (int b = 0; b < n; ++b) {
      const double dlnf = pd.df2[static_cast<size_t>(b)] / (2.0 * pd.f2v);
      out[idx3(d, i, i, m + b)] += dlnf;
      out[idx3(d, i, m + b, i)] += dlnf;
      const double dlnb = pd.db2[static_cast<size_t>(i)] / (2.0 * pd.b2v);
      out[idx3(d, m + b, i, m + b)] += dlnb;
      out[idx3(d, m + b, m + b, i)] += dlnb;
    }

  // Trailing terms, per formula variant.
  switch (form) {
    case ConnectionForm::fully_corrected:
      for (int c = 0; c < n; ++c)
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j)
            out[idx3(d, m + c, i, j)] += -0.5 / pd.b2v * pd.gb[static_cast<size_t>(i) * m + j] *
                                         pd.g[static_cast<size_t>(c)];
      for (int k = 0; k < m; ++k)
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            out[idx3(d, k, m + a, m + b)] += -0.5 / pd.f2v *
                                             pd.gf[static_cast<size_t>(a) * n + b] *
                                             pd.w[static_cast<size_t>(k)];
      break;
    case ConnectionForm::slots_swapped:
      // Correct slots but without the 1/b², 1/f² factors.
      for (int c = 0; c < n; ++c)
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j)
            out[idx3(d, m + c, i, j)] +=
                -0.5 * pd.gb[static_cast<size_t>(i) * m + j] * pd.g[static_cast<size_t>(c)];
      for (int k = 0; k < m; ++k)
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            out[idx3(d, k, m + a, m + b)] +=
                -0.5 * pd.gf[static_cast<size_t>(a) * n + b] * pd.w[static_cast<size_t>(k)];
      break;
    case ConnectionForm::printed:
      // Trailing vectors land in the same-factor output slot: the base block
      // receives the fiber gradient and vice versa.  The component count only
      // typechecks when the factors have equal dimension.
      if (m != n)
        throw FormNotEvaluable(
            "printed trailing connection terms require equal factor dimensions");
      for (int k = 0; k < m; ++k)
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j)
            out[idx3(d, k, i, j)] +=
                -0.5 * pd.gb[static_cast<size_t>(i) * m + j] * pd.g[static_cast<size_t>(k)];
      for (int c = 0; c < n; ++c)
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            out[idx3(d, m + c, m + a, m + b)] +=
                -0.5 * pd.gf[static_cast<size_t>(a) * n + b] * pd.w[static_cast<size_t>(c)];
      break;
  }
  return out;
}

std::vector<Jet> dwp_closed_gamma_jets(const DwpSpace& s, const Vec& p, int order) {
  const int m = s.m, n = s.n, d = m + n;
  const PointData pd = point_data(s, p);
  const JetLayout* layout = JetLayout::get(d, order);

  // Factor connections, lifted to the joint variables.
  const std::vector<Jet> gbj = christoffel_jets(s.base, pd.x, order);
  const std::vector<Jet> gfj = christoffel_jets(s.fiber, pd.y, order);

  // Log-derivative jets of the warpings over the joint variables.
  const Jet b2_joint = eval_jet(s.b2_lift, p, order + 1);
  const Jet f2_joint = eval_jet(s.f2_lift, p, order + 1);
  const Jet lnb = 0.5 * log(b2_joint);
  const Jet lnf = 0.5 * log(f2_joint);

  // Factor gradients of the warpings, lifted.
  const std::vector<Jet> wj =
      grad_of_scalar_jets(s.base, pd.x, eval_jet(s.b2, pd.x, order + 1), order);
  const std::vector<Jet> gjv =
      grad_of_scalar_jets(s.fiber, pd.y, eval_jet(s.f2, pd.y, order + 1), order);

  const Jet half_inv_b2 = 0.5 * inverse(b2_joint.truncated(order));
  const Jet half_inv_f2 = 0.5 * inverse(f2_joint.truncated(order));

  std::vector<Jet> out(static_cast<size_t>(d) * d * d, Jet::constant(layout, 0.0));
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        out[idx3(d, k, i, j)] = lift_jet(gbj[idx3(m, k, i, j)], layout, 0);
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        out[idx3(d, m + c, m + a, m + b)] = lift_jet(gfj[idx3(n, c, a, b)], layout, m);

  for (int i = 0; i < m; ++i)
    for (int b = 0; b < n; ++b) {
      const Jet dlnf = derivative(lnf, m + b).truncated(order);
      out[idx3(d, i, i, m + b)] += dlnf;
      out[idx3(d, i, m + b, i)] += dlnf;
      const Jet dlnb = derivative(lnb, i).truncated(order);
      out[idx3(d, m + b, i, m + b)] += dlnb;
      out[idx3(d, m + b, m + b, i)] += dlnb;
    }

  for (int c = 0; c < n; ++c) {
    const Jet gc = lift_jet(gjv[static_cast<size_t>(c)], layout, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const Jet gij = lift_jet(eval_jet(s.base.comp(i, j), pd.x, order), layout, 0);
        out[idx3(d, m + c, i, j)] -= half_inv_b2 * gij * gc;
      }
  }
  for (int k = 0; k < m; ++k) {
    const Jet wk = lift_jet(wj[static_cast<size_t>(k)], layout, 0);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const Jet gab = lift_jet(eval_jet(s.fiber.comp(a, b), pd.y, order), layout, m);
        out[idx3(d, k, m + a, m + b)] -= half_inv_f2 * gab * wk;
      }
  }
  return out;
}

Vec wedge_apply(const std::vector<double>& gmat, const Vec& x, const Vec& y, const Vec& z) {
  const double gyz = inner(gmat, y, z);
  const double gxz = inner(gmat, x, z);
  Vec out(x.size());
  for (size_t i = 0; i < x.size(); ++i) out[i] = gyz * x[i] - gxz * y[i];
  return out;
}

Vec dwp_curvature_oracle(const DwpSpace& s, const Vec& p, const Vec& x, const Vec& y,
                         const Vec& z) {
  const int d = s.m + s.n;
  const CurvatureAt rw = curvature(s.product_warped, p);
  const CurvatureAt rp = curvature(s.product_plain, p);
  Vec out(static_cast<size_t>(d), 0.0);
  for (int l = 0; l < d; ++l) {
    double acc = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
          acc += (rw.riem(l, i, j, k) - rp.riem(l, i, j, k)) * z[static_cast<size_t>(i)] *
                 x[static_cast<size_t>(j)] * y[static_cast<size_t>(k)];
    out[static_cast<size_t>(l)] = acc;
  }
  return out;
}

namespace {

/// D(u, v) for the connection-difference tensor given by value arrays.
Vec apply_d(const std::vector<double>& dt, int d, const Vec& u, const Vec& v) {
  Vec out(static_cast<size_t>(d), 0.0);
  for (int c = 0; c < d; ++c) {
    double acc = 0.0;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        acc += dt[idx3(d, c, a, b)] * u[static_cast<size_t>(a)] * v[static_cast<size_t>(b)];
    out[static_cast<size_t>(c)] = acc;
  }
  return out;
}

Vec curvature_relation_difference_tensor(const DwpSpace& s, const Vec& p, const Vec& x,
                                         const Vec& y, const Vec& z) {
  const int d = s.m + s.n;
  const std::vector<Jet> gbar = dwp_closed_gamma_jets(s, p, 1);
  const std::vector<Jet> gplain = christoffel_jets(s.product_plain, p, 1);
  std::vector<Jet> dj;
  dj.reserve(gbar.size());
  for (size_t i = 0; i < gbar.size(); ++i) dj.push_back(gbar[i] - gplain[i]);
  std::vector<double> dval(dj.size());
  for (size_t i = 0; i < dj.size(); ++i) dval[i] = dj[i].value();
  std::vector<double> gp(gplain.size());
  for (size_t i = 0; i < gplain.size(); ++i) gp[i] = gplain[i].value();

  // Covariant derivative of D against the plain connection, for constant
  // coordinate vector fields u, v, w:
  // (∇_u D)(v,w)^c = u^a ∂_a[D(v,w)^c] + u^a Γ^c_{ab} D(v,w)^b
  //                  − D(∇_u v, w)^c − D(v, ∇_u w)^c.
  auto nabla_d = [&](const Vec& u, const Vec& v, const Vec& w) {
    Vec dvw_val(static_cast<size_t>(d), 0.0);
    Vec ddvw(static_cast<size_t>(d), 0.0);  // u^a ∂_a D(v,w)^c
    for (int c = 0; c < d; ++c) {
      Jet acc = Jet::constant(dj[0].layout(), 0.0);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          acc += dj[idx3(d, c, a, b)] * (v[static_cast<size_t>(a)] * w[static_cast<size_t>(b)]);
      dvw_val[static_cast<size_t>(c)] = acc.value();
      double dd = 0.0;
      for (int a = 0; a < d; ++a) dd += u[static_cast<size_t>(a)] * acc.deriv(a);
      ddvw[static_cast<size_t>(c)] = dd;
    }
    auto nabla_const = [&](const Vec& along, const Vec& field) {
      Vec out(static_cast<size_t>(d), 0.0);
      for (int c = 0; c < d; ++c) {
        double acc = 0.0;
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b)
            acc += along[static_cast<size_t>(a)] * gp[idx3(d, c, a, b)] *
                   field[static_cast<size_t>(b)];
        out[static_cast<size_t>(c)] = acc;
      }
      return out;
    };
    const Vec nuv = nabla_const(u, v);
    const Vec nuw = nabla_const(u, w);
    const Vec d1 = apply_d(dval, d, nuv, w);
    const Vec d2 = apply_d(dval, d, v, nuw);
    Vec out(static_cast<size_t>(d), 0.0);
    for (int c = 0; c < d; ++c) {
      double acc = ddvw[static_cast<size_t>(c)];
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          acc += u[static_cast<size_t>(a)] * gp[idx3(d, c, a, b)] * dvw_val[static_cast<size_t>(b)];
      acc -= d1[static_cast<size_t>(c)] + d2[static_cast<size_t>(c)];
      out[static_cast<size_t>(c)] = acc;
    }
    return out;
  };

  const Vec t1 = nabla_d(x, y, z);
  const Vec t2 = nabla_d(y, x, z);
  const Vec dyz = apply_d(dval, d, y, z);
  const Vec dxz = apply_d(dval, d, x, z);
  const Vec t3 = apply_d(dval, d, x, dyz);
  const Vec t4 = apply_d(dval, d, y, dxz);
  Vec out(static_cast<size_t>(d), 0.0);
  for (int c = 0; c < d; ++c)
    out[static_cast<size_t>(c)] = t1[static_cast<size_t>(c)] - t2[static_cast<size_t>(c)] +
                                  t3[static_cast<size_t>(c)] - t4[static_cast<size_t>(c)];
  return out;
}

Vec curvature_relation_printed(const DwpSpace& s, const Vec& p, const Vec& x, const Vec& y,
                               const Vec& z, bool grouped) {
  const int m = s.m, n = s.n, d = m + n;
  const PointData pd = point_data(s, p);
  const std::vector<double> gbar = metric_values(s.product_warped, p);
  const SplitVector xs = split_vector(s, x);
  const SplitVector ys = split_vector(s, y);

  // Covariant derivatives of the warping gradients on the factors.
  const std::vector<Jet> wjets =
      grad_of_scalar_jets(s.base, pd.x, eval_jet(s.b2, pd.x, 2), 1);
  const std::vector<Jet> gjets =
      grad_of_scalar_jets(s.fiber, pd.y, eval_jet(s.f2, pd.y, 2), 1);
  const ChristoffelAt gb = christoffel(s.base, pd.x);
  const ChristoffelAt gf = christoffel(s.fiber, pd.y);
  auto cov_dir = [](const std::vector<Jet>& field, const ChristoffelAt& gam, const Vec& dir) {
    const int dim = gam.dim;
    Vec out(static_cast<size_t>(dim), 0.0);
    for (int k = 0; k < dim; ++k) {
      double acc = 0.0;
      for (int i = 0; i < dim; ++i) {
        double di = field[static_cast<size_t>(k)].deriv(i);
        for (int mm = 0; mm < dim; ++mm)
          di += gam.at(k, i, mm) * field[static_cast<size_t>(mm)].value();
        acc += di * dir[static_cast<size_t>(i)];
      }
      out[static_cast<size_t>(k)] = acc;
    }
    return out;
  };

  const double ntilde = inner(pd.gb, pd.w, pd.w);  // |grad_B b²|²_{g_B}
  const double nvalue = inner(pd.gf, pd.g, pd.g);  // |grad_F f²|²_{g_F}
  const double p1 = 0.5 / pd.b2v;
  const double p2 = 0.5 / pd.f2v;

  auto base_embed = [&](const Vec& v) {
    Vec out(static_cast<size_t>(d), 0.0);
    for (int i = 0; i < m; ++i) out[static_cast<size_t>(i)] = v[static_cast<size_t>(i)];
    return out;
  };
  auto fiber_embed = [&](const Vec& v) {
    Vec out(static_cast<size_t>(d), 0.0);
    for (int i = 0; i < n; ++i) out[static_cast<size_t>(m + i)] = v[static_cast<size_t>(i)];
    return out;
  };
  auto dir_b2 = [&](const Vec& v1) {
    double acc = 0.0;
    for (int i = 0; i < m; ++i) acc += v1[static_cast<size_t>(i)] * pd.db2[static_cast<size_t>(i)];
    return acc;
  };
  auto dir_f2 = [&](const Vec& v2) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += v2[static_cast<size_t>(i)] * pd.df2[static_cast<size_t>(i)];
    return acc;
  };
  auto scale = [](Vec v, double c) {
    for (double& e : v) e *= c;
    return v;
  };
  auto axpy = [](Vec a, const Vec& b, double c) {
    for (size_t i = 0; i < a.size(); ++i) a[i] += c * b[i];
    return a;
  };

  // Same-factor wedge operands.
  auto op1 = [&](const SplitVector& v) {
    Vec base_part = cov_dir(wjets, gb, v.base);
    base_part = axpy(std::move(base_part), pd.w, -p1 * dir_b2(v.base));
    return base_embed(base_part);
  };
  auto mix1 = [&](const SplitVector& v) {
    return scale(fiber_embed(pd.g), p2 * dir_b2(v.base));
  };
  auto op2 = [&](const SplitVector& v) {
    Vec fiber_part = cov_dir(gjets, gf, v.fiber);
    fiber_part = axpy(std::move(fiber_part), pd.g, -p2 * dir_f2(v.fiber));
    return fiber_embed(fiber_part);
  };
  auto mix2 = [&](const SplitVector& v) {
    return scale(base_embed(pd.w), p1 * dir_f2(v.fiber));
  };

  const Vec x2 = fiber_embed(xs.fiber);
  const Vec y2 = fiber_embed(ys.fiber);
  const Vec x1 = base_embed(xs.base);
  const Vec y1 = base_embed(ys.base);

  Vec out(static_cast<size_t>(d), 0.0);
  auto add = [&](const Vec& v, double c) { out = axpy(std::move(out), v, c); };

  if (grouped) {
    Vec a1 = op1(ys);
    a1 = axpy(std::move(a1), mix1(ys), -1.0);
    Vec b1 = op1(xs);
    b1 = axpy(std::move(b1), mix1(xs), -1.0);
    add(wedge_apply(gbar, a1, x2, z), p1);
    add(wedge_apply(gbar, b1, y2, z), -p1);
    add(wedge_apply(gbar, x2, y2, z), p1 * p1 * ntilde);

    Vec a2 = op2(ys);
    a2 = axpy(std::move(a2), mix2(ys), -1.0);
    Vec b2 = op2(xs);
    b2 = axpy(std::move(b2), mix2(xs), -1.0);
    add(wedge_apply(gbar, a2, x1, z), p2);
    add(wedge_apply(gbar, b2, y1, z), -p2);
    add(wedge_apply(gbar, x1, y1, z), p2 * p2 * nvalue);
  } else {
    add(wedge_apply(gbar, op1(ys), x2, z), p1);
    add(wedge_apply(gbar, op1(xs), y2, z), -p1);
    add(wedge_apply(gbar, mix1(ys), x2, z), -1.0);
    add(wedge_apply(gbar, mix1(xs), y2, z), 1.0);
    add(wedge_apply(gbar, x2, y2, z), p1 * p1 * ntilde);

    add(wedge_apply(gbar, op2(ys), x1, z), p2);
    add(wedge_apply(gbar, op2(xs), y1, z), -p2);
    add(wedge_apply(gbar, mix2(ys), x1, z), -1.0);
    add(wedge_apply(gbar, mix2(xs), y1, z), 1.0);
    add(wedge_apply(gbar, x1, y1, z), p2 * p2 * nvalue);
  }
  return out;
}

}  // namespace

Vec dwp_curvature_relation(const DwpSpace& s, const Vec& p, const Vec& x, const Vec& y,
                           const Vec& z, CurvatureForm form) {
  const int d = s.m + s.n;
  if (static_cast<int>(x.size()) != d || static_cast<int>(y.size()) != d ||
      static_cast<int>(z.size()) != d)
    throw DomainError("vector dimension does not match product dimension");
  switch (form) {
    case CurvatureForm::difference_tensor:
      return curvature_relation_difference_tensor(s, p, x, y, z);
    case CurvatureForm::printed_grouped:
      return curvature_relation_printed(s, p, x, y, z, true);
    case CurvatureForm::printed_flat_prefactor:
      return curvature_relation_printed(s, p, x, y, z, false);
  }
  throw InternalError("unhandled curvature form");
}

}  // namespace warpcheck
