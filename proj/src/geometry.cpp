// SPDX-License-Identifier: MIT
#include "warpcheck/geometry.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>

namespace warpcheck {

namespace {

size_t sq(int dim, int i, int j) {
  return static_cast<size_t>(i) * static_cast<size_t>(dim) + static_cast<size_t>(j);
}

/// Dense double-matrix inverse (Gauss-Jordan, partial pivoting).
std::vector<double> invert_values(std::vector<double> a, int n) {
  std::vector<double> inv(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) inv[sq(n, i, i)] = 1.0;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[sq(n, r, col)]) > std::abs(a[sq(n, pivot, col)])) pivot = r;
    if (std::abs(a[sq(n, pivot, col)]) < 1e-14)
      throw DomainError("singular metric at evaluation point");
    if (pivot != col)
      for (int c = 0; c < n; ++c) {
        std::swap(a[sq(n, pivot, c)], a[sq(n, col, c)]);
        std::swap(inv[sq(n, pivot, c)], inv[sq(n, col, c)]);
      }
    const double d = a[sq(n, col, col)];
    for (int c = 0; c < n; ++c) {
      a[sq(n, col, c)] /= d;
      inv[sq(n, col, c)] /= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[sq(n, r, col)];
      if (f == 0.0) continue;
      for (int c = 0; c < n; ++c) {
        a[sq(n, r, c)] -= f * a[sq(n, col, c)];
        inv[sq(n, r, c)] -= f * inv[sq(n, col, c)];
      }
    }
  }
  return inv;
}

void check_point(const MetricPatch& m, const Vec& p) {
  if (static_cast<int>(p.size()) != m.dim)
    throw DomainError("point dimension does not match patch dimension");
}

}  // namespace

MetricPatch euclidean_patch(std::string name, int dim, ChartBox box, const std::string& prefix) {
  std::vector<std::string> coords;
  coords.reserve(static_cast<size_t>(dim));
  for (int i = 0; i < dim; ++i) coords.push_back(prefix + std::to_string(i + 1));
  std::vector<ScalarFieldExpr> comps;
  comps.reserve(static_cast<size_t>(dim) * dim);
  const ScalarFieldExpr one = parse("1", coords);
  const ScalarFieldExpr zero = parse("0", coords);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) comps.push_back(i == j ? one : zero);
  return make_patch(std::move(name), std::move(box), std::move(coords), std::move(comps));
}

MetricPatch make_patch(std::string name, ChartBox box, std::vector<std::string> coords,
                       std::vector<ScalarFieldExpr> components) {
  const int dim = static_cast<int>(coords.size());
  if (dim < 1 || dim > kMaxVars) throw std::invalid_argument("metric patch dimension out of range");
  if (static_cast<int>(box.size()) != dim)
    throw std::invalid_argument("chart box size does not match dimension");
  if (components.size() != static_cast<size_t>(dim) * static_cast<size_t>(dim))
    throw std::invalid_argument("metric component count must be dim*dim");
  for (const auto& [lo, hi] : box)
    if (!(lo < hi)) throw std::invalid_argument("chart interval must satisfy lo < hi");
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j)
      if (!components[sq(dim, i, j)].same_ast(components[sq(dim, j, i)]))
        throw std::invalid_argument("metric components must be structurally symmetric");
  MetricPatch m;
  m.name = std::move(name);
  m.dim = dim;
  m.chart = std::move(box);
  m.coords = std::move(coords);
  m.g = std::move(components);
  return m;
}

bool point_in_chart(const MetricPatch& m, const Vec& p) {
  if (static_cast<int>(p.size()) != m.dim) return false;
  for (int i = 0; i < m.dim; ++i)
    if (!(p[static_cast<size_t>(i)] > m.chart[static_cast<size_t>(i)].first &&
          p[static_cast<size_t>(i)] < m.chart[static_cast<size_t>(i)].second))
      return false;
  return true;
}

std::vector<Jet> metric_jets(const MetricPatch& m, const Vec& p, int order) {
  check_point(m, p);
  std::vector<Jet> out;
  out.reserve(m.g.size());
  for (const auto& e : m.g) out.push_back(eval_jet(e, p, order));
  return out;
}

std::vector<Jet> jet_mat_inverse(std::vector<Jet> a, int n) {
  if (static_cast<int>(a.size()) != n * n || n < 1)
    throw DomainError("jet_mat_inverse requires a square matrix");
  const JetLayout* layout = a[0].layout();
  std::vector<Jet> inv(a.size(), Jet::constant(layout, 0.0));
  for (int i = 0; i < n; ++i) inv[sq(n, i, i)] = Jet::constant(layout, 1.0);
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[sq(n, r, col)].value()) > std::abs(a[sq(n, pivot, col)].value())) pivot = r;
    if (std::abs(a[sq(n, pivot, col)].value()) < 1e-14)
      throw DomainError("singular metric at evaluation point");
    if (pivot != col)
      for (int c = 0; c < n; ++c) {
        std::swap(a[sq(n, pivot, c)], a[sq(n, col, c)]);
        std::swap(inv[sq(n, pivot, c)], inv[sq(n, col, c)]);
      }
    const Jet d = inverse(a[sq(n, col, col)]);
    for (int c = 0; c < n; ++c) {
      a[sq(n, col, c)] *= d;
      inv[sq(n, col, c)] *= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const Jet f = a[sq(n, r, col)];
      for (int c = 0; c < n; ++c) {
        a[sq(n, r, c)] -= f * a[sq(n, col, c)];
        inv[sq(n, r, c)] -= f * inv[sq(n, col, c)];
      }
    }
  }
  return inv;
}

std::vector<Jet> christoffel_jets(const MetricPatch& m, const Vec& p, int order) {
  const int d = m.dim;
  const std::vector<Jet> gj = metric_jets(m, p, order + 1);
  std::vector<Jet> gtrunc;
  gtrunc.reserve(gj.size());
  for (const auto& j : gj) gtrunc.push_back(j.truncated(order));
  const std::vector<Jet> ginv = jet_mat_inverse(std::move(gtrunc), d);
  // dg[l][i][j] = jet of d_l g_{ij}
  std::vector<Jet> dg;
  dg.reserve(static_cast<size_t>(d) * d * d);
  for (int l = 0; l < d; ++l)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) dg.push_back(derivative(gj[sq(d, i, j)], l));
  auto dgat = [&](int l, int i, int j) -> const Jet& {
    return dg[(static_cast<size_t>(l) * d + i) * static_cast<size_t>(d) + j];
  };
  const JetLayout* layout = ginv[0].layout();
  std::vector<Jet> gamma(static_cast<size_t>(d) * d * d, Jet::constant(layout, 0.0));
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        Jet acc = Jet::constant(layout, 0.0);
        for (int l = 0; l < d; ++l)
          acc += ginv[sq(d, k, l)] * (dgat(i, j, l) + dgat(j, i, l) - dgat(l, i, j));
        acc *= 0.5;
        gamma[(static_cast<size_t>(k) * d + i) * static_cast<size_t>(d) + j] = acc;
        gamma[(static_cast<size_t>(k) * d + j) * static_cast<size_t>(d) + i] = std::move(acc);
      }
  return gamma;
}

ChristoffelAt christoffel(const MetricPatch& m, const Vec& p) {
  const std::vector<Jet> gj = christoffel_jets(m, p, 0);
  ChristoffelAt out;
  out.point = p;
  out.dim = m.dim;
  out.symbols.reserve(gj.size());
  for (const auto& j : gj) out.symbols.push_back(j.value());
  return out;
}

CurvatureAt curvature(const MetricPatch& m, const Vec& p) {
  const int d = m.dim;
  const std::vector<Jet> gamma = christoffel_jets(m, p, 1);
  auto ga = [&](int k, int i, int j) -> const Jet& {
    return gamma[(static_cast<size_t>(k) * d + i) * static_cast<size_t>(d) + j];
  };
  CurvatureAt out;
  out.point = p;
  out.dim = d;
  out.riemann.assign(static_cast<size_t>(d) * d * d * d, 0.0);
  out.ricci.assign(static_cast<size_t>(d) * d, 0.0);
  for (int l = 0; l < d; ++l)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
          double r = ga(l, k, i).deriv(j) - ga(l, j, i).deriv(k);
          for (int lam = 0; lam < d; ++lam)
            r += ga(l, j, lam).value() * ga(lam, k, i).value() -
                 ga(l, k, lam).value() * ga(lam, j, i).value();
          out.riemann[((static_cast<size_t>(l) * d + i) * static_cast<size_t>(d) + j) *
                          static_cast<size_t>(d) + k] = r;
        }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double r = 0.0;
      for (int k = 0; k < d; ++k) r += out.riem(k, i, k, j);
      out.ricci[sq(d, i, j)] = r;
    }
  return out;
}

Vec grad(const MetricPatch& m, const ScalarFieldExpr& h, const Vec& p) {
  check_point(m, p);
  const int d = m.dim;
  const std::vector<double> ginv = invert_values(metric_values(m, p), d);
  const Jet hj = eval_jet(h, p, 1);
  Vec out(static_cast<size_t>(d), 0.0);
  for (int k = 0; k < d; ++k)
    for (int j = 0; j < d; ++j) out[static_cast<size_t>(k)] += ginv[sq(d, k, j)] * hj.deriv(j);
  return out;
}

double laplace_beltrami(const MetricPatch& m, const ScalarFieldExpr& h, const Vec& p) {
  return laplace_of_scalar_jets(m, p, eval_jet(h, p, 2));
}

double trace_g(const MetricPatch& m, const BilinearSampler& s, const Vec& p) {
  check_point(m, p);
  const int d = m.dim;
  const std::vector<double> ginv = invert_values(metric_values(m, p), d);
  double acc = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) acc += ginv[sq(d, i, j)] * s(i, j);
  return acc;
}

double trace_g_frame(const MetricPatch& m, const BilinearSampler& s, const Vec& p) {
  check_point(m, p);
  const int d = m.dim;
  const std::vector<double> g = metric_values(m, p);
  // Gram-Schmidt on the coordinate basis: frame[a] has components frame[a][i].
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
  double acc = 0.0;
  for (const Vec& e : frame)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        acc += e[static_cast<size_t>(i)] * e[static_cast<size_t>(j)] * s(i, j);
  return acc;
}

std::vector<Jet> grad_of_scalar_jets(const MetricPatch& m, const Vec& p, const Jet& h,
                                     int order_out) {
  const int d = m.dim;
  if (h.layout()->order() < order_out + 1)
    throw DomainError("scalar jet order too low for requested gradient order");
  std::vector<Jet> gj = metric_jets(m, p, order_out);
  const std::vector<Jet> ginv = jet_mat_inverse(std::move(gj), d);
  std::vector<Jet> dh;
  dh.reserve(static_cast<size_t>(d));
  for (int j = 0; j < d; ++j) dh.push_back(derivative(h, j).truncated(order_out));
  const JetLayout* layout = ginv[0].layout();
  std::vector<Jet> out(static_cast<size_t>(d), Jet::constant(layout, 0.0));
  for (int k = 0; k < d; ++k)
    for (int j = 0; j < d; ++j) out[static_cast<size_t>(k)] += ginv[sq(d, k, j)] * dh[static_cast<size_t>(j)];
  return out;
}

double laplace_of_scalar_jets(const MetricPatch& m, const Vec& p, const Jet& h) {
  const int d = m.dim;
  if (h.layout()->order() < 2) throw DomainError("scalar jet order too low for laplacian");
  const std::vector<double> ginv = invert_values(metric_values(m, p), d);
  const ChristoffelAt gam = christoffel(m, p);
  double acc = 0.0;
  std::vector<int> counts(static_cast<size_t>(d), 0);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      counts.assign(static_cast<size_t>(d), 0);
      ++counts[static_cast<size_t>(i)];
      ++counts[static_cast<size_t>(j)];
      double hess = h.partial(counts);
      for (int k = 0; k < d; ++k) hess -= gam.at(k, i, j) * h.deriv(k);
      acc += ginv[sq(d, i, j)] * hess;
    }
  return acc;
}

Vec trace_nabla2_vector(const MetricPatch& m, const Vec& p, const std::vector<Jet>& v) {
  const int d = m.dim;
  if (static_cast<int>(v.size()) != d)
    throw DomainError("vector field jet count does not match dimension");
  for (const auto& j : v)
    if (j.layout()->order() < 2) throw DomainError("vector jets order too low for trace of squared derivative");
  const std::vector<double> ginv = invert_values(metric_values(m, p), d);
  const std::vector<Jet> gamma = christoffel_jets(m, p, 1);
  auto ga = [&](int k, int i, int j) -> const Jet& {
    return gamma[(static_cast<size_t>(k) * d + i) * static_cast<size_t>(d) + j];
  };
  // T^k_j = (first covariant derivative)^k in direction j, kept to order 1.
  std::vector<Jet> t;
  t.reserve(static_cast<size_t>(d) * d);
  for (int k = 0; k < d; ++k)
    for (int j = 0; j < d; ++j) {
      Jet acc = derivative(v[static_cast<size_t>(k)], j).truncated(1);
      for (int mm = 0; mm < d; ++mm) acc += ga(k, j, mm) * v[static_cast<size_t>(mm)].truncated(1);
      t.push_back(std::move(acc));
    }
  auto tat = [&](int k, int j) -> const Jet& { return t[sq(d, k, j)]; };
  Vec out(static_cast<size_t>(d), 0.0);
  for (int k = 0; k < d; ++k) {
    double acc = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double a = tat(k, j).deriv(i);
        for (int mm = 0; mm < d; ++mm)
          a += ga(k, i, mm).value() * tat(mm, j).value() - ga(mm, i, j).value() * tat(k, mm).value();
        acc += ginv[sq(d, i, j)] * a;
      }
    out[static_cast<size_t>(k)] = acc;
  }
  return out;
}

Vec ricci_sharp(const MetricPatch& m, const Vec& p, const Vec& v) {
  const int d = m.dim;
  if (static_cast<int>(v.size()) != d) throw DomainError("vector dimension mismatch");
  const CurvatureAt cur = curvature(m, p);
  const std::vector<double> ginv = invert_values(metric_values(m, p), d);
  Vec out(static_cast<size_t>(d), 0.0);
  for (int i = 0; i < d; ++i) {
    double acc = 0.0;
    for (int k = 0; k < d; ++k)
      for (int j = 0; j < d; ++j) acc += ginv[sq(d, i, k)] * cur.ric(k, j) * v[static_cast<size_t>(j)];
    out[static_cast<size_t>(i)] = acc;
  }
  return out;
}

std::vector<double> metric_values(const MetricPatch& m, const Vec& p) {
  check_point(m, p);
  std::vector<double> out;
  out.reserve(m.g.size());
  for (const auto& e : m.g) out.push_back(e.eval_value(p));
  return out;
}

double inner(const std::vector<double>& gmat, const Vec& a, const Vec& b) {
  const size_t d = a.size();
  double acc = 0.0;
  for (size_t i = 0; i < d; ++i)
    for (size_t j = 0; j < d; ++j) acc += gmat[i * d + j] * a[i] * b[j];
  return acc;
}

}  // namespace warpcheck
