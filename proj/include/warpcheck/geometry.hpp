// SPDX-License-Identifier: MIT
/*!
  \file
  \brief Coordinate-patch Riemannian geometry computed through jet calculus.

  A MetricPatch is a symmetric matrix of scalar-field expressions over a
  rectangular chart box.  All differential operators here are assembled from
  exact jet coefficients of the metric components; no finite differences are
  involved on the engine side.

  Index conventions, fixed project-wide:
    - christoffel symbols Γ^k_{ij} are stored as [k][i][j];
    - the curvature operator is R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]} Z;
    - riemann components R^l_{ijk} are stored as [l][i][j][k] and mean the
      l-th component of R(e_j, e_k) e_i, i.e. the first lower index is the
      argument slot and the last two are the plane;
    - ricci is the contraction R_{ij} = R^k_{ikj};
    - the scalar Laplacian is Δh = g^{ij}(∂_i∂_j h − Γ^k_{ij} ∂_k h), so on
      the round sphere Δ cos θ = −2 cos θ (no sign flip).
*/
#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "warpcheck/expr.hpp"
#include "warpcheck/jet.hpp"

namespace warpcheck {

using Vec = std::vector<double>;

/// Rectangular chart: one (lo, hi) interval per coordinate.
using ChartBox = std::vector<std::pair<double, double>>;

/*!
  \brief Symmetric metric tensor over a chart box, with named coordinates.

  Symmetry is enforced structurally at construction: components (i, j) and
  (j, i) must be the same expression tree.  Positive definiteness is a sample
  obligation checked by the verification layer at the points it visits.
*/
struct MetricPatch {
  std::string name;
  int dim = 0;
  ChartBox chart;
  std::vector<std::string> coords;
  std::vector<ScalarFieldExpr> g;  // dim*dim, row-major

  const ScalarFieldExpr& comp(int i, int j) const {
    return g[static_cast<size_t>(i) * static_cast<size_t>(dim) + static_cast<size_t>(j)];
  }
};

/// Identity metric with coordinates prefix1..prefixN.
MetricPatch euclidean_patch(std::string name, int dim, ChartBox box, const std::string& prefix);

/// Validates dimensions and structural symmetry; throws std::invalid_argument.
MetricPatch make_patch(std::string name, ChartBox box, std::vector<std::string> coords,
                       std::vector<ScalarFieldExpr> components);

bool point_in_chart(const MetricPatch& m, const Vec& p);

/// Jets of all metric components at p (dim*dim row-major).
std::vector<Jet> metric_jets(const MetricPatch& m, const Vec& p, int order);

/// Inverse of a jet-valued square matrix by Gauss-Jordan elimination with
/// value-magnitude pivoting.  Throws DomainError when the value matrix is
/// singular at the expansion point.
std::vector<Jet> jet_mat_inverse(std::vector<Jet> a, int n);

/// Γ^k_{ij} as jets of the given order ([k][i][j] row-major).
std::vector<Jet> christoffel_jets(const MetricPatch& m, const Vec& p, int order);

struct ChristoffelAt {
  Vec point;
  int dim = 0;
  std::vector<double> symbols;  // [k][i][j]
  double at(int k, int i, int j) const {
    return symbols[(static_cast<size_t>(k) * dim + i) * static_cast<size_t>(dim) + j];
  }
};
ChristoffelAt christoffel(const MetricPatch& m, const Vec& p);

struct CurvatureAt {
  Vec point;
  int dim = 0;
  std::vector<double> riemann;  // [l][i][j][k], see file header
  std::vector<double> ricci;    // [i][j]
  double riem(int l, int i, int j, int k) const {
    return riemann[((static_cast<size_t>(l) * dim + i) * static_cast<size_t>(dim) + j) *
                       static_cast<size_t>(dim) + k];
  }
  double ric(int i, int j) const { return ricci[static_cast<size_t>(i) * dim + j]; }
};
CurvatureAt curvature(const MetricPatch& m, const Vec& p);

/// Contravariant gradient components (grad h)^k = g^{kj} ∂_j h at p.
Vec grad(const MetricPatch& m, const ScalarFieldExpr& h, const Vec& p);

/// Scalar Laplace-Beltrami of h at p (analyst sign; see file header).
double laplace_beltrami(const MetricPatch& m, const ScalarFieldExpr& h, const Vec& p);

/// Bilinear form sampled on coordinate directions.
using BilinearSampler = std::function<double(int, int)>;

/// trace_g s = g^{ij} s(i, j).
double trace_g(const MetricPatch& m, const BilinearSampler& s, const Vec& p);

/// Same trace through an explicit Gram-Schmidt orthonormal frame; used to
/// check frame independence of contractions.
double trace_g_frame(const MetricPatch& m, const BilinearSampler& s, const Vec& p);

// --- jet-level helpers shared by the higher modules ---

/// Gradient of a scalar given as a jet (order >= order_out + 1); returns
/// `dim` jets of order `order_out`.
std::vector<Jet> grad_of_scalar_jets(const MetricPatch& m, const Vec& p, const Jet& h,
                                     int order_out);

/// Laplace-Beltrami of a scalar given as a jet of order >= 2.
double laplace_of_scalar_jets(const MetricPatch& m, const Vec& p, const Jet& h);

/// g^{ij}(∇²V)^k_{ij} for a vector field given as `dim` jets of order >= 2.
Vec trace_nabla2_vector(const MetricPatch& m, const Vec& p, const std::vector<Jet>& v);

/// Ricci operator: (Ricc^♯ V)^i = g^{ik} R_{kj} V^j.
Vec ricci_sharp(const MetricPatch& m, const Vec& p, const Vec& v);

/// Metric values at p as a dense row-major matrix.
std::vector<double> metric_values(const MetricPatch& m, const Vec& p);

/// Inner product of coordinate vectors under a dense metric matrix.
double inner(const std::vector<double>& gmat, const Vec& a, const Vec& b);

}  // namespace warpcheck
