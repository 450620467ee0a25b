// SPDX-License-Identifier: MIT
/*!
  \file
  \brief Doubly warped products: metric assembly, the closed-form connection
         with its recorded formula variants, and the closed-form relation
         between the warped and unwarped product curvatures.

  A doubly warped product carries the metric f²(y) g_B ⊕ b²(x) g_F on B × F,
  with b a positive function on the base and f a positive function on the
  fiber.  Joint coordinates are the base coordinates followed by the fiber
  coordinates; joint indices 0..m-1 are base, m..m+n-1 are fiber.

  Formula variants: several published-style closed forms circulate with the
  trailing connection terms either placed in the wrong product slot or missing
  the 1/b², 1/f² factors, and with the curvature relation's mixed terms scoped
  either inside or outside the block prefactors.  The enums below name those
  variants so the verification layer can evaluate and compare all of them; the
  `fully_corrected` / `difference_tensor` members are the ones this library
  derives and stands behind.
*/
#pragma once

#include <string>
#include <vector>

#include "warpcheck/map_calculus.hpp"

namespace warpcheck {

/// Thrown when a recorded formula variant cannot be evaluated because its
/// index structure only typechecks when the factor dimensions are equal.
class FormNotEvaluable : public DomainError {
 public:
  using DomainError::DomainError;
};

struct DwpSpace {
  std::string name;
  MetricPatch base;   // coordinates x1..xm
  MetricPatch fiber;  // coordinates y1..yn
  ScalarFieldExpr b2;  // over base coordinates, positive on the chart
  ScalarFieldExpr f2;  // over fiber coordinates, positive on the chart
  int m = 0;
  int n = 0;
  MetricPatch product_warped;  // f² g_B ⊕ b² g_F over joint coordinates
  MetricPatch product_plain;   // g_B ⊕ g_F over joint coordinates
  ScalarFieldExpr b2_lift, f2_lift;  // warpings over joint coordinates
};

/// Assembles the joint patches; validates disjoint coordinate names and that
/// the warpings use their factor's coordinates.  Throws std::invalid_argument.
DwpSpace make_dwp(std::string name, MetricPatch base, MetricPatch fiber, ScalarFieldExpr b2,
                  ScalarFieldExpr f2);

struct SplitVector {
  Vec base, fiber;
};
SplitVector split_vector(const DwpSpace& s, const Vec& v);
Vec join_vector(const SplitVector& v);

/// Connection formula variants (see file header).
enum class ConnectionForm { printed, slots_swapped, fully_corrected };

/// Closed-form connection coefficients Γ^c_{ab} at joint point p ([c][a][b]
/// row-major).  The printed variant throws FormNotEvaluable when m != n.
std::vector<double> dwp_connection_closed(const DwpSpace& s, const Vec& p, ConnectionForm form);

/// Fully corrected closed-form connection as jets over the joint variables.
std::vector<Jet> dwp_closed_gamma_jets(const DwpSpace& s, const Vec& p, int order);

/// (X ∧ Y)Z = g(Y, Z) X − g(X, Z) Y for a dense metric matrix at a point.
Vec wedge_apply(const std::vector<double>& gmat, const Vec& x, const Vec& y, const Vec& z);

/*!
  \brief Curvature-difference formula variants.

  printed_grouped scopes each block prefactor 1/(2b²), 1/(2f²) over the whole
  block including the cross-warping terms; printed_flat_prefactor applies the
  prefactor only to the same-factor terms and leaves the cross-warping terms
  unscaled.  difference_tensor evaluates the exact identity
  R̄ − R = (∇_X D)(Y,Z) − (∇_Y D)(X,Z) + D(X, D(Y,Z)) − D(Y, D(X,Z)) built
  from the corrected connection difference D = Γ̄ − Γ.
*/
enum class CurvatureForm { printed_grouped, printed_flat_prefactor, difference_tensor };

/// Closed-form value of (R̄ − R)(X, Y)Z at p for constant coordinate vectors.
Vec dwp_curvature_relation(const DwpSpace& s, const Vec& p, const Vec& x, const Vec& y,
                           const Vec& z, CurvatureForm form);

/// Reference value of the same difference from the two product curvature
/// tensors (no closed forms involved).
Vec dwp_curvature_oracle(const DwpSpace& s, const Vec& p, const Vec& x, const Vec& y,
                         const Vec& z);

}  // namespace warpcheck
