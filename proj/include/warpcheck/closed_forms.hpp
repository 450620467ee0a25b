// SPDX-License-Identifier: MIT
/*!
  \file
  \brief Closed-form tension/bitension fields for inclusions, projections, and
         product maps on doubly warped products, with a per-term correction
         catalog.

  Each recorded formula circulates in a transcribed rendition whose
  coefficients disagree with first-principles computation whenever both
  warpings are active.  Every evaluator therefore takes a correction mask:
  bit i of the mask applies correction i from the formula's catalog entry
  (see `formula_catalog`).  Mask 0 evaluates the transcribed form verbatim;
  `formula_catalog(id).full_mask()` evaluates the repaired form that this
  library derives and stands behind.  The generic-pipeline oracles in
  map_calculus adjudicate between them.

  Conventions: fields along a map into the product are returned as
  SplitVector (base slot, fiber slot) in factor coordinates.  Warping
  quantities are always taken with respect to the factor metrics: W = grad ln b
  and H = grad b² on (B, g_B); M = grad ln f and G = grad f² on (F, g_F);
  N = |G|² in g_F and Ntilde = |H|² in g_B.  The analyst-sign Laplacian of
  geometry.hpp is used throughout.
*/
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "warpcheck/doubly_warped.hpp"
#include "warpcheck/map_calculus.hpp"

namespace warpcheck {

enum class FactorSide { base, fiber };

/// One term-level repair of a transcribed formula.
struct CorrectionNote {
  std::string term;       ///< which term of the formula
  std::string printed;    ///< transcribed coefficient/structure
  std::string corrected;  ///< repaired coefficient/structure
};

/// Catalog entry: the ordered corrections a formula admits.
struct FormulaCatalog {
  std::string id;
  std::vector<CorrectionNote> corrections;
  unsigned full_mask() const { return (1u << corrections.size()) - 1u; }
};

/// Registry of every recorded formula, keyed by stable id.  Throws
/// std::invalid_argument for unknown ids.
const FormulaCatalog& formula_catalog(const std::string& id);
std::vector<std::string> formula_ids();

// --- map builders (the objects the generic oracles run on) -----------------

/// Inclusion of one factor at a fixed level of the other:
/// side=base: x -> (x, level) from (B, g_B) into the warped product;
/// side=fiber: y -> (level, y) from (F, g_F).
SmoothMap inclusion_map(const DwpSpace& s, FactorSide side, const Vec& level);

/// Projection of the warped product onto one factor.
SmoothMap projection_map(const DwpSpace& s, FactorSide side);

/// Product map from the warped product to the plain product acting as the
/// identity on one factor and as `phi` on the other (`phi_side` names the
/// factor `phi` acts on; phi must be a self-map of that factor).
SmoothMap product_map_domain_warped(const DwpSpace& s, FactorSide phi_side, const SmoothMap& phi);

/// Product map from the plain product to the warped product, identity on the
/// base and `phi` on the fiber.
SmoothMap product_map_codomain_warped(const DwpSpace& s, const SmoothMap& phi);

/// Numerical harmonicity precondition: throws DomainError unless |tau(phi)|
/// stays below tol at `samples` seeded chart points.
void require_harmonic(const SmoothMap& phi, double tol = 1e-9, int samples = 50,
                      std::uint64_t seed = 424242u);

// --- inclusion fields -------------------------------------------------------
// Fields along the inclusion, evaluated at `point` in the included factor's
// chart with the other factor frozen at `level`.  Formula ids:
//   inclusion-base-tension    (1 correction)
//   inclusion-base-bitension  (3 corrections)
//   inclusion-base-laplacian  (2 corrections)   [the -(rough Laplacian) term]
// and the -fiber- mirrors with identical catalogs.

SplitVector inclusion_tension(const DwpSpace& s, FactorSide side, const Vec& point,
                              const Vec& level, unsigned mask);
SplitVector inclusion_bitension(const DwpSpace& s, FactorSide side, const Vec& point,
                                const Vec& level, unsigned mask);
SplitVector inclusion_laplacian_term(const DwpSpace& s, FactorSide side, const Vec& point,
                                     const Vec& level, unsigned mask);

// --- classification ---------------------------------------------------------

enum class BiharmonicVerdict { harmonic, proper_biharmonic, not_biharmonic, indeterminate };

/// Oracle-based classification of an inclusion map, with the analytic
/// classification conditions evaluated alongside when they are decidable.
struct BiharmonicClass {
  BiharmonicVerdict verdict = BiharmonicVerdict::indeterminate;
  /// Verdict implied by the analytic conditions (opposite warping constant,
  /// criticality of the squared warping and of its gradient norm), when every
  /// ingredient is decidably zero or nonzero at the working tolerance.
  std::optional<BiharmonicVerdict> condition_verdict;
  double tension_norm = 0.0;    ///< max warped-metric norm of tau over samples
  double bitension_norm = 0.0;  ///< max warped-metric norm of tau_2 over samples
  double tol = 0.0;
};

const char* to_string(BiharmonicVerdict v);

/// Classify the inclusion of `side` at `level` by sampling the generic-
/// pipeline tension and bitension over the included factor's chart.  Norms
/// inside the band (tol/10, 10 tol) yield `indeterminate` rather than a
/// forced call.  Throws std::invalid_argument for non-positive tol.
BiharmonicClass classify_inclusion(const DwpSpace& s, FactorSide side, const Vec& level,
                                   double tol, int samples = 25,
                                   std::uint64_t seed = 31337u);

// --- projection fields ------------------------------------------------------
// Fields along the projection onto `side`, evaluated at a product point
// p = (x, y); values are factor-coordinate vectors on the target factor.
// Formula ids: projection-base-tension (1), projection-base-bitension (3),
// and the -fiber- mirrors.

Vec projection_tension(const DwpSpace& s, FactorSide side, const Vec& p, unsigned mask);
Vec projection_bitension(const DwpSpace& s, FactorSide side, const Vec& p, unsigned mask);

// --- product maps, domain warped --------------------------------------------

/// Closed fields of the product map (identity x phi) from the warped product
/// to the plain product at p = (x, y).
struct ProductDomainFields {
  SplitVector tension;    ///< formula id product-domain-tension (2 corrections)
  SplitVector bitension;  ///< (projection bitension slot, operator slot)
  Vec operator_value;     ///< the fiber-operator value; id product-domain-operator (3)
};

/// phi: harmonic self-map of the fiber (checked).  `proj_mask` feeds the
/// projection-bitension slot, `op_mask` the operator slot, `tau_mask` the
/// tension.
ProductDomainFields product_domain_warped(const DwpSpace& s, const SmoothMap& phi, const Vec& p,
                                          unsigned tau_mask, unsigned proj_mask,
                                          unsigned op_mask);

/// Mirror: phi is a harmonic self-map of the base; the operator acts in the
/// base slot and the projection-bitension in the fiber slot.
ProductDomainFields product_domain_warped_mirror(const DwpSpace& s, const SmoothMap& phi,
                                                 const Vec& p, unsigned tau_mask,
                                                 unsigned proj_mask, unsigned op_mask);

// --- product map, codomain warped -------------------------------------------

/// Derived closed tension of (identity x phi) from the plain product into the
/// warped product: ( -(e(phi)/f²∘phi) H(x), -(m/(2 b²(x))) G(phi(y)) ).
SplitVector codomain_warped_tension(const DwpSpace& s, const SmoothMap& phi, const Vec& p);

/// The two documented readings of each ill-typed scalar in the transcribed
/// biharmonicity conditions for the codomain-warped product map.
enum class ConditionReading {
  compose,  ///< evaluate the fiber scalar/vector at phi(y) (compose with phi)
  pullback  ///< differentiate the pulled-back quantity at y
};

/// Transcribed biharmonicity conditions of the codomain-warped product map,
/// evaluated as labeled diagnostics, plus the generic-pipeline bitension that
/// adjudicates them.  base_condition is a base-factor vector, fiber_condition
/// a fiber-factor vector, indexed by the reading of their ambiguous term.
struct CodomainConditions {
  Vec base_condition_compose, base_condition_pullback;
  Vec fiber_condition_compose, fiber_condition_pullback;
  SplitVector oracle_bitension;
};
CodomainConditions codomain_warped_conditions(const DwpSpace& s, const SmoothMap& phi,
                                              const Vec& p);

}  // namespace warpcheck
