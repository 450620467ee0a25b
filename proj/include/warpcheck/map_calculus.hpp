// SPDX-License-Identifier: MIT
/*!
  \file
  \brief Calculus of smooth maps between metric patches: differentials,
         tension fields, pullback connections, Jacobi operators, and the
         second-order tension (bitension) computed from jets.

  Sign conventions, fixed project-wide:
    - the rough Laplacian on sections along a map is
      Δv = −g^{ij} (∇^φ)²_{ij} v (so on flat space Δ(x² ∂_x) = −2 ∂_x);
    - the Jacobi operator is J(v) = Δv + trace_g R(dφ, v) dφ, with the
      curvature applied as [R(X, Y)Z]^a = R^a_{bcd} Z^b X^c Y^d;
    - the second-order tension is τ₂ = −J(τ), which therefore vanishes for
      harmonic maps and for the standard flat examples.
*/
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "warpcheck/geometry.hpp"

namespace warpcheck {

/*!
  \brief Smooth map between patches, one component expression per target
         coordinate, written in the source coordinates.
*/
struct SmoothMap {
  std::string name;
  MetricPatch source;
  MetricPatch target;
  std::vector<ScalarFieldExpr> components;
};

/// Validates component count and variable naming; throws std::invalid_argument.
SmoothMap make_map(std::string name, MetricPatch source, MetricPatch target,
                   std::vector<ScalarFieldExpr> components);

SmoothMap identity_map(const MetricPatch& m);

/// Image point φ(p).
Vec map_values(const SmoothMap& f, const Vec& p);

/// Jets of all map components at p (target.dim entries over source variables).
std::vector<Jet> map_jets(const SmoothMap& f, const Vec& p, int order);

/// dφ_p applied to a coordinate vector.
Vec differential(const SmoothMap& f, const Vec& p, const Vec& x);

/// Target Christoffel symbols pulled back through the map, as jets over the
/// source variables ([a][b][c] row-major in target indices).
std::vector<Jet> christoffel_along(const SmoothMap& f, const Vec& p, int order);

/*!
  \brief Section along the map: target-vector-valued field over the source,
         reported as jets of a requested order at a requested point.
*/
using SectionJets = std::function<std::vector<Jet>(const Vec& p, int order)>;

/// Section whose components are fixed expressions in the source coordinates.
SectionJets section_from_exprs(std::vector<ScalarFieldExpr> components);

/// How fibered traces over the source metric are evaluated.
enum class TraceMode { contraction, orthonormal_frame };

/// Tension field τ(φ) as jets of the given order (map jets of order+2 are
/// consumed, so order must be at most 2).
std::vector<Jet> tension_jets(const SmoothMap& f, const Vec& p, int order);

/// Tension field values at p.
Vec tension(const SmoothMap& f, const Vec& p);

/// Energy density e(φ) = ½ g^{ij} h_{ab}(φ) ∂_iφ^a ∂_jφ^b.
double energy_density(const SmoothMap& f, const Vec& p);

/// Pullback covariant derivative ∇^φ_X v at p; v must have jet order >= 1.
Vec pullback_derivative(const SmoothMap& f, const Vec& p, const std::vector<Jet>& v,
                        const Vec& x);

/// Rough Laplacian Δv = −trace_g (∇^φ)² v of a section (jet order >= 2).
Vec rough_laplacian(const SmoothMap& f, const Vec& p, const std::vector<Jet>& v,
                    TraceMode mode = TraceMode::contraction);
Vec rough_laplacian(const SmoothMap& f, const Vec& p, const SectionJets& v,
                    TraceMode mode = TraceMode::contraction);

/// Jacobi operator J(v) = Δv + trace_g R(dφ, v) dφ.
Vec jacobi(const SmoothMap& f, const Vec& p, const std::vector<Jet>& v,
           TraceMode mode = TraceMode::contraction);
Vec jacobi(const SmoothMap& f, const Vec& p, const SectionJets& v,
           TraceMode mode = TraceMode::contraction);

/// Second-order tension τ₂ = −J(τ) computed entirely from jets of the map.
Vec bitension_oracle(const SmoothMap& f, const Vec& p,
                     TraceMode mode = TraceMode::contraction);

}  // namespace warpcheck
