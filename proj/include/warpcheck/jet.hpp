// SPDX-License-Identifier: MIT
/*!
  \file
  \brief Dense truncated multivariate Taylor (jet) arithmetic.

  A Jet stores every normalized Taylor coefficient of a smooth scalar quantity
  about a point, up to a fixed total order: coefficient(alpha) equals the
  partial derivative for multi-index alpha divided by alpha!.  Arithmetic and
  the elementary functions propagate all coefficients exactly, so every
  derivative extracted from a jet is exact to roundoff -- differentiation never
  falls back to finite differences anywhere in the engine.
*/
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace warpcheck {

/// Thrown when an evaluation leaves a function's domain
/// (log/sqrt of a non-positive value, division by zero, real powers of
/// non-positive bases, singular metrics).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when an internal cross-check fails; indicates a defect, not bad input.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Hard caps for the dense coefficient tables.
inline constexpr int kMaxVars = 8;
inline constexpr int kMaxJetOrder = 8;

/// Per-variable partial-derivative counts.
using MultiIndex = std::array<std::uint8_t, kMaxVars>;

/*!
  \brief Shared coefficient layout for all jets with the same variable count
         and truncation order.

  Multi-indices are enumerated by ascending total degree (lexicographic within
  a degree), so truncating a jet to a lower order is a prefix copy.  Layouts
  are built once and cached for the lifetime of the process; pointers returned
  by get() are stable and unique per (nvars, order), which lets jets compare
  layouts by pointer.
*/
class JetLayout {
 public:
  /// Cached lookup; thread-safe. Throws std::invalid_argument outside caps.
  static const JetLayout* get(int nvars, int order);

  int nvars() const { return nvars_; }
  int order() const { return order_; }
  /// Number of stored coefficients: C(nvars + order, order).
  int size() const { return static_cast<int>(alphas_.size()); }

  const MultiIndex& alpha(int idx) const { return alphas_[static_cast<size_t>(idx)]; }
  int degree(int idx) const { return degrees_[static_cast<size_t>(idx)]; }
  /// Index of a multi-index, or -1 when its total degree exceeds the order.
  int index_of(const MultiIndex& a) const;
  /// Number of coefficients of total degree <= d (prefix length).
  int prefix_size(int d) const { return prefix_[static_cast<size_t>(d) + 1]; }

  struct MulTerm {
    std::uint16_t a, b, dst;  // a <= b; off-diagonal pairs contribute twice
  };
  /// Unordered coefficient pairs whose product lands inside the truncation
  /// order.  Storing each pair once keeps multiplication bit-exactly
  /// commutative: both orders accumulate identical summands identically.
  std::span<const MulTerm> mul_terms() const { return mul_terms_; }

 private:
  JetLayout(int nvars, int order);
  int nvars_ = 0;
  int order_ = 0;
  std::vector<MultiIndex> alphas_;
  std::vector<int> degrees_;
  std::vector<int> prefix_;
  std::vector<MulTerm> mul_terms_;
  std::vector<std::uint64_t> packed_;  // packed alphas, sorted, for index_of
  std::vector<int> packed_idx_;
};

/*!
  \brief Truncated multivariate Taylor expansion with normalized coefficients.

  The value of the underlying quantity is coefficient 0; first derivatives are
  the degree-1 coefficients; higher coefficients carry derivative / alpha!.
*/
class Jet {
 public:
  Jet() = default;

  /// Constant jet: value with all derivatives zero.
  static Jet constant(const JetLayout* layout, double value);
  /// Coordinate jet: value plus unit first-order coefficient for `var`.
  static Jet variable(const JetLayout* layout, int var, double value);

  bool valid() const { return layout_ != nullptr; }
  const JetLayout* layout() const { return layout_; }

  double value() const { return coeffs_[0]; }
  /// First partial derivative with respect to variable `var`.
  double deriv(int var) const;
  /// Normalized coefficient by flat index.
  double coeff(int idx) const { return coeffs_[static_cast<size_t>(idx)]; }
  double& coeff(int idx) { return coeffs_[static_cast<size_t>(idx)]; }
  /// Un-normalized partial derivative for the given per-variable counts.
  double partial(std::span<const int> counts) const;

  std::span<const double> coeffs() const { return coeffs_; }

  /// Copy truncated to a lower (or equal) order in the same variables.
  Jet truncated(int order) const;

  Jet operator-() const;
  Jet& operator+=(const Jet& rhs);
  Jet& operator-=(const Jet& rhs);
  Jet& operator*=(const Jet& rhs);
  Jet& operator/=(const Jet& rhs);
  Jet& operator+=(double rhs);
  Jet& operator-=(double rhs);
  Jet& operator*=(double rhs);
  Jet& operator/=(double rhs);

  friend Jet operator+(Jet lhs, const Jet& rhs) { return lhs += rhs; }
  friend Jet operator-(Jet lhs, const Jet& rhs) { return lhs -= rhs; }
  friend Jet operator*(const Jet& lhs, const Jet& rhs);
  friend Jet operator/(const Jet& lhs, const Jet& rhs);
  friend Jet operator+(Jet lhs, double rhs) { return lhs += rhs; }
  friend Jet operator-(Jet lhs, double rhs) { return lhs -= rhs; }
  friend Jet operator*(Jet lhs, double rhs) { return lhs *= rhs; }
  friend Jet operator/(Jet lhs, double rhs) { return lhs /= rhs; }
  friend Jet operator+(double lhs, Jet rhs) { return rhs += lhs; }
  friend Jet operator-(double lhs, const Jet& rhs);
  friend Jet operator*(double lhs, Jet rhs) { return rhs *= lhs; }
  friend Jet operator/(double lhs, const Jet& rhs);

 private:
  explicit Jet(const JetLayout* layout);
  void require_same_layout(const Jet& rhs) const;
  const JetLayout* layout_ = nullptr;
  std::vector<double> coeffs_;
};

/// Multiplicative inverse 1/x (value must be nonzero).
Jet inverse(const Jet& x);
Jet sin(const Jet& x);
Jet cos(const Jet& x);
Jet exp(const Jet& x);
/// Natural logarithm; value must be positive.
Jet log(const Jet& x);
/// Square root; value must be positive.
Jet sqrt(const Jet& x);
/// Integer power; any value for n >= 0, nonzero value for n < 0.
Jet pow(const Jet& x, long long n);
/// Real power via exp(p log x); value must be positive unless p is integral.
Jet pow(const Jet& x, double p);

/*!
  \brief Partial-derivative extraction: the jet of the derivative field.

  Returns d(f)/d(var) as a jet of order (order - 1) in the same variables:
  coefficient(beta) of the result is coefficient(beta + e_var) * (beta_var + 1).
*/
Jet derivative(const Jet& f, int var);

/*!
  \brief Multivariate truncated composition.

  `outer` is a jet in k variables expanded about the point whose coordinates
  are inner[0].value(), ..., inner[k-1].value(); all `inner` jets share one
  layout.  Returns the jet of outer(inner...) in the inner layout.  The outer
  order must be at least the inner order so no contributing term is missing.
*/
Jet compose(const Jet& outer, const std::vector<Jet>& inner);

/*!
  \brief Embed a jet into a layout with more variables.

  The source variables map to destination variables var_offset..var_offset +
  src_nvars - 1; coefficients along the extra variables are zero (the lifted
  quantity is constant in those directions).  The destination order must be at
  least the source order.
*/
Jet lift_jet(const Jet& src, const JetLayout* dst, int var_offset);

/// Largest absolute coefficient difference (layouts must match).
double max_abs_diff(const Jet& a, const Jet& b);

}  // namespace warpcheck
