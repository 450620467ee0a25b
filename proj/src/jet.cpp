// SPDX-License-Identifier: MIT
/*!
  \file
  \brief Layout tables and coefficient propagation for jet arithmetic.
*/
#include "warpcheck/jet.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>

namespace warpcheck {
namespace {

std::uint64_t pack(const MultiIndex& a) {
  std::uint64_t v = 0;
  static_assert(sizeof(MultiIndex) == sizeof(std::uint64_t));
  std::memcpy(&v, a.data(), sizeof(v));
  return v;
}

int total_degree(const MultiIndex& a) {
  int d = 0;
  for (auto c : a) d += c;
  return d;
}

// Enumerates all multi-indices in `nvars` variables with total degree exactly
// `deg`, in lexicographic order, appending to `out`.
void enumerate_degree(int nvars, int deg, MultiIndex& cur, int pos, std::vector<MultiIndex>& out) {
  if (pos == nvars - 1) {
    cur[static_cast<size_t>(pos)] = static_cast<std::uint8_t>(deg);
    out.push_back(cur);
    cur[static_cast<size_t>(pos)] = 0;
    return;
  }
  for (int take = deg; take >= 0; --take) {
    cur[static_cast<size_t>(pos)] = static_cast<std::uint8_t>(take);
    enumerate_degree(nvars, deg - take, cur, pos + 1, out);
  }
  cur[static_cast<size_t>(pos)] = 0;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace

JetLayout::JetLayout(int nvars, int order) : nvars_(nvars), order_(order) {
  MultiIndex cur{};
  prefix_.push_back(0);
  for (int deg = 0; deg <= order; ++deg) {
    enumerate_degree(nvars, deg, cur, 0, alphas_);
    prefix_.push_back(static_cast<int>(alphas_.size()));
  }
  degrees_.reserve(alphas_.size());
  for (const auto& a : alphas_) degrees_.push_back(total_degree(a));

  std::vector<std::pair<std::uint64_t, int>> lookup;
  lookup.reserve(alphas_.size());
  for (int i = 0; i < static_cast<int>(alphas_.size()); ++i) {
    lookup.emplace_back(pack(alphas_[static_cast<size_t>(i)]), i);
  }
  std::sort(lookup.begin(), lookup.end());
  for (const auto& [key, idx] : lookup) {
    packed_.push_back(key);
    packed_idx_.push_back(idx);
  }

  for (int i = 0; i < size(); ++i) {
    for (int j = i; j < size(); ++j) {
      if (degrees_[static_cast<size_t>(i)] + degrees_[static_cast<size_t>(j)] > order) continue;
      MultiIndex sum{};
      for (int v = 0; v < kMaxVars; ++v) {
        sum[static_cast<size_t>(v)] = static_cast<std::uint8_t>(
            alphas_[static_cast<size_t>(i)][static_cast<size_t>(v)] +
            alphas_[static_cast<size_t>(j)][static_cast<size_t>(v)]);
      }
      const int dst = index_of(sum);
      mul_terms_.push_back({static_cast<std::uint16_t>(i), static_cast<std::uint16_t>(j),
                            static_cast<std::uint16_t>(dst)});
    }
  }
}

int JetLayout::index_of(const MultiIndex& a) const {
  if (total_degree(a) > order_) return -1;
  const std::uint64_t key = pack(a);
  const auto it = std::lower_bound(packed_.begin(), packed_.end(), key);
  return packed_idx_[static_cast<size_t>(it - packed_.begin())];
}

const JetLayout* JetLayout::get(int nvars, int order) {
  if (nvars < 1 || nvars > kMaxVars || order < 0 || order > kMaxJetOrder) {
    throw std::invalid_argument("jet layout outside supported caps: nvars=" +
                                std::to_string(nvars) + " order=" + std::to_string(order));
  }
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<JetLayout>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{nvars, order}];
  if (!slot) slot.reset(new JetLayout(nvars, order));
  return slot.get();
}

Jet::Jet(const JetLayout* layout)
    : layout_(layout), coeffs_(static_cast<size_t>(layout->size()), 0.0) {}

Jet Jet::constant(const JetLayout* layout, double value) {
  Jet j(layout);
  j.coeffs_[0] = value;
  return j;
}

Jet Jet::variable(const JetLayout* layout, int var, double value) {
  if (var < 0 || var >= layout->nvars()) {
    throw std::invalid_argument("jet variable index out of range");
  }
  Jet j(layout);
  j.coeffs_[0] = value;
  if (layout->order() >= 1) j.coeffs_[static_cast<size_t>(1 + var)] = 1.0;
  return j;
}

double Jet::deriv(int var) const {
  MultiIndex a{};
  a[static_cast<size_t>(var)] = 1;
  const int idx = layout_->index_of(a);
  if (idx < 0) throw std::invalid_argument("jet order too low for a first derivative");
  return coeffs_[static_cast<size_t>(idx)];
}

double Jet::partial(std::span<const int> counts) const {
  MultiIndex a{};
  double fact = 1.0;
  if (static_cast<int>(counts.size()) > layout_->nvars()) {
    throw std::invalid_argument("partial(): more variables than the layout holds");
  }
  for (size_t v = 0; v < counts.size(); ++v) {
    a[v] = static_cast<std::uint8_t>(counts[v]);
    fact *= factorial(counts[v]);
  }
  const int idx = layout_->index_of(a);
  if (idx < 0) throw std::invalid_argument("partial(): order exceeds the jet order");
  return coeffs_[static_cast<size_t>(idx)] * fact;
}

Jet Jet::truncated(int order) const {
  if (order > layout_->order()) throw std::invalid_argument("truncated(): order must not grow");
  const JetLayout* lo = JetLayout::get(layout_->nvars(), order);
  Jet out(lo);
  std::copy_n(coeffs_.begin(), lo->size(), out.coeffs_.begin());
  return out;
}

void Jet::require_same_layout(const Jet& rhs) const {
  if (layout_ != rhs.layout_) {
    throw std::invalid_argument("jet layout mismatch in arithmetic");
  }
}

Jet Jet::operator-() const {
  Jet out = *this;
  for (auto& c : out.coeffs_) c = -c;
  return out;
}

Jet& Jet::operator+=(const Jet& rhs) {
  require_same_layout(rhs);
  for (size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += rhs.coeffs_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& rhs) {
  require_same_layout(rhs);
  for (size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= rhs.coeffs_[i];
  return *this;
}

Jet operator*(const Jet& lhs, const Jet& rhs) {
  lhs.require_same_layout(rhs);
  Jet out(lhs.layout_);
  for (const auto& t : lhs.layout_->mul_terms()) {
    if (t.a == t.b) {
      out.coeffs_[t.dst] += lhs.coeffs_[t.a] * rhs.coeffs_[t.a];
    } else {
      out.coeffs_[t.dst] += lhs.coeffs_[t.a] * rhs.coeffs_[t.b] + lhs.coeffs_[t.b] * rhs.coeffs_[t.a];
    }
  }
  return out;
}

Jet& Jet::operator*=(const Jet& rhs) {
  *this = *this * rhs;
  return *this;
}

Jet& Jet::operator/=(const Jet& rhs) {
  *this = *this * inverse(rhs);
  return *this;
}

Jet operator/(const Jet& lhs, const Jet& rhs) { return lhs * inverse(rhs); }

Jet& Jet::operator+=(double rhs) {
  coeffs_[0] += rhs;
  return *this;
}
Jet& Jet::operator-=(double rhs) {
  coeffs_[0] -= rhs;
  return *this;
}
Jet& Jet::operator*=(double rhs) {
  for (auto& c : coeffs_) c *= rhs;
  return *this;
}
Jet& Jet::operator/=(double rhs) {
  if (rhs == 0.0) throw DomainError("division by zero");
  for (auto& c : coeffs_) c /= rhs;
  return *this;
}

Jet operator-(double lhs, const Jet& rhs) {
  Jet out = -rhs;
  out += lhs;
  return out;
}

Jet operator/(double lhs, const Jet& rhs) {
  Jet out = inverse(rhs);
  out *= lhs;
  return out;
}

namespace {

// Evaluates sum_k series[k] * n^k by Horner's rule, where n is the nilpotent
// part of x (x with its value zeroed).  series[k] holds f^(k)(value)/k!, so
// the result is the jet of f(x).
Jet horner(const Jet& x, std::span<const double> series) {
  Jet n = x;
  n.coeff(0) = 0.0;
  const int ord = x.layout()->order();
  Jet r = Jet::constant(x.layout(), series[static_cast<size_t>(ord)]);
  for (int k = ord - 1; k >= 0; --k) {
    r = r * n;
    r += series[static_cast<size_t>(k)];
  }
  return r;
}

}  // namespace

Jet inverse(const Jet& x) {
  const double v = x.value();
  if (v == 0.0) throw DomainError("jet inverse: zero value");
  std::vector<double> s(static_cast<size_t>(x.layout()->order()) + 1);
  double p = 1.0 / v;
  for (size_t k = 0; k < s.size(); ++k) {
    s[k] = (k % 2 == 0) ? p : -p;
    p /= v;
  }
  return horner(x, s);
}

Jet sin(const Jet& x) {
  const double v = x.value();
  std::vector<double> s(static_cast<size_t>(x.layout()->order()) + 1);
  double fact = 1.0;
  for (size_t k = 0; k < s.size(); ++k) {
    if (k > 0) fact *= static_cast<double>(k);
    s[k] = std::sin(v + static_cast<double>(k) * 1.5707963267948966) / fact;
  }
  return horner(x, s);
}

Jet cos(const Jet& x) {
  const double v = x.value();
  std::vector<double> s(static_cast<size_t>(x.layout()->order()) + 1);
  double fact = 1.0;
  for (size_t k = 0; k < s.size(); ++k) {
    if (k > 0) fact *= static_cast<double>(k);
    s[k] = std::cos(v + static_cast<double>(k) * 1.5707963267948966) / fact;
  }
  return horner(x, s);
}

Jet exp(const Jet& x) {
  const double ev = std::exp(x.value());
  std::vector<double> s(static_cast<size_t>(x.layout()->order()) + 1);
  double fact = 1.0;
  for (size_t k = 0; k < s.size(); ++k) {
    if (k > 0) fact *= static_cast<double>(k);
    s[k] = ev / fact;
  }
  return horner(x, s);
}

Jet log(const Jet& x) {
  const double v = x.value();
  if (!(v > 0.0)) throw DomainError("jet log: value must be positive");
  std::vector<double> s(static_cast<size_t>(x.layout()->order()) + 1);
  s[0] = std::log(v);
  double p = 1.0 / v;
  for (size_t k = 1; k < s.size(); ++k) {
    s[k] = ((k % 2 == 1) ? 1.0 : -1.0) * p / static_cast<double>(k);
    p /= v;
  }
  return horner(x, s);
}

Jet sqrt(const Jet& x) {
  const double v = x.value();
  if (!(v > 0.0)) throw DomainError("jet sqrt: value must be positive");
  return pow(x, 0.5);
}

Jet pow(const Jet& x, long long n) {
  if (n < 0) return inverse(pow(x, -n));
  Jet result = Jet::constant(x.layout(), 1.0);
  Jet base = x;
  long long e = n;
  while (e > 0) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return result;
}

Jet pow(const Jet& x, double p) {
  if (p == static_cast<double>(static_cast<long long>(p)) && std::abs(p) < 64.0) {
    return pow(x, static_cast<long long>(p));
  }
  const double v = x.value();
  if (!(v > 0.0)) throw DomainError("jet pow: real exponent requires a positive base");
  std::vector<double> s(static_cast<size_t>(x.layout()->order()) + 1);
  // s[k] = binom(p, k) * v^(p-k)
  double coef = 1.0;
  for (size_t k = 0; k < s.size(); ++k) {
    if (k > 0) coef *= (p - static_cast<double>(k - 1)) / static_cast<double>(k);
    s[k] = coef * std::pow(v, p - static_cast<double>(k));
  }
  return horner(x, s);
}

Jet derivative(const Jet& f, int var) {
  const JetLayout* L = f.layout();
  if (L->order() < 1) throw std::invalid_argument("derivative(): jet order is zero");
  if (var < 0 || var >= L->nvars()) throw std::invalid_argument("derivative(): bad variable");
  const JetLayout* Lo = JetLayout::get(L->nvars(), L->order() - 1);
  Jet out = Jet::constant(Lo, 0.0);
  for (int i = 0; i < Lo->size(); ++i) {
    MultiIndex beta = Lo->alpha(i);
    beta[static_cast<size_t>(var)]++;
    const int src = L->index_of(beta);
    out.coeff(i) = f.coeff(src) * static_cast<double>(beta[static_cast<size_t>(var)]);
  }
  return out;
}

Jet compose(const Jet& outer, const std::vector<Jet>& inner) {
  const JetLayout* Lout = outer.layout();
  if (static_cast<int>(inner.size()) != Lout->nvars()) {
    throw std::invalid_argument("compose(): inner count must match outer variable count");
  }
  const JetLayout* L = inner[0].layout();
  for (const auto& g : inner) {
    if (g.layout() != L) throw std::invalid_argument("compose(): inner jets must share a layout");
  }
  if (Lout->order() < L->order()) {
    throw std::invalid_argument("compose(): outer order below inner order");
  }
  const int k = Lout->nvars();
  const int ord = L->order();
  // pows[v][p] = (inner[v] - value_v)^p, p = 0..ord
  std::vector<std::vector<Jet>> pows(static_cast<size_t>(k));
  for (int v = 0; v < k; ++v) {
    Jet nil = inner[static_cast<size_t>(v)];
    nil.coeff(0) = 0.0;
    auto& pv = pows[static_cast<size_t>(v)];
    pv.push_back(Jet::constant(L, 1.0));
    for (int p = 1; p <= ord; ++p) pv.push_back(pv.back() * nil);
  }
  Jet result = Jet::constant(L, 0.0);
  for (int i = 0; i < Lout->size(); ++i) {
    const double c = outer.coeff(i);
    if (c == 0.0) continue;
    const MultiIndex& a = Lout->alpha(i);
    if (Lout->degree(i) > ord) continue;  // nilpotent^deg vanishes past the inner order
    Jet term = Jet::constant(L, c);
    for (int v = 0; v < k; ++v) {
      const int p = a[static_cast<size_t>(v)];
      if (p > 0) term = term * pows[static_cast<size_t>(v)][static_cast<size_t>(p)];
    }
    result += term;
  }
  return result;
}

Jet lift_jet(const Jet& src, const JetLayout* dst, int var_offset) {
  if (!src.valid() || dst == nullptr) throw DomainError("lift_jet: invalid jet or layout");
  const JetLayout* sl = src.layout();
  if (var_offset < 0 || var_offset + sl->nvars() > dst->nvars())
    throw DomainError("lift_jet: source variables do not fit in destination layout");
  if (dst->order() < sl->order())
    throw DomainError("lift_jet: destination order is lower than source order");
  Jet out = Jet::constant(dst, 0.0);
  for (int i = 0; i < sl->size(); ++i) {
    const double c = src.coeff(i);
    if (c == 0.0) continue;
    const MultiIndex& a = sl->alpha(i);
    MultiIndex b{};
    for (int v = 0; v < sl->nvars(); ++v) b[static_cast<size_t>(v + var_offset)] = a[static_cast<size_t>(v)];
    out.coeff(dst->index_of(b)) = c;
  }
  return out;
}

double max_abs_diff(const Jet& a, const Jet& b) {
  if (a.layout() != b.layout()) throw std::invalid_argument("max_abs_diff: layout mismatch");
  double m = 0.0;
  for (int i = 0; i < a.layout()->size(); ++i) {
    m = std::max(m, std::abs(a.coeff(i) - b.coeff(i)));
  }
  return m;
}

}  // namespace warpcheck
