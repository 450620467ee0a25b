// SPDX-License-Identifier: MIT
/*!
  \file
  \brief Jet arithmetic tests: frozen coefficient values, a finite-difference
         derivative oracle in extended precision, and algebraic properties.
*/
#include "warpcheck/jet.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "warpcheck/expr.hpp"
#include "test_support.hpp"

namespace warpcheck {
namespace {

using testing::fd_partial;
using testing::rel_err;

TEST(JetLayout, SizesAndIndexRoundTrip) {
  const JetLayout* L44 = JetLayout::get(4, 4);
  EXPECT_EQ(L44->size(), 70);  // C(8,4)
  const JetLayout* L23 = JetLayout::get(2, 3);
  EXPECT_EQ(L23->size(), 10);  // C(5,3)
  const JetLayout* L10 = JetLayout::get(1, 0);
  EXPECT_EQ(L10->size(), 1);

  for (int i = 0; i < L44->size(); ++i) {
    EXPECT_EQ(L44->index_of(L44->alpha(i)), i);
  }
  // Same (nvars, order) yields the same cached instance.
  EXPECT_EQ(JetLayout::get(4, 4), L44);
}

TEST(JetLayout, GradedOrderMakesTruncationAPrefix) {
  const JetLayout* L = JetLayout::get(3, 4);
  int last_degree = 0;
  for (int i = 0; i < L->size(); ++i) {
    EXPECT_GE(L->degree(i), last_degree);
    last_degree = L->degree(i);
  }
  EXPECT_EQ(L->prefix_size(0), 1);
  EXPECT_EQ(L->prefix_size(1), 4);
}

TEST(Jet, SquarePolynomialFrozenCoefficients) {
  const JetLayout* L = JetLayout::get(1, 3);
  Jet x = Jet::variable(L, 0, 3.0);
  Jet f = x * x;
  EXPECT_DOUBLE_EQ(f.value(), 9.0);
  EXPECT_DOUBLE_EQ(f.deriv(0), 6.0);
  const int c2[] = {2};
  EXPECT_DOUBLE_EQ(f.partial(c2), 2.0);
  const int c3[] = {3};
  EXPECT_DOUBLE_EQ(f.partial(c3), 0.0);
}

TEST(Jet, ExpCoefficientsAreInverseFactorials) {
  const JetLayout* L = JetLayout::get(1, 4);
  Jet f = exp(Jet::variable(L, 0, 0.0));
  double fact = 1.0;
  for (int k = 0; k <= 4; ++k) {
    if (k > 0) fact *= k;
    MultiIndex a{};
    a[0] = static_cast<std::uint8_t>(k);
    EXPECT_NEAR(f.coeff(L->index_of(a)), 1.0 / fact, 1e-15);
  }
}

TEST(Jet, BilinearMixedPartial) {
  const JetLayout* L = JetLayout::get(2, 2);
  Jet x = Jet::variable(L, 0, 2.0);
  Jet y = Jet::variable(L, 1, 5.0);
  Jet f = x * y;
  EXPECT_DOUBLE_EQ(f.value(), 10.0);
  EXPECT_DOUBLE_EQ(f.deriv(0), 5.0);
  EXPECT_DOUBLE_EQ(f.deriv(1), 2.0);
  const int mixed[] = {1, 1};
  EXPECT_DOUBLE_EQ(f.partial(mixed), 1.0);
}

// Every partial of order <= 3 of every corpus field must match a 5-point
// central-difference oracle computed in long double on the same tree.
TEST(Jet, FiniteDifferenceOracleOnCorpus) {
  SplitMix64 rng(20260813);
  int pairs = 0;
  while (pairs < 200) {
    const int dim = 1 + static_cast<int>(rng.next() % 3);
    std::vector<std::string> vars;
    for (int v = 0; v < dim; ++v) vars.push_back("x" + std::to_string(v + 1));
    const auto corpus = testing::make_corpus(dim, rng, 8);
    for (const auto& src : corpus) {
      if (pairs >= 200) break;
      ScalarFieldExpr e = parse(src, vars);
      std::vector<double> p(static_cast<size_t>(dim));
      for (auto& c : p) c = rng.uniform(-0.9, 0.9);
      Jet j = eval_jet(e, p, 3);
      const JetLayout* L = j.layout();
      for (int i = 0; i < L->size(); ++i) {
        std::vector<int> counts(static_cast<size_t>(dim));
        for (int v = 0; v < dim; ++v) counts[static_cast<size_t>(v)] = L->alpha(i)[static_cast<size_t>(v)];
        const double fd = fd_partial(e, p, counts);
        const double jet_val = j.partial(counts);
        EXPECT_LE(rel_err(jet_val, fd), 1e-6)
            << "field `" << src << "` partial order " << L->degree(i) << " at index " << i;
      }
      ++pairs;
    }
  }
  EXPECT_EQ(pairs, 200);
}

TEST(Jet, HigherOrderCoefficientsAreAPrefixExtension) {
  std::vector<std::string> vars{"x1", "x2"};
  ScalarFieldExpr e = parse("exp(0.7*x1)*sin(x2)+x1^3", vars);
  const std::vector<double> p{0.3, -0.2};
  Jet j3 = eval_jet(e, p, 3);
  Jet j4 = eval_jet(e, p, 4);
  Jet j4t = j4.truncated(3);
  EXPECT_LE(max_abs_diff(j3, j4t), 1e-15);
}

Jet random_jet(const JetLayout* L, SplitMix64& rng, double value_floor = 0.0) {
  Jet j = Jet::constant(L, 0.0);
  for (int i = 0; i < L->size(); ++i) j.coeff(i) = rng.uniform(-1.0, 1.0);
  if (value_floor > 0.0 && std::abs(j.value()) < value_floor) {
    j.coeff(0) = value_floor + rng.uniform01();
  }
  return j;
}

TEST(Jet, AdditionAndMultiplicationCommuteBitExactly) {
  SplitMix64 rng(11);
  const JetLayout* L = JetLayout::get(3, 4);
  for (int rep = 0; rep < 20; ++rep) {
    Jet a = random_jet(L, rng);
    Jet b = random_jet(L, rng);
    Jet ab = a + b, ba = b + a;
    Jet m1 = a * b, m2 = b * a;
    EXPECT_EQ(max_abs_diff(ab, ba), 0.0);
    EXPECT_EQ(max_abs_diff(m1, m2), 0.0);
  }
}

TEST(Jet, ReassociationStaysWithinUlpAccumulation) {
  SplitMix64 rng(12);
  const JetLayout* L = JetLayout::get(2, 4);
  std::vector<Jet> xs;
  for (int i = 0; i < 100; ++i) xs.push_back(random_jet(L, rng));

  Jet left = xs[0];
  for (size_t i = 1; i < xs.size(); ++i) left = left + xs[i];
  Jet right = xs.back();
  for (size_t i = xs.size() - 1; i-- > 0;) right = xs[i] + right;
  // <= 100 additions, each contributing at most one rounding of the running
  // magnitude; bound by 100 ulp of the accumulated scale.
  double scale = 0.0;
  for (int i = 0; i < L->size(); ++i) scale = std::max(scale, std::abs(left.coeff(i)));
  EXPECT_LE(max_abs_diff(left, right), 100 * std::numeric_limits<double>::epsilon() * std::max(scale, 10.0));

  Jet prod_left = xs[0];
  for (int i = 1; i < 100; ++i) prod_left = prod_left * xs[static_cast<size_t>(i % 7)];
  Jet prod_right = xs[0];
  for (int i = 1; i < 100; ++i) prod_right = prod_right * xs[static_cast<size_t>(i % 7)];
  EXPECT_EQ(max_abs_diff(prod_left, prod_right), 0.0);  // identical op order is deterministic
}

TEST(Jet, DivisionIsInverseOfMultiplication) {
  SplitMix64 rng(13);
  const JetLayout* L = JetLayout::get(3, 4);
  for (int rep = 0; rep < 20; ++rep) {
    Jet a = random_jet(L, rng);
    Jet b = random_jet(L, rng, 0.5);
    Jet q = (a / b) * b;
    EXPECT_LE(max_abs_diff(q, a), 1e-12);
    Jet r = inverse(inverse(b));
    EXPECT_LE(max_abs_diff(r, b), 1e-12);
  }
}

TEST(Jet, BuiltinIdentities) {
  SplitMix64 rng(14);
  const JetLayout* L = JetLayout::get(2, 4);
  for (int rep = 0; rep < 10; ++rep) {
    Jet x = random_jet(L, rng, 0.6);
    Jet s = sin(x), c = cos(x);
    Jet one = s * s + c * c;
    EXPECT_NEAR(one.value(), 1.0, 1e-14);
    for (int i = 1; i < L->size(); ++i) EXPECT_NEAR(one.coeff(i), 0.0, 1e-13);

    Jet pos = x;
    pos.coeff(0) = 1.0 + std::abs(pos.value());
    EXPECT_LE(max_abs_diff(exp(log(pos)), pos), 1e-12);
    EXPECT_LE(max_abs_diff(log(exp(x)), x), 1e-12);
    Jet rt = sqrt(pos);
    EXPECT_LE(max_abs_diff(rt * rt, pos), 1e-12);
    EXPECT_LE(max_abs_diff(pow(x, 3ll), x * x * x), 1e-13);
    EXPECT_LE(max_abs_diff(pow(pos, -2ll), inverse(pos * pos)), 1e-12);
    // Real power on a negative base is fine for integral exponents.
    Jet negbase = x;
    negbase.coeff(0) = -2.0;
    EXPECT_LE(max_abs_diff(pow(negbase, 2.0), negbase * negbase), 1e-12);
  }
}

TEST(Jet, DerivativeExtractionMatchesAnalyticDerivative) {
  std::vector<std::string> vars{"x1", "x2"};
  const std::vector<double> p{0.4, -0.3};
  struct Pair {
    const char* f;
    const char* dfdx1;
  };
  const Pair pairs[] = {
      {"sin(2*x1+x2)", "2*cos(2*x1+x2)"},
      {"exp(x1*x2)", "x2*exp(x1*x2)"},
      {"x1^3*x2+x1", "3*x1^2*x2+1"},
      {"log(2+x1)", "1/(2+x1)"},
  };
  for (const auto& pr : pairs) {
    Jet f = eval_jet(parse(pr.f, vars), p, 4);
    Jet expected = eval_jet(parse(pr.dfdx1, vars), p, 3);
    EXPECT_LE(max_abs_diff(derivative(f, 0), expected), 1e-12) << pr.f;
  }
}

TEST(Jet, ComposeMatchesDirectSubstitution) {
  // outer(u, v) = u*v + sin(u), with u = x1 + x2^2, v = exp(x1).
  std::vector<std::string> xy{"x1", "x2"};
  const std::vector<double> p{0.2, 0.5};
  Jet u = eval_jet(parse("x1+x2^2", xy), p, 4);
  Jet v = eval_jet(parse("exp(x1)", xy), p, 4);
  Jet outer = eval_jet(parse("u*v+sin(u)", {"u", "v"}),
                       std::vector<double>{u.value(), v.value()}, 4);
  Jet composed = compose(outer, {u, v});
  Jet direct = eval_jet(parse("(x1+x2^2)*exp(x1)+sin(x1+x2^2)", xy), p, 4);
  EXPECT_LE(max_abs_diff(composed, direct), 1e-12);
}

TEST(Jet, DomainErrors) {
  const JetLayout* L = JetLayout::get(1, 2);
  Jet zero = Jet::constant(L, 0.0);
  Jet neg = Jet::constant(L, -1.0);
  EXPECT_THROW(log(zero), DomainError);
  EXPECT_THROW(log(neg), DomainError);
  EXPECT_THROW(sqrt(neg), DomainError);
  EXPECT_THROW(inverse(zero), DomainError);
  EXPECT_THROW(pow(neg, 0.5), DomainError);
  EXPECT_NO_THROW(pow(neg, 2.0));

  const JetLayout* L2 = JetLayout::get(2, 2);
  Jet other = Jet::constant(L2, 1.0);
  EXPECT_THROW(zero + other, std::invalid_argument);
  EXPECT_THROW(JetLayout::get(9, 2), std::invalid_argument);
  EXPECT_THROW(JetLayout::get(2, 9), std::invalid_argument);
}

TEST(Jet, EvalJetOrderCap) {
  ScalarFieldExpr e = parse("x1", {"x1"});
  const std::vector<double> p{0.0};
  EXPECT_THROW(eval_jet(e, p, 5), std::invalid_argument);
  EXPECT_THROW(eval_jet(e, p, -1), std::invalid_argument);
  EXPECT_NO_THROW(eval_jet(e, p, 0));
  EXPECT_NO_THROW(eval_jet(e, p, 4));
}

}  // namespace
}  // namespace warpcheck
