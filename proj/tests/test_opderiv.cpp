#include <random>

#include <gtest/gtest.h>

#include "pbo/opderiv.hpp"
#include "pbo/random.hpp"
#include "support/oracles.hpp"

namespace pbo {
namespace {

using oracle::SwapOracle;

class OneFormalPair : public ::testing::Test {
 protected:
  SystemRef sys = formal_pair_system();
  Poly A = Poly::generator(sys, gen_a());
  Poly B = Poly::generator(sys, gen_b());
  ScalarPoly c = ScalarPoly::symbol("c");
  Poly cst(const ScalarPoly& k) const { return Poly::constant(sys, k); }

  // Average of all literal words A^(n-k) B A^k, each ordered by adjacent swaps.
  Poly symmetrized_by_swaps(unsigned n) {
    SwapOracle oracle(sys);
    std::map<oracle::Letters, ScalarPoly> words;
    for (unsigned k = 0; k <= n; ++k) {
      oracle::Letters w(n - k, 0);
      w.push_back(1);
      w.insert(w.end(), k, 0);
      words[w] += ScalarPoly::ratio(1, n + 1);
    }
    return oracle.order(words);
  }
};

TEST_F(OneFormalPair, LambdaIntegralExamples) {
  EXPECT_EQ(lambda_integral_power(gen_a(), 0, B), B);
  EXPECT_EQ(lambda_integral_power(gen_a(), 1, B), A * B - cst(ScalarPoly::ratio(1, 2) * c));
  EXPECT_EQ(lambda_integral_power(gen_a(), 2, B), pow(A, 2) * B - c * A);
}

TEST_F(OneFormalPair, Formula1AgainstSwapExpansionAndBinomialRoute) {
  for (unsigned n = 0; n <= 6; ++n) {
    auto closed = lambda_integral_power(gen_a(), n, B);
    EXPECT_EQ(closed, symmetrized_by_swaps(n)) << "n=" << n;
    EXPECT_EQ(closed, lambda_integral_by_binomial(gen_a(), n, B)) << "n=" << n;
  }
}

TEST_F(OneFormalPair, Formula2Examples) {
  EXPECT_EQ(formula2_rhs(sys, 0, 1, 1), cst(-c));
  EXPECT_EQ(formula2_rhs(sys, 0, 2, 2), ScalarPoly(-4) * c * (A * B) + cst(ScalarPoly(2) * c * c));
  SwapOracle oracle(sys);
  auto swapped = oracle.order({1, 1, 0, 0, 0}) - oracle.order({0, 0, 0, 1, 1});
  EXPECT_EQ(formula2_rhs(sys, 0, 2, 3), swapped);
}

TEST_F(OneFormalPair, Formula2AgainstSwapOracle) {
  SwapOracle oracle(sys);
  for (unsigned n = 1; n <= 6; ++n)
    for (unsigned m = 1; m <= 6; ++m) {
      oracle::Letters bn_am(n, 1), am_bn(m, 0);
      bn_am.insert(bn_am.end(), m, 0);
      am_bn.insert(am_bn.end(), n, 1);
      auto lhs = oracle.order(bn_am) - oracle.order(am_bn);
      ASSERT_EQ(lhs, formula2_rhs(sys, 0, n, m)) << "n=" << n << " m=" << m;
    }
}

TEST_F(OneFormalPair, Formula3Examples) {
  auto r11 = formula3_check(sys, 0, 1, 1);
  EXPECT_TRUE(r11.holds);
  auto r23 = formula3_check(sys, 0, 2, 3);
  EXPECT_TRUE(r23.holds);
  EXPECT_EQ(lambda_integral_power(gen_b(), 1, pow(A, 2)), pow(A, 2) * B - c * A);
  for (unsigned n = 1; n <= 6; ++n)
    for (unsigned m = 1; m <= 6; ++m) ASSERT_TRUE(formula3_check(sys, 0, n, m).holds) << n << "," << m;
}

TEST_F(OneFormalPair, FormulaArgumentValidation) {
  EXPECT_THROW(formula2_rhs(sys, 0, 0, 1), std::invalid_argument);
  EXPECT_THROW(formula3_check(sys, 0, 1, 0), std::invalid_argument);
  EXPECT_THROW(lambda_integral_power(gen_a(), 65, B), std::domain_error);
  EXPECT_THROW(partial_derivative(pow(A, 65), gen_a()), std::domain_error);
  EXPECT_THROW(partial_derivative(A, gen_a(1)), std::out_of_range);
}

TEST_F(OneFormalPair, SweepReportsAllZero) {
  auto report = formula_sweep(6, sys);
  EXPECT_EQ(report.size(), 6u + 36u + 36u);
  for (const auto& r : report) EXPECT_TRUE(r.residual_is_zero) << r.formula << " " << r.n;
  auto j = to_json(report.front());
  EXPECT_EQ(j["formula"], "F1");
  EXPECT_TRUE(j["m"].is_null());
}

TEST_F(OneFormalPair, PartialDerivativeExamples) {
  EXPECT_EQ(partial_derivative(pow(A, 2) * B, gen_a()), ScalarPoly(2) * (A * B));
  EXPECT_EQ(partial_derivative(pow(A, 2), gen_a(), B), ScalarPoly(2) * (A * B) - cst(c));
  EXPECT_TRUE(partial_derivative(B, gen_a()).is_zero());
  EXPECT_EQ(partial_derivative(pow(B, 3), gen_b(), A), ScalarPoly(3) * lambda_integral_power(gen_b(), 2, A));
}

TEST_F(OneFormalPair, GateauxExamples) {
  EXPECT_EQ(gateaux(pow(A, 3), gen_a(), B), ScalarPoly(3) * (pow(A, 2) * B) - ScalarPoly(3) * c * A);
  EXPECT_EQ(gateaux_by_expansion(pow(A, 3), gen_a(), B), gateaux(pow(A, 3), gen_a(), B));
  EXPECT_EQ(gateaux(A, gen_a(), B), B);
  EXPECT_TRUE(gateaux(Poly::one(sys), gen_a(), B).is_zero());
  EXPECT_THROW(gateaux(A * B, gen_a(), B), std::invalid_argument);
}

TEST_F(OneFormalPair, GateauxMatchesFirstOrderExpansion) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    Poly f(sys);
    for (unsigned e = 0; e <= 5; ++e) f += random_coefficient(rng, {}) * pow(A, e);
    auto dir = random_poly(sys, rng, {.max_degree = 3, .max_terms = 3});
    ASSERT_EQ(gateaux(f, gen_a(), dir), gateaux_by_expansion(f, gen_a(), dir));
  }
}

TEST_F(OneFormalPair, GateauxIsLinearInDirection) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    Poly f(sys);
    for (unsigned e = 0; e <= 4; ++e) f += random_coefficient(rng, {}) * pow(A, e);
    auto b1 = random_poly(sys, rng);
    auto b2 = random_poly(sys, rng);
    auto alpha = random_coefficient(rng, {.complex_coefficients = true});
    auto beta = random_coefficient(rng, {.coefficient_symbols = {"k"}});
    ASSERT_EQ(gateaux(f, gen_a(), alpha * b1 + beta * b2),
              alpha * gateaux(f, gen_a(), b1) + beta * gateaux(f, gen_a(), b2));
  }
}

TEST_F(OneFormalPair, HigherPartialExamples) {
  EXPECT_EQ(higher_partial(pow(A, 3), gen_a(), 2), ScalarPoly(6) * A);
  EXPECT_EQ(higher_partial(pow(A, 2) * B, gen_a(), 2), ScalarPoly(2) * B);
  EXPECT_EQ(higher_partial(pow(B, 4), gen_b(), 3), ScalarPoly(24) * B);
  EXPECT_THROW(higher_partial(A, gen_a(), 0), std::invalid_argument);
}

TEST_F(OneFormalPair, HigherPartialMatchesCommutativeDerivative) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    auto f = random_poly(sys, rng, {.max_degree = 5});
    for (unsigned k = 1; k <= 3; ++k) {
      auto cf = oracle::CommutativePoly::from(f);
      for (unsigned i = 0; i < k; ++i) cf = cf.derivative(1);
      ASSERT_EQ(higher_partial(f, gen_b(), k), cf.to_poly(sys));
    }
  }
}

// Literal words versus their normal form: equal for c-number arguments.
TEST_F(OneFormalPair, MixedWordDerivativeAgreesForScalarArguments) {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<unsigned> pw(0, 3);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Factor> word{{gen_a(), pw(rng)}, {gen_b(), pw(rng)}, {gen_a(), pw(rng)}, {gen_b(), pw(rng)}};
    auto arg = Poly::constant(sys, random_coefficient(rng, {.coefficient_symbols = {"k"}}));
    auto normal = Poly::from_factors(sys, word);
    for (auto g : {gen_a(), gen_b()})
      ASSERT_EQ(mixed_word_derivative(sys, std::span<const Factor>(word), g, arg), partial_derivative(normal, g, arg));
  }
}

// With an operator argument they differ: d/dA{A} on the word BA is B*A = AB - c,
// on its normal form AB - c it is A*B.
TEST_F(OneFormalPair, MixedWordDerivativeDiffersForOperatorArguments) {
  std::vector<Factor> word{{gen_b(), 1}, {gen_a(), 1}};
  auto on_word = mixed_word_derivative(sys, std::span<const Factor>(word), gen_a(), A);
  auto on_normal = partial_derivative(Poly::from_factors(sys, word), gen_a(), A);
  EXPECT_EQ(on_word, A * B - cst(c));
  EXPECT_EQ(on_normal, A * B);
}

TEST(StandardPair, DeltaToDerivativeRelations) {
  auto sys = position_momentum_system();
  auto x = Poly::generator(sys, gen_a());
  auto p = Poly::generator(sys, gen_b());
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    auto f = random_poly(sys, rng, {.max_degree = 4, .complex_coefficients = true});
    ASSERT_EQ(delta(x, f), i_hbar() * partial_derivative(f, gen_b()));
    ASSERT_EQ(delta(p, f), -i_hbar() * partial_derivative(f, gen_a()));
  }
}

TEST(MultiPairDerivative, PrefixAndSuffixPlacement) {
  auto sys = formal_system(2);
  auto A1 = Poly::generator(sys, gen_a(0));
  auto B1 = Poly::generator(sys, gen_b(0));
  auto A2 = Poly::generator(sys, gen_a(1));
  auto B2 = Poly::generator(sys, gen_b(1));
  auto f = pow(A1, 2) * B1 * A2 * B2;
  // d/dA1 {B1}: 2 * (A1 B1 - c1/2) * B1 * A2 B2
  auto expected = ScalarPoly(2) * (lambda_integral_power(gen_a(0), 1, B1) * B1 * A2 * B2);
  EXPECT_EQ(partial_derivative(f, gen_a(0), B1), expected);
  // d/dB2 {A2}: A1^2 B1 A2 * A2
  EXPECT_EQ(partial_derivative(f, gen_b(1), A2), pow(A1, 2) * B1 * A2 * A2);
}

}  // namespace
}  // namespace pbo
