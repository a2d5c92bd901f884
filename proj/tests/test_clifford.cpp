#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "systems.hpp"

using namespace hifs;
using namespace hifs::testing;

namespace {

// Independent sign oracle: write e_A e_B as a word of generator indices and
// rewrite it with adjacent swaps (e_i e_j = -e_j e_i) and contractions
// (e_i e_i = -1) until it is strictly increasing.
SignedBlade word_oracle(Blade a, Blade b) {
  std::vector<unsigned> word;
  for (unsigned g = 1; g <= 32; ++g)
    if (a.mask >> (g - 1) & 1) word.push_back(g);
  for (unsigned g = 1; g <= 32; ++g)
    if (b.mask >> (g - 1) & 1) word.push_back(g);
  int sign = 1;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < word.size(); ++i) {
      if (word[i] == word[i + 1]) {
        word.erase(word.begin() + static_cast<long>(i), word.begin() + static_cast<long>(i) + 2);
        sign = -sign;
        changed = true;
        break;
      }
      if (word[i] > word[i + 1]) {
        std::swap(word[i], word[i + 1]);
        sign = -sign;
        changed = true;
      }
    }
  }
  Blade out;
  for (unsigned g : word) out.mask |= 1u << (g - 1);
  return {sign, out};
}

// Naive product: expand every blade pair through the word oracle.
CliffordNumber naive_product(const CliffordNumber& x, const CliffordNumber& y) {
  CliffordNumber out(x.algebra());
  const std::size_t dim = x.algebra().element_dim();
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = 0; b < dim; ++b) {
      const auto sb = word_oracle(Blade{static_cast<std::uint32_t>(a)}, Blade{static_cast<std::uint32_t>(b)});
      out[sb.blade.mask] += sb.sign * x[a] * y[b];
    }
  return out;
}

void expect_near(const CliffordNumber& a, const CliffordNumber& b, double tol = 1e-12) {
  ASSERT_EQ(a.algebra(), b.algebra());
  EXPECT_LE(max_abs_diff(a.coeffs(), b.coeffs()), tol);
}

}  // namespace

TEST(BladeProduct, GeneratorSquaresToMinusOne) {
  EXPECT_EQ(blade_product(Blade::of({1}), Blade::of({1})), (SignedBlade{-1, Blade{}}));
}

TEST(BladeProduct, UnitIsIdentity) {
  EXPECT_EQ(blade_product(Blade{}, Blade::of({1, 2})), (SignedBlade{1, Blade::of({1, 2})}));
}

TEST(BladeProduct, ReversedPairPicksUpSign) {
  EXPECT_EQ(blade_product(Blade::of({2}), Blade::of({1})), (SignedBlade{-1, Blade::of({1, 2})}));
  EXPECT_EQ(word_oracle(Blade::of({2}), Blade::of({1})), (SignedBlade{-1, Blade::of({1, 2})}));
}

TEST(BladeProduct, MatchesWordOracleForAllBladesUpToFiveGenerators) {
  for (std::uint32_t a = 0; a < 32; ++a)
    for (std::uint32_t b = 0; b < 32; ++b)
      ASSERT_EQ(blade_product(Blade{a}, Blade{b}), word_oracle(Blade{a}, Blade{b})) << a << " * " << b;
}

TEST(Multiply, QuaternionUnitsFollowLeviCivita) {
  auto e = [](unsigned i) { return CliffordNumber::generator(H, i); };
  expect_near(mul(e(1), e(2)), e(3));
  expect_near(mul(e(2), e(3)), e(1));
  expect_near(mul(e(3), e(1)), e(2));
  expect_near(mul(e(2), e(1)), -1.0 * e(3));
}

TEST(Multiply, OneIsIdentity) {
  std::mt19937_64 rng(1);
  for (AlgebraKind alg : {H, AlgebraKind::clifford(4), R}) {
    const auto x = random_element(rng, alg);
    const auto one = CliffordNumber::scalar(alg, 1.0);
    EXPECT_EQ(mul(one, x), x);
    EXPECT_EQ(mul(x, one), x);
  }
}

TEST(Multiply, CliffordAgreesWithNaiveBladeExpansion) {
  const auto alg = AlgebraKind::clifford(3);
  // (e1 + e2)(e1 - e2) = -1 + 1 - e1e2 - e2e1... = -2 e1e2
  const auto e1 = CliffordNumber::generator(alg, 1), e2 = CliffordNumber::generator(alg, 2);
  expect_near(mul(e1 + e2, e1 - e2), CliffordNumber::blade(alg, Blade::of({1, 2}), -2.0));

  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = random_element(rng, alg), y = random_element(rng, alg);
    expect_near(mul(x, y), naive_product(x, y));
  }
}

TEST(Multiply, AlgebraMismatchThrows) {
  EXPECT_THROW(mul(CliffordNumber(H), CliffordNumber(AlgebraKind::clifford(2))), algebra_mismatch);
}

TEST(Multiply, QuaternionDiffersFromProjectedCliffordProduct) {
  // in Cl(3), e1 e2 is a bivector and pi() drops it; in H it is e3
  const auto c3 = AlgebraKind::clifford(3);
  EXPECT_EQ(cnorm(embed(pi_project(mul(Paravector::basis(c3, 1), Paravector::basis(c3, 2))))), 0.0);
  EXPECT_EQ(pi_project(mul(Paravector::basis(H, 1), Paravector::basis(H, 2))), Paravector::basis(H, 3));
}

TEST(Conjugation, Examples) {
  const auto c3 = AlgebraKind::clifford(3);
  EXPECT_EQ(conj(CliffordNumber::generator(c3, 1)), CliffordNumber::generator(c3, 1, -1.0));
  EXPECT_EQ(conj(CliffordNumber::scalar(c3, 1.0)), CliffordNumber::scalar(c3, 1.0));
  // conj(e1e2) = conj(e2) conj(e1) = e2 e1 = -e1e2
  const auto e12 = CliffordNumber::blade(c3, Blade::of({1, 2}));
  const auto oracle = mul(conj(CliffordNumber::generator(c3, 2)), conj(CliffordNumber::generator(c3, 1)));
  EXPECT_EQ(conj(e12), oracle);
  EXPECT_EQ(conj(e12), CliffordNumber::blade(c3, Blade::of({1, 2}), -1.0));
  EXPECT_EQ(conj(Paravector(H, {1, 2, 3, 4})), Paravector(H, {1, -2, -3, -4}));
}

TEST(Projection, KeepsScalarAndVectorParts) {
  const auto c3 = AlgebraKind::clifford(3);
  const auto x = CliffordNumber::scalar(c3, 3) + CliffordNumber::generator(c3, 1, 2) +
                 CliffordNumber::blade(c3, Blade::of({1, 2}), 5);
  EXPECT_EQ(pi_project(x), Paravector(c3, {3, 2, 0, 0}));

  std::mt19937_64 rng(3);
  const auto p = random_paravector(rng, c3);
  EXPECT_EQ(pi_project(embed(p)), p);
  const auto y = random_element(rng, AlgebraKind::clifford(5));
  EXPECT_EQ(pi_project(embed(pi_project(y))), pi_project(y));
  const auto h = random_element(rng, H);
  EXPECT_EQ(embed(pi_project(h)), h);
}

TEST(Norm, Examples) {
  EXPECT_NEAR(cnorm(example_q()), std::sqrt(0.3), 1e-12);
  EXPECT_EQ(cnorm(CliffordNumber::generator(AlgebraKind::clifford(2), 1)), 1.0);
  EXPECT_NEAR(cnorm(example_q_hat()), 1.0, 1e-12);
  const Paravector p(H, {1.5, -2, 0, 0.25});
  EXPECT_EQ(p.scalar_part(), 1.5);
  EXPECT_EQ(p.vector_part().size(), 3u);
  EXPECT_DOUBLE_EQ(p.norm_sq(), 1.5 * 1.5 + 4 + 0.0625);
}

TEST(Properties, AntiCommutationExhaustive) {
  for (unsigned n = 1; n <= 5; ++n) {
    const auto alg = AlgebraKind::clifford(n);
    for (unsigned i = 1; i <= n; ++i)
      for (unsigned j = 1; j <= n; ++j) {
        const auto ei = CliffordNumber::generator(alg, i), ej = CliffordNumber::generator(alg, j);
        const auto sum = mul(ei, ej) + mul(ej, ei);
        const auto expected = CliffordNumber::scalar(alg, i == j ? -2.0 : 0.0);
        EXPECT_EQ(sum, expected) << "n=" << n << " i=" << i << " j=" << j;
      }
  }
}

TEST(Properties, ConjugationIsAnAntiAutomorphismAndInvolution) {
  std::mt19937_64 rng(4);
  for (AlgebraKind alg : {H, AlgebraKind::clifford(3), AlgebraKind::clifford(5)}) {
    for (int trial = 0; trial < 100; ++trial) {
      const auto x = random_element(rng, alg), y = random_element(rng, alg);
      expect_near(conj(mul(x, y)), mul(conj(y), conj(x)));
      EXPECT_EQ(conj(conj(x)), x);
    }
  }
}

TEST(Properties, ParavectorTimesConjugateIsSquaredNorm) {
  std::mt19937_64 rng(5);
  for (AlgebraKind alg : {H, AlgebraKind::clifford(3), AlgebraKind::clifford(6), R}) {
    for (int trial = 0; trial < 100; ++trial) {
      const auto p = random_paravector(rng, alg);
      expect_near(mul(p, conj(p)), CliffordNumber::scalar(alg, p.norm_sq()));
    }
  }
}

TEST(Properties, QuaternionNormIsMultiplicative) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = random_element(rng, H), y = random_element(rng, H);
    EXPECT_NEAR(cnorm(mul(x, y)), cnorm(x) * cnorm(y), 1e-12);
  }
}

TEST(Properties, Associativity) {
  std::mt19937_64 rng(7);
  for (AlgebraKind alg : {H, AlgebraKind::clifford(3), AlgebraKind::clifford(4)}) {
    for (int trial = 0; trial < 100; ++trial) {
      const auto x = random_element(rng, alg), y = random_element(rng, alg), z = random_element(rng, alg);
      expect_near(mul(mul(x, y), z), mul(x, mul(y, z)));
    }
  }
}

TEST(AlgebraKind, Limits) {
  EXPECT_THROW(AlgebraKind::clifford(9), precondition_violation);
  EXPECT_EQ(AlgebraKind::clifford(8).element_dim(), 256u);
  EXPECT_EQ(H.element_dim(), 4u);
  EXPECT_EQ(R.paravector_dim(), 1u);
  EXPECT_THROW(Paravector(H, {1, 2}), shape_mismatch);
}
