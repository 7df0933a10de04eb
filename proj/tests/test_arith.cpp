#include <gtest/gtest.h>

#include "logdiff/arith.hpp"
#include "support.hpp"

using namespace logdiff;
using testsupport::Gen;

namespace {

// q_k! by repeated multiplication, independent of the library.
BigInt oracle_qfact(long k, long p, int m) {
  long step = 1;
  for (int j = 0; j < m; ++j) step *= p;
  BigInt r = 1;
  for (long j = 2; j <= k / step; ++j) r *= j;
  return r;
}

BigInt oracle_binom(long n, long k) {
  BigInt r = 1;
  for (long j = 0; j < k; ++j) r = r * (n - j) / (j + 1);
  return r;
}

}  // namespace

TEST(Arith, QfactExamples) {
  EXPECT_EQ(qfact(0, RingParams(3, 1, 2)), 1);
  EXPECT_EQ(qfact(7, RingParams(2, 1, 1)), 6);
  EXPECT_EQ(qfact(5, RingParams(5, 1, 1)), 1);
  EXPECT_EQ(qfact(MultiIndex{7, 5}, RingParams(2, 1, 1)), 12);
  for (long p : {2, 3, 5})
    for (int m = 0; m <= 3; ++m)
      for (long k = 0; k <= 60; ++k) ASSERT_EQ(qfact(k, RingParams(p, 1, m)), oracle_qfact(k, p, m));
}

TEST(Arith, BraceAngleExamples) {
  const RingParams p2m1(2, 1, 1), p2m0(2, 1, 0);
  EXPECT_EQ(brace_binom({4}, {2}, p2m1), 2);
  EXPECT_EQ(brace_binom({4}, {2}, p2m0), 6);
  EXPECT_EQ(brace_binom({9}, {0}, p2m1), 1);
  EXPECT_EQ(angle_binom({4}, {2}, p2m1), 3);
  EXPECT_EQ(angle_binom({11}, {0}, p2m1), 1);
  for (int k = 0; k <= 12; ++k)
    for (int i = 0; i <= k; ++i) EXPECT_EQ(angle_binom({k}, {i}, p2m0), 1);
  EXPECT_EQ(brace_binom({4, 2}, {2, 1}, p2m0), 12);
  try {
    brace_binom({2, 1}, {1, 2}, p2m0);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ComponentwiseOrderViolation);
  }
}

TEST(Arith, AngleIsPIntegralNotIntegral) {
  const RingParams params(2, 1, 1);
  EXPECT_EQ(angle_binom_exact({6}, {3}, params), BigRat(10, 3));
  try {
    angle_binom({6}, {3}, params);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::IntegralityFailure);
  }
}

TEST(Arith, BraceTimesAngleIsBinomial) {
  for (long p : {2, 3, 5})
    for (int m = 0; m <= 3; ++m) {
      const RingParams params(p, 1, m);
      for (int k = 0; k <= 80; ++k)
        for (int i = 0; i <= k; ++i) {
          const BigInt b = brace_binom({k}, {i}, params);
          ASSERT_EQ(b, oracle_qfact(k, p, m) / (oracle_qfact(i, p, m) * oracle_qfact(k - i, p, m)));
          ASSERT_EQ(BigRat(b) * angle_binom_exact({k}, {i}, params), BigRat(oracle_binom(k, i)));
        }
    }
  const RingParams params(3, 1, 1);
  Gen g(41);
  for (int t = 0; t < 100; ++t) {
    const MultiIndex k{static_cast<int>(g.uniform(0, 30)), static_cast<int>(g.uniform(0, 30)),
                       static_cast<int>(g.uniform(0, 30))};
    const MultiIndex i{static_cast<int>(g.uniform(0, k[0])), static_cast<int>(g.uniform(0, k[1])),
                       static_cast<int>(g.uniform(0, k[2]))};
    EXPECT_EQ(BigRat(brace_binom(k, i, params)) * angle_binom_exact(k, i, params), BigRat(binomial(k, i)));
  }
}

TEST(Arith, PadicBinom) {
  EXPECT_EQ(padic_binom(PRat(5, 2), 2), PRat(10, 2));
  EXPECT_EQ(padic_binom(PRat(BigRat(1, 3), 2), 2), PRat(BigRat(-1, 9), 2));
  EXPECT_EQ(reduce(padic_binom(PRat(BigRat(1, 3), 2), 2), RingParams(2, 3, 0)).residue(), 7);
  EXPECT_EQ(padic_binom(PRat(BigRat(7, 5), 3), 0), PRat(1, 3));
  EXPECT_THROW(PRat(BigRat(1, 2), 2), Error);

  Gen g(42);
  for (int t = 0; t < 500; ++t) {
    const long p = std::vector<long>{2, 3, 5}[g.uniform(0, 2)];
    long den = g.uniform(1, 30);
    while (den % p == 0) den = g.uniform(1, 30);
    BigRat alpha(g.uniform(-40, 40), den);
    alpha.canonicalize();
    const long k = g.uniform(0, 12);
    BigRat falling = 1;
    for (long j = 0; j < k; ++j) falling *= alpha - j;
    BigRat lhs = padic_binom(PRat(alpha, p), k).value() * BigRat(oracle_qfact(k, 2, 0));
    ASSERT_EQ(lhs, falling);
  }
}

TEST(Arith, Reduce) {
  const RingParams params(2, 3, 0);
  EXPECT_EQ(reduce(BigInt(6), params).residue(), 6);
  EXPECT_EQ(reduce(PRat(BigRat(1, 3), 2), params).residue(), 3);
  EXPECT_EQ(reduce(BigInt(0), params).residue(), 0);
  EXPECT_EQ(reduce(BigInt(-1), params).residue(), 7);
  EXPECT_EQ(mod_inverse(3, 8), 3);
  EXPECT_EQ(p_valuation(BigInt(48), 2), 4);

  Gen g(43);
  for (int t = 0; t < 500; ++t) {
    const RingParams rp(std::vector<long>{2, 3, 5}[g.uniform(0, 2)], static_cast<int>(g.uniform(1, 4)), 0);
    auto random_prat = [&] {
      long den = g.uniform(1, 50);
      while (den % rp.p() == 0) den = g.uniform(1, 50);
      BigRat v(g.uniform(-1000, 1000), den);
      v.canonicalize();
      return PRat(v, rp.p());
    };
    const PRat x = random_prat(), y = random_prat();
    ASSERT_EQ(reduce(x + y, rp), reduce(x, rp) + reduce(y, rp));
    ASSERT_EQ(reduce(x * y, rp), reduce(x, rp) * reduce(y, rp));
  }
}

TEST(Arith, ParamsValidation) {
  EXPECT_THROW(RingParams(4, 1, 0), Error);
  EXPECT_THROW(RingParams(2, 0, 0), Error);
  EXPECT_THROW(RingParams(2, 1, -1), Error);
  EXPECT_THROW(RingParams(2, 31, 0), Error);
  EXPECT_EQ(RingParams(5, 3, 2).modulus(), 125);
}

TEST(Arith, TablesMatchExactValues) {
  for (long p : {2, 3, 5})
    for (int m = 0; m <= 2; ++m) {
      const RingParams params(p, 3, m);
      const CombTables& t = CombTables::get(params);
      for (int k = 0; k <= 12; ++k)
        for (int i = 0; i <= k; ++i) {
          ASSERT_EQ(t.brace(k, i), reduce_residue(brace_binom({k}, {i}, params), params.modulus()));
          ASSERT_EQ(t.transpose(k, i), reduce_residue(transpose_coefficient(k, i, params), params.modulus()));
        }
      for (int a = 0; a <= 6; ++a)
        for (int b = 0; b <= 6; ++b)
          for (int k = std::max(a, b); k <= a + b; ++k)
            ASSERT_EQ(t.compose(a, b, k), reduce_residue(compose_coefficient(a, b, k, params), params.modulus()));
    }
  // Composition coefficients are p-integral, not always integers.
  EXPECT_EQ(compose_coefficient(3, 3, 6, RingParams(2, 1, 1)), BigRat(10, 3));
}

TEST(Arith, MultiIndices) {
  const auto ks = multi_indices_up_to(2, 2);
  ASSERT_EQ(ks.size(), 6u);
  EXPECT_EQ(ks.front(), MultiIndex({0, 0}));
  EXPECT_EQ(ks.back(), MultiIndex({2, 0}));
  EXPECT_EQ(box({0, 1}, {1, 2}).size(), 4u);
  EXPECT_EQ(MultiIndex({3, 1}).str(), "[3,1]");
  EXPECT_TRUE(MultiIndex({1, 1}).leq({2, 1}));
  EXPECT_FALSE(MultiIndex({1, 2}).leq({2, 1}));
}
