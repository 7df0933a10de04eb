#include <gtest/gtest.h>

#include "logdiff/chart.hpp"
#include "support.hpp"

using namespace logdiff;
using testsupport::Gen;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::InvalidParams;
}

PRat q(long num, long den, long p) {
  BigRat r(num, den);
  r.canonicalize();
  return PRat(r, p);
}

}  // namespace

TEST(Chart, AlgebraExamples) {
  const ChartPtr c = Chart::identity(RingParams(2, 3, 0), 1);
  EXPECT_EQ(alg_mul(c->monomial({2}), c->monomial({3})), c->monomial({5}));
  EXPECT_TRUE(alg_mul(c->monomial({2}, 5), c->zero()).is_zero());
  const AlgElem x = c->monomial({1});
  const AlgElem prod = alg_mul(c->one() + x, c->one() - x);
  EXPECT_EQ(prod, c->one() + c->monomial({2}, 7));
  EXPECT_EQ(prod.str(), "7*x[2] + 1*x[0]");
  EXPECT_EQ(alg_add(x, x.scaled(7)), c->zero());
}

TEST(Chart, ProductOutsideMonoid) {
  // The non-saturated monoid <2,3> in Z.
  const ChartPtr c = Chart::make(RingParams(5, 1, 0), fine_pushout_rank1(2, 3), LatticeMap(IntMatrix{{1}}), false);
  EXPECT_FALSE(c->contains({1}));
  EXPECT_TRUE(c->contains({5}));
  EXPECT_EQ(code_of([&] { c->validate(AlgElem::monomial({1}, c->modulus())); }), Errc::ExponentNotInMonoid);
}

TEST(Chart, RingLaws) {
  Gen g(61);
  for (bool group : {false, true}) {
    const ChartPtr c = Chart::identity(RingParams(3, 2, 0), 2, group);
    for (int t = 0; t < 300; ++t) {
      const AlgElem f = g.element(*c, 3), h = g.element(*c, 3), k = g.element(*c, 2);
      ASSERT_EQ(alg_mul(alg_mul(f, h), k), alg_mul(f, alg_mul(h, k)));
      ASSERT_EQ(alg_mul(f, h), alg_mul(h, f));
      ASSERT_EQ(alg_mul(f, alg_add(h, k)), alg_add(alg_mul(f, h), alg_mul(f, k)));
    }
  }
}

TEST(Chart, ExponentAlphaExamples) {
  const ChartPtr id = Chart::identity(RingParams(3, 1, 0), 2);
  const ExponentVector a = exponent_alpha(*id, {4, 7});
  EXPECT_EQ(a.alphas, (std::vector<PRat>{PRat(4, 3), PRat(7, 3)}));

  const ChartPtr c3 = Chart::free_with_map(RingParams(2, 3, 0), IntMatrix{{3}});
  EXPECT_EQ(exponent_alpha(*c3, {1}).alphas, std::vector<PRat>{q(1, 3, 2)});

  const ChartPtr u = Chart::free_with_map(RingParams(2, 1, 0), IntMatrix{{1, 1}, {0, 1}});
  EXPECT_EQ(exponent_alpha(*u, {2, 1}).alphas, (std::vector<PRat>{PRat(1, 2), PRat(1, 2)}));

  EXPECT_EQ(code_of([&] { Chart::free_with_map(RingParams(3, 1, 0), IntMatrix{{3}}); }), Errc::CriterionViolated);
}

TEST(Chart, ExponentAlphaRoundTrip) {
  Gen g(62);
  const ChartPtr c = Chart::free_with_map(RingParams(3, 2, 0), IntMatrix{{2, 1}, {1, 3}}, true);
  const IntMatrix& phi = c->basis_map().matrix();
  for (int t = 0; t < 200; ++t) {
    const std::vector<BigInt> w = {BigInt(g.uniform(-20, 20)), BigInt(g.uniform(-20, 20))};
    const std::vector<BigInt> v = phi.apply(w);
    const ExponentVector a = exponent_alpha(*c, {v[0].get_si(), v[1].get_si()});
    ASSERT_EQ(a.alphas, (std::vector<PRat>{PRat(w[0], 3), PRat(w[1], 3)}));
  }
  // Off-lattice exponents get genuine p-integral fractions: phi alpha = v.
  for (int t = 0; t < 50; ++t) {
    const Exponent v = {g.uniform(-9, 9), g.uniform(-9, 9)};
    const ExponentVector a = exponent_alpha(*c, v);
    for (std::size_t i = 0; i < 2; ++i) {
      BigRat s = 0;
      for (std::size_t j = 0; j < 2; ++j) s += BigRat(phi(i, j)) * a.alphas[j].value();
      ASSERT_EQ(s, BigRat(v[i]));
    }
  }
}

TEST(Chart, UnitInverseExamples) {
  const ChartPtr c = Chart::identity(RingParams(2, 3, 0), 1);
  EXPECT_EQ(unit_inverse(*c, c->constant(3)), c->constant(3));
  const AlgElem x = c->monomial({1});
  const AlgElem inv = unit_inverse(*c, c->one() + x.scaled(2));
  EXPECT_EQ(inv, c->one() + x.scaled(-2) + c->monomial({2}, 4));
  EXPECT_EQ(code_of([&] { unit_inverse(*c, x); }), Errc::NotAUnit);
  EXPECT_EQ(code_of([&] { unit_inverse(*c, c->constant(2)); }), Errc::NotAUnit);
  EXPECT_FALSE(is_unit(*c, c->one() + x));

  const ChartPtr gc = Chart::identity(RingParams(2, 3, 0), 1, true);
  const AlgElem gx = gc->monomial({1});
  EXPECT_EQ(unit_inverse(*gc, gx.scaled(3)), gc->monomial({-1}, 3));
}

TEST(Chart, UnitInverseRandom) {
  Gen g(63);
  for (bool group : {false, true}) {
    const ChartPtr c = Chart::identity(RingParams(3, 3, 0), 2, group);
    for (int t = 0; t < 200; ++t) {
      const AlgElem u = g.unit(*c);
      ASSERT_EQ(alg_mul(u, unit_inverse(*c, u)), c->one()) << u.str();
    }
  }
}

TEST(Chart, LogEigenOracle) {
  // d^<k> x^v = q_k! C(alpha, k) x^v.
  const ChartPtr c = Chart::free_with_map(RingParams(2, 3, 1), IntMatrix{{3}});
  const BigRat third(1, 3);
  BigRat falling = 1;
  for (int k = 0; k <= 6; ++k) {
    if (k > 0) falling *= (third - (k - 1)) / k;
    const BigRat expect = falling * BigRat(qfact(k, c->params()));
    EXPECT_EQ(c->log_eigen({1}, {k}), reduce_residue(expect, c->modulus())) << k;
  }
  EXPECT_EQ(c->log_eigen({0}, {2}), 0);
  EXPECT_EQ(c->log_eigen({5}, {0}), 1);
}

TEST(Chart, RankZero) {
  const ChartPtr c = Chart::identity(RingParams(5, 1, 0), 0);
  EXPECT_EQ(c->rank(), 0u);
  EXPECT_EQ(c->one().str(), "1*x[]");
  EXPECT_EQ(alg_mul(c->constant(2), c->constant(3)), c->one());
}
