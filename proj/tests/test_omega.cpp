#include <gtest/gtest.h>

#include "logdiff/omega.hpp"
#include "support.hpp"

using namespace logdiff;
using testsupport::Gen;

namespace {

BasisPtr line(std::int64_t p, int nil, int level, bool group = false) {
  return LogBasis::canonical(Chart::identity(RingParams(p, nil, level), 1, group));
}

OmegaElement form(const BasisPtr& b, const AlgElem& a) { return {b, a}; }

}  // namespace

TEST(OmegaAct, Examples) {
  const BasisPtr b = line(3, 2, 0);
  const Chart& c = *b->chart();
  const DiffOp d1 = DiffOp::partial(b, {1});
  EXPECT_TRUE(omega_act(form(b, c.one()), d1).coefficient.is_zero());
  EXPECT_EQ(omega_act(form(b, c.monomial({1})), d1).coefficient, c.monomial({1}, -1 + 9));
  const AlgElem a = c.monomial({2}, 5);
  EXPECT_EQ(omega_act(form(b, a), DiffOp::scalar(b, c.one())), form(b, a));
  const BasisPtr other = line(3, 2, 1);
  EXPECT_THROW(omega_act(form(b, a), DiffOp::partial(other, {1})), Error);
}

TEST(OmegaAct, RightModuleLaw) {
  Gen g(21);
  for (std::int64_t p : {2, 3}) {
    const BasisPtr b = LogBasis::canonical(Chart::identity(RingParams(p, 2, 1), 2));
    for (int t = 0; t < 10; ++t) {
      const OmegaElement w = form(b, g.element(*b->chart(), 2));
      const DiffOp x = g.op(b, 3), y = g.op(b, 2);
      EXPECT_EQ(omega_act(omega_act(w, x), y), omega_act(w, mul(x, y)));
    }
  }
}

TEST(OmegaRebase, Examples) {
  const BasisPtr b = LogBasis::canonical(Chart::identity(RingParams(2, 3, 0), 2));
  const Chart& c = *b->chart();
  const std::vector<AlgElem> ones(2, c.one());
  const AlgElem a = c.monomial({1, 2}, 5);
  EXPECT_EQ(omega_rebase(form(b, a), IntMatrix{{1, 1}, {0, 1}}, ones).coefficient, a);

  const BasisPtr l = line(2, 3, 0);
  const AlgElem x = l->chart()->monomial({1});
  EXPECT_EQ(omega_rebase(form(l, x), IntMatrix{{3}}, {l->chart()->one()}).coefficient, x.scaled(3));

  // dlog(u b) = (1 + u^{-1} d(u)) dlog b with u = 1 + 2x.
  const AlgElem u = l->chart()->one() + x.scaled(2);
  const OmegaElement w = omega_rebase(form(l, l->chart()->one()), IntMatrix{{1}}, {u});
  const AlgElem j = l->chart()->one() + unit_inverse(*l->chart(), u) * x.scaled(2);
  EXPECT_EQ(w.coefficient * j, l->chart()->one());
  EXPECT_FALSE(w.coefficient == l->chart()->one());
}

TEST(OmegaRebase, BasisChangeIndependence) {
  Gen g(22);
  for (bool group : {false, true}) {
    const BasisPtr b = LogBasis::canonical(Chart::identity(RingParams(2, 3, 1), 2, group));
    for (int t = 0; t < 8; ++t) {
      const auto [m, units] = g.rebasing(*b);
      const BasisPtr nb = b->rebased(m, units);
      const OmegaElement w = form(b, g.element(*b->chart(), 2));
      const DiffOp x = g.op(b, 3);
      const OmegaElement lhs = omega_act(omega_change_basis(w, nb), change_basis(x, nb));
      EXPECT_EQ(lhs, omega_change_basis(omega_act(w, x), nb));
    }
  }
}

TEST(Taylor, Examples) {
  const ChartPtr c = Chart::identity(RingParams(3, 2, 0), 1);
  EXPECT_EQ(taylor(c, c->one(), 3), PPartsElem::one_like(PPartsElem(*c, 3)));
  const AlgElem b = c->monomial({1});
  PPartsElem expect(*c, 1);
  expect.add_term({0}, b);
  expect.add_term({1}, b);
  EXPECT_EQ(taylor(c, b, 1), expect);
  const AlgElem b2 = c->monomial({2});
  PPartsElem e2(*c, 2);
  e2.add_term({0}, b2);
  e2.add_term({1}, b2.scaled(2));
  e2.add_term({2}, b2.scaled(2));
  EXPECT_EQ(taylor(c, b2, 2), e2);
}

TEST(Taylor, MultiplicativeAndMonomial) {
  Gen g(23);
  const ChartPtr c = Chart::identity(RingParams(2, 3, 1), 2);
  for (int t = 0; t < 20; ++t) {
    const AlgElem f = g.element(*c, 2), h = g.element(*c, 2);
    EXPECT_EQ(taylor(c, f * h, 4), taylor(c, f, 4) * taylor(c, h, 4));
    const Exponent v = g.exponent(*c, 4);
    EXPECT_EQ(taylor(c, c->monomial(v), 4), mu_of_monomial(*c, v, 4).scaled(c->monomial(v)));
    EXPECT_EQ(taylor(c, f, 3), theta(*c, f, 3));
  }
}

TEST(Cocycle, CanonicalTables) {
  Gen g(24);
  for (std::int64_t p : {2, 3}) {
    for (int m : {0, 1}) {
      const ChartPtr c = Chart::identity(RingParams(p, 2, m), 2);
      const Exponent v = g.exponent(*c, 4);
      const StratTable t = monomial_table(c, v, 4);
      for (int n = 0; n <= 4; ++n)
        for (int n2 = 0; n + n2 <= 4; ++n2) EXPECT_TRUE(check_cocycle(t, n, n2).ok) << n << " " << n2;
      const StratTable w = omega_twist_table(c, v, 4);
      EXPECT_TRUE(check_cocycle(w, 2, 2).ok);
      EXPECT_TRUE(check_cocycle(w, 1, 3).ok);
      EXPECT_EQ(w.at({1, 0})[0][0], c->constant(c->log_eigen_negated(v, {1, 0})));
    }
  }
}

TEST(Cocycle, UnitAndGaugeTables) {
  Gen g(25);
  const ChartPtr c = Chart::identity(RingParams(3, 2, 1), 1);
  EXPECT_TRUE(check_cocycle(unit_table(c, g.unit(*c), 4), 2, 2).ok);
  AlgMatrix gm = identity_matrix(*c, 2);
  gm[0][1] = g.element(*c, 2);
  gm[1][0] = g.element(*c, 1).scaled(3);
  const StratTable t = gauge_table(c, gm, 4);
  EXPECT_TRUE(check_cocycle(t, 1, 3).ok);
  EXPECT_TRUE(check_cocycle(t, 2, 2).ok);
}

TEST(Cocycle, CorruptedTableIsLocalized) {
  const ChartPtr c = Chart::identity(RingParams(2, 2, 0), 1);
  StratTable t = monomial_table(c, {3}, 4);
  t.entry({2}, 0, 0) += c->one();
  const CocycleReport r = check_cocycle(t, 1, 1);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.basis_vector, 0u);
  EXPECT_EQ(r.left.total() + r.right.total(), 2);
  EXPECT_FALSE(r.message.empty());
}

TEST(Cocycle, ZeroRankModule) {
  const ChartPtr c = Chart::identity(RingParams(2, 2, 0), 1);
  EXPECT_TRUE(check_cocycle(StratTable(c, 0, 4), 2, 2).ok);
  EXPECT_THROW(check_cocycle(StratTable(c, 1, 2), 2, 2), Error);
}

TEST(Epsilon, Examples) {
  const ChartPtr c = Chart::identity(RingParams(2, 3, 0), 1);
  const StratTable t = monomial_table(c, {2}, 3);
  const EpsilonResult e = epsilon_from_theta(t, 3);
  ASSERT_TRUE(e.invertible);
  EXPECT_EQ(e.matrix[0][0] * (*e.inverse)[0][0], PPartsElem::one_like(PPartsElem(*c, 3)));

  const EpsilonResult e0 = epsilon_from_theta(t, 0);
  EXPECT_EQ(e0.matrix[0][0], PPartsElem::one_like(PPartsElem(*c, 0)));

  StratTable n(c, 1, 3);
  n.entry({1}, 0, 0) = c->monomial({1}, 3);
  n.entry({3}, 0, 0) = c->constant(5);
  const EpsilonResult en = epsilon_from_theta(n, 3);
  ASSERT_TRUE(en.invertible);
  EXPECT_EQ(en.matrix[0][0] * (*en.inverse)[0][0], PPartsElem::one_like(PPartsElem(*c, 3)));

  StratTable bad(c, 1, 1);
  bad.entry({0}, 0, 0) = c->constant(2);
  EXPECT_FALSE(epsilon_from_theta(bad, 1).invertible);
}

TEST(Epsilon, MatrixInverse) {
  Gen g(26);
  const ChartPtr c = Chart::identity(RingParams(3, 2, 0), 1);
  AlgMatrix gm = identity_matrix(*c, 2);
  gm[0][1] = g.element(*c, 2);
  const StratTable t = gauge_table(c, gm, 3);
  const EpsilonResult e = epsilon_from_theta(t, 3);
  ASSERT_TRUE(e.invertible);
  const PPartsElem one = PPartsElem::one_like(PPartsElem(*c, 3));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      PPartsElem s(*c, 3);
      for (std::size_t k = 0; k < 2; ++k) s += e.matrix[i][k] * (*e.inverse)[k][j];
      EXPECT_EQ(s, i == j ? one : PPartsElem(*c, 3));
    }
}
