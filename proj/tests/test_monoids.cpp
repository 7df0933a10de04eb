#include <gtest/gtest.h>

#include <numeric>
#include <set>

#include "logdiff/monoids.hpp"
#include "support.hpp"

using namespace logdiff;
using testsupport::Gen;

namespace {

IntMatrix random_matrix(Gen& g, std::size_t rows, std::size_t cols) {
  IntMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = g.uniform(-9, 9);
  return m;
}

BigInt abs_det(const IntMatrix& m) {
  const BigInt d = m.determinant();
  return d < 0 ? BigInt(-d) : d;
}

// |Z^d / image| by enumerating the box [0, N)^d modulo the image lattice; N = |det|.
// Two vectors are equal mod the image iff their difference is in the image,
// tested by solving over the rationals.
std::size_t brute_coker_order(const IntMatrix& a) {
  const std::size_t d = a.rows();
  const long n = abs_det(a).get_si();
  std::vector<std::vector<long>> reps;
  auto in_image = [&](const std::vector<long>& v) {
    // Cramer: a x = v has an integer solution iff every det(a with col j -> v) is divisible by det(a).
    const BigInt det = a.determinant();
    for (std::size_t j = 0; j < d; ++j) {
      IntMatrix b = a;
      for (std::size_t i = 0; i < d; ++i) b(i, j) = v[i];
      if (b.determinant() % det != 0) return false;
    }
    return true;
  };
  std::vector<long> v(d, 0);
  for (;;) {
    bool fresh = true;
    for (const auto& r : reps) {
      std::vector<long> diff(d);
      for (std::size_t i = 0; i < d; ++i) diff[i] = v[i] - r[i];
      if (in_image(diff)) {
        fresh = false;
        break;
      }
    }
    if (fresh) reps.push_back(v);
    std::size_t j = 0;
    while (j < d && v[j] == n - 1) v[j++] = 0;
    if (j == d) break;
    ++v[j];
  }
  return reps.size();
}

}  // namespace

TEST(Snf, Examples) {
  EXPECT_EQ(smith_normal_form(LatticeMap(IntMatrix{{3}})).divisors, std::vector<BigInt>{3});
  EXPECT_EQ(smith_normal_form(LatticeMap(IntMatrix{{2, 4}, {6, 8}})).divisors, (std::vector<BigInt>{2, 4}));
  const CokerInvariants c = coker_invariants(LatticeMap(IntMatrix{{2, 4}, {6, 8}}));
  EXPECT_EQ(c.free_rank, 0u);
  EXPECT_EQ(c.torsion, (std::vector<BigInt>{2, 4}));
  EXPECT_EQ(coker_invariants(LatticeMap(IntMatrix{{5}})).torsion, std::vector<BigInt>{5});
  const CokerInvariants diag = coker_invariants(LatticeMap(IntMatrix{{1}, {1}}));
  EXPECT_EQ(diag.free_rank, 1u);
  EXPECT_TRUE(diag.torsion.empty());
}

TEST(Snf, RandomMatrices) {
  Gen g(51);
  for (int t = 0; t < 200; ++t) {
    const std::size_t rows = g.uniform(1, 4), cols = g.uniform(1, 4);
    const IntMatrix a = random_matrix(g, rows, cols);
    const SnfResult s = smith_normal_form(LatticeMap(a));
    ASSERT_EQ(s.left * a * s.right, s.diagonal);
    ASSERT_TRUE(s.diagonal.is_diagonal());
    ASSERT_EQ(abs_det(s.left), 1);
    ASSERT_EQ(abs_det(s.right), 1);
    for (std::size_t j = 0; j < s.divisors.size(); ++j) {
      ASSERT_GT(s.divisors[j], 0);
      ASSERT_EQ(s.diagonal(j, j) < 0 ? BigInt(-s.diagonal(j, j)) : s.diagonal(j, j), s.divisors[j]);
      if (j + 1 < s.divisors.size()) ASSERT_EQ(s.divisors[j + 1] % s.divisors[j], 0);
    }
  }
}

TEST(Snf, CokerOrderMatchesEnumeration) {
  Gen g(52);
  int checked = 0;
  while (checked < 40) {
    const std::size_t d = g.uniform(1, 2);
    IntMatrix a(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) a(i, j) = g.uniform(-6, 6);
    const BigInt det = abs_det(a);
    if (det == 0 || det > 60) continue;
    const CokerInvariants c = coker_invariants(LatticeMap(a));
    ASSERT_EQ(c.free_rank, 0u);
    BigInt prod = 1;
    for (const BigInt& x : c.torsion) prod *= x;
    ASSERT_EQ(prod, det);
    ASSERT_EQ(prod, BigInt(static_cast<long>(brute_coker_order(a))));
    ++checked;
  }
}

TEST(Etale, Criterion) {
  for (long n = 2; n <= 12; ++n)
    for (long p : {2, 3, 5, 7}) {
      const EtaleDecision d = is_log_etale_chart(LatticeMap(IntMatrix{{n}}), p);
      EXPECT_EQ(d.log_etale, n % p != 0) << n << " " << p;
      EXPECT_TRUE(d.kernel_trivial);
      ASSERT_TRUE(d.coker_order.has_value());
      EXPECT_EQ(*d.coker_order, n);
    }
  const EtaleDecision inf = is_log_etale_chart(LatticeMap(IntMatrix{{1}, {1}}), 3);
  EXPECT_FALSE(inf.log_etale);
  EXPECT_FALSE(inf.coker_order.has_value());
  const EtaleDecision ker = is_log_etale_chart(LatticeMap(IntMatrix{{1, 1}}), 3);
  EXPECT_FALSE(ker.log_etale);
  EXPECT_FALSE(ker.kernel_trivial);
  EXPECT_TRUE(is_log_etale_chart(LatticeMap(IntMatrix{{1, 1}, {0, 1}}), 2).log_etale);
}

TEST(Bezout, Examples) {
  const BezoutSplit s = bezout_split({BigInt(1)}, LatticeMap(IntMatrix{{3}}), 2);
  EXPECT_EQ(s.y, std::vector<BigInt>{1});
  EXPECT_EQ(s.x, std::vector<BigInt>{-1});
  const BezoutSplit z = bezout_split({BigInt(0)}, LatticeMap(IntMatrix{{3}}), 2);
  EXPECT_EQ(z.y, std::vector<BigInt>{0});
  EXPECT_EQ(z.x, std::vector<BigInt>{0});
  const BezoutSplit id = bezout_split({BigInt(4), BigInt(-7)}, LatticeMap(IntMatrix::identity(2)), 5);
  EXPECT_EQ(id.y, (std::vector<BigInt>{4, -7}));
  EXPECT_EQ(id.x, (std::vector<BigInt>{0, 0}));
  try {
    bezout_split({BigInt(1)}, LatticeMap(IntMatrix{{2}}), 2);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::CriterionViolated);
  }
}

TEST(Bezout, RandomInstances) {
  Gen g(53);
  int done = 0;
  while (done < 200) {
    const long p = std::vector<long>{2, 3, 5}[g.uniform(0, 2)];
    const std::size_t d = g.uniform(1, 3);
    const IntMatrix a = random_matrix(g, d, d);
    const LatticeMap phi(a);
    if (!is_log_etale_chart(phi, p).log_etale) continue;
    std::vector<BigInt> x0(d);
    for (auto& v : x0) v = g.uniform(-50, 50);
    const BezoutSplit s = bezout_split(x0, phi, p);
    const std::vector<BigInt> img = a.apply(s.y);
    for (std::size_t i = 0; i < d; ++i) ASSERT_EQ(img[i] + p * s.x[i], x0[i]);
    ++done;
  }
}

TEST(Monoid, SaturationAndPushout) {
  EXPECT_EQ(rank1_saturation({2, 3}), 1);
  EXPECT_EQ(rank1_saturation({4, 6}), 2);
  EXPECT_EQ(rank1_saturation({1}), 1);

  const AffineMonoid m23 = fine_pushout_rank1(2, 3);
  EXPECT_EQ(m23.generators(), (std::vector<std::vector<std::int64_t>>{{2}, {3}}));
  EXPECT_FALSE(monoid_membership(m23, {1}));
  for (long v = 2; v <= 30; ++v) EXPECT_TRUE(monoid_membership(m23, {v}));
  EXPECT_TRUE(monoid_membership(m23, {5}));
  EXPECT_FALSE(monoid_membership(fine_pushout_rank1(3, 2), {1}));
  try {
    fine_pushout_rank1(2, 2);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ArgumentsNotCoprime);
  }
  EXPECT_TRUE(monoid_membership(AffineMonoid::free(2), {0, 0}));
  EXPECT_FALSE(monoid_membership(AffineMonoid::free(2), {1, -1}));
}

TEST(Monoid, FrobeniusBound) {
  for (long p : {2, 3, 5})
    for (long n = 2; n <= 50; ++n) {
      if (std::gcd(p, n) != 1) continue;
      const AffineMonoid m = fine_pushout_rank1(p, n);
      EXPECT_EQ(rank1_saturation({p, n}), 1);
      const long conductor = (p - 1) * (n - 1);
      // Sylvester: exactly (p-1)(n-1)/2 gaps, all below the conductor.
      long gaps = 0;
      for (long v = 0; v < conductor + 10; ++v) {
        const bool in = monoid_membership(m, {v});
        if (v >= conductor) ASSERT_TRUE(in) << p << " " << n << " " << v;
        if (!in) ++gaps;
      }
      EXPECT_EQ(gaps, conductor / 2);
      if (conductor > 0) EXPECT_FALSE(monoid_membership(m, {conductor - 1}));
    }
}

TEST(Monoid, MembershipBound) {
  const AffineMonoid m(1, {{7}, {11}}, 3);
  try {
    monoid_membership(m, {1000});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::BoundExceeded);
  }
}

TEST(Monoid, JsonRoundTrip) {
  const AffineMonoid m(2, {{1, 0}, {1, 2}, {0, 1}});
  EXPECT_EQ(monoid_from_json(to_json(m)), m);
  const LatticeMap phi(IntMatrix{{1, 2}, {3, 4}});
  EXPECT_EQ(map_from_json(to_json(phi)), phi);
  EXPECT_EQ(parse_matrix("[[1, 2], [3, 4]]"), phi.matrix());
  EXPECT_THROW(parse_matrix("[[1, 2], [3]"), Error);
  nlohmann::json j = to_json(m);
  j["generators"][1][1] = "12345678901234567890123";
  EXPECT_THROW(monoid_from_json(j), Error);
}
