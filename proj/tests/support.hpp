#pragma once

// Random generators and small oracles shared by the unit and acceptance tests.

#include <cstdint>
#include <random>
#include <vector>

#include "logdiff/chart.hpp"
#include "logdiff/dmod.hpp"
#include "logdiff/monoids.hpp"

namespace testsupport {

using namespace logdiff;

inline std::uint64_t seed_from_env(std::uint64_t fallback = 20261016) {
  if (const char* s = std::getenv("LOGDIFF_SEED")) return std::strtoull(s, nullptr, 10);
  return fallback;
}

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
  }
  bool coin() { return uniform(0, 1) == 1; }

  Exponent exponent(const Chart& chart, int max_entry) {
    Exponent v(chart.ambient_rank());
    const bool signed_ok = chart.group_mode();
    for (auto& e : v) e = uniform(signed_ok ? -max_entry : 0, max_entry);
    return v;
  }

  // Sum of `terms` random monomials with random coefficients.
  AlgElem element(const Chart& chart, int terms, int max_entry = 3) {
    AlgElem f = chart.zero();
    for (int t = 0; t < terms; ++t) {
      Exponent v = exponent(chart, max_entry);
      if (!chart.contains(v)) continue;
      f.add_term(v, uniform(1, chart.modulus() - 1 + (chart.modulus() == 1)));
    }
    return f;
  }

  MultiIndex index(std::size_t rank, int max_total) {
    MultiIndex k(rank);
    int budget = static_cast<int>(uniform(0, max_total));
    for (std::size_t l = 0; l < rank; ++l) {
      const int e = l + 1 == rank ? budget : static_cast<int>(uniform(0, budget));
      k[l] = e;
      budget -= e;
    }
    return k;
  }

  DiffOp op(const BasisPtr& basis, int max_order, int max_terms = 3, int coeff_terms = 2) {
    DiffOp p(basis);
    const int n = static_cast<int>(uniform(1, max_terms));
    for (int t = 0; t < n; ++t)
      p.add_term(index(basis->rank(), max_order), element(*basis->chart(), static_cast<int>(uniform(1, coeff_terms))));
    return p;
  }

  // c * (1 + p g), optionally times a monomial in group mode.
  AlgElem unit(const Chart& chart) {
    const std::int64_t p = chart.params().p();
    std::int64_t c = uniform(1, chart.modulus() - 1);
    while (c % p == 0) c = uniform(1, chart.modulus() - 1);
    AlgElem g = element(chart, static_cast<int>(uniform(0, 2)), 2).scaled(p);
    AlgElem u = (chart.one() + g).scaled(c);
    if (chart.group_mode() && coin()) u = u.shifted(exponent(chart, 1));
    return u;
  }

  // Integer matrix with small entries and det prime to p.
  IntMatrix basis_change(std::size_t r, std::int64_t p) {
    for (;;) {
      IntMatrix m(r, r);
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) m(i, j) = uniform(-2, 3);
      const BigInt d = m.determinant();
      if (d != 0 && d % p != 0) return m;
    }
  }

  // A basis change accepted by LogBasis::rebased.
  std::pair<IntMatrix, std::vector<AlgElem>> rebasing(const LogBasis& basis) {
    for (;;) {
      IntMatrix m = basis_change(basis.rank(), basis.params().p());
      std::vector<AlgElem> units;
      for (std::size_t l = 0; l < basis.rank(); ++l) units.push_back(unit(*basis.chart()));
      try {
        basis.rebased(m, units);
        return {std::move(m), std::move(units)};
      } catch (const Error& e) {
        if (e.code() != Errc::DeterminantDivisibleByP) throw;
      }
    }
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// All exponents with entries in [lo, hi]^d that lie in the chart's monoid.
inline std::vector<Exponent> monomial_box(const Chart& chart, int bound) {
  const std::size_t d = chart.ambient_rank();
  const int lo = chart.group_mode() ? -bound : 0;
  std::vector<Exponent> out;
  Exponent v(d, lo);
  for (;;) {
    if (chart.contains(v)) out.push_back(v);
    std::size_t j = 0;
    while (j < d && v[j] == bound) v[j++] = lo;
    if (j == d) break;
    ++v[j];
  }
  return out;
}

}  // namespace testsupport
