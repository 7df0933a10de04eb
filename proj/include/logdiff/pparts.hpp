#pragma once

// Truncated m-PD algebra of principal parts in the eta-basis, and its
// tensor powers over O_X.
//
// An element with F factors is a finite sum of c * eta^{{k_1}} (x) ... (x)
// eta^{{k_F}} with all coefficients c on the p_0 side of the first factor.
// Keys concatenate the factor multi-indices (arity r * F); factor f is
// truncated at |k_f| <= orders[f].

#include <map>
#include <vector>

#include "logdiff/chart.hpp"

namespace logdiff {

class PPartsElem {
 public:
  using Terms = std::map<MultiIndex, AlgElem, GradedOrder>;

  PPartsElem(RingParams params, std::size_t dim, std::size_t rank, std::vector<int> orders);
  // Single factor of order n over the chart.
  PPartsElem(const Chart& chart, int order);

  // eta^{{k}} in a single factor of order n.
  static PPartsElem basis(const Chart& chart, int order, const MultiIndex& k);
  static PPartsElem one_like(const PPartsElem& shape);

  const RingParams& params() const noexcept { return params_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t rank() const noexcept { return rank_; }
  const std::vector<int>& orders() const noexcept { return orders_; }
  std::size_t factors() const noexcept { return orders_.size(); }
  // Order of a single-factor element.
  int order() const;
  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  AlgElem coefficient(const MultiIndex& k) const;
  // Splits a concatenated key into per-factor multi-indices.
  std::vector<MultiIndex> split(const MultiIndex& key) const;
  bool within_orders(const MultiIndex& key) const;

  // Terms outside the truncation are dropped.
  void add_term(const MultiIndex& k, const AlgElem& c);

  PPartsElem& operator+=(const PPartsElem& o);
  PPartsElem& operator-=(const PPartsElem& o);
  PPartsElem operator+(const PPartsElem& o) const;
  PPartsElem operator-(const PPartsElem& o) const;
  PPartsElem operator*(const PPartsElem& o) const;
  // Multiplication by p_0^*(a).
  PPartsElem scaled(const AlgElem& a) const;
  PPartsElem scaled(std::int64_t c) const;

  bool operator==(const PPartsElem& o) const;

  std::string str() const;

 private:
  void check(const PPartsElem& o) const;

  RingParams params_;
  std::size_t dim_;
  std::size_t rank_;
  std::vector<int> orders_;
  Terms terms_;
};

using BiPPartsElem = PPartsElem;

PPartsElem pp_mul(const PPartsElem& u, const PPartsElem& v);

// mu(x^v) = prod_lambda (1 + eta_lambda)^{alpha_lambda(v)}, truncated at n.
PPartsElem mu_of_monomial(const Chart& chart, const Exponent& v, int order);
// prod_lambda (1 + eta_lambda)^{alpha_lambda} for p-integral alpha.
PPartsElem mu_of_exponents(const Chart& chart, const std::vector<PRat>& alphas, int order);
// mu(u) = u^{-1} theta_n(u) for a unit u of O_X.
PPartsElem mu_of_unit(const Chart& chart, const AlgElem& u, int order);
// theta_n(f) = p_1^*(f) = sum_k d^<k>(f) eta^{{k}}.
PPartsElem theta(const Chart& chart, const AlgElem& f, int order);

// delta^{n,n'} of a single-factor element.
BiPPartsElem comult(const PPartsElem& w, int n, int n2);
// delta^{n,n'} applied to factor `factor` of a tensor element.
PPartsElem comult_at(const PPartsElem& w, std::size_t factor, int n, int n2);

// Projection P^{n1} -> P^{n2}.
PPartsElem project(const PPartsElem& w, int n2);

// psi^*_{m,m'}: level m' element to level m <= m'.
PPartsElem psi_level(const PPartsElem& w, int target_level);

// x^{{j}} for x with zero constant term (single factor), via the rational
// embedding eta^{{k}} -> eta^k / q_k!.
PPartsElem pd_power(const PPartsElem& x, int j);
// prod_lambda x_lambda^{{k_lambda}}.
PPartsElem pd_power(const std::vector<PPartsElem>& xs, const MultiIndex& k);

// delta^{n,n'}(eta^{{k}}) as a table of p-integral coefficients.
std::map<std::pair<MultiIndex, MultiIndex>, BigRat> comult_basis_exact(
    const RingParams& params, const MultiIndex& k, int n, int n2);

}  // namespace logdiff
