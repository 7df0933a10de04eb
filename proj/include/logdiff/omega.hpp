#pragma once

// The right D^(m)-module omega = top wedge of dlog b_lambda, Taylor maps and
// stratification tables.

#include <optional>
#include <string>
#include <vector>

#include "logdiff/dmod.hpp"
#include "logdiff/pparts.hpp"

namespace logdiff {

// a * dlog b_1 ^ ... ^ dlog b_r for the log basis `basis`.
struct OmegaElement {
  BasisPtr basis;
  AlgElem coefficient;

  bool operator==(const OmegaElement& o) const {
    return same_basis(basis, o.basis) && coefficient == o.coefficient;
  }
  std::string str() const { return coefficient.str() + " * wedge"; }
};

// (a w) . P = transpose(P)(a) w
OmegaElement omega_act(const OmegaElement& w, const DiffOp& p);
OmegaElement omega_rebase(const OmegaElement& w, const IntMatrix& matrix, const std::vector<AlgElem>& units);
OmegaElement omega_change_basis(const OmegaElement& w, const BasisPtr& target);

// theta_n(f) = sum_k d^<k>(f) eta^{{k}}, read off the operator action.
PPartsElem taylor(const ChartPtr& chart, const AlgElem& f, int order);

// For each |k| <= N the s x s matrix A_k of d^<k> on a basis e_1..e_s:
// d^<k>(e_j) = sum_l A_k[l][j] e_l.
class StratTable {
 public:
  StratTable(ChartPtr chart, std::size_t rank, int order);

  const ChartPtr& chart() const noexcept { return chart_; }
  std::size_t rank() const noexcept { return rank_; }
  int order() const noexcept { return order_; }
  const std::vector<MultiIndex>& indices() const noexcept { return indices_; }

  const AlgMatrix& at(const MultiIndex& k) const;
  void set(const MultiIndex& k, AlgMatrix m);
  AlgElem& entry(const MultiIndex& k, std::size_t l, std::size_t j);

  bool operator==(const StratTable& o) const { return rank_ == o.rank_ && order_ == o.order_ && table_ == o.table_; }

 private:
  ChartPtr chart_;
  std::size_t rank_;
  int order_;
  std::vector<MultiIndex> indices_;
  std::map<MultiIndex, AlgMatrix, GradedOrder> table_;
};

// O_X x^v: A_k = eigenvalue of d^<k> on x^v.
StratTable monomial_table(const ChartPtr& chart, const Exponent& v, int order);
// O_X with basis the unit u: A_k = u^{-1} d^<k>(u).
StratTable unit_table(const ChartPtr& chart, const AlgElem& u, int order);
// O_X^s with basis the columns of g: A_k = g^{-1} d^<k>(g).
StratTable gauge_table(const ChartPtr& chart, const AlgMatrix& g, int order);
// Left structure from the right structure of omega x^v: A_k = transpose(d^<k>)(x^v) / x^v.
StratTable omega_twist_table(const ChartPtr& chart, const Exponent& v, int order);

struct CocycleReport {
  bool ok = true;
  std::size_t basis_vector = 0;
  std::size_t component = 0;
  MultiIndex left;
  MultiIndex right;
  std::string message;
};

// (theta_n (x) id) o theta_{n'} = (id (x) delta^{n,n'}) o theta_{n+n'}
CocycleReport check_cocycle(const StratTable& table, int n, int n2);

struct EpsilonResult {
  std::vector<std::vector<PPartsElem>> matrix;
  bool invertible = false;
  std::optional<std::vector<std::vector<PPartsElem>>> inverse;
};

// The P^n-linear extension sum_k A_k eta^{{k}}.
EpsilonResult epsilon_from_theta(const StratTable& table, int n);

}  // namespace logdiff
