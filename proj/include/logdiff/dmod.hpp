#pragma once

// Logarithmic differential operators of level m over a chart.

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "logdiff/chart.hpp"
#include "logdiff/pparts.hpp"

namespace logdiff {

class LogBasis;
using BasisPtr = std::shared_ptr<const LogBasis>;

// A log p-basis b'_lambda = u_lambda * prod_mu b_mu^{M_{lambda mu}} written
// against the chart's monomial basis b. The canonical basis has M = 1, u = 1.
class LogBasis : public std::enable_shared_from_this<LogBasis> {
 public:
  LogBasis(ChartPtr chart, IntMatrix matrix, std::vector<AlgElem> units);

  static BasisPtr canonical(ChartPtr chart);

  // Basis u'_lambda prod_mu b'_mu^{M'_{lambda mu}} relative to this one.
  BasisPtr rebased(const IntMatrix& matrix, const std::vector<AlgElem>& units) const;
  BasisPtr with_level(int level) const;

  const ChartPtr& chart() const noexcept { return chart_; }
  const RingParams& params() const noexcept { return chart_->params(); }
  std::size_t rank() const noexcept { return chart_->rank(); }
  bool is_canonical() const noexcept { return canonical_; }
  const IntMatrix& matrix() const noexcept { return matrix_; }
  const std::vector<AlgElem>& units() const noexcept { return units_; }

  bool same_as(const LogBasis& o) const;

  // d^<k>(f) for the operators dual to this basis.
  AlgElem apply(const MultiIndex& k, const AlgElem& f) const;

  // eta'_lambda in chart coordinates, truncated at `order`.
  std::vector<PPartsElem> eta(int order) const;
  // Coefficient of eta^{{j}} in eta'^{{k}}, for |j|, |k| <= order.
  AlgElem transition(int order, const MultiIndex& k, const MultiIndex& j) const;
  // Coefficient of eta'^{{k}} in eta^{{j}}.
  AlgElem inverse_transition(int order, const MultiIndex& j, const MultiIndex& k) const;
  // det of d log b'_lambda in terms of d log b_mu.
  AlgElem jacobian_det() const;

 private:
  struct Transition {
    std::vector<MultiIndex> index;
    std::map<MultiIndex, std::size_t, GradedOrder> position;
    std::vector<std::vector<AlgElem>> forward;
    std::vector<std::vector<AlgElem>> inverse;
  };
  const Transition& transition_table(int order) const;

  ChartPtr chart_;
  IntMatrix matrix_;
  std::vector<AlgElem> units_;
  bool canonical_;

  mutable std::mutex mu_;
  mutable std::map<int, std::unique_ptr<Transition>> transitions_;
};

bool same_basis(const BasisPtr& a, const BasisPtr& b);

// Sum of a_k d^<k> with coefficients on the left, ordered by (|k|, lex k).
class DiffOp {
 public:
  using Terms = std::map<MultiIndex, AlgElem, GradedOrder>;

  explicit DiffOp(BasisPtr basis);
  explicit DiffOp(const ChartPtr& chart) : DiffOp(LogBasis::canonical(chart)) {}

  static DiffOp scalar(BasisPtr basis, const AlgElem& a);
  static DiffOp partial(BasisPtr basis, const MultiIndex& k);
  static DiffOp partial(BasisPtr basis, const MultiIndex& k, const AlgElem& a);

  const BasisPtr& basis() const noexcept { return basis_; }
  const Chart& chart() const noexcept { return *basis_->chart(); }
  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  int order() const;
  AlgElem coefficient(const MultiIndex& k) const;

  void add_term(const MultiIndex& k, const AlgElem& a);

  DiffOp& operator+=(const DiffOp& o);
  DiffOp& operator-=(const DiffOp& o);
  DiffOp operator+(const DiffOp& o) const;
  DiffOp operator-(const DiffOp& o) const;
  DiffOp operator-() const;
  // Left multiplication by a in O_X.
  DiffOp scaled(const AlgElem& a) const;
  DiffOp scaled(std::int64_t c) const;

  bool operator==(const DiffOp& o) const;

  std::string str() const;

 private:
  void check(const DiffOp& o) const;

  BasisPtr basis_;
  Terms terms_;
};

AlgElem act(const DiffOp& op, const AlgElem& f);

// Product through the closed commutation and composition formulas.
DiffOp mul(const DiffOp& p, const DiffOp& q);
// Product through the definition: P o (id (x) Q) o delta^{n,n'}.
DiffOp mul_via_comult(const DiffOp& p, const DiffOp& q);

// Logarithmic transpose of d^<k>.
DiffOp tilde_partial(const BasisPtr& basis, const MultiIndex& k);
DiffOp transpose(const DiffOp& op);

// Operators in the flat basis d_flat^<k>, d^<k> = t^k d_flat^<k>; needs a
// group-mode chart with its canonical basis.
class FlatOp {
 public:
  using Terms = std::map<MultiIndex, AlgElem, GradedOrder>;
  explicit FlatOp(BasisPtr basis);

  const BasisPtr& basis() const noexcept { return basis_; }
  const Terms& terms() const noexcept { return terms_; }
  void add_term(const MultiIndex& k, const AlgElem& a);
  bool operator==(const FlatOp& o) const { return same_basis(basis_, o.basis_) && terms_ == o.terms_; }
  std::string str() const;

 private:
  BasisPtr basis_;
  Terms terms_;
};

FlatOp to_flat(const DiffOp& op);
DiffOp from_flat(const FlatOp& op);
// d_flat^<k>(t^u) = q_k! C(u, k) t^{u-k}
AlgElem act_flat(const FlatOp& op, const AlgElem& f);
// t * (sum (-1)^{|k|} d_flat^<k> a_k) * t^{-1}, t = t_1 ... t_r.
DiffOp transpose_via_flat(const DiffOp& op);

// rho_{m',m}: level m to level m' >= m.
DiffOp level_incl(const DiffOp& op, int target_level);

// Rewrite op against the basis u_lambda prod_mu b_mu^{M_{lambda mu}}.
DiffOp rebase(const DiffOp& op, const IntMatrix& matrix, const std::vector<AlgElem>& units);
DiffOp change_basis(const DiffOp& op, const BasisPtr& target);

// Rank-1 generation: is every d^<k>, k <= max_k, in the Z_(p)-span of
// products of d^<g>, g in generator_orders? Returns the unreachable k.
std::vector<int> unreachable_by_products(const RingParams& params, int max_k,
                                         const std::vector<int>& generator_orders);

}  // namespace logdiff
