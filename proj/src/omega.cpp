#include "logdiff/omega.hpp"

#include <sstream>

namespace logdiff {

namespace {

MultiIndex concat(const MultiIndex& a, const MultiIndex& b) {
  std::vector<int> e(a.entries().begin(), a.entries().end());
  e.insert(e.end(), b.entries().begin(), b.entries().end());
  return MultiIndex(std::move(e));
}

using PPMatrix = std::vector<std::vector<PPartsElem>>;

PPMatrix pp_matrix_mul(const PPMatrix& a, const PPMatrix& b, const PPartsElem& zero) {
  const std::size_t n = a.size();
  PPMatrix out(n, std::vector<PPartsElem>(n, zero));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (a[i][k].is_zero()) continue;
      for (std::size_t j = 0; j < n; ++j)
        if (!b[k][j].is_zero()) out[i][j] += a[i][k] * b[k][j];
    }
  return out;
}

PPMatrix constant_pp_matrix(const AlgMatrix& m, const PPartsElem& zero) {
  PPMatrix out(m.size(), std::vector<PPartsElem>(m.size(), zero));
  const MultiIndex origin(zero.rank());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) out[i][j].add_term(origin, m[i][j]);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// omega

OmegaElement omega_act(const OmegaElement& w, const DiffOp& p) {
  if (!same_basis(w.basis, p.basis())) raise(Errc::ChartMismatch, "form and operator use different bases");
  return {w.basis, act(transpose(p), w.coefficient)};
}

OmegaElement omega_change_basis(const OmegaElement& w, const BasisPtr& target) {
  const Chart& chart = *w.basis->chart();
  if (!(w.basis->chart() == target->chart() || chart == *target->chart()))
    raise(Errc::ChartMismatch, "bases live over different charts");
  // a dlog b-wedge = a det(J_old) det(J_new)^{-1} dlog b'-wedge, J against the chart basis.
  const AlgElem scale = w.basis->jacobian_det() * unit_inverse(chart, target->jacobian_det());
  return {target, w.coefficient * scale};
}

OmegaElement omega_rebase(const OmegaElement& w, const IntMatrix& matrix, const std::vector<AlgElem>& units) {
  return omega_change_basis(w, w.basis->rebased(matrix, units));
}

PPartsElem taylor(const ChartPtr& chart, const AlgElem& f, int order) {
  chart->validate(f);
  const BasisPtr basis = LogBasis::canonical(chart);
  PPartsElem out(*chart, order);
  for (const MultiIndex& k : multi_indices_up_to(chart->rank(), order))
    out.add_term(k, basis->apply(k, f));
  return out;
}

// ---------------------------------------------------------------------------
// StratTable

StratTable::StratTable(ChartPtr chart, std::size_t rank, int order)
    : chart_(std::move(chart)), rank_(rank), order_(order),
      indices_(multi_indices_up_to(chart_->rank(), order)) {
  if (order < 0) raise(Errc::InvalidParams, "table order must be non-negative");
  const AlgMatrix zero(rank, std::vector<AlgElem>(rank, chart_->zero()));
  for (const MultiIndex& k : indices_) table_.emplace(k, zero);
  table_[MultiIndex(chart_->rank())] = identity_matrix(*chart_, rank);
}

const AlgMatrix& StratTable::at(const MultiIndex& k) const {
  auto it = table_.find(k);
  if (it == table_.end()) raise(Errc::OrderIncrease, "no table entry for " + k.str());
  return it->second;
}

void StratTable::set(const MultiIndex& k, AlgMatrix m) {
  auto it = table_.find(k);
  if (it == table_.end()) raise(Errc::OrderIncrease, "no table entry for " + k.str());
  if (m.size() != rank_) raise(Errc::ArityMismatch, "matrix has wrong size");
  for (const auto& row : m)
    if (row.size() != rank_) raise(Errc::ArityMismatch, "matrix has wrong size");
  it->second = std::move(m);
}

AlgElem& StratTable::entry(const MultiIndex& k, std::size_t l, std::size_t j) {
  auto it = table_.find(k);
  if (it == table_.end() || l >= rank_ || j >= rank_) raise(Errc::OrderIncrease, "no table entry for " + k.str());
  return it->second[l][j];
}

StratTable monomial_table(const ChartPtr& chart, const Exponent& v, int order) {
  StratTable t(chart, 1, order);
  for (const MultiIndex& k : t.indices()) t.entry(k, 0, 0) = chart->constant(chart->log_eigen(v, k));
  return t;
}

StratTable unit_table(const ChartPtr& chart, const AlgElem& u, int order) {
  const BasisPtr basis = LogBasis::canonical(chart);
  const AlgElem inv = unit_inverse(*chart, u);
  StratTable t(chart, 1, order);
  for (const MultiIndex& k : t.indices()) t.entry(k, 0, 0) = inv * basis->apply(k, u);
  return t;
}

StratTable gauge_table(const ChartPtr& chart, const AlgMatrix& g, int order) {
  const BasisPtr basis = LogBasis::canonical(chart);
  const AlgMatrix inv = invert_matrix(*chart, g);
  StratTable t(chart, g.size(), order);
  for (const MultiIndex& k : t.indices()) {
    AlgMatrix dg = g;
    for (auto& row : dg)
      for (auto& x : row) x = basis->apply(k, x);
    t.set(k, matrix_mul(*chart, inv, dg));
  }
  return t;
}

StratTable omega_twist_table(const ChartPtr& chart, const Exponent& v, int order) {
  const BasisPtr basis = LogBasis::canonical(chart);
  const AlgElem x = chart->monomial(v);
  StratTable t(chart, 1, order);
  for (const MultiIndex& k : t.indices())
    t.entry(k, 0, 0) = chart->constant(act(tilde_partial(basis, k), x).coefficient(v));
  return t;
}

// ---------------------------------------------------------------------------
// Cocycle

CocycleReport check_cocycle(const StratTable& table, int n, int n2) {
  if (n < 0 || n2 < 0 || n + n2 > table.order())
    raise(Errc::OrderIncrease, "table order " + std::to_string(table.order()) + " is below n + n'");
  const Chart& chart = *table.chart();
  const std::size_t r = chart.rank(), s = table.rank();
  const std::vector<MultiIndex> first = multi_indices_up_to(r, n);
  const std::vector<MultiIndex> second = multi_indices_up_to(r, n2);
  const std::vector<MultiIndex> both = multi_indices_up_to(r, n + n2);

  // X[l][i] = sum_{|k| <= n} A_k[l][i] eta^{{k}} in P^n.
  std::vector<std::vector<PPartsElem>> x(s, std::vector<PPartsElem>(s, PPartsElem(chart, n)));
  for (const MultiIndex& k : first)
    for (std::size_t l = 0; l < s; ++l)
      for (std::size_t i = 0; i < s; ++i) x[l][i].add_term(k, table.at(k)[l][i]);

  const PPartsElem shape(chart.params(), chart.ambient_rank(), r, {n, n2});
  for (std::size_t j = 0; j < s; ++j) {
    for (std::size_t l = 0; l < s; ++l) {
      PPartsElem lhs = shape;
      for (const MultiIndex& k2 : second) {
        PPartsElem acc(chart, n);
        for (std::size_t i = 0; i < s; ++i) {
          const AlgElem& a = table.at(k2)[i][j];
          if (a.is_zero() || x[l][i].is_zero()) continue;
          acc += x[l][i] * theta(chart, a, n);
        }
        for (const auto& [k, c] : acc.terms()) lhs.add_term(concat(k, k2), c);
      }
      PPartsElem single(chart, n + n2);
      for (const MultiIndex& k : both) single.add_term(k, table.at(k)[l][j]);
      const PPartsElem rhs = comult(single, n, n2);
      if (lhs == rhs) continue;

      const PPartsElem diff = lhs - rhs;
      const auto parts = diff.split(diff.terms().begin()->first);
      CocycleReport report;
      report.ok = false;
      report.basis_vector = j;
      report.component = l;
      report.left = parts[0];
      report.right = parts[1];
      std::ostringstream os;
      os << "cocycle fails on e_" << j << ", component e_" << l << ", at E[" << parts[0].str() << " ; "
         << parts[1].str() << "]: left " << lhs.coefficient(diff.terms().begin()->first).str() << ", right "
         << rhs.coefficient(diff.terms().begin()->first).str();
      report.message = os.str();
      return report;
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// epsilon

EpsilonResult epsilon_from_theta(const StratTable& table, int n) {
  if (n < 0 || n > table.order()) raise(Errc::OrderIncrease, "table order is below n");
  const Chart& chart = *table.chart();
  const std::size_t s = table.rank();
  const PPartsElem zero(chart, n);
  EpsilonResult out;
  out.matrix.assign(s, std::vector<PPartsElem>(s, zero));
  for (const MultiIndex& k : multi_indices_up_to(chart.rank(), n))
    for (std::size_t l = 0; l < s; ++l)
      for (std::size_t j = 0; j < s; ++j) out.matrix[l][j].add_term(k, table.at(k)[l][j]);

  AlgMatrix inv0;
  try {
    inv0 = invert_matrix(chart, table.at(MultiIndex(chart.rank())));
  } catch (const Error& e) {
    if (e.code() != Errc::NotInvertible) throw;
    return out;
  }
  out.invertible = true;
  // M = A_0 (1 + A_0^{-1} N) with N nilpotent of degree <= n.
  const PPMatrix b = constant_pp_matrix(inv0, zero);
  PPMatrix bn = pp_matrix_mul(b, out.matrix, zero);
  for (std::size_t i = 0; i < s; ++i) bn[i][i] -= PPartsElem::one_like(zero);
  for (auto& row : bn)
    for (auto& e : row) e = e.scaled(-1);
  // sum_t (-B N)^t B
  PPMatrix sum = b, power = b;
  for (int t = 1; t <= n; ++t) {
    power = pp_matrix_mul(bn, power, zero);
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t j = 0; j < s; ++j) sum[i][j] += power[i][j];
  }
  out.inverse = std::move(sum);
  return out;
}

}  // namespace logdiff
