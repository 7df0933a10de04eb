#include "logdiff/dmod.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace logdiff {

namespace {

bool is_identity(const IntMatrix& m) { return m == IntMatrix::identity(m.rows()); }

AlgElem unit_power(const Chart& chart, const AlgElem& u, const BigInt& e) {
  if (!e.fits_slong_p()) raise(Errc::InvalidParams, "exponent too large");
  long n = e.get_si();
  AlgElem base = n < 0 ? unit_inverse(chart, u) : u;
  n = n < 0 ? -n : n;
  AlgElem acc = chart.one();
  while (n > 0) {
    if (n & 1) acc = acc * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return acc;
}

AlgElem determinant(std::vector<std::vector<AlgElem>> a, const Chart& chart) {
  const std::size_t r = a.size();
  std::vector<std::size_t> perm(r);
  std::iota(perm.begin(), perm.end(), 0);
  AlgElem det = chart.zero();
  do {
    int inversions = 0;
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = i + 1; j < r; ++j)
        if (perm[i] > perm[j]) ++inversions;
    AlgElem term = chart.one();
    for (std::size_t i = 0; i < r && !term.is_zero(); ++i) term = term * a[i][perm[i]];
    det.add_scaled(term, inversions % 2 ? -1 : 1);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return det;
}

std::int64_t brace_residue(const CombTables& tab, const MultiIndex& k, const MultiIndex& i) {
  const std::int64_t mod = tab.params().modulus();
  std::int64_t c = 1 % mod;
  for (std::size_t l = 0; l < k.arity() && c != 0; ++l) c = c * tab.brace(k[l], i[l]) % mod;
  return c;
}

std::int64_t compose_residue(const CombTables& tab, const MultiIndex& a, const MultiIndex& b,
                             const MultiIndex& k) {
  const std::int64_t mod = tab.params().modulus();
  std::int64_t c = 1 % mod;
  for (std::size_t l = 0; l < k.arity() && c != 0; ++l) c = c * tab.compose(a[l], b[l], k[l]) % mod;
  return c;
}

MultiIndex componentwise_max(const MultiIndex& a, const MultiIndex& b) {
  MultiIndex out(a.arity());
  for (std::size_t l = 0; l < a.arity(); ++l) out[l] = std::max(a[l], b[l]);
  return out;
}

void print_terms(std::ostream& os, const std::map<MultiIndex, AlgElem, GradedOrder>& terms,
                 const char* symbol) {
  bool first = true;
  for (const auto& [k, a] : terms) {
    for (const auto& [v, c] : a.terms()) {
      if (!first) os << " + ";
      first = false;
      os << c << "*x[";
      for (std::size_t j = 0; j < v.size(); ++j) os << (j ? "," : "") << v[j];
      os << "] " << symbol << k.str();
    }
  }
  if (first) os << "0";
}

Exponent negated(const Exponent& v) {
  Exponent out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) out[j] = -v[j];
  return out;
}

void require_flat(const BasisPtr& basis) {
  if (!basis->chart()->group_mode() || !basis->is_canonical())
    raise(Errc::ChartNotInvertible, "flat basis needs a group-mode chart and its monomial basis");
}

}  // namespace

// ---------------------------------------------------------------------------
// LogBasis

LogBasis::LogBasis(ChartPtr chart, IntMatrix matrix, std::vector<AlgElem> units)
    : chart_(std::move(chart)), matrix_(std::move(matrix)), units_(std::move(units)) {
  const std::size_t r = chart_->rank();
  if (matrix_.rows() != r || matrix_.cols() != r || units_.size() != r)
    raise(Errc::ArityMismatch, "basis change must be r x r with r units");
  canonical_ = is_identity(matrix_) &&
               std::all_of(units_.begin(), units_.end(), [&](const AlgElem& u) { return u == chart_->one(); });
}

BasisPtr LogBasis::canonical(ChartPtr chart) {
  const std::size_t r = chart->rank();
  std::vector<AlgElem> units(r, chart->one());
  return std::make_shared<LogBasis>(std::move(chart), IntMatrix::identity(r), std::move(units));
}

BasisPtr LogBasis::rebased(const IntMatrix& m, const std::vector<AlgElem>& units) const {
  const std::size_t r = rank();
  if (m.rows() != r || m.cols() != r || units.size() != r)
    raise(Errc::ArityMismatch, "basis change must be r x r with r units");
  const BigInt det = m.determinant();
  if (det % chart_->params().p() == 0)
    raise(Errc::DeterminantDivisibleByP, "det(M) = " + det.get_str() + " is divisible by p");
  for (const AlgElem& u : units) {
    if (u.dim() != chart_->ambient_rank() || u.modulus() != chart_->modulus())
      raise(Errc::ChartMismatch, "unit does not belong to this chart");
    chart_->validate(u);
    if (!is_unit(*chart_, u)) raise(Errc::NotAUnit, u.str() + " is not a unit");
  }
  std::vector<AlgElem> composed;
  composed.reserve(r);
  for (std::size_t l = 0; l < r; ++l) {
    AlgElem u = units[l];
    for (std::size_t mu = 0; mu < r; ++mu)
      if (m(l, mu) != 0) u = u * unit_power(*chart_, units_[mu], m(l, mu));
    composed.push_back(std::move(u));
  }
  auto out = std::make_shared<LogBasis>(chart_, m * matrix_, std::move(composed));
  // Monomial factors of the units shift the exponent matrix.
  if (!is_unit(*chart_, out->jacobian_det()))
    raise(Errc::DeterminantDivisibleByP, "the new basis has a Jacobian determinant divisible by p");
  return out;
}

BasisPtr LogBasis::with_level(int level) const {
  ChartPtr c = chart_->with_level(level);
  return std::make_shared<LogBasis>(c, matrix_, units_);
}

bool LogBasis::same_as(const LogBasis& o) const {
  if (this == &o) return true;
  return (chart_ == o.chart_ || *chart_ == *o.chart_) && matrix_ == o.matrix_ && units_ == o.units_;
}

bool same_basis(const BasisPtr& a, const BasisPtr& b) { return a == b || a->same_as(*b); }

std::vector<PPartsElem> LogBasis::eta(int order) const {
  const std::size_t r = rank();
  std::vector<PPartsElem> out;
  out.reserve(r);
  for (std::size_t l = 0; l < r; ++l) {
    std::vector<PRat> row;
    for (std::size_t mu = 0; mu < r; ++mu) row.emplace_back(matrix_(l, mu), chart_->params().p());
    PPartsElem e = mu_of_unit(*chart_, units_[l], order) * mu_of_exponents(*chart_, row, order);
    e -= PPartsElem::one_like(e);
    out.push_back(std::move(e));
  }
  return out;
}

const LogBasis::Transition& LogBasis::transition_table(int order) const {
  std::lock_guard lock(mu_);
  auto& slot = transitions_[order];
  if (slot) return *slot;
  auto t = std::make_unique<Transition>();
  t->index = multi_indices_up_to(rank(), order);
  for (std::size_t a = 0; a < t->index.size(); ++a) t->position[t->index[a]] = a;
  const std::size_t n = t->index.size();
  const Chart& c = *chart_;

  const std::vector<PPartsElem> e = eta(order);
  t->forward.assign(n, std::vector<AlgElem>(n, c.zero()));
  for (std::size_t a = 0; a < n; ++a) {
    const PPartsElem row = rank() == 0 ? PPartsElem::one_like(PPartsElem(c, order))
                                       : pd_power(e, t->index[a]);
    for (const auto& [j, coeff] : row.terms()) t->forward[a][t->position.at(j)] = coeff;
  }

  // Block triangular by degree, diagonal blocks invertible modulo p.
  t->inverse = invert_matrix(c, t->forward);
  // forward[k][j]: eta'^{{k}} = sum_j forward[k][j] eta^{{j}}, so eta = F^{-1} eta'.
  slot = std::move(t);
  return *slot;
}

AlgElem LogBasis::transition(int order, const MultiIndex& k, const MultiIndex& j) const {
  const Transition& t = transition_table(order);
  return t.forward[t.position.at(k)][t.position.at(j)];
}

AlgElem LogBasis::inverse_transition(int order, const MultiIndex& j, const MultiIndex& k) const {
  const Transition& t = transition_table(order);
  return t.inverse[t.position.at(j)][t.position.at(k)];
}

AlgElem LogBasis::jacobian_det() const {
  const std::size_t r = rank();
  if (canonical_ || r == 0) return chart_->one();
  const std::vector<PPartsElem> e = eta(1);
  std::vector<std::vector<AlgElem>> j(r, std::vector<AlgElem>(r));
  for (std::size_t l = 0; l < r; ++l)
    for (std::size_t mu = 0; mu < r; ++mu) j[l][mu] = e[l].coefficient(MultiIndex::unit(r, mu));
  return determinant(std::move(j), *chart_);
}

AlgElem LogBasis::apply(const MultiIndex& k, const AlgElem& f) const {
  if (k.arity() != rank()) raise(Errc::ArityMismatch, "multi-index " + k.str() + " has wrong arity");
  const Chart& c = *chart_;
  if (f.dim() != c.ambient_rank() || f.modulus() != c.modulus())
    raise(Errc::ChartMismatch, "algebra element does not belong to this chart");
  if (canonical_) {
    AlgElem out = c.zero();
    for (const auto& [v, a] : f.terms()) {
      const std::int64_t e = c.log_eigen(v, k);
      if (e != 0) out.add_term(v, a * e % c.modulus());
    }
    return out;
  }
  const int n = k.total();
  const Transition& t = transition_table(n);
  const std::size_t col = t.position.at(k);
  const PPartsElem th = theta(c, f, n);
  AlgElem out = c.zero();
  for (const auto& [j, d] : th.terms()) {
    const AlgElem& m = t.inverse[t.position.at(j)][col];
    if (!m.is_zero()) out.add_product(d, m);
  }
  return out;
}

// ---------------------------------------------------------------------------
// DiffOp

DiffOp::DiffOp(BasisPtr basis) : basis_(std::move(basis)) {}

DiffOp DiffOp::scalar(BasisPtr basis, const AlgElem& a) {
  const std::size_t r = basis->rank();
  DiffOp out(std::move(basis));
  out.add_term(MultiIndex(r), a);
  return out;
}

DiffOp DiffOp::partial(BasisPtr basis, const MultiIndex& k) {
  const AlgElem one = basis->chart()->one();
  return partial(std::move(basis), k, one);
}

DiffOp DiffOp::partial(BasisPtr basis, const MultiIndex& k, const AlgElem& a) {
  DiffOp out(std::move(basis));
  out.add_term(k, a);
  return out;
}

int DiffOp::order() const {
  int n = 0;
  for (const auto& [k, a] : terms_) n = std::max(n, k.total());
  return n;
}

AlgElem DiffOp::coefficient(const MultiIndex& k) const {
  auto it = terms_.find(k);
  return it == terms_.end() ? chart().zero() : it->second;
}

void DiffOp::add_term(const MultiIndex& k, const AlgElem& a) {
  if (k.arity() != basis_->rank()) raise(Errc::ArityMismatch, "multi-index " + k.str() + " has wrong arity");
  if (a.dim() != chart().ambient_rank() || a.modulus() != chart().modulus())
    raise(Errc::ChartMismatch, "coefficient does not belong to this chart");
  if (a.is_zero()) return;
  auto [it, fresh] = terms_.try_emplace(k, a);
  if (!fresh) {
    it->second += a;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

void DiffOp::check(const DiffOp& o) const {
  if (!same_basis(basis_, o.basis_)) raise(Errc::ChartMismatch, "operators live over different bases");
}

DiffOp& DiffOp::operator+=(const DiffOp& o) {
  check(o);
  for (const auto& [k, a] : o.terms_) add_term(k, a);
  return *this;
}

DiffOp& DiffOp::operator-=(const DiffOp& o) {
  check(o);
  for (const auto& [k, a] : o.terms_) add_term(k, -a);
  return *this;
}

DiffOp DiffOp::operator+(const DiffOp& o) const {
  DiffOp out = *this;
  out += o;
  return out;
}

DiffOp DiffOp::operator-(const DiffOp& o) const {
  DiffOp out = *this;
  out -= o;
  return out;
}

DiffOp DiffOp::operator-() const { return scaled(-1); }

DiffOp DiffOp::scaled(const AlgElem& a) const {
  DiffOp out(basis_);
  for (const auto& [k, c] : terms_) out.add_term(k, a * c);
  return out;
}

DiffOp DiffOp::scaled(std::int64_t c) const {
  DiffOp out(basis_);
  for (const auto& [k, a] : terms_) out.add_term(k, a.scaled(c));
  return out;
}

bool DiffOp::operator==(const DiffOp& o) const { return same_basis(basis_, o.basis_) && terms_ == o.terms_; }

std::string DiffOp::str() const {
  std::ostringstream os;
  print_terms(os, terms_, "d");
  return os.str();
}

AlgElem act(const DiffOp& op, const AlgElem& f) {
  AlgElem out = op.chart().zero();
  for (const auto& [k, a] : op.terms()) {
    const AlgElem g = op.basis()->apply(k, f);
    if (!g.is_zero()) out.add_product(a, g);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Products

DiffOp mul(const DiffOp& p, const DiffOp& q) {
  if (!same_basis(p.basis(), q.basis())) raise(Errc::ChartMismatch, "operators live over different bases");
  const LogBasis& basis = *p.basis();
  const CombTables& tab = CombTables::get(basis.params());
  const std::int64_t mod = basis.params().modulus();
  DiffOp out(p.basis());

  // a d^<k> . b d^<j> = sum_{i <= k} {k over i} a d^<k-i>(b) d^<i> d^<j>
  std::map<std::pair<MultiIndex, MultiIndex>, AlgElem> grouped;
  std::map<std::pair<MultiIndex, MultiIndex>, AlgElem> derivs;
  for (const auto& [k, a] : p.terms()) {
    for (const auto& [j, b] : q.terms()) {
      for (const MultiIndex& i : box(MultiIndex(k.arity()), k)) {
        const std::int64_t c = brace_residue(tab, k, i);
        if (c == 0) continue;
        const MultiIndex s = k - i;
        auto key = std::make_pair(s, j);
        auto it = derivs.find(key);
        if (it == derivs.end()) it = derivs.emplace(key, basis.apply(s, b)).first;
        if (it->second.is_zero()) continue;
        auto [g, fresh] = grouped.try_emplace(std::make_pair(i, j), basis.chart()->zero());
        g->second.add_product(a, it->second, c);
      }
    }
  }
  for (const auto& [ij, coeff] : grouped) {
    if (coeff.is_zero()) continue;
    const auto& [i, j] = ij;
    for (const MultiIndex& l : box(componentwise_max(i, j), i + j)) {
      const std::int64_t c = compose_residue(tab, i, j, l);
      if (c != 0) out.add_term(l, coeff.scaled(c % mod));
    }
  }
  return out;
}

DiffOp mul_via_comult(const DiffOp& p, const DiffOp& q) {
  if (!same_basis(p.basis(), q.basis())) raise(Errc::ChartMismatch, "operators live over different bases");
  const LogBasis& basis = *p.basis();
  const Chart& chart = *basis.chart();
  const RingParams& params = basis.params();
  const std::int64_t mod = params.modulus();
  const std::size_t r = basis.rank();
  const int n = p.order(), n2 = q.order();
  DiffOp out(p.basis());

  // theta_n(b_t) in the basis's own eta-coordinates.
  std::map<MultiIndex, std::vector<std::pair<MultiIndex, AlgElem>>> taylor;
  for (const auto& [t, b] : q.terms()) {
    auto& row = taylor[t];
    for (const MultiIndex& l : multi_indices_up_to(r, n)) {
      AlgElem d = basis.apply(l, b);
      if (!d.is_zero()) row.emplace_back(l, std::move(d));
    }
  }
  for (const MultiIndex& k : multi_indices_up_to(r, n + n2)) {
    AlgElem acc = chart.zero();
    for (const auto& [st, c] : comult_basis_exact(params, k, n, n2)) {
      const auto& [s, t] = st;
      const std::int64_t cr = reduce_residue(c, mod);
      if (cr == 0) continue;
      auto tq = taylor.find(t);
      if (tq == taylor.end()) continue;
      // P(eta^{{s}} theta_n(b_t)) = sum_l {s+l over s} a_{s+l} d^<l>(b_t)
      for (const auto& [l, d] : tq->second) {
        const MultiIndex sl = s + l;
        if (sl.total() > n) continue;
        auto pa = p.terms().find(sl);
        if (pa == p.terms().end()) continue;
        const std::int64_t b = reduce_residue(brace_binom(sl, s, params), mod);
        if (b != 0) acc.add_product(pa->second, d, cr * b % mod);
      }
    }
    out.add_term(k, acc);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Transposition

DiffOp tilde_partial(const BasisPtr& basis, const MultiIndex& k) {
  const CombTables& tab = CombTables::get(basis->params());
  const std::int64_t mod = basis->params().modulus();
  DiffOp out(basis);
  for (const MultiIndex& i : box(MultiIndex(k.arity()), k)) {
    std::int64_t c = 1 % mod;
    for (std::size_t l = 0; l < k.arity() && c != 0; ++l) c = c * tab.transpose(k[l], i[l]) % mod;
    if (c != 0) out.add_term(i, basis->chart()->constant(c));
  }
  return out;
}

DiffOp transpose(const DiffOp& op) {
  DiffOp out(op.basis());
  for (const auto& [k, a] : op.terms()) out += mul(tilde_partial(op.basis(), k), DiffOp::scalar(op.basis(), a));
  return out;
}

// ---------------------------------------------------------------------------
// Flat basis

FlatOp::FlatOp(BasisPtr basis) : basis_(std::move(basis)) { require_flat(basis_); }

void FlatOp::add_term(const MultiIndex& k, const AlgElem& a) {
  if (k.arity() != basis_->rank()) raise(Errc::ArityMismatch, "multi-index " + k.str() + " has wrong arity");
  if (a.is_zero()) return;
  auto [it, fresh] = terms_.try_emplace(k, a);
  if (!fresh) {
    it->second += a;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

std::string FlatOp::str() const {
  std::ostringstream os;
  print_terms(os, terms_, "db");
  return os.str();
}

FlatOp to_flat(const DiffOp& op) {
  FlatOp out(op.basis());
  for (const auto& [k, a] : op.terms()) out.add_term(k, a.shifted(op.chart().basis_power(k)));
  return out;
}

DiffOp from_flat(const FlatOp& op) {
  DiffOp out(op.basis());
  const Chart& chart = *op.basis()->chart();
  for (const auto& [k, a] : op.terms()) out.add_term(k, a.shifted(negated(chart.basis_power(k))));
  return out;
}

AlgElem act_flat(const FlatOp& op, const AlgElem& f) {
  const Chart& chart = *op.basis()->chart();
  AlgElem out = chart.zero();
  for (const auto& [k, a] : op.terms()) {
    const Exponent shift = negated(chart.basis_power(k));
    AlgElem g = chart.zero();
    for (const auto& [v, c] : f.terms()) {
      const std::int64_t e = chart.log_eigen(v, k);
      if (e != 0) g.add_term(v, c * e % chart.modulus());
    }
    if (!g.is_zero()) out.add_product(a, g.shifted(shift));
  }
  return out;
}

DiffOp transpose_via_flat(const DiffOp& op) {
  require_flat(op.basis());
  const BasisPtr& basis = op.basis();
  const Chart& chart = *basis->chart();
  const std::size_t r = basis->rank();
  MultiIndex ones(r);
  for (std::size_t l = 0; l < r; ++l) ones[l] = 1;
  const Exponent t = chart.basis_power(ones);
  DiffOp inner(basis);
  const FlatOp flat = to_flat(op);
  for (const auto& [k, c] : flat.terms()) {
    // d_flat^<k> = t^{-k} d^<k>
    const DiffOp flat_k = DiffOp::partial(basis, k, chart.monomial(negated(chart.basis_power(k))));
    const DiffOp term = mul(flat_k, DiffOp::scalar(basis, c));
    inner += k.total() % 2 ? -term : term;
  }
  return mul(mul(DiffOp::scalar(basis, chart.monomial(t)), inner),
             DiffOp::scalar(basis, chart.monomial(negated(t))));
}

// ---------------------------------------------------------------------------
// Level change and rebasing

DiffOp level_incl(const DiffOp& op, int target_level) {
  const RingParams& src = op.basis()->params();
  if (target_level < src.level())
    raise(Errc::InvalidParams, "target level must not be below the source level");
  const RingParams dst = src.with_level(target_level);
  DiffOp out(op.basis()->with_level(target_level));
  for (const auto& [k, a] : op.terms()) {
    BigInt f = 1;
    for (int e : k.entries()) f *= exact_quotient(qfact(e, src), qfact(e, dst));
    const std::int64_t c = reduce_residue(f, src.modulus());
    out.add_term(k, a.scaled(c));
  }
  return out;
}

DiffOp change_basis(const DiffOp& op, const BasisPtr& target) {
  const BasisPtr& source = op.basis();
  if (!(source->chart() == target->chart() || *source->chart() == *target->chart()))
    raise(Errc::ChartMismatch, "bases live over different charts");
  if (same_basis(source, target)) {
    DiffOp out(target);
    for (const auto& [k, a] : op.terms()) out.add_term(k, a);
    return out;
  }
  const Chart& chart = *source->chart();
  const std::size_t r = source->rank();
  const int n = op.order();
  const std::vector<MultiIndex> idx = multi_indices_up_to(r, n);

  // Values a_j = P(eta^{{j}}) on the chart's own eta.
  std::map<MultiIndex, AlgElem, GradedOrder> values;
  for (const MultiIndex& j : idx) {
    if (source->is_canonical()) {
      values.emplace(j, op.coefficient(j));
      continue;
    }
    AlgElem v = chart.zero();
    for (const auto& [k, a] : op.terms()) {
      const AlgElem m = source->inverse_transition(n, j, k);
      if (!m.is_zero()) v.add_product(m, a);
    }
    values.emplace(j, std::move(v));
  }
  DiffOp out(target);
  for (const MultiIndex& k : idx) {
    if (target->is_canonical()) {
      out.add_term(k, values.at(k));
      continue;
    }
    AlgElem v = chart.zero();
    for (const auto& [j, a] : values) {
      if (a.is_zero()) continue;
      const AlgElem m = target->transition(n, k, j);
      if (!m.is_zero()) v.add_product(m, a);
    }
    out.add_term(k, v);
  }
  return out;
}

DiffOp rebase(const DiffOp& op, const IntMatrix& matrix, const std::vector<AlgElem>& units) {
  return change_basis(op, op.basis()->rebased(matrix, units));
}

// ---------------------------------------------------------------------------
// Generation by products

std::vector<int> unreachable_by_products(const RingParams& params, int max_k,
                                         const std::vector<int>& generator_orders) {
  // Operators with constant coefficients in rank 1 form a commutative ring;
  // they are vectors over Z_(p) indexed by 0..max_k. S^(o) is the span of
  // products of generators of total order <= o, plus 1.
  const std::int64_t p = params.p();
  using Vec = std::vector<BigRat>;
  const std::size_t len = static_cast<std::size_t>(max_k) + 1;

  auto product = [&](const Vec& a, const Vec& b) {
    Vec out(len, BigRat(0));
    for (std::size_t i = 0; i < len; ++i) {
      if (a[i] == 0) continue;
      for (std::size_t j = 0; j < len; ++j) {
        if (b[j] == 0) continue;
        for (std::size_t k = std::max(i, j); k <= std::min(i + j, len - 1); ++k)
          out[k] += a[i] * b[j] *
                    compose_coefficient(static_cast<int>(i), static_cast<int>(j), static_cast<int>(k), params);
      }
    }
    return out;
  };
  auto valuation = [&](const BigRat& x) {
    return p_valuation(x.get_num(), p) - p_valuation(x.get_den(), p);
  };

  // Rank-1 lattice over a DVR: keep a Hermite-style basis by re-echelonizing.
  auto insert = [&](std::vector<Vec>& gens, const Vec& v) {
    gens.push_back(v);
    // Z_(p)-Hermite normal form on columns from high order down.
    std::vector<Vec> basis;
    std::vector<Vec> pool = gens;
    for (std::size_t col = len; col-- > 0;) {
      int best = -1;
      long best_val = 0;
      for (std::size_t a = 0; a < pool.size(); ++a) {
        if (pool[a][col] == 0) continue;
        const long val = valuation(pool[a][col]);
        if (best < 0 || val < best_val) best = static_cast<int>(a), best_val = val;
      }
      if (best < 0) continue;
      Vec pivot = pool[best];
      pool.erase(pool.begin() + best);
      for (Vec& w : pool) {
        if (w[col] == 0) continue;
        const BigRat f = w[col] / pivot[col];
        for (std::size_t i = 0; i < len; ++i) w[i] -= f * pivot[i];
      }
      basis.push_back(std::move(pivot));
    }
    gens = std::move(basis);
  };
  auto contains = [&](const std::vector<Vec>& gens, Vec v) {
    for (const Vec& g : gens) {
      std::size_t col = len;
      while (col-- > 0 && g[col] == 0) {}
      if (v[col] == 0) continue;
      const BigRat f = v[col] / g[col];
      if (valuation(f) < 0) return false;
      for (std::size_t i = 0; i < len; ++i) v[i] -= f * g[i];
    }
    return std::all_of(v.begin(), v.end(), [](const BigRat& x) { return x == 0; });
  };

  auto unit_vec = [&](std::size_t k) {
    Vec v(len, BigRat(0));
    v[k] = 1;
    return v;
  };
  // span[o] for o = 0..max_k
  std::vector<std::vector<Vec>> span(len);
  insert(span[0], unit_vec(0));
  for (std::size_t o = 1; o < len; ++o) {
    span[o] = span[o - 1];
    for (int g : generator_orders) {
      if (g <= 0 || static_cast<std::size_t>(g) > o) continue;
      for (const Vec& s : span[o - g]) insert(span[o], product(unit_vec(g), s));
    }
  }
  std::vector<int> missing;
  for (std::size_t k = 0; k < len; ++k)
    if (!contains(span[len - 1], unit_vec(k))) missing.push_back(static_cast<int>(k));
  return missing;
}

}  // namespace logdiff
