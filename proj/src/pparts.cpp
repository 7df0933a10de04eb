#include "logdiff/pparts.hpp"

#include <mutex>
#include <sstream>
#include <tuple>

namespace logdiff {

// ---------------------------------------------------------------------------
// PPartsElem

PPartsElem::PPartsElem(RingParams params, std::size_t dim, std::size_t rank, std::vector<int> orders)
    : params_(std::move(params)), dim_(dim), rank_(rank), orders_(std::move(orders)) {
  for (int n : orders_)
    if (n < 0) raise(Errc::InvalidParams, "negative truncation order");
}

PPartsElem::PPartsElem(const Chart& chart, int order)
    : PPartsElem(chart.params(), chart.ambient_rank(), chart.rank(), {order}) {}

PPartsElem PPartsElem::basis(const Chart& chart, int order, const MultiIndex& k) {
  PPartsElem e(chart, order);
  if (k.arity() != chart.rank()) raise(Errc::ArityMismatch, "multi-index arity differs from chart rank");
  e.add_term(k, chart.one());
  return e;
}

PPartsElem PPartsElem::one_like(const PPartsElem& shape) {
  PPartsElem e(shape.params_, shape.dim_, shape.rank_, shape.orders_);
  e.add_term(MultiIndex(shape.rank_ * shape.factors()),
             AlgElem::constant(shape.dim_, shape.params_.modulus(), 1));
  return e;
}

int PPartsElem::order() const {
  if (orders_.size() != 1) raise(Errc::OrderMismatch, "order() of a tensor element");
  return orders_.front();
}

AlgElem PPartsElem::coefficient(const MultiIndex& k) const {
  auto it = terms_.find(k);
  return it == terms_.end() ? AlgElem(dim_, params_.modulus()) : it->second;
}

std::vector<MultiIndex> PPartsElem::split(const MultiIndex& key) const {
  std::vector<MultiIndex> out;
  auto e = key.entries();
  for (std::size_t f = 0; f < factors(); ++f)
    out.emplace_back(std::vector<int>(e.begin() + f * rank_, e.begin() + (f + 1) * rank_));
  return out;
}

bool PPartsElem::within_orders(const MultiIndex& key) const {
  auto e = key.entries();
  for (std::size_t f = 0; f < factors(); ++f) {
    int s = 0;
    for (std::size_t j = 0; j < rank_; ++j) s += e[f * rank_ + j];
    if (s > orders_[f]) return false;
  }
  return true;
}

void PPartsElem::add_term(const MultiIndex& k, const AlgElem& c) {
  if (k.arity() != rank_ * factors()) raise(Errc::ArityMismatch, "key arity mismatch");
  if (c.is_zero() || !within_orders(k)) return;
  auto [it, inserted] = terms_.try_emplace(k, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

void PPartsElem::check(const PPartsElem& o) const {
  if (!(params_ == o.params_) || dim_ != o.dim_ || rank_ != o.rank_)
    raise(Errc::ChartMismatch, "principal parts from different charts");
  if (orders_ != o.orders_) raise(Errc::OrderMismatch, "principal parts of different orders");
}

PPartsElem& PPartsElem::operator+=(const PPartsElem& o) {
  check(o);
  for (const auto& [k, c] : o.terms_) add_term(k, c);
  return *this;
}

PPartsElem& PPartsElem::operator-=(const PPartsElem& o) {
  check(o);
  for (const auto& [k, c] : o.terms_) add_term(k, -c);
  return *this;
}

PPartsElem PPartsElem::operator+(const PPartsElem& o) const {
  PPartsElem r = *this;
  r += o;
  return r;
}

PPartsElem PPartsElem::operator-(const PPartsElem& o) const {
  PPartsElem r = *this;
  r -= o;
  return r;
}

// eta^{{a}} eta^{{b}} = {a+b over a} eta^{{a+b}}, coordinatewise.
PPartsElem PPartsElem::operator*(const PPartsElem& o) const {
  check(o);
  const CombTables& tab = CombTables::get(params_);
  const std::int64_t mod = params_.modulus();
  PPartsElem r(params_, dim_, rank_, orders_);
  for (const auto& [a, ca] : terms_)
    for (const auto& [b, cb] : o.terms_) {
      const MultiIndex s = a + b;
      if (!within_orders(s)) continue;
      std::int64_t coef = 1 % mod;
      for (std::size_t j = 0; j < s.arity() && coef != 0; ++j) coef = (coef * tab.brace(s[j], a[j])) % mod;
      if (coef == 0) continue;
      AlgElem c(dim_, mod);
      c.add_product(ca, cb, coef);
      r.add_term(s, c);
    }
  return r;
}

PPartsElem PPartsElem::scaled(const AlgElem& a) const {
  PPartsElem r(params_, dim_, rank_, orders_);
  for (const auto& [k, c] : terms_) r.add_term(k, c * a);
  return r;
}

PPartsElem PPartsElem::scaled(std::int64_t c) const {
  PPartsElem r(params_, dim_, rank_, orders_);
  for (const auto& [k, a] : terms_) r.add_term(k, a.scaled(c));
  return r;
}

bool PPartsElem::operator==(const PPartsElem& o) const {
  return params_ == o.params_ && orders_ == o.orders_ && terms_ == o.terms_;
}

std::string PPartsElem::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [key, c] : terms_) {
    const auto parts = split(key);
    for (const auto& [v, a] : c.terms()) {
      os << (first ? "" : " + ") << a << "*x[";
      first = false;
      for (std::size_t j = 0; j < v.size(); ++j) os << (j ? "," : "") << v[j];
      os << "] * E[";
      for (std::size_t f = 0; f < parts.size(); ++f) {
        os << (f ? ";" : "");
        for (std::size_t j = 0; j < rank_; ++j) os << (j ? "," : "") << parts[f][j];
      }
      os << ']';
    }
  }
  return os.str();
}

PPartsElem pp_mul(const PPartsElem& u, const PPartsElem& v) { return u * v; }

// ---------------------------------------------------------------------------
// Rational oracle: eta^{{k}} -> eta^k / q_k! inside a Q-polynomial quotient.

namespace {

using RatAlg = std::map<Exponent, BigRat>;

struct RatPoly {
  std::size_t rank;
  std::vector<int> orders;
  std::map<MultiIndex, RatAlg> terms;

  bool within(const MultiIndex& key) const {
    auto e = key.entries();
    for (std::size_t f = 0; f < orders.size(); ++f) {
      int s = 0;
      for (std::size_t j = 0; j < rank; ++j) s += e[f * rank + j];
      if (s > orders[f]) return false;
    }
    return true;
  }

  void add(const MultiIndex& k, const Exponent& v, const BigRat& c) {
    if (c == 0 || !within(k)) return;
    BigRat& slot = terms[k][v];
    slot += c;
    if (slot == 0) {
      terms[k].erase(v);
      if (terms[k].empty()) terms.erase(k);
    }
  }
};

RatPoly rat_mul(const RatPoly& a, const RatPoly& b) {
  RatPoly r{a.rank, a.orders, {}};
  for (const auto& [ka, ca] : a.terms)
    for (const auto& [kb, cb] : b.terms) {
      const MultiIndex k = ka + kb;
      if (!r.within(k)) continue;
      for (const auto& [va, xa] : ca)
        for (const auto& [vb, xb] : cb) {
          Exponent v(va.size());
          for (std::size_t j = 0; j < v.size(); ++j) v[j] = va[j] + vb[j];
          r.add(k, v, xa * xb);
        }
    }
  return r;
}

RatPoly rat_one(std::size_t rank, const std::vector<int>& orders, std::size_t dim) {
  RatPoly r{rank, orders, {}};
  r.add(MultiIndex(rank * orders.size()), Exponent(dim, 0), 1);
  return r;
}

RatPoly lift(const PPartsElem& w) {
  RatPoly r{w.rank(), w.orders(), {}};
  for (const auto& [k, c] : w.terms()) {
    const BigInt q = qfact(k, w.params());
    for (const auto& [v, a] : c.terms()) r.add(k, v, BigRat(BigInt(static_cast<long>(a)), q));
  }
  return r;
}

PPartsElem lower(const RatPoly& x, const RingParams& params, std::size_t dim) {
  PPartsElem r(params, dim, x.rank, x.orders);
  for (const auto& [k, coeffs] : x.terms) {
    const BigInt q = qfact(k, params);
    AlgElem c(dim, params.modulus());
    for (const auto& [v, a] : coeffs) {
      BigRat scaled = a * BigRat(q);
      scaled.canonicalize();
      if (mpz_divisible_ui_p(scaled.get_den_mpz_t(), static_cast<unsigned long>(params.p())))
        raise(Errc::IntegralityFailure, "coefficient " + scaled.get_str() + " of E" + k.str() + " is not p-integral");
      c.add_term(v, reduce_residue(scaled, params.modulus()));
    }
    r.add_term(k, c);
  }
  return r;
}

}  // namespace

std::map<std::pair<MultiIndex, MultiIndex>, BigRat> comult_basis_exact(const RingParams& params,
                                                                        const MultiIndex& k, int n, int n2) {
  using Key = std::tuple<std::int64_t, int, std::vector<int>, int, int>;
  static std::mutex mu;
  static std::map<Key, std::map<std::pair<MultiIndex, MultiIndex>, BigRat>> cache;
  const Key key{params.p(), params.level(), std::vector<int>(k.entries().begin(), k.entries().end()), n, n2};
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }

  const std::size_t r = k.arity();
  const std::vector<int> orders{n, n2};
  // eta_lambda -> A_lambda + B_lambda + A_lambda B_lambda
  RatPoly prod = rat_one(r, orders, 0);
  for (std::size_t lambda = 0; lambda < r; ++lambda) {
    RatPoly s{r, orders, {}};
    MultiIndex a(2 * r), b(2 * r);
    a[lambda] = 1;
    b[r + lambda] = 1;
    s.add(a, {}, 1);
    s.add(b, {}, 1);
    s.add(a + b, {}, 1);
    for (int e = 0; e < k[lambda]; ++e) prod = rat_mul(prod, s);
  }
  const BigInt qk = qfact(k, params);
  std::map<std::pair<MultiIndex, MultiIndex>, BigRat> out;
  for (const auto& [key2, coeffs] : prod.terms) {
    const BigRat c = coeffs.begin()->second * BigRat(qfact(key2, params)) / BigRat(qk);
    BigRat cc = c;
    cc.canonicalize();
    if (mpz_divisible_ui_p(cc.get_den_mpz_t(), static_cast<unsigned long>(params.p())))
      raise(Errc::IntegralityFailure, "comultiplication coefficient " + cc.get_str() + " is not p-integral");
    std::vector<int> s(key2.entries().begin(), key2.entries().begin() + r);
    std::vector<int> t(key2.entries().begin() + r, key2.entries().end());
    out.emplace(std::make_pair(MultiIndex(s), MultiIndex(t)), cc);
  }
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, out);
  return out;
}

namespace {

MultiIndex concat(const std::vector<MultiIndex>& parts) {
  std::vector<int> e;
  for (const auto& p : parts) e.insert(e.end(), p.entries().begin(), p.entries().end());
  return MultiIndex(std::move(e));
}

}  // namespace

PPartsElem comult_at(const PPartsElem& w, std::size_t factor, int n, int n2) {
  if (factor >= w.factors()) raise(Errc::InvalidParams, "factor index out of range");
  if (w.orders()[factor] < n + n2)
    raise(Errc::OrderIncrease, "comultiplication needs order >= " + std::to_string(n + n2));
  std::vector<int> orders = w.orders();
  orders[factor] = n;
  orders.insert(orders.begin() + static_cast<std::ptrdiff_t>(factor) + 1, n2);
  PPartsElem out(w.params(), w.dim(), w.rank(), orders);
  const std::int64_t mod = w.params().modulus();
  for (const auto& [key, c] : w.terms()) {
    std::vector<MultiIndex> parts = w.split(key);
    if (parts[factor].total() > n + n2) continue;
    const auto table = comult_basis_exact(w.params(), parts[factor], n, n2);
    for (const auto& [st, coef] : table) {
      std::vector<MultiIndex> np = parts;
      np[factor] = st.first;
      np.insert(np.begin() + static_cast<std::ptrdiff_t>(factor) + 1, st.second);
      out.add_term(concat(np), c.scaled(reduce_residue(coef, mod)));
    }
  }
  return out;
}

BiPPartsElem comult(const PPartsElem& w, int n, int n2) {
  if (w.factors() != 1) raise(Errc::InvalidParams, "comult expects a single-factor element");
  return comult_at(w, 0, n, n2);
}

PPartsElem project(const PPartsElem& w, int n2) {
  if (w.factors() != 1) raise(Errc::InvalidParams, "project expects a single-factor element");
  if (n2 > w.order()) raise(Errc::OrderIncrease, "cannot project to a higher order");
  PPartsElem out(w.params(), w.dim(), w.rank(), {n2});
  for (const auto& [k, c] : w.terms()) out.add_term(k, c);
  return out;
}

PPartsElem psi_level(const PPartsElem& w, int target_level) {
  const int source_level = w.params().level();
  if (target_level > source_level) raise(Errc::InvalidParams, "psi maps to a lower or equal level");
  const RingParams target = w.params().with_level(target_level);
  PPartsElem out(target, w.dim(), w.rank(), w.orders());
  const std::int64_t mod = w.params().modulus();
  for (const auto& [k, c] : w.terms()) {
    BigInt f = 1;
    for (int e : k.entries()) f *= exact_quotient(qfact(e, target), qfact(e, w.params()));
    out.add_term(k, c.scaled(reduce_residue(f, mod)));
  }
  return out;
}

PPartsElem pd_power(const PPartsElem& x, int j) {
  if (x.factors() != 1) raise(Errc::InvalidParams, "pd_power expects a single-factor element");
  if (!x.coefficient(MultiIndex(x.rank())).is_zero())
    raise(Errc::InvalidParams, "divided powers need a zero constant term");
  if (j == 0) return PPartsElem::one_like(x);
  const RatPoly lifted = lift(x);
  RatPoly acc = rat_one(x.rank(), x.orders(), x.dim());
  for (int e = 0; e < j; ++e) acc = rat_mul(acc, lifted);
  const BigRat inv_q(BigInt(1), qfact(j, x.params()));
  for (auto& [k, coeffs] : acc.terms)
    for (auto& [v, a] : coeffs) a *= inv_q;
  return lower(acc, x.params(), x.dim());
}

PPartsElem pd_power(const std::vector<PPartsElem>& xs, const MultiIndex& k) {
  if (xs.empty() || xs.size() != k.arity()) raise(Errc::ArityMismatch, "pd_power arity mismatch");
  PPartsElem acc = PPartsElem::one_like(xs.front());
  for (std::size_t lambda = 0; lambda < xs.size(); ++lambda)
    if (k[lambda] > 0) acc = acc * pd_power(xs[lambda], k[lambda]);
  return acc;
}

// ---------------------------------------------------------------------------
// mu and theta

PPartsElem mu_of_exponents(const Chart& chart, const std::vector<PRat>& alphas, int order) {
  if (alphas.size() != chart.rank()) raise(Errc::ArityMismatch, "exponent vector has wrong length");
  PPartsElem out(chart, order);
  const std::int64_t p = chart.params().p();
  for (const MultiIndex& k : multi_indices_up_to(chart.rank(), order)) {
    PRat c(qfact(k, chart.params()), p);
    for (std::size_t lambda = 0; lambda < chart.rank(); ++lambda)
      c = c * padic_binom(alphas[lambda], k[lambda]);
    out.add_term(k, chart.constant(reduce(c, chart.params()).residue()));
  }
  return out;
}

PPartsElem mu_of_monomial(const Chart& chart, const Exponent& v, int order) {
  return mu_of_exponents(chart, exponent_alpha(chart, v).alphas, order);
}

PPartsElem theta(const Chart& chart, const AlgElem& f, int order) {
  chart.validate(f);
  PPartsElem out(chart, order);
  for (const MultiIndex& k : multi_indices_up_to(chart.rank(), order)) {
    AlgElem c = chart.zero();
    for (const auto& [v, a] : f.terms()) {
      const std::int64_t e = chart.log_eigen(v, k);
      if (e != 0) c.add_term(v, a * e);
    }
    out.add_term(k, c);
  }
  return out;
}

PPartsElem mu_of_unit(const Chart& chart, const AlgElem& u, int order) {
  const AlgElem inv = unit_inverse(chart, u);
  return theta(chart, u, order).scaled(inv);
}

}  // namespace logdiff
