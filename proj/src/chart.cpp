#include "logdiff/chart.hpp"

#include <algorithm>
#include <sstream>

namespace logdiff {

// ---------------------------------------------------------------------------
// AlgElem

AlgElem AlgElem::constant(std::size_t dim, std::int64_t modulus, std::int64_t c) {
  AlgElem f(dim, modulus);
  f.add_term(Exponent(dim, 0), c);
  return f;
}

AlgElem AlgElem::monomial(const Exponent& v, std::int64_t modulus, std::int64_t c) {
  AlgElem f(v.size(), modulus);
  f.add_term(v, c);
  return f;
}

std::int64_t AlgElem::coefficient(const Exponent& v) const {
  auto it = terms_.find(v);
  return it == terms_.end() ? 0 : it->second;
}

void AlgElem::add_term(const Exponent& v, std::int64_t c) {
  if (v.size() != dim_) raise(Errc::ArityMismatch, "exponent has wrong length");
  c %= modulus_;
  if (c < 0) c += modulus_;
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(v, c);
  if (!inserted) {
    it->second = (it->second + c) % modulus_;
    if (it->second == 0) terms_.erase(it);
  }
}

void AlgElem::check(const AlgElem& o) const {
  if (dim_ != o.dim_ || modulus_ != o.modulus_)
    raise(Errc::ChartMismatch, "algebra elements from different charts");
}

AlgElem& AlgElem::operator+=(const AlgElem& o) {
  check(o);
  for (const auto& [v, c] : o.terms_) add_term(v, c);
  return *this;
}

AlgElem& AlgElem::operator-=(const AlgElem& o) {
  check(o);
  for (const auto& [v, c] : o.terms_) add_term(v, modulus_ - c);
  return *this;
}

AlgElem AlgElem::operator+(const AlgElem& o) const {
  AlgElem r = *this;
  r += o;
  return r;
}

AlgElem AlgElem::operator-(const AlgElem& o) const {
  AlgElem r = *this;
  r -= o;
  return r;
}

AlgElem AlgElem::operator-() const { return scaled(-1); }

AlgElem AlgElem::operator*(const AlgElem& o) const {
  check(o);
  AlgElem r(dim_, modulus_);
  r.add_product(*this, o);
  return r;
}

AlgElem AlgElem::scaled(std::int64_t c) const {
  AlgElem r(dim_, modulus_);
  c %= modulus_;
  if (c < 0) c += modulus_;
  if (c == 0) return r;
  for (const auto& [v, a] : terms_) {
    const std::int64_t x = (a * c) % modulus_;
    if (x != 0) r.terms_.emplace_hint(r.terms_.end(), v, x);
  }
  return r;
}

AlgElem AlgElem::shifted(const Exponent& v) const {
  if (v.size() != dim_) raise(Errc::ArityMismatch, "exponent has wrong length");
  AlgElem r(dim_, modulus_);
  Exponent w(dim_);
  for (const auto& [u, a] : terms_) {
    for (std::size_t j = 0; j < dim_; ++j) w[j] = u[j] + v[j];
    r.terms_.emplace_hint(r.terms_.end(), w, a);
  }
  return r;
}

void AlgElem::add_scaled(const AlgElem& g, std::int64_t c) {
  check(g);
  c %= modulus_;
  if (c < 0) c += modulus_;
  if (c == 0) return;
  for (const auto& [v, a] : g.terms_) add_term(v, a * c);
}

void AlgElem::add_product(const AlgElem& f, const AlgElem& g, std::int64_t c) {
  check(f);
  check(g);
  c %= modulus_;
  if (c < 0) c += modulus_;
  if (c == 0) return;
  Exponent w(dim_);
  for (const auto& [u, a] : f.terms_) {
    const std::int64_t ac = (a * c) % modulus_;
    for (const auto& [v, b] : g.terms_) {
      for (std::size_t j = 0; j < dim_; ++j) w[j] = u[j] + v[j];
      add_term(w, ac * b);
    }
  }
}

std::string AlgElem::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [v, c] = *it;
    os << (first ? "" : " + ") << c << "*x[";
    for (std::size_t j = 0; j < v.size(); ++j) os << (j ? "," : "") << v[j];
    os << ']';
    first = false;
  }
  return os.str();
}

AlgElem alg_add(const AlgElem& f, const AlgElem& g) { return f + g; }
AlgElem alg_mul(const AlgElem& f, const AlgElem& g) { return f * g; }

// ---------------------------------------------------------------------------
// Chart

Chart::Chart(RingParams params, AffineMonoid monoid, LatticeMap basis_map, bool group_mode)
    : params_(std::move(params)),
      monoid_(std::move(monoid)),
      basis_map_(std::move(basis_map)),
      group_mode_(group_mode) {
  if (basis_map_.target_rank() != monoid_.ambient_rank())
    raise(Errc::ArityMismatch, "basis map target rank differs from the monoid's ambient rank");
  const EtaleDecision dec = is_log_etale_chart(basis_map_, params_.p());
  if (!dec.log_etale)
    raise(Errc::CriterionViolated, "basis map " + basis_map_.matrix().str() + " is not log etale at p = " +
                                       std::to_string(params_.p()));
  snf_ = smith_normal_form(basis_map_);
}

ChartPtr Chart::make(RingParams params, AffineMonoid monoid, LatticeMap basis_map, bool group_mode) {
  return std::make_shared<const Chart>(std::move(params), std::move(monoid), std::move(basis_map), group_mode);
}

ChartPtr Chart::identity(const RingParams& params, std::size_t rank, bool group_mode) {
  return make(params, AffineMonoid::free(rank), LatticeMap(IntMatrix::identity(rank)), group_mode);
}

ChartPtr Chart::free_with_map(const RingParams& params, const IntMatrix& map, bool group_mode) {
  return make(params, AffineMonoid::free(map.rows()), LatticeMap(map), group_mode);
}

ChartPtr Chart::with_level(int level) const {
  return make(params_.with_level(level), monoid_, basis_map_, group_mode_);
}

bool Chart::operator==(const Chart& o) const {
  return params_ == o.params_ && monoid_ == o.monoid_ && basis_map_ == o.basis_map_ &&
         group_mode_ == o.group_mode_;
}

Exponent Chart::basis_exponent(std::size_t lambda) const {
  Exponent e(ambient_rank());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = basis_map_.matrix()(i, lambda).get_si();
  return e;
}

Exponent Chart::basis_power(const MultiIndex& k) const {
  if (k.arity() != rank()) raise(Errc::ArityMismatch, "multi-index arity differs from chart rank");
  Exponent e(ambient_rank(), 0);
  for (std::size_t lambda = 0; lambda < rank(); ++lambda)
    for (std::size_t i = 0; i < e.size(); ++i) e[i] += k[lambda] * basis_map_.matrix()(i, lambda).get_si();
  return e;
}

bool Chart::contains(const Exponent& v) const {
  if (v.size() != ambient_rank()) return false;
  return group_mode_ || monoid_membership(monoid_, v);
}

void Chart::validate(const AlgElem& f) const {
  if (f.dim() != ambient_rank() || f.modulus() != modulus())
    raise(Errc::ChartMismatch, "algebra element does not belong to this chart");
  for (const auto& [v, c] : f.terms()) {
    if (!contains(v)) {
      std::ostringstream os;
      os << "exponent [";
      for (std::size_t j = 0; j < v.size(); ++j) os << (j ? "," : "") << v[j];
      os << "] is not in the monoid";
      raise(Errc::ExponentNotInMonoid, os.str());
    }
  }
}

AlgElem Chart::monomial(const Exponent& v, std::int64_t c) const {
  if (v.size() != ambient_rank()) raise(Errc::ArityMismatch, "exponent has wrong length");
  return AlgElem::monomial(v, modulus(), c);
}

ExponentVector exponent_alpha(const Chart& chart, const Exponent& v) {
  if (v.size() != chart.ambient_rank()) raise(Errc::ArityMismatch, "exponent has wrong length");
  const SnfResult snf = smith_normal_form(chart.basis_map());
  std::vector<BigInt> vv(v.begin(), v.end());
  for (std::size_t j = 0; j < v.size(); ++j) vv[j] = static_cast<long>(v[j]);
  const std::vector<BigInt> y = snf.left.apply(vv);
  const std::size_t s = snf.divisors.size();
  for (std::size_t j = s; j < y.size(); ++j)
    if (y[j] != 0) raise(Errc::NotInSpan, "exponent is not in the span of the log basis");
  std::vector<BigRat> z(chart.rank());
  for (std::size_t j = 0; j < s; ++j) z[j] = BigRat(y[j], snf.divisors[j]);
  ExponentVector out;
  for (std::size_t lambda = 0; lambda < chart.rank(); ++lambda) {
    BigRat a = 0;
    for (std::size_t j = 0; j < chart.rank(); ++j) a += BigRat(snf.right(lambda, j)) * z[j];
    a.canonicalize();
    out.alphas.emplace_back(a, chart.params().p());
  }
  return out;
}

ExponentVector Chart::alpha(const Exponent& v) const {
  std::lock_guard<std::mutex> lock(mu_);
  return cache_entry(v, 0).alpha;
}

const Chart::EigenCache& Chart::cache_entry(const Exponent& v, int order) const {
  auto it = cache_.find(v);
  if (it == cache_.end()) {
    EigenCache entry{exponent_alpha(*this, v), {}, {}};
    entry.values.resize(rank());
    entry.negated.resize(rank());
    it = cache_.emplace(v, std::move(entry)).first;
  }
  EigenCache& e = it->second;
  const std::int64_t mod = modulus();
  for (std::size_t lambda = 0; lambda < rank(); ++lambda) {
    auto& vals = e.values[lambda];
    auto& neg = e.negated[lambda];
    if (static_cast<int>(vals.size()) > order) continue;
    const BigRat a = e.alpha.alphas[lambda].value();
    // q_k! C(a, k), exactly, then reduced.
    for (int k = static_cast<int>(vals.size()); k <= order; ++k) {
      BigRat up = 1, down = 1;
      for (int j = 0; j < k; ++j) {
        up *= a - j;
        down *= -a - j;
      }
      const BigRat scale = BigRat(qfact(k, params_)) / BigRat(factorial(k));
      BigRat x = up * scale, y = down * scale;
      x.canonicalize();
      y.canonicalize();
      vals.push_back(reduce_residue(PRat(x, params_.p()).value(), mod));
      neg.push_back(reduce_residue(PRat(y, params_.p()).value(), mod));
    }
  }
  return e;
}

std::int64_t Chart::log_eigen(const Exponent& v, const MultiIndex& k) const {
  if (k.arity() != rank()) raise(Errc::ArityMismatch, "multi-index arity differs from chart rank");
  int order = 0;
  for (int e : k.entries()) order = std::max(order, e);
  std::lock_guard<std::mutex> lock(mu_);
  const EigenCache& e = cache_entry(v, order);
  std::int64_t r = 1 % modulus();
  for (std::size_t lambda = 0; lambda < rank(); ++lambda) r = (r * e.values[lambda][k[lambda]]) % modulus();
  return r;
}

std::int64_t Chart::log_eigen_negated(const Exponent& v, const MultiIndex& k) const {
  if (k.arity() != rank()) raise(Errc::ArityMismatch, "multi-index arity differs from chart rank");
  int order = 0;
  for (int e : k.entries()) order = std::max(order, e);
  std::lock_guard<std::mutex> lock(mu_);
  const EigenCache& e = cache_entry(v, order);
  std::int64_t r = 1 % modulus();
  for (std::size_t lambda = 0; lambda < rank(); ++lambda) r = (r * e.negated[lambda][k[lambda]]) % modulus();
  return r;
}

// ---------------------------------------------------------------------------
// Units

namespace {

struct UnitSplit {
  Exponent v;
  std::int64_t c_inv;
  AlgElem g;  // f = c x^v (1 + g)
};

bool split_unit(const Chart& chart, const AlgElem& f, UnitSplit& out) {
  if (f.dim() != chart.ambient_rank() || f.modulus() != chart.modulus())
    raise(Errc::ChartMismatch, "algebra element does not belong to this chart");
  const std::int64_t p = chart.params().p();
  const Exponent* lead = nullptr;
  std::int64_t c = 0;
  for (const auto& [v, a] : f.terms()) {
    if (a % p == 0) continue;
    if (lead) return false;
    lead = &v;
    c = a;
  }
  if (!lead) return false;
  const bool zero = std::all_of(lead->begin(), lead->end(), [](std::int64_t e) { return e == 0; });
  if (!zero && !chart.group_mode()) return false;
  out.v = *lead;
  out.c_inv = mod_inverse(c, chart.modulus());
  Exponent neg(lead->size());
  for (std::size_t j = 0; j < neg.size(); ++j) neg[j] = -(*lead)[j];
  out.g = f.shifted(neg).scaled(out.c_inv) - chart.one();
  return true;
}

}  // namespace

bool is_unit(const Chart& chart, const AlgElem& f) {
  UnitSplit s;
  return split_unit(chart, f, s);
}

AlgElem unit_inverse(const Chart& chart, const AlgElem& f) {
  UnitSplit s;
  if (!split_unit(chart, f, s)) raise(Errc::NotAUnit, f.str() + " is not a unit");
  // (1 + g)^{-1} = sum_{j <= i} (-g)^j since g^{i+1} = 0.
  AlgElem sum = chart.one(), power = chart.one();
  const AlgElem minus_g = -s.g;
  for (int j = 1; j < chart.params().nilpotency(); ++j) {
    power = power * minus_g;
    if (power.is_zero()) break;
    sum += power;
  }
  Exponent neg(s.v.size());
  for (std::size_t j = 0; j < neg.size(); ++j) neg[j] = -s.v[j];
  return sum.shifted(neg).scaled(s.c_inv);
}

AlgMatrix identity_matrix(const Chart& chart, std::size_t n) {
  AlgMatrix out(n, std::vector<AlgElem>(n, chart.zero()));
  for (std::size_t a = 0; a < n; ++a) out[a][a] = chart.one();
  return out;
}

AlgMatrix matrix_mul(const Chart& chart, const AlgMatrix& a, const AlgMatrix& b) {
  const std::size_t rows = a.size(), inner = b.size(), cols = b.empty() ? 0 : b[0].size();
  AlgMatrix out(rows, std::vector<AlgElem>(cols, chart.zero()));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < inner; ++k) {
      if (a[i][k].is_zero()) continue;
      for (std::size_t j = 0; j < cols; ++j)
        if (!b[k][j].is_zero()) out[i][j].add_product(a[i][k], b[k][j]);
    }
  return out;
}

AlgMatrix invert_matrix(const Chart& chart, AlgMatrix work) {
  const std::size_t n = work.size();
  AlgMatrix inv = identity_matrix(chart, n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && !is_unit(chart, work[piv][col])) ++piv;
    if (piv == n) raise(Errc::NotInvertible, "matrix over O_X is not invertible");
    std::swap(work[piv], work[col]);
    std::swap(inv[piv], inv[col]);
    const AlgElem u = unit_inverse(chart, work[col][col]);
    for (auto& x : work[col]) x = x * u;
    for (auto& x : inv[col]) x = x * u;
    for (std::size_t row = 0; row < n; ++row) {
      if (row == col || work[row][col].is_zero()) continue;
      const AlgElem f = work[row][col];
      for (std::size_t j = 0; j < n; ++j) {
        if (!work[col][j].is_zero()) work[row][j].add_product(f, work[col][j], -1);
        if (!inv[col][j].is_zero()) inv[row][j].add_product(f, inv[col][j], -1);
      }
    }
  }
  return inv;
}

}  // namespace logdiff
