#include "logdiff/arith.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>
#include <tuple>

namespace logdiff {

std::string_view code_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::ComponentwiseOrderViolation: return "ComponentwiseOrderViolation";
    case Errc::IntegralityFailure: return "IntegralityFailure";
    case Errc::NotPIntegral: return "NotPIntegral";
    case Errc::NotInvertible: return "NotInvertible";
    case Errc::CriterionViolated: return "CriterionViolated";
    case Errc::ArgumentsNotCoprime: return "ArgumentsNotCoprime";
    case Errc::BoundExceeded: return "BoundExceeded";
    case Errc::ExponentNotInMonoid: return "ExponentNotInMonoid";
    case Errc::NotInSpan: return "NotInSpan";
    case Errc::NotAUnit: return "NotAUnit";
    case Errc::OrderIncrease: return "OrderIncrease";
    case Errc::OrderMismatch: return "OrderMismatch";
    case Errc::DeterminantDivisibleByP: return "DeterminantDivisibleByP";
    case Errc::ChartNotInvertible: return "ChartNotInvertible";
    case Errc::ChartMismatch: return "ChartMismatch";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::ArityMismatch: return "ArityMismatch";
    case Errc::SchemaError: return "SchemaError";
  }
  return "Unknown";
}

bool is_prime(std::int64_t n) noexcept {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// ---------------------------------------------------------------------------
// RingParams / ModInt

RingParams::RingParams(std::int64_t p, int nilpotency, int level)
    : p_(p), nilpotency_(nilpotency), level_(level) {
  if (!is_prime(p)) raise(Errc::InvalidParams, "p = " + std::to_string(p) + " is not prime");
  if (nilpotency < 1) raise(Errc::InvalidParams, "nilpotency must be >= 1");
  if (level < 0) raise(Errc::InvalidParams, "level must be >= 0");
  // Residue products must fit in 64 bits.
  constexpr std::int64_t kMaxModulus = std::int64_t{1} << 31;
  modulus_ = 1;
  for (int j = 0; j < nilpotency; ++j) {
    modulus_ *= p;
    if (modulus_ >= kMaxModulus) raise(Errc::InvalidParams, "p^nilpotency exceeds 2^31");
  }
  p_pow_level_ = 1;
  for (int j = 0; j < level; ++j) {
    p_pow_level_ *= p;
    if (p_pow_level_ >= kMaxModulus) raise(Errc::InvalidParams, "p^level exceeds 2^31");
  }
}

static std::int64_t normalize(std::int64_t v, std::int64_t m) {
  v %= m;
  return v < 0 ? v + m : v;
}

ModInt::ModInt(std::int64_t value, std::int64_t modulus)
    : residue_(normalize(value, modulus)), modulus_(modulus) {}

static void check_same(std::int64_t a, std::int64_t b) {
  if (a != b) raise(Errc::InvalidParams, "modulus mismatch");
}

ModInt ModInt::operator+(ModInt o) const {
  check_same(modulus_, o.modulus_);
  return {residue_ + o.residue_, modulus_};
}
ModInt ModInt::operator-(ModInt o) const {
  check_same(modulus_, o.modulus_);
  return {residue_ - o.residue_, modulus_};
}
ModInt ModInt::operator*(ModInt o) const {
  check_same(modulus_, o.modulus_);
  return {residue_ * o.residue_, modulus_};
}

std::ostream& operator<<(std::ostream& os, ModInt x) { return os << x.residue(); }

// ---------------------------------------------------------------------------
// PRat

static bool divisible(const BigInt& x, std::int64_t p) {
  return mpz_divisible_ui_p(x.get_mpz_t(), static_cast<unsigned long>(p)) != 0;
}

PRat::PRat(const BigRat& value, std::int64_t p) : value_(value), p_(p) {
  value_.canonicalize();
  if (divisible(value_.get_den(), p))
    raise(Errc::NotPIntegral, "denominator of " + value_.get_str() + " divisible by " + std::to_string(p));
}

PRat PRat::operator+(const PRat& o) const { return PRat(BigRat(value_ + o.value_), p_); }
PRat PRat::operator-(const PRat& o) const { return PRat(BigRat(value_ - o.value_), p_); }
PRat PRat::operator*(const PRat& o) const { return PRat(BigRat(value_ * o.value_), p_); }

// ---------------------------------------------------------------------------
// MultiIndex

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  for (int e : entries_)
    if (e < 0) raise(Errc::InvalidParams, "multi-index entries must be non-negative");
}

MultiIndex MultiIndex::unit(std::size_t arity, std::size_t lambda) {
  MultiIndex k(arity);
  k.entries_.at(lambda) = 1;
  return k;
}

int MultiIndex::total() const noexcept {
  return std::accumulate(entries_.begin(), entries_.end(), 0);
}

bool MultiIndex::leq(const MultiIndex& o) const {
  if (arity() != o.arity()) raise(Errc::ArityMismatch, "multi-index arity mismatch");
  for (std::size_t j = 0; j < arity(); ++j)
    if (entries_[j] > o.entries_[j]) return false;
  return true;
}

MultiIndex MultiIndex::operator+(const MultiIndex& o) const {
  if (arity() != o.arity()) raise(Errc::ArityMismatch, "multi-index arity mismatch");
  MultiIndex r = *this;
  for (std::size_t j = 0; j < arity(); ++j) r.entries_[j] += o.entries_[j];
  return r;
}

MultiIndex MultiIndex::operator-(const MultiIndex& o) const {
  if (!o.leq(*this)) raise(Errc::ComponentwiseOrderViolation, o.str() + " is not <= " + str());
  MultiIndex r = *this;
  for (std::size_t j = 0; j < arity(); ++j) r.entries_[j] -= o.entries_[j];
  return r;
}

std::string MultiIndex::str() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t j = 0; j < entries_.size(); ++j) os << (j ? "," : "") << entries_[j];
  os << ']';
  return os.str();
}

static void indices_rec(std::vector<MultiIndex>& out, std::vector<int>& cur,
                        std::size_t pos, int remaining) {
  if (pos == cur.size()) {
    out.emplace_back(cur);
    return;
  }
  for (int v = 0; v <= remaining; ++v) {
    cur[pos] = v;
    indices_rec(out, cur, pos + 1, remaining - v);
  }
  cur[pos] = 0;
}

std::vector<MultiIndex> multi_indices_up_to(std::size_t arity, int order) {
  std::vector<MultiIndex> out;
  std::vector<int> cur(arity, 0);
  indices_rec(out, cur, 0, order);
  std::sort(out.begin(), out.end(), GradedOrder{});
  return out;
}

std::vector<MultiIndex> box(const MultiIndex& lo, const MultiIndex& hi) {
  if (!lo.leq(hi)) return {};
  std::vector<MultiIndex> out;
  MultiIndex cur = lo;
  const std::size_t r = lo.arity();
  while (true) {
    out.push_back(cur);
    std::size_t j = 0;
    while (j < r) {
      if (cur[j] < hi[j]) {
        ++cur[j];
        break;
      }
      cur[j] = lo[j];
      ++j;
    }
    if (j == r) break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Combinatorics

std::int64_t level_quotient(std::int64_t k, std::int64_t p, int level) {
  std::int64_t q = k;
  for (int j = 0; j < level && q > 0; ++j) q /= p;
  return q;
}

BigInt factorial(std::int64_t n) {
  BigInt r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
  return r;
}

BigInt qfact(std::int64_t k, const RingParams& params) {
  if (k < 0) raise(Errc::InvalidParams, "qfact of negative integer");
  return factorial(level_quotient(k, params.p(), params.level()));
}

BigInt qfact(const MultiIndex& k, const RingParams& params) {
  BigInt r = 1;
  for (int e : k.entries()) r *= qfact(e, params);
  return r;
}

BigInt binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < 0 || k > n) return 0;
  BigInt r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

BigInt binomial(const MultiIndex& k, const MultiIndex& i) {
  BigInt r = 1;
  for (std::size_t j = 0; j < k.arity(); ++j) r *= binomial(k[j], i[j]);
  return r;
}

BigInt exact_quotient(const BigInt& num, const BigInt& den) {
  if (den == 0 || !mpz_divisible_p(num.get_mpz_t(), den.get_mpz_t()))
    raise(Errc::IntegralityFailure, num.get_str() + " / " + den.get_str() + " is not integral");
  BigInt q;
  mpz_divexact(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return q;
}

static void require_leq(const MultiIndex& k, const MultiIndex& i) {
  if (k.arity() != i.arity()) raise(Errc::ArityMismatch, "multi-index arity mismatch");
  if (!i.leq(k)) raise(Errc::ComponentwiseOrderViolation, i.str() + " is not <= " + k.str());
}

BigInt brace_binom(const MultiIndex& k, const MultiIndex& i, const RingParams& params) {
  require_leq(k, i);
  BigInt r = 1;
  for (std::size_t j = 0; j < k.arity(); ++j)
    r *= exact_quotient(qfact(k[j], params), qfact(i[j], params) * qfact(k[j] - i[j], params));
  return r;
}

BigInt angle_binom(const MultiIndex& k, const MultiIndex& i, const RingParams& params) {
  require_leq(k, i);
  BigInt r = 1;
  for (std::size_t j = 0; j < k.arity(); ++j)
    r *= exact_quotient(binomial(k[j], i[j]) * qfact(i[j], params) * qfact(k[j] - i[j], params),
                        qfact(k[j], params));
  return r;
}

BigRat angle_binom_exact(const MultiIndex& k, const MultiIndex& i, const RingParams& params) {
  require_leq(k, i);
  BigRat r = 1;
  for (std::size_t j = 0; j < k.arity(); ++j)
    r *= BigRat(binomial(k[j], i[j]) * qfact(i[j], params) * qfact(k[j] - i[j], params), qfact(k[j], params));
  r.canonicalize();
  if (BigInt(r.get_den()) % params.p() == 0)
    raise(Errc::NotPIntegral, "<" + k.str() + " over " + i.str() + "> = " + r.get_str());
  return r;
}

PRat padic_binom(const PRat& alpha, std::int64_t k) {
  if (k < 0) raise(Errc::InvalidParams, "padic_binom with negative k");
  BigRat num = 1;
  for (std::int64_t j = 0; j < k; ++j) num *= alpha.value() - j;
  BigRat r = num / BigRat(factorial(k));
  r.canonicalize();
  return PRat(r, alpha.prime());
}

std::int64_t reduce_residue(const BigInt& x, std::int64_t modulus) {
  BigInt r;
  mpz_fdiv_r_ui(r.get_mpz_t(), x.get_mpz_t(), static_cast<unsigned long>(modulus));
  return r.get_si();
}

std::int64_t mod_inverse(std::int64_t a, std::int64_t modulus) {
  std::int64_t g = modulus, x = 0, x1 = 1, a1 = normalize(a, modulus);
  // extended Euclid on (modulus, a)
  while (a1 != 0) {
    std::int64_t q = g / a1;
    std::tie(g, a1) = std::make_tuple(a1, g - q * a1);
    std::tie(x, x1) = std::make_tuple(x1, x - q * x1);
  }
  if (g != 1) raise(Errc::NotInvertible, std::to_string(a) + " is not invertible mod " + std::to_string(modulus));
  return normalize(x, modulus);
}

std::int64_t reduce_residue(const BigRat& x, std::int64_t modulus) {
  const std::int64_t den = reduce_residue(BigInt(x.get_den()), modulus);
  const std::int64_t num = reduce_residue(BigInt(x.get_num()), modulus);
  if (modulus == 1) return 0;
  return normalize(num * mod_inverse(den, modulus), modulus);
}

ModInt reduce(const PRat& x, const RingParams& params) {
  return {reduce_residue(x.value(), params.modulus()), params.modulus()};
}

ModInt reduce(const BigInt& x, const RingParams& params) {
  return {reduce_residue(x, params.modulus()), params.modulus()};
}

std::int64_t p_valuation(const BigInt& x, std::int64_t p) {
  if (x == 0) return -1;
  BigInt t = x;
  std::int64_t v = 0;
  while (divisible(t, p)) {
    t /= static_cast<unsigned long>(p);
    ++v;
  }
  return v;
}

BigRat compose_coefficient(int a, int b, int k, const RingParams& params) {
  if (k < std::max(a, b) || k > a + b) return 0;
  const BigInt multinomial =
      factorial(k) / (factorial(a + b - k) * factorial(k - a) * factorial(k - b));
  BigRat c(multinomial * qfact(a, params) * qfact(b, params), qfact(k, params));
  c.canonicalize();
  if (mpz_divisible_ui_p(c.get_den_mpz_t(), static_cast<unsigned long>(params.p())))
    raise(Errc::IntegralityFailure, "composition coefficient " + c.get_str() + " is not p-integral");
  return c;
}

BigInt transpose_coefficient(int k, int i, const RingParams& params) {
  if (k == 0) return i == 0 ? 1 : 0;
  if (i < 1 || i > k) return 0;
  const BigInt brace = exact_quotient(qfact(k, params), qfact(i, params) * qfact(k - i, params));
  BigInt r = brace * qfact(k - i, params) * binomial(k - 1, k - i);
  return (k % 2 == 0) ? r : BigInt(-r);
}

// ---------------------------------------------------------------------------
// CombTables

namespace {
constexpr int kTableOrder = 48;
constexpr int kComposeOrder = 24;
}  // namespace

const CombTables& CombTables::get(const RingParams& params) {
  static std::mutex mu;
  static std::map<std::tuple<std::int64_t, int, int>, std::unique_ptr<CombTables>> registry;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(params.p(), params.nilpotency(), params.level());
  auto& slot = registry[key];
  if (!slot) {
    slot = std::make_unique<CombTables>(params);
    slot->grow(kTableOrder);
  }
  return *slot;
}

void CombTables::grow(int order) {
  const std::int64_t mod = params_.modulus();
  brace_.assign(order + 1, {});
  transpose_.assign(order + 1, {});
  for (int k = 0; k <= order; ++k) {
    brace_[k].resize(k + 1);
    transpose_[k].resize(k + 1);
    for (int i = 0; i <= k; ++i) {
      brace_[k][i] = reduce_residue(brace_binom(MultiIndex{k}, MultiIndex{i}, params_), mod);
      transpose_[k][i] = reduce_residue(transpose_coefficient(k, i, params_), mod);
    }
  }
  compose_.assign(kComposeOrder + 1, std::vector<std::vector<std::int64_t>>(kComposeOrder + 1));
  for (int a = 0; a <= kComposeOrder; ++a)
    for (int b = 0; b <= kComposeOrder; ++b) {
      auto& row = compose_[a][b];
      const int lo = std::max(a, b);
      row.resize(a + b - lo + 1);
      for (int k = lo; k <= a + b; ++k)
        row[k - lo] = reduce_residue(compose_coefficient(a, b, k, params_), mod);
    }
}

std::int64_t CombTables::brace(int k, int i) const {
  if (i < 0 || i > k) raise(Errc::ComponentwiseOrderViolation, "brace index out of range");
  if (k < static_cast<int>(brace_.size())) return brace_[k][i];
  return reduce_residue(brace_binom(MultiIndex{k}, MultiIndex{i}, params_), params_.modulus());
}

std::int64_t CombTables::compose(int a, int b, int k) const {
  if (k < std::max(a, b) || k > a + b) return 0;
  if (a <= kComposeOrder && b <= kComposeOrder) return compose_[a][b][k - std::max(a, b)];
  return reduce_residue(compose_coefficient(a, b, k, params_), params_.modulus());
}

std::int64_t CombTables::transpose(int k, int i) const {
  if (i < 0 || i > k) return 0;
  if (k < static_cast<int>(transpose_.size())) return transpose_[k][i];
  return reduce_residue(transpose_coefficient(k, i, params_), params_.modulus());
}

}  // namespace logdiff
