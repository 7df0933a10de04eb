#include "logdiff/monoids.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

namespace logdiff {

// ---------------------------------------------------------------------------
// IntMatrix

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) raise(Errc::InvalidParams, "ragged matrix");
    for (long v : row) data_.emplace_back(v);
  }
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<std::int64_t>>& rows, std::size_t cols) {
  IntMatrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) raise(Errc::InvalidParams, "ragged matrix");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = static_cast<long>(rows[i][j]);
  }
  return m;
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const {
  if (cols_ != o.rows_) raise(Errc::InvalidParams, "matrix dimension mismatch");
  IntMatrix r(rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const BigInt& a = (*this)(i, k);
      if (a == 0) continue;
      for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
    }
  return r;
}

std::vector<BigInt> IntMatrix::apply(const std::vector<BigInt>& v) const {
  if (v.size() != cols_) raise(Errc::InvalidParams, "vector dimension mismatch");
  std::vector<BigInt> r(rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r[i] += (*this)(i, j) * v[j];
  return r;
}

IntMatrix IntMatrix::transposed() const {
  IntMatrix r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
  return r;
}

bool IntMatrix::operator==(const IntMatrix& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

BigInt IntMatrix::determinant() const {
  if (rows_ != cols_) raise(Errc::InvalidParams, "determinant of non-square matrix");
  const std::size_t n = rows_;
  if (n == 0) return 1;
  IntMatrix a = *this;
  BigInt sign = 1, prev = 1;
  // Bareiss
  for (std::size_t k = 0; k + 1 < n + 1 && k < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t s = k + 1;
      while (s < n && a(s, k) == 0) ++s;
      if (s == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(s, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        a(i, j) = exact_quotient(a(i, j) * a(k, k) - a(i, k) * a(k, j), prev);
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

bool IntMatrix::is_diagonal() const {
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if (i != j && (*this)(i, j) != 0) return false;
  return true;
}

std::vector<std::vector<std::int64_t>> IntMatrix::to_int64() const {
  std::vector<std::vector<std::int64_t>> out(rows_, std::vector<std::int64_t>(cols_));
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) {
      if (!(*this)(i, j).fits_slong_p()) raise(Errc::InvalidParams, "matrix entry exceeds 64 bits");
      out[i][j] = (*this)(i, j).get_si();
    }
  return out;
}

std::string IntMatrix::str() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < rows_; ++i) {
    os << (i ? "," : "") << '[';
    for (std::size_t j = 0; j < cols_; ++j) os << (j ? "," : "") << (*this)(i, j).get_str();
    os << ']';
  }
  os << ']';
  return os.str();
}

// ---------------------------------------------------------------------------
// Smith normal form

namespace {

void swap_rows(IntMatrix& m, std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(a, j), m(b, j));
}
void swap_cols(IntMatrix& m, std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t i = 0; i < m.rows(); ++i) std::swap(m(i, a), m(i, b));
}
// row[dst] += c * row[src]
void add_row(IntMatrix& m, std::size_t dst, std::size_t src, const BigInt& c) {
  for (std::size_t j = 0; j < m.cols(); ++j) m(dst, j) += c * m(src, j);
}
void add_col(IntMatrix& m, std::size_t dst, std::size_t src, const BigInt& c) {
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, dst) += c * m(i, src);
}
void negate_row(IntMatrix& m, std::size_t r) {
  for (std::size_t j = 0; j < m.cols(); ++j) m(r, j) = -m(r, j);
}

}  // namespace

SnfResult smith_normal_form(const LatticeMap& map) {
  IntMatrix a = map.matrix();
  const std::size_t rows = a.rows(), cols = a.cols();
  IntMatrix left = IntMatrix::identity(rows), right = IntMatrix::identity(cols);
  const std::size_t diag = std::min(rows, cols);

  for (std::size_t t = 0; t < diag; ++t) {
    while (true) {
      // Smallest nonzero entry of the trailing block becomes the pivot.
      std::size_t pi = rows, pj = cols;
      for (std::size_t i = t; i < rows; ++i)
        for (std::size_t j = t; j < cols; ++j)
          if (a(i, j) != 0 && (pi == rows || abs(a(i, j)) < abs(a(pi, pj)))) {
            pi = i;
            pj = j;
          }
      if (pi == rows) goto done;
      swap_rows(a, t, pi);
      swap_rows(left, t, pi);
      swap_cols(a, t, pj);
      swap_cols(right, t, pj);

      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (a(i, t) == 0) continue;
        BigInt q;
        mpz_fdiv_q(q.get_mpz_t(), a(i, t).get_mpz_t(), a(t, t).get_mpz_t());
        add_row(a, i, t, -q);
        add_row(left, i, t, -q);
        if (a(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (a(t, j) == 0) continue;
        BigInt q;
        mpz_fdiv_q(q.get_mpz_t(), a(t, j).get_mpz_t(), a(t, t).get_mpz_t());
        add_col(a, j, t, -q);
        add_col(right, j, t, -q);
        if (a(t, j) != 0) clean = false;
      }
      if (!clean) continue;

      // Divisibility chain: fold any non-multiple into the pivot row.
      bool divides_all = true;
      for (std::size_t i = t + 1; i < rows && divides_all; ++i)
        for (std::size_t j = t + 1; j < cols; ++j)
          if (!mpz_divisible_p(a(i, j).get_mpz_t(), a(t, t).get_mpz_t())) {
            add_row(a, t, i, 1);
            add_row(left, t, i, 1);
            divides_all = false;
            break;
          }
      if (divides_all) break;
    }
    if (a(t, t) < 0) {
      negate_row(a, t);
      negate_row(left, t);
    }
  }
done:
  SnfResult res;
  for (std::size_t t = 0; t < diag; ++t)
    if (a(t, t) != 0) res.divisors.push_back(a(t, t));
  res.left = std::move(left);
  res.right = std::move(right);
  res.diagonal = std::move(a);
  return res;
}

CokerInvariants coker_invariants(const LatticeMap& map) {
  const SnfResult snf = smith_normal_form(map);
  CokerInvariants inv;
  inv.free_rank = map.target_rank() - snf.divisors.size();
  for (const BigInt& d : snf.divisors)
    if (d > 1) inv.torsion.push_back(d);
  return inv;
}

EtaleDecision is_log_etale_chart(const LatticeMap& phi, std::int64_t p) {
  const SnfResult snf = smith_normal_form(phi);
  EtaleDecision dec;
  dec.kernel_trivial = snf.divisors.size() == phi.source_rank();
  if (snf.divisors.size() == phi.target_rank()) {
    BigInt order = 1;
    for (const BigInt& d : snf.divisors) order *= d;
    dec.coker_order = order;
  }
  dec.log_etale = dec.kernel_trivial && dec.coker_order &&
                  !mpz_divisible_ui_p(dec.coker_order->get_mpz_t(), static_cast<unsigned long>(p));
  return dec;
}

BezoutSplit bezout_split(const std::vector<BigInt>& x0, const LatticeMap& phi, std::int64_t p) {
  const EtaleDecision dec = is_log_etale_chart(phi, p);
  if (!dec.log_etale) raise(Errc::CriterionViolated, "chart map is not log etale at p = " + std::to_string(p));
  if (x0.size() != phi.target_rank()) raise(Errc::ArityMismatch, "x0 has wrong length");
  const BigInt& n = *dec.coker_order;

  // n * x0 = phi(y0): with L A R = D, y0 = R D^{-1} L (n x0), integral since d_j | n.
  const SnfResult snf = smith_normal_form(phi);
  std::vector<BigInt> lx = snf.left.apply(x0);
  std::vector<BigInt> z(phi.source_rank());
  for (std::size_t j = 0; j < z.size(); ++j) z[j] = exact_quotient(n * lx[j], snf.divisors[j]);
  const std::vector<BigInt> y0 = snf.right.apply(z);

  // a n + b p = 1
  BigInt g, a, b;
  mpz_gcdext(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t(), n.get_mpz_t(), BigInt(static_cast<long>(p)).get_mpz_t());
  BezoutSplit out;
  out.y.resize(y0.size());
  for (std::size_t j = 0; j < y0.size(); ++j) out.y[j] = a * y0[j];
  out.x.resize(x0.size());
  for (std::size_t j = 0; j < x0.size(); ++j) out.x[j] = b * x0[j];
  // x0 = a n x0 + b p x0 = phi(a y0) + p (b x0)
  return out;
}

std::int64_t rank1_saturation(const std::vector<std::int64_t>& gens) {
  if (gens.empty()) raise(Errc::InvalidParams, "no generators");
  std::int64_t g = 0;
  for (std::int64_t v : gens) {
    if (v <= 0) raise(Errc::InvalidParams, "generators must be positive");
    g = std::gcd(g, v);
  }
  return g;
}

// ---------------------------------------------------------------------------
// AffineMonoid

AffineMonoid::AffineMonoid(std::size_t ambient_rank, std::vector<std::vector<std::int64_t>> generators,
                           std::int64_t membership_bound)
    : ambient_rank_(ambient_rank), generators_(std::move(generators)), membership_bound_(membership_bound) {
  if (membership_bound_ <= 0) raise(Errc::InvalidParams, "membership bound must be positive");
  for (const auto& g : generators_)
    if (g.size() != ambient_rank_) raise(Errc::ArityMismatch, "generator has wrong length");
  if (generators_.empty() && ambient_rank_ > 0) raise(Errc::InvalidParams, "monoid needs generators");
  // Standard basis e_1..e_d in some order: membership is the positive orthant.
  if (generators_.size() == ambient_rank_) {
    std::set<std::size_t> seen;
    bool ok = true;
    for (const auto& g : generators_) {
      std::size_t ones = 0, pos = 0;
      for (std::size_t j = 0; j < g.size(); ++j) {
        if (g[j] == 1) {
          ++ones;
          pos = j;
        } else if (g[j] != 0) {
          ok = false;
        }
      }
      if (ones != 1) ok = false;
      seen.insert(pos);
    }
    free_standard_ = ok && seen.size() == ambient_rank_;
  }
}

AffineMonoid AffineMonoid::free(std::size_t rank) {
  std::vector<std::vector<std::int64_t>> gens;
  for (std::size_t j = 0; j < rank; ++j) {
    std::vector<std::int64_t> e(rank, 0);
    e[j] = 1;
    gens.push_back(std::move(e));
  }
  return AffineMonoid(rank, std::move(gens));
}

AffineMonoid fine_pushout_rank1(std::int64_t p, std::int64_t n) {
  if (n < 2) raise(Errc::InvalidParams, "n must be >= 2");
  if (std::gcd(p, n) != 1)
    raise(Errc::ArgumentsNotCoprime, "gcd(" + std::to_string(n) + ", " + std::to_string(p) + ") != 1");
  return AffineMonoid(1, {{p}, {n}});
}

namespace {

std::int64_t dot(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
  std::int64_t s = 0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

struct MembershipSearch {
  const std::vector<std::vector<std::int64_t>>& gens;
  const std::vector<std::int64_t>* grading;
  std::int64_t budget;
  std::set<std::vector<std::int64_t>> dead;
  bool exhausted = false;

  bool run(const std::vector<std::int64_t>& v, std::int64_t depth) {
    if (std::all_of(v.begin(), v.end(), [](std::int64_t e) { return e == 0; })) return true;
    if (grading && dot(*grading, v) <= 0) return false;
    if (dead.count(v)) return false;
    if (depth >= budget) {
      exhausted = true;
      return false;
    }
    std::vector<std::int64_t> w(v.size());
    for (const auto& g : gens) {
      for (std::size_t j = 0; j < v.size(); ++j) w[j] = v[j] - g[j];
      if (run(w, depth + 1)) return true;
    }
    if (!exhausted) dead.insert(v);
    return false;
  }
};

}  // namespace

bool monoid_membership(const AffineMonoid& monoid, const std::vector<std::int64_t>& v) {
  if (v.size() != monoid.ambient_rank()) raise(Errc::ArityMismatch, "vector has wrong length");
  if (monoid.is_free_standard())
    return std::all_of(v.begin(), v.end(), [](std::int64_t e) { return e >= 0; });

  std::int64_t norm = 0;
  for (std::int64_t e : v) norm += e < 0 ? -e : e;
  if (norm > monoid.membership_bound())
    raise(Errc::BoundExceeded, "|v| exceeds the membership search bound");

  // A positive grading makes the search finite; otherwise cap the depth.
  std::vector<std::int64_t> ones(v.size(), 1);
  const auto& gens = monoid.generators();
  const bool graded = std::all_of(gens.begin(), gens.end(), [&](const auto& g) { return dot(ones, g) > 0; });
  MembershipSearch search{gens, graded ? &ones : nullptr, monoid.membership_bound(), {}, false};
  if (search.run(v, 0)) return true;
  if (search.exhausted) raise(Errc::BoundExceeded, "membership search hit its bound");
  return false;
}

// ---------------------------------------------------------------------------
// JSON

std::int64_t json_int(const nlohmann::json& j, const std::string& pointer) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_string()) {
    try {
      std::size_t used = 0;
      const std::string s = j.get<std::string>();
      const long long v = std::stoll(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
  }
  raise(Errc::SchemaError, "expected integer at " + pointer);
}

namespace {

std::vector<std::vector<std::int64_t>> json_rows(const nlohmann::json& j, const std::string& pointer) {
  if (!j.is_array()) raise(Errc::SchemaError, "expected array at " + pointer);
  std::vector<std::vector<std::int64_t>> rows;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string rp = pointer + "/" + std::to_string(i);
    if (!j[i].is_array()) raise(Errc::SchemaError, "expected array at " + rp);
    std::vector<std::int64_t> row;
    for (std::size_t k = 0; k < j[i].size(); ++k) row.push_back(json_int(j[i][k], rp + "/" + std::to_string(k)));
    if (!rows.empty() && row.size() != rows.front().size()) raise(Errc::SchemaError, "ragged rows at " + rp);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

nlohmann::json to_json(const AffineMonoid& monoid) {
  return {{"ambient_rank", monoid.ambient_rank()}, {"generators", monoid.generators()}};
}

nlohmann::json to_json(const LatticeMap& map) {
  return {{"matrix", map.matrix().to_int64()}};
}

AffineMonoid monoid_from_json(const nlohmann::json& j, const std::string& pointer) {
  if (!j.is_object()) raise(Errc::SchemaError, "expected object at " + pointer);
  if (!j.contains("ambient_rank")) raise(Errc::SchemaError, "missing " + pointer + "/ambient_rank");
  if (!j.contains("generators")) raise(Errc::SchemaError, "missing " + pointer + "/generators");
  const std::int64_t d = json_int(j["ambient_rank"], pointer + "/ambient_rank");
  if (d < 0) raise(Errc::SchemaError, "negative rank at " + pointer + "/ambient_rank");
  auto gens = json_rows(j["generators"], pointer + "/generators");
  std::int64_t bound = 256;
  if (j.contains("membership_bound")) bound = json_int(j["membership_bound"], pointer + "/membership_bound");
  try {
    return AffineMonoid(static_cast<std::size_t>(d), std::move(gens), bound);
  } catch (const Error& e) {
    raise(Errc::SchemaError, std::string(e.what()) + " at " + pointer);
  }
}

LatticeMap map_from_json(const nlohmann::json& j, const std::string& pointer) {
  if (!j.is_object() || !j.contains("matrix")) raise(Errc::SchemaError, "missing " + pointer + "/matrix");
  auto rows = json_rows(j["matrix"], pointer + "/matrix");
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  return LatticeMap(IntMatrix::from_rows(rows, cols));
}

IntMatrix parse_matrix(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    raise(Errc::SyntaxError, "matrix: " + std::string(e.what()));
  }
  auto rows = json_rows(j, "");
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  return IntMatrix::from_rows(rows, cols);
}

}  // namespace logdiff
