#pragma once

// Monoid algebra (Z/p^(i+1)Z)[P] with a chosen log p-basis b_1..b_r.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "logdiff/arith.hpp"
#include "logdiff/monoids.hpp"

namespace logdiff {

using Exponent = std::vector<std::int64_t>;

struct ExponentHash {
  std::size_t operator()(const Exponent& v) const noexcept {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (std::int64_t e : v) h = (h ^ static_cast<std::size_t>(e)) * 0x100000001b3ULL;
    return h;
  }
};

// Finite sum of c_v x^v with residues c_v != 0, ordered lexicographically by v.
class AlgElem {
 public:
  using Terms = std::map<Exponent, std::int64_t>;

  AlgElem() = default;
  AlgElem(std::size_t dim, std::int64_t modulus) : dim_(dim), modulus_(modulus) {}

  static AlgElem constant(std::size_t dim, std::int64_t modulus, std::int64_t c);
  static AlgElem monomial(const Exponent& v, std::int64_t modulus, std::int64_t c = 1);

  std::size_t dim() const noexcept { return dim_; }
  std::int64_t modulus() const noexcept { return modulus_; }
  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }
  std::int64_t coefficient(const Exponent& v) const;
  // Constant coefficient (the x^0 term).
  std::int64_t constant_term() const { return coefficient(Exponent(dim_, 0)); }

  void add_term(const Exponent& v, std::int64_t c);

  AlgElem& operator+=(const AlgElem& o);
  AlgElem& operator-=(const AlgElem& o);
  AlgElem operator+(const AlgElem& o) const;
  AlgElem operator-(const AlgElem& o) const;
  AlgElem operator-() const;
  AlgElem operator*(const AlgElem& o) const;
  AlgElem scaled(std::int64_t c) const;
  // Multiply by x^v.
  AlgElem shifted(const Exponent& v) const;
  // f += c * g, the inner loop of every operator product.
  void add_scaled(const AlgElem& g, std::int64_t c);
  void add_product(const AlgElem& f, const AlgElem& g, std::int64_t c = 1);

  bool operator==(const AlgElem& o) const { return terms_ == o.terms_; }

  std::string str() const;

 private:
  void check(const AlgElem& o) const;

  std::size_t dim_ = 0;
  std::int64_t modulus_ = 1;
  Terms terms_;
};

// Unique alpha with phi * alpha = v over Z_(p).
struct ExponentVector {
  std::vector<PRat> alphas;
};

class Chart;
using ChartPtr = std::shared_ptr<const Chart>;

class Chart {
 public:
  Chart(RingParams params, AffineMonoid monoid, LatticeMap basis_map, bool group_mode);

  static ChartPtr make(RingParams params, AffineMonoid monoid, LatticeMap basis_map, bool group_mode);
  // P = N^r (or Z^r in group mode) with b_lambda = x_lambda.
  static ChartPtr identity(const RingParams& params, std::size_t rank, bool group_mode = false);
  // P = N^d with an arbitrary basis map (square, log etale).
  static ChartPtr free_with_map(const RingParams& params, const IntMatrix& map, bool group_mode = false);

  ChartPtr with_level(int level) const;

  const RingParams& params() const noexcept { return params_; }
  const AffineMonoid& monoid() const noexcept { return monoid_; }
  const LatticeMap& basis_map() const noexcept { return basis_map_; }
  bool group_mode() const noexcept { return group_mode_; }
  std::size_t rank() const noexcept { return basis_map_.source_rank(); }
  std::size_t ambient_rank() const noexcept { return basis_map_.target_rank(); }
  std::int64_t modulus() const noexcept { return params_.modulus(); }

  // Exponent of b_lambda, and of b^k = prod b_lambda^{k_lambda}.
  Exponent basis_exponent(std::size_t lambda) const;
  Exponent basis_power(const MultiIndex& k) const;

  bool contains(const Exponent& v) const;
  // Throws ExponentNotInMonoid.
  void validate(const AlgElem& f) const;

  AlgElem zero() const { return AlgElem(ambient_rank(), modulus()); }
  AlgElem one() const { return constant(1); }
  AlgElem constant(std::int64_t c) const { return AlgElem::constant(ambient_rank(), modulus(), c); }
  AlgElem monomial(const Exponent& v, std::int64_t c = 1) const;

  ExponentVector alpha(const Exponent& v) const;
  // q_k! prod_lambda C(alpha_lambda(v), k_lambda) mod p^(i+1): the eigenvalue
  // of d^<k> on x^v.
  std::int64_t log_eigen(const Exponent& v, const MultiIndex& k) const;
  // Same with alpha replaced by -alpha.
  std::int64_t log_eigen_negated(const Exponent& v, const MultiIndex& k) const;

  bool operator==(const Chart& o) const;

 private:
  struct EigenCache {
    ExponentVector alpha;
    std::vector<std::vector<std::int64_t>> values;   // [lambda][k]
    std::vector<std::vector<std::int64_t>> negated;  // [lambda][k]
  };
  const EigenCache& cache_entry(const Exponent& v, int order) const;

  RingParams params_;
  AffineMonoid monoid_;
  LatticeMap basis_map_;
  bool group_mode_;
  SnfResult snf_;

  mutable std::mutex mu_;
  mutable std::unordered_map<Exponent, EigenCache, ExponentHash> cache_;
};

ExponentVector exponent_alpha(const Chart& chart, const Exponent& v);

AlgElem alg_add(const AlgElem& f, const AlgElem& g);
AlgElem alg_mul(const AlgElem& f, const AlgElem& g);

// Inverse of c * x^v * (1 + g) with c a unit and g divisible by p.
AlgElem unit_inverse(const Chart& chart, const AlgElem& f);
bool is_unit(const Chart& chart, const AlgElem& f);

using AlgMatrix = std::vector<std::vector<AlgElem>>;

// Gauss-Jordan over O_X with unit pivots; throws NotInvertible.
AlgMatrix invert_matrix(const Chart& chart, AlgMatrix a);
AlgMatrix matrix_mul(const Chart& chart, const AlgMatrix& a, const AlgMatrix& b);
AlgMatrix identity_matrix(const Chart& chart, std::size_t n);

}  // namespace logdiff
