#pragma once

// Exact integer, modular and p-integral rational arithmetic, plus the
// level-m divided power combinatorics shared by every other module.

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "logdiff/error.hpp"

namespace logdiff {

using BigInt = mpz_class;
using BigRat = mpq_class;

bool is_prime(std::int64_t n) noexcept;

// (p, i+1, m): coefficients live in Z/p^(i+1)Z, divided powers of level m.
class RingParams {
 public:
  RingParams(std::int64_t p, int nilpotency, int level);

  std::int64_t p() const noexcept { return p_; }
  int nilpotency() const noexcept { return nilpotency_; }
  int level() const noexcept { return level_; }
  std::int64_t modulus() const noexcept { return modulus_; }
  std::int64_t p_pow_level() const noexcept { return p_pow_level_; }

  RingParams with_level(int level) const { return {p_, nilpotency_, level}; }

  bool operator==(const RingParams&) const = default;

 private:
  std::int64_t p_;
  int nilpotency_;
  int level_;
  std::int64_t modulus_;
  std::int64_t p_pow_level_;
};

// Residue modulo p^(i+1). Arithmetic requires equal moduli.
class ModInt {
 public:
  ModInt(std::int64_t value, std::int64_t modulus);
  ModInt(std::int64_t value, const RingParams& params)
      : ModInt(value, params.modulus()) {}

  std::int64_t residue() const noexcept { return residue_; }
  std::int64_t modulus() const noexcept { return modulus_; }
  bool is_zero() const noexcept { return residue_ == 0; }

  ModInt operator+(ModInt o) const;
  ModInt operator-(ModInt o) const;
  ModInt operator*(ModInt o) const;
  ModInt operator-() const { return {-residue_, modulus_}; }

  bool operator==(const ModInt&) const = default;

 private:
  std::int64_t residue_;
  std::int64_t modulus_;
};

std::ostream& operator<<(std::ostream& os, ModInt x);

// Element of Z_(p): reduced fraction with denominator prime to p.
class PRat {
 public:
  PRat(const BigRat& value, std::int64_t p);
  PRat(const BigInt& value, std::int64_t p) : PRat(BigRat(value), p) {}
  PRat(long value, std::int64_t p) : PRat(BigRat(value), p) {}

  const BigRat& value() const noexcept { return value_; }
  BigInt numerator() const { return value_.get_num(); }
  BigInt denominator() const { return value_.get_den(); }
  std::int64_t prime() const noexcept { return p_; }
  bool is_integer() const { return value_.get_den() == 1; }

  PRat operator+(const PRat& o) const;
  PRat operator-(const PRat& o) const;
  PRat operator*(const PRat& o) const;
  PRat operator-() const { return PRat(BigRat(-value_), p_); }

  bool operator==(const PRat& o) const { return value_ == o.value_; }

  std::string str() const { return value_.get_str(); }

 private:
  BigRat value_;
  std::int64_t p_;
};

// Tuple (k_1..k_r) of non-negative integers.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t arity) : entries_(arity, 0) {}
  explicit MultiIndex(std::vector<int> entries);
  MultiIndex(std::initializer_list<int> entries)
      : MultiIndex(std::vector<int>(entries)) {}

  static MultiIndex unit(std::size_t arity, std::size_t lambda);

  std::size_t arity() const noexcept { return entries_.size(); }
  int operator[](std::size_t i) const { return entries_[i]; }
  int& operator[](std::size_t i) { return entries_[i]; }
  int total() const noexcept;
  std::span<const int> entries() const noexcept { return entries_; }

  // Componentwise order.
  bool leq(const MultiIndex& o) const;

  MultiIndex operator+(const MultiIndex& o) const;
  MultiIndex operator-(const MultiIndex& o) const;

  // Lexicographic; see GradedOrder for the operator normal form.
  auto operator<=>(const MultiIndex&) const = default;
  bool operator==(const MultiIndex&) const = default;

  std::string str() const;

 private:
  std::vector<int> entries_;
};

// Ordering by (|k|, lex k).
struct GradedOrder {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    const int ta = a.total(), tb = b.total();
    if (ta != tb) return ta < tb;
    return a < b;
  }
};

// All multi-indices of given arity with |k| <= order, in graded order.
std::vector<MultiIndex> multi_indices_up_to(std::size_t arity, int order);
// All i with lo <= i <= hi componentwise.
std::vector<MultiIndex> box(const MultiIndex& lo, const MultiIndex& hi);

// Quotient of k by p^m, and q_k!.
std::int64_t level_quotient(std::int64_t k, std::int64_t p, int level);
BigInt qfact(std::int64_t k, const RingParams& params);
BigInt qfact(const MultiIndex& k, const RingParams& params);

BigInt binomial(std::int64_t n, std::int64_t k);
BigInt binomial(const MultiIndex& k, const MultiIndex& i);
BigInt factorial(std::int64_t n);

// {k over i} = q_k! / (q_i! q_{k-i}!), componentwise product.
BigInt brace_binom(const MultiIndex& k, const MultiIndex& i,
                   const RingParams& params);
// <k over i> = C(k,i) / {k over i}.
BigInt angle_binom(const MultiIndex& k, const MultiIndex& i,
                   const RingParams& params);

// The same value in Z_(p); it need not be an integer, e.g. <6 over 3> = 10/3
// at p = 2, m = 1.
BigRat angle_binom_exact(const MultiIndex& k, const MultiIndex& i, const RingParams& params);

// alpha (alpha-1) ... (alpha-k+1) / k!
PRat padic_binom(const PRat& alpha, std::int64_t k);

ModInt reduce(const PRat& x, const RingParams& params);
ModInt reduce(const BigInt& x, const RingParams& params);
std::int64_t reduce_residue(const BigInt& x, std::int64_t modulus);
std::int64_t reduce_residue(const BigRat& x, std::int64_t modulus);

std::int64_t mod_inverse(std::int64_t a, std::int64_t modulus);
std::int64_t p_valuation(const BigInt& x, std::int64_t p);

// Exact division asserting integrality.
BigInt exact_quotient(const BigInt& num, const BigInt& den);

// Residue tables for one coordinate, cached per (p, level, modulus).
// Values are computed exactly and reduced afterwards.
class CombTables {
 public:
  static const CombTables& get(const RingParams& params);

  const RingParams& params() const noexcept { return params_; }

  // {k over i} mod p^(i+1)
  std::int64_t brace(int k, int i) const;
  // Coefficient of d^<k> in d^<a> d^<b> (one coordinate).
  std::int64_t compose(int a, int b, int k) const;
  // Coefficient of d^<i> in the logarithmic transpose of d^<k>.
  std::int64_t transpose(int k, int i) const;

  explicit CombTables(const RingParams& params) : params_(params) {}

 private:
  void grow(int order);

  RingParams params_;
  std::vector<std::vector<std::int64_t>> brace_;
  std::vector<std::vector<std::int64_t>> transpose_;
  std::vector<std::vector<std::vector<std::int64_t>>> compose_;
};

// Composition coefficient in Z_(p)
// k!/((a+b-k)!(k-a)!(k-b)!) * q_a! q_b! / q_k!  (one coordinate).
BigRat compose_coefficient(int a, int b, int k, const RingParams& params);
// Exact transposition coefficient (-1)^k {k over i} q_{k-i}! C(k-1, k-i),
// with the k = 0 coordinate contributing the identity.
BigInt transpose_coefficient(int k, int i, const RingParams& params);

}  // namespace logdiff
