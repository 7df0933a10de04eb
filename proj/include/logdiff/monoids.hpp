#pragma once

// Integer lattice algebra for fine monoids and chart maps.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "logdiff/arith.hpp"

namespace logdiff {

class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  IntMatrix(std::initializer_list<std::initializer_list<long>> rows);
  static IntMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows, std::size_t cols);
  static IntMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  BigInt& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const BigInt& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  IntMatrix operator*(const IntMatrix& o) const;
  std::vector<BigInt> apply(const std::vector<BigInt>& v) const;
  IntMatrix transposed() const;
  bool operator==(const IntMatrix& o) const;

  // Square matrices only (fraction-free elimination).
  BigInt determinant() const;
  bool is_diagonal() const;

  std::vector<std::vector<std::int64_t>> to_int64() const;
  std::string str() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<BigInt> data_;
};

// Column lambda is the exponent vector of b_lambda; Z^r -> Z^d.
class LatticeMap {
 public:
  LatticeMap() = default;
  explicit LatticeMap(IntMatrix matrix) : matrix_(std::move(matrix)) {}

  const IntMatrix& matrix() const noexcept { return matrix_; }
  std::size_t source_rank() const noexcept { return matrix_.cols(); }
  std::size_t target_rank() const noexcept { return matrix_.rows(); }

  bool operator==(const LatticeMap&) const = default;

 private:
  IntMatrix matrix_;
};

struct SnfResult {
  std::vector<BigInt> divisors;  // nonzero diagonal entries d_1 | d_2 | ...
  IntMatrix left;                // L
  IntMatrix right;               // R,  L * A * R = diag(divisors, 0...)
  IntMatrix diagonal;
};

SnfResult smith_normal_form(const LatticeMap& map);

struct CokerInvariants {
  std::size_t free_rank = 0;
  std::vector<BigInt> torsion;  // d_j > 1
};

CokerInvariants coker_invariants(const LatticeMap& map);

struct EtaleDecision {
  bool log_etale = false;
  bool kernel_trivial = false;
  std::optional<BigInt> coker_order;  // empty means infinite
};

// For a map out of a free group every finite kernel is zero, so the test is
// "zero kernel, finite cokernel of order prime to p".
EtaleDecision is_log_etale_chart(const LatticeMap& phi, std::int64_t p);

struct BezoutSplit {
  std::vector<BigInt> y;
  std::vector<BigInt> x;
};

// x0 = phi(y) + p * x.
BezoutSplit bezout_split(const std::vector<BigInt>& x0, const LatticeMap& phi, std::int64_t p);

std::int64_t rank1_saturation(const std::vector<std::int64_t>& gens);

class AffineMonoid {
 public:
  AffineMonoid(std::size_t ambient_rank, std::vector<std::vector<std::int64_t>> generators,
               std::int64_t membership_bound = 256);
  static AffineMonoid free(std::size_t rank);

  std::size_t ambient_rank() const noexcept { return ambient_rank_; }
  const std::vector<std::vector<std::int64_t>>& generators() const noexcept { return generators_; }
  std::int64_t membership_bound() const noexcept { return membership_bound_; }
  bool is_free_standard() const noexcept { return free_standard_; }

  bool operator==(const AffineMonoid& o) const {
    return ambient_rank_ == o.ambient_rank_ && generators_ == o.generators_;
  }

 private:
  std::size_t ambient_rank_;
  std::vector<std::vector<std::int64_t>> generators_;
  std::int64_t membership_bound_;
  bool free_standard_ = false;
};

// Fine pushout of N <-(p)- N -(n)-> N: the submonoid <p, n> of N.
AffineMonoid fine_pushout_rank1(std::int64_t p, std::int64_t n);

bool monoid_membership(const AffineMonoid& monoid, const std::vector<std::int64_t>& v);

// JSON: {"ambient_rank": d, "generators": [[...]]}, {"matrix": [[...]]}.
nlohmann::json to_json(const AffineMonoid& monoid);
nlohmann::json to_json(const LatticeMap& map);
AffineMonoid monoid_from_json(const nlohmann::json& j, const std::string& pointer = "");
LatticeMap map_from_json(const nlohmann::json& j, const std::string& pointer = "");
IntMatrix parse_matrix(const std::string& text);
// Integer given as a JSON number or a decimal string.
std::int64_t json_int(const nlohmann::json& j, const std::string& pointer);

}  // namespace logdiff
