#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace ultraprod {

/// Elements of a finite ring are encoded as 0..size()-1.
using Element = std::uint32_t;

/// Largest structure materialize() will build unless told otherwise.
inline constexpr std::uint64_t kDefaultSizeCap = 1ULL << 30;

/// A finite commutative ring, either Z/n with modular arithmetic or an
/// explicit pair of operation tables. Immutable.
class FiniteRing {
 public:
  /// Z/n for 1 <= n <= 2^31.
  static FiniteRing modular(std::uint64_t n);
  /// Tables are row-major size*size. No axioms are checked here; see
  /// ring_selfcheck.
  static FiniteRing from_tables(std::vector<std::vector<Element>> add,
                                std::vector<std::vector<Element>> mul, Element zero,
                                Element one);

  std::uint64_t size() const noexcept { return size_; }
  bool is_modular() const noexcept { return tables_ == nullptr; }
  Element zero() const noexcept { return zero_; }
  Element one() const noexcept { return one_; }

  Element add(Element a, Element b) const noexcept {
    if (!tables_) {
      std::uint64_t s = static_cast<std::uint64_t>(a) + b;
      return static_cast<Element>(s >= size_ ? s - size_ : s);
    }
    return tables_->add[static_cast<std::size_t>(a) * size_ + b];
  }

  Element mul(Element a, Element b) const noexcept {
    if (!tables_) return static_cast<Element>(static_cast<std::uint64_t>(a) * b % size_);
    return tables_->mul[static_cast<std::size_t>(a) * size_ + b];
  }

  Element neg(Element a) const noexcept {
    if (!tables_) return a == 0 ? 0 : static_cast<Element>(size_ - a);
    return tables_->neg[a];
  }

  /// Image of the integer n under Z -> R.
  Element from_integer(const mpz_class& n) const;

  /// `Z/n` or `const:{...}` style description.
  std::string describe() const;
  const std::vector<Element>* add_table() const { return tables_ ? &tables_->add : nullptr; }
  const std::vector<Element>* mul_table() const { return tables_ ? &tables_->mul : nullptr; }

 private:
  struct Tables {
    std::vector<Element> add;
    std::vector<Element> mul;
    std::vector<Element> neg;
  };

  std::uint64_t size_ = 1;
  Element zero_ = 0;
  Element one_ = 0;
  std::shared_ptr<const Tables> tables_;
};

struct RingViolation {
  std::string law;
  std::vector<Element> witness;
};

/// Exhaustive check of the commutative ring axioms. Requires size() <= 512.
std::optional<RingViolation> ring_selfcheck(const FiniteRing& ring);

/// A family of finite rings indexed by the primes.
///
/// Text forms: `Fp`, `Z/12`, `Zp^2`, `const:Z/3`, and
/// `const:{"add":[[...]],"mul":[[...]],"zero":0,"one":1}`.
class StructureFamily {
 public:
  enum class Kind { PrimeField, ModRing, TruncatedPadic, ConstantFinite };

  static StructureFamily prime_field();
  static StructureFamily mod_ring(std::uint64_t n);
  /// Z/p^k, standing in for the p-adic integers truncated at precision k.
  static StructureFamily truncated_padic(unsigned precision);
  /// Throws DomainError if the tables fail ring_selfcheck.
  static StructureFamily constant(FiniteRing ring);
  static StructureFamily parse(std::string_view text);

  Kind kind() const noexcept { return kind_; }
  /// Modulus for ModRing, precision for TruncatedPadic.
  std::uint64_t parameter() const noexcept { return parameter_; }
  bool depends_on_index() const noexcept {
    return kind_ == Kind::PrimeField || kind_ == Kind::TruncatedPadic;
  }
  /// Size of the ring at prime p, or nullopt if it does not fit in 64 bits.
  std::optional<std::uint64_t> size_at(std::uint64_t p) const;

  /// Throws DomainError if p is not prime, CapExceeded if the ring at p
  /// would be larger than `size_cap`.
  FiniteRing materialize(std::uint64_t p, std::uint64_t size_cap = kDefaultSizeCap) const;

  std::string to_string() const;
  /// Caveat attached to every report about this family, or empty.
  std::string note() const;

  friend bool operator==(const StructureFamily& a, const StructureFamily& b);

 private:
  Kind kind_ = Kind::PrimeField;
  std::uint64_t parameter_ = 0;
  std::optional<FiniteRing> constant_;
};

}  // namespace ultraprod
