#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "ultraprod/definable_set.hpp"
#include "ultraprod/filters.hpp"
#include "ultraprod/formula.hpp"
#include "ultraprod/los.hpp"
#include "ultraprod/rational_poly.hpp"
#include "ultraprod/structures.hpp"

namespace ultraprod {

/// A sequence indexed by the primes: a rational polynomial in p, overridden
/// at finitely many primes by explicit values.
///
/// Exceptions that coincide with the polynomial are dropped, so two rules
/// are equal iff they denote the same sequence.
class ValueRule {
 public:
  ValueRule() = default;
  /// Throws DomainError if an exception key is not prime.
  explicit ValueRule(RationalPoly poly, std::map<std::uint64_t, mpq_class> exceptions = {});

  static ValueRule constant(const mpq_class& c) { return ValueRule(RationalPoly::constant(c)); }
  static ValueRule index() { return ValueRule(RationalPoly::indeterminate()); }

  /// `poly(p): (p^2 - 1)/2 ; except {2: 7}`; the `poly(p):` prefix and the
  /// exception clause are optional.
  static ValueRule parse(std::string_view text);

  const RationalPoly& poly() const noexcept { return poly_; }
  const std::map<std::uint64_t, mpq_class>& exceptions() const noexcept { return exceptions_; }

  /// The value at prime q.
  mpq_class at(std::uint64_t q) const;
  /// Primes where the value cannot be read off the polynomial modulo q:
  /// exception keys and divisors of the denominator.
  std::vector<std::uint64_t> special_primes() const;

  /// Same rule with `value` forced at `q`.
  ValueRule with_exception(std::uint64_t q, const mpq_class& value) const;

  ValueRule operator-() const;
  friend ValueRule operator+(const ValueRule& a, const ValueRule& b);
  friend ValueRule operator-(const ValueRule& a, const ValueRule& b);
  friend ValueRule operator*(const ValueRule& a, const ValueRule& b);
  friend bool operator==(const ValueRule&, const ValueRule&) = default;

  /// `(p^2 - 1)/2 ; except {2: 7}`.
  std::string to_string() const;
  /// The full literal form with the `poly(p):` prefix.
  std::string literal() const;

 private:
  template <typename Op>
  static ValueRule combine(const ValueRule& a, const ValueRule& b, Op op);

  RationalPoly poly_;
  std::map<std::uint64_t, mpq_class> exceptions_;
};

/// Reduction of a rational into Z/m: num * den^-1 when den is a unit mod m,
/// and 0 otherwise.
mpz_class reduce_mod(const mpq_class& value, const mpz_class& m);

/// The class [a_p] of a value rule in the ultraproduct of a family.
/// Supported families: Fp, Zp^k and Z/n. Rational values are read in each
/// ring through reduce_mod.
class UltraElement {
 public:
  /// Throws DomainError for a constant-table family.
  UltraElement(StructureFamily family, ValueRule rule);

  const StructureFamily& family() const noexcept { return family_; }
  const ValueRule& rule() const noexcept { return rule_; }

  /// Size of the ring at index q.
  mpz_class modulus_at(std::uint64_t q) const;
  /// Coordinate at q as a least residue.
  mpz_class value_at(std::uint64_t q) const;

  UltraElement operator-() const;
  /// Throw DomainError on family mismatch.
  friend UltraElement operator+(const UltraElement& a, const UltraElement& b);
  friend UltraElement operator-(const UltraElement& a, const UltraElement& b);
  friend UltraElement operator*(const UltraElement& a, const UltraElement& b);

  /// `[p - 1]@Fp`.
  std::string to_string() const;

 private:
  StructureFamily family_;
  ValueRule rule_;
};

/// Exact set of primes at which the coordinates of a and b agree.
DefinableSet agreement_set(const UltraElement& a, const UltraElement& b);

/// Equality in the ultraproduct over `filter`.
Verdict eq(const UltraElement& a, const UltraElement& b, const FilterSpec& filter);

struct Invertibility {
  Verdict verdict;
  /// An inverse, when the verdict is ForcedTrue and one is constructible in
  /// the rule class. Multiplying by it gives 1 at every prime where the
  /// element is a unit.
  std::optional<UltraElement> witness;
};

Invertibility is_invertible(const UltraElement& e, const FilterSpec& filter);

/// An element of the ultrapower Z^F given by an integer-valued rule.
class UltraInt {
 public:
  /// Throws DomainError unless the rule and its exceptions are integral.
  explicit UltraInt(ValueRule rule);

  const ValueRule& rule() const noexcept { return rule_; }
  mpz_class at(std::uint64_t q) const;

  UltraInt operator-() const { return UltraInt(-rule_); }
  friend UltraInt operator+(const UltraInt& a, const UltraInt& b) { return UltraInt(a.rule_ + b.rule_); }
  friend UltraInt operator-(const UltraInt& a, const UltraInt& b) { return UltraInt(a.rule_ - b.rule_); }
  friend UltraInt operator*(const UltraInt& a, const UltraInt& b) { return UltraInt(a.rule_ * b.rule_); }
  friend bool operator==(const UltraInt&, const UltraInt&) = default;

  std::string to_string() const;

 private:
  ValueRule rule_;
};

/// An element of the ultrapower N^F: integer-valued and eventually
/// non-negative.
class UltraNat {
 public:
  /// Throws DomainError if the rule is not integer-valued, is eventually
  /// negative, or has a negative exception.
  explicit UltraNat(ValueRule rule);

  const ValueRule& rule() const noexcept { return rule_; }
  mpz_class at(std::uint64_t q) const;
  UltraInt as_int() const { return UltraInt(rule_); }

  friend UltraNat operator+(const UltraNat& a, const UltraNat& b) { return UltraNat(a.rule_ + b.rule_); }
  friend UltraNat operator*(const UltraNat& a, const UltraNat& b) { return UltraNat(a.rule_ * b.rule_); }
  friend bool operator==(const UltraNat&, const UltraNat&) = default;

  std::string to_string() const;

 private:
  ValueRule rule_;
};

struct ResidueMap {
  std::uint64_t modulus = 0;
  /// The value mod `modulus` is a function of p mod `class_modulus`.
  std::uint64_t class_modulus = 0;
  /// Unit class mod class_modulus -> residue mod modulus, over the classes
  /// the filter can still see.
  std::vector<std::pair<std::uint64_t, std::uint64_t>> table;
  /// Set when every visible class agrees.
  std::optional<std::uint64_t> forced;
  Provenance provenance;
};

/// Image of e under Z^F -> Z/n. Requires n >= 2.
ResidueMap residue(const UltraInt& e, std::uint64_t n, const FilterSpec& filter);

enum class Ordering { Less, Equal, Greater };
std::string_view to_string(Ordering o);

struct Comparison {
  Ordering order = Ordering::Equal;
  /// The order holds at every prime above this bound.
  mpz_class threshold;
  Provenance provenance;
};

/// Order in N^F under any non-principal ultrafilter. Always forced: the
/// difference of two polynomials has eventually constant sign.
Comparison compare(const UltraNat& a, const UltraNat& b);

/// The constant value when the rule is bounded, i.e. of degree 0.
std::optional<mpz_class> constant_detect(const UltraNat& a);

using ElementAssignment = std::map<std::string, UltraElement>;

/// Truth of a formula with free variables interpreted by elements.
Verdict eval_with_params(const StructureFamily& family, const Formula& formula,
                         const ElementAssignment& env, const FilterSpec& filter,
                         std::uint64_t window, const LosOptions& options = {});

}  // namespace ultraprod
