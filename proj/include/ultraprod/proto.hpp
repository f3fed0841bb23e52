#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ultraprod/filters.hpp"
#include "ultraprod/ultra.hpp"

namespace ultraprod {

/// A filtration of F_p[x]: polynomials of degree at most k, or with at most
/// k monomials. Products of step-k members lie in step growth(k).
struct FiltrationDescriptor {
  enum class Kind { DegreeAtMost, MonomialCountAtMost };

  Kind kind = Kind::DegreeAtMost;
  /// Optional cap on the step; absent means any finite step.
  std::optional<std::uint64_t> bound;

  static FiltrationDescriptor degree(std::optional<std::uint64_t> k = std::nullopt) {
    return {Kind::DegreeAtMost, k};
  }
  static FiltrationDescriptor monomial_count(std::optional<std::uint64_t> k = std::nullopt) {
    return {Kind::MonomialCountAtMost, k};
  }
  /// `deg`, `deg<=3`, `count`, `count<=2`.
  static FiltrationDescriptor parse(std::string_view text);

  /// 2k for degree, k^2 for monomial count.
  std::uint64_t growth(std::uint64_t k) const;
  std::string to_string() const;
};

/// One monomial c(p) x^e(p) of a sequence of polynomials.
struct SequenceTerm {
  ValueRule coefficient;
  ValueRule exponent;
};

/// A sequence (f_p) with f_p in F_p[x], presented either as finitely many
/// monomials with rule coefficients and exponents, or as the range sum
/// x^0 + ... + x^N(p). Its degree and monomial-count rules are read off the
/// presentation; monomials whose coefficient is eventually 0 do not count.
class BoundedPolySequence {
 public:
  /// Merges terms with equal exponent rules. Throws DomainError if an
  /// exponent rule is not a valid element of N^F.
  static BoundedPolySequence from_terms(std::vector<SequenceTerm> terms);
  static BoundedPolySequence range_sum(ValueRule upper);
  /// `x + (p-1)`, `(x+1)*(x+p)`, `x^[p]`, `sum(x^i, i=0..p)`. A trailing
  /// filtration suffix such as `/ deg<=1` is not part of this grammar; see
  /// parse_with_filtration.
  static BoundedPolySequence parse(std::string_view text);
  /// Splits an optional `/ deg<=k` or `/ count<=k` suffix.
  static std::pair<BoundedPolySequence, std::optional<FiltrationDescriptor>> parse_with_filtration(
      std::string_view text);

  bool is_range() const noexcept { return range_upper_.has_value(); }
  const std::vector<SequenceTerm>& terms() const noexcept { return terms_; }
  const std::optional<ValueRule>& range_upper() const noexcept { return range_upper_; }

  const ValueRule& degree_rule() const noexcept { return degree_rule_; }
  const ValueRule& count_rule() const noexcept { return count_rule_; }

  /// f_q as exponent -> nonzero coefficient mod q. Throws DomainError when
  /// the polynomial at q is too large to write out.
  std::map<std::uint64_t, std::uint64_t> at(std::uint64_t q) const;

  /// Index-wise sum and product. Range sums are expanded first, which
  /// requires a constant upper bound.
  friend BoundedPolySequence operator+(const BoundedPolySequence& a, const BoundedPolySequence& b);
  friend BoundedPolySequence operator*(const BoundedPolySequence& a, const BoundedPolySequence& b);

  std::string to_string() const;

 private:
  BoundedPolySequence() = default;
  std::vector<SequenceTerm> expanded() const;

  std::vector<SequenceTerm> terms_;
  std::optional<ValueRule> range_upper_;
  ValueRule degree_rule_;
  ValueRule count_rule_;
};

struct Membership {
  bool accepted = false;
  /// Least step containing the sequence, when accepted.
  std::uint64_t step = 0;
  std::string reason;
};

/// Accepts iff the rule governing the filtration is constant.
Membership membership_check(const BoundedPolySequence& seq, const FiltrationDescriptor& filtration);

/// A polynomial over the ultraproduct of the F_p: coefficients lowest degree
/// first, trailing coefficients equal to 0 removed.
class UltraPolynomial {
 public:
  /// Coefficients must live in Fp.
  UltraPolynomial(std::vector<UltraElement> coefficients, std::uint64_t bound);
  static UltraPolynomial zero() { return UltraPolynomial({}, 0); }

  const std::vector<UltraElement>& coefficients() const noexcept { return coefficients_; }
  /// Filtration step the value was constructed in.
  std::uint64_t bound() const noexcept { return bound_; }
  /// -1 for the zero polynomial.
  int degree() const noexcept { return static_cast<int>(coefficients_.size()) - 1; }
  UltraElement coefficient(std::size_t i) const;

  /// Display form over Q-coordinates, e.g. `x^2 - 1`.
  std::string to_string() const;
  /// `poly: (1)x^2 + ([(p - 1)]) over Fp / deg<=2`.
  std::string text_form() const;

 private:
  std::vector<UltraElement> coefficients_;
  std::uint64_t bound_ = 0;
};

UltraPolynomial poly_add(const UltraPolynomial& a, const UltraPolynomial& b);
UltraPolynomial poly_neg(const UltraPolynomial& a);
UltraPolynomial poly_mul(const UltraPolynomial& a, const UltraPolynomial& b);
/// Coefficient-wise equality under the filter.
Verdict poly_equal(const UltraPolynomial& a, const UltraPolynomial& b, const FilterSpec& filter);

/// Throws DomainError unless membership_check accepts under the degree
/// filtration.
UltraPolynomial degree_collapse(const BoundedPolySequence& seq);

struct MonoTerm {
  UltraElement coefficient;
  UltraNat exponent;
};

/// A finite sum of monomials c x^e with exponents in N^F, graded by N^F.
/// Terms are kept sorted by decreasing exponent, with pairwise distinct
/// exponents and coefficients not equal to 0.
class UltraMonomialSum {
 public:
  UltraMonomialSum(std::vector<MonoTerm> terms, std::uint64_t bound);
  static UltraMonomialSum monomial(UltraElement coefficient, UltraNat exponent);

  const std::vector<MonoTerm>& terms() const noexcept { return terms_; }
  std::uint64_t bound() const noexcept { return bound_; }

  /// `mono: [1]x^[p] + [-1] / count<=2`.
  std::string text_form() const;
  std::string to_string() const;

 private:
  std::vector<MonoTerm> terms_;
  std::uint64_t bound_ = 0;
};

UltraMonomialSum mono_add(const UltraMonomialSum& a, const UltraMonomialSum& b);
UltraMonomialSum mono_mul(const UltraMonomialSum& a, const UltraMonomialSum& b);
Verdict mono_equal(const UltraMonomialSum& a, const UltraMonomialSum& b, const FilterSpec& filter);

/// The exponent of a single monomial. Throws DomainError otherwise.
UltraNat grade(const UltraMonomialSum& m);

/// Collapse under the monomial-count filtration.
UltraMonomialSum count_collapse(const BoundedPolySequence& seq);

/// The embedding of F_F[x] as the constant-exponent part, and its inverse
/// (which throws DomainError on a non-constant exponent).
UltraMonomialSum to_monomial_sum(const UltraPolynomial& p);
UltraPolynomial to_polynomial(const UltraMonomialSum& m);

}  // namespace ultraprod
