#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace ultraprod {

/// Polynomial in one indeterminate with rational coefficients, stored as an
/// integer numerator polynomial over a positive common denominator with
/// gcd(content, denominator) = 1.
class RationalPoly {
 public:
  RationalPoly() = default;
  static RationalPoly constant(const mpq_class& c);
  /// The indeterminate itself.
  static RationalPoly indeterminate();
  static RationalPoly from_coefficients(const std::vector<mpq_class>& coefficients);

  /// Numerator coefficients, lowest degree first, no trailing zeros.
  const std::vector<mpz_class>& numerator() const noexcept { return numerator_; }
  const mpz_class& denominator() const noexcept { return denominator_; }

  bool is_zero() const noexcept { return numerator_.empty(); }
  /// -1 for the zero polynomial.
  int degree() const noexcept { return static_cast<int>(numerator_.size()) - 1; }
  mpq_class coefficient(std::size_t i) const;
  /// Sign of the leading coefficient; 0 for the zero polynomial.
  int leading_sign() const noexcept;
  /// Numerator evaluated at x, before division by the denominator.
  mpz_class numerator_at(const mpz_class& x) const;
  mpq_class operator()(const mpz_class& x) const;

  /// f(q) is an integer at every prime q not dividing the denominator.
  bool is_integer_valued() const;
  /// Some T with sign(f(x)) = leading_sign() for every integer x > T.
  mpz_class sign_threshold() const;

  RationalPoly operator-() const;
  friend RationalPoly operator+(const RationalPoly& a, const RationalPoly& b);
  friend RationalPoly operator-(const RationalPoly& a, const RationalPoly& b);
  friend RationalPoly operator*(const RationalPoly& a, const RationalPoly& b);
  friend bool operator==(const RationalPoly& a, const RationalPoly& b) {
    return a.numerator_ == b.numerator_ && a.denominator_ == b.denominator_;
  }

  /// Parses an expression in `p` built from integers, + - * ^ and division
  /// by nonzero constants, e.g. `(p^2 - 1)/2` or `3p + 1`.
  static RationalPoly parse(std::string_view text);

  /// Canonical text in `p`, e.g. `(p^2 - 1)/2`, `-1`, `1/2`.
  std::string to_string() const;

 private:
  RationalPoly(std::vector<mpz_class> numerator, mpz_class denominator);
  void normalize();

  std::vector<mpz_class> numerator_;
  mpz_class denominator_ = 1;
};

}  // namespace ultraprod
