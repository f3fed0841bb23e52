#include "ultraprod/rational_poly.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "ultraprod/errors.hpp"

namespace ultraprod {
namespace {

constexpr unsigned long kMaxExponent = 64;
// Integer-valuedness is checked over every unit residue of the denominator.
const mpz_class kMaxCheckedDenominator = 1'000'000;

class PolyParser {
 public:
  explicit PolyParser(std::string_view text) : text_(text) {}

  RationalPoly parse() {
    RationalPoly result = sum();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return result;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError("rule expression: " + message, pos_);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])) != 0) ++pos_;
  }

  bool at(char c) {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool accept(char c) {
    if (!at(c)) return false;
    ++pos_;
    return true;
  }

  mpz_class integer() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])) != 0) ++pos_;
    if (start == pos_) fail("expected integer");
    return mpz_class(std::string(text_.substr(start, pos_ - start)));
  }

  RationalPoly sum() {
    RationalPoly acc = product();
    for (;;) {
      if (accept('+')) {
        acc = acc + product();
      } else if (accept('-')) {
        acc = acc - product();
      } else {
        return acc;
      }
    }
  }

  RationalPoly product() {
    RationalPoly acc = unary();
    for (;;) {
      if (accept('*')) {
        acc = acc * unary();
      } else if (accept('/')) {
        std::size_t at_divisor = pos_;
        RationalPoly divisor = unary();
        if (divisor.degree() != 0) {
          pos_ = at_divisor;
          fail("can only divide by a nonzero constant");
        }
        acc = acc * RationalPoly::constant(1 / divisor.coefficient(0));
      } else if (at('p') || at('(')) {
        acc = acc * unary();
      } else {
        return acc;
      }
    }
  }

  RationalPoly unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    RationalPoly base = atom();
    if (accept('^')) {
      mpz_class e = integer();
      if (e > kMaxExponent) fail("exponent too large");
      RationalPoly acc = RationalPoly::constant(1);
      for (unsigned long i = 0; i < e.get_ui(); ++i) acc = acc * base;
      return acc;
    }
    return base;
  }

  RationalPoly atom() {
    if (accept('(')) {
      RationalPoly inner = sum();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (accept('p')) {
      if (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) != 0)) {
        fail("unknown identifier");
      }
      return RationalPoly::indeterminate();
    }
    if (at('0') || (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])) != 0)) {
      return RationalPoly::constant(mpq_class(integer()));
    }
    fail("expected 'p', an integer or '('");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string monomial(const mpz_class& magnitude, std::size_t power) {
  std::string out;
  if (power == 0) return magnitude.get_str();
  if (magnitude != 1) out = magnitude.get_str();
  out += "p";
  if (power > 1) out += "^" + std::to_string(power);
  return out;
}

}  // namespace

RationalPoly::RationalPoly(std::vector<mpz_class> numerator, mpz_class denominator)
    : numerator_(std::move(numerator)), denominator_(std::move(denominator)) {
  normalize();
}

void RationalPoly::normalize() {
  if (denominator_ == 0) throw DomainError("zero denominator");
  while (!numerator_.empty() && numerator_.back() == 0) numerator_.pop_back();
  if (numerator_.empty()) {
    denominator_ = 1;
    return;
  }
  if (denominator_ < 0) {
    denominator_ = -denominator_;
    for (auto& c : numerator_) c = -c;
  }
  mpz_class g = denominator_;
  for (const auto& c : numerator_) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  if (g != 1) {
    denominator_ /= g;
    for (auto& c : numerator_) c /= g;
  }
}

RationalPoly RationalPoly::constant(const mpq_class& c) {
  return RationalPoly({c.get_num()}, c.get_den());
}

RationalPoly RationalPoly::indeterminate() { return RationalPoly({0, 1}, 1); }

RationalPoly RationalPoly::from_coefficients(const std::vector<mpq_class>& coefficients) {
  mpz_class common = 1;
  for (const auto& c : coefficients) mpz_lcm(common.get_mpz_t(), common.get_mpz_t(), c.get_den_mpz_t());
  std::vector<mpz_class> numerator;
  numerator.reserve(coefficients.size());
  for (const auto& c : coefficients) numerator.push_back(c.get_num() * (common / c.get_den()));
  return RationalPoly(std::move(numerator), common);
}

mpq_class RationalPoly::coefficient(std::size_t i) const {
  if (i >= numerator_.size()) return 0;
  mpq_class c(numerator_[i], denominator_);
  c.canonicalize();
  return c;
}

int RationalPoly::leading_sign() const noexcept {
  return numerator_.empty() ? 0 : sgn(numerator_.back());
}

mpz_class RationalPoly::numerator_at(const mpz_class& x) const {
  mpz_class acc = 0;
  for (auto it = numerator_.rbegin(); it != numerator_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

mpq_class RationalPoly::operator()(const mpz_class& x) const {
  mpq_class v(numerator_at(x), denominator_);
  v.canonicalize();
  return v;
}

bool RationalPoly::is_integer_valued() const {
  if (denominator_ == 1) return true;
  if (denominator_ > kMaxCheckedDenominator) {
    throw DomainError("denominator " + denominator_.get_str() + " too large to check integrality");
  }
  // Primes avoiding the denominator meet every unit residue class of it.
  const unsigned long d = denominator_.get_ui();
  for (unsigned long r = 0; r < d; ++r) {
    mpz_class g;
    mpz_gcd_ui(g.get_mpz_t(), mpz_class(r).get_mpz_t(), d);
    if (g != 1) continue;
    if (mpz_divisible_ui_p(numerator_at(r).get_mpz_t(), d) == 0) return false;
  }
  return true;
}

mpz_class RationalPoly::sign_threshold() const {
  if (numerator_.size() <= 1) return 0;
  const mpz_class& lead = numerator_.back();
  mpz_class bound = 0;
  for (std::size_t i = 0; i + 1 < numerator_.size(); ++i) {
    mpz_class q;
    mpz_class a = abs(numerator_[i]);
    mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), mpz_class(abs(lead)).get_mpz_t());
    bound = std::max(bound, q);
  }
  return bound + 1;
}

RationalPoly RationalPoly::operator-() const {
  RationalPoly out = *this;
  for (auto& c : out.numerator_) c = -c;
  return out;
}

RationalPoly operator+(const RationalPoly& a, const RationalPoly& b) {
  mpz_class common;
  mpz_lcm(common.get_mpz_t(), a.denominator_.get_mpz_t(), b.denominator_.get_mpz_t());
  const mpz_class fa = common / a.denominator_;
  const mpz_class fb = common / b.denominator_;
  std::vector<mpz_class> out(std::max(a.numerator_.size(), b.numerator_.size()));
  for (std::size_t i = 0; i < a.numerator_.size(); ++i) out[i] += a.numerator_[i] * fa;
  for (std::size_t i = 0; i < b.numerator_.size(); ++i) out[i] += b.numerator_[i] * fb;
  return RationalPoly(std::move(out), common);
}

RationalPoly operator-(const RationalPoly& a, const RationalPoly& b) { return a + (-b); }

RationalPoly operator*(const RationalPoly& a, const RationalPoly& b) {
  if (a.is_zero() || b.is_zero()) return RationalPoly();
  std::vector<mpz_class> out(a.numerator_.size() + b.numerator_.size() - 1);
  for (std::size_t i = 0; i < a.numerator_.size(); ++i) {
    for (std::size_t j = 0; j < b.numerator_.size(); ++j) out[i + j] += a.numerator_[i] * b.numerator_[j];
  }
  return RationalPoly(std::move(out), a.denominator_ * b.denominator_);
}

RationalPoly RationalPoly::parse(std::string_view text) { return PolyParser(text).parse(); }

std::string RationalPoly::to_string() const {
  if (numerator_.empty()) return "0";
  std::ostringstream out;
  std::size_t terms = 0;
  for (std::size_t i = numerator_.size(); i-- > 0;) {
    const mpz_class& c = numerator_[i];
    if (c == 0) continue;
    if (terms == 0) {
      if (c < 0) out << "-";
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    out << monomial(abs(c), i);
    ++terms;
  }
  if (denominator_ == 1) return out.str();
  if (terms == 1) return out.str() + "/" + denominator_.get_str();
  return "(" + out.str() + ")/" + denominator_.get_str();
}

}  // namespace ultraprod
