#include "ultraprod/proto.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "ultraprod/errors.hpp"

namespace ultraprod {
namespace {

constexpr std::uint64_t kMaxExpandedDegree = 1'000'000;

const StructureFamily& fp() {
  static const StructureFamily family = StructureFamily::prime_field();
  return family;
}

UltraElement fp_element(const ValueRule& rule) { return UltraElement(fp(), rule); }

bool eventually_zero(const UltraElement& e) {
  return eq(e, fp_element(ValueRule()), FilterSpec::generic()).value == Truth::ForcedTrue;
}

bool eventually_zero(const ValueRule& coefficient) { return eventually_zero(fp_element(coefficient)); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())) != 0) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())) != 0) s.remove_suffix(1);
  return s;
}

// The rational c with [rule] = [c] in the ultraproduct of the F_p.
mpq_class display_constant(const UltraElement& e) {
  const RationalPoly& poly = e.rule().poly();
  mpq_class c(poly.is_zero() ? mpz_class(0) : poly.numerator()[0], poly.denominator());
  c.canonicalize();
  return c;
}

std::string x_power(std::uint64_t i) {
  if (i == 0) return "";
  if (i == 1) return "x";
  return "x^" + std::to_string(i);
}

void require_fp(const UltraElement& e) {
  if (!(e.family() == fp())) throw DomainError("coefficient " + e.to_string() + " is not over Fp");
}

class SequenceParser {
 public:
  explicit SequenceParser(std::string_view text) : text_(text) {}

  BoundedPolySequence parse() {
    skip_space();
    if (accept_word("sum")) {
      BoundedPolySequence out = range();
      finish();
      return out;
    }
    auto terms = sum();
    finish();
    return BoundedPolySequence::from_terms(std::move(terms));
  }

 private:
  using Terms = std::vector<SequenceTerm>;

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError("sequence: " + message, pos_);
  }

  void finish() {
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
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

  void expect(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) != token) fail("expected '" + std::string(token) + "'");
    pos_ += token.size();
  }

  bool accept_word(std::string_view word) {
    skip_space();
    if (text_.substr(pos_, word.size()) != word) return false;
    const std::size_t end = pos_ + word.size();
    if (end < text_.size() && std::isalnum(static_cast<unsigned char>(text_[end])) != 0) return false;
    pos_ = end;
    return true;
  }

  // Rule text up to the bracket that closes at the current depth.
  ValueRule rule_until(char close) {
    const std::size_t start = pos_;
    int depth = 0;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '(' || c == '[') ++depth;
      if (c == ')' || c == ']') {
        if (depth == 0) break;
        --depth;
      }
      ++pos_;
    }
    if (pos_ == text_.size() || text_[pos_] != close) fail(std::string("expected '") + close + "'");
    try {
      ValueRule rule = ValueRule::parse(text_.substr(start, pos_ - start));
      ++pos_;
      return rule;
    } catch (const ParseError& e) {
      throw ParseError(e.detail(), start + e.position());
    }
  }

  BoundedPolySequence range() {
    expect("(");
    expect("x");
    expect("^");
    expect("i");
    expect(",");
    expect("i");
    expect("=");
    expect("0");
    expect("..");
    skip_space();
    return BoundedPolySequence::range_sum(rule_until(')'));
  }

  static Terms negate(Terms t) {
    for (auto& term : t) term.coefficient = -term.coefficient;
    return t;
  }

  static Terms multiply(const Terms& a, const Terms& b) {
    Terms out;
    for (const auto& s : a) {
      for (const auto& t : b) out.push_back({s.coefficient * t.coefficient, s.exponent + t.exponent});
    }
    return out;
  }

  static std::optional<mpq_class> as_constant(const Terms& t) {
    mpq_class c = 0;
    for (const auto& term : t) {
      if (term.exponent.poly().degree() > 0 || term.coefficient.poly().degree() > 0) return std::nullopt;
      if (!term.exponent.poly().is_zero()) return std::nullopt;
      c += term.coefficient.poly().coefficient(0);
    }
    return c;
  }

  static bool is_x(const Terms& t) {
    return t.size() == 1 && t[0].coefficient == ValueRule::constant(1) && t[0].exponent == ValueRule::constant(1);
  }

  bool filtration_suffix_follows() {
    std::size_t look = pos_ + 1;
    while (look < text_.size() && std::isspace(static_cast<unsigned char>(text_[look])) != 0) ++look;
    auto rest = text_.substr(look);
    return rest.substr(0, 3) == "deg" || rest.substr(0, 5) == "count";
  }

  Terms sum() {
    Terms acc = product();
    for (;;) {
      if (accept('+')) {
        auto rhs = product();
        acc.insert(acc.end(), rhs.begin(), rhs.end());
      } else if (accept('-')) {
        auto rhs = negate(product());
        acc.insert(acc.end(), rhs.begin(), rhs.end());
      } else {
        return acc;
      }
    }
  }

  Terms product() {
    Terms acc = unary();
    for (;;) {
      if (accept('*')) {
        acc = multiply(acc, unary());
      } else if (at('/') && !filtration_suffix_follows()) {
        ++pos_;
        const std::size_t where = pos_;
        auto c = as_constant(unary());
        if (!c || *c == 0) {
          pos_ = where;
          fail("can only divide by a nonzero constant");
        }
        acc = multiply(acc, {{ValueRule::constant(1 / *c), ValueRule()}});
      } else if (at('x') || at('p') || at('(')) {
        acc = multiply(acc, unary());
      } else {
        return acc;
      }
    }
  }

  Terms unary() {
    if (accept('-')) return negate(unary());
    Terms base = atom();
    if (!accept('^')) return base;
    if (accept('[')) {
      if (!is_x(base)) fail("only x can be raised to a rule exponent");
      return {{ValueRule::constant(1), rule_until(']')}};
    }
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])) != 0) ++pos_;
    if (start == pos_) fail("expected an exponent");
    const unsigned long n = std::stoul(std::string(text_.substr(start, pos_ - start)));
    if (is_x(base)) return {{ValueRule::constant(1), ValueRule::constant(n)}};
    if (n > 64) fail("exponent too large");
    Terms acc{{ValueRule::constant(1), ValueRule()}};
    for (unsigned long i = 0; i < n; ++i) acc = multiply(acc, base);
    return acc;
  }

  Terms atom() {
    if (accept('(')) {
      Terms inner = sum();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (accept_word("x")) return {{ValueRule::constant(1), ValueRule::constant(1)}};
    if (accept_word("p")) return {{ValueRule::index(), ValueRule()}};
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])) != 0) ++pos_;
    if (start == pos_) fail("expected x, p, an integer or '('");
    return {{ValueRule::constant(mpq_class(mpz_class(std::string(text_.substr(start, pos_ - start))))),
             ValueRule()}};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

// ------------------------------------------------------------- filtrations

FiltrationDescriptor FiltrationDescriptor::parse(std::string_view text) {
  std::string_view t = trim(text);
  FiltrationDescriptor out;
  if (t.substr(0, 3) == "deg") {
    t.remove_prefix(t.substr(0, 6) == "degree" ? 6 : 3);
    out.kind = Kind::DegreeAtMost;
  } else if (t.substr(0, 5) == "count") {
    t.remove_prefix(5);
    out.kind = Kind::MonomialCountAtMost;
  } else {
    throw ParseError("expected 'deg' or 'count'", 0);
  }
  t = trim(t);
  if (t.empty()) return out;
  const std::size_t offset = static_cast<std::size_t>(t.data() - text.data());
  if (t.substr(0, 2) != "<=") throw ParseError("expected '<='", offset);
  t = trim(t.substr(2));
  if (t.empty() || !std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; })) {
    throw ParseError("expected a step number", offset + 2);
  }
  out.bound = std::stoull(std::string(t));
  return out;
}

std::uint64_t FiltrationDescriptor::growth(std::uint64_t k) const {
  return kind == Kind::DegreeAtMost ? 2 * k : k * k;
}

std::string FiltrationDescriptor::to_string() const {
  std::string out = kind == Kind::DegreeAtMost ? "deg" : "count";
  if (bound) out += "<=" + std::to_string(*bound);
  return out;
}

// ---------------------------------------------------------------- sequences

BoundedPolySequence BoundedPolySequence::from_terms(std::vector<SequenceTerm> terms) {
  BoundedPolySequence out;
  for (auto& term : terms) {
    ValueRule exponent = UltraNat(term.exponent).rule();
    auto same = std::find_if(out.terms_.begin(), out.terms_.end(),
                             [&](const SequenceTerm& t) { return t.exponent == exponent; });
    if (same != out.terms_.end()) {
      same->coefficient = same->coefficient + term.coefficient;
    } else {
      out.terms_.push_back({term.coefficient, exponent});
    }
  }

  // Degree and count come from the exponents that survive in the limit.
  std::vector<std::pair<RationalPoly, ValueRule>> groups;
  for (const auto& term : out.terms_) {
    auto g = std::find_if(groups.begin(), groups.end(),
                          [&](const auto& entry) { return entry.first == term.exponent.poly(); });
    if (g == groups.end()) {
      groups.emplace_back(term.exponent.poly(), term.coefficient);
    } else {
      g->second = g->second + term.coefficient;
    }
  }
  std::optional<UltraNat> top;
  std::uint64_t count = 0;
  for (const auto& [exponent, coefficient] : groups) {
    if (eventually_zero(coefficient)) continue;
    ++count;
    UltraNat e{ValueRule(exponent)};
    if (!top || compare(e, *top).order == Ordering::Greater) top = e;
  }
  out.degree_rule_ = top ? ValueRule(top->rule().poly()) : ValueRule();
  out.count_rule_ = ValueRule::constant(count);
  return out;
}

BoundedPolySequence BoundedPolySequence::range_sum(ValueRule upper) {
  BoundedPolySequence out;
  UltraNat n(upper);
  out.range_upper_ = n.rule();
  out.degree_rule_ = ValueRule(n.rule().poly());
  out.count_rule_ = ValueRule(n.rule().poly() + RationalPoly::constant(1));
  return out;
}

BoundedPolySequence BoundedPolySequence::parse(std::string_view text) { return SequenceParser(text).parse(); }

std::pair<BoundedPolySequence, std::optional<FiltrationDescriptor>> BoundedPolySequence::parse_with_filtration(
    std::string_view text) {
  for (std::size_t slash = text.rfind('/'); slash != std::string_view::npos;
       slash = slash == 0 ? std::string_view::npos : text.rfind('/', slash - 1)) {
    std::string_view rest = trim(text.substr(slash + 1));
    if (rest.substr(0, 3) == "deg" || rest.substr(0, 5) == "count") {
      FiltrationDescriptor filtration;
      try {
        filtration = FiltrationDescriptor::parse(text.substr(slash + 1));
      } catch (const ParseError& e) {
        throw ParseError(e.detail(), slash + 1 + e.position());
      }
      return {parse(text.substr(0, slash)), filtration};
    }
  }
  return {parse(text), std::nullopt};
}

std::vector<SequenceTerm> BoundedPolySequence::expanded() const {
  if (!range_upper_) return terms_;
  if (range_upper_->poly().degree() > 0) {
    throw DomainError("range sum up to " + range_upper_->to_string() + " has no finite expansion");
  }
  const mpz_class n = range_upper_->poly().coefficient(0).get_num();
  if (n > kMaxExpandedDegree) throw DomainError("range sum too long to expand");
  std::vector<SequenceTerm> out;
  for (unsigned long i = 0; i <= n.get_ui(); ++i) out.push_back({ValueRule::constant(1), ValueRule::constant(i)});
  return out;
}

std::map<std::uint64_t, std::uint64_t> BoundedPolySequence::at(std::uint64_t q) const {
  const mpz_class m(static_cast<unsigned long>(q));
  std::map<std::uint64_t, mpz_class> acc;
  auto exponent_at = [&](const ValueRule& rule) {
    const mpq_class v = rule.at(q);
    if (v < 0 || v > kMaxExpandedDegree) {
      throw DomainError("exponent " + v.get_str() + " at p=" + std::to_string(q) + " is out of range");
    }
    return v.get_num().get_ui();
  };
  if (range_upper_) {
    const std::uint64_t n = exponent_at(*range_upper_);
    for (std::uint64_t i = 0; i <= n; ++i) acc[i] += 1;
  } else {
    for (const auto& term : terms_) acc[exponent_at(term.exponent)] += reduce_mod(term.coefficient.at(q), m);
  }
  std::map<std::uint64_t, std::uint64_t> out;
  for (auto& [e, c] : acc) {
    const mpz_class r = c % m;
    if (r != 0) out[e] = r.get_ui();
  }
  return out;
}

BoundedPolySequence operator+(const BoundedPolySequence& a, const BoundedPolySequence& b) {
  auto terms = a.expanded();
  auto rhs = b.expanded();
  terms.insert(terms.end(), rhs.begin(), rhs.end());
  return BoundedPolySequence::from_terms(std::move(terms));
}

BoundedPolySequence operator*(const BoundedPolySequence& a, const BoundedPolySequence& b) {
  std::vector<SequenceTerm> terms;
  for (const auto& s : a.expanded()) {
    for (const auto& t : b.expanded()) terms.push_back({s.coefficient * t.coefficient, s.exponent + t.exponent});
  }
  return BoundedPolySequence::from_terms(std::move(terms));
}

std::string BoundedPolySequence::to_string() const {
  if (range_upper_) return "sum(x^i, i=0.." + range_upper_->to_string() + ")";
  if (terms_.empty()) return "0";
  std::ostringstream out;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i != 0) out << " + ";
    const auto& [coefficient, exponent] = terms_[i];
    const bool constant_exponent = exponent.poly().degree() <= 0 && exponent.exceptions().empty();
    const bool unit = coefficient == ValueRule::constant(1);
    if (constant_exponent) {
      const std::uint64_t e = exponent.poly().coefficient(0).get_num().get_ui();
      if (e == 0) {
        const bool plain = coefficient.poly().degree() <= 0 && coefficient.exceptions().empty() &&
                           coefficient.poly().coefficient(0) >= 0;
        out << (plain ? coefficient.to_string() : "(" + coefficient.to_string() + ")");
      } else {
        if (!unit) out << "(" << coefficient.to_string() << ")";
        out << x_power(e);
      }
    } else {
      if (!unit) out << "(" << coefficient.to_string() << ")";
      out << "x^[" << exponent.to_string() << "]";
    }
  }
  return out.str();
}

Membership membership_check(const BoundedPolySequence& seq, const FiltrationDescriptor& filtration) {
  const bool by_degree = filtration.kind == FiltrationDescriptor::Kind::DegreeAtMost;
  const ValueRule& rule = by_degree ? seq.degree_rule() : seq.count_rule();
  const char* name = by_degree ? "degree" : "monomial-count";
  Membership out;
  auto c = constant_detect(UltraNat(rule));
  if (!c) {
    out.reason = std::string(name) + " rule " + rule.to_string() + " is unbounded";
    return out;
  }
  if (filtration.bound && *c > *filtration.bound) {
    out.reason = std::string(name) + " " + c->get_str() + " exceeds the step bound " +
                 std::to_string(*filtration.bound);
    return out;
  }
  out.accepted = true;
  out.step = c->get_ui();
  return out;
}

// ---------------------------------------------------------- UltraPolynomial

UltraPolynomial::UltraPolynomial(std::vector<UltraElement> coefficients, std::uint64_t bound)
    : coefficients_(std::move(coefficients)), bound_(bound) {
  for (const auto& c : coefficients_) require_fp(c);
  while (!coefficients_.empty() && eventually_zero(coefficients_.back())) coefficients_.pop_back();
  if (coefficients_.size() > bound_ + 1) bound_ = coefficients_.size() - 1;
}

UltraElement UltraPolynomial::coefficient(std::size_t i) const {
  return i < coefficients_.size() ? coefficients_[i] : fp_element(ValueRule());
}

std::string UltraPolynomial::to_string() const {
  std::ostringstream out;
  bool first = true;
  for (std::size_t i = coefficients_.size(); i-- > 0;) {
    const mpq_class c = display_constant(coefficients_[i]);
    if (c == 0) continue;
    if (first) {
      if (c < 0) out << "-";
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    first = false;
    const mpq_class magnitude = abs(c);
    if (i == 0) {
      out << magnitude.get_str();
    } else if (magnitude == 1) {
      out << x_power(i);
    } else if (magnitude.get_den() == 1) {
      out << magnitude.get_str() << x_power(i);
    } else {
      out << "(" << magnitude.get_str() << ")" << x_power(i);
    }
  }
  return first ? "0" : out.str();
}

std::string UltraPolynomial::text_form() const {
  std::ostringstream out;
  out << "poly: ";
  bool first = true;
  for (std::size_t i = coefficients_.size(); i-- > 0;) {
    if (eventually_zero(coefficients_[i])) continue;
    if (!first) out << " + ";
    first = false;
    const ValueRule& rule = coefficients_[i].rule();
    if (rule.poly().degree() <= 0 && rule.exceptions().empty()) {
      out << "(" << rule.to_string() << ")";
    } else {
      out << "([(" << rule.to_string() << ")])";
    }
    out << x_power(i);
  }
  if (first) out << "(0)";
  out << " over Fp / deg<=" << bound_;
  return out.str();
}

UltraPolynomial poly_add(const UltraPolynomial& a, const UltraPolynomial& b) {
  std::vector<UltraElement> out;
  const std::size_t n = std::max(a.coefficients().size(), b.coefficients().size());
  for (std::size_t i = 0; i < n; ++i) out.push_back(a.coefficient(i) + b.coefficient(i));
  return UltraPolynomial(std::move(out), std::max(a.bound(), b.bound()));
}

UltraPolynomial poly_neg(const UltraPolynomial& a) {
  std::vector<UltraElement> out;
  for (const auto& c : a.coefficients()) out.push_back(-c);
  return UltraPolynomial(std::move(out), a.bound());
}

UltraPolynomial poly_mul(const UltraPolynomial& a, const UltraPolynomial& b) {
  const std::uint64_t bound = FiltrationDescriptor::degree().growth(std::max(a.bound(), b.bound()));
  if (a.coefficients().empty() || b.coefficients().empty()) return UltraPolynomial({}, bound);
  std::vector<UltraElement> out(a.coefficients().size() + b.coefficients().size() - 1, fp_element(ValueRule()));
  for (std::size_t i = 0; i < a.coefficients().size(); ++i) {
    for (std::size_t j = 0; j < b.coefficients().size(); ++j) {
      out[i + j] = out[i + j] + a.coefficients()[i] * b.coefficients()[j];
    }
  }
  return UltraPolynomial(std::move(out), bound);
}

Verdict poly_equal(const UltraPolynomial& a, const UltraPolynomial& b, const FilterSpec& filter) {
  DefinableSet agree = DefinableSet::all();
  const std::size_t n = std::max(a.coefficients().size(), b.coefficients().size());
  for (std::size_t i = 0; i < n; ++i) agree = agree.intersect(agreement_set(a.coefficient(i), b.coefficient(i)));
  return classify(agree, filter);
}

UltraPolynomial degree_collapse(const BoundedPolySequence& seq) {
  Membership m = membership_check(seq, FiltrationDescriptor::degree());
  if (!m.accepted) throw DomainError("cannot collapse: " + m.reason);
  std::vector<UltraElement> coefficients(m.step + 1, fp_element(ValueRule()));
  const BoundedPolySequence expanded =
      seq.is_range() ? seq * BoundedPolySequence::from_terms({{ValueRule::constant(1), ValueRule()}}) : seq;
  for (const auto& term : expanded.terms()) {
    // Terms with a growing exponent have coefficients that vanish in the
    // limit, so only constant exponents contribute.
    if (term.exponent.poly().degree() > 0) continue;
    const mpz_class e = term.exponent.poly().coefficient(0).get_num();
    if (e > m.step) continue;
    coefficients[e.get_ui()] = coefficients[e.get_ui()] + fp_element(term.coefficient);
  }
  return UltraPolynomial(std::move(coefficients), m.step);
}

// --------------------------------------------------------- UltraMonomialSum

UltraMonomialSum::UltraMonomialSum(std::vector<MonoTerm> terms, std::uint64_t bound) : bound_(bound) {
  for (auto& term : terms) {
    require_fp(term.coefficient);
    auto same = std::find_if(terms_.begin(), terms_.end(), [&](const MonoTerm& t) {
      return compare(t.exponent, term.exponent).order == Ordering::Equal;
    });
    if (same != terms_.end()) {
      same->coefficient = same->coefficient + term.coefficient;
    } else {
      terms_.push_back(std::move(term));
    }
  }
  terms_.erase(std::remove_if(terms_.begin(), terms_.end(),
                              [](const MonoTerm& t) { return eventually_zero(t.coefficient); }),
               terms_.end());
  std::sort(terms_.begin(), terms_.end(), [](const MonoTerm& a, const MonoTerm& b) {
    return compare(a.exponent, b.exponent).order == Ordering::Greater;
  });
  bound_ = std::max<std::uint64_t>(bound_, terms_.size());
}

UltraMonomialSum UltraMonomialSum::monomial(UltraElement coefficient, UltraNat exponent) {
  return UltraMonomialSum({{std::move(coefficient), std::move(exponent)}}, 1);
}

std::string UltraMonomialSum::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i != 0) out << " + ";
    out << "[" << display_constant(terms_[i].coefficient).get_str() << "]";
    const auto c = constant_detect(terms_[i].exponent);
    if (!c || *c != 0) out << "x^[" << terms_[i].exponent.rule().to_string() << "]";
  }
  return out.str();
}

std::string UltraMonomialSum::text_form() const {
  return "mono: " + to_string() + " / count<=" + std::to_string(bound_);
}

UltraMonomialSum mono_add(const UltraMonomialSum& a, const UltraMonomialSum& b) {
  auto terms = a.terms();
  terms.insert(terms.end(), b.terms().begin(), b.terms().end());
  return UltraMonomialSum(std::move(terms), a.bound() + b.bound());
}

UltraMonomialSum mono_mul(const UltraMonomialSum& a, const UltraMonomialSum& b) {
  std::vector<MonoTerm> terms;
  for (const auto& s : a.terms()) {
    for (const auto& t : b.terms()) terms.push_back({s.coefficient * t.coefficient, s.exponent + t.exponent});
  }
  return UltraMonomialSum(std::move(terms), FiltrationDescriptor::monomial_count().growth(std::max(a.bound(), b.bound())));
}

Verdict mono_equal(const UltraMonomialSum& a, const UltraMonomialSum& b, const FilterSpec& filter) {
  Verdict v;
  if (filter.is_principal()) {
    // Compare the coordinate polynomials at the chosen index.
    const std::uint64_t q = filter.prime();
    auto coordinate = [&](const UltraMonomialSum& m) {
      std::map<mpz_class, mpz_class> out;
      const mpz_class mod(static_cast<unsigned long>(q));
      for (const auto& t : m.terms()) {
        mpz_class& c = out[t.exponent.at(q)];
        c = (c + t.coefficient.value_at(q)) % mod;
      }
      std::erase_if(out, [](const auto& entry) { return entry.second == 0; });
      return out;
    };
    v.value = coordinate(a) == coordinate(b) ? Truth::ForcedTrue : Truth::ForcedFalse;
    return v;
  }
  // Distinct exponents separate eventually and every surviving coefficient
  // is eventually nonzero, so the difference is 0 iff no term survives.
  std::vector<MonoTerm> terms = a.terms();
  for (const auto& t : b.terms()) terms.push_back({-t.coefficient, t.exponent});
  const bool same = UltraMonomialSum(std::move(terms), 0).terms().empty();
  v.value = same ? Truth::ForcedTrue : Truth::ForcedFalse;
  return v;
}

UltraNat grade(const UltraMonomialSum& m) {
  if (m.terms().size() != 1) {
    throw DomainError("grade needs a single monomial, got " + std::to_string(m.terms().size()) + " terms");
  }
  return m.terms()[0].exponent;
}

UltraMonomialSum count_collapse(const BoundedPolySequence& seq) {
  Membership m = membership_check(seq, FiltrationDescriptor::monomial_count());
  if (!m.accepted) throw DomainError("cannot collapse: " + m.reason);
  std::vector<MonoTerm> terms;
  const BoundedPolySequence expanded =
      seq.is_range() ? seq * BoundedPolySequence::from_terms({{ValueRule::constant(1), ValueRule()}}) : seq;
  for (const auto& term : expanded.terms()) terms.push_back({fp_element(term.coefficient), UltraNat(term.exponent)});
  return UltraMonomialSum(std::move(terms), m.step);
}

UltraMonomialSum to_monomial_sum(const UltraPolynomial& p) {
  std::vector<MonoTerm> terms;
  for (std::size_t i = 0; i < p.coefficients().size(); ++i) {
    terms.push_back({p.coefficients()[i], UltraNat(ValueRule::constant(static_cast<unsigned long>(i)))});
  }
  return UltraMonomialSum(std::move(terms), p.coefficients().size());
}

UltraPolynomial to_polynomial(const UltraMonomialSum& m) {
  std::vector<UltraElement> coefficients;
  for (const auto& t : m.terms()) {
    auto e = constant_detect(t.exponent);
    if (!e) throw DomainError("exponent " + t.exponent.to_string() + " is not a natural number");
    if (*e > kMaxExpandedDegree) throw DomainError("degree too large");
    const std::size_t i = e->get_ui();
    if (coefficients.size() <= i) coefficients.resize(i + 1, fp_element(ValueRule()));
    coefficients[i] = coefficients[i] + t.coefficient;
  }
  const std::uint64_t degree = coefficients.empty() ? 0 : coefficients.size() - 1;
  return UltraPolynomial(std::move(coefficients), degree);
}

}  // namespace ultraprod
