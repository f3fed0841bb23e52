#include "ultraprod/ultra.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>
#include <sstream>

#include "ultraprod/errors.hpp"
#include "ultraprod/evaluator.hpp"
#include "ultraprod/primes.hpp"

namespace ultraprod {
namespace {

constexpr std::uint64_t kMaxClassModulus = 10'000'000;

std::vector<std::uint64_t> merged(std::vector<std::uint64_t> a, const std::vector<std::uint64_t>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())) != 0) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())) != 0) s.remove_suffix(1);
  return s;
}

// Parses a constant expression such as `-1/2`, reporting errors at `base`
// plus the local offset.
mpq_class parse_constant(std::string_view text, std::size_t base) {
  RationalPoly v;
  try {
    v = RationalPoly::parse(text);
  } catch (const ParseError& e) {
    throw ParseError(e.detail(), base + e.position());
  }
  if (v.degree() > 0) throw ParseError("exception value must be a constant", base);
  return v.coefficient(0);
}

std::uint64_t checked_class_modulus(const mpz_class& m) {
  if (m > kMaxClassModulus) {
    throw DomainError("class modulus " + m.get_str() + " exceeds " + std::to_string(kMaxClassModulus));
  }
  return m.get_ui();
}

mpz_class power(std::uint64_t q, std::uint64_t k) {
  mpz_class out;
  mpz_ui_pow_ui(out.get_mpz_t(), q, k);
  return out;
}

bool is_unit(const mpz_class& v, const mpz_class& m) {
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), v.get_mpz_t(), m.get_mpz_t());
  return g == 1;
}

mpz_class inverse(const mpz_class& v, const mpz_class& m) {
  mpz_class out;
  if (mpz_invert(out.get_mpz_t(), v.get_mpz_t(), m.get_mpz_t()) == 0) {
    throw DomainError(v.get_str() + " is not a unit mod " + m.get_str());
  }
  return out;
}

void require_same_family(const UltraElement& a, const UltraElement& b) {
  if (!(a.family() == b.family())) {
    throw DomainError("family mismatch: " + a.family().to_string() + " vs " + b.family().to_string());
  }
}

// Adds exceptions so that the rule takes `fix(q)` at each prime of `primes`
// where `fix` yields a value.
template <typename Fix>
ValueRule patched(ValueRule rule, const std::vector<std::uint64_t>& primes, Fix fix) {
  for (std::uint64_t q : primes) {
    if (auto v = fix(q)) rule = rule.with_exception(q, *v);
  }
  return rule;
}

Term integer_term(const mpz_class& c) {
  mpz_class magnitude = abs(c);
  if (!magnitude.fits_ulong_p()) throw DomainError("constant " + c.get_str() + " too large for a literal");
  Term t = Term::integer(magnitude.get_ui());
  return c < 0 ? Term::neg(std::move(t)) : t;
}

Term substitute(const Term& t, const std::map<std::string, Term>& values) {
  if (t.kind == Term::Kind::Var) {
    auto it = values.find(t.name);
    return it == values.end() ? t : it->second;
  }
  Term out = t;
  for (auto& a : out.args) a = substitute(a, values);
  return out;
}

Formula substitute(const Formula& f, std::map<std::string, Term> values) {
  Formula out = f;
  if (f.kind == Formula::Kind::Exists || f.kind == Formula::Kind::Forall) values.erase(f.var);
  for (auto& t : out.terms) t = substitute(t, values);
  for (auto& s : out.subs) s = substitute(s, values);
  return out;
}

// Integer c with [rule] = [c] at every prime outside rule.special_primes().
std::optional<mpz_class> integer_constant(const UltraElement& e) {
  const RationalPoly& poly = e.rule().poly();
  mpq_class c;
  if (e.family().kind() == StructureFamily::Kind::PrimeField) {
    // u(q) = u(0) mod q, so the coordinate is u(0)/d away from d.
    c = mpq_class(poly.is_zero() ? mpz_class(0) : poly.numerator()[0], poly.denominator());
    c.canonicalize();
  } else {
    if (poly.degree() > 0) return std::nullopt;
    c = poly.coefficient(0);
  }
  if (c.get_den() != 1) return std::nullopt;
  return c.get_num();
}

}  // namespace

// ---------------------------------------------------------------- ValueRule

ValueRule::ValueRule(RationalPoly poly, std::map<std::uint64_t, mpq_class> exceptions)
    : poly_(std::move(poly)) {
  for (auto& [q, value] : exceptions) {
    if (!is_prime(q)) throw DomainError("exception index " + std::to_string(q) + " is not prime");
    value.canonicalize();
    if (value != poly_(mpz_class(static_cast<unsigned long>(q)))) exceptions_.emplace(q, value);
  }
}

ValueRule ValueRule::parse(std::string_view text) {
  std::size_t offset = 0;
  std::string_view body = text;
  const std::string_view prefix = "poly(p):";
  {
    std::string_view t = trim(body);
    if (t.substr(0, prefix.size()) == prefix) {
      offset = static_cast<std::size_t>(t.data() - text.data()) + prefix.size();
      body = text.substr(offset);
    }
  }
  std::string_view poly_text = body;
  std::string_view except_text;
  if (auto semi = body.find(';'); semi != std::string_view::npos) {
    poly_text = body.substr(0, semi);
    except_text = body.substr(semi + 1);
  }

  RationalPoly poly;
  try {
    poly = RationalPoly::parse(poly_text);
  } catch (const ParseError& e) {
    throw ParseError(e.detail(), offset + e.position());
  }
  std::map<std::uint64_t, mpq_class> exceptions;
  if (except_text.data() != nullptr) {
    std::size_t base = static_cast<std::size_t>(except_text.data() - text.data());
    std::string_view rest = trim(except_text);
    base += static_cast<std::size_t>(rest.data() - except_text.data());
    if (rest.substr(0, 6) != "except") throw ParseError("expected 'except'", base);
    rest.remove_prefix(6);
    base += 6;
    std::string_view inner = trim(rest);
    base += static_cast<std::size_t>(inner.data() - rest.data());
    if (inner.size() < 2 || inner.front() != '{' || inner.back() != '}') {
      throw ParseError("expected '{prime: value, ...}'", base);
    }
    inner = inner.substr(1, inner.size() - 2);
    base += 1;
    std::size_t pos = 0;
    while (!trim(inner.substr(pos)).empty()) {
      std::size_t comma = inner.find(',', pos);
      std::string_view entry = inner.substr(pos, comma == std::string_view::npos ? inner.npos : comma - pos);
      std::size_t colon = entry.find(':');
      if (colon == std::string_view::npos) throw ParseError("expected 'prime: value'", base + pos);
      mpq_class key = parse_constant(entry.substr(0, colon), base + pos);
      if (key.get_den() != 1 || key < 2 || !key.get_num().fits_ulong_p() ||
          !is_prime(key.get_num().get_ui())) {
        throw ParseError("exception index must be a prime", base + pos);
      }
      const std::uint64_t q = key.get_num().get_ui();
      if (exceptions.count(q) != 0) throw ParseError("duplicate exception index", base + pos);
      exceptions[q] = parse_constant(entry.substr(colon + 1), base + pos + colon + 1);
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
  }
  return ValueRule(std::move(poly), std::move(exceptions));
}

mpq_class ValueRule::at(std::uint64_t q) const {
  if (auto it = exceptions_.find(q); it != exceptions_.end()) return it->second;
  return poly_(mpz_class(static_cast<unsigned long>(q)));
}

std::vector<std::uint64_t> ValueRule::special_primes() const {
  std::vector<std::uint64_t> out;
  for (const auto& [q, value] : exceptions_) out.push_back(q);
  if (poly_.denominator() != 1) out = merged(std::move(out), prime_factors(poly_.denominator()));
  return out;
}

ValueRule ValueRule::with_exception(std::uint64_t q, const mpq_class& value) const {
  auto exceptions = exceptions_;
  exceptions[q] = value;
  return ValueRule(poly_, std::move(exceptions));
}

template <typename Op>
ValueRule ValueRule::combine(const ValueRule& a, const ValueRule& b, Op op) {
  std::map<std::uint64_t, mpq_class> exceptions;
  for (const auto* rule : {&a, &b}) {
    for (const auto& [q, value] : rule->exceptions_) exceptions[q] = op(a.at(q), b.at(q));
  }
  return ValueRule(op(a.poly_, b.poly_), std::move(exceptions));
}

ValueRule ValueRule::operator-() const {
  std::map<std::uint64_t, mpq_class> exceptions;
  for (const auto& [q, value] : exceptions_) exceptions[q] = -value;
  return ValueRule(-poly_, std::move(exceptions));
}

ValueRule operator+(const ValueRule& a, const ValueRule& b) {
  return ValueRule::combine(a, b, [](const auto& x, const auto& y) { return x + y; });
}

ValueRule operator-(const ValueRule& a, const ValueRule& b) {
  return ValueRule::combine(a, b, [](const auto& x, const auto& y) { return x - y; });
}

ValueRule operator*(const ValueRule& a, const ValueRule& b) {
  return ValueRule::combine(a, b, [](const auto& x, const auto& y) { return x * y; });
}

std::string ValueRule::to_string() const {
  std::string out = poly_.to_string();
  if (exceptions_.empty()) return out;
  out += " ; except {";
  bool first = true;
  for (const auto& [q, value] : exceptions_) {
    if (!first) out += ", ";
    first = false;
    out += std::to_string(q) + ": " + value.get_str();
  }
  return out + "}";
}

std::string ValueRule::literal() const { return "poly(p): " + to_string(); }

mpz_class reduce_mod(const mpq_class& value, const mpz_class& m) {
  if (m <= 0) throw DomainError("modulus must be positive");
  mpz_class inv;
  if (mpz_invert(inv.get_mpz_t(), value.get_den_mpz_t(), m.get_mpz_t()) == 0) return 0;
  mpz_class out = value.get_num() * inv;
  mpz_fdiv_r(out.get_mpz_t(), out.get_mpz_t(), m.get_mpz_t());
  return out;
}

// ------------------------------------------------------------- UltraElement

UltraElement::UltraElement(StructureFamily family, ValueRule rule)
    : family_(std::move(family)), rule_(std::move(rule)) {
  if (family_.kind() == StructureFamily::Kind::ConstantFinite) {
    throw DomainError("elements over a constant table family are not supported; use a Z/n family");
  }
}

mpz_class UltraElement::modulus_at(std::uint64_t q) const {
  if (!is_prime(q)) throw DomainError(std::to_string(q) + " is not prime");
  switch (family_.kind()) {
    case StructureFamily::Kind::PrimeField:
      return mpz_class(static_cast<unsigned long>(q));
    case StructureFamily::Kind::TruncatedPadic:
      return power(q, family_.parameter());
    default:
      return mpz_class(static_cast<unsigned long>(family_.parameter()));
  }
}

mpz_class UltraElement::value_at(std::uint64_t q) const { return reduce_mod(rule_.at(q), modulus_at(q)); }

UltraElement UltraElement::operator-() const { return UltraElement(family_, -rule_); }

UltraElement operator+(const UltraElement& a, const UltraElement& b) {
  require_same_family(a, b);
  return UltraElement(a.family_, a.rule_ + b.rule_);
}

UltraElement operator-(const UltraElement& a, const UltraElement& b) {
  require_same_family(a, b);
  return UltraElement(a.family_, a.rule_ - b.rule_);
}

UltraElement operator*(const UltraElement& a, const UltraElement& b) {
  require_same_family(a, b);
  return UltraElement(a.family_, a.rule_ * b.rule_);
}

std::string UltraElement::to_string() const { return "[" + rule_.to_string() + "]@" + family_.to_string(); }

DefinableSet agreement_set(const UltraElement& a, const UltraElement& b) {
  require_same_family(a, b);
  const auto special = merged(a.rule().special_primes(), b.rule().special_primes());
  auto truth = [&](std::uint64_t q) { return a.value_at(q) == b.value_at(q); };
  const RationalPoly diff = a.rule().poly() - b.rule().poly();
  const auto& u = diff.numerator();
  auto constant_class = [](bool value) { return [value](std::uint64_t) { return value; }; };

  switch (a.family().kind()) {
    case StructureFamily::Kind::PrimeField: {
      // Away from the special primes the difference is u(q)/d with q not
      // dividing d, and u(q) = u(0) mod q.
      if (diff.is_zero() || u[0] == 0) return DefinableSet::build(1, constant_class(true), truth, special);
      return DefinableSet::build(1, constant_class(false), truth, merged(special, prime_factors(u[0])));
    }
    case StructureFamily::Kind::TruncatedPadic: {
      // q^k divides u(q) iff the q-adic valuation reaches k; below k it is
      // the index of the first coefficient not divisible by q.
      const std::size_t k = a.family().parameter();
      for (std::size_t j = 0; j < k && j < u.size(); ++j) {
        if (u[j] != 0) {
          return DefinableSet::build(1, constant_class(false), truth, merged(special, prime_factors(u[j])));
        }
      }
      return DefinableSet::build(1, constant_class(true), truth, special);
    }
    default: {
      // In Z/n the coordinate depends only on p mod n * lcm(denominators).
      const mpz_class n(static_cast<unsigned long>(a.family().parameter()));
      mpz_class l;
      mpz_lcm(l.get_mpz_t(), a.rule().poly().denominator().get_mpz_t(),
              b.rule().poly().denominator().get_mpz_t());
      const std::uint64_t modulus = checked_class_modulus(n * l);
      auto in_class = [&](std::uint64_t r) {
        const mpz_class x(static_cast<unsigned long>(r));
        return reduce_mod(a.rule().poly()(x), n) == reduce_mod(b.rule().poly()(x), n);
      };
      std::vector<std::uint64_t> keys;
      for (const auto* e : {&a, &b}) {
        for (const auto& [q, value] : e->rule().exceptions()) keys.push_back(q);
      }
      return DefinableSet::build(modulus, in_class, truth, merged(keys, {}));
    }
  }
}

Verdict eq(const UltraElement& a, const UltraElement& b, const FilterSpec& filter) {
  return classify(agreement_set(a, b), filter);
}

Invertibility is_invertible(const UltraElement& e, const FilterSpec& filter) {
  const StructureFamily& family = e.family();
  const ValueRule& rule = e.rule();
  const RationalPoly& poly = rule.poly();
  auto unit_at = [&](std::uint64_t q) { return is_unit(e.value_at(q), e.modulus_at(q)); };

  DefinableSet units;
  if (family.kind() == StructureFamily::Kind::ModRing) {
    const mpz_class n(static_cast<unsigned long>(family.parameter()));
    const std::uint64_t modulus = checked_class_modulus(n * poly.denominator());
    auto in_class = [&](std::uint64_t r) {
      return is_unit(reduce_mod(poly(mpz_class(static_cast<unsigned long>(r))), n), n);
    };
    std::vector<std::uint64_t> keys;
    for (const auto& [q, value] : rule.exceptions()) keys.push_back(q);
    units = DefinableSet::build(modulus, in_class, unit_at, keys);
  } else {
    // A coordinate is a unit of Z/q^k iff it is nonzero mod q.
    UltraElement shadow(StructureFamily::prime_field(), rule);
    UltraElement zero(StructureFamily::prime_field(), ValueRule());
    units = agreement_set(shadow, zero).complement();
  }

  Invertibility out{classify(units, filter), std::nullopt};
  if (out.verdict.value != Truth::ForcedTrue) return out;

  auto local_inverse = [&](std::uint64_t q) -> std::optional<mpq_class> {
    if (!unit_at(q)) return std::nullopt;
    return mpq_class(inverse(e.value_at(q), e.modulus_at(q)));
  };

  if (filter.is_principal()) {
    out.witness = UltraElement(family, ValueRule::constant(*local_inverse(filter.prime())));
    return out;
  }

  switch (family.kind()) {
    case StructureFamily::Kind::PrimeField:
    case StructureFamily::Kind::TruncatedPadic: {
      // 1/f = (1/c0) * sum_{j<k} (-t)^j with t = (f - c0)/c0 divisible by p,
      // so the tail vanishes mod p^k. For Fp this is just 1/c0.
      const mpq_class c0 = poly.coefficient(0);
      const std::size_t k = family.kind() == StructureFamily::Kind::PrimeField ? 1 : family.parameter();
      const RationalPoly t = (poly - RationalPoly::constant(c0)) * RationalPoly::constant(1 / c0);
      RationalPoly term = RationalPoly::constant(1);
      RationalPoly sum;
      for (std::size_t j = 0; j < k; ++j) {
        sum = sum + term;
        term = term * -t;
      }
      ValueRule inv(sum * RationalPoly::constant(1 / c0));
      auto fix = merged(merged(rule.special_primes(), prime_factors(c0.get_num())),
                        c0.get_den() == 1 ? std::vector<std::uint64_t>{} : prime_factors(c0.get_den()));
      out.witness = UltraElement(family, patched(inv, fix, local_inverse));
      break;
    }
    default: {
      if (poly.degree() > 0) break;
      const mpz_class n(static_cast<unsigned long>(family.parameter()));
      const mpz_class c = reduce_mod(poly.coefficient(0), n);
      std::vector<std::uint64_t> keys;
      for (const auto& [q, value] : rule.exceptions()) keys.push_back(q);
      out.witness = UltraElement(family, patched(ValueRule::constant(mpq_class(inverse(c, n))), keys, local_inverse));
    }
  }
  return out;
}

// -------------------------------------------------------- UltraInt/UltraNat

namespace {

// Makes every coordinate an integer: the polynomial must be integer-valued
// away from its denominator, and the finitely many primes dividing the
// denominator get their floor as an explicit exception.
ValueRule integral_rule(const ValueRule& rule) {
  if (!rule.poly().is_integer_valued()) {
    throw DomainError("rule " + rule.to_string() + " is not integer-valued");
  }
  for (const auto& [q, value] : rule.exceptions()) {
    if (value.get_den() != 1) throw DomainError("exception at " + std::to_string(q) + " is not an integer");
  }
  ValueRule out = rule;
  for (std::uint64_t q : rule.special_primes()) {
    mpq_class v = rule.at(q);
    if (v.get_den() == 1) continue;
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
    out = out.with_exception(q, mpq_class(f));
  }
  return out;
}

}  // namespace

UltraInt::UltraInt(ValueRule rule) : rule_(integral_rule(rule)) {}

mpz_class UltraInt::at(std::uint64_t q) const { return rule_.at(q).get_num(); }

std::string UltraInt::to_string() const { return "[" + rule_.to_string() + "]@Z^F"; }

UltraNat::UltraNat(ValueRule rule) : rule_(integral_rule(rule)) {
  if (rule_.poly().leading_sign() < 0) {
    throw DomainError("rule " + rule_.to_string() + " is eventually negative");
  }
  for (const auto& [q, value] : rule_.exceptions()) {
    if (value < 0) throw DomainError("exception at " + std::to_string(q) + " is negative");
  }
  // Clamp the finitely many early negative coordinates to 0.
  const mpz_class threshold = rule_.poly().sign_threshold();
  for (std::uint64_t q : primes_up_to(threshold.fits_ulong_p() ? threshold.get_ui() : 0)) {
    if (rule_.at(q) < 0) rule_ = rule_.with_exception(q, 0);
  }
}

mpz_class UltraNat::at(std::uint64_t q) const { return rule_.at(q).get_num(); }

std::string UltraNat::to_string() const { return "[" + rule_.to_string() + "]@N^F"; }

ResidueMap residue(const UltraInt& e, std::uint64_t n, const FilterSpec& filter) {
  if (n < 2) throw DomainError("residue modulus must be at least 2");
  ResidueMap out;
  out.modulus = n;
  const mpz_class nz(static_cast<unsigned long>(n));
  if (filter.is_principal()) {
    out.class_modulus = n;
    const mpz_class v = e.at(filter.prime());
    out.forced = mod_u64(v, n);
    return out;
  }
  const RationalPoly& poly = e.rule().poly();
  out.class_modulus = checked_class_modulus(nz * poly.denominator());
  const bool constrained = filter.kind() == FilterSpec::Kind::Constrained;
  std::set<std::uint64_t> values;
  for (std::uint64_t r : unit_residues(out.class_modulus)) {
    if (constrained &&
        filter.base().intersect(DefinableSet::residue_classes(out.class_modulus, {r})).is_finite()) {
      continue;
    }
    const mpz_class v = poly.numerator_at(mpz_class(static_cast<unsigned long>(r))) / poly.denominator();
    out.table.emplace_back(r, mod_u64(v, n));
    values.insert(out.table.back().second);
  }
  if (values.size() == 1) out.forced = *values.begin();
  return out;
}

std::string_view to_string(Ordering o) {
  switch (o) {
    case Ordering::Less:
      return "less";
    case Ordering::Equal:
      return "equal";
    case Ordering::Greater:
      return "greater";
  }
  return "equal";
}

Comparison compare(const UltraNat& a, const UltraNat& b) {
  const RationalPoly diff = a.rule().poly() - b.rule().poly();
  Comparison out;
  const int sign = diff.leading_sign();
  out.order = sign > 0 ? Ordering::Greater : sign < 0 ? Ordering::Less : Ordering::Equal;
  out.threshold = diff.sign_threshold();
  for (const auto* x : {&a, &b}) {
    if (!x->rule().exceptions().empty()) {
      out.threshold = std::max(out.threshold, mpz_class(static_cast<unsigned long>(x->rule().exceptions().rbegin()->first)));
    }
  }
  return out;
}

std::optional<mpz_class> constant_detect(const UltraNat& a) {
  if (a.rule().poly().degree() > 0) return std::nullopt;
  return a.rule().poly().coefficient(0).get_num();
}

// --------------------------------------------------------- eval_with_params

Verdict eval_with_params(const StructureFamily& family, const Formula& formula,
                         const ElementAssignment& env, const FilterSpec& filter,
                         std::uint64_t window, const LosOptions& options) {
  const auto free = free_variables(formula);
  std::vector<const UltraElement*> used;
  for (const auto& name : free) {
    auto it = env.find(name);
    if (it == env.end()) throw DomainError("free variable '" + name + "' has no value");
    if (!(it->second.family() == family)) {
      throw DomainError("'" + name + "' lives in " + it->second.family().to_string() + ", not " +
                        family.to_string());
    }
    used.push_back(&it->second);
  }

  auto holds_at = [&](std::uint64_t q) {
    const FiniteRing ring = family.materialize(q);
    Assignment assignment;
    for (const auto& name : free) {
      assignment[name] = static_cast<Element>(env.at(name).value_at(q).get_ui());
    }
    return eval_finite(ring, formula, assignment, options.limits);
  };

  if (filter.is_principal()) {
    Verdict v;
    v.value = holds_at(filter.prime()) ? Truth::ForcedTrue : Truth::ForcedFalse;
    return v;
  }

  SampledTruthSet sample;
  sample.window = window;
  sample.primes = primes_up_to(window);
  for (std::uint64_t q : sample.primes) sample.bits.push_back(holds_at(q));

  // Exact path: every parameter is an integer constant away from finitely
  // many primes, so the truth set is that of a sentence, corrected there.
  std::map<std::string, Term> constants;
  std::vector<std::uint64_t> special;
  for (const auto& name : free) {
    const UltraElement& e = env.at(name);
    auto c = integer_constant(e);
    if (!c || !mpz_class(abs(*c)).fits_ulong_p()) {
      constants.clear();
      special.clear();
      break;
    }
    constants[name] = integer_term(*c);
    special = merged(std::move(special), e.rule().special_primes());
  }
  if (constants.size() == free.size()) {
    const Formula sentence = substitute(formula, constants);
    if (auto base = exact_truth_set(family, sentence, options)) {
      std::optional<DefinableSet> exact;
      try {
        std::map<std::uint64_t, bool> direct;
        for (std::uint64_t q : special) direct[q] = holds_at(q);
        const DefinableSet& s = base->set;
        auto in_class = [&](std::uint64_t r) {
          return std::binary_search(s.classes().begin(), s.classes().end(), r);
        };
        auto truth = [&](std::uint64_t q) {
          auto it = direct.find(q);
          return it != direct.end() ? it->second : s.contains(q);
        };
        exact = DefinableSet::build(s.modulus(), in_class, truth,
                                    merged(merged(special, s.include()), s.exclude()));
      } catch (const CapExceeded&) {
        // A correction prime is too large to evaluate; stay empirical.
      }
      if (exact) {
        for (std::size_t i = 0; i < sample.primes.size(); ++i) {
          if (exact->contains(sample.primes[i]) != sample.bits[i]) {
            throw ClassifierMismatch("parameter substitution gives " + exact->to_string() +
                                     " but p=" + std::to_string(sample.primes[i]) +
                                     " evaluates otherwise for " + to_string(formula));
          }
        }
        return classify(*exact, filter);
      }
    }
  }
  return empirical_verdict(sample, filter, options.empirical_modulus);
}

}  // namespace ultraprod
