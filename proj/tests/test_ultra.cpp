#include "doctest.h"
#include "oracle.hpp"
#include "ultraprod/errors.hpp"
#include "ultraprod/generators.hpp"
#include "ultraprod/ultra.hpp"

using namespace ultraprod;

namespace {

const StructureFamily kFp = StructureFamily::prime_field();
const FilterSpec kGeneric = FilterSpec::generic();

UltraElement fp(const char* rule) { return UltraElement(kFp, ValueRule::parse(rule)); }
UltraNat nat(const char* rule) { return UltraNat(ValueRule::parse(rule)); }

// The coordinate at q computed from the coefficients alone.
mpz_class naive_value(const ValueRule& rule, std::uint64_t q, const mpz_class& m) {
  mpq_class v = 0;
  if (auto it = rule.exceptions().find(q); it != rule.exceptions().end()) {
    v = it->second;
  } else {
    mpq_class power = 1;
    for (int i = 0; i <= rule.poly().degree(); ++i) {
      v += rule.poly().coefficient(static_cast<std::size_t>(i)) * power;
      power *= static_cast<unsigned long>(q);
    }
  }
  mpz_class den = v.get_den() % m;
  mpz_class inv = 0;
  for (mpz_class c = 1; c < m; ++c) {
    if ((den * c) % m == 1) inv = c;
  }
  if (inv == 0 && m != 1) return 0;
  mpz_class out = (v.get_num() * inv) % m;
  return out < 0 ? out + m : out;
}

}  // namespace

TEST_CASE("rule syntax") {
  ValueRule r = ValueRule::parse("poly(p): (p^2 - 1)/2 ; except {2: 7}");
  CHECK(r.to_string() == "(p^2 - 1)/2 ; except {2: 7}");
  CHECK(r.literal() == "poly(p): (p^2 - 1)/2 ; except {2: 7}");
  CHECK(r.at(2) == 7);
  CHECK(r.at(5) == 12);
  CHECK(ValueRule::parse("3p + 1").to_string() == "3p + 1");
  CHECK(ValueRule::parse("-1/2").to_string() == "-1/2");
  CHECK(ValueRule::parse("p - 1 ; except {3: -1/2, 5: 4}").to_string() == "p - 1 ; except {3: -1/2}");
  CHECK(ValueRule::parse("(p+1)(p-1)") == ValueRule::parse("p^2 - 1"));
  CHECK_THROWS_AS(ValueRule::parse("p/p"), ParseError);
  CHECK_THROWS_AS(ValueRule::parse("p ; except {4: 1}"), ParseError);
  CHECK_THROWS_AS(ValueRule::parse("q + 1"), ParseError);
  CHECK_THROWS_AS(ValueRule::parse("p ; {2: 1}"), ParseError);
  CHECK(fp("p - 1").to_string() == "[p - 1]@Fp");
}

TEST_CASE("equality in the ultraproduct of the prime fields") {
  CHECK(eq(fp("p"), fp("0"), kGeneric).value == Truth::ForcedTrue);
  CHECK(eq(fp("1"), fp("0"), kGeneric).value == Truth::ForcedFalse);
  CHECK(eq(fp("(p+1)/2") * fp("2"), fp("1"), kGeneric).value == Truth::ForcedTrue);
  CHECK(eq(fp("p - 1") + fp("1"), fp("p"), kGeneric).value == Truth::ForcedTrue);
  CHECK(eq(fp("p - 1") + fp("1"), fp("0"), kGeneric).value == Truth::ForcedTrue);
  CHECK(eq(fp("2") * fp("3"), fp("6"), kGeneric).value == Truth::ForcedTrue);
  CHECK(eq(-fp("1"), fp("p - 1"), kGeneric).value == Truth::ForcedTrue);
  // 6 = 0 only at 2 and 3.
  CHECK(agreement_set(fp("6"), fp("0")).to_string() == "{2, 3}");
  CHECK(eq(fp("6"), fp("0"), FilterSpec::principal(3)).value == Truth::ForcedTrue);
  CHECK_THROWS_AS(eq(fp("1"), UltraElement(StructureFamily::truncated_padic(2), ValueRule::parse("1")), kGeneric),
                  DomainError);
  CHECK_THROWS_AS(UltraElement(StructureFamily::parse("const:Z/3"), ValueRule()), DomainError);
}

TEST_CASE("equality in Z/p^k and Z/n") {
  auto zp2 = StructureFamily::truncated_padic(2);
  UltraElement p(zp2, ValueRule::index());
  UltraElement zero(zp2, ValueRule());
  // p is not 0 mod p^2 but p^2 is.
  CHECK(eq(p, zero, kGeneric).value == Truth::ForcedFalse);
  CHECK(eq(p * p, zero, kGeneric).value == Truth::ForcedTrue);
  CHECK(agreement_set(UltraElement(zp2, ValueRule::parse("p + 12")), UltraElement(zp2, ValueRule::parse("p"))).to_string() == "{2}");

  auto z12 = StructureFamily::mod_ring(12);
  UltraElement a(z12, ValueRule::index());
  UltraElement one(z12, ValueRule::parse("1"));
  auto s = agreement_set(a, one);
  CHECK(s.to_string() == "(1 mod 12)");
  CHECK(eq(a * a, one, kGeneric).value == Truth::ForcedTrue);  // units of Z/12 square to 1
}

TEST_CASE("invertibility") {
  auto zp2 = StructureFamily::truncated_padic(2);
  Invertibility six = is_invertible(UltraElement(zp2, ValueRule::parse("6")), kGeneric);
  CHECK(six.verdict.value == Truth::ForcedTrue);
  REQUIRE(six.witness);
  CHECK(six.witness->to_string() == "[1/6]@Zp^2");
  for (std::uint64_t q : oracle::primes(5, 300)) CHECK((six.witness->value_at(q) * 6) % (q * q) == 1);

  CHECK(is_invertible(fp("0"), kGeneric).verdict.value == Truth::ForcedFalse);
  CHECK(is_invertible(fp("p"), kGeneric).verdict.value == Truth::ForcedFalse);
  Invertibility half = is_invertible(fp("p + 2"), kGeneric);
  REQUIRE(half.witness);
  CHECK(eq(*half.witness * fp("p + 2"), fp("1"), kGeneric).value == Truth::ForcedTrue);
  for (std::uint64_t q : oracle::primes(3, 200)) CHECK((half.witness->value_at(q) * 2) % q == 1);

  UltraElement f(zp2, ValueRule::parse("p^2 + 3p + 2"));
  Invertibility inv = is_invertible(f, kGeneric);
  REQUIRE(inv.witness);
  for (std::uint64_t q : oracle::primes(2, 300)) {
    if (q == 2) continue;
    CHECK((inv.witness->value_at(q) * f.value_at(q)) % (q * q) == 1);
  }

  UltraElement five_mod12(StructureFamily::mod_ring(12), ValueRule::parse("5"));
  CHECK(is_invertible(five_mod12, kGeneric).witness->to_string() == "[5]@Z/12");
  Invertibility p_mod4 = is_invertible(UltraElement(StructureFamily::mod_ring(4), ValueRule::index()), kGeneric);
  CHECK(p_mod4.verdict.value == Truth::ForcedTrue);
  CHECK_FALSE(p_mod4.witness.has_value());
  Invertibility principal = is_invertible(fp("p + 2"), FilterSpec::principal(7));
  CHECK(principal.witness->to_string() == "[4]@Fp");
}

TEST_CASE("residues of Z^F") {
  ResidueMap r = residue(UltraInt(ValueRule::index()), 4, kGeneric);
  CHECK_FALSE(r.forced.has_value());
  CHECK(r.table == std::vector<std::pair<std::uint64_t, std::uint64_t>>{{1, 1}, {3, 3}});
  for (std::uint64_t q : oracle::primes(3, 100)) {
    for (const auto& [cls, value] : r.table) {
      if (q % 4 == cls) CHECK(q % 4 == value);
    }
  }
  CHECK(residue(UltraInt(ValueRule::parse("7")), 4, kGeneric).forced == 3);
  ResidueMap squares = residue(UltraInt(ValueRule::parse("p^2")), 3, kGeneric);
  CHECK(squares.forced == 1);
  CHECK(squares.table == std::vector<std::pair<std::uint64_t, std::uint64_t>>{{1, 1}, {2, 1}});
  auto constrained = FilterSpec::constrained({DefinableSet::parse("(1 mod 4)")});
  CHECK(residue(UltraInt(ValueRule::index()), 4, constrained).forced == 1);
  CHECK(residue(UltraInt(ValueRule::index()), 4, FilterSpec::principal(7)).forced == 3);
  ResidueMap tri = residue(UltraInt(ValueRule::parse("(p^2 - 1)/2")), 3, kGeneric);
  CHECK(tri.class_modulus == 6);
  CHECK(tri.forced == 0);
  CHECK_THROWS_AS(residue(UltraInt(ValueRule::index()), 1, kGeneric), DomainError);
  CHECK_THROWS_AS(UltraInt(ValueRule::parse("p/2")), DomainError);
}

TEST_CASE("order on N^F") {
  CHECK(compare(nat("p"), nat("1000000")).order == Ordering::Greater);
  CHECK(compare(nat("5"), nat("5")).order == Ordering::Equal);
  CHECK(compare(nat("p"), nat("p + 1")).order == Ordering::Less);
  Comparison c = compare(nat("p"), nat("1000000"));
  CHECK(c.threshold >= 1000000);
  CHECK(constant_detect(nat("5")) == mpz_class(5));
  CHECK_FALSE(constant_detect(nat("p")).has_value());
  CHECK(constant_detect(nat("5 ; except {2: 99}")) == mpz_class(5));
  CHECK_THROWS_AS(nat("-p"), DomainError);
  CHECK_THROWS_AS(nat("p ; except {3: -1}"), DomainError);
  // Early negative coordinates are clamped.
  CHECK(nat("p - 10").at(3) == 0);
  CHECK(nat("p - 10").at(11) == 1);
}

TEST_CASE("formulas with parameters") {
  ElementAssignment env{{"x", fp("2")}, {"y", fp("4")}};
  CHECK(eval_with_params(kFp, parse_formula("x*x = y"), env, kGeneric, 200).value == Truth::ForcedTrue);
  Verdict v = eval_with_params(kFp, parse_formula("exists z. z*z = x"), {{"x", fp("-1")}}, kGeneric, 200);
  CHECK(v.value == Truth::Contingent);
  CHECK(v.provenance.kind == Provenance::Kind::Exact);
  CHECK(v.decomposition->to_string() == "(1 mod 4) + {2}");
  CHECK(eval_with_params(kFp, parse_formula("x = 0"), {{"x", fp("p")}}, kGeneric, 200).value == Truth::ForcedTrue);
  // A parameter with an exception: x = 3 except at 7 where it is 0.
  Verdict patched = eval_with_params(kFp, parse_formula("exists z. z*z = x"), {{"x", fp("3 ; except {7: 0}")}},
                                     kGeneric, 300);
  CHECK(patched.decomposition->to_string() == "(1, 11 mod 12) + {2, 3, 7}");
  // Non-constant rules take the empirical route.
  Verdict emp = eval_with_params(kFp, parse_formula("exists z. z*z = x"), {{"x", fp("(p+1)/2")}}, kGeneric, 300);
  CHECK(emp.provenance.kind == Provenance::Kind::Empirical);
  CHECK(eval_with_params(kFp, parse_formula("x = 0"), {{"x", fp("3")}}, FilterSpec::principal(3), 0).value ==
        Truth::ForcedTrue);
  CHECK_THROWS_AS(eval_with_params(kFp, parse_formula("x = y"), {{"x", fp("1")}}, kGeneric, 50), DomainError);
}

TEST_CASE("property: field laws, finite perturbation and exactness") {
  gen::Rng rng(17);
  auto primes = oracle::primes(2, 2000);
  for (int i = 0; i < 100; ++i) {
    UltraElement a(kFp, gen::rule(rng, 3, 2));
    UltraElement b(kFp, gen::rule(rng, 3, 2));
    UltraElement c(kFp, gen::rule(rng, 3, 2));
    CHECK(eq(a + (b + c), (a + b) + c, kGeneric).value == Truth::ForcedTrue);
    CHECK(eq(a * (b * c), (a * b) * c, kGeneric).value == Truth::ForcedTrue);
    CHECK(eq(a * b, b * a, kGeneric).value == Truth::ForcedTrue);
    CHECK(eq(a * (b + c), a * b + a * c, kGeneric).value == Truth::ForcedTrue);
    CHECK(eq(a + -a, fp("0"), kGeneric).value == Truth::ForcedTrue);

    Verdict zero = eq(a, fp("0"), kGeneric);
    CHECK(zero.forced());
    if (zero.value == Truth::ForcedFalse) CHECK(is_invertible(a, kGeneric).verdict.value == Truth::ForcedTrue);

    ValueRule perturbed = a.rule();
    for (int k = 0; k < 5; ++k) perturbed = perturbed.with_exception(primes[static_cast<std::size_t>(k * 7)], k + 100);
    CHECK(eq(a, UltraElement(kFp, perturbed), kGeneric).value == Truth::ForcedTrue);
    CHECK(eq(UltraElement(kFp, perturbed), b, kGeneric).value == eq(a, b, kGeneric).value);

    // The exact agreement set matches pointwise comparison everywhere.
    DefinableSet agree = agreement_set(a, b);
    for (std::uint64_t q : primes) {
      const mpz_class m(static_cast<unsigned long>(q));
      REQUIRE((naive_value(a.rule(), q, m) == naive_value(b.rule(), q, m)) == agree.contains(q));
    }
  }
}

TEST_CASE("property: characteristic zero") {
  for (unsigned n = 1; n <= 50; ++n) {
    UltraElement multiple(kFp, ValueRule::constant(n));
    CHECK(eq(multiple, fp("0"), kGeneric).value == Truth::ForcedFalse);
  }
}

TEST_CASE("property: compare is a total order consistent with coordinates") {
  gen::Rng rng(23);
  std::vector<UltraNat> xs;
  while (xs.size() < 30) {
    UltraNat x(gen::nat_rule(rng));
    if (std::none_of(xs.begin(), xs.end(), [&](const UltraNat& y) { return y.rule().poly() == x.rule().poly(); })) {
      xs.push_back(x);
    }
  }
  for (const auto& a : xs) {
    for (const auto& b : xs) {
      Comparison ab = compare(a, b);
      Comparison ba = compare(b, a);
      CHECK((ab.order == Ordering::Equal) == (&a == &b));
      if (ab.order == Ordering::Less) CHECK(ba.order == Ordering::Greater);
      for (const auto& c : xs) {
        if (ab.order == Ordering::Less && compare(b, c).order == Ordering::Less) {
          CHECK(compare(a, c).order == Ordering::Less);
        }
      }
      const std::uint64_t start = ab.threshold.get_ui() + 1;
      for (std::uint64_t q : oracle::primes(start, start + 200)) {
        if (ab.order == Ordering::Less) CHECK(a.at(q) < b.at(q));
        if (ab.order == Ordering::Greater) CHECK(a.at(q) > b.at(q));
      }
    }
  }
}
