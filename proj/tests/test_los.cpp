#include "doctest.h"
#include "oracle.hpp"
#include "ultraprod/errors.hpp"
#include "ultraprod/generators.hpp"
#include "ultraprod/los.hpp"

using namespace ultraprod;

namespace {

const StructureFamily kFp = StructureFamily::prime_field();

Verdict generic_verdict(const char* sentence, const StructureFamily& family = kFp, std::uint64_t window = 300) {
  return los_verdict(family, parse_sentence(sentence), FilterSpec::generic(), window);
}

}  // namespace

TEST_CASE("-1 is a square exactly at 2 and the primes 1 mod 4") {
  auto sample = truth_set(kFp, parse_sentence("exists x. x*x = -1"), 1000);
  REQUIRE(sample.exact);
  CHECK(sample.exact->to_string() == "(1 mod 4) + {2}");
  Verdict v = generic_verdict("exists x. x*x = -1");
  CHECK(v.value == Truth::Contingent);
  CHECK(v.provenance.kind == Provenance::Kind::Exact);
  CHECK(v.decomposition->to_string() == "(1 mod 4) + {2}");
  for (std::uint64_t p : oracle::primes(2, 1000)) {
    bool expected = false;
    for (std::uint64_t x = 0; x < p; ++x) expected = expected || (x * x + 1) % p == 0;
    CHECK(sample.at(p) == expected);
  }
}

TEST_CASE("characteristic sentences") {
  auto sample = truth_set(kFp, parse_sentence("1+1+1 = 0"), 100);
  REQUIRE(sample.exact);
  CHECK(sample.exact->to_string() == "{3}");
  Verdict six = generic_verdict("6 = 0");
  CHECK(six.value == Truth::ForcedFalse);
  CHECK(six.provenance.kind == Provenance::Kind::Exact);
  CHECK(los_verdict(kFp, parse_sentence("6 = 0"), FilterSpec::principal(3), 0).value == Truth::ForcedTrue);
  CHECK(los_verdict(kFp, parse_sentence("6 = 0"), FilterSpec::principal(5), 0).value == Truth::ForcedFalse);
}

TEST_CASE("linear solvability is cofinite") {
  Verdict v = generic_verdict("exists x. 2*x = 1");
  CHECK(v.value == Truth::ForcedTrue);
  CHECK(v.provenance.kind == Provenance::Kind::Exact);
  auto sample = truth_set(kFp, parse_sentence("exists x. 6*x = 3"), 200);
  REQUIRE(sample.exact);
  CHECK(sample.exact->to_string() == "all - {2}");
}

TEST_CASE("unrecognized sentences fall back to empirical evidence") {
  auto sample = truth_set(kFp, parse_sentence("forall x. exists y. y*y = x"), 100);
  CHECK_FALSE(sample.exact);
  for (std::size_t i = 0; i < sample.primes.size(); ++i) CHECK(sample.bits[i] == (sample.primes[i] == 2));
  Verdict v = generic_verdict("forall x. exists y. y*y = x", kFp, 200);
  CHECK(v.value == Truth::ForcedFalse);
  CHECK(v.provenance.kind == Provenance::Kind::Empirical);
  CHECK(v.provenance.window == 200);
}

TEST_CASE("empirical pattern stabilizes into residue classes") {
  // Recognizers only see one quantifier over an equation; this is the same
  // set as exists x. x*x = -1 but written with a conjunction inside.
  Verdict v = generic_verdict("exists x. x*x + 1 = 0 & x = x", kFp, 400);
  CHECK(v.provenance.kind == Provenance::Kind::Empirical);
  CHECK(v.value == Truth::Contingent);
  REQUIRE(v.decomposition);
  CHECK(v.decomposition->to_string() == "(1 mod 4)");
  CHECK(v.pattern.rfind("mod 24:", 0) == 0);
}

TEST_CASE("constant families collapse to the single structure") {
  auto f3 = StructureFamily::parse("const:Z/3");
  CHECK(generic_verdict("1+1+1 = 0", f3).value == Truth::ForcedTrue);
  CHECK(generic_verdict("exists x. x*x = -1", f3).value == Truth::ForcedFalse);
  CHECK(los_verdict(f3, parse_sentence("1+1 = 0"), FilterSpec::principal(2), 0).value == Truth::ForcedFalse);
}

TEST_CASE("truncated p-adics") {
  auto zp2 = StructureFamily::truncated_padic(2);
  auto sample = truth_set(zp2, parse_sentence("exists x. x*x = -1"), 100);
  REQUIRE(sample.exact);
  // Hensel: odd p lift; at 2, -1 = 3 is not a square mod 4.
  CHECK(sample.exact->to_string() == "(1 mod 4)");
  auto closed = truth_set(zp2, parse_sentence("9 = 0"), 100);
  CHECK(closed.exact->to_string() == "{3}");
  auto three = truth_set(zp2, parse_sentence("3 = 0"), 100);
  CHECK(three.exact->to_string() == "{}");
}

TEST_CASE("quadratic sentences with several coefficients") {
  for (const char* text : {"exists x. x*x + x + 1 = 0", "exists x. 2*x*x + 3*x = 5", "forall x. ~(x*x = 2)",
                           "exists x. x*x = 0", "exists x. 3*x*x + 6*x + 3 = 0", "exists x. x * x = 2 | 3 = 0"}) {
    for (const auto& family : {kFp, StructureFamily::truncated_padic(2)}) {
      auto sample = truth_set(family, parse_sentence(text), 150);
      CHECK_MESSAGE(sample.exact.has_value(), std::string(text));
    }
  }
}

TEST_CASE("transfer reports") {
  auto phi = parse_sentence("exists x. x*x = -1");
  auto report = transfer_report(kFp, StructureFamily::truncated_padic(2), phi, 100);
  CHECK(report.conclusion == TransferReport::Conclusion::Equivalent);
  CHECK(report.exceptional_primes == std::vector<std::uint64_t>{2});
  CHECK(report.difference->to_string() == "{2}");
  CHECK_FALSE(report.notes.empty());

  auto same = transfer_report(kFp, kFp, phi, 100);
  CHECK(same.conclusion == TransferReport::Conclusion::Equivalent);
  CHECK(same.exceptional_primes.empty());

  auto chars = transfer_report(kFp, StructureFamily::parse("const:Z/3"), parse_sentence("1+1+1=0"), 100);
  CHECK(chars.conclusion == TransferReport::Conclusion::NotEquivalent);
  CHECK(chars.exceptional_primes.size() == 24);
}

TEST_CASE("property: principal verdicts match brute force and negation is coherent") {
  gen::Rng rng(5);
  for (int i = 0; i < 60; ++i) {
    Formula f = gen::sentence(rng, 2);
    for (std::uint64_t p : {2, 3, 5, 13}) {
      const bool expected = oracle::ModEval(static_cast<std::int64_t>(p)).holds(f);
      CHECK(los_verdict(kFp, f, FilterSpec::principal(p), 0).value ==
            (expected ? Truth::ForcedTrue : Truth::ForcedFalse));
    }
    Verdict v = los_verdict(kFp, f, FilterSpec::generic(), 120);
    Verdict n = los_verdict(kFp, Formula::negation(f), FilterSpec::generic(), 120);
    CHECK_MESSAGE(n.value == negate(v.value), to_string(f));
    if (v.value == Truth::Contingent && v.decomposition && n.decomposition) {
      // Empirical readings ignore the primes dividing the sampling modulus,
      // so the two halves are complementary up to a finite set.
      CHECK(v.decomposition->unite(*n.decomposition).is_cofinite());
      CHECK(v.decomposition->intersect(*n.decomposition).is_finite());
      if (v.provenance.kind == Provenance::Kind::Exact) {
        CHECK(v.decomposition->unite(*n.decomposition) == DefinableSet::all());
      }
    }
  }
}

TEST_CASE("exact verdicts are stable under a larger window") {
  for (const char* text : {"exists x. x*x = -1", "exists x. x*x = 3", "5 = 0", "exists x. x*x = -2 & ~(7 = 0)",
                           "forall x. ~(x*x = 5) | 2 = 0"}) {
    auto phi = parse_sentence(text);
    Verdict small = los_verdict(kFp, phi, FilterSpec::generic(), 100);
    Verdict large = los_verdict(kFp, phi, FilterSpec::generic(), 2000);
    CHECK(small.provenance.kind == Provenance::Kind::Exact);
    CHECK(small == large);
  }
}
