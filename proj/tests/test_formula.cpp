#include "doctest.h"
#include "oracle.hpp"
#include "ultraprod/errors.hpp"
#include "ultraprod/evaluator.hpp"
#include "ultraprod/formula.hpp"
#include "ultraprod/generators.hpp"

using namespace ultraprod;

TEST_CASE("parse and print") {
  Formula f = parse_sentence("exists x. x*x = -1");
  CHECK(f.kind == Formula::Kind::Exists);
  CHECK(to_string(f) == "exists x. x * x = -1");
  CHECK(to_string(parse_formula("x - y = 0")) == "x - y = 0");
  CHECK(to_string(parse_formula("x != 0")) == "~(x = 0)");
  CHECK(parse_formula("∀x. ∃y. y·y = x ∨ y = x") ==
        parse_formula("forall x. exists y. y*y = x | y = x"));
  CHECK(parse_formula("a = b -> c = d -> e = f") == parse_formula("a = b -> (c = d -> e = f)"));
  CHECK(parse_formula("not x = 0 and y = 1") == parse_formula("(~(x = 0)) & y = 1"));
  CHECK(parse_formula("3 = 1+1+1").terms[0].literal == 3);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_formula("exists x. exists x. x = 0"), ParseError);
  CHECK_THROWS_AS(parse_sentence("x = 0"), ParseError);
  CHECK_THROWS_AS(parse_formula("x = "), ParseError);
  CHECK_THROWS_AS(parse_formula("(x = 0"), ParseError);
  try {
    parse_formula("x = 0 &");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 7);
  }
}

TEST_CASE("free variables and depth") {
  Formula f = parse_formula("exists z. z*z = x & y = 0");
  CHECK(free_variables(f) == std::set<std::string>{"x", "y"});
  CHECK(quantifier_depth(parse_sentence("forall x. exists y. x = y | forall z. z = z")) == 3);
  CHECK_FALSE(is_sentence(f));
}

TEST_CASE("evaluation in Z/n") {
  auto f5 = FiniteRing::modular(5);
  CHECK(eval_finite(f5, parse_sentence("exists x. x*x = -1")));
  CHECK_FALSE(eval_finite(FiniteRing::modular(7), parse_sentence("exists x. x*x = -1")));
  CHECK(eval_finite(f5, parse_formula("x*x = y"), {{"x", 2}, {"y", 4}}));
  CHECK(eval_term(f5, parse_formula("x = 0").terms[0], {{"x", 3}}) == 3);
  CHECK_THROWS_AS(eval_finite(f5, parse_formula("x = 0")), DomainError);
  EvalLimits tight{10, 1000};
  CHECK_THROWS_AS(eval_finite(FiniteRing::modular(11), parse_sentence("exists x. x = 0"), {}, tight), CapExceeded);
  EvalLimits budget{100, 50};
  CHECK_THROWS_AS(eval_finite(FiniteRing::modular(11), parse_sentence("forall x. forall y. x*y = y*x"), {}, budget),
                  CapExceeded);
}

TEST_CASE("property: printing round-trips and evaluation matches the oracle") {
  gen::Rng rng(3);
  for (int i = 0; i < 300; ++i) {
    Formula f = gen::sentence(rng, 2);
    CHECK(is_sentence(f));
    CHECK(quantifier_depth(f) <= 2);
    const std::string text = to_string(f);
    CHECK_MESSAGE(parse_sentence(text) == f, text);
    for (std::int64_t n : {2, 5, 6, 11}) {
      CHECK_MESSAGE(eval_finite(FiniteRing::modular(static_cast<std::uint64_t>(n)), f) ==
                        oracle::ModEval(n).holds(f),
                    text << " in Z/" << n);
    }
  }
}
