#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ultraprod {

/// Term over the ring signature {0, 1, -, +, *}. Literals n >= 2 stand for
/// 1 + ... + 1.
struct Term {
  enum class Kind { Var, Zero, One, Literal, Neg, Add, Mul };

  Kind kind = Kind::Zero;
  std::string name;           // Var
  std::uint64_t literal = 0;  // Literal
  std::vector<Term> args;     // Neg: 1, Add/Mul: 2

  static Term var(std::string name);
  static Term zero();
  static Term one();
  /// 0 and 1 map to Zero and One.
  static Term integer(std::uint64_t n);
  static Term neg(Term a);
  static Term add(Term a, Term b);
  static Term mul(Term a, Term b);

  friend bool operator==(const Term&, const Term&) = default;
};

struct Formula {
  enum class Kind { Eq, Not, And, Or, Implies, Exists, Forall };

  Kind kind = Kind::Eq;
  std::string var;           // Exists/Forall
  std::vector<Term> terms;   // Eq: 2
  std::vector<Formula> subs; // Not/quantifiers: 1, binary connectives: 2

  static Formula eq(Term a, Term b);
  static Formula negation(Formula a);
  static Formula conj(Formula a, Formula b);
  static Formula disj(Formula a, Formula b);
  static Formula implies(Formula a, Formula b);
  static Formula exists(std::string var, Formula body);
  static Formula forall(std::string var, Formula body);

  friend bool operator==(const Formula&, const Formula&) = default;
};

/// Parses a formula; free variables are allowed. Throws ParseError, also
/// when a quantifier rebinds a variable already bound on its path.
///
///   formula := ("exists" | "forall" | "∃" | "∀") var "." formula | implication
///   implication := disjunction [("->" | "→") implication]
///   disjunction := conjunction {("|" | "or" | "∨") conjunction}
///   conjunction := negation {("&" | "and" | "∧") negation}
///   negation := ("~" | "!" | "not" | "¬") negation | quantified | "(" formula ")"
///             | term ("=" | "!=" | "≠") term
///   term := product {("+" | "-") product};  product := unary {"*" unary}
///   unary := "-" unary | var | integer | "(" term ")"
Formula parse_formula(std::string_view text);

/// As parse_formula, and additionally rejects free variables.
Formula parse_sentence(std::string_view text);

/// ASCII rendering that parses back to an equal tree.
std::string to_string(const Term& t);
std::string to_string(const Formula& f);

std::set<std::string> free_variables(const Formula& f);
std::set<std::string> variables(const Term& t);
int quantifier_depth(const Formula& f);
bool is_sentence(const Formula& f);

}  // namespace ultraprod
