#include "ultraprod/formula.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <optional>

#include "ultraprod/errors.hpp"

namespace ultraprod {

Term Term::var(std::string name) {
  Term t;
  t.kind = Kind::Var;
  t.name = std::move(name);
  return t;
}

Term Term::zero() { return Term{}; }

Term Term::one() {
  Term t;
  t.kind = Kind::One;
  return t;
}

Term Term::integer(std::uint64_t n) {
  if (n == 0) return zero();
  if (n == 1) return one();
  Term t;
  t.kind = Kind::Literal;
  t.literal = n;
  return t;
}

Term Term::neg(Term a) {
  Term t;
  t.kind = Kind::Neg;
  t.args.push_back(std::move(a));
  return t;
}

Term Term::add(Term a, Term b) {
  Term t;
  t.kind = Kind::Add;
  t.args.push_back(std::move(a));
  t.args.push_back(std::move(b));
  return t;
}

Term Term::mul(Term a, Term b) {
  Term t;
  t.kind = Kind::Mul;
  t.args.push_back(std::move(a));
  t.args.push_back(std::move(b));
  return t;
}

Formula Formula::eq(Term a, Term b) {
  Formula f;
  f.terms.push_back(std::move(a));
  f.terms.push_back(std::move(b));
  return f;
}

namespace {

Formula unary(Formula::Kind kind, Formula a, std::string var = {}) {
  Formula f;
  f.kind = kind;
  f.var = std::move(var);
  f.subs.push_back(std::move(a));
  return f;
}

Formula binary(Formula::Kind kind, Formula a, Formula b) {
  Formula f;
  f.kind = kind;
  f.subs.push_back(std::move(a));
  f.subs.push_back(std::move(b));
  return f;
}

}  // namespace

Formula Formula::negation(Formula a) { return unary(Kind::Not, std::move(a)); }
Formula Formula::conj(Formula a, Formula b) { return binary(Kind::And, std::move(a), std::move(b)); }
Formula Formula::disj(Formula a, Formula b) { return binary(Kind::Or, std::move(a), std::move(b)); }
Formula Formula::implies(Formula a, Formula b) {
  return binary(Kind::Implies, std::move(a), std::move(b));
}
Formula Formula::exists(std::string var, Formula body) {
  return unary(Kind::Exists, std::move(body), std::move(var));
}
Formula Formula::forall(std::string var, Formula body) {
  return unary(Kind::Forall, std::move(body), std::move(var));
}

namespace {

constexpr std::array<std::string_view, 5> kKeywords = {"exists", "forall", "not", "and", "or"};

bool is_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

class FormulaParser {
 public:
  explicit FormulaParser(std::string_view text) : text_(text) {}

  Formula parse_all() {
    Formula f = parse_formula();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return f;
  }

  const std::map<std::string, std::size_t>& free_occurrences() const { return free_; }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])) != 0) {
      ++pos_;
    }
  }

  bool at(std::string_view token) {
    skip_space();
    return text_.substr(pos_, token.size()) == token;
  }

  bool accept(std::string_view token) {
    if (!at(token)) return false;
    pos_ += token.size();
    return true;
  }

  void expect(std::string_view token) {
    if (!accept(token)) fail("expected '" + std::string(token) + "'");
  }

  std::optional<std::string> peek_word() {
    skip_space();
    std::size_t end = pos_;
    if (end >= text_.size() ||
        (std::isalpha(static_cast<unsigned char>(text_[end])) == 0 && text_[end] != '_')) {
      return std::nullopt;
    }
    while (end < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[end])) != 0 || text_[end] == '_')) {
      ++end;
    }
    return std::string(text_.substr(pos_, end - pos_));
  }

  bool accept_word(std::string_view word) {
    auto w = peek_word();
    if (!w || *w != word) return false;
    pos_ += word.size();
    return true;
  }

  bool accept_minus() {
    if (at("->")) return false;
    return accept("-") || accept("−");
  }

  Formula parse_formula() {
    if (auto q = parse_quantifier()) return *q;
    return parse_implication();
  }

  std::optional<Formula> parse_quantifier() {
    bool is_exists = false;
    if (accept_word("exists") || accept("∃")) {
      is_exists = true;
    } else if (!(accept_word("forall") || accept("∀"))) {
      return std::nullopt;
    }
    auto name = peek_word();
    if (!name || is_keyword(*name)) fail("expected a variable after quantifier");
    if (std::find(bound_.begin(), bound_.end(), *name) != bound_.end()) {
      fail("variable '" + *name + "' is already bound");
    }
    pos_ += name->size();
    expect(".");
    bound_.push_back(*name);
    Formula body = parse_formula();
    bound_.pop_back();
    return is_exists ? Formula::exists(*name, std::move(body))
                     : Formula::forall(*name, std::move(body));
  }

  Formula parse_implication() {
    Formula lhs = parse_disjunction();
    if (accept("->") || accept("→") || accept("⇒")) {
      return Formula::implies(std::move(lhs), parse_implication());
    }
    return lhs;
  }

  Formula parse_disjunction() {
    Formula acc = parse_conjunction();
    while (accept("|") || accept("∨") || accept_word("or")) {
      acc = Formula::disj(std::move(acc), parse_conjunction());
    }
    return acc;
  }

  Formula parse_conjunction() {
    Formula acc = parse_negation();
    while (accept("&") || accept("∧") || accept_word("and")) {
      acc = Formula::conj(std::move(acc), parse_negation());
    }
    return acc;
  }

  Formula parse_negation() {
    if (accept("~") || accept("¬") || accept_word("not")) {
      return Formula::negation(parse_negation());
    }
    if (!at("!=") && accept("!")) return Formula::negation(parse_negation());
    if (auto q = parse_quantifier()) return *q;

    const std::size_t start = pos_;
    try {
      return parse_equation();
    } catch (const ParseError& term_error) {
      pos_ = start;
      if (!accept("(")) throw;
      try {
        Formula inner = parse_formula();
        expect(")");
        return inner;
      } catch (const ParseError& formula_error) {
        if (term_error.position() > formula_error.position()) throw term_error;
        throw;
      }
    }
  }

  Formula parse_equation() {
    Term lhs = parse_term();
    if (accept("!=") || accept("≠")) return Formula::negation(Formula::eq(std::move(lhs), parse_term()));
    if (accept("=")) return Formula::eq(std::move(lhs), parse_term());
    fail("expected '='");
  }

  Term parse_term() {
    Term acc = parse_product();
    for (;;) {
      if (accept("+")) {
        acc = Term::add(std::move(acc), parse_product());
      } else if (accept_minus()) {
        acc = Term::add(std::move(acc), Term::neg(parse_product()));
      } else {
        return acc;
      }
    }
  }

  Term parse_product() {
    Term acc = parse_unary();
    while (accept("*") || accept("·") || accept("×")) acc = Term::mul(std::move(acc), parse_unary());
    return acc;
  }

  Term parse_unary() {
    if (accept_minus()) return Term::neg(parse_unary());
    skip_space();
    if (accept("(")) {
      Term inner = parse_term();
      expect(")");
      return inner;
    }
    if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])) != 0) {
      std::uint64_t value = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])) != 0) {
        auto digit = static_cast<std::uint64_t>(text_[pos_] - '0');
        if (value > (UINT64_MAX - digit) / 10) fail("integer literal too large");
        value = value * 10 + digit;
        ++pos_;
      }
      return Term::integer(value);
    }
    auto name = peek_word();
    if (!name || is_keyword(*name)) fail("expected a term");
    if (std::find(bound_.begin(), bound_.end(), *name) == bound_.end()) {
      free_.emplace(*name, pos_);
    }
    pos_ += name->size();
    return Term::var(*name);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<std::string> bound_;
  std::map<std::string, std::size_t> free_;
};

int term_precedence(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Add:
      return 1;
    case Term::Kind::Mul:
      return 2;
    case Term::Kind::Neg:
      return 3;
    default:
      return 4;
  }
}

std::string print_term(const Term& t, int context) {
  std::string out;
  switch (t.kind) {
    case Term::Kind::Var:
      out = t.name;
      break;
    case Term::Kind::Zero:
      out = "0";
      break;
    case Term::Kind::One:
      out = "1";
      break;
    case Term::Kind::Literal:
      out = std::to_string(t.literal);
      break;
    case Term::Kind::Neg:
      out = "-" + print_term(t.args[0], 3);
      break;
    case Term::Kind::Add:
      out = print_term(t.args[0], 1);
      if (t.args[1].kind == Term::Kind::Neg) {
        out += " - " + print_term(t.args[1].args[0], 2);
      } else {
        out += " + " + print_term(t.args[1], 2);
      }
      break;
    case Term::Kind::Mul:
      out = print_term(t.args[0], 2) + " * " + print_term(t.args[1], 3);
      break;
  }
  return term_precedence(t) < context ? "(" + out + ")" : out;
}

int formula_precedence(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      return 0;
    case Formula::Kind::Implies:
      return 1;
    case Formula::Kind::Or:
      return 2;
    case Formula::Kind::And:
      return 3;
    case Formula::Kind::Not:
      return 4;
    case Formula::Kind::Eq:
      return 5;
  }
  return 5;
}

std::string print_formula(const Formula& f, int context) {
  std::string out;
  switch (f.kind) {
    case Formula::Kind::Eq:
      out = print_term(f.terms[0], 0) + " = " + print_term(f.terms[1], 0);
      break;
    case Formula::Kind::Not:
      out = f.subs[0].kind == Formula::Kind::Eq ? "~(" + print_formula(f.subs[0], 0) + ")"
                                                : "~" + print_formula(f.subs[0], 4);
      break;
    case Formula::Kind::And:
      out = print_formula(f.subs[0], 3) + " & " + print_formula(f.subs[1], 4);
      break;
    case Formula::Kind::Or:
      out = print_formula(f.subs[0], 2) + " | " + print_formula(f.subs[1], 3);
      break;
    case Formula::Kind::Implies:
      out = print_formula(f.subs[0], 2) + " -> " + print_formula(f.subs[1], 1);
      break;
    case Formula::Kind::Exists:
      out = "exists " + f.var + ". " + print_formula(f.subs[0], 0);
      break;
    case Formula::Kind::Forall:
      out = "forall " + f.var + ". " + print_formula(f.subs[0], 0);
      break;
  }
  return formula_precedence(f) < context ? "(" + out + ")" : out;
}

void collect_free(const Formula& f, std::vector<std::string>& bound, std::set<std::string>& out) {
  switch (f.kind) {
    case Formula::Kind::Eq:
      for (const auto& t : f.terms) {
        for (const auto& v : variables(t)) {
          if (std::find(bound.begin(), bound.end(), v) == bound.end()) out.insert(v);
        }
      }
      return;
    case Formula::Kind::Exists:
    case Formula::Kind::Forall:
      bound.push_back(f.var);
      collect_free(f.subs[0], bound, out);
      bound.pop_back();
      return;
    default:
      for (const auto& s : f.subs) collect_free(s, bound, out);
  }
}

void collect_vars(const Term& t, std::set<std::string>& out) {
  if (t.kind == Term::Kind::Var) out.insert(t.name);
  for (const auto& a : t.args) collect_vars(a, out);
}

}  // namespace

Formula parse_formula(std::string_view text) { return FormulaParser(text).parse_all(); }

Formula parse_sentence(std::string_view text) {
  FormulaParser parser(text);
  Formula f = parser.parse_all();
  auto free = free_variables(f);
  if (!free.empty()) {
    const std::string& name = *free.begin();
    auto it = parser.free_occurrences().find(name);
    throw ParseError("unbound variable '" + name + "'",
                     it == parser.free_occurrences().end() ? 0 : it->second);
  }
  return f;
}

std::string to_string(const Term& t) { return print_term(t, 0); }
std::string to_string(const Formula& f) { return print_formula(f, 0); }

std::set<std::string> variables(const Term& t) {
  std::set<std::string> out;
  collect_vars(t, out);
  return out;
}

std::set<std::string> free_variables(const Formula& f) {
  std::vector<std::string> bound;
  std::set<std::string> out;
  collect_free(f, bound, out);
  return out;
}

int quantifier_depth(const Formula& f) {
  int inner = 0;
  for (const auto& s : f.subs) inner = std::max(inner, quantifier_depth(s));
  bool quantifier = f.kind == Formula::Kind::Exists || f.kind == Formula::Kind::Forall;
  return inner + (quantifier ? 1 : 0);
}

bool is_sentence(const Formula& f) { return free_variables(f).empty(); }

}  // namespace ultraprod
