#include "ultraprod/generators.hpp"

#include <algorithm>

#include "ultraprod/primes.hpp"

namespace ultraprod::gen {
namespace {

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

const std::vector<std::uint64_t>& small_primes() {
  static const std::vector<std::uint64_t> primes = primes_up_to(100);
  return primes;
}

Formula formula(Rng& rng, std::vector<std::string>& bound, int depth_left, int size_left) {
  const int choice = uniform(rng, 0, 9);
  if (depth_left > 0 && (choice < 4 || bound.empty())) {
    std::string var = "x" + std::to_string(bound.size());
    bound.push_back(var);
    Formula body = formula(rng, bound, depth_left - 1, size_left - 1);
    bound.pop_back();
    return coin(rng) ? Formula::exists(var, std::move(body)) : Formula::forall(var, std::move(body));
  }
  if (size_left > 0 && choice < 6) return Formula::negation(formula(rng, bound, depth_left, size_left - 1));
  if (size_left > 1 && choice < 8) {
    // Only one side keeps the quantifier budget so depth stays bounded
    // and evaluation cost stays linear in the sentence size.
    Formula a = formula(rng, bound, depth_left, size_left / 2);
    Formula b = formula(rng, bound, 0, size_left / 2);
    if (coin(rng)) std::swap(a, b);
    switch (uniform(rng, 0, 2)) {
      case 0: return Formula::conj(std::move(a), std::move(b));
      case 1: return Formula::disj(std::move(a), std::move(b));
      default: return Formula::implies(std::move(a), std::move(b));
    }
  }
  return Formula::eq(term(rng, bound, 2), term(rng, bound, 2));
}

mpq_class small_rational(Rng& rng, bool integral) {
  mpq_class c(uniform(rng, -6, 6), integral ? 1 : uniform(rng, 1, 3));
  c.canonicalize();
  return c;
}

}  // namespace

Term term(Rng& rng, const std::vector<std::string>& vars, int depth) {
  const int choice = uniform(rng, 0, depth > 0 ? 9 : 4);
  if (choice <= 1 && !vars.empty()) return Term::var(vars[uniform(rng, 0, static_cast<int>(vars.size()) - 1)]);
  if (choice <= 1) return Term::integer(static_cast<std::uint64_t>(uniform(rng, 0, 3)));
  if (choice == 2) return Term::zero();
  if (choice == 3) return Term::one();
  if (choice == 4) return Term::integer(static_cast<std::uint64_t>(uniform(rng, 2, 5)));
  if (choice == 5) return Term::neg(term(rng, vars, depth - 1));
  if (choice <= 7) return Term::add(term(rng, vars, depth - 1), term(rng, vars, depth - 1));
  return Term::mul(term(rng, vars, depth - 1), term(rng, vars, depth - 1));
}

Formula sentence(Rng& rng, int max_depth) {
  std::vector<std::string> bound;
  return formula(rng, bound, uniform(rng, 0, max_depth), 6);
}

DefinableSet definable_set(Rng& rng) {
  static const std::uint64_t moduli[] = {1, 2, 3, 4, 5, 6, 8, 10, 12, 15, 24};
  const std::uint64_t m = moduli[uniform(rng, 0, 10)];
  std::vector<std::uint64_t> residues;
  for (std::uint64_t r : unit_residues(m)) {
    if (coin(rng)) residues.push_back(r);
  }
  DefinableSet s = DefinableSet::residue_classes(m, residues);
  const auto& primes = small_primes();
  std::vector<std::uint64_t> extra;
  for (int i = uniform(rng, 0, 3); i > 0; --i) extra.push_back(primes[uniform(rng, 0, static_cast<int>(primes.size()) - 1)]);
  std::vector<std::uint64_t> removed;
  for (int i = uniform(rng, 0, 3); i > 0; --i) removed.push_back(primes[uniform(rng, 0, static_cast<int>(primes.size()) - 1)]);
  return s.unite(DefinableSet::finite(extra)).minus(DefinableSet::finite(removed));
}

ValueRule rule(Rng& rng, int max_degree, int max_exceptions, bool integral) {
  std::vector<mpq_class> coefficients;
  for (int i = uniform(rng, 0, max_degree); i >= 0; --i) coefficients.push_back(small_rational(rng, integral));
  std::map<std::uint64_t, mpq_class> exceptions;
  const auto& primes = small_primes();
  for (int i = uniform(rng, 0, max_exceptions); i > 0; --i) {
    exceptions[primes[uniform(rng, 0, 9)]] = small_rational(rng, integral);
  }
  return ValueRule(RationalPoly::from_coefficients(coefficients), std::move(exceptions));
}

ValueRule nat_rule(Rng& rng, int max_degree) {
  std::vector<mpq_class> coefficients;
  const int degree = uniform(rng, 0, max_degree);
  for (int i = 0; i < degree; ++i) coefficients.push_back(uniform(rng, -9, 9));
  coefficients.push_back(degree == 0 ? uniform(rng, 0, 20) : uniform(rng, 1, 9));
  return ValueRule(RationalPoly::from_coefficients(coefficients));
}

BoundedPolySequence bounded_sequence(Rng& rng, int max_terms, int max_degree) {
  std::vector<SequenceTerm> terms;
  for (int i = uniform(rng, 1, max_terms); i > 0; --i) {
    terms.push_back({rule(rng, 2), ValueRule::constant(uniform(rng, 0, max_degree))});
  }
  if (uniform(rng, 0, 1) == 1) {
    terms.push_back({ValueRule::index() * rule(rng, 1), nat_rule(rng, 2) + ValueRule::index()});
  }
  return BoundedPolySequence::from_terms(std::move(terms));
}

BoundedPolySequence sparse_sequence(Rng& rng, int max_terms) {
  std::vector<SequenceTerm> terms;
  for (int i = uniform(rng, 1, max_terms); i > 0; --i) terms.push_back({rule(rng, 2), nat_rule(rng, 2)});
  return BoundedPolySequence::from_terms(std::move(terms));
}

}  // namespace ultraprod::gen
