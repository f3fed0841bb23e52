#pragma once

#include <cstdint>
#include <random>

#include "ultraprod/definable_set.hpp"
#include "ultraprod/formula.hpp"
#include "ultraprod/proto.hpp"
#include "ultraprod/ultra.hpp"

namespace ultraprod::gen {

// Random inputs shared by the property tests and the `check` command.
// Everything is driven by a single seeded engine, so a seed reproduces a
// run exactly.
using Rng = std::mt19937_64;

/// A closed formula of quantifier depth at most `max_depth`.
Formula sentence(Rng& rng, int max_depth = 3);

/// A term over the given variables, at most `depth` operators deep.
Term term(Rng& rng, const std::vector<std::string>& vars, int depth);

/// A set with a small modulus and a few corrections below 100.
DefinableSet definable_set(Rng& rng);

/// A rule of degree at most `max_degree` with small rational coefficients
/// and up to `max_exceptions` exceptions at small primes.
ValueRule rule(Rng& rng, int max_degree = 3, int max_exceptions = 0, bool integral = false);

/// An integer-valued rule with non-negative leading coefficient.
ValueRule nat_rule(Rng& rng, int max_degree = 3);

/// A sequence of bounded degree: constant-exponent terms up to
/// `max_degree`, sometimes plus a growing-exponent term whose coefficient
/// vanishes in the limit.
BoundedPolySequence bounded_sequence(Rng& rng, int max_terms = 3, int max_degree = 3);

/// A sequence with a bounded number of monomials and growing exponents.
BoundedPolySequence sparse_sequence(Rng& rng, int max_terms = 3);

}  // namespace ultraprod::gen
