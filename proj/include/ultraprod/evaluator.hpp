#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "ultraprod/formula.hpp"
#include "ultraprod/structures.hpp"

namespace ultraprod {

struct EvalLimits {
  /// Largest domain a single quantifier may sweep.
  std::uint64_t quantifier_cap = 100'000;
  /// Total quantifier assignments allowed for one evaluation.
  std::uint64_t work_budget = 2'000'000'000;
};

using Assignment = std::map<std::string, Element>;

/// Tarskian truth of `formula` in `ring` by exhaustive enumeration of every
/// quantifier. Throws DomainError for an unassigned free variable and
/// CapExceeded when a limit would be crossed.
bool eval_finite(const FiniteRing& ring, const Formula& formula, const Assignment& env = {},
                 const EvalLimits& limits = {});

/// Value of a closed or fully assigned term.
Element eval_term(const FiniteRing& ring, const Term& term, const Assignment& env = {});

}  // namespace ultraprod
