#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ultraprod/definable_set.hpp"
#include "ultraprod/evaluator.hpp"
#include "ultraprod/filters.hpp"
#include "ultraprod/formula.hpp"
#include "ultraprod/structures.hpp"

namespace ultraprod {

struct LosOptions {
  EvalLimits limits;
  /// Residue modulus used to read an eventual pattern off a sampled bitmap.
  std::uint64_t empirical_modulus = 24;
  std::uint64_t witness_bound = kDefaultWitnessBound;
};

/// The exact set of primes at which a sentence holds, with the name of the
/// recognizer that produced it.
struct ExactTruthSet {
  DefinableSet set;
  std::string classifier;
};

/// Exact truth set from the classifier registry, or nullopt when no
/// recognizer applies. Recognized shapes, closed under ~, &, |, ->:
///   - any sentence over a family that does not depend on the index;
///   - closed equations s = t (the characteristic sentences n*1 = 0);
///   - exists x. P(x) = Q(x) with P - Q of degree <= 2 in x, and
///     forall x. ~(P(x) = Q(x)), over Fp and Zp^k.
/// Finitely many exceptional primes are settled by direct evaluation.
std::optional<ExactTruthSet> exact_truth_set(const StructureFamily& family,
                                             const Formula& sentence,
                                             const LosOptions& options = {});

/// Per-prime truth on all primes up to `window`, with the exact set attached
/// and cross-checked when a classifier fires.
struct SampledTruthSet {
  std::uint64_t window = 0;
  std::vector<std::uint64_t> primes;
  std::vector<bool> bits;
  std::optional<DefinableSet> exact;
  std::string classifier;

  /// Truth at a prime of the window. Throws DomainError otherwise.
  bool at(std::uint64_t prime) const;
};

SampledTruthSet truth_set(const StructureFamily& family, const Formula& sentence,
                          std::uint64_t window, const LosOptions& options = {});

/// Verdict read from the eventual residue pattern of a bitmap. Always
/// carries Empirical provenance.
Verdict empirical_verdict(const SampledTruthSet& sample, const FilterSpec& filter,
                          std::uint64_t modulus);

/// Truth of `sentence` in the ultraproduct of `family` over `filter`.
/// Exact when a classifier recognizes the sentence or the filter is
/// principal; otherwise empirical evidence from the window.
Verdict los_verdict(const StructureFamily& family, const Formula& sentence,
                    const FilterSpec& filter, std::uint64_t window,
                    const LosOptions& options = {});

struct TransferReport {
  enum class Conclusion { Equivalent, NotEquivalent, Undetermined };

  StructureFamily family_a;
  StructureFamily family_b;
  Formula sentence;
  std::uint64_t window = 0;
  SampledTruthSet truth_a;
  SampledTruthSet truth_b;
  Verdict verdict_a;
  Verdict verdict_b;
  /// Primes of the window where the two families disagree.
  std::vector<std::uint64_t> exceptional_primes;
  /// Exact symmetric difference of the truth sets, when both are exact.
  std::optional<DefinableSet> difference;
  Conclusion conclusion = Conclusion::Undetermined;
  std::vector<std::string> notes;
};

std::string_view to_string(TransferReport::Conclusion c);

/// Compares two families on one sentence. They are asymptotically
/// equivalent for the sentence iff both truth sets are exact and differ in
/// finitely many primes.
TransferReport transfer_report(const StructureFamily& a, const StructureFamily& b,
                               const Formula& sentence, std::uint64_t window,
                               const LosOptions& options = {});

}  // namespace ultraprod
