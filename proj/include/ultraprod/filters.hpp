#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ultraprod/definable_set.hpp"
#include "ultraprod/errors.hpp"

namespace ultraprod {

/// Raised when a list of assumptions has a finite intersection, so no
/// non-principal ultrafilter can contain all of them.
class InconsistentFilterBase : public Error {
 public:
  explicit InconsistentFilterBase(DefinableSet witness)
      : Error("inconsistent filter base: assumptions intersect in " + witness.to_string()),
        witness_(std::move(witness)) {}

  const DefinableSet& witness() const noexcept { return witness_; }

 private:
  DefinableSet witness_;
};

struct FilterBaseCheck {
  bool ok = true;
  /// Intersection of all assumptions; the finite witness when !ok.
  DefinableSet intersection = DefinableSet::all();
};

/// Decides whether the assumptions extend to a non-principal ultrafilter.
/// An empty list is always consistent.
FilterBaseCheck check_filter_base(const std::vector<DefinableSet>& assumptions);

/// Which ultrafilter a statement is judged against.
///
/// Principal(p) is the ultrafilter of sets containing p. Generic stands for
/// an unspecified non-principal ultrafilter. Constrained is a non-principal
/// ultrafilter known to contain each assumption; since such an ultrafilter is
/// never materialized, undecided sets come back Contingent.
class FilterSpec {
 public:
  enum class Kind { Principal, Generic, Constrained };

  static FilterSpec principal(std::uint64_t prime);
  static FilterSpec generic();
  /// Throws InconsistentFilterBase. An empty list yields generic().
  static FilterSpec constrained(std::vector<DefinableSet> assumptions);

  /// `generic`, `principal:<p>`, or `constrained` (uses `assumptions`).
  /// A nonempty assumption list turns `generic` into a constrained spec.
  static FilterSpec parse(std::string_view text, const std::vector<DefinableSet>& assumptions = {});

  Kind kind() const noexcept { return kind_; }
  bool is_principal() const noexcept { return kind_ == Kind::Principal; }
  std::uint64_t prime() const;
  const std::vector<DefinableSet>& assumptions() const noexcept { return assumptions_; }
  /// Intersection of the assumptions; all primes for Generic.
  const DefinableSet& base() const noexcept { return base_; }

  std::string to_string() const;

 private:
  FilterSpec() = default;

  Kind kind_ = Kind::Generic;
  std::uint64_t prime_ = 0;
  std::vector<DefinableSet> assumptions_;
  DefinableSet base_ = DefinableSet::all();
};

enum class Truth { ForcedTrue, ForcedFalse, Contingent };

std::string_view to_string(Truth t);
Truth negate(Truth t);

struct Provenance {
  enum class Kind { Exact, Empirical };
  Kind kind = Kind::Exact;
  /// Window bound the evidence was gathered on; 0 for Exact.
  std::uint64_t window = 0;

  static Provenance exact() { return {}; }
  static Provenance empirical(std::uint64_t window) { return {Kind::Empirical, window}; }
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct Verdict {
  Truth value = Truth::Contingent;
  /// When Contingent: the set on which the statement holds, intersected
  /// with the filter base. Absent for empirical verdicts whose sample did
  /// not stabilize into residue classes.
  std::optional<DefinableSet> decomposition;
  Provenance provenance;
  /// Observed residue-class pattern for empirical verdicts.
  std::string pattern;

  bool forced() const noexcept { return value != Truth::Contingent; }
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

/// Membership of `set` in the ultrafilter described by `filter`.
Verdict classify(const DefinableSet& set, const FilterSpec& filter);

/// Verdicts for each block of a partition of the primes. Throws DomainError
/// if the blocks overlap or miss a prime.
std::vector<Verdict> partition_verdicts(const std::vector<DefinableSet>& parts,
                                        const FilterSpec& filter);

}  // namespace ultraprod
