#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace ultraprod {

/// Default search bound for the per-class prime witness that backs the
/// Dirichlet axiom.
inline constexpr std::uint64_t kDefaultWitnessBound = 1'000'000;

/// A subset of the primes given by unit residue classes modulo M together
/// with finitely many added and removed primes.
///
/// A prime q belongs to the set iff q is in include(), or q does not divide
/// M, q mod M is in classes() and q is not in exclude(). Every value is kept
/// in normal form: M is the least modulus realizing the class set, include
/// holds only primes outside the class part, and exclude only primes inside
/// it. Two sets are extensionally equal iff their normal forms are equal.
///
/// Each retained class is assumed to contain infinitely many primes
/// (Dirichlet). The assumption is checked by exhibiting a witness prime per
/// class whenever finiteness is decided.
class DefinableSet {
 public:
  /// The empty set.
  DefinableSet();

  static DefinableSet all();
  static DefinableSet none();
  /// Throws DomainError if some entry is not prime.
  static DefinableSet finite(std::vector<std::uint64_t> primes);
  /// Primes congruent to one of `residues` mod `modulus`. Residues sharing a
  /// factor with the modulus are allowed; each such class holds at most one
  /// prime, which is folded into the finite part.
  static DefinableSet residue_classes(std::uint64_t modulus,
                                      std::vector<std::uint64_t> residues);

  /// Normalizing constructor. `in_class(r)` decides membership of each unit
  /// residue r mod `modulus`; `truth(q)` is the exact membership of prime q.
  /// `truth` may differ from the class rule only at primes dividing
  /// `modulus` or listed in `candidates`.
  static DefinableSet build(std::uint64_t modulus,
                            const std::function<bool(std::uint64_t)>& in_class,
                            const std::function<bool(std::uint64_t)>& truth,
                            std::vector<std::uint64_t> candidates);

  /// Parses the canonical text form plus the boolean operators accepted
  /// on the command line; see README for the grammar.
  static DefinableSet parse(std::string_view text);

  std::uint64_t modulus() const noexcept { return modulus_; }
  const std::vector<std::uint64_t>& classes() const noexcept { return classes_; }
  const std::vector<std::uint64_t>& include() const noexcept { return include_; }
  const std::vector<std::uint64_t>& exclude() const noexcept { return exclude_; }

  bool contains(std::uint64_t prime) const;
  bool in_class_part(std::uint64_t prime) const;

  DefinableSet complement() const;
  DefinableSet intersect(const DefinableSet& other) const;
  DefinableSet unite(const DefinableSet& other) const;
  DefinableSet minus(const DefinableSet& other) const;
  bool subset_of(const DefinableSet& other) const;

  /// True iff no residue class is retained. Verifies one witness prime per
  /// retained class below `witness_bound` and throws AxiomWitnessFailure
  /// otherwise.
  bool is_finite(std::uint64_t witness_bound = kDefaultWitnessBound) const;
  bool is_cofinite(std::uint64_t witness_bound = kDefaultWitnessBound) const;
  bool is_empty() const;

  /// Least prime of each retained class, in class order.
  std::vector<std::uint64_t> class_witnesses(
      std::uint64_t witness_bound = kDefaultWitnessBound) const;

  /// Members of a finite set. Throws DomainError if the set is infinite.
  std::vector<std::uint64_t> finite_members() const;

  /// Canonical text, e.g. `(1 mod 4) + {2} - {5}`.
  std::string to_string() const;

  friend bool operator==(const DefinableSet&, const DefinableSet&) = default;

 private:
  DefinableSet combine(const DefinableSet& other,
                       const std::function<bool(bool, bool)>& op) const;

  std::uint64_t modulus_ = 1;
  std::vector<std::uint64_t> classes_;
  std::vector<std::uint64_t> include_;
  std::vector<std::uint64_t> exclude_;
};

}  // namespace ultraprod
