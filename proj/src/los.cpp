#include "ultraprod/los.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "ultraprod/errors.hpp"
#include "ultraprod/primes.hpp"

namespace ultraprod {
namespace {

using IntPoly = std::vector<mpz_class>;

constexpr std::uint64_t kMaxQuadraticModulus = 100'000;

void trim(IntPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

IntPoly poly_add(const IntPoly& a, const IntPoly& b) {
  IntPoly out(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  trim(out);
  return out;
}

IntPoly poly_neg(IntPoly a) {
  for (auto& c : a) c = -c;
  return a;
}

IntPoly poly_mul(const IntPoly& a, const IntPoly& b) {
  if (a.empty() || b.empty()) return {};
  IntPoly out(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  trim(out);
  return out;
}

// Integer polynomial in `var` denoted by a term, or nullopt if the term
// mentions any other variable.
std::optional<IntPoly> as_polynomial(const Term& t, const std::string& var) {
  switch (t.kind) {
    case Term::Kind::Var:
      if (t.name != var) return std::nullopt;
      return IntPoly{0, 1};
    case Term::Kind::Zero:
      return IntPoly{};
    case Term::Kind::One:
      return IntPoly{1};
    case Term::Kind::Literal:
      return IntPoly{mpz_class(static_cast<unsigned long>(t.literal))};
    case Term::Kind::Neg: {
      auto a = as_polynomial(t.args[0], var);
      if (!a) return std::nullopt;
      return poly_neg(std::move(*a));
    }
    case Term::Kind::Add:
    case Term::Kind::Mul: {
      auto a = as_polynomial(t.args[0], var);
      auto b = as_polynomial(t.args[1], var);
      if (!a || !b) return std::nullopt;
      return t.kind == Term::Kind::Add ? poly_add(*a, *b) : poly_mul(*a, *b);
    }
  }
  return std::nullopt;
}

std::optional<IntPoly> equation_difference(const Formula& eq, const std::string& var) {
  auto lhs = as_polynomial(eq.terms[0], var);
  auto rhs = as_polynomial(eq.terms[1], var);
  if (!lhs || !rhs) return std::nullopt;
  return poly_add(*lhs, poly_neg(*rhs));
}

bool is_square_mod(const mpz_class& value, std::uint64_t q) {
  std::uint64_t target = mod_u64(value, q);
  for (std::uint64_t y = 0; y < q; ++y) {
    if (y * y % q == target) return true;
  }
  return false;
}

class Recognizer {
 public:
  Recognizer(const StructureFamily& family, const LosOptions& options)
      : family_(family), options_(options),
        precision_(family.kind() == StructureFamily::Kind::TruncatedPadic ? family.parameter() : 1) {}

  std::optional<DefinableSet> recognize(const Formula& f) {
    switch (f.kind) {
      case Formula::Kind::Not: {
        auto inner = recognize(f.subs[0]);
        if (!inner) return std::nullopt;
        return inner->complement();
      }
      case Formula::Kind::And:
      case Formula::Kind::Or:
      case Formula::Kind::Implies: {
        auto a = recognize(f.subs[0]);
        if (!a) return std::nullopt;
        auto b = recognize(f.subs[1]);
        if (!b) return std::nullopt;
        if (f.kind == Formula::Kind::And) return a->intersect(*b);
        if (f.kind == Formula::Kind::Or) return a->unite(*b);
        return a->complement().unite(*b);
      }
      case Formula::Kind::Eq: {
        auto diff = equation_difference(f, {});
        if (!diff) return std::nullopt;
        return closed_equation(diff->empty() ? mpz_class(0) : (*diff)[0]);
      }
      case Formula::Kind::Exists:
      case Formula::Kind::Forall:
        return quantified(f.kind == Formula::Kind::Exists, f.var, f.subs[0]);
    }
    return std::nullopt;
  }

 private:
  // Pushes the quantifier through the connectives where that is sound over
  // a nonempty domain: exists over |, forall over &, either over a side
  // that does not mention the variable, and duality through ~.
  std::optional<DefinableSet> quantified(bool exists, const std::string& var, const Formula& body) {
    auto again = [&](const Formula& sub) { return quantified(exists, var, sub); };
    auto mentions = [&](const Formula& sub) { return free_variables(sub).count(var) != 0; };
    if (!mentions(body)) return recognize(body);
    switch (body.kind) {
      case Formula::Kind::Eq: {
        if (!exists) return std::nullopt;
        auto diff = equation_difference(body, var);
        if (!diff || diff->size() > 3) return std::nullopt;
        return root_set(*diff, Formula::exists(var, body));
      }
      case Formula::Kind::Not: {
        auto inner = quantified(!exists, var, body.subs[0]);
        if (!inner) return std::nullopt;
        return inner->complement();
      }
      case Formula::Kind::And:
      case Formula::Kind::Or:
      case Formula::Kind::Implies: {
        const bool is_or = body.kind != Formula::Kind::And;
        const Formula left = body.kind == Formula::Kind::Implies ? Formula::negation(body.subs[0]) : body.subs[0];
        const Formula& right = body.subs[1];
        // exists distributes over |, forall over &.
        if (exists == is_or || !mentions(left) || !mentions(right)) {
          auto a = mentions(left) ? again(left) : recognize(left);
          if (!a) return std::nullopt;
          auto b = mentions(right) ? again(right) : recognize(right);
          if (!b) return std::nullopt;
          return is_or ? a->unite(*b) : a->intersect(*b);
        }
        return std::nullopt;
      }
      default:
        return std::nullopt;
    }
  }

  // {q : q^k divides d}.
  DefinableSet closed_equation(const mpz_class& d) const {
    if (d == 0) return DefinableSet::all();
    auto truth = [&](std::uint64_t q) {
      mpz_class qk;
      mpz_ui_pow_ui(qk.get_mpz_t(), q, precision_);
      return mpz_divisible_p(d.get_mpz_t(), qk.get_mpz_t()) != 0;
    };
    return DefinableSet::build(1, [](std::uint64_t) { return false; }, truth, prime_factors(d));
  }

  // Primes at which `sentence` (exists x. c(x) = 0) holds. Away from the
  // primes dividing the leading data every root is simple, so solvability
  // mod p^k matches solvability mod p; the rest are evaluated directly.
  std::optional<DefinableSet> root_set(IntPoly c, const Formula& sentence) {
    trim(c);
    if (c.empty()) return DefinableSet::all();
    if (c.size() == 1) return closed_equation(c[0]);

    std::vector<std::uint64_t> special;
    std::uint64_t modulus = 1;
    std::vector<std::uint64_t> residues{0};
    if (c.size() == 2) {
      special = prime_factors(c[1]);
    } else {
      const mpz_class disc = c[1] * c[1] - 4 * c[2] * c[0];
      if (disc == 0) {
        special = prime_factors(mpz_class(2 * c[2]));
      } else {
        special = prime_factors(mpz_class(2 * c[2] * disc));
        const mpz_class m = 4 * abs(disc);
        if (m > kMaxQuadraticModulus) return std::nullopt;
        modulus = m.get_ui();
        auto classes = quadratic_classes(disc, modulus, special);
        if (!classes) return std::nullopt;
        residues = std::move(*classes);
      }
    }

    std::map<std::uint64_t, bool> direct;
    for (std::uint64_t q : special) {
      auto size = family_.size_at(q);
      if (!size || *size > options_.limits.quantifier_cap) return std::nullopt;
      direct[q] = eval_finite(family_.materialize(q), sentence, {}, options_.limits);
    }
    auto in_class = [&](std::uint64_t r) {
      return std::binary_search(residues.begin(), residues.end(), r);
    };
    auto truth = [&](std::uint64_t q) {
      if (auto it = direct.find(q); it != direct.end()) return it->second;
      return in_class(q % modulus);
    };
    return DefinableSet::build(modulus, in_class, truth, special);
  }

  // Unit residues r mod `modulus` whose primes see `disc` as a square,
  // decided by exhaustive squaring at witness primes of each class.
  std::optional<std::vector<std::uint64_t>> quadratic_classes(
      const mpz_class& disc, std::uint64_t modulus, const std::vector<std::uint64_t>& special) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t r : unit_residues(modulus)) {
      std::optional<bool> seen;
      int witnesses = 0;
      for (std::uint64_t q = r; q <= options_.witness_bound && witnesses < 2; q += modulus) {
        if (!is_prime(q) || std::binary_search(special.begin(), special.end(), q)) continue;
        bool square = is_square_mod(disc, q);
        if (seen && *seen != square) {
          throw ClassifierMismatch("quadratic character of " + disc.get_str() +
                                   " is not constant on " + std::to_string(r) + " mod " +
                                   std::to_string(modulus));
        }
        seen = square;
        ++witnesses;
      }
      if (!seen) return std::nullopt;
      if (*seen) out.push_back(r);
    }
    return out;
  }

  const StructureFamily& family_;
  const LosOptions& options_;
  std::uint64_t precision_;
};

std::string pattern_text(const std::map<std::uint64_t, std::string>& classes,
                         std::uint64_t modulus) {
  std::ostringstream out;
  out << "mod " << modulus << ":";
  for (const auto& [r, state] : classes) out << ' ' << r << '=' << state;
  return out.str();
}

}  // namespace

std::optional<ExactTruthSet> exact_truth_set(const StructureFamily& family,
                                             const Formula& sentence,
                                             const LosOptions& options) {
  if (!is_sentence(sentence)) throw DomainError("exact_truth_set needs a sentence");
  if (!family.depends_on_index()) {
    bool holds = eval_finite(family.materialize(2), sentence, {}, options.limits);
    return ExactTruthSet{holds ? DefinableSet::all() : DefinableSet::none(), "constant-family"};
  }
  Recognizer recognizer(family, options);
  auto set = recognizer.recognize(sentence);
  if (!set) return std::nullopt;
  return ExactTruthSet{std::move(*set), "ring-sentences"};
}

bool SampledTruthSet::at(std::uint64_t prime) const {
  auto it = std::lower_bound(primes.begin(), primes.end(), prime);
  if (it == primes.end() || *it != prime) {
    throw DomainError(std::to_string(prime) + " is not a prime of the window");
  }
  return bits[static_cast<std::size_t>(it - primes.begin())];
}

SampledTruthSet truth_set(const StructureFamily& family, const Formula& sentence,
                          std::uint64_t window, const LosOptions& options) {
  if (!is_sentence(sentence)) throw DomainError("truth_set needs a sentence");
  SampledTruthSet out;
  out.window = window;
  out.primes = primes_up_to(window);
  out.bits.reserve(out.primes.size());
  for (std::uint64_t p : out.primes) {
    out.bits.push_back(eval_finite(family.materialize(p), sentence, {}, options.limits));
  }
  if (auto exact = exact_truth_set(family, sentence, options)) {
    for (std::size_t i = 0; i < out.primes.size(); ++i) {
      if (exact->set.contains(out.primes[i]) != out.bits[i]) {
        throw ClassifierMismatch("classifier " + exact->classifier + " says " +
                                 exact->set.to_string() + " but p=" +
                                 std::to_string(out.primes[i]) + " evaluates to " +
                                 (out.bits[i] ? "true" : "false") + " for " + to_string(sentence));
      }
    }
    out.exact = std::move(exact->set);
    out.classifier = std::move(exact->classifier);
  }
  return out;
}

Verdict empirical_verdict(const SampledTruthSet& sample, const FilterSpec& filter,
                          std::uint64_t modulus) {
  if (modulus == 0) throw DomainError("empirical modulus must be positive");
  std::map<std::uint64_t, std::optional<bool>> observed;
  std::map<std::uint64_t, std::string> states;
  for (std::uint64_t r : unit_residues(modulus)) {
    observed[r];
    states[r] = "unseen";
  }
  bool mixed = false;
  for (std::size_t i = 0; i < sample.primes.size(); ++i) {
    std::uint64_t p = sample.primes[i];
    if (2 * p <= sample.window || (modulus > 1 && modulus % p == 0)) continue;
    std::uint64_t r = p % modulus;
    auto& slot = observed[r];
    if (!slot) {
      slot = sample.bits[i];
      states[r] = sample.bits[i] ? "T" : "F";
    } else if (*slot != sample.bits[i]) {
      states[r] = "mixed";
      mixed = true;
    }
  }

  std::vector<std::uint64_t> true_classes;
  bool any_true = false;
  bool any_false = false;
  bool any_unseen = false;
  for (const auto& [r, value] : observed) {
    if (!value) {
      any_unseen = true;
    } else if (*value) {
      any_true = true;
      true_classes.push_back(r);
    } else {
      any_false = true;
    }
  }

  Verdict v;
  v.provenance = Provenance::empirical(sample.window);
  v.pattern = pattern_text(states, modulus);
  if (mixed || (!any_true && !any_false) || (any_unseen && any_true && any_false)) {
    v.value = Truth::Contingent;
    return v;
  }
  // Unseen classes follow the unanimous observed value.
  DefinableSet eventual = any_true && !any_false
                              ? DefinableSet::all()
                              : DefinableSet::residue_classes(modulus, true_classes);
  Verdict exact = classify(eventual, filter);
  v.value = exact.value;
  v.decomposition = std::move(exact.decomposition);
  return v;
}

Verdict los_verdict(const StructureFamily& family, const Formula& sentence,
                    const FilterSpec& filter, std::uint64_t window, const LosOptions& options) {
  if (!is_sentence(sentence)) throw DomainError("los_verdict needs a sentence");
  if (filter.is_principal()) {
    const std::uint64_t p = filter.prime();
    const bool holds = eval_finite(family.materialize(p), sentence, {}, options.limits);
    if (auto exact = exact_truth_set(family, sentence, options)) {
      if (exact->set.contains(p) != holds) {
        throw ClassifierMismatch("classifier " + exact->classifier + " disagrees at p=" +
                                 std::to_string(p) + " for " + to_string(sentence));
      }
    }
    Verdict v;
    v.value = holds ? Truth::ForcedTrue : Truth::ForcedFalse;
    return v;
  }
  SampledTruthSet sample = truth_set(family, sentence, window, options);
  if (sample.exact) return classify(*sample.exact, filter);
  return empirical_verdict(sample, filter, options.empirical_modulus);
}

std::string_view to_string(TransferReport::Conclusion c) {
  switch (c) {
    case TransferReport::Conclusion::Equivalent:
      return "asymptotically equivalent";
    case TransferReport::Conclusion::NotEquivalent:
      return "not asymptotically equivalent";
    case TransferReport::Conclusion::Undetermined:
      return "undetermined";
  }
  return "undetermined";
}

TransferReport transfer_report(const StructureFamily& a, const StructureFamily& b,
                               const Formula& sentence, std::uint64_t window,
                               const LosOptions& options) {
  TransferReport report{a, b, sentence, window};
  report.truth_a = truth_set(a, sentence, window, options);
  report.truth_b = truth_set(b, sentence, window, options);
  const FilterSpec generic = FilterSpec::generic();
  auto verdict_of = [&](const SampledTruthSet& s) {
    return s.exact ? classify(*s.exact, generic)
                   : empirical_verdict(s, generic, options.empirical_modulus);
  };
  report.verdict_a = verdict_of(report.truth_a);
  report.verdict_b = verdict_of(report.truth_b);
  for (std::size_t i = 0; i < report.truth_a.primes.size(); ++i) {
    if (report.truth_a.bits[i] != report.truth_b.bits[i]) {
      report.exceptional_primes.push_back(report.truth_a.primes[i]);
    }
  }
  if (report.truth_a.exact && report.truth_b.exact) {
    const DefinableSet& sa = *report.truth_a.exact;
    const DefinableSet& sb = *report.truth_b.exact;
    report.difference = sa.minus(sb).unite(sb.minus(sa));
    report.conclusion = report.difference->is_finite(options.witness_bound)
                            ? TransferReport::Conclusion::Equivalent
                            : TransferReport::Conclusion::NotEquivalent;
  } else {
    report.notes.push_back("at least one truth set is empirical; no exact conclusion");
  }
  for (const auto* family : {&a, &b}) {
    if (auto note = family->note(); !note.empty()) report.notes.push_back(note);
  }
  return report;
}

}  // namespace ultraprod
