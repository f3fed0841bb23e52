#include "ultraprod/filters.hpp"

#include <charconv>

#include "ultraprod/primes.hpp"

namespace ultraprod {

FilterBaseCheck check_filter_base(const std::vector<DefinableSet>& assumptions) {
  FilterBaseCheck result;
  for (const auto& a : assumptions) result.intersection = result.intersection.intersect(a);
  result.ok = !result.intersection.is_finite();
  return result;
}

FilterSpec FilterSpec::principal(std::uint64_t prime) {
  if (!is_prime(prime)) throw DomainError("principal filter index " + std::to_string(prime) + " is not prime");
  FilterSpec f;
  f.kind_ = Kind::Principal;
  f.prime_ = prime;
  f.base_ = DefinableSet::finite({prime});
  return f;
}

FilterSpec FilterSpec::generic() { return FilterSpec(); }

FilterSpec FilterSpec::constrained(std::vector<DefinableSet> assumptions) {
  if (assumptions.empty()) return generic();
  FilterBaseCheck check = check_filter_base(assumptions);
  if (!check.ok) throw InconsistentFilterBase(check.intersection);
  FilterSpec f;
  f.kind_ = Kind::Constrained;
  f.assumptions_ = std::move(assumptions);
  f.base_ = std::move(check.intersection);
  return f;
}

FilterSpec FilterSpec::parse(std::string_view text, const std::vector<DefinableSet>& assumptions) {
  if (text == "generic" || text == "constrained") return constrained(assumptions);
  constexpr std::string_view kPrincipal = "principal:";
  if (text.substr(0, kPrincipal.size()) == kPrincipal) {
    if (!assumptions.empty()) {
      throw ParseError("assumptions cannot be combined with a principal filter", 0);
    }
    std::string_view digits = text.substr(kPrincipal.size());
    std::uint64_t p = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), p);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) {
      throw ParseError("bad principal index '" + std::string(digits) + "'", kPrincipal.size());
    }
    if (!is_prime(p)) {
      throw ParseError("principal index " + std::to_string(p) + " is not prime", kPrincipal.size());
    }
    return principal(p);
  }
  throw ParseError("unknown filter '" + std::string(text) + "'", 0);
}

std::uint64_t FilterSpec::prime() const {
  if (kind_ != Kind::Principal) throw DomainError("filter is not principal");
  return prime_;
}

std::string FilterSpec::to_string() const {
  switch (kind_) {
    case Kind::Principal:
      return "principal:" + std::to_string(prime_);
    case Kind::Generic:
      return "generic";
    case Kind::Constrained: {
      std::string out = "constrained[";
      for (std::size_t i = 0; i < assumptions_.size(); ++i) {
        if (i != 0) out += "; ";
        out += assumptions_[i].to_string();
      }
      return out + "]";
    }
  }
  return "generic";
}

std::string_view to_string(Truth t) {
  switch (t) {
    case Truth::ForcedTrue:
      return "ForcedTrue";
    case Truth::ForcedFalse:
      return "ForcedFalse";
    case Truth::Contingent:
      return "Contingent";
  }
  return "Contingent";
}

Truth negate(Truth t) {
  switch (t) {
    case Truth::ForcedTrue:
      return Truth::ForcedFalse;
    case Truth::ForcedFalse:
      return Truth::ForcedTrue;
    case Truth::Contingent:
      return Truth::Contingent;
  }
  return Truth::Contingent;
}

Verdict classify(const DefinableSet& set, const FilterSpec& filter) {
  Verdict v;
  if (filter.is_principal()) {
    v.value = set.contains(filter.prime()) ? Truth::ForcedTrue : Truth::ForcedFalse;
    return v;
  }
  const DefinableSet& base = filter.base();
  DefinableSet inside = base.intersect(set);
  if (base.minus(set).is_finite()) {
    v.value = Truth::ForcedTrue;
  } else if (inside.is_finite()) {
    v.value = Truth::ForcedFalse;
  } else {
    v.value = Truth::Contingent;
    v.decomposition = std::move(inside);
  }
  return v;
}

std::vector<Verdict> partition_verdicts(const std::vector<DefinableSet>& parts,
                                        const FilterSpec& filter) {
  DefinableSet covered = DefinableSet::none();
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!covered.intersect(parts[i]).is_empty()) {
      throw DomainError("partition blocks overlap at block " + std::to_string(i));
    }
    covered = covered.unite(parts[i]);
  }
  if (covered != DefinableSet::all()) {
    throw DomainError("partition misses " + covered.complement().to_string());
  }
  std::vector<Verdict> out;
  out.reserve(parts.size());
  for (const auto& part : parts) out.push_back(classify(part, filter));
  return out;
}

}  // namespace ultraprod
