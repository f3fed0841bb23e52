#include "ultraprod/definable_set.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <optional>
#include <sstream>

#include "ultraprod/errors.hpp"
#include "ultraprod/primes.hpp"

namespace ultraprod {
namespace {

constexpr std::uint64_t kMaxModulus = 10'000'000;

void sort_unique(std::vector<std::uint64_t>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

bool sorted_contains(const std::vector<std::uint64_t>& v, std::uint64_t x) {
  return std::binary_search(v.begin(), v.end(), x);
}

std::string join(const std::vector<std::uint64_t>& v) {
  std::ostringstream out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i != 0) out << ", ";
    out << v[i];
  }
  return out.str();
}

class SetParser {
 public:
  explicit SetParser(std::string_view text) : text_(text) {}

  DefinableSet parse() {
    DefinableSet result = parse_union();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return result;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError("set expression: " + message, pos_);
  }

  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])) != 0) {
      ++pos_;
    }
  }

  bool accept(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  bool accept_word(std::string_view word) {
    skip_space();
    if (text_.substr(pos_, word.size()) != word) return false;
    std::size_t end = pos_ + word.size();
    if (end < text_.size() &&
        (std::isalnum(static_cast<unsigned char>(text_[end])) != 0 || text_[end] == '_')) {
      return false;
    }
    pos_ = end;
    return true;
  }

  void expect(std::string_view token) {
    if (!accept(token)) fail("expected '" + std::string(token) + "'");
  }

  std::optional<std::uint64_t> maybe_integer() {
    skip_space();
    std::size_t start = pos_;
    std::uint64_t value = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])) != 0) {
      std::uint64_t digit = static_cast<std::uint64_t>(text_[pos_] - '0');
      if (value > (UINT64_MAX - digit) / 10) fail("integer overflow");
      value = value * 10 + digit;
      ++pos_;
    }
    if (pos_ == start) return std::nullopt;
    return value;
  }

  std::uint64_t integer() {
    auto value = maybe_integer();
    if (!value) fail("expected integer");
    return *value;
  }

  DefinableSet parse_union() {
    DefinableSet acc = parse_intersection();
    for (;;) {
      if (accept("|") || accept("+") || accept("∪")) {
        acc = acc.unite(parse_intersection());
      } else if (accept("-") || accept("\\") || accept("∖")) {
        acc = acc.minus(parse_intersection());
      } else {
        return acc;
      }
    }
  }

  DefinableSet parse_intersection() {
    DefinableSet acc = parse_unary();
    while (accept("&") || accept("∩")) acc = acc.intersect(parse_unary());
    return acc;
  }

  DefinableSet parse_unary() {
    if (accept("~") || accept("!") || accept("¬")) return parse_unary().complement();
    return parse_atom();
  }

  DefinableSet parse_atom() {
    if (accept_word("all") || accept_word("primes")) return DefinableSet::all();
    if (accept_word("none") || accept_word("empty")) return DefinableSet::none();
    if (accept("{")) {
      std::vector<std::uint64_t> members;
      if (!accept("}")) {
        do {
          std::size_t at = pos_;
          std::uint64_t q = integer();
          if (!is_prime(q)) {
            pos_ = at;
            fail(std::to_string(q) + " is not prime");
          }
          members.push_back(q);
        } while (accept(","));
        expect("}");
      }
      return DefinableSet::finite(std::move(members));
    }
    if (accept("(")) {
      std::size_t mark = pos_;
      if (auto cls = try_class_body()) return *cls;
      pos_ = mark;
      DefinableSet inner = parse_union();
      expect(")");
      return inner;
    }
    fail("expected a set");
  }

  std::optional<DefinableSet> try_class_body() {
    std::vector<std::uint64_t> residues;
    auto first = maybe_integer();
    if (!first) return std::nullopt;
    residues.push_back(*first);
    while (accept(",")) {
      auto next = maybe_integer();
      if (!next) return std::nullopt;
      residues.push_back(*next);
    }
    if (!accept_word("mod")) return std::nullopt;
    std::uint64_t modulus = integer();
    if (modulus == 0) fail("modulus must be positive");
    if (modulus > kMaxModulus) fail("modulus too large");
    expect(")");
    return DefinableSet::residue_classes(modulus, std::move(residues));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

DefinableSet::DefinableSet() = default;

DefinableSet DefinableSet::all() {
  DefinableSet s;
  s.classes_ = {0};
  return s;
}

DefinableSet DefinableSet::none() { return DefinableSet(); }

DefinableSet DefinableSet::finite(std::vector<std::uint64_t> primes) {
  for (std::uint64_t q : primes) {
    if (!is_prime(q)) throw DomainError(std::to_string(q) + " is not prime");
  }
  sort_unique(primes);
  DefinableSet s;
  s.include_ = std::move(primes);
  return s;
}

DefinableSet DefinableSet::residue_classes(std::uint64_t modulus,
                                           std::vector<std::uint64_t> residues) {
  if (modulus == 0) throw DomainError("modulus must be positive");
  if (modulus > kMaxModulus) throw DomainError("modulus too large");
  for (auto& r : residues) r %= modulus;
  sort_unique(residues);
  auto in_class = [&](std::uint64_t r) { return sorted_contains(residues, r); };
  auto truth = [&](std::uint64_t q) { return sorted_contains(residues, q % modulus); };
  return build(modulus, in_class, truth, {});
}

DefinableSet DefinableSet::build(std::uint64_t modulus,
                                 const std::function<bool(std::uint64_t)>& in_class,
                                 const std::function<bool(std::uint64_t)>& truth,
                                 std::vector<std::uint64_t> candidates) {
  if (modulus == 0 || modulus > kMaxModulus) {
    throw DomainError("modulus out of range: " + std::to_string(modulus));
  }
  std::vector<bool> member(modulus, false);
  for (std::uint64_t r : unit_residues(modulus)) member[r] = in_class(r);

  for (std::uint64_t q : prime_factors(modulus)) candidates.push_back(q);
  for (std::uint64_t q : candidates) {
    if (!is_prime(q)) throw DomainError(std::to_string(q) + " is not prime");
  }
  sort_unique(candidates);

  // Descend to the conductor of the class set, one prime factor at a time.
  std::uint64_t m = modulus;
  for (bool reduced = true; reduced && m > 1;) {
    reduced = false;
    for (std::uint64_t q : prime_factors(m)) {
      std::uint64_t smaller = m / q;
      std::vector<signed char> seen(smaller, -1);
      bool consistent = true;
      for (std::uint64_t r : unit_residues(m)) {
        auto bit = static_cast<signed char>(member[r] ? 1 : 0);
        signed char& slot = seen[r % smaller];
        if (slot == -1) {
          slot = bit;
        } else if (slot != bit) {
          consistent = false;
          break;
        }
      }
      if (!consistent) continue;
      std::vector<bool> next(smaller, false);
      for (std::uint64_t r = 0; r < smaller; ++r) next[r] = seen[r] == 1;
      member = std::move(next);
      m = smaller;
      reduced = true;
      break;
    }
  }

  DefinableSet s;
  s.modulus_ = m;
  for (std::uint64_t r : unit_residues(m)) {
    if (member[r]) s.classes_.push_back(r);
  }
  for (std::uint64_t q : candidates) {
    bool class_part = s.in_class_part(q);
    bool actual = truth(q);
    if (actual && !class_part) s.include_.push_back(q);
    if (!actual && class_part) s.exclude_.push_back(q);
  }
  return s;
}

DefinableSet DefinableSet::parse(std::string_view text) { return SetParser(text).parse(); }

bool DefinableSet::in_class_part(std::uint64_t prime) const {
  if (modulus_ > 1 && modulus_ % prime == 0) return false;
  return sorted_contains(classes_, prime % modulus_);
}

bool DefinableSet::contains(std::uint64_t prime) const {
  if (sorted_contains(include_, prime)) return true;
  return in_class_part(prime) && !sorted_contains(exclude_, prime);
}

DefinableSet DefinableSet::complement() const {
  std::vector<std::uint64_t> candidates = include_;
  candidates.insert(candidates.end(), exclude_.begin(), exclude_.end());
  return build(
      modulus_, [&](std::uint64_t r) { return !sorted_contains(classes_, r); },
      [&](std::uint64_t q) { return !contains(q); }, std::move(candidates));
}

DefinableSet DefinableSet::combine(const DefinableSet& other,
                                   const std::function<bool(bool, bool)>& op) const {
  std::uint64_t l = std::lcm(modulus_, other.modulus_);
  if (l > kMaxModulus) throw DomainError("combined modulus too large: " + std::to_string(l));
  std::vector<std::uint64_t> candidates = include_;
  for (const auto* v : {&exclude_, &other.include_, &other.exclude_}) {
    candidates.insert(candidates.end(), v->begin(), v->end());
  }
  return build(
      l,
      [&](std::uint64_t r) {
        return op(sorted_contains(classes_, r % modulus_),
                  sorted_contains(other.classes_, r % other.modulus_));
      },
      [&](std::uint64_t q) { return op(contains(q), other.contains(q)); },
      std::move(candidates));
}

DefinableSet DefinableSet::intersect(const DefinableSet& other) const {
  return combine(other, [](bool a, bool b) { return a && b; });
}

DefinableSet DefinableSet::unite(const DefinableSet& other) const {
  return combine(other, [](bool a, bool b) { return a || b; });
}

DefinableSet DefinableSet::minus(const DefinableSet& other) const {
  return combine(other, [](bool a, bool b) { return a && !b; });
}

bool DefinableSet::subset_of(const DefinableSet& other) const {
  return minus(other).is_empty();
}

std::vector<std::uint64_t> DefinableSet::class_witnesses(std::uint64_t witness_bound) const {
  std::vector<std::uint64_t> out;
  out.reserve(classes_.size());
  for (std::uint64_t r : classes_) {
    auto q = least_prime_in_class(r, modulus_, witness_bound);
    if (!q) {
      throw AxiomWitnessFailure("no prime congruent to " + std::to_string(r) + " mod " +
                                std::to_string(modulus_) + " below " +
                                std::to_string(witness_bound));
    }
    out.push_back(*q);
  }
  return out;
}

bool DefinableSet::is_finite(std::uint64_t witness_bound) const {
  if (classes_.empty()) return true;
  class_witnesses(witness_bound);
  return false;
}

bool DefinableSet::is_cofinite(std::uint64_t witness_bound) const {
  return complement().is_finite(witness_bound);
}

bool DefinableSet::is_empty() const { return classes_.empty() && include_.empty(); }

std::vector<std::uint64_t> DefinableSet::finite_members() const {
  if (!classes_.empty()) throw DomainError("set is infinite: " + to_string());
  return include_;
}

std::string DefinableSet::to_string() const {
  if (classes_.empty()) return "{" + join(include_) + "}";
  std::string out = modulus_ == 1 ? "all" : "(" + join(classes_) + " mod " +
                                                std::to_string(modulus_) + ")";
  if (!include_.empty()) out += " + {" + join(include_) + "}";
  if (!exclude_.empty()) out += " - {" + join(exclude_) + "}";
  return out;
}

}  // namespace ultraprod
