#include "ultraprod/structures.hpp"

#include <charconv>

#include <nlohmann/json.hpp>

#include "ultraprod/errors.hpp"
#include "ultraprod/primes.hpp"

namespace ultraprod {
namespace {

constexpr std::uint64_t kMaxModular = 1ULL << 31;
constexpr std::uint64_t kSelfcheckLimit = 512;

std::uint64_t parse_u64(std::string_view digits, std::string_view what) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) {
    throw ParseError("bad " + std::string(what) + " '" + std::string(digits) + "'", 0);
  }
  return value;
}

}  // namespace

FiniteRing FiniteRing::modular(std::uint64_t n) {
  if (n == 0 || n > kMaxModular) throw DomainError("Z/n needs 1 <= n <= 2^31, got " + std::to_string(n));
  FiniteRing r;
  r.size_ = n;
  r.zero_ = 0;
  r.one_ = static_cast<Element>(1 % n);
  return r;
}

FiniteRing FiniteRing::from_tables(std::vector<std::vector<Element>> add,
                                   std::vector<std::vector<Element>> mul, Element zero,
                                   Element one) {
  const std::size_t n = add.size();
  if (n == 0) throw DomainError("ring tables must be nonempty");
  if (mul.size() != n) throw DomainError("add and mul tables differ in size");
  if (zero >= n || one >= n) throw DomainError("zero/one out of range");
  auto tables = std::make_shared<Tables>();
  tables->add.reserve(n * n);
  tables->mul.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (add[i].size() != n || mul[i].size() != n) throw DomainError("ring tables must be square");
    for (std::size_t j = 0; j < n; ++j) {
      if (add[i][j] >= n || mul[i][j] >= n) throw DomainError("table entry out of range");
      tables->add.push_back(add[i][j]);
      tables->mul.push_back(mul[i][j]);
    }
  }
  tables->neg.assign(n, zero);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (tables->add[a * n + b] == zero) {
        tables->neg[a] = static_cast<Element>(b);
        break;
      }
    }
  }
  FiniteRing r;
  r.size_ = n;
  r.zero_ = zero;
  r.one_ = one;
  r.tables_ = std::move(tables);
  return r;
}

Element FiniteRing::from_integer(const mpz_class& n) const {
  if (!tables_) return static_cast<Element>(mod_u64(n, size_));
  // Double-and-add on the additive table.
  mpz_class k = abs(n);
  Element acc = zero_;
  Element power = one_;
  while (k != 0) {
    if (mpz_odd_p(k.get_mpz_t()) != 0) acc = add(acc, power);
    power = add(power, power);
    k >>= 1;
  }
  return n < 0 ? neg(acc) : acc;
}

std::string FiniteRing::describe() const {
  if (!tables_) return "Z/" + std::to_string(size_);
  nlohmann::ordered_json j;
  auto rows = [&](const std::vector<Element>& flat) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (std::uint64_t i = 0; i < size_; ++i) {
      out.push_back(std::vector<Element>(flat.begin() + static_cast<std::ptrdiff_t>(i * size_),
                                         flat.begin() + static_cast<std::ptrdiff_t>((i + 1) * size_)));
    }
    return out;
  };
  j["add"] = rows(tables_->add);
  j["mul"] = rows(tables_->mul);
  j["zero"] = zero_;
  j["one"] = one_;
  return j.dump();
}

std::optional<RingViolation> ring_selfcheck(const FiniteRing& ring) {
  const std::uint64_t n = ring.size();
  if (n > kSelfcheckLimit) {
    throw DomainError("ring_selfcheck needs size <= 512, got " + std::to_string(n));
  }
  auto el = [](std::uint64_t v) { return static_cast<Element>(v); };
  for (std::uint64_t a = 0; a < n; ++a) {
    if (ring.add(el(a), ring.zero()) != a) return RingViolation{"additive identity", {el(a)}};
    if (ring.mul(el(a), ring.one()) != a) return RingViolation{"multiplicative identity", {el(a)}};
    if (ring.add(el(a), ring.neg(el(a))) != ring.zero()) return RingViolation{"additive inverse", {el(a)}};
    for (std::uint64_t b = 0; b < n; ++b) {
      if (ring.add(el(a), el(b)) != ring.add(el(b), el(a))) {
        return RingViolation{"additive commutativity", {el(a), el(b)}};
      }
      if (ring.mul(el(a), el(b)) != ring.mul(el(b), el(a))) {
        return RingViolation{"multiplicative commutativity", {el(a), el(b)}};
      }
    }
  }
  for (std::uint64_t a = 0; a < n; ++a) {
    for (std::uint64_t b = 0; b < n; ++b) {
      const Element ab_sum = ring.add(el(a), el(b));
      const Element ab_prod = ring.mul(el(a), el(b));
      for (std::uint64_t c = 0; c < n; ++c) {
        if (ring.add(ab_sum, el(c)) != ring.add(el(a), ring.add(el(b), el(c)))) {
          return RingViolation{"additive associativity", {el(a), el(b), el(c)}};
        }
        if (ring.mul(ab_prod, el(c)) != ring.mul(el(a), ring.mul(el(b), el(c)))) {
          return RingViolation{"multiplicative associativity", {el(a), el(b), el(c)}};
        }
        if (ring.mul(el(a), ring.add(el(b), el(c))) !=
            ring.add(ab_prod, ring.mul(el(a), el(c)))) {
          return RingViolation{"distributivity", {el(a), el(b), el(c)}};
        }
      }
    }
  }
  return std::nullopt;
}

StructureFamily StructureFamily::prime_field() { return StructureFamily(); }

StructureFamily StructureFamily::mod_ring(std::uint64_t n) {
  if (n == 0 || n > kMaxModular) throw DomainError("Z/n needs 1 <= n <= 2^31");
  StructureFamily f;
  f.kind_ = Kind::ModRing;
  f.parameter_ = n;
  return f;
}

StructureFamily StructureFamily::truncated_padic(unsigned precision) {
  if (precision == 0) throw DomainError("truncated p-adic precision must be >= 1");
  StructureFamily f;
  f.kind_ = Kind::TruncatedPadic;
  f.parameter_ = precision;
  return f;
}

StructureFamily StructureFamily::constant(FiniteRing ring) {
  if (ring.size() <= kSelfcheckLimit) {
    if (auto violation = ring_selfcheck(ring)) {
      throw DomainError("constant family is not a commutative ring: " + violation->law + " fails");
    }
  }
  StructureFamily f;
  f.kind_ = Kind::ConstantFinite;
  f.parameter_ = ring.size();
  f.constant_ = std::move(ring);
  return f;
}

StructureFamily StructureFamily::parse(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text == "Fp" || text == "F_p") return prime_field();
  if (text.substr(0, 2) == "Z/") return mod_ring(parse_u64(text.substr(2), "modulus"));
  if (text.substr(0, 3) == "Zp^") {
    std::uint64_t k = parse_u64(text.substr(3), "precision");
    if (k == 0 || k > 64) throw ParseError("precision must be in [1, 64]", 3);
    return truncated_padic(static_cast<unsigned>(k));
  }
  if (text == "Zp") return truncated_padic(1);
  constexpr std::string_view kConst = "const:";
  if (text.substr(0, kConst.size()) == kConst) {
    std::string_view body = text.substr(kConst.size());
    if (body.substr(0, 2) == "Z/") {
      return constant(FiniteRing::modular(parse_u64(body.substr(2), "modulus")));
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
      auto add = j.at("add").get<std::vector<std::vector<Element>>>();
      auto mul = j.at("mul").get<std::vector<std::vector<Element>>>();
      Element zero = j.value("zero", Element{0});
      Element one = j.value("one", Element{1});
      return constant(FiniteRing::from_tables(std::move(add), std::move(mul), zero, one));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad constant family tables: ") + e.what(), kConst.size());
    }
  }
  throw ParseError("unknown family '" + std::string(text) + "'", 0);
}

std::optional<std::uint64_t> StructureFamily::size_at(std::uint64_t p) const {
  switch (kind_) {
    case Kind::PrimeField:
      return p;
    case Kind::ModRing:
    case Kind::ConstantFinite:
      return parameter_;
    case Kind::TruncatedPadic: {
      std::uint64_t size = 1;
      for (std::uint64_t i = 0; i < parameter_; ++i) {
        if (size > UINT64_MAX / p) return std::nullopt;
        size *= p;
      }
      return size;
    }
  }
  return std::nullopt;
}

FiniteRing StructureFamily::materialize(std::uint64_t p, std::uint64_t size_cap) const {
  if (!is_prime(p)) throw DomainError("index " + std::to_string(p) + " is not prime");
  auto size = size_at(p);
  if (!size || *size > size_cap) {
    throw CapExceeded("structure " + to_string() + " at p=" + std::to_string(p) +
                      " exceeds size cap " + std::to_string(size_cap));
  }
  if (kind_ == Kind::ConstantFinite) return *constant_;
  return FiniteRing::modular(*size);
}

std::string StructureFamily::to_string() const {
  switch (kind_) {
    case Kind::PrimeField:
      return "Fp";
    case Kind::ModRing:
      return "Z/" + std::to_string(parameter_);
    case Kind::TruncatedPadic:
      return "Zp^" + std::to_string(parameter_);
    case Kind::ConstantFinite:
      return "const:" + constant_->describe();
  }
  return "Fp";
}

std::string StructureFamily::note() const {
  if (kind_ == Kind::TruncatedPadic) {
    return "p-adic integers truncated to Z/p^" + std::to_string(parameter_) +
           "; verdicts hold for the truncation only";
  }
  return {};
}

bool operator==(const StructureFamily& a, const StructureFamily& b) {
  if (a.kind_ != b.kind_ || a.parameter_ != b.parameter_) return false;
  if (a.kind_ != StructureFamily::Kind::ConstantFinite) return true;
  return a.constant_->describe() == b.constant_->describe();
}

}  // namespace ultraprod
