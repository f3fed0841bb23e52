// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Usage: acceptance <path-to-ultraprod-cli>

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "ultraprod/errors.hpp"
#include "ultraprod/evaluator.hpp"
#include "ultraprod/generators.hpp"
#include "ultraprod/los.hpp"
#include "ultraprod/proto.hpp"
#include "ultraprod/ultra.hpp"

using namespace ultraprod;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Counts checks and keeps the first failure for the report.
struct Tally {
  std::uint64_t checks = 0;
  std::uint64_t failures = 0;
  std::string first;

  void expect(bool ok, const std::function<std::string()>& what) {
    ++checks;
    if (ok) return;
    if (failures++ == 0) first = what();
  }

  Outcome outcome(const std::string& summary) const {
    std::ostringstream out;
    out << summary << "; " << checks << " checks, " << failures << " failures";
    if (failures != 0) out << "; first: " << first;
    return {failures == 0, out.str()};
  }
};

const StructureFamily kFp = StructureFamily::prime_field();

std::string truth_name(Truth t) { return std::string(to_string(t)); }

Truth forced(bool b) { return b ? Truth::ForcedTrue : Truth::ForcedFalse; }

// 1. Principal verdicts agree with brute force.
Outcome principal_oracle() {
  gen::Rng rng(20240101);
  Tally t;
  const auto start = std::chrono::steady_clock::now();
  const auto primes = oracle::primes(2, 50);
  int deepest = 0;
  for (int i = 0; i < 500; ++i) {
    const Formula phi = gen::sentence(rng, 3);
    t.expect(quantifier_depth(phi) <= 3, [&] { return "depth of " + to_string(phi); });
    deepest += quantifier_depth(phi) == 3 ? 1 : 0;
    for (std::uint64_t p : primes) {
      const bool direct = oracle::ModEval(static_cast<std::int64_t>(p)).holds(phi);
      const Verdict v = los_verdict(kFp, phi, FilterSpec::principal(p), 50);
      t.expect(v.value == forced(direct), [&] {
        return to_string(phi) + " at p=" + std::to_string(p) + ": " + truth_name(v.value);
      });
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  t.expect(seconds < 60.0, [&] { return "took " + std::to_string(seconds) + " s"; });
  std::ostringstream s;
  s.precision(2);
  s << std::fixed << "500 sentences (" << deepest << " of depth 3) x " << primes.size() << " primes in " << seconds
    << " s";
  return t.outcome(s.str());
}

// 2. Quadratic classifier against brute force on [2, 10^4].
Outcome quadratic_exactness() {
  Tally t;
  const auto primes = oracle::primes(2, 10'000);
  for (int c = -10; c <= 10; ++c) {
    if (c == 0) continue;
    const std::string text = "exists x. x*x = " + std::to_string(c);
    const auto exact = exact_truth_set(kFp, parse_sentence(text));
    t.expect(exact.has_value(), [&] { return "no exact set for " + text; });
    if (!exact) continue;
    for (std::uint64_t p : primes) {
      const auto q = static_cast<std::int64_t>(p);
      const std::int64_t target = ((c % q) + q) % q;
      bool square = false;
      for (std::int64_t x = 0; x < q && !square; ++x) square = x * x % q == target;
      t.expect(exact->set.contains(p) == square,
               [&] { return text + " at p=" + std::to_string(p); });
    }
    if (c == -1) {
      t.expect(exact->set == DefinableSet::parse("(1 mod 4) + {2}"),
               [&] { return "c=-1 gave " + exact->set.to_string(); });
    }
  }
  return t.outcome("c in [-10,10]\\{0}, primes <= 10^4");
}

// 3. n*1 = 0 is false generically and true at p exactly when p | n.
Outcome characteristic_zero() {
  Tally t;
  const auto primes = oracle::primes(2, 100);
  for (std::uint64_t n = 1; n <= 50; ++n) {
    const Formula phi = Formula::eq(Term::mul(Term::integer(n), Term::one()), Term::zero());
    const Verdict g = los_verdict(kFp, phi, FilterSpec::generic(), 1000);
    t.expect(g.value == Truth::ForcedFalse && g.provenance.kind == Provenance::Kind::Exact,
             [&] { return "n=" + std::to_string(n) + " generic " + truth_name(g.value); });
    for (std::uint64_t p : primes) {
      const Verdict v = los_verdict(kFp, phi, FilterSpec::principal(p), 1000);
      t.expect(v.value == forced(n % p == 0),
               [&] { return "n=" + std::to_string(n) + " p=" + std::to_string(p); });
    }
  }
  return t.outcome("n in [1,50], principal at primes <= 100");
}

// 4. A constant family collapses to its single structure.
Outcome finite_collapse() {
  const oracle::TableRing table{{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}}, {{0, 0, 0}, {0, 1, 2}, {0, 2, 1}}, 0, 1};
  std::vector<std::vector<Element>> add(3, std::vector<Element>(3));
  std::vector<std::vector<Element>> mul(3, std::vector<Element>(3));
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      add[a][b] = static_cast<Element>(table.add[a][b]);
      mul[a][b] = static_cast<Element>(table.mul[a][b]);
    }
  }
  const StructureFamily family = StructureFamily::constant(FiniteRing::from_tables(add, mul, 0, 1));
  const std::vector<FilterSpec> filters = {
      FilterSpec::generic(), FilterSpec::principal(2), FilterSpec::principal(3), FilterSpec::principal(97),
      FilterSpec::constrained({DefinableSet::parse("(1 mod 4)")}),
      FilterSpec::constrained({DefinableSet::parse("(2 mod 3)"), DefinableSet::parse("(1 mod 5) + (4 mod 5)")})};
  gen::Rng rng(314159);
  Tally t;
  for (int i = 0; i < 200; ++i) {
    const Formula phi = gen::sentence(rng, 3);
    const bool truth = table.holds(phi);
    for (const auto& f : filters) {
      const Verdict v = los_verdict(family, phi, f, 200);
      t.expect(v.value == forced(truth) && v.provenance.kind == Provenance::Kind::Exact, [&] {
        return to_string(phi) + " under " + f.to_string() + ": " + truth_name(v.value);
      });
    }
  }
  return t.outcome("200 sentences x " + std::to_string(filters.size()) + " filters over a 3-element ring");
}

// 5. Ring laws, invertibility and perturbation in the ultraproduct of F_p.
Outcome field_laws() {
  gen::Rng rng(27182818);
  const FilterSpec g = FilterSpec::generic();
  const UltraElement zero(kFp, ValueRule());
  const UltraElement one(kFp, ValueRule::constant(1));
  const auto small = oracle::primes(2, 100);
  Tally t;
  auto same = [&](const UltraElement& x, const UltraElement& y, const char* law) {
    t.expect(eq(x, y, g).value == Truth::ForcedTrue, [&] { return std::string(law) + " for " + x.to_string(); });
  };
  auto perturb = [&](const UltraElement& x) {
    ValueRule r = x.rule();
    for (int k = std::uniform_int_distribution<int>(1, 5)(rng); k > 0; --k) {
      const std::uint64_t q = small[std::uniform_int_distribution<std::size_t>(0, small.size() - 1)(rng)];
      r = r.with_exception(q, std::uniform_int_distribution<int>(-50, 50)(rng));
    }
    return UltraElement(kFp, r);
  };
  for (int i = 0; i < 200; ++i) {
    const UltraElement a(kFp, gen::rule(rng, 3, 2));
    const UltraElement b(kFp, gen::rule(rng, 3, 2));
    const UltraElement c(kFp, gen::rule(rng, 3, 2));
    same((a + b) + c, a + (b + c), "additive associativity");
    same((a * b) * c, a * (b * c), "multiplicative associativity");
    same(a + b, b + a, "additive commutativity");
    same(a * b, b * a, "multiplicative commutativity");
    same(a * (b + c), a * b + a * c, "distributivity");
    same(a + zero, a, "additive identity");
    same(a * one, a, "multiplicative identity");
    same(a + (-a), zero, "additive inverse");

    for (const auto* x : {&a, &b, &c}) {
      if (eq(*x, zero, g).value != Truth::ForcedFalse) continue;
      const Invertibility inv = is_invertible(*x, g);
      t.expect(inv.verdict.value == Truth::ForcedTrue, [&] { return "not invertible: " + x->to_string(); });
      if (inv.witness) same(*x * *inv.witness, one, "inverse witness");
    }

    const std::array<UltraElement, 3> originals{a, b, zero};
    const std::array<UltraElement, 3> perturbed{perturb(a), perturb(b), zero};
    for (std::size_t x = 0; x < 3; ++x) {
      for (std::size_t y = 0; y < 3; ++y) {
        const Verdict before = eq(originals[x], originals[y], g);
        const Verdict after = eq(perturbed[x], perturbed[y], g);
        t.expect(before.value == after.value, [&] {
          return "perturbation changed " + originals[x].to_string() + " vs " + originals[y].to_string();
        });
      }
    }
  }
  return t.outcome("200 rule triples");
}

// 6. Boolean and verdict laws for definable sets, checked extensionally.
Outcome filter_algebra() {
  gen::Rng rng(161803);
  const auto window = oracle::primes(2, 10'000);
  const auto small = oracle::primes(2, 100);
  Tally t;
  for (int i = 0; i < 1000; ++i) {
    const DefinableSet s = gen::definable_set(rng);
    const DefinableSet u = gen::definable_set(rng);
    const DefinableSet both = s.intersect(u);
    const DefinableSet either = s.unite(u);
    t.expect(either.complement() == s.complement().intersect(u.complement()), [&] { return "De Morgan (union)"; });
    t.expect(both.complement() == s.complement().unite(u.complement()), [&] { return "De Morgan (intersection)"; });

    for (std::uint64_t p : window) {
      const bool in_s = s.contains(p);
      const bool in_u = u.contains(p);
      t.expect(both.contains(p) == (in_s && in_u) && either.contains(p) == (in_s || in_u) &&
                   s.complement().contains(p) == !in_s && either.complement().contains(p) == (!in_s && !in_u),
               [&] { return s.to_string() + " / " + u.to_string() + " at p=" + std::to_string(p); });
    }

    std::vector<FilterSpec> filters = {FilterSpec::generic(),
                                       FilterSpec::principal(small[static_cast<std::size_t>(i) % small.size()])};
    const DefinableSet base = gen::definable_set(rng);
    if (check_filter_base({base}).ok) filters.push_back(FilterSpec::constrained({base}));
    for (const auto& f : filters) {
      const Verdict vs = classify(s, f);
      const Verdict vu = classify(u, f);
      t.expect(classify(s.complement(), f).value == negate(vs.value),
               [&] { return "complement swap for " + s.to_string() + " under " + f.to_string(); });
      if (vs.value == Truth::ForcedTrue && vu.value == Truth::ForcedTrue) {
        t.expect(classify(both, f).value == Truth::ForcedTrue, [&] { return "intersection law"; });
      }
      if (vs.value == Truth::ForcedTrue) {
        t.expect(classify(either, f).value == Truth::ForcedTrue, [&] { return "upward law"; });
      }
    }

    const std::uint64_t p = small[static_cast<std::size_t>(i * 7) % small.size()];
    const std::vector<DefinableSet> blocks = {both, s.minus(u), u.minus(s), either.complement()};
    const auto verdicts = partition_verdicts(blocks, FilterSpec::principal(p));
    int chosen = 0;
    for (const auto& v : verdicts) chosen += v.value == Truth::ForcedTrue ? 1 : 0;
    t.expect(chosen == 1, [&] { return "partition at p=" + std::to_string(p) + " picked " + std::to_string(chosen); });
  }
  return t.outcome("1000 set pairs, extensional at primes <= 10^4");
}

using Coordinate = std::map<std::uint64_t, std::int64_t>;

std::int64_t rule_mod(const ValueRule& rule, std::int64_t q) {
  std::int64_t num = 0;
  std::int64_t power = 1;
  for (int i = 0; i <= rule.poly().degree(); ++i) {
    const std::int64_t c = mpz_class(rule.poly().numerator()[static_cast<std::size_t>(i)] % q).get_si();
    num = ((num + c * power) % q + q) % q;
    power = power * q % q;
  }
  const std::int64_t den = rule.poly().denominator().get_si() % q;
  for (std::int64_t inv = 1; inv < q; ++inv) {
    if (den * inv % q == 1) return num * inv % q;
  }
  return 0;
}

Coordinate coordinate(const BoundedPolySequence& s, std::int64_t q) {
  Coordinate out;
  for (const auto& term : s.terms()) {
    const auto e = static_cast<std::uint64_t>(term.exponent.poly()(q).get_num().get_si());
    out[e] = (out[e] + rule_mod(term.coefficient, q)) % q;
  }
  std::erase_if(out, [](const auto& entry) { return entry.second == 0; });
  return out;
}

// 7. Collapse commutes with multiplication; unbounded sums are rejected.
Outcome collapse_commutation() {
  gen::Rng rng(1414);
  const auto primes = oracle::primes(11, 400);
  const FilterSpec g = FilterSpec::generic();
  Tally t;
  for (int i = 0; i < 100; ++i) {
    const BoundedPolySequence s = gen::bounded_sequence(rng, 3, 3);
    const BoundedPolySequence u = gen::bounded_sequence(rng, 3, 3);
    const UltraPolynomial product = degree_collapse(s * u);
    const UltraPolynomial expected = poly_mul(degree_collapse(s), degree_collapse(u));
    t.expect(poly_equal(product, expected, g).value == Truth::ForcedTrue,
             [&] { return s.to_string() + " * " + u.to_string(); });
    for (std::size_t k = 0; k < 50; ++k) {
      const auto q = static_cast<std::int64_t>(primes[k]);
      const Coordinate a = coordinate(s, q);
      const Coordinate b = coordinate(u, q);
      Coordinate naive;
      for (const auto& [i1, x] : a) {
        for (const auto& [i2, y] : b) naive[i1 + i2] = (naive[i1 + i2] + x * y) % q;
      }
      std::erase_if(naive, [](const auto& entry) { return entry.second == 0; });
      Coordinate got;
      for (std::size_t d = 0; d < product.coefficients().size(); ++d) {
        const std::int64_t v = product.coefficients()[d].value_at(primes[k]).get_si();
        if (v != 0) got[d] = v;
      }
      t.expect(got == naive, [&] { return s.to_string() + " * " + u.to_string() + " at p=" + std::to_string(q); });
    }
  }
  const BoundedPolySequence sum = BoundedPolySequence::parse("sum(x^i, i=0..p)");
  t.expect(!membership_check(sum, FiltrationDescriptor::degree()).accepted, [] { return "sum accepted by degree"; });
  t.expect(!membership_check(sum, FiltrationDescriptor::monomial_count()).accepted,
           [] { return "sum accepted by count"; });
  return t.outcome("100 sequence pairs x 50 primes, sum(x^i, i=0..p) rejected");
}

mpz_class naive_at(const ValueRule& r, std::uint64_t q) {
  mpq_class v = 0;
  mpq_class power = 1;
  for (int i = 0; i <= r.poly().degree(); ++i) {
    v += r.poly().coefficient(static_cast<std::size_t>(i)) * power;
    power *= static_cast<unsigned long>(q);
  }
  return v.get_num();
}

// 8. compare is a total order on N^F; constant_detect finds the constants.
Outcome order_totality() {
  gen::Rng rng(5772);
  std::vector<UltraNat> rules;
  std::set<std::string> seen;
  while (rules.size() < 50) {
    ValueRule r = gen::nat_rule(rng, 3);
    if (seen.insert(r.to_string()).second) rules.emplace_back(r);
  }
  const std::size_t n = rules.size();
  std::vector<std::vector<Ordering>> order(n, std::vector<Ordering>(n));
  Tally t;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Comparison c = compare(rules[i], rules[j]);
      order[i][j] = c.order;
      t.expect(c.provenance.kind == Provenance::Kind::Exact, [&] { return "unforced comparison"; });
      t.expect((c.order == Ordering::Equal) == (i == j), [&] { return "equality of distinct rules"; });
      if (i == j) continue;
      // Pointwise above the threshold.
      std::uint64_t checked = 0;
      for (std::uint64_t q = c.threshold.fits_ulong_p() ? c.threshold.get_ui() + 1 : 0; q != 0 && checked < 10; ++q) {
        if (!oracle::is_prime(q)) continue;
        ++checked;
        const mpz_class a = naive_at(rules[i].rule(), q);
        const mpz_class b = naive_at(rules[j].rule(), q);
        const Ordering pointwise = a < b ? Ordering::Less : a > b ? Ordering::Greater : Ordering::Equal;
        t.expect(pointwise == c.order, [&] {
          return rules[i].to_string() + " vs " + rules[j].to_string() + " at p=" + std::to_string(q);
        });
      }
    }
  }
  auto flip = [](Ordering o) {
    return o == Ordering::Less ? Ordering::Greater : o == Ordering::Greater ? Ordering::Less : o;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      t.expect(order[j][i] == flip(order[i][j]), [&] { return "antisymmetry"; });
      for (std::size_t k = 0; k < n; ++k) {
        if (order[i][j] == Ordering::Less && order[j][k] == Ordering::Less) {
          t.expect(order[i][k] == Ordering::Less, [&] { return "transitivity"; });
        }
      }
    }
  }
  for (const auto& r : rules) {
    const bool constant = r.rule().poly().degree() <= 0;
    const auto c = constant_detect(r);
    t.expect(c.has_value() == constant, [&] { return "constant_detect on " + r.to_string(); });
    if (c && constant) {
      t.expect(*c == r.rule().poly().coefficient(0).get_num(), [&] { return "constant value of " + r.to_string(); });
    }
  }
  return t.outcome("50 distinct rules");
}

std::pair<int, std::string> run(const std::string& command) {
  std::string out;
  FILE* pipe = popen((command + " 2>/dev/null").c_str(), "r");
  if (pipe == nullptr) return {-1, out};
  std::array<char, 4096> buffer{};
  std::size_t got = 0;
  while ((got = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) out.append(buffer.data(), got);
  return {pclose(pipe), out};
}

// 9. Repeated CLI runs produce byte-identical JSON.
Outcome determinism(const std::string& cli) {
  const std::vector<std::string> commands = {
      "eval Fp 'exists x. x*x = -1' generic",
      "eval Fp '1+1=0' principal:2",
      "eval Fp 'forall x. exists y. y*y=x' generic --window 200 --bitmap",
      "eval Fp 'exists x. x*x = 2' --assume '(1 mod 8) + (7 mod 8)'",
      "elem 'eq (p) (0) @Fp generic'",
      "elem 'inv (6) @Zp^2 generic'",
      "elem 'residue (p) mod 4'",
      "elem 'compare (p) (1000000)'",
      "classify '(1 mod 4)' generic",
      "proto collapse 'x + (p-1) / deg<=1'",
      "proto member 'sum(x^i, i=0..p)'",
      "proto mono-mul 'x^[p] + 1' 'x^[p] - 1'",
      "transfer Fp Zp^2 'exists x. x*x = -1'",
      "transfer Fp const:Z/3 '1+1+1=0'",
      "check --seed 7 --cases 20",
      "eval Fp 'exists x. x*x =' generic",
  };
  Tally t;
  for (const auto& c : commands) {
    const std::string full = "'" + cli + "' --json " + c;
    const auto first = run(full);
    const auto second = run(full);
    t.expect(first.first == second.first && first.second == second.second, [&] { return c; });
    t.expect(first.first == 0 || c.find("x*x ='") != std::string::npos, [&] { return "failed: " + c; });
    t.expect(first.first != 0 || first.second.find("\"schema\": \"ultraprod/1\"") != std::string::npos,
             [&] { return "no schema: " + c; });
  }
  return t.outcome(std::to_string(commands.size()) + " CLI invocations run twice");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <ultraprod-cli>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"principal oracle", principal_oracle},
      {"quadratic classifier exactness", quadratic_exactness},
      {"characteristic zero", characteristic_zero},
      {"finite-structure collapse", finite_collapse},
      {"definable-field laws", field_laws},
      {"filter-algebra properties", filter_algebra},
      {"protoproduct collapse commutation", collapse_commutation},
      {"N^F order totality", order_totality},
      {"CLI determinism", [&] { return determinism(cli); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << "criterion " << i + 1 << " (" << criteria[i].first << "): " << (o.pass ? "PASS" : "FAIL") << " - "
              << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
