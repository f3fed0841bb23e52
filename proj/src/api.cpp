#include "ultraprod/ultraprod.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ultraprod/errors.hpp"
#include "ultraprod/evaluator.hpp"
#include "ultraprod/filters.hpp"
#include "ultraprod/formula.hpp"
#include "ultraprod/generators.hpp"
#include "ultraprod/los.hpp"
#include "ultraprod/primes.hpp"
#include "ultraprod/proto.hpp"
#include "ultraprod/ultra.hpp"

using json = nlohmann::ordered_json;
using namespace ultraprod;

namespace {

constexpr const char* kSchema = "ultraprod/1";
constexpr std::uint64_t kEvalWindow = 1'000;
constexpr std::uint64_t kCrossCheckWindow = 10'000;

struct Report {
  json body;
  std::string text;
};

}  // namespace

struct up_context {
  std::uint64_t window = 0;  // 0: defaults
  std::vector<DefinableSet> assumptions;
  json last_json;
  std::string json_text;
  std::string text;
  std::string error;
};

namespace {

// Names bound by a session; looked up by exact match.
struct Bindings {
  std::map<std::string, std::string> families;
  std::map<std::string, std::string> filters;
  std::map<std::string, std::string> elements;
  std::map<std::string, std::string> formulas;

  static std::string lookup(const std::map<std::string, std::string>& table, const std::string& key) {
    auto it = table.find(key);
    return it == table.end() ? key : it->second;
  }
};

// ------------------------------------------------------------- rendering

json set_json(const std::optional<DefinableSet>& s) {
  return s ? json(s->to_string()) : json(nullptr);
}

json provenance_json(const Provenance& p) {
  json out;
  if (p.kind == Provenance::Kind::Exact) {
    out["kind"] = "Exact";
  } else {
    out["kind"] = "Empirical";
    out["window"] = p.window;
  }
  return out;
}

json verdict_json(const Verdict& v) {
  json out;
  out["value"] = std::string(to_string(v.value));
  out["decomposition"] = set_json(v.decomposition);
  out["provenance"] = provenance_json(v.provenance);
  if (!v.pattern.empty()) out["pattern"] = v.pattern;
  return out;
}

std::string provenance_text(const Provenance& p) {
  if (p.kind == Provenance::Kind::Exact) return "exact";
  return "empirical, window " + std::to_string(p.window);
}

std::string verdict_text(const Verdict& v) {
  std::string out(to_string(v.value));
  if (v.value == Truth::Contingent && v.decomposition) out += " on " + v.decomposition->to_string();
  out += " (" + provenance_text(v.provenance) + ")";
  if (!v.pattern.empty()) out += "\n  pattern: " + v.pattern;
  return out;
}

json element_json(const UltraElement& e) {
  json out;
  out["rule"] = e.rule().to_string();
  out["family"] = e.family().to_string();
  out["text"] = e.to_string();
  return out;
}

Report start(const char* command) {
  Report r;
  r.body["schema"] = kSchema;
  r.body["command"] = command;
  return r;
}

// --------------------------------------------------------------- windows

// Largest window whose biggest ring still fits under the quantifier cap.
std::uint64_t effective_window(const up_context& ctx, std::uint64_t fallback, const StructureFamily& family) {
  if (ctx.window != 0) return ctx.window;
  const std::uint64_t cap = EvalLimits{}.quantifier_cap;
  auto fits = [&](std::uint64_t w) {
    auto size = family.size_at(w);
    return size && *size <= cap;
  };
  if (!family.depends_on_index() || fits(fallback)) return fallback;
  std::uint64_t lo = 2;
  std::uint64_t hi = fallback;
  if (!fits(lo)) return lo;
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo + 1) / 2;
    if (fits(mid)) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo;
}

FilterSpec make_filter(const up_context& ctx, const std::string& text) {
  return FilterSpec::parse(text, ctx.assumptions);
}

// ------------------------------------------------------------------ eval

Report do_eval(const up_context& ctx, const Bindings& b, const std::string& family_text,
               const std::string& sentence_text, const std::string& filter_text, bool bitmap) {
  const StructureFamily family = StructureFamily::parse(Bindings::lookup(b.families, family_text));
  const Formula sentence = parse_sentence(Bindings::lookup(b.formulas, sentence_text));
  const FilterSpec filter = make_filter(ctx, Bindings::lookup(b.filters, filter_text));
  const std::uint64_t window = effective_window(ctx, kEvalWindow, family);

  Report r = start("eval");
  r.body["family"] = family.to_string();
  r.body["sentence"] = to_string(sentence);
  r.body["filter"] = filter.to_string();
  r.body["window"] = window;

  const Verdict v = los_verdict(family, sentence, filter, window);
  r.body["verdict"] = verdict_json(v);
  std::optional<ExactTruthSet> exact = exact_truth_set(family, sentence);
  r.body["classifier"] = exact ? json(exact->classifier) : json(nullptr);
  r.body["truth_set"] = exact ? json(exact->set.to_string()) : json(nullptr);
  if (!family.note().empty()) r.body["note"] = family.note();

  std::ostringstream text;
  text << "family: " << family.to_string() << "\n"
       << "sentence: " << to_string(sentence) << "\n"
       << "filter: " << filter.to_string() << "\n"
       << "verdict: " << verdict_text(v) << "\n";
  if (exact) text << "truth set: " << exact->set.to_string() << " (classifier: " << exact->classifier << ")\n";
  if (!family.note().empty()) text << "note: " << family.note() << "\n";

  if (bitmap) {
    const SampledTruthSet sample = truth_set(family, sentence, window);
    std::string bits;
    for (bool bit : sample.bits) bits += bit ? '1' : '0';
    json jb;
    jb["window"] = sample.window;
    jb["primes"] = sample.primes;
    jb["bits"] = bits;
    r.body["bitmap"] = jb;
    text << "bitmap (primes <= " << sample.window << "): " << bits << "\n";
  }
  r.text = text.str();
  return r;
}

// ------------------------------------------------------------------ elem

class ElemTokens {
 public:
  ElemTokens(std::string_view text, const Bindings& b) {
    std::size_t i = 0;
    while (i < text.size()) {
      if (std::isspace(static_cast<unsigned char>(text[i])) != 0) {
        ++i;
        continue;
      }
      const std::size_t start = i;
      if (text[i] == '(') {
        int depth = 0;
        for (; i < text.size(); ++i) {
          if (text[i] == '(') ++depth;
          if (text[i] == ')' && --depth == 0) break;
        }
        if (i == text.size()) throw ParseError("element expression: unbalanced '('", start);
        ++i;
        tokens_.push_back({std::string(text.substr(start + 1, i - start - 2)), true, start});
      } else if (text[i] == '"') {
        const std::size_t close = text.find('"', i + 1);
        if (close == std::string_view::npos) throw ParseError("element expression: unterminated '\"'", start);
        tokens_.push_back({std::string(text.substr(i + 1, close - i - 1)), false, start});
        i = close + 1;
      } else {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])) == 0 && text[i] != '(') ++i;
        std::string word(text.substr(start, i - start));
        if (auto it = b.elements.find(word); it != b.elements.end()) {
          tokens_.push_back({it->second, true, start});
        } else if (word.size() > 1 && word[0] == '@') {
          tokens_.push_back({"@" + Bindings::lookup(b.families, word.substr(1)), false, start});
        } else {
          tokens_.push_back({Bindings::lookup(b.filters, Bindings::lookup(b.formulas, word)), false, start});
        }
      }
    }
  }

  bool done() const { return next_ == tokens_.size(); }
  bool peek_group() const { return !done() && tokens_[next_].group; }
  bool peek_binding() const {
    return !done() && !tokens_[next_].group && tokens_[next_].text.size() > 1 && tokens_[next_].text.ends_with("=");
  }
  bool peek_family() const { return !done() && !tokens_[next_].group && tokens_[next_].text.starts_with("@"); }

  ValueRule rule() {
    if (!peek_group()) fail("expected a parenthesized rule");
    const auto& t = tokens_[next_++];
    try {
      return ValueRule::parse(t.text);
    } catch (const ParseError& e) {
      throw ParseError(e.detail(), t.offset + 1 + e.position());
    }
  }

  std::string word() {
    if (done() || tokens_[next_].group) fail("expected a word");
    return tokens_[next_++].text;
  }

  StructureFamily family() {
    if (!peek_family()) return StructureFamily::prime_field();
    return StructureFamily::parse(tokens_[next_++].text.substr(1));
  }

  std::optional<std::string> optional_word() {
    if (done()) return std::nullopt;
    return word();
  }

  void finish() {
    if (!done()) fail("unexpected trailing input");
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError("element expression: " + message, done() ? end_offset() : tokens_[next_].offset);
  }

 private:
  struct Token {
    std::string text;
    bool group;
    std::size_t offset;
  };

  std::size_t end_offset() const { return tokens_.empty() ? 0 : tokens_.back().offset + tokens_.back().text.size(); }

  std::vector<Token> tokens_;
  std::size_t next_ = 0;
};

Report do_elem(const up_context& ctx, const Bindings& b, const std::string& expression) {
  ElemTokens in(expression, b);
  const std::string op = in.peek_group() ? std::string("show") : in.word();
  Report r = start("elem");
  r.body["op"] = op;
  std::ostringstream text;

  auto filter_arg = [&] {
    const FilterSpec f = make_filter(ctx, in.optional_word().value_or("generic"));
    in.finish();
    r.body["filter"] = f.to_string();
    return f;
  };

  if (op == "show") {
    ValueRule a = in.rule();
    const StructureFamily fam = in.family();
    in.finish();
    UltraElement e(fam, a);
    r.body["element"] = element_json(e);
    text << e.to_string() << "\n";
  } else if (op == "eq") {
    ValueRule a = in.rule();
    ValueRule c = in.rule();
    const StructureFamily fam = in.family();
    const FilterSpec f = filter_arg();
    UltraElement x(fam, a);
    UltraElement y(fam, c);
    const Verdict v = eq(x, y, f);
    r.body["left"] = element_json(x);
    r.body["right"] = element_json(y);
    r.body["agreement"] = agreement_set(x, y).to_string();
    r.body["verdict"] = verdict_json(v);
    text << x.to_string() << " = " << y.to_string() << ": " << verdict_text(v) << "\n"
         << "agreement set: " << agreement_set(x, y).to_string() << "\n";
  } else if (op == "inv") {
    ValueRule a = in.rule();
    const StructureFamily fam = in.family();
    const FilterSpec f = filter_arg();
    UltraElement x(fam, a);
    const Invertibility inv = is_invertible(x, f);
    r.body["element"] = element_json(x);
    r.body["verdict"] = verdict_json(inv.verdict);
    r.body["witness"] = inv.witness ? element_json(*inv.witness) : json(nullptr);
    text << "invertible " << x.to_string() << ": " << verdict_text(inv.verdict) << "\n";
    if (inv.witness) text << "inverse: " << inv.witness->to_string() << "\n";
  } else if (op == "add" || op == "sub" || op == "mul" || op == "neg") {
    ValueRule a = in.rule();
    ValueRule c = op == "neg" ? ValueRule() : in.rule();
    const StructureFamily fam = in.family();
    in.finish();
    UltraElement x(fam, a);
    UltraElement y(fam, c);
    const UltraElement out = op == "add" ? x + y : op == "sub" ? x - y : op == "mul" ? x * y : -x;
    r.body["result"] = element_json(out);
    text << out.to_string() << "\n";
  } else if (op == "residue") {
    UltraInt x(in.rule());
    if (in.word() != "mod") in.fail("expected 'mod'");
    const std::string n_text = in.word();
    if (n_text.empty() || !std::all_of(n_text.begin(), n_text.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)) != 0; })) {
      in.fail("expected a modulus");
    }
    const std::uint64_t n = std::stoull(n_text);
    const FilterSpec f = filter_arg();
    const ResidueMap m = residue(x, n, f);
    r.body["element"] = x.to_string();
    r.body["modulus"] = m.modulus;
    r.body["class_modulus"] = m.class_modulus;
    json table = json::array();
    text << x.to_string() << " mod " << m.modulus << ", by p mod " << m.class_modulus << ":\n";
    for (const auto& [cls, value] : m.table) {
      table.push_back({{"class", cls}, {"value", value}});
      text << "  " << cls << " mod " << m.class_modulus << " -> " << value << "\n";
    }
    r.body["table"] = table;
    r.body["forced"] = m.forced ? json(*m.forced) : json(nullptr);
    r.body["provenance"] = provenance_json(m.provenance);
    text << (m.forced ? "forced value: " + std::to_string(*m.forced) : std::string("contingent")) << " ("
         << provenance_text(m.provenance) << ")\n";
  } else if (op == "compare") {
    UltraNat x(in.rule());
    UltraNat y(in.rule());
    in.finish();
    const Comparison c = compare(x, y);
    r.body["left"] = x.to_string();
    r.body["right"] = y.to_string();
    r.body["order"] = std::string(to_string(c.order));
    r.body["threshold"] = c.threshold.get_str();
    r.body["provenance"] = provenance_json(c.provenance);
    text << x.to_string() << " " << to_string(c.order) << " " << y.to_string() << " (forced; holds for p > "
         << c.threshold.get_str() << ")\n";
  } else if (op == "const") {
    UltraNat x(in.rule());
    in.finish();
    const auto c = constant_detect(x);
    r.body["element"] = x.to_string();
    r.body["constant"] = c ? json(c->get_str()) : json(nullptr);
    text << x.to_string() << ": " << (c ? "constant " + c->get_str() : std::string("not constant")) << "\n";
  } else if (op == "holds") {
    const Formula phi = parse_formula(in.word());
    ElementAssignment env;
    std::vector<std::pair<std::string, ValueRule>> bound;
    while (in.peek_binding()) {
      std::string name = in.word();
      name.pop_back();
      bound.emplace_back(std::move(name), in.rule());
    }
    const StructureFamily fam = in.family();
    const FilterSpec f = filter_arg();
    json assignment = json::object();
    for (auto& [name, rule] : bound) {
      env.insert_or_assign(name, UltraElement(fam, rule));
      assignment[name] = rule.to_string();
    }
    const std::uint64_t window = effective_window(ctx, kEvalWindow, fam);
    const Verdict v = eval_with_params(fam, phi, env, f, window);
    r.body["formula"] = to_string(phi);
    r.body["family"] = fam.to_string();
    r.body["assignment"] = assignment;
    r.body["window"] = window;
    r.body["verdict"] = verdict_json(v);
    text << to_string(phi) << ": " << verdict_text(v) << "\n";
  } else {
    throw ParseError("element expression: unknown operation '" + op + "'", 0);
  }
  r.text = text.str();
  return r;
}

// -------------------------------------------------------------- classify

Report do_classify(const up_context& ctx, const std::string& set_text, const std::string& filter_text) {
  const DefinableSet s = DefinableSet::parse(set_text);
  const FilterSpec f = make_filter(ctx, filter_text);
  const Verdict v = classify(s, f);
  Report r = start("classify");
  r.body["set"] = s.to_string();
  r.body["filter"] = f.to_string();
  r.body["verdict"] = verdict_json(v);
  r.text = s.to_string() + " under " + f.to_string() + ": " + verdict_text(v) + "\n";
  return r;
}

// ----------------------------------------------------------------- proto

using Parsed = std::pair<BoundedPolySequence, std::optional<FiltrationDescriptor>>;

bool wants_count(const Parsed& p) {
  return p.second && p.second->kind == FiltrationDescriptor::Kind::MonomialCountAtMost;
}

void require_member(const Parsed& p, const FiltrationDescriptor& f) {
  const Membership m = membership_check(p.first, f);
  if (!m.accepted) throw DomainError(p.first.to_string() + " rejected under " + f.to_string() + ": " + m.reason);
}

UltraPolynomial as_poly(const Parsed& p) {
  require_member(p, p.second.value_or(FiltrationDescriptor::degree()));
  return degree_collapse(p.first);
}

UltraMonomialSum as_mono(const Parsed& p) {
  FiltrationDescriptor f = FiltrationDescriptor::monomial_count();
  if (wants_count(p)) f = *p.second;
  require_member(p, f);
  return count_collapse(p.first);
}

json poly_json(const UltraPolynomial& p) {
  json coefficients = json::array();
  for (const auto& c : p.coefficients()) coefficients.push_back(c.rule().to_string());
  return {{"kind", "poly"}, {"result", p.to_string()}, {"coefficients", coefficients},
          {"bound", p.bound()}, {"text_form", p.text_form()}};
}

json mono_json(const UltraMonomialSum& m) {
  json terms = json::array();
  for (const auto& t : m.terms()) {
    terms.push_back({{"coefficient", t.coefficient.rule().to_string()}, {"exponent", t.exponent.rule().to_string()}});
  }
  return {{"kind", "mono"}, {"result", m.to_string()}, {"terms", terms}, {"bound", m.bound()},
          {"text_form", m.text_form()}};
}

Report do_proto(const std::string& op, const std::string& a_text, const std::string& b_text) {
  Report r = start("proto");
  r.body["op"] = op;
  const Parsed a = BoundedPolySequence::parse_with_filtration(a_text);
  r.body["input"] = a.first.to_string();
  std::ostringstream text;

  auto emit = [&](const json& result) {
    r.body["result"] = result;
    text << result["result"].get<std::string>() << "\n" << result["text_form"].get<std::string>() << "\n";
  };

  if (op == "member") {
    r.body["degree_rule"] = a.first.degree_rule().to_string();
    r.body["count_rule"] = a.first.count_rule().to_string();
    std::vector<FiltrationDescriptor> filtrations;
    if (a.second) {
      filtrations.push_back(*a.second);
    } else {
      filtrations = {FiltrationDescriptor::degree(), FiltrationDescriptor::monomial_count()};
    }
    json out = json::array();
    for (const auto& f : filtrations) {
      const Membership m = membership_check(a.first, f);
      out.push_back({{"filtration", f.to_string()},
                     {"accepted", m.accepted},
                     {"step", m.accepted ? json(m.step) : json(nullptr)},
                     {"reason", m.accepted ? json(nullptr) : json(m.reason)}});
      text << f.to_string() << ": "
           << (m.accepted ? "accept(" + std::to_string(m.step) + ")" : "reject: " + m.reason) << "\n";
    }
    r.body["membership"] = out;
  } else if (op == "collapse") {
    emit(wants_count(a) ? mono_json(as_mono(a)) : poly_json(as_poly(a)));
  } else if (op == "grade") {
    const UltraNat g = grade(as_mono(a));
    const auto c = constant_detect(g);
    r.body["grade"] = g.rule().to_string();
    r.body["constant"] = c ? json(c->get_str()) : json(nullptr);
    text << "grade: " << g.to_string() << "\n";
  } else if (op == "add" || op == "mul" || op == "mono-add" || op == "mono-mul") {
    const Parsed b = BoundedPolySequence::parse_with_filtration(b_text);
    r.body["other"] = b.first.to_string();
    const bool mono = op.starts_with("mono-") || wants_count(a) || wants_count(b);
    const bool add = op.ends_with("add");
    if (mono) {
      emit(mono_json(add ? mono_add(as_mono(a), as_mono(b)) : mono_mul(as_mono(a), as_mono(b))));
    } else {
      emit(poly_json(add ? poly_add(as_poly(a), as_poly(b)) : poly_mul(as_poly(a), as_poly(b))));
    }
  } else {
    throw ParseError("unknown proto operation '" + op + "'", 0);
  }
  r.text = text.str();
  return r;
}

// -------------------------------------------------------------- transfer

std::string truth_summary(const SampledTruthSet& s) {
  return s.exact ? s.exact->to_string() + " (classifier: " + s.classifier + ")" : std::string("no exact set");
}

Report do_transfer(const up_context& ctx, const Bindings& b, const std::string& a_text, const std::string& b_text,
                   const std::string& sentence_text) {
  const StructureFamily fa = StructureFamily::parse(Bindings::lookup(b.families, a_text));
  const StructureFamily fb = StructureFamily::parse(Bindings::lookup(b.families, b_text));
  const Formula sentence = parse_sentence(Bindings::lookup(b.formulas, sentence_text));
  const std::uint64_t window =
      std::min(effective_window(ctx, kCrossCheckWindow, fa), effective_window(ctx, kCrossCheckWindow, fb));
  const TransferReport t = transfer_report(fa, fb, sentence, window);

  Report r = start("transfer");
  r.body["family_a"] = fa.to_string();
  r.body["family_b"] = fb.to_string();
  r.body["sentence"] = to_string(sentence);
  r.body["window"] = t.window;
  auto side = [](const SampledTruthSet& s, const Verdict& v) {
    return json{{"truth_set", set_json(s.exact)},
                {"classifier", s.exact ? json(s.classifier) : json(nullptr)},
                {"verdict", verdict_json(v)}};
  };
  r.body["a"] = side(t.truth_a, t.verdict_a);
  r.body["b"] = side(t.truth_b, t.verdict_b);
  r.body["exceptional_primes"] = t.exceptional_primes;
  r.body["difference"] = set_json(t.difference);
  r.body["conclusion"] = std::string(to_string(t.conclusion));
  r.body["notes"] = t.notes;

  std::ostringstream text;
  text << "sentence: " << to_string(sentence) << "\n"
       << "window: primes <= " << t.window << "\n"
       << fa.to_string() << ": " << truth_summary(t.truth_a) << "; generic " << verdict_text(t.verdict_a) << "\n"
       << fb.to_string() << ": " << truth_summary(t.truth_b) << "; generic " << verdict_text(t.verdict_b) << "\n"
       << "exceptional primes:";
  if (t.exceptional_primes.empty()) text << " none";
  for (auto p : t.exceptional_primes) text << " " << p;
  text << "\n";
  if (t.difference) text << "exact difference: " << t.difference->to_string() << "\n";
  text << "conclusion: " << to_string(t.conclusion) << "\n";
  for (const auto& note : t.notes) text << "note: " << note << "\n";
  r.text = text.str();
  return r;
}

// ----------------------------------------------------------------- check

Report do_check(std::uint64_t seed, std::uint32_t cases, bool& failed) {
  gen::Rng rng(seed);
  const StructureFamily fp = StructureFamily::prime_field();
  const auto primes = primes_up_to(50);
  std::uint64_t checks = 0;
  json failures = json::array();
  auto record = [&](json f) {
    if (failures.size() < 20) failures.push_back(std::move(f));
  };

  for (std::uint32_t i = 0; i < cases; ++i) {
    const Formula phi = gen::sentence(rng);
    for (std::uint64_t p : primes) {
      ++checks;
      const bool direct = eval_finite(fp.materialize(p), phi);
      const Verdict v = los_verdict(fp, phi, FilterSpec::principal(p), p);
      if (v.value != (direct ? Truth::ForcedTrue : Truth::ForcedFalse)) {
        record({{"law", "principal"}, {"sentence", to_string(phi)}, {"prime", p}, {"direct", direct},
                {"verdict", std::string(to_string(v.value))}});
      }
    }
    const UltraElement a(fp, gen::rule(rng, 2, 2));
    const UltraElement b(fp, gen::rule(rng, 2, 2));
    const UltraElement c(fp, gen::rule(rng, 2, 2));
    ++checks;
    if (eq(a * (b + c), a * b + a * c, FilterSpec::generic()).value != Truth::ForcedTrue) {
      record({{"law", "distributivity"}, {"a", a.to_string()}, {"b", b.to_string()}, {"c", c.to_string()}});
    }
  }

  Report r = start("check");
  r.body["seed"] = seed;
  r.body["cases"] = cases;
  r.body["checks"] = checks;
  r.body["failures"] = failures;
  failed = !failures.empty();
  r.text = "seed " + std::to_string(seed) + ": " + std::to_string(checks) + " checks, " +
           std::to_string(failures.size()) + " failures\n";
  for (const auto& f : failures) r.text += "  " + f.dump() + "\n";
  return r;
}

// ------------------------------------------------------------ plumbing

up_status status_of_current_exception(std::string& message) {
  try {
    throw;
  } catch (const ParseError& e) {
    message = e.what();
    return UP_ERR_PARSE;
  } catch (const json::exception& e) {
    message = std::string("session: ") + e.what();
    return UP_ERR_PARSE;
  } catch (const CapExceeded& e) {
    message = e.what();
    return UP_ERR_CAP;
  } catch (const InconsistentFilterBase& e) {
    message = e.what();
    return UP_ERR_INCONSISTENT;
  } catch (const DomainError& e) {
    message = e.what();
    return UP_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    message = e.what();
    return UP_ERR_INTERNAL;
  } catch (...) {
    message = "unknown error";
    return UP_ERR_INTERNAL;
  }
}

std::string_view status_name(up_status s) {
  switch (s) {
    case UP_OK: return "ok";
    case UP_ERR_PARSE: return "parse";
    case UP_ERR_CAP: return "cap";
    case UP_ERR_INCONSISTENT: return "inconsistent";
    case UP_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case UP_ERR_INTERNAL: break;
  }
  return "internal";
}

void publish(up_context* ctx, Report r) {
  ctx->last_json = std::move(r.body);
  ctx->json_text = ctx->last_json.dump(2);
  ctx->text = std::move(r.text);
  ctx->error.clear();
}

template <typename F>
up_status run(up_context* ctx, F&& f) {
  if (ctx == nullptr) return UP_ERR_INVALID_ARGUMENT;
  ctx->last_json = nullptr;
  ctx->json_text.clear();
  ctx->text.clear();
  ctx->error.clear();
  try {
    publish(ctx, f());
    return UP_OK;
  } catch (...) {
    return status_of_current_exception(ctx->error);
  }
}

std::string arg(const char* s) {
  if (s == nullptr) throw DomainError("missing argument");
  return s;
}

// One session command: ["eval", family, sentence, filter, "bitmap"?] etc.
Report session_command(const up_context& ctx, const Bindings& b, const json& command, up_status& status,
                       std::string& error) {
  std::vector<std::string> args;
  for (const auto& a : command) args.push_back(a.get<std::string>());
  if (args.empty()) throw ParseError("session: empty command", 0);
  auto at = [&](std::size_t i, const char* fallback = nullptr) -> std::string {
    if (i < args.size()) return args[i];
    if (fallback != nullptr) return fallback;
    throw ParseError("session: '" + args[0] + "' needs more arguments", 0);
  };
  try {
    const std::string& name = args[0];
    if (name == "eval") return do_eval(ctx, b, at(1), at(2), at(3, "generic"), at(4, "") == "bitmap");
    if (name == "elem") return do_elem(ctx, b, at(1));
    if (name == "classify") return do_classify(ctx, at(1), Bindings::lookup(b.filters, at(2, "generic")));
    if (name == "proto") return do_proto(at(1), at(2), at(3, ""));
    if (name == "transfer") return do_transfer(ctx, b, at(1), at(2), at(3));
    throw ParseError("session: unknown command '" + name + "'", 0);
  } catch (...) {
    std::string message;
    const up_status s = status_of_current_exception(message);
    if (status == UP_OK) {
      status = s;
      error = message;
    }
    Report r;
    r.body["command"] = args[0];
    r.body["error"] = {{"status", std::string(status_name(s))}, {"message", message}};
    r.text = args[0] + ": error: " + message + "\n";
    return r;
  }
}

}  // namespace

extern "C" {

up_context* up_context_new(void) {
  try {
    return new up_context();
  } catch (...) {
    return nullptr;
  }
}

void up_context_free(up_context* ctx) { delete ctx; }

up_status up_set_window(up_context* ctx, uint64_t window) {
  if (ctx == nullptr) return UP_ERR_INVALID_ARGUMENT;
  if (window == 1) {
    ctx->error = "window must be at least 2";
    return UP_ERR_INVALID_ARGUMENT;
  }
  ctx->window = window;
  return UP_OK;
}

up_status up_add_assumption(up_context* ctx, const char* set_expr) {
  if (ctx == nullptr) return UP_ERR_INVALID_ARGUMENT;
  try {
    DefinableSet s = DefinableSet::parse(arg(set_expr));
    std::vector<DefinableSet> next = ctx->assumptions;
    next.push_back(std::move(s));
    const FilterBaseCheck check = check_filter_base(next);
    if (!check.ok) throw InconsistentFilterBase(check.intersection);
    ctx->assumptions = std::move(next);
    return UP_OK;
  } catch (...) {
    return status_of_current_exception(ctx->error);
  }
}

void up_clear_assumptions(up_context* ctx) {
  if (ctx != nullptr) ctx->assumptions.clear();
}

up_status up_eval(up_context* ctx, const char* family, const char* sentence, const char* filter, int bitmap) {
  return run(ctx, [&] {
    return do_eval(*ctx, {}, arg(family), arg(sentence), filter ? filter : "generic", bitmap != 0);
  });
}

up_status up_elem(up_context* ctx, const char* expression) {
  return run(ctx, [&] { return do_elem(*ctx, {}, arg(expression)); });
}

up_status up_classify(up_context* ctx, const char* set_expr, const char* filter) {
  return run(ctx, [&] { return do_classify(*ctx, arg(set_expr), filter ? filter : "generic"); });
}

up_status up_proto(up_context* ctx, const char* op, const char* a, const char* b) {
  return run(ctx, [&] { return do_proto(arg(op), arg(a), b ? b : ""); });
}

up_status up_transfer(up_context* ctx, const char* family_a, const char* family_b, const char* sentence) {
  return run(ctx, [&] { return do_transfer(*ctx, {}, arg(family_a), arg(family_b), arg(sentence)); });
}

up_status up_session(up_context* ctx, const char* session_json) {
  up_status status = UP_OK;
  std::string first_error;
  const up_status outer = run(ctx, [&] {
    const json doc = json::parse(arg(session_json));
    up_context local;
    local.window = doc.value("window", ctx->window);
    local.assumptions = ctx->assumptions;
    const json assume = doc.value("assume", json::array());
    for (const auto& a : assume) {
      local.assumptions.push_back(DefinableSet::parse(a.get<std::string>()));
    }
    if (!check_filter_base(local.assumptions).ok) {
      throw InconsistentFilterBase(check_filter_base(local.assumptions).intersection);
    }
    Bindings b;
    const json bindings = doc.value("bindings", json::object());
    auto load = [&](const char* key, std::map<std::string, std::string>& table) {
      const json table_json = bindings.value(key, json::object());
      for (const auto& [name, value] : table_json.items()) {
        table[name] = value.get<std::string>();
      }
    };
    load("families", b.families);
    load("filters", b.filters);
    load("elements", b.elements);
    load("formulas", b.formulas);

    Report r = start("session");
    r.body["window"] = local.window;
    json results = json::array();
    for (const auto& command : doc.at("commands")) {
      Report one = session_command(local, b, command, status, first_error);
      one.body.erase("schema");
      results.push_back(std::move(one.body));
      r.text += one.text;
    }
    r.body["results"] = results;
    return r;
  });
  if (outer != UP_OK) return outer;
  ctx->error = first_error;
  return status;
}

up_status up_check(up_context* ctx, uint64_t seed, uint32_t cases) {
  bool failed = false;
  const up_status s = run(ctx, [&] { return do_check(seed, cases, failed); });
  if (s == UP_OK && failed) {
    ctx->error = "self-check found disagreements";
    return UP_ERR_INTERNAL;
  }
  return s;
}

const char* up_last_json(const up_context* ctx) { return ctx ? ctx->json_text.c_str() : ""; }
const char* up_last_text(const up_context* ctx) { return ctx ? ctx->text.c_str() : ""; }
const char* up_last_error(const up_context* ctx) { return ctx ? ctx->error.c_str() : "no context"; }

const char* up_version(void) { return "0.1.0"; }

}  // extern "C"
