#include "ultraprod/evaluator.hpp"

#include <vector>

#include "ultraprod/errors.hpp"

namespace ultraprod {
namespace {

// Formula with variables resolved to slots and literals reduced into the ring.
struct SlotTerm {
  Term::Kind kind;
  std::size_t slot = 0;
  Element constant = 0;
  std::vector<SlotTerm> args;
};

struct SlotFormula {
  Formula::Kind kind;
  std::size_t slot = 0;
  std::vector<SlotTerm> terms;
  std::vector<SlotFormula> subs;
};

class Compiler {
 public:
  Compiler(const FiniteRing& ring, const Assignment& env) : ring_(ring) {
    for (const auto& [name, value] : env) {
      if (value >= ring.size()) throw DomainError("assigned value of '" + name + "' out of range");
      scope_.emplace_back(name, initial_.size());
      initial_.push_back(value);
    }
  }

  SlotFormula compile(const Formula& f) {
    SlotFormula out{f.kind};
    switch (f.kind) {
      case Formula::Kind::Eq:
        for (const auto& t : f.terms) out.terms.push_back(compile(t));
        break;
      case Formula::Kind::Exists:
      case Formula::Kind::Forall:
        out.slot = initial_.size();
        initial_.push_back(0);
        scope_.emplace_back(f.var, out.slot);
        out.subs.push_back(compile(f.subs[0]));
        scope_.pop_back();
        break;
      default:
        for (const auto& s : f.subs) out.subs.push_back(compile(s));
    }
    return out;
  }

  SlotTerm compile(const Term& t) {
    SlotTerm out{t.kind};
    switch (t.kind) {
      case Term::Kind::Var:
        out.slot = lookup(t.name);
        break;
      case Term::Kind::Zero:
        out.constant = ring_.zero();
        break;
      case Term::Kind::One:
        out.constant = ring_.one();
        break;
      case Term::Kind::Literal:
        out.constant = ring_.from_integer(mpz_class(static_cast<unsigned long>(t.literal)));
        break;
      default:
        for (const auto& a : t.args) out.args.push_back(compile(a));
    }
    return out;
  }

  std::vector<Element> slots() const { return initial_; }

 private:
  std::size_t lookup(const std::string& name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (it->first == name) return it->second;
    }
    throw DomainError("free variable '" + name + "' is unassigned");
  }

  const FiniteRing& ring_;
  std::vector<std::pair<std::string, std::size_t>> scope_;
  std::vector<Element> initial_;
};

class Evaluator {
 public:
  Evaluator(const FiniteRing& ring, std::vector<Element> slots, const EvalLimits& limits)
      : ring_(ring), slots_(std::move(slots)), limits_(limits) {}

  bool holds(const SlotFormula& f) {
    switch (f.kind) {
      case Formula::Kind::Eq:
        return value(f.terms[0]) == value(f.terms[1]);
      case Formula::Kind::Not:
        return !holds(f.subs[0]);
      case Formula::Kind::And:
        return holds(f.subs[0]) && holds(f.subs[1]);
      case Formula::Kind::Or:
        return holds(f.subs[0]) || holds(f.subs[1]);
      case Formula::Kind::Implies:
        return !holds(f.subs[0]) || holds(f.subs[1]);
      case Formula::Kind::Exists:
      case Formula::Kind::Forall: {
        const bool want = f.kind == Formula::Kind::Exists;
        const std::uint64_t n = ring_.size();
        if (n > limits_.quantifier_cap) {
          throw CapExceeded("quantifier domain of size " + std::to_string(n) +
                            " exceeds cap " + std::to_string(limits_.quantifier_cap));
        }
        for (std::uint64_t a = 0; a < n; ++a) {
          if (++work_ > limits_.work_budget) {
            throw CapExceeded("evaluation work budget of " + std::to_string(limits_.work_budget) +
                              " assignments exhausted");
          }
          slots_[f.slot] = static_cast<Element>(a);
          if (holds(f.subs[0]) == want) return want;
        }
        return !want;
      }
    }
    return false;
  }

  Element value(const SlotTerm& t) const {
    switch (t.kind) {
      case Term::Kind::Var:
        return slots_[t.slot];
      case Term::Kind::Neg:
        return ring_.neg(value(t.args[0]));
      case Term::Kind::Add:
        return ring_.add(value(t.args[0]), value(t.args[1]));
      case Term::Kind::Mul:
        return ring_.mul(value(t.args[0]), value(t.args[1]));
      default:
        return t.constant;
    }
  }

 private:
  const FiniteRing& ring_;
  std::vector<Element> slots_;
  EvalLimits limits_;
  std::uint64_t work_ = 0;
};

}  // namespace

bool eval_finite(const FiniteRing& ring, const Formula& formula, const Assignment& env,
                 const EvalLimits& limits) {
  Compiler compiler(ring, env);
  SlotFormula compiled = compiler.compile(formula);
  Evaluator evaluator(ring, compiler.slots(), limits);
  return evaluator.holds(compiled);
}

Element eval_term(const FiniteRing& ring, const Term& term, const Assignment& env) {
  Compiler compiler(ring, env);
  SlotTerm compiled = compiler.compile(term);
  Evaluator evaluator(ring, compiler.slots(), EvalLimits{});
  return evaluator.value(compiled);
}

}  // namespace ultraprod
