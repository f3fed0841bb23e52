#pragma once

// Independent brute-force reference implementations used as test oracles.
// Deliberately naive: nothing here calls into the library's arithmetic.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ultraprod/formula.hpp"

namespace oracle {

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

inline std::vector<std::uint64_t> primes(std::uint64_t lo, std::uint64_t hi) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = lo; n <= hi; ++n) {
    if (is_prime(n)) out.push_back(n);
  }
  return out;
}

// Tarskian evaluation in Z/n with plain integer arithmetic.
class ModEval {
 public:
  explicit ModEval(std::int64_t n) : n_(n) {}

  std::int64_t term(const ultraprod::Term& t, std::map<std::string, std::int64_t>& env) const {
    using K = ultraprod::Term::Kind;
    switch (t.kind) {
      case K::Var: return env.at(t.name);
      case K::Zero: return 0;
      case K::One: return 1 % n_;
      case K::Literal: return static_cast<std::int64_t>(t.literal % static_cast<std::uint64_t>(n_));
      case K::Neg: return (n_ - term(t.args[0], env)) % n_;
      case K::Add: return (term(t.args[0], env) + term(t.args[1], env)) % n_;
      case K::Mul: return (term(t.args[0], env) * term(t.args[1], env)) % n_;
    }
    return 0;
  }

  bool holds(const ultraprod::Formula& f, std::map<std::string, std::int64_t>& env) const {
    using K = ultraprod::Formula::Kind;
    switch (f.kind) {
      case K::Eq: return term(f.terms[0], env) == term(f.terms[1], env);
      case K::Not: return !holds(f.subs[0], env);
      case K::And: return holds(f.subs[0], env) && holds(f.subs[1], env);
      case K::Or: return holds(f.subs[0], env) || holds(f.subs[1], env);
      case K::Implies: return !holds(f.subs[0], env) || holds(f.subs[1], env);
      case K::Exists:
      case K::Forall: {
        const bool exists = f.kind == K::Exists;
        auto saved = env.find(f.var) == env.end() ? std::optional<std::int64_t>{} : env[f.var];
        bool result = !exists;
        for (std::int64_t a = 0; a < n_; ++a) {
          env[f.var] = a;
          if (holds(f.subs[0], env) == exists) {
            result = exists;
            break;
          }
        }
        if (saved) env[f.var] = *saved; else env.erase(f.var);
        return result;
      }
    }
    return false;
  }

  bool holds(const ultraprod::Formula& f) const {
    std::map<std::string, std::int64_t> env;
    return holds(f, env);
  }

 private:
  std::int64_t n_;
};

// Table-driven evaluation for an explicit finite ring.
struct TableRing {
  std::vector<std::vector<int>> add;
  std::vector<std::vector<int>> mul;
  int zero = 0;
  int one = 1;

  int neg(int a) const {
    for (int b = 0; b < static_cast<int>(add.size()); ++b) {
      if (add[a][b] == zero) return b;
    }
    return -1;
  }

  int literal(std::uint64_t n) const {
    int acc = zero;
    for (std::uint64_t i = 0; i < n; ++i) acc = add[acc][one];
    return acc;
  }

  int term(const ultraprod::Term& t, std::map<std::string, int>& env) const {
    using K = ultraprod::Term::Kind;
    switch (t.kind) {
      case K::Var: return env.at(t.name);
      case K::Zero: return zero;
      case K::One: return one;
      case K::Literal: return literal(t.literal);
      case K::Neg: return neg(term(t.args[0], env));
      case K::Add: return add[term(t.args[0], env)][term(t.args[1], env)];
      case K::Mul: return mul[term(t.args[0], env)][term(t.args[1], env)];
    }
    return 0;
  }

  bool holds(const ultraprod::Formula& f, std::map<std::string, int>& env) const {
    using K = ultraprod::Formula::Kind;
    switch (f.kind) {
      case K::Eq: return term(f.terms[0], env) == term(f.terms[1], env);
      case K::Not: return !holds(f.subs[0], env);
      case K::And: return holds(f.subs[0], env) && holds(f.subs[1], env);
      case K::Or: return holds(f.subs[0], env) || holds(f.subs[1], env);
      case K::Implies: return !holds(f.subs[0], env) || holds(f.subs[1], env);
      case K::Exists:
      case K::Forall: {
        const bool exists = f.kind == K::Exists;
        bool result = !exists;
        for (int a = 0; a < static_cast<int>(add.size()); ++a) {
          env[f.var] = a;
          if (holds(f.subs[0], env) == exists) {
            result = exists;
            break;
          }
        }
        env.erase(f.var);
        return result;
      }
    }
    return false;
  }

  bool holds(const ultraprod::Formula& f) const {
    std::map<std::string, int> env;
    return holds(f, env);
  }
};

}  // namespace oracle
