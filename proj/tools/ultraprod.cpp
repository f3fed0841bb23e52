// Command-line front end over the C interface.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ultraprod/ultraprod.h"

namespace {

struct Context {
  up_context* ctx = up_context_new();
  ~Context() { up_context_free(ctx); }
};

int finish(up_context* ctx, up_status status, bool as_json) {
  const std::string out = as_json ? up_last_json(ctx) : up_last_text(ctx);
  if (!out.empty()) {
    std::cout << out;
    if (out.back() != '\n') std::cout << '\n';
  }
  if (status != UP_OK) std::cerr << "ultraprod: error: " << up_last_error(ctx) << '\n';
  return static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ultraproducts of finite rings over the primes: verdicts, elements, protoproducts."};
  app.require_subcommand(1);

  std::uint64_t window = 0;
  bool as_json = false;
  std::vector<std::string> assumptions;
  std::uint64_t seed = 1;
  app.add_option("--window", window, "Largest prime sampled (overrides ULTRAPROD_WINDOW)");
  app.add_flag("--json", as_json, "Print the JSON report instead of text");
  app.add_option("--assume", assumptions, "Add a set to the filter base, e.g. \"(1 mod 4)\"");
  app.add_option("--seed", seed, "Seed for the check command");

  std::string family, family_b, sentence, filter = "generic", expression, set, op, a, b, session_file;
  bool bitmap = false;
  std::uint32_t cases = 100;

  auto* eval = app.add_subcommand("eval", "Truth of a sentence in an ultraproduct");
  eval->add_option("family", family, "Fp, Zp^k, Z/n or const:...")->required();
  eval->add_option("sentence", sentence)->required();
  eval->add_option("filter", filter, "generic or principal:<p>");
  eval->add_flag("--bitmap", bitmap, "Include per-prime truth on the window");

  auto* elem = app.add_subcommand("elem", "Element arithmetic, equality, inverses, residues, order");
  elem->add_option("expression", expression)->required();

  auto* classify = app.add_subcommand("classify", "Membership of a set of primes in the ultrafilter");
  classify->add_option("set", set)->required();
  classify->add_option("filter", filter);

  auto* proto = app.add_subcommand("proto", "Protoproducts of F_p[x]");
  proto->add_option("op", op, "member, collapse, add, mul, mono-add, mono-mul, grade")->required();
  proto->add_option("a", a)->required();
  proto->add_option("b", b);

  auto* transfer = app.add_subcommand("transfer", "Compare two families on one sentence");
  transfer->add_option("family_a", family)->required();
  transfer->add_option("family_b", family_b)->required();
  transfer->add_option("sentence", sentence)->required();

  auto* session = app.add_subcommand("session", "Replay a JSON session file");
  session->add_option("file", session_file)->required()->check(CLI::ExistingFile);

  auto* check = app.add_subcommand("check", "Randomized self-check against brute force");
  check->add_option("--cases", cases, "Number of random sentences");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : UP_ERR_PARSE;
  }

  Context c;
  if (c.ctx == nullptr) return UP_ERR_INTERNAL;

  if (window == 0) {
    if (const char* env = std::getenv("ULTRAPROD_WINDOW"); env != nullptr && *env != '\0') {
      try {
        window = std::stoull(env);
      } catch (const std::exception&) {
        std::cerr << "ultraprod: error: ULTRAPROD_WINDOW is not a number: " << env << '\n';
        return UP_ERR_PARSE;
      }
    }
  }
  if (window != 0 && up_set_window(c.ctx, window) != UP_OK) {
    std::cerr << "ultraprod: error: " << up_last_error(c.ctx) << '\n';
    return UP_ERR_INVALID_ARGUMENT;
  }
  for (const auto& s : assumptions) {
    if (up_status st = up_add_assumption(c.ctx, s.c_str()); st != UP_OK) {
      std::cerr << "ultraprod: error: " << up_last_error(c.ctx) << '\n';
      return st;
    }
  }

  up_status status = UP_ERR_INTERNAL;
  if (*eval) {
    status = up_eval(c.ctx, family.c_str(), sentence.c_str(), filter.c_str(), bitmap ? 1 : 0);
  } else if (*elem) {
    status = up_elem(c.ctx, expression.c_str());
  } else if (*classify) {
    status = up_classify(c.ctx, set.c_str(), filter.c_str());
  } else if (*proto) {
    status = up_proto(c.ctx, op.c_str(), a.c_str(), b.c_str());
  } else if (*transfer) {
    status = up_transfer(c.ctx, family.c_str(), family_b.c_str(), sentence.c_str());
  } else if (*session) {
    std::ifstream in(session_file);
    std::stringstream buffer;
    buffer << in.rdbuf();
    status = up_session(c.ctx, buffer.str().c_str());
  } else if (*check) {
    status = up_check(c.ctx, seed, cases);
  }
  return finish(c.ctx, status, as_json);
}
