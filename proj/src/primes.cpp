#include "ultraprod/primes.hpp"

#include <algorithm>
#include <numeric>

#include "ultraprod/errors.hpp"

namespace ultraprod {
namespace {

constexpr std::uint64_t kSieveLimit = 1'000'000;

const std::vector<bool>& composite_table() {
  static const std::vector<bool> table = [] {
    std::vector<bool> composite(kSieveLimit + 1, false);
    composite[0] = composite[1] = true;
    for (std::uint64_t i = 2; i * i <= kSieveLimit; ++i) {
      if (composite[i]) continue;
      for (std::uint64_t j = i * i; j <= kSieveLimit; j += i) composite[j] = true;
    }
    return composite;
  }();
  return table;
}

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp != 0) {
    if (exp & 1U) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1U;
  }
  return result;
}

bool miller_rabin(std::uint64_t n) {
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1U) == 0) {
    d >>= 1U;
    ++s;
  }
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL,
                          23ULL, 29ULL, 31ULL, 37ULL}) {
    if (a % n == 0) continue;
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

// Pollard-Brent on a composite with no factor below the sieve limit.
mpz_class find_factor(const mpz_class& n) {
  for (unsigned long c = 1; c < 64; ++c) {
    mpz_class x = 2, y = 2, d = 1;
    auto step = [&](const mpz_class& v) -> mpz_class { return (v * v + c) % n; };
    while (d == 1) {
      x = step(x);
      y = step(step(y));
      mpz_class diff = abs(x - y);
      mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
    }
    if (d != n) return d;
  }
  throw DomainError("unable to factor " + n.get_str());
}

void collect_large_factors(const mpz_class& n, std::vector<std::uint64_t>& out) {
  if (n == 1) return;
  if (mpz_probab_prime_p(n.get_mpz_t(), 40) > 0) {
    if (!n.fits_ulong_p()) {
      throw DomainError("prime factor " + n.get_str() + " exceeds 64 bits");
    }
    out.push_back(n.get_ui());
    return;
  }
  mpz_class f = find_factor(n);
  collect_large_factors(f, out);
  collect_large_factors(n / f, out);
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n <= kSieveLimit) return !composite_table()[n];
  if (n % 2 == 0) return false;
  return miller_rabin(n);
}

std::vector<std::uint64_t> primes_up_to(std::uint64_t bound) {
  std::vector<std::uint64_t> out;
  if (bound <= kSieveLimit) {
    const auto& composite = composite_table();
    for (std::uint64_t i = 2; i <= bound; ++i) {
      if (!composite[i]) out.push_back(i);
    }
    return out;
  }
  std::vector<bool> composite(bound + 1, false);
  for (std::uint64_t i = 2; i <= bound; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::uint64_t j = i * i; j <= bound; j += i) composite[j] = true;
  }
  return out;
}

std::vector<std::uint64_t> prime_factors(const mpz_class& n) {
  if (n == 0) throw DomainError("prime_factors of zero");
  mpz_class rest = abs(n);
  std::vector<std::uint64_t> out;
  const auto& composite = composite_table();
  for (std::uint64_t q = 2; q <= kSieveLimit; ++q) {
    if (composite[q]) continue;
    if (rest == 1) break;
    if (mpz_divisible_ui_p(rest.get_mpz_t(), q) != 0) {
      out.push_back(q);
      while (mpz_divisible_ui_p(rest.get_mpz_t(), q) != 0) rest /= q;
    }
    if (mpz_class(q) * q > rest) {
      if (rest > 1) {
        collect_large_factors(rest, out);
        rest = 1;
      }
      break;
    }
  }
  collect_large_factors(rest, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  return prime_factors(mpz_class(static_cast<unsigned long>(n)));
}

std::optional<std::uint64_t> least_prime_in_class(std::uint64_t residue,
                                                  std::uint64_t modulus,
                                                  std::uint64_t bound) {
  for (std::uint64_t q = residue % modulus; q <= bound; q += modulus) {
    if (is_prime(q)) return q;
  }
  return std::nullopt;
}

std::vector<std::uint64_t> unit_residues(std::uint64_t modulus) {
  std::vector<std::uint64_t> out;
  if (modulus == 1) return {0};
  for (std::uint64_t r = 1; r < modulus; ++r) {
    if (std::gcd(r, modulus) == 1) out.push_back(r);
  }
  return out;
}

std::uint64_t mod_u64(const mpz_class& n, std::uint64_t m) {
  mpz_class r;
  mpz_fdiv_r_ui(r.get_mpz_t(), n.get_mpz_t(), m);
  return r.get_ui();
}

}  // namespace ultraprod
