#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <gmpxx.h>

namespace ultraprod {

/// Deterministic for all 64-bit inputs.
bool is_prime(std::uint64_t n);

/// All primes p with p <= bound, ascending.
std::vector<std::uint64_t> primes_up_to(std::uint64_t bound);

/// Distinct prime divisors of |n|, ascending. `n` must be nonzero.
std::vector<std::uint64_t> prime_factors(const mpz_class& n);
std::vector<std::uint64_t> prime_factors(std::uint64_t n);

/// Least prime q <= bound with q = residue (mod modulus), if any.
std::optional<std::uint64_t> least_prime_in_class(std::uint64_t residue,
                                                  std::uint64_t modulus,
                                                  std::uint64_t bound);

/// Residues in [0, modulus) coprime to modulus. For modulus 1 this is {0}.
std::vector<std::uint64_t> unit_residues(std::uint64_t modulus);

/// Least nonnegative residue of n mod m (m > 0).
std::uint64_t mod_u64(const mpz_class& n, std::uint64_t m);

}  // namespace ultraprod
