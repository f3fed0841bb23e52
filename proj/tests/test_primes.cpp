#include "doctest.h"
#include "oracle.hpp"
#include "ultraprod/primes.hpp"

using namespace ultraprod;

TEST_CASE("is_prime agrees with trial division below 20000") {
  for (std::uint64_t n = 0; n < 20000; ++n) CHECK_MESSAGE(is_prime(n) == oracle::is_prime(n), n);
}

TEST_CASE("is_prime on large inputs") {
  CHECK(is_prime(1'000'000'007ULL));
  CHECK(is_prime(18446744073709551557ULL));  // largest 64-bit prime
  CHECK_FALSE(is_prime(3215031751ULL));       // strong pseudoprime to bases 2,3,5,7
  CHECK_FALSE(is_prime(1'000'000'007ULL * 998'244'353ULL));
}

TEST_CASE("primes_up_to") {
  CHECK(primes_up_to(1).empty());
  CHECK(primes_up_to(2) == std::vector<std::uint64_t>{2});
  CHECK(primes_up_to(30) == std::vector<std::uint64_t>{2, 3, 5, 7, 11, 13, 17, 19, 23, 29});
  CHECK(primes_up_to(10000).size() == 1229);
}

TEST_CASE("prime_factors") {
  CHECK(prime_factors(std::uint64_t{1}).empty());
  CHECK(prime_factors(std::uint64_t{360}) == std::vector<std::uint64_t>{2, 3, 5});
  CHECK(prime_factors(mpz_class(-98)) == std::vector<std::uint64_t>{2, 7});
  mpz_class big = mpz_class(1'000'000'007) * 998'244'353 * 4;
  CHECK(prime_factors(big) == std::vector<std::uint64_t>{2, 998'244'353, 1'000'000'007});
  for (std::uint64_t n = 2; n < 3000; ++n) {
    std::uint64_t m = n;
    for (std::uint64_t q : prime_factors(n)) {
      CHECK(oracle::is_prime(q));
      while (m % q == 0) m /= q;
    }
    CHECK(m == 1);
  }
}

TEST_CASE("least_prime_in_class and unit_residues") {
  CHECK(least_prime_in_class(1, 4, 100) == 5);
  CHECK(least_prime_in_class(3, 4, 100) == 3);
  CHECK(least_prime_in_class(2, 4, 100) == 2);
  CHECK_FALSE(least_prime_in_class(0, 4, 100).has_value());
  CHECK(unit_residues(1) == std::vector<std::uint64_t>{0});
  CHECK(unit_residues(12) == std::vector<std::uint64_t>{1, 5, 7, 11});
  CHECK(mod_u64(mpz_class(-1), 4) == 3);
}
