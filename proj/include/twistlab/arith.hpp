#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "twistlab/errors.hpp"

namespace twistlab {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using u32 = std::uint32_t;
using i128 = __int128;
using u128 = unsigned __int128;

// Sieves refuse to allocate beyond this many integers unless the caller raises it.
inline constexpr u64 kDefaultSieveGuard = 100000000ull;  // 1e8

u64 mulmod(u64 a, u64 b, u64 m);
u64 powmod(u64 base, u64 exp, u64 m);

// Kronecker symbol (a|n), defined for all (a, n) with the usual extensions:
// (a|0) = 1 iff a = +-1, (a|-1) = sign part, (a|2) via the mod-8 character.
int kronecker(i64 a, i64 n);

// 2-adic valuation of m > 0.
int ord2(u64 m);

// Deterministic Miller-Rabin, valid for all 64-bit n.
bool is_prime(u64 n);

// Factor n > 0 into (prime, multiplicity) pairs, primes ascending.
std::vector<std::pair<u64, int>> factorize(u64 n);

// Does c[0] x^3 + c[1] x^2 + c[2] x + c[3] have a root mod ell?
// ell must be an odd prime and c[0] nonzero mod ell.  Decided by
// deg gcd(f, x^ell - x) >= 1 with x^ell computed by square-and-multiply
// mod f, so the cost is O(log ell) ring operations, never O(ell).
bool cubic_has_root_mod(const std::array<i64, 4>& c, u64 ell);

// Primes <= limit, ascending.
std::vector<u64> sieve_primes(u64 limit, u64 guard = kDefaultSieveGuard);

// Smallest-prime-factor table for [0, limit]; entries 0 and 1 are 0.
std::vector<u32> spf_sieve(u64 limit, u64 guard = kDefaultSieveGuard);

struct SquarefreeInteger {
  u64 value = 1;
  std::vector<u64> factors;  // distinct primes, ascending; empty iff value == 1

  // Factors d and validates squarefreeness.
  static SquarefreeInteger from_value(u64 d);
  // Validates primality, distinctness; sorts.
  static SquarefreeInteger from_factors(std::vector<u64> primes);
};

// Streams squarefree 1..limit in increasing order.
void for_each_squarefree(u64 limit,
                         const std::function<void(const SquarefreeInteger&)>& fn,
                         u64 guard = kDefaultSieveGuard);
std::vector<SquarefreeInteger> enumerate_squarefree(u64 limit,
                                                    u64 guard = kDefaultSieveGuard);

}  // namespace twistlab
