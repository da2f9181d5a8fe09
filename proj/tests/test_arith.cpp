#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>
#include <set>

#include "twistlab/arith.hpp"

using namespace twistlab;

TEST_CASE("kronecker: frozen corpus") {
  // Degenerate bottoms.
  CHECK(kronecker(1, 0) == 1);
  CHECK(kronecker(-1, 0) == 1);
  CHECK(kronecker(2, 0) == 0);
  CHECK(kronecker(0, 0) == 0);
  CHECK(kronecker(0, 1) == 1);
  CHECK(kronecker(0, -1) == 1);
  CHECK(kronecker(0, 3) == 0);
  // Even and negative bottoms.
  CHECK(kronecker(3, 2) == -1);
  CHECK(kronecker(5, 2) == -1);
  CHECK(kronecker(7, 2) == 1);
  CHECK(kronecker(4, 2) == 0);
  CHECK(kronecker(3, 4) == 1);
  CHECK(kronecker(3, 8) == -1);
  CHECK(kronecker(13, -101) == 1);
  CHECK(kronecker(-13, -101) == -1);
  CHECK(kronecker(-2, -11) == -1);
  CHECK(kronecker(-2, -9) == -1);
  CHECK(kronecker(-2, -7) == 1);
  CHECK(kronecker(-2, -5) == 1);
  CHECK(kronecker(-2, -3) == -1);
  CHECK(kronecker(-2, -1) == -1);
  CHECK(kronecker(-2, 9) == 1);
  CHECK(kronecker(2, -9) == 1);
  CHECK(kronecker(3, 15) == 0);
  // Characters that drive twist classification at small conductors.
  CHECK(kronecker(-15, 7) == -1);
  CHECK(kronecker(-15, 11) == -1);
  CHECK(kronecker(-15, 17) == 1);
  CHECK(kronecker(-53, 13) == 1);
  CHECK(kronecker(-53, 17) == 1);
  CHECK(kronecker(-53, 29) == 1);
  CHECK(kronecker(11, -15) == -1);
  CHECK(kronecker(13, -53) == 1);
  CHECK(kronecker(6409, -53) == 1);
}

TEST_CASE("kronecker agrees with a quadratic-residue search, odd primes < 1e4") {
  auto primes = sieve_primes(9999);
  for (u64 p : primes) {
    if (p == 2) continue;
    std::vector<char> is_qr(p, 0);
    for (u64 x = 1; x < p; ++x) is_qr[x * x % p] = 1;
    for (u64 a = 0; a < p; ++a) {
      int expect = (a == 0) ? 0 : (is_qr[a] ? 1 : -1);
      if (kronecker((i64)a, (i64)p) != expect) {
        CAPTURE(a);
        CAPTURE(p);
        REQUIRE(kronecker((i64)a, (i64)p) == expect);
      }
    }
  }
  CHECK(true);  // reached without a mismatch
}

TEST_CASE("kronecker multiplicativity in both arguments") {
  std::mt19937_64 rng(12345);
  std::uniform_int_distribution<i64> dist(-300, 300);
  for (int trial = 0; trial < 5000; ++trial) {
    i64 a = dist(rng), b = dist(rng), n = dist(rng);
    if (n == 0) continue;
    CHECK(kronecker(a * b, n) == kronecker(a, n) * kronecker(b, n));
    i64 m = dist(rng);
    if (m == 0) continue;
    CHECK(kronecker(a, m * n) == kronecker(a, m) * kronecker(a, n));
  }
}

TEST_CASE("ord2") {
  CHECK(ord2(1) == 0);
  CHECK(ord2(2) == 1);
  CHECK(ord2(6) == 1);
  CHECK(ord2(8) == 3);
  CHECK(ord2(36) == 2);
  CHECK(ord2(1024) == 10);
  CHECK(ord2(5ull << 20) == 20);
  // (ell^2 - 1)/8 exponents used by the lambda transfer formula.
  CHECK(ord2((3ull * 3 - 1) / 8) == 0);
  CHECK(ord2((7ull * 7 - 1) / 8) == 1);
  CHECK(ord2((17ull * 17 - 1) / 8) == 2);
  CHECK(ord2((41ull * 41 - 1) / 8) == 1);
  CHECK_THROWS_AS(ord2(0), Error);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    u64 m = rng() | 1;
    m <<= (i % 16);
    if (m == 0) continue;
    CHECK(((m >> ord2(m)) & 1) == 1);
    CHECK((m % (1ull << ord2(m))) == 0);
  }
}

TEST_CASE("is_prime matches sieve below 1e4 and frozen large values") {
  auto primes = sieve_primes(10000);
  std::set<u64> prime_set(primes.begin(), primes.end());
  for (u64 n = 0; n <= 10000; ++n) CHECK(is_prime(n) == prime_set.count(n));
  CHECK(is_prime(2305843009213693951ull));  // 2^61 - 1
  CHECK(is_prime(999999999999999989ull));
  CHECK(is_prime(1000000007));
  CHECK(is_prime(998244353));
  CHECK(!is_prime(561));                    // Carmichael
  CHECK(!is_prime(3825123056546413051ull)); // strong pseudoprime to bases 2..23
  CHECK(!is_prime(1ull));
  CHECK(!is_prime(0ull));
}

TEST_CASE("factorize") {
  using P = std::vector<std::pair<u64, int>>;
  CHECK(factorize(1) == P{});
  CHECK(factorize(2) == P{{2, 1}});
  CHECK(factorize(97) == P{{97, 1}});
  CHECK(factorize(1024 * 3 * 97) == P{{2, 10}, {3, 1}, {97, 1}});
  CHECK(factorize(6409) == P{{13, 1}, {17, 1}, {29, 1}});
  CHECK(factorize(999999999999999989ull) == P{{999999999999999989ull, 1}});
  // Semiprime with ~30-bit factors exercises the rho path.
  CHECK(factorize(1000000007ull * 998244353ull) == P{{998244353, 1}, {1000000007, 1}});
  CHECK_THROWS_AS(factorize(0), Error);
}

TEST_CASE("cubic_has_root_mod: basics and rejections") {
  // x^3 - x has roots everywhere.
  for (u64 ell : {3ull, 5ull, 7ull, 101ull, 1999ull})
    CHECK(cubic_has_root_mod({1, 0, -1, 0}, ell));
  // x^3 - 2: 2 is a cube mod 5 (3^3 = 27 = 2), not mod 7.
  CHECK(cubic_has_root_mod({1, 0, 0, -2}, 5));
  CHECK(!cubic_has_root_mod({1, 0, 0, -2}, 7));
  // 2-division cubic of the conductor-53 curve: 4x^3 - 3x^2 + 2x + 1.
  CHECK(cubic_has_root_mod({4, -3, 2, 1}, 5));
  CHECK(cubic_has_root_mod({4, -3, 2, 1}, 7));
  CHECK(!cubic_has_root_mod({4, -3, 2, 1}, 3));
  CHECK(!cubic_has_root_mod({4, -3, 2, 1}, 13));
  CHECK(!cubic_has_root_mod({4, -3, 2, 1}, 17));
  CHECK(!cubic_has_root_mod({4, -3, 2, 1}, 29));
  CHECK_THROWS_AS(cubic_has_root_mod({1, 0, 0, 1}, 2), Error);
  CHECK_THROWS_AS(cubic_has_root_mod({1, 0, 0, 1}, 9), Error);
  CHECK_THROWS_AS(cubic_has_root_mod({5, 1, 1, 1}, 5), Error);  // leading coeff dies
}

static bool cubic_root_scan(const std::array<i64, 4>& c, u64 ell) {
  for (u64 x = 0; x < ell; ++x) {
    u64 v = 0;
    for (int i = 0; i < 4; ++i) {
      i64 ci = c[i] % (i64)ell;
      if (ci < 0) ci += (i64)ell;
      v = (mulmod(v, x, ell) + (u64)ci) % ell;
    }
    if (v == 0) return true;
  }
  return false;
}

TEST_CASE("cubic_has_root_mod matches exhaustive scan") {
  auto primes = sieve_primes(2000);
  // Full prime sweep for one fixed cubic.
  for (u64 ell : primes) {
    if (ell == 2) continue;
    CHECK(cubic_has_root_mod({4, -3, 2, 1}, ell) == cubic_root_scan({4, -3, 2, 1}, ell));
  }
  // Random corpus of (cubic, prime) pairs.
  std::mt19937_64 rng(424242);
  std::uniform_int_distribution<i64> coeff(-50, 50);
  std::uniform_int_distribution<size_t> pick(1, primes.size() - 1);  // skip 2
  int done = 0;
  while (done < 1000) {
    std::array<i64, 4> c = {coeff(rng), coeff(rng), coeff(rng), coeff(rng)};
    u64 ell = primes[pick(rng)];
    i64 lead = c[0] % (i64)ell;
    if (lead == 0) continue;
    CHECK(cubic_has_root_mod(c, ell) == cubic_root_scan(c, ell));
    ++done;
  }
}

TEST_CASE("sieve_primes: counts and guard") {
  CHECK(sieve_primes(1).empty());
  CHECK(sieve_primes(10) == std::vector<u64>{2, 3, 5, 7});
  CHECK(sieve_primes(100).size() == 25);
  CHECK(sieve_primes(1000).size() == 168);
  CHECK(sieve_primes(10000).size() == 1229);
  CHECK(sieve_primes(1000000).size() == 78498);
  CHECK_THROWS_AS(sieve_primes(kDefaultSieveGuard + 1), Error);
  CHECK(sieve_primes(5, 5).size() == 3);  // caller may raise or lower the guard
  try {
    sieve_primes(10, 5);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ResourceLimit);
  }
}

TEST_CASE("squarefree stream: frozen counts and structural invariants") {
  auto small = enumerate_squarefree(10);
  std::vector<u64> vals;
  for (auto& s : small) vals.push_back(s.value);
  CHECK(vals == std::vector<u64>{1, 2, 3, 5, 6, 7, 10});
  CHECK(enumerate_squarefree(100).size() == 61);
  CHECK(enumerate_squarefree(1000).size() == 608);

  u64 count = 0, last = 0;
  bool structure_ok = true;
  for_each_squarefree(1000000, [&](const SquarefreeInteger& s) {
    ++count;
    if (s.value <= last) structure_ok = false;
    last = s.value;
    u64 prod = 1;
    for (size_t i = 0; i < s.factors.size(); ++i) {
      if (i > 0 && s.factors[i] <= s.factors[i - 1]) structure_ok = false;
      if (!is_prime(s.factors[i])) structure_ok = false;
      prod *= s.factors[i];
    }
    if (prod != s.value) structure_ok = false;
  });
  CHECK(count == 607926);  // ~ 6X/pi^2
  CHECK(structure_ok);
  double density = (double)count / 1000000.0;
  CHECK(std::abs(density - 6.0 / (3.14159265358979323846 * 3.14159265358979323846)) < 1e-3);
}

TEST_CASE("SquarefreeInteger factories") {
  auto one = SquarefreeInteger::from_value(1);
  CHECK(one.value == 1);
  CHECK(one.factors.empty());
  auto t = SquarefreeInteger::from_value(30);
  CHECK(t.factors == std::vector<u64>{2, 3, 5});
  auto big = SquarefreeInteger::from_value(6409);
  CHECK(big.factors == std::vector<u64>{13, 17, 29});
  CHECK_THROWS_AS(SquarefreeInteger::from_value(12), Error);
  CHECK_THROWS_AS(SquarefreeInteger::from_value(0), Error);
  auto f = SquarefreeInteger::from_factors({29, 13, 17});
  CHECK(f.value == 6409);
  CHECK(f.factors == std::vector<u64>{13, 17, 29});
  CHECK_THROWS_AS(SquarefreeInteger::from_factors({4}), Error);
  CHECK_THROWS_AS(SquarefreeInteger::from_factors({3, 3}), Error);
  try {
    SquarefreeInteger::from_value(50);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonSquarefree);
  }
}
