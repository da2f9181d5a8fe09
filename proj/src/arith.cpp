#include "twistlab/arith.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

namespace twistlab {

u64 mulmod(u64 a, u64 b, u64 m) {
  return (u128)a * b % m;
}

u64 powmod(u64 base, u64 exp, u64 m) {
  assert(m != 0);
  u64 r = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) r = mulmod(r, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return r;
}

const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::BadInput: return "BadInput";
    case ErrorCode::BadPrime: return "BadPrime";
    case ErrorCode::SingularCurve: return "SingularCurve";
    case ErrorCode::NonMinimalModel: return "NonMinimalModel";
    case ErrorCode::AdditivePrime: return "AdditivePrime";
    case ErrorCode::NonSquarefree: return "NonSquarefree";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::MissingInvariant: return "MissingInvariant";
    case ErrorCode::PoolExhausted: return "PoolExhausted";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::NetworkError: return "NetworkError";
    case ErrorCode::CacheCorrupt: return "CacheCorrupt";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::ResourceLimit: return "ResourceLimit";
  }
  return "Unknown";
}

int kronecker(i64 a, i64 n) {
  if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
  int result = 1;
  if (n < 0) {
    n = -n;
    if (a < 0) result = -result;
  }
  int v = 0;
  while ((n & 1) == 0) {
    n >>= 1;
    ++v;
  }
  if (v > 0) {
    if ((a & 1) == 0) return 0;
    if (v & 1) {
      i64 r = ((a % 8) + 8) % 8;
      if (r == 3 || r == 5) result = -result;
    }
  }
  // n odd positive from here; quadratic reciprocity loop.
  a %= n;
  if (a < 0) a += n;
  while (a != 0) {
    while ((a & 1) == 0) {
      a >>= 1;
      i64 r = n % 8;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(a, n);
    if ((a & 3) == 3 && (n & 3) == 3) result = -result;
    a %= n;
  }
  return n == 1 ? result : 0;
}

int ord2(u64 m) {
  if (m == 0)
    throw Error(ErrorCode::BadInput, "ord2 requires a positive integer", "m > 0");
  return __builtin_ctzll(m);
}

namespace {

bool strong_probable_prime(u64 n, u64 a, u64 d, int s) {
  u64 x = powmod(a % n, d, n);
  if (x == 1 || x == n - 1) return true;
  for (int i = 1; i < s; ++i) {
    x = mulmod(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

}  // namespace

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // Deterministic base set for 64-bit inputs.
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (!strong_probable_prime(n, a, d, s)) return false;
  }
  return true;
}

namespace {

u64 pollard_rho(u64 n) {
  // Brent's cycle variant; n is odd, composite, with no factor < 100.
  for (u64 c = 1;; ++c) {
    auto step = [&](u64 x) { return (mulmod(x, x, n) + c) % n; };
    u64 x = 2, y = 2, q = 1, g = 1, ys = 2, r = 1;
    const u64 batch = 128;
    while (g == 1) {
      x = y;
      for (u64 i = 0; i < r; ++i) y = step(y);
      for (u64 k = 0; k < r && g == 1; k += batch) {
        ys = y;
        for (u64 i = 0; i < std::min(batch, r - k); ++i) {
          y = step(y);
          q = mulmod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
      }
      r *= 2;
    }
    if (g == n) {
      // The batched product skipped past the factor; redo stepwise.
      g = 1;
      y = ys;
      while (g == 1) {
        y = step(y);
        g = std::gcd(x > y ? x - y : y - x, n);
      }
    }
    if (g != n) return g;
  }
}

void factor_into(u64 n, std::vector<u64>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  u64 d = pollard_rho(n);
  factor_into(d, out);
  factor_into(n / d, out);
}

}  // namespace

std::vector<std::pair<u64, int>> factorize(u64 n) {
  if (n == 0)
    throw Error(ErrorCode::BadInput, "factorize requires a positive integer", "n > 0");
  std::vector<u64> primes;
  for (u64 p = 2; p < 100 && p * p <= n; p == 2 ? p += 1 : p += 2) {
    while (n % p == 0) {
      primes.push_back(p);
      n /= p;
    }
  }
  factor_into(n, primes);
  std::sort(primes.begin(), primes.end());
  std::vector<std::pair<u64, int>> out;
  for (u64 p : primes) {
    if (!out.empty() && out.back().first == p)
      ++out.back().second;
    else
      out.emplace_back(p, 1);
  }
  return out;
}

namespace {

// Arithmetic in F_ell[x]/(f) with f monic cubic; polys stored low-to-high.
struct CubicRing {
  u64 p;
  u64 A, B, C;  // f = x^3 + A x^2 + B x + C

  using Poly = std::array<u64, 3>;

  Poly mul(const Poly& u, const Poly& v) const {
    u64 r[5] = {0, 0, 0, 0, 0};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        r[i + j] = (r[i + j] + (u128)u[i] * v[j]) % p;
    for (int i = 4; i >= 3; --i) {
      u64 t = r[i];
      if (t == 0) continue;
      r[i] = 0;
      // x^i = -x^(i-3) (A x^2 + B x + C)
      r[i - 1] = (r[i - 1] + (u128)(p - A % p) * t) % p;
      r[i - 2] = (r[i - 2] + (u128)(p - B % p) * t) % p;
      r[i - 3] = (r[i - 3] + (u128)(p - C % p) * t) % p;
    }
    return {r[0], r[1], r[2]};
  }

  Poly pow_x(u64 e) const {
    Poly result = {1, 0, 0};
    Poly base = {0, 1, 0};  // x
    while (e) {
      if (e & 1) result = mul(result, base);
      base = mul(base, base);
      e >>= 1;
    }
    return result;
  }
};

// deg of a coefficient array, -1 for zero.
int poly_deg(const std::array<u64, 4>& f) {
  for (int i = 3; i >= 0; --i)
    if (f[i] != 0) return i;
  return -1;
}

}  // namespace

bool cubic_has_root_mod(const std::array<i64, 4>& c, u64 ell) {
  if (ell == 2)
    throw Error(ErrorCode::BadPrime, "cubic root test requires an odd prime", "ell odd");
  if (!is_prime(ell))
    throw Error(ErrorCode::BadPrime, "cubic root test requires a prime modulus", "ell prime");
  auto red = [&](i64 v) -> u64 {
    i64 r = v % (i64)ell;
    if (r < 0) r += (i64)ell;
    return (u64)r;
  };
  u64 lead = red(c[0]);
  if (lead == 0)
    throw Error(ErrorCode::HypothesisViolated, "leading coefficient vanishes mod ell",
                "c3 != 0 mod ell");
  u64 inv = powmod(lead, ell - 2, ell);
  CubicRing ring{ell, mulmod(red(c[1]), inv, ell), mulmod(red(c[2]), inv, ell),
                 mulmod(red(c[3]), inv, ell)};

  // g = x^ell - x mod f; a nonzero gcd(f, g) is a product of the distinct
  // linear factors of f over F_ell.
  auto xe = ring.pow_x(ell);
  std::array<u64, 4> g = {xe[0], (xe[1] + ell - 1) % ell, xe[2], 0};
  if (poly_deg(g) < 0) return true;  // f splits completely

  std::array<u64, 4> f = {ring.C, ring.B, ring.A, 1};
  // Euclid on (f, g).
  std::array<u64, 4> a = f, b = g;
  while (true) {
    int db = poly_deg(b);
    if (db < 0) break;
    // a = a mod b
    int da = poly_deg(a);
    u64 binv = powmod(b[db], ell - 2, ell);
    while (da >= db) {
      u64 coef = mulmod(a[da], binv, ell);
      if (coef != 0) {
        for (int i = 0; i <= db; ++i) {
          u64 sub = mulmod(coef, b[i], ell);
          a[da - db + i] = (a[da - db + i] + ell - sub) % ell;
        }
      }
      --da;
      while (da >= 0 && a[da] == 0) --da;
    }
    std::swap(a, b);
  }
  return poly_deg(a) >= 1;
}

std::vector<u64> sieve_primes(u64 limit, u64 guard) {
  if (limit > guard)
    throw Error(ErrorCode::ResourceLimit, "sieve limit exceeds configured maximum",
                "limit <= guard");
  std::vector<u64> primes;
  if (limit < 2) return primes;
  std::vector<bool> composite(limit + 1, false);
  for (u64 i = 2; i <= limit; ++i) {
    if (!composite[i]) {
      primes.push_back(i);
      for (u64 j = i * i; j <= limit; j += i) composite[j] = true;
    }
  }
  return primes;
}

std::vector<u32> spf_sieve(u64 limit, u64 guard) {
  if (limit > guard)
    throw Error(ErrorCode::ResourceLimit, "sieve limit exceeds configured maximum",
                "limit <= guard");
  std::vector<u32> spf(limit + 1, 0);
  for (u64 i = 2; i <= limit; ++i) {
    if (spf[i] == 0) {
      for (u64 j = i; j <= limit; j += i)
        if (spf[j] == 0) spf[j] = (u32)i;
    }
  }
  return spf;
}

SquarefreeInteger SquarefreeInteger::from_value(u64 d) {
  if (d == 0)
    throw Error(ErrorCode::BadInput, "twisting integer must be positive", "d >= 1");
  SquarefreeInteger s;
  s.value = d;
  if (d == 1) return s;
  for (auto [p, e] : factorize(d)) {
    if (e > 1)
      throw Error(ErrorCode::NonSquarefree, "integer has a repeated prime factor",
                  "d squarefree");
    s.factors.push_back(p);
  }
  return s;
}

SquarefreeInteger SquarefreeInteger::from_factors(std::vector<u64> primes) {
  std::sort(primes.begin(), primes.end());
  SquarefreeInteger s;
  u64 v = 1;
  for (size_t i = 0; i < primes.size(); ++i) {
    if (!is_prime(primes[i]))
      throw Error(ErrorCode::BadInput, "factor list contains a non-prime", "factors prime");
    if (i > 0 && primes[i] == primes[i - 1])
      throw Error(ErrorCode::NonSquarefree, "factor list contains a repeat", "d squarefree");
    if (v > UINT64_MAX / primes[i])
      throw Error(ErrorCode::ResourceLimit, "product of factors overflows", "d < 2^64");
    v *= primes[i];
  }
  s.value = v;
  s.factors = std::move(primes);
  return s;
}

void for_each_squarefree(u64 limit,
                         const std::function<void(const SquarefreeInteger&)>& fn,
                         u64 guard) {
  if (limit == 0) return;
  auto spf = spf_sieve(limit, guard);
  SquarefreeInteger s;
  for (u64 d = 1; d <= limit; ++d) {
    s.value = d;
    s.factors.clear();
    u64 m = d;
    bool squarefree = true;
    while (m > 1) {
      u64 p = spf[m];
      m /= p;
      if (m % p == 0) {
        squarefree = false;
        break;
      }
      s.factors.push_back(p);  // spf extraction already yields ascending primes
    }
    if (!squarefree) continue;
    fn(s);
  }
}

std::vector<SquarefreeInteger> enumerate_squarefree(u64 limit, u64 guard) {
  std::vector<SquarefreeInteger> out;
  for_each_squarefree(limit, [&](const SquarefreeInteger& s) { out.push_back(s); }, guard);
  return out;
}

}  // namespace twistlab
