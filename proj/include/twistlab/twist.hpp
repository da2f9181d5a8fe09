#pragma once

#include "twistlab/curve.hpp"

namespace twistlab {

// Everything the sieves need to know about one good odd prime.
struct PrimeClass {
  u64 ell = 0;
  int residue_mod4 = 0;
  int residue_mod8 = 0;
  int chi_minus_N = 0;          // kronecker(-N_E, ell): +1 split, -1 inert in Q(sqrt(-N))
  bool in_omega = false;        // E~(F_ell)[2] != 0
  int n_ell = 0;                // ord2((ell^2 - 1)/8)
  bool splits_fully_F = false;  // splits completely in Q(i, sqrt(-N_E))
  bool in_M = false;            // ell = 1 mod 4, off Omega, splits fully
  bool in_P = false;            // chi = -1 and ell = 3, 5 mod 8
  bool in_Q_pool = false;       // in Omega and ell = 3, 5 mod 8 (forces n_ell = 0)
};

// Rejects ell = 2, non-primes, and primes dividing the conductor.
PrimeClass classify_prime(const CurveProfile& E, u64 ell);

// lambda2 of the twist by squarefree d coprime to 2 N_E:
//   lambda2(E) + sum over prime factors ell of d lying in Omega of 2^(n_ell + 1).
// Needs E good ordinary at 2, N_E squarefree and mu2 = 0.
u64 matsuno_lambda(const CurveProfile& E, const SquarefreeInteger& d);

// Root number of the quadratic twist by d > 0 coprime to 2 N_E:
// kronecker(d, -N_E) * omega(E).  For d = 1 mod 4 this is evaluated
// factor-by-factor as prod_ell (-N_E | ell); the two paths must agree.
int twist_root_number(const CurveProfile& E, const SquarefreeInteger& d);

struct CorankBounds {
  int parity = 0;   // 2-Selmer corank parity: 1 iff twisted root number is -1
  u64 upper = 0;    // corank <= lambda2 of the twist, given mu2 = 0
};

CorankBounds corank_bounds(const CurveProfile& E, const SquarefreeInteger& d);

enum class Conclusion { CorankOneProved, CorankAtMost, Indeterminate };

struct TwistCertificate {
  u64 d = 1;
  u64 lambda_twist = 0;
  int omega_twist = 1;
  int parity = 0;
  u64 corank_upper = 0;
  Conclusion conclusion = Conclusion::Indeterminate;
  // Set when every prime factor of d avoids Omega: the twist keeps
  // lambda2(E) exactly, not just as an upper bound.
  std::optional<u64> lambda_equals;
  // Corank statements translate to rank only if Sha(E^(d))[2^inf] is finite.
  bool rank_note_conditional = true;

  std::string conclusion_string() const;
};

// Decision rule: parity odd and upper <= 2 proves corank exactly 1 (corank
// is odd, positive, and at most 2); parity even gives only the upper bound;
// odd parity with upper > 2 stays indeterminate.
TwistCertificate certify(const CurveProfile& E, const SquarefreeInteger& d);

// Composite-twist parity recipe: true iff every factor avoids Omega,
// d = 1 mod 4, and the number of inert factors is odd exactly when
// omega(E) = +1 -- together these force omega(E^(d)) = -1.
bool validate_composite(const CurveProfile& E, const SquarefreeInteger& d);

// Smallest d with lambda2(E^(d)) = target: product of the k smallest primes
// from the pool {ell in Omega : ell = 3 or 5 mod 8, ell coprime to 2 N_E},
// where target = lambda2(E) + 2k.  Pool primes have n_ell = 0, so each
// contributes exactly 2.
SquarefreeInteger construct_d_with_lambda(const CurveProfile& E, u64 target,
                                          u64 pool_limit = 1000000);

}  // namespace twistlab
