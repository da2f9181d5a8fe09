#include "twistlab/twist.hpp"

#include <cassert>
#include <numeric>

namespace twistlab {

namespace {

int n_ell_of(u64 ell) {
  assert(ell % 2 == 1);
  u128 sq = (u128)ell * ell;
  return ord2((u64)((sq - 1) / 8));
}

void require_twist_hypotheses(const CurveProfile& E) {
  if (!E.ordinary_at_2)
    throw Error(ErrorCode::HypothesisViolated, "base curve is not good ordinary at 2",
                "E good ordinary at 2");
  if (E.mu2() != 0)
    throw Error(ErrorCode::HypothesisViolated, "lambda transfer needs mu2 = 0", "mu2(E) = 0");
}

void require_coprime(const CurveProfile& E, const SquarefreeInteger& d) {
  if (std::gcd(d.value, 2 * E.conductor()) != 1)
    throw Error(ErrorCode::HypothesisViolated, "twisting integer shares a factor with 2 N_E",
                "gcd(d, 2 N_E) = 1");
}

}  // namespace

PrimeClass classify_prime(const CurveProfile& E, u64 ell) {
  if (ell == 2)
    throw Error(ErrorCode::BadPrime, "classification needs an odd prime", "ell odd");
  if (!is_prime(ell))
    throw Error(ErrorCode::BadPrime, "classification needs a prime", "ell prime");
  if (E.conductor() % ell == 0 || E.curve.disc % ell == 0)
    throw Error(ErrorCode::BadPrime, "prime divides the conductor", "ell good for E");
  PrimeClass c;
  c.ell = ell;
  c.residue_mod4 = (int)(ell % 4);
  c.residue_mod8 = (int)(ell % 8);
  c.chi_minus_N = kronecker(-(i64)E.conductor(), (i64)ell);
  c.in_omega = two_torsion_mod_ell(E.curve, ell);
  c.n_ell = n_ell_of(ell);
  // Splitting completely in the biquadratic field Q(i, sqrt(-N)) amounts to
  // splitting in both quadratic subfields Q(i) and Q(sqrt(-N)).
  c.splits_fully_F = (c.residue_mod4 == 1) && (c.chi_minus_N == 1);
  c.in_M = c.splits_fully_F && !c.in_omega;
  c.in_P = (c.chi_minus_N == -1) && (c.residue_mod8 == 3 || c.residue_mod8 == 5);
  c.in_Q_pool = c.in_omega && (c.residue_mod8 == 3 || c.residue_mod8 == 5);
  assert(!c.in_Q_pool || c.n_ell == 0);
  return c;
}

u64 matsuno_lambda(const CurveProfile& E, const SquarefreeInteger& d) {
  require_twist_hypotheses(E);
  require_coprime(E, d);
  u64 lambda = (u64)E.lambda2();
  for (u64 ell : d.factors) {
    if (two_torsion_mod_ell(E.curve, ell))
      lambda += 1ull << (n_ell_of(ell) + 1);
  }
  return lambda;
}

int twist_root_number(const CurveProfile& E, const SquarefreeInteger& d) {
  require_coprime(E, d);
  i64 minus_n = -(i64)E.conductor();
  int general = kronecker((i64)d.value, minus_n);
  if (d.value % 4 == 1) {
    int prod = 1;
    for (u64 ell : d.factors) prod *= kronecker(minus_n, (i64)ell);
    assert(prod == general);
    return prod * E.root_number();
  }
  return general * E.root_number();
}

CorankBounds corank_bounds(const CurveProfile& E, const SquarefreeInteger& d) {
  CorankBounds b;
  b.parity = twist_root_number(E, d) == -1 ? 1 : 0;
  b.upper = matsuno_lambda(E, d);
  return b;
}

std::string TwistCertificate::conclusion_string() const {
  std::string s;
  switch (conclusion) {
    case Conclusion::CorankOneProved: s = "CorankOneProved"; break;
    case Conclusion::CorankAtMost: s = "CorankAtMost(" + std::to_string(corank_upper) + ")"; break;
    case Conclusion::Indeterminate: s = "Indeterminate"; break;
  }
  if (lambda_equals) s += ";LambdaEquals(" + std::to_string(*lambda_equals) + ")";
  return s;
}

TwistCertificate certify(const CurveProfile& E, const SquarefreeInteger& d) {
  auto b = corank_bounds(E, d);
  TwistCertificate cert;
  cert.d = d.value;
  cert.lambda_twist = b.upper;
  cert.omega_twist = b.parity ? -1 : 1;
  cert.parity = b.parity;
  cert.corank_upper = b.upper;
  if (b.parity == 1 && b.upper <= 2)
    cert.conclusion = Conclusion::CorankOneProved;
  else if (b.parity == 0)
    cert.conclusion = Conclusion::CorankAtMost;
  else
    cert.conclusion = Conclusion::Indeterminate;
  if (cert.lambda_twist == (u64)E.lambda2()) cert.lambda_equals = cert.lambda_twist;
  return cert;
}

bool validate_composite(const CurveProfile& E, const SquarefreeInteger& d) {
  require_coprime(E, d);
  if (d.value % 4 != 1) return false;
  int inert = 0;
  for (u64 ell : d.factors) {
    auto c = classify_prime(E, ell);
    if (c.in_omega) return false;
    if (c.chi_minus_N == -1) ++inert;
  }
  bool need_odd = E.root_number() == 1;
  return (inert % 2 == 1) == need_odd;
}

SquarefreeInteger construct_d_with_lambda(const CurveProfile& E, u64 target, u64 pool_limit) {
  require_twist_hypotheses(E);
  u64 lambda2 = (u64)E.lambda2();
  if (target < lambda2)
    throw Error(ErrorCode::HypothesisViolated, "target below lambda2 of the base curve",
                "target >= lambda2(E)");
  if ((target - lambda2) % 2 != 0)
    throw Error(ErrorCode::HypothesisViolated,
                "lambda increments come in steps of 2^(n+1); parity cannot match",
                "target = lambda2(E) mod 2");
  u64 k = (target - lambda2) / 2;
  std::vector<u64> picked;
  for (u64 ell = 3; picked.size() < k; ell += 2) {
    if (ell > pool_limit)
      throw Error(ErrorCode::PoolExhausted,
                  "fewer than " + std::to_string(k) + " pool primes below " +
                      std::to_string(pool_limit),
                  "pool large enough");
    if (!is_prime(ell) || (2 * E.conductor()) % ell == 0 || E.curve.disc % ell == 0) continue;
    int m8 = (int)(ell % 8);
    if (m8 != 3 && m8 != 5) continue;
    if (!two_torsion_mod_ell(E.curve, ell)) continue;
    picked.push_back(ell);
  }
  auto d = SquarefreeInteger::from_factors(picked);
  assert(matsuno_lambda(E, d) == target);
  return d;
}

}  // namespace twistlab
