#include "twistlab/curve.hpp"

#include <algorithm>
#include <cassert>
#include <iostream>

namespace twistlab {

namespace mp = boost::multiprecision;

u64 mod_red(const bigint& v, u64 m) {
  assert(m != 0);
  bigint r = v % m;
  if (r < 0) r += m;
  return r.convert_to<u64>();
}

WeierstrassCurve WeierstrassCurve::from_a_invariants(i64 a1, i64 a2, i64 a3, i64 a4, i64 a6) {
  WeierstrassCurve E;
  E.a1 = a1;
  E.a2 = a2;
  E.a3 = a3;
  E.a4 = a4;
  E.a6 = a6;
  bigint A1 = a1, A2 = a2, A3 = a3, A4 = a4, A6 = a6;
  E.b2 = A1 * A1 + 4 * A2;
  E.b4 = 2 * A4 + A1 * A3;
  E.b6 = A3 * A3 + 4 * A6;
  E.b8 = A1 * A1 * A6 + 4 * A2 * A6 - A1 * A3 * A4 + A2 * A3 * A3 - A4 * A4;
  E.c4 = E.b2 * E.b2 - 24 * E.b4;
  E.c6 = -E.b2 * E.b2 * E.b2 + 36 * E.b2 * E.b4 - 216 * E.b6;
  E.disc = -E.b2 * E.b2 * E.b8 - 8 * E.b4 * E.b4 * E.b4 - 27 * E.b6 * E.b6 +
           9 * E.b2 * E.b4 * E.b6;
  assert(1728 * E.disc == E.c4 * E.c4 * E.c4 - E.c6 * E.c6);
  assert(4 * E.b8 == E.b2 * E.b6 - E.b4 * E.b4);
  if (E.disc == 0)
    throw Error(ErrorCode::SingularCurve, "discriminant vanishes", "disc != 0");
  return E;
}

WeierstrassCurve transform_model(const WeierstrassCurve& E, i64 u, i64 r,
                                 i64 s, i64 t) {
  if (u == 0)
    throw Error(ErrorCode::BadInput, "transform needs u != 0", "u != 0");
  const i64 u2 = u * u, u3 = u2 * u;
  const i64 u4 = u2 * u2, u6 = u3 * u3;
  const i64 n1 = E.a1 + 2 * s;
  const i64 n2 = E.a2 - s * E.a1 + 3 * r - s * s;
  const i64 n3 = E.a3 + r * E.a1 + 2 * t;
  const i64 n4 =
      E.a4 - s * E.a3 + 2 * r * E.a2 - (t + r * s) * E.a1 + 3 * r * r - 2 * s * t;
  const i64 n6 = E.a6 + r * E.a4 + r * r * E.a2 + r * r * r - t * E.a3 -
                 t * t - r * t * E.a1;
  if (n1 % u || n2 % u2 || n3 % u3 || n4 % u4 || n6 % u6)
    throw Error(ErrorCode::BadInput, "transform leaves a fractional model",
                "u^i divides the transformed a_i");
  return WeierstrassCurve::from_a_invariants(n1 / u, n2 / u2, n3 / u3,
                                             n4 / u4, n6 / u6);
}

const char* reduction_type_name(ReductionType t) {
  switch (t) {
    case ReductionType::Good: return "good";
    case ReductionType::MultiplicativeSplit: return "split multiplicative";
    case ReductionType::MultiplicativeNonsplit: return "nonsplit multiplicative";
    case ReductionType::Additive: return "additive";
  }
  return "?";
}

namespace {

int ord_p(bigint v, u64 p) {
  assert(v != 0);
  int e = 0;
  while (v % p == 0) {
    v /= p;
    ++e;
  }
  return e;
}

}  // namespace

ReductionType reduction_type(const WeierstrassCurve& E, u64 p) {
  if (p == 2)
    throw Error(ErrorCode::BadPrime, "reduction type implemented for odd primes only",
                "p odd");
  if (!is_prime(p))
    throw Error(ErrorCode::BadPrime, "reduction type requires a prime", "p prime");
  if (E.disc % p != 0) return ReductionType::Good;
  int vd = ord_p(E.disc, p);
  bool c4_divisible = (E.c4 == 0) || ord_p(E.c4, p) >= 4;
  if (vd >= 12 && c4_divisible)
    throw Error(ErrorCode::NonMinimalModel, "model is non-minimal at " + std::to_string(p),
                "ord_p(disc) < 12 or ord_p(c4) < 4");
  if (E.c4 % p != 0) {
    // Nodal: split iff the tangent slopes at the node are rational,
    // iff -c6 is a square mod p (it cannot vanish here).
    u64 t = mod_red(-E.c6, p);
    assert(t != 0);
    return kronecker((i64)t, (i64)p) == 1 ? ReductionType::MultiplicativeSplit
                                          : ReductionType::MultiplicativeNonsplit;
  }
  return ReductionType::Additive;
}

int count_points_f2(const WeierstrassCurve& E) {
  int a1 = E.a1 & 1, a2 = E.a2 & 1, a3 = E.a3 & 1, a4 = E.a4 & 1, a6 = E.a6 & 1;
  int n = 1;  // infinity
  for (int x = 0; x <= 1; ++x)
    for (int y = 0; y <= 1; ++y) {
      int lhs = (y * y + a1 * x * y + a3 * y) & 1;
      int rhs = (x * x * x + a2 * x * x + a4 * x + a6) & 1;
      if (lhs == rhs) ++n;
    }
  return n;
}

bool good_ordinary_at_2(const WeierstrassCurve& E) {
  if (E.disc % 2 == 0) return false;
  // a_2 = 3 - #E~(F_2); ordinary iff a_2 is odd.
  return count_points_f2(E) % 2 == 0;
}

std::array<bigint, 4> two_division_cubic(const WeierstrassCurve& E) {
  return {bigint(4), E.b2, 2 * E.b4, E.b6};
}

std::vector<bigint> monic_integer_roots(const bigint& A, const bigint& B, const bigint& C) {
  std::vector<bigint> roots;
  auto try_root = [&](const bigint& x) {
    if (((x + A) * x + B) * x + C == 0) roots.push_back(x);
  };
  if (C == 0) {
    try_root(0);
    // Remaining factor X^2 + A X + B.
    bigint D = A * A - 4 * B;
    if (D >= 0) {
      bigint s = mp::sqrt(D);
      if (s * s == D) {
        if ((-A + s) % 2 == 0) try_root((-A + s) / 2);
        if (s != 0 && (-A - s) % 2 == 0) try_root((-A - s) / 2);
      }
    }
  } else {
    // Any integer root divides the constant term.
    bigint absC = C < 0 ? -C : C;
    if (absC > bigint(UINT64_MAX))
      throw Error(ErrorCode::ResourceLimit, "constant term too large to factor",
                  "|16 b6| < 2^64");
    auto fac = factorize(absC.convert_to<u64>());
    std::vector<u64> divisors = {1};
    for (auto [p, e] : fac) {
      size_t n = divisors.size();
      u64 pe = 1;
      for (int i = 0; i < e; ++i) {
        pe *= p;  // cannot overflow: pe divides absC
        for (size_t j = 0; j < n; ++j) divisors.push_back(divisors[j] * pe);
      }
    }
    for (u64 d : divisors) {
      try_root(bigint(d));
      try_root(-bigint(d));
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  return roots;
}

namespace {

// Rational roots of the 2-division cubic correspond to integer roots of the
// monic model X^3 + b2 X^2 + 8 b4 X + 16 b6 via X = 4x.
std::vector<bigint> two_division_monic_roots(const WeierstrassCurve& E) {
  return monic_integer_roots(E.b2, 8 * E.b4, 16 * E.b6);
}

}  // namespace

bool has_rational_two_torsion(const WeierstrassCurve& E) {
  return !two_division_monic_roots(E).empty();
}

bool two_torsion_mod_ell(const WeierstrassCurve& E, u64 ell) {
  if (ell == 2 || E.disc % ell == 0)
    throw Error(ErrorCode::BadPrime, "two-torsion reduction needs a good odd prime",
                "ell good for E");
  std::array<i64, 4> c = {4, (i64)mod_red(E.b2, ell), (i64)mod_red(2 * E.b4, ell),
                          (i64)mod_red(E.b6, ell)};
  return cubic_has_root_mod(c, ell);
}

const char* mod2_image_name(Mod2Image im) {
  switch (im) {
    case Mod2Image::Trivial: return "trivial";
    case Mod2Image::OrderTwo: return "order 2";
    case Mod2Image::OrderThree: return "cyclic order 3";
    case Mod2Image::FullS3: return "full S3";
  }
  return "?";
}

Mod2Image mod2_image(const WeierstrassCurve& E) {
  size_t nroots = two_division_monic_roots(E).size();
  assert(nroots == 0 || nroots == 1 || nroots == 3);
  if (nroots == 3) return Mod2Image::Trivial;
  if (nroots == 1) return Mod2Image::OrderTwo;
  // The splitting field's quadratic subfield is Q(sqrt(disc)); the image is
  // cyclic of order 3 exactly when disc is a square.
  if (E.disc > 0) {
    bigint s = mp::sqrt(E.disc);
    if (s * s == E.disc) return Mod2Image::OrderThree;
  }
  return Mod2Image::FullS3;
}

Density omega_density_prediction(Mod2Image im) {
  switch (im) {
    case Mod2Image::Trivial:
    case Mod2Image::OrderTwo: return {1, 1};
    case Mod2Image::OrderThree: return {1, 3};
    case Mod2Image::FullS3: return {2, 3};
  }
  return {0, 1};
}

ConductorData conductor_and_root_number(const WeierstrassCurve& E) {
  if (E.disc % 2 == 0)
    throw Error(ErrorCode::HypothesisViolated, "curve is not good at 2", "2 does not divide disc");
  bigint absd = E.disc < 0 ? -E.disc : E.disc;
  if (absd > bigint(UINT64_MAX))
    throw Error(ErrorCode::ResourceLimit, "discriminant too large to factor",
                "|disc| < 2^64");
  ConductorData out;
  int split_count = 0;
  for (auto [p, e] : factorize(absd.convert_to<u64>())) {
    ReductionType t = reduction_type(E, p);
    if (t == ReductionType::Good) continue;  // possible only after minimality rejection
    if (t == ReductionType::Additive)
      throw Error(ErrorCode::AdditivePrime,
                  "additive reduction at " + std::to_string(p),
                  "all bad primes multiplicative");
    BadPrimeInfo info;
    info.p = p;
    info.type = t;
    info.ord_disc = e;
    if (t == ReductionType::MultiplicativeSplit) {
      info.tamagawa = e;
      ++split_count;
    } else {
      info.tamagawa = (e % 2 == 0) ? 2 : 1;
    }
    out.bad_primes.push_back(info);
    out.conductor *= p;
  }
  out.root_number = (split_count % 2 == 0) ? -1 : 1;  // -prod_p w_p, w_p = -1 iff split
  return out;
}

GreenbergReport greenberg_partial(const WeierstrassCurve& E) {
  GreenbergReport r;
  r.ordinary_at_2 = good_ordinary_at_2(E);
  r.points_f2 = count_points_f2(E);
  r.residual_order_odd_at_2 = (r.points_f2 % 2 == 1);
  auto cond = conductor_and_root_number(E);
  r.bad_primes = cond.bad_primes;
  r.tamagawa_all_odd = true;
  for (const auto& b : r.bad_primes)
    if (b.tamagawa % 2 == 0) r.tamagawa_all_odd = false;
  return r;
}

bool has_cm_j_invariant(const WeierstrassCurve& E) {
  // Thirteen rational CM j-invariants (class number one discriminants).
  static const bigint cm[] = {
      bigint(0),
      bigint(1728),
      bigint(-3375),
      bigint(8000),
      bigint(-32768),
      bigint(54000),
      bigint(287496),
      bigint(-884736),
      bigint(-12288000),
      bigint(16581375),
      bigint(-884736000),
      bigint("-147197952000"),
      bigint("-262537412640768000"),
  };
  bigint num = E.c4 * E.c4 * E.c4;  // j = c4^3 / disc
  for (const bigint& j : cm)
    if (num == j * E.disc) return true;
  return false;
}

int CurveProfile::mu2() const {
  if (!mu2_opt)
    throw Error(ErrorCode::MissingInvariant, "mu2 not supplied for this curve",
                "mu2 available");
  return *mu2_opt;
}

int CurveProfile::lambda2() const {
  if (!lambda2_opt)
    throw Error(ErrorCode::MissingInvariant, "lambda2 not supplied for this curve",
                "lambda2 available");
  return *lambda2_opt;
}

CurveProfile CurveProfile::analyze(const WeierstrassCurve& E, const ProfileOptions& opt) {
  CurveProfile p;
  p.label = opt.label;
  p.curve = E;
  p.cond = conductor_and_root_number(E);
  p.ordinary_at_2 = good_ordinary_at_2(E);
  p.rational_two_torsion = has_rational_two_torsion(E);
  p.image = mod2_image(E);
  p.cm = has_cm_j_invariant(E);
  if (opt.mu2 && *opt.mu2 < 0)
    throw Error(ErrorCode::BadInput, "mu2 must be non-negative", "mu2 >= 0");
  if (opt.lambda2 && *opt.lambda2 < 0)
    throw Error(ErrorCode::BadInput, "lambda2 must be non-negative", "lambda2 >= 0");
  p.mu2_opt = opt.mu2;
  p.lambda2_opt = opt.lambda2;
  p.rank = opt.rank;
  p.torsion_structure = opt.torsion_structure;
  if (opt.root_number) {
    if (*opt.root_number != p.cond.root_number) {
      std::cerr << "warning: supplied root number " << *opt.root_number << " for "
                << (p.label.empty() ? "curve" : p.label)
                << " disagrees with computed value " << p.cond.root_number
                << "; using the supplied one\n";
      p.root_number_override = opt.root_number;
    }
  }
  return p;
}

}  // namespace twistlab
