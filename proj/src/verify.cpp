#include "twistlab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <vector>

#include "twistlab/census.hpp"
#include "twistlab/twist.hpp"

namespace twistlab {
namespace {

std::string strf(const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  return buf;
}

using ull = unsigned long long;

CurveProfile fixture_profile(const std::string& label, const VerifyOptions& o) {
  FetchOptions f;
  f.fixtures_dir = o.fixtures_dir;
  return fetch_curve(label, f).profile();
}

struct Outcome {
  bool ok = false;
  std::string detail;
};

// The printed table over Q(sqrt(-15)): residue mod 8, splitting behavior,
// transferred lambda, and the resulting certificate for each prime twist.
Outcome check_fifteen_table(const VerifyOptions& o) {
  auto E = fixture_profile("15a7", o);
  struct Row {
    u64 ell;
    int mod8;
    bool inert;
    u64 lambda;
    Conclusion conc;
  };
  static const Row kTable[] = {
      {7, 7, true, 4, Conclusion::Indeterminate},
      {11, 3, true, 2, Conclusion::CorankOneProved},
      {13, 5, true, 2, Conclusion::CorankOneProved},
      {17, 1, false, 8, Conclusion::CorankAtMost},
      {19, 3, false, 2, Conclusion::CorankAtMost},
      {23, 7, false, 4, Conclusion::CorankAtMost},
      {29, 5, true, 2, Conclusion::CorankOneProved},
      {31, 7, false, 16, Conclusion::CorankAtMost},
      {37, 5, true, 2, Conclusion::CorankOneProved},
      {41, 1, true, 4, Conclusion::Indeterminate},
      {43, 3, true, 2, Conclusion::CorankOneProved},
      {47, 7, false, 8, Conclusion::CorankAtMost},
  };
  int proved = 0;
  for (const Row& r : kTable) {
    auto cls = classify_prime(E, r.ell);
    auto cert = certify(E, SquarefreeInteger::from_value(r.ell));
    if (cls.residue_mod8 != r.mod8)
      return {false, strf("ell=%llu: residue mod 8 is %d, table says %d",
                          (ull)r.ell, cls.residue_mod8, r.mod8)};
    if ((cls.chi_minus_N == -1) != r.inert)
      return {false, strf("ell=%llu: %s in Q(sqrt(-15)), table says %s",
                          (ull)r.ell, cls.chi_minus_N == -1 ? "inert" : "split",
                          r.inert ? "inert" : "split")};
    if (cert.lambda_twist != r.lambda)
      return {false, strf("ell=%llu: lambda of the twist is %llu, table says %llu",
                          (ull)r.ell, (ull)cert.lambda_twist, (ull)r.lambda)};
    if (cert.conclusion != r.conc)
      return {false, strf("ell=%llu: certificate says %s", (ull)r.ell,
                          cert.conclusion_string().c_str())};
    if (!r.inert && cert.parity != 0)
      return {false, strf("ell=%llu: split row has odd corank parity", (ull)r.ell)};
    proved += cert.conclusion == Conclusion::CorankOneProved;
  }
  if (proved != 5) return {false, strf("%d rows proved corank one, expected 5", proved)};
  return {true,
          "12 rows match (residues, splitting, lambda, certificates); "
          "the 5 highlighted twists prove corank one; split rows all even parity"};
}

Outcome check_corank_one_examples(const VerifyOptions& o) {
  auto E = fixture_profile("53a1", o);
  for (u64 ell : {13ull, 17ull, 29ull}) {
    if (!classify_prime(E, ell).in_M)
      return {false, strf("ell=%llu not classified in M", (ull)ell)};
  }
  for (u64 d : {13ull, 17ull, 29ull, 6409ull}) {
    auto cert = certify(E, SquarefreeInteger::from_value(d));
    if (cert.conclusion != Conclusion::CorankOneProved)
      return {false, strf("twist by %llu concluded %s, not corank one", (ull)d,
                          cert.conclusion_string().c_str())};
  }
  return {true,
          "13, 17, 29 all lie in M; twists by 13, 17, 29 and 6409 = 13*17*29 "
          "each prove corank exactly one"};
}

Outcome check_density_of_M(const VerifyOptions& o) {
  auto E = fixture_profile("53a1", o);
  auto t = prime_census(E, kDefaultPrimeSweep, o.workers);
  double d = t.density(t.in_M);
  bool ok = std::abs(d - 1.0 / 12.0) <= 0.02;
  std::string detail =
      strf("density(M) = %.4f over %llu classified primes; asserted target "
           "1/12 = 0.0833 +/- 0.02",
           d, (ull)t.classified);
  if (!ok)
    detail +=
        strf("; the measured value matches the true Chebotarev density 1/6 = "
             "0.1667: this curve has disc = -N, so sqrt(-N) already lies in "
             "the 2-division field, the relevant compositum has degree 12 "
             "rather than the generic 24, and a no-fixed-point Frobenius "
             "forces the sqrt(-N) splitting for free (1/12 survives only as "
             "the stated lower bound)");
  return {ok, detail};
}

Outcome check_density_of_P(const VerifyOptions& o) {
  auto E = fixture_profile("15a7", o);
  auto t = prime_census(E, kDefaultPrimeSweep, o.workers);
  double d = t.density(t.in_P);
  bool ok = std::abs(d - 0.25) <= 0.01;
  return {ok, strf("density(P) = %.4f over %llu classified primes; target "
                   "1/4 +/- 0.01",
                   d, (ull)t.classified)};
}

Outcome check_omega_density(const VerifyOptions& o) {
  auto t53 = prime_census(fixture_profile("53a1", o), kDefaultPrimeSweep, o.workers);
  auto t17 = prime_census(fixture_profile("17a4", o), kDefaultPrimeSweep, o.workers);
  auto t15 = prime_census(fixture_profile("15a7", o), kDefaultPrimeSweep, o.workers);
  double d53 = t53.density(t53.in_omega);
  double d17 = t17.density(t17.in_omega);
  bool ok53 = std::abs(d53 - 2.0 / 3.0) <= 0.01;
  bool ok17 = std::abs(d17 - 2.0 / 3.0) <= 0.01;
  bool exact15 = t15.in_omega == t15.classified;
  std::string detail = strf(
      "Omega density: 53a1 %.4f (target 2/3: %s), 17a4 %.4f (asserted target "
      "2/3: %s), 15a7 exactly 1: %s",
      d53, ok53 ? "ok" : "MISS", d17, ok17 ? "ok" : "MISS",
      exact15 ? "ok" : "MISS");
  if (!ok17)
    detail +=
        "; 17a4 carries rational 2-torsion (mod-2 image of order 2, not full), "
        "so every good prime keeps 2-torsion and its true density is 1 -- the "
        "2/3 target presumes a surjective mod-2 representation this curve "
        "does not have";
  return {ok53 && ok17 && exact15, detail};
}

// Independent recomputations sharing no code with the library paths they
// check: an exhaustive squares table stands in for quadratic residues.
bool naive_even_order(const WeierstrassCurve& C, u64 p) {
  std::vector<char> sq(p, 0);
  for (u64 y = 0; y < p; ++y) sq[y * y % p] = 1;
  auto red = [&](i64 v) {
    i64 m = v % (i64)p;
    return (u64)(m < 0 ? m + (i64)p : m);
  };
  u64 a1 = red(C.a1), a2 = red(C.a2), a3 = red(C.a3), a4 = red(C.a4),
      a6 = red(C.a6);
  u64 pts = 1;  // infinity
  for (u64 x = 0; x < p; ++x) {
    u64 x2 = x * x % p;
    u64 f = (x2 * x + a2 * x2 + a4 * x + a6) % p;
    u64 c1 = (a1 * x + a3) % p;
    // Solutions y of y^2 + c1 y = f, counted via (2y + c1)^2 = c1^2 + 4f.
    u64 disc = (c1 * c1 + 4 * f) % p;
    pts += disc == 0 ? 1 : (sq[disc] ? 2u : 0u);
  }
  return pts % 2 == 0;
}

Outcome check_oracles(const VerifyOptions& o) {
  ull torsion_pairs = 0;
  std::vector<CurveProfile> profiles;
  for (const char* label : {"53a1", "15a7", "17a4"})
    profiles.push_back(fixture_profile(label, o));

  for (const auto& prof : profiles) {
    const auto& C = prof.curve;
    for (u64 ell : sieve_primes(2000)) {
      if (ell == 2 || mod_red(C.disc, ell) == 0) continue;
      if (two_torsion_mod_ell(C, ell) != naive_even_order(C, ell))
        return {false, strf("%s mod %llu: 2-torsion test disagrees with the "
                            "point-count parity",
                            prof.label.c_str(), (ull)ell)};
      ++torsion_pairs;
    }
  }

  ull residues = 0;
  for (u64 p : sieve_primes(9999)) {
    if (p == 2) continue;
    std::vector<char> sq(p, 0);
    for (u64 a = 1; a < p; ++a) sq[a * a % p] = 1;
    for (u64 a = 0; a < p; ++a) {
      int expect = a == 0 ? 0 : (sq[a] ? 1 : -1);
      if (kronecker((i64)a, (i64)p) != expect)
        return {false, strf("kronecker(%llu, %llu) disagrees with the "
                            "exhaustive square table",
                            (ull)a, (ull)p)};
      ++residues;
    }
  }

  int bad_checked = 0;
  for (const auto& prof : profiles) {
    const auto& C = prof.curve;
    for (const auto& bp : prof.cond.bad_primes) {
      if (bp.p >= 100) continue;
      u64 p = bp.p;
      auto red = [&](i64 v) {
        i64 m = v % (i64)p;
        return (u64)(m < 0 ? m + (i64)p : m);
      };
      u64 a1 = red(C.a1), a2 = red(C.a2), a3 = red(C.a3), a4 = red(C.a4),
          a6 = red(C.a6);
      std::vector<std::pair<u64, u64>> sing;
      for (u64 x = 0; x < p; ++x) {
        u64 x2 = x * x % p;
        u64 f = (x2 * x + a2 * x2 + a4 * x + a6) % p;
        for (u64 y = 0; y < p; ++y) {
          u64 lhs = (y * y + a1 * x % p * y + a3 * y) % p;
          if (lhs != f) continue;
          u64 fx = ((a1 * y) % p + p - (3 * x2 + 2 * a2 * x + a4) % p) % p;
          u64 fy = (2 * y + a1 * x + a3) % p;
          if (fx == 0 && fy == 0) sing.emplace_back(x, y);
        }
      }
      if (sing.size() != 1)
        return {false, strf("%s mod %llu: found %zu singular points, expected "
                            "exactly one",
                            prof.label.c_str(), (ull)p, sing.size())};
      // Shift to the node: the tangent slopes solve t^2 + a1 t - (3 x0 + a2).
      u64 c = (3 * sing[0].first + a2) % p;
      if ((a1 * a1 + 4 * c) % p == 0)
        return {false, strf("%s mod %llu: tangent cone degenerates (cusp)",
                            prof.label.c_str(), (ull)p)};
      bool has_root = false;
      for (u64 t = 0; t < p && !has_root; ++t)
        has_root = (t * t + a1 * t + (p - c)) % p == 0;
      if (bp.type != ReductionType::MultiplicativeSplit &&
          bp.type != ReductionType::MultiplicativeNonsplit)
        return {false, strf("%s mod %llu: reduction classified %s",
                            prof.label.c_str(), (ull)p,
                            reduction_type_name(bp.type))};
      if (has_root != (bp.type == ReductionType::MultiplicativeSplit))
        return {false, strf("%s mod %llu: tangent slopes say %s, library says %s",
                            prof.label.c_str(), (ull)p,
                            has_root ? "split" : "nonsplit",
                            reduction_type_name(bp.type))};
      ++bad_checked;
    }
  }
  return {true, strf("2-torsion parity at %llu good primes, kronecker on %llu "
                     "residues, tangent splitting at %d bad primes: all agree",
                     torsion_pairs, residues, bad_checked)};
}

Outcome check_lambda_spots(const VerifyOptions& o) {
  auto E15 = fixture_profile("15a7", o);
  auto E53 = fixture_profile("53a1", o);
  struct Spot {
    const CurveProfile* E;
    u64 d;
    u64 lambda;
  };
  const Spot spots[] = {{&E15, 11, 2}, {&E53, 6409, 1}, {&E15, 7, 4}};
  for (const Spot& s : spots) {
    u64 got = matsuno_lambda(*s.E, SquarefreeInteger::from_value(s.d));
    if (got != s.lambda)
      return {false, strf("%s twist by %llu: lambda %llu, expected %llu",
                          s.E->label.c_str(), (ull)s.d, (ull)got, (ull)s.lambda)};
  }
  return {true, "15a7 d=11 -> lambda 2; 53a1 d=6409 -> lambda 1; 15a7 d=7 -> "
                "lambda 4"};
}

Outcome check_fit_recovery(const VerifyOptions& o) {
  std::string planted;
  for (double alpha : {1.0 / 3, 2.0 / 3, 11.0 / 12}) {
    std::vector<SamplePoint> s;
    for (u64 X : checkpoint_grid(kDefaultSquarefreeSweep)) {
      double v = 0.7 * (double)X / std::pow(std::log((double)X), alpha);
      s.push_back({X, (u64)std::llround(v)});
    }
    auto fit = asymptotic_fit(s, alpha);
    double err = std::abs(fit.exponent_hat - alpha);
    if (err > 0.02)
      return {false, strf("planted exponent %.4f fitted as %.4f (err %.4f)",
                          alpha, fit.exponent_hat, err)};
    planted += strf("%s%.3f->%.3f", planted.empty() ? "" : ", ", alpha,
                    fit.exponent_hat);
  }

  auto E = fixture_profile("53a1", o);
  auto rep = squarefree_census(E, kDefaultSquarefreeSweep, {}, o.workers);
  const SeriesReport* omega = nullptr;
  for (const auto& s : rep.series)
    if (s.name == "n_Omega") omega = &s;
  if (!omega) return {false, "census report carries no n_Omega series"};
  double lo = 0, hi = 0;
  for (const auto& pt : omega->samples) {
    if (pt.X < 100000 || pt.count == 0) continue;
    double r = (double)pt.count * std::pow(std::log((double)pt.X), 2.0 / 3) /
               (double)pt.X;
    if (lo == 0 || r < lo) lo = r;
    if (r > hi) hi = r;
  }
  if (lo == 0) return {false, "no n_Omega checkpoints at or above 1e5"};
  double spread = hi / lo - 1.0;
  bool ok = spread < 0.25;
  return {ok, strf("planted exponents recovered (%s); n_Omega ratio series "
                   "spread %.1f%% across [1e5, 1e7] (< 25%% required)",
                   planted.c_str(), spread * 100)};
}

Outcome check_lambda_parity(const VerifyOptions& o) {
  auto r17 = squarefree_census(fixture_profile("17a4", o), 100000, {}, o.workers);
  auto r53 = squarefree_census(fixture_profile("53a1", o), 100000, {}, o.workers);
  for (const auto& [lam, n] : r17.m_EN)
    if (lam % 2 != 0)
      return {false, strf("17a4: observed odd twist lambda %llu (count %llu)",
                          (ull)lam, (ull)n)};
  for (const auto& [lam, n] : r53.m_EN)
    if (lam % 2 != 1)
      return {false, strf("53a1: observed even twist lambda %llu (count %llu)",
                          (ull)lam, (ull)n)};
  return {true,
          strf("over all squarefree d <= 1e5: 17a4 lambdas all even (%zu "
               "values, max %llu), 53a1 all odd (%zu values, max %llu)",
               r17.m_EN.size(), (ull)r17.m_EN.rbegin()->first, r53.m_EN.size(),
               (ull)r53.m_EN.rbegin()->first)};
}

Outcome check_determinism(const VerifyOptions& o) {
  auto E = fixture_profile("53a1", o);
  auto one = census_report_json(full_census(E, 100000, 100000, {}, 1));
  auto eight = census_report_json(full_census(E, 100000, 100000, {}, 8));
  if (one != eight)
    return {false, strf("reports differ (%zu vs %zu bytes)", one.size(),
                        eight.size())};
  return {true, strf("1-worker and 8-worker reports byte-identical (%zu bytes)",
                     one.size())};
}

const char* kCheckNames[kNumChecks] = {
    "15a7-prime-table",     "53a1-corank-one-examples",
    "53a1-density-of-M",    "15a7-density-of-P",
    "omega-density-by-image", "oracle-crosschecks",
    "lambda-transfer-spots", "fit-exponent-recovery",
    "lambda-parity-by-curve", "census-worker-determinism",
};

}  // namespace

CheckResult run_check(int id, const VerifyOptions& opts) {
  if (id < 1 || id > kNumChecks)
    throw Error(ErrorCode::BadInput, "no such check: " + std::to_string(id),
                "check id in [1, 10]");
  CheckResult r;
  r.id = id;
  r.name = kCheckNames[id - 1];
  auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    switch (id) {
      case 1: out = check_fifteen_table(opts); break;
      case 2: out = check_corank_one_examples(opts); break;
      case 3: out = check_density_of_M(opts); break;
      case 4: out = check_density_of_P(opts); break;
      case 5: out = check_omega_density(opts); break;
      case 6: out = check_oracles(opts); break;
      case 7: out = check_lambda_spots(opts); break;
      case 8: out = check_fit_recovery(opts); break;
      case 9: out = check_lambda_parity(opts); break;
      case 10: out = check_determinism(opts); break;
    }
  } catch (const std::exception& e) {
    out = {false, strf("error: %s", e.what())};
  }
  r.passed = out.ok;
  r.detail = out.detail;
  r.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return r;
}

std::vector<CheckResult> run_all_checks(const VerifyOptions& opts) {
  std::vector<CheckResult> out;
  for (int id = 1; id <= kNumChecks; ++id) out.push_back(run_check(id, opts));
  return out;
}

std::string check_summary_line(const CheckResult& r) {
  std::string line = strf("%s %2d %-26s ", r.passed ? "ok  " : "FAIL", r.id,
                          r.name.c_str());
  line += r.detail;
  line += strf("  [%.1fs]", r.seconds);
  return line;
}

}  // namespace twistlab
