#include "twistlab/census.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <thread>

#include <json.hpp>

namespace twistlab {

namespace {

using u8 = std::uint8_t;

constexpr u64 kDBlock = 1ull << 16;    // squarefree sweep block, in values
constexpr u64 kPrimeBlock = 8192;      // prime sweep block, in prime indices

constexpr u8 kFlagExcluded = 1;  // prime dividing 2 N_E (or the discriminant)
constexpr u8 kFlagOmega = 2;     // E~(F_ell)[2] != 0
constexpr u8 kFlagChiNeg = 4;    // kronecker(ell, -N_E) = -1

void require_census_hypotheses(const CurveProfile& E) {
  if (!E.ordinary_at_2)
    throw Error(ErrorCode::HypothesisViolated,
                "census needs good ordinary reduction at 2",
                "E good ordinary at 2");
  if (E.mu2() != 0)
    throw Error(ErrorCode::HypothesisViolated, "census needs mu2(E) = 0",
                "mu2(E) = 0");
}

void require_sweep_bound(u64 X) {
  if (X < 1)
    throw Error(ErrorCode::BadInput, "sweep bound must be positive", "X >= 1");
  if (X > kCensusSweepGuard)
    throw Error(ErrorCode::ResourceLimit, "sweep bound exceeds the hard cap",
                "X <= 1e8");
}

bool prime_excluded(const CurveProfile& E, u64 p) {
  return p == 2 || E.conductor() % p == 0 || mod_red(E.curve.disc, p) == 0;
}

// Runs per_block(i) for i in [0, n_blocks) across `workers` threads; results
// land in a vector indexed by block, so the merge order never depends on
// scheduling.
template <typename Partial, typename Fn>
std::vector<Partial> run_blocks(u64 n_blocks, unsigned workers, Fn per_block) {
  std::vector<Partial> partials(n_blocks);
  unsigned n_threads =
      std::max(1u, std::min<unsigned>(workers, (unsigned)n_blocks));
  if (n_threads == 1) {
    for (u64 i = 0; i < n_blocks; ++i) partials[i] = per_block(i);
    return partials;
  }
  std::atomic<u64> next{0};
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (unsigned t = 0; t < n_threads; ++t) {
    pool.emplace_back([&] {
      for (u64 i = next.fetch_add(1); i < n_blocks; i = next.fetch_add(1))
        partials[i] = per_block(i);
    });
  }
  for (auto& th : pool) th.join();
  return partials;
}

// Per-value lookup tables driving the squarefree sweep: smallest prime
// factor, classification flags, and the lambda contribution exponent
// n_ell + 1 for each good odd prime.
struct DTables {
  u64 X = 0;
  std::vector<u32> spf;
  std::vector<u8> flags;
  std::vector<u8> expo;
};

DTables build_tables(const CurveProfile& E, u64 X) {
  DTables t;
  t.X = X;
  t.spf = spf_sieve(X);
  t.flags.assign(X + 1, 0);
  t.expo.assign(X + 1, 0);
  i64 minus_n = -(i64)E.conductor();
  for (u64 p = 2; p <= X; ++p) {
    if (t.spf[p] != p) continue;  // composite
    if (prime_excluded(E, p)) {
      t.flags[p] = kFlagExcluded;
      continue;
    }
    u8 f = 0;
    if (two_torsion_mod_ell(E.curve, p)) f |= kFlagOmega;
    if (kronecker((i64)p, minus_n) < 0) f |= kFlagChiNeg;
    t.flags[p] = f;
    t.expo[p] = (u8)(ord2((p * p - 1) / 8) + 1);
  }
  return t;
}

struct DClass {
  bool counted = false;  // squarefree and coprime to 2 N_E
  u64 lambda = 0;
  int chi = 1;  // kronecker(d, -N_E)
  bool all_off_omega = true;
};

DClass classify_d(const DTables& t, u64 lambda2, u64 d) {
  DClass c;
  c.lambda = lambda2;
  u64 m = d;
  while (m > 1) {
    u64 p = t.spf[m];
    m /= p;
    if (m % p == 0) return c;  // square factor
    u8 f = t.flags[p];
    if (f & kFlagExcluded) return c;  // shares a factor with 2 N_E
    if (f & kFlagOmega) {
      c.lambda += 1ull << t.expo[p];
      c.all_off_omega = false;
    }
    if (f & kFlagChiNeg) c.chi = -c.chi;
  }
  c.counted = true;
  return c;
}

Conclusion conclude(int parity, u64 upper) {
  if (parity == 0) return Conclusion::CorankAtMost;
  return upper <= 2 ? Conclusion::CorankOneProved : Conclusion::Indeterminate;
}

struct SweepCounts {
  u64 total = 0;
  u64 n_omega = 0;
  u64 n_e1 = 0;
  std::vector<u64> targets;

  void add(const SweepCounts& o) {
    total += o.total;
    n_omega += o.n_omega;
    n_e1 += o.n_e1;
    for (size_t i = 0; i < targets.size(); ++i) targets[i] += o.targets[i];
  }
};

struct DPartial {
  SweepCounts c;
  std::map<u64, u64> m_en;
  std::vector<std::pair<u64, SweepCounts>> snaps;  // checkpoint -> prefix
};

double nan_alpha() { return std::numeric_limits<double>::quiet_NaN(); }

SeriesReport make_series(const std::string& name, double alpha,
                         std::vector<SamplePoint> samples) {
  SeriesReport s;
  s.name = name;
  s.alpha_expected = alpha;
  s.samples = std::move(samples);
  try {
    s.fit = asymptotic_fit(s.samples, alpha);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientData) throw;
  }
  return s;
}

}  // namespace

double PrimeTally::density(u64 tally) const {
  return classified ? (double)tally / (double)classified : 0.0;
}

std::vector<u64> checkpoint_grid(u64 X) {
  static constexpr u64 kGrid[] = {1000,    3162,    10000,    31623,
                                  100000,  316228,  1000000,  3162278,
                                  10000000, 31622777, 100000000};
  std::vector<u64> out;
  for (u64 g : kGrid)
    if (g < X) out.push_back(g);
  out.push_back(X);
  return out;
}

PrimeTally prime_census(const CurveProfile& E, u64 X, unsigned workers) {
  if (X < 100)
    throw Error(ErrorCode::BadInput, "prime census needs X >= 100", "X >= 100");
  require_sweep_bound(X);
  require_census_hypotheses(E);

  auto primes = sieve_primes(X);
  u64 lambda2 = (u64)E.lambda2();
  int root = E.root_number();
  i64 minus_n = -(i64)E.conductor();

  struct PPartial {
    u64 excluded = 0, classified = 0;
    u64 in_omega = 0, in_omega_prime = 0, in_M = 0, in_P = 0, in_Q_pool = 0;
    u64 n_prime_1 = 0;
  };
  u64 n_blocks = (primes.size() + kPrimeBlock - 1) / kPrimeBlock;
  auto partials = run_blocks<PPartial>(n_blocks, workers, [&](u64 b) {
    PPartial part;
    size_t lo = b * kPrimeBlock;
    size_t hi = std::min(lo + kPrimeBlock, primes.size());
    for (size_t i = lo; i < hi; ++i) {
      u64 ell = primes[i];
      if (prime_excluded(E, ell)) {
        ++part.excluded;
        continue;
      }
      ++part.classified;
      auto c = classify_prime(E, ell);
      if (c.in_omega)
        ++part.in_omega;
      else
        ++part.in_omega_prime;
      if (c.in_M) ++part.in_M;
      if (c.in_P) ++part.in_P;
      if (c.in_Q_pool) ++part.in_Q_pool;
      // Certificate of the prime twist d = ell, table-free.
      u64 lam = lambda2 + (c.in_omega ? (1ull << (c.n_ell + 1)) : 0);
      int omega_twist = root * kronecker((i64)ell, minus_n);
      if (omega_twist == -1 && lam <= 2) ++part.n_prime_1;
    }
    return part;
  });

  PrimeTally tally;
  tally.X = X;
  tally.pi = primes.size();
  for (const auto& p : partials) {
    tally.excluded += p.excluded;
    tally.classified += p.classified;
    tally.in_omega += p.in_omega;
    tally.in_omega_prime += p.in_omega_prime;
    tally.in_M += p.in_M;
    tally.in_P += p.in_P;
    tally.in_Q_pool += p.in_Q_pool;
    tally.n_prime_1 += p.n_prime_1;
  }
  assert(tally.excluded + tally.classified == tally.pi);
  assert(tally.in_omega + tally.in_omega_prime == tally.classified);
  return tally;
}

FitResult asymptotic_fit(const std::vector<SamplePoint>& samples,
                         double alpha_expected) {
  std::vector<SamplePoint> kept;
  for (const auto& s : samples)
    if (s.count > 0 && s.X >= 3) kept.push_back(s);
  std::sort(kept.begin(), kept.end(),
            [](const SamplePoint& a, const SamplePoint& b) { return a.X < b.X; });
  if (kept.size() < 5 || kept.back().X < 100 * kept.front().X)
    throw Error(ErrorCode::InsufficientData,
                "fit needs >= 5 positive samples spanning >= 2 decades",
                "samples >= 5 and X_max >= 100 X_min");

  double sx = 0, sy = 0;
  std::vector<double> xs, ys;
  u64 cmin = kept.front().count, cmax = kept.front().count;
  for (const auto& s : kept) {
    double x = std::log(std::log((double)s.X));
    double y = std::log((double)s.count) - std::log((double)s.X);
    xs.push_back(x);
    ys.push_back(y);
    sx += x;
    sy += y;
    cmin = std::min(cmin, s.count);
    cmax = std::max(cmax, s.count);
  }
  double n = (double)kept.size();
  double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  double slope = sxy / sxx;
  double intercept = my - slope * mx;
  double ss_res = 0, ss_tot = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    double r = ys[i] - (intercept + slope * xs[i]);
    ss_res += r * r;
    ss_tot += (ys[i] - my) * (ys[i] - my);
  }

  FitResult fit;
  fit.alpha_expected = alpha_expected;
  fit.exponent_hat = -slope;
  fit.c_hat = std::exp(intercept);
  fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.degenerate = (cmin == cmax) || fit.r_squared < 0.99;
  double a = std::isfinite(alpha_expected) ? alpha_expected : fit.exponent_hat;
  for (const auto& s : kept)
    fit.ratio_series.push_back((double)s.count *
                               std::pow(std::log((double)s.X), a) /
                               (double)s.X);
  return fit;
}

CensusReport squarefree_census(const CurveProfile& E, u64 X,
                               const std::vector<u64>& targets,
                               unsigned workers) {
  require_sweep_bound(X);
  require_census_hypotheses(E);

  std::vector<u64> tg = targets;
  std::sort(tg.begin(), tg.end());
  tg.erase(std::unique(tg.begin(), tg.end()), tg.end());

  u64 lambda2 = (u64)E.lambda2();
  int root = E.root_number();
  DTables tables = build_tables(E, X);
  std::vector<u64> grid = checkpoint_grid(X);

  u64 n_blocks = (X + kDBlock - 1) / kDBlock;
  auto partials = run_blocks<DPartial>(n_blocks, workers, [&](u64 b) {
    DPartial part;
    part.c.targets.assign(tg.size(), 0);
    u64 lo = 1 + b * kDBlock;
    u64 hi = std::min(lo + kDBlock, X + 1);
    size_t ck = std::lower_bound(grid.begin(), grid.end(), lo) - grid.begin();
    for (u64 d = lo; d < hi; ++d) {
      DClass c = classify_d(tables, lambda2, d);
      if (c.counted) {
        ++part.c.total;
        if (c.all_off_omega) ++part.c.n_omega;
        int omega_twist = root * c.chi;
        if (omega_twist == -1 && c.lambda <= 2) ++part.c.n_e1;
        ++part.m_en[c.lambda];
        for (size_t i = 0; i < tg.size(); ++i)
          if (tg[i] == c.lambda) ++part.c.targets[i];
      }
      while (ck < grid.size() && grid[ck] == d) {
        part.snaps.emplace_back(d, part.c);
        ++ck;
      }
    }
    return part;
  });

  SweepCounts run;
  run.targets.assign(tg.size(), 0);
  std::map<u64, u64> m_en;
  std::vector<SamplePoint> samples_omega, samples_e1;
  std::vector<std::vector<SamplePoint>> samples_tg(tg.size());
  for (const auto& part : partials) {
    for (const auto& [Xc, snap] : part.snaps) {
      samples_omega.push_back({Xc, run.n_omega + snap.n_omega});
      samples_e1.push_back({Xc, run.n_e1 + snap.n_e1});
      for (size_t i = 0; i < tg.size(); ++i)
        samples_tg[i].push_back({Xc, run.targets[i] + snap.targets[i]});
    }
    run.add(part.c);
    for (const auto& [k, v] : part.m_en) m_en[k] += v;
  }
  assert(!samples_omega.empty() && samples_omega.back().count == run.n_omega);

  CensusReport rep;
  rep.label = E.label;
  rep.lambda2 = lambda2;
  rep.root_number = root;
  rep.X = X;
  rep.squarefree_total = run.total;
  rep.n_E1_lower = run.n_e1;
  rep.n_Omega = run.n_omega;
  rep.m_EN = std::move(m_en);
  rep.targets = tg;

  // Transferred lambda exceeds lambda2 by an even sum, so every observed key
  // sits on the right parity class at or above lambda2.
  for (const auto& [k, v] : rep.m_EN) {
    (void)v;
    assert(k >= lambda2 && (k - lambda2) % 2 == 0);
  }

  Density omega_pred = omega_density_prediction(E.image);
  double v = omega_pred.value();
  double alpha_omega = (v > 0.0 && v < 1.0) ? v : nan_alpha();
  double alpha_e1 =
      E.image == Mod2Image::FullS3 ? 11.0 / 12.0 : nan_alpha();
  rep.series.push_back(
      make_series("n_Omega", alpha_omega, std::move(samples_omega)));
  rep.series.push_back(
      make_series("n_E1_lower", alpha_e1, std::move(samples_e1)));
  for (size_t i = 0; i < tg.size(); ++i)
    rep.series.push_back(make_series("m_EN[" + std::to_string(tg[i]) + "]",
                                     alpha_omega, std::move(samples_tg[i])));
  return rep;
}

CensusReport full_census(const CurveProfile& E, u64 prime_X, u64 squarefree_X,
                         const std::vector<u64>& targets, unsigned workers) {
  CensusReport rep = squarefree_census(E, squarefree_X, targets, workers);
  rep.primes = prime_census(E, prime_X, workers);
  return rep;
}

void for_each_twist_row(const CurveProfile& E, u64 X,
                        const std::function<void(const TwistRow&)>& fn) {
  require_sweep_bound(X);
  require_census_hypotheses(E);
  u64 lambda2 = (u64)E.lambda2();
  int root = E.root_number();
  DTables tables = build_tables(E, X);
  for (u64 d = 1; d <= X; ++d) {
    DClass c = classify_d(tables, lambda2, d);
    if (!c.counted) continue;
    TwistRow row;
    row.d = d;
    row.lambda_twist = c.lambda;
    row.omega_twist = root * c.chi;
    row.corank_upper = c.lambda;
    row.conclusion = conclude(row.omega_twist == -1 ? 1 : 0, c.lambda);
    fn(row);
  }
}

namespace {

using ojson = nlohmann::ordered_json;

ojson finite_or_null(double v) {
  return std::isfinite(v) ? ojson(v) : ojson(nullptr);
}

ojson tally_json(const PrimeTally& t) {
  ojson j;
  j["X"] = t.X;
  j["pi"] = t.pi;
  j["excluded"] = t.excluded;
  j["classified"] = t.classified;
  ojson tl;
  tl["omega"] = t.in_omega;
  tl["omega_prime"] = t.in_omega_prime;
  tl["M"] = t.in_M;
  tl["P"] = t.in_P;
  tl["Q_pool"] = t.in_Q_pool;
  j["tallies"] = tl;
  ojson dn;
  dn["omega"] = t.density(t.in_omega);
  dn["omega_prime"] = t.density(t.in_omega_prime);
  dn["M"] = t.density(t.in_M);
  dn["P"] = t.density(t.in_P);
  dn["Q_pool"] = t.density(t.in_Q_pool);
  j["densities"] = dn;
  j["n_prime_1"] = t.n_prime_1;
  return j;
}

ojson series_json(const SeriesReport& s) {
  ojson j;
  j["name"] = s.name;
  j["alpha_expected"] = finite_or_null(s.alpha_expected);
  ojson samples = ojson::array();
  for (const auto& p : s.samples) samples.push_back({p.X, p.count});
  j["samples"] = samples;
  if (s.fit) {
    ojson f;
    f["c_hat"] = s.fit->c_hat;
    f["exponent_hat"] = s.fit->exponent_hat;
    f["r_squared"] = s.fit->r_squared;
    f["degenerate"] = s.fit->degenerate;
    f["ratio_series"] = s.fit->ratio_series;
    j["fit"] = f;
  } else {
    j["fit"] = nullptr;
  }
  return j;
}

}  // namespace

std::string census_report_json(const CensusReport& r, int indent) {
  ojson j;
  j["label"] = r.label;
  j["lambda2"] = r.lambda2;
  j["root_number"] = r.root_number;
  j["prime_census"] = r.primes.X ? tally_json(r.primes) : ojson(nullptr);
  ojson sf;
  sf["X"] = r.X;
  sf["total"] = r.squarefree_total;
  sf["n_E1_lower"] = r.n_E1_lower;
  sf["n_Omega"] = r.n_Omega;
  sf["targets"] = r.targets;
  ojson men = ojson::object();
  for (const auto& [k, v] : r.m_EN) men[std::to_string(k)] = v;
  sf["m_EN"] = men;
  j["squarefree_census"] = sf;
  ojson series = ojson::array();
  for (const auto& s : r.series) series.push_back(series_json(s));
  j["series"] = series;
  return j.dump(indent);
}

}  // namespace twistlab
