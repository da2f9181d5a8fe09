#pragma once

#include <map>
#include <optional>
#include <string>

#include "twistlab/twist.hpp"

namespace twistlab {

// Hard ceiling for any sweep bound; mirrors the sieve guard.
inline constexpr u64 kCensusSweepGuard = kDefaultSieveGuard;
// Bounds used by the one-shot verification driver: large enough to span the
// fit decades, small enough to finish in about a minute.
inline constexpr u64 kDefaultPrimeSweep = 1000000;        // 1e6
inline constexpr u64 kDefaultSquarefreeSweep = 10000000;  // 1e7

// Tallies over odd primes ell <= X coprime to 2 N_E.  The density denominator
// is `classified` = pi(X) minus the excluded primes, matching how every prime
// set here is defined away from 2 N_E.
struct PrimeTally {
  u64 X = 0;
  u64 pi = 0;          // pi(X) over all primes
  u64 excluded = 0;    // primes <= X dividing 2 N_E
  u64 classified = 0;  // pi - excluded
  u64 in_omega = 0;
  u64 in_omega_prime = 0;  // complement of Omega, tallied independently
  u64 in_M = 0;
  u64 in_P = 0;
  u64 in_Q_pool = 0;
  u64 n_prime_1 = 0;  // prime twists d = ell certified corank one

  double density(u64 tally) const;
};

// Classifies every odd prime ell <= X with ell coprime to 2 N_E.  X >= 100.
PrimeTally prime_census(const CurveProfile& E, u64 X, unsigned workers = 1);

struct SamplePoint {
  u64 X = 0;
  u64 count = 0;
};

struct FitResult {
  double alpha_expected = 0;  // NaN when no exponent is predicted
  double c_hat = 0;
  double exponent_hat = 0;
  double r_squared = 0;
  bool degenerate = false;           // constant counts, or r^2 below 0.99
  std::vector<double> ratio_series;  // count * (log X)^alpha / X per sample
};

// Least-squares fit of log(count) - log(X) against log(log(X)), modeling
// count ~ c X / (log X)^e; returns e as exponent_hat and exp(intercept) as
// c_hat.  The ratio series uses alpha_expected when finite, else the fitted
// exponent.  Requires >= 5 positive samples spanning >= 2 decades, otherwise
// throws InsufficientData.
FitResult asymptotic_fit(const std::vector<SamplePoint>& samples,
                         double alpha_expected);

struct SeriesReport {
  std::string name;
  double alpha_expected = 0;  // NaN = no prediction for this curve
  std::vector<SamplePoint> samples;
  std::optional<FitResult> fit;  // empty iff the samples cannot support one
};

// Counting functions over one curve.  Prime-side and squarefree-side sweeps
// can use different bounds; the CLI artifact carries both.
struct CensusReport {
  std::string label;
  u64 lambda2 = 0;
  int root_number = 1;
  PrimeTally primes;
  u64 X = 0;  // squarefree sweep bound
  u64 squarefree_total = 0;  // squarefree d <= X coprime to 2 N_E
  u64 n_E1_lower = 0;        // certified corank-one d: lower bound, never estimate
  u64 n_Omega = 0;           // d with every prime factor off Omega
  std::map<u64, u64> m_EN;   // observed lambda of the twist -> count
  std::vector<u64> targets;  // lambda values given their own sample series
  std::vector<SeriesReport> series;
};

// Sweeps every squarefree d <= X coprime to 2 N_E, computing the transferred
// lambda and certificate of each via one table-driven pass.  Fills the
// squarefree side of the report plus checkpointed series for n_Omega,
// n_E1_lower, and each target lambda.  Needs mu2(E) = 0.
CensusReport squarefree_census(const CurveProfile& E, u64 X,
                               const std::vector<u64>& targets = {},
                               unsigned workers = 1);

// prime_census + squarefree_census composed into the full artifact.
CensusReport full_census(const CurveProfile& E, u64 prime_X, u64 squarefree_X,
                         const std::vector<u64>& targets = {},
                         unsigned workers = 1);

// Half-decade checkpoints 10^3, 10^3.5, ... capped at X; X itself is always
// the last entry.
std::vector<u64> checkpoint_grid(u64 X);

// One row of the per-d sweep artifact.
struct TwistRow {
  u64 d = 1;
  u64 lambda_twist = 0;
  int omega_twist = 1;
  u64 corank_upper = 0;
  Conclusion conclusion = Conclusion::Indeterminate;
};

// Streams every squarefree d <= X coprime to 2 N_E in increasing order,
// classified by the same table-driven path the census sweep uses.
void for_each_twist_row(const CurveProfile& E, u64 X,
                        const std::function<void(const TwistRow&)>& fn);

// Canonical JSON rendering.  Field order and number formatting are fixed and
// every value is derived from merged integer tallies, so reports produced
// with different worker counts serialize byte-identically.
std::string census_report_json(const CensusReport& report, int indent = 2);

}  // namespace twistlab
