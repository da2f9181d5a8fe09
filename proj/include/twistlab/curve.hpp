#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <string>
#include <vector>

#include "twistlab/arith.hpp"

namespace twistlab {

// Exact arithmetic for derived quantities: c4^3-scale intermediates do not
// fit in 64 bits for arbitrary integral models.
using bigint = boost::multiprecision::cpp_int;

// Representative of v mod m in [0, m).
u64 mod_red(const bigint& v, u64 m);

struct WeierstrassCurve {
  i64 a1 = 0, a2 = 0, a3 = 0, a4 = 0, a6 = 0;
  bigint b2, b4, b6, b8, c4, c6, disc;

  // Derives b-, c-quantities and the discriminant; rejects disc = 0.
  static WeierstrassCurve from_a_invariants(i64 a1, i64 a2, i64 a3, i64 a4, i64 a6);
};

// Change of variables x = u^2 x' + r, y = u^3 y' + s u^2 x' + t between
// integral models; returns the primed model.  Throws unless u != 0 and every
// transformed coefficient stays integral.
WeierstrassCurve transform_model(const WeierstrassCurve& E, i64 u, i64 r,
                                 i64 s, i64 t);

enum class ReductionType { Good, MultiplicativeSplit, MultiplicativeNonsplit, Additive };

const char* reduction_type_name(ReductionType t);

// Reduction at an odd prime p.  Rejects p = 2, non-prime p, and models that
// are detectably non-minimal at p (p^12 | disc and p^4 | c4).
ReductionType reduction_type(const WeierstrassCurve& E, u64 p);

// #E~(F_2) including the point at infinity (1..5).
int count_points_f2(const WeierstrassCurve& E);

// Good reduction at 2 (odd disc) with a_2 odd, i.e. 2 | #E~(F_2).
bool good_ordinary_at_2(const WeierstrassCurve& E);

// The 2-division cubic 4x^3 + b2 x^2 + 2 b4 x + b6; its roots are the
// x-coordinates of the nontrivial 2-torsion.
std::array<bigint, 4> two_division_cubic(const WeierstrassCurve& E);

// Integer roots of X^3 + A X^2 + B X + C, ascending.
std::vector<bigint> monic_integer_roots(const bigint& A, const bigint& B, const bigint& C);

// E(Q)[2] != 0, via rational roots of the 2-division cubic.
bool has_rational_two_torsion(const WeierstrassCurve& E);

// E~(F_ell)[2] != 0 for a good odd prime ell (rejects ell | 2 disc).
bool two_torsion_mod_ell(const WeierstrassCurve& E, u64 ell);

// Image of Galois on E[2], read off the factorization of the 2-division
// cubic: three rational roots, one, none-with-square-disc, or all of S3.
enum class Mod2Image { Trivial, OrderTwo, OrderThree, FullS3 };

const char* mod2_image_name(Mod2Image im);

Mod2Image mod2_image(const WeierstrassCurve& E);

// Predicted density of {good ell : E~(F_ell)[2] != 0} by Chebotarev applied
// to the mod-2 image: 1, 1, 1/3, 2/3.
struct Density {
  int num, den;
  double value() const { return (double)num / den; }
};
Density omega_density_prediction(Mod2Image im);

struct BadPrimeInfo {
  u64 p = 0;
  ReductionType type = ReductionType::Good;
  int ord_disc = 0;  // ord_p(disc)
  int tamagawa = 0;  // c_p: ord_disc if split; 1 or 2 by parity if nonsplit
};

struct ConductorData {
  u64 conductor = 1;  // product of the bad primes; squarefree by construction
  int root_number = 1;
  std::vector<BadPrimeInfo> bad_primes;
};

// Requires good reduction at 2 and multiplicative reduction at every odd bad
// prime; the root number is -prod_p w_p with w_p = -1 exactly at split p.
ConductorData conductor_and_root_number(const WeierstrassCurve& E);

struct GreenbergReport {
  bool ordinary_at_2 = false;
  int points_f2 = 0;
  bool residual_order_odd_at_2 = false;  // 2 not dividing #E~(F_2); fails whenever ordinary
  bool tamagawa_all_odd = false;         // 2 not dividing c_ell for every bad ell
  bool irreducibility_checked = false;   // the representation-theoretic condition is out of scope
  std::vector<BadPrimeInfo> bad_primes;
};

GreenbergReport greenberg_partial(const WeierstrassCurve& E);

// j-invariant equals one of the thirteen rational CM values.
bool has_cm_j_invariant(const WeierstrassCurve& E);

struct ProfileOptions {
  std::string label;
  std::optional<int> mu2, lambda2;
  std::optional<int> root_number;  // cross-checked against the computed value
  std::optional<int> rank;
  std::vector<int> torsion_structure;
};

// Everything twist classification needs about a base curve, computed once.
struct CurveProfile {
  std::string label;
  WeierstrassCurve curve;
  ConductorData cond;
  bool ordinary_at_2 = false;
  bool rational_two_torsion = false;
  Mod2Image image = Mod2Image::FullS3;
  bool cm = false;
  std::optional<int> mu2_opt, lambda2_opt;
  std::optional<int> rank;
  std::vector<int> torsion_structure;
  std::optional<int> root_number_override;

  u64 conductor() const { return cond.conductor; }
  int root_number() const {
    return root_number_override ? *root_number_override : cond.root_number;
  }
  bool has_iwasawa_data() const { return mu2_opt && lambda2_opt; }
  // mu2/lambda2 are caller-supplied ground truth; unavailable values throw.
  int mu2() const;
  int lambda2() const;

  static CurveProfile analyze(const WeierstrassCurve& E, const ProfileOptions& opt = {});
};

}  // namespace twistlab
