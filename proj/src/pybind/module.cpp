#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "twistlab/census.hpp"
#include "twistlab/verify.hpp"

namespace py = pybind11;
using namespace twistlab;

namespace {

CurveProfile profile_from_label(const std::string& label, bool offline) {
  FetchOptions f;
  f.offline = offline;
  return fetch_curve(label, f).profile();
}

CurveProfile profile_from_ainvs(const std::vector<i64>& a,
                                std::optional<int> mu2,
                                std::optional<int> lambda2) {
  if (a.size() != 5)
    throw Error(ErrorCode::BadInput, "need five a-invariants",
                "a_invariants has 5 entries");
  auto E = WeierstrassCurve::from_a_invariants(a[0], a[1], a[2], a[3], a[4]);
  ProfileOptions o;
  o.mu2 = mu2;
  o.lambda2 = lambda2;
  return CurveProfile::analyze(E, o);
}

py::dict class_dict(const PrimeClass& c) {
  py::dict d;
  d["ell"] = c.ell;
  d["residue_mod4"] = c.residue_mod4;
  d["residue_mod8"] = c.residue_mod8;
  d["chi_minus_N"] = c.chi_minus_N;
  d["in_omega"] = c.in_omega;
  d["n_ell"] = c.n_ell;
  d["splits_fully_F"] = c.splits_fully_F;
  d["in_M"] = c.in_M;
  d["in_P"] = c.in_P;
  d["in_Q_pool"] = c.in_Q_pool;
  return d;
}

py::dict cert_dict(const TwistCertificate& c) {
  py::dict d;
  d["d"] = c.d;
  d["lambda_twist"] = c.lambda_twist;
  d["omega_twist"] = c.omega_twist;
  d["parity"] = c.parity;
  d["corank_upper"] = c.corank_upper;
  d["conclusion"] = c.conclusion_string();
  d["lambda_equals"] = c.lambda_equals
                           ? py::object(py::int_(*c.lambda_equals))
                           : py::object(py::none());
  d["rank_note_conditional"] = c.rank_note_conditional;
  return d;
}

py::dict tally_dict(const PrimeTally& t) {
  py::dict d;
  d["X"] = t.X;
  d["pi"] = t.pi;
  d["excluded"] = t.excluded;
  d["classified"] = t.classified;
  d["in_omega"] = t.in_omega;
  d["in_omega_prime"] = t.in_omega_prime;
  d["in_M"] = t.in_M;
  d["in_P"] = t.in_P;
  d["in_Q_pool"] = t.in_Q_pool;
  d["n_prime_1"] = t.n_prime_1;
  return d;
}

}  // namespace

PYBIND11_MODULE(twistlab, m) {
  m.doc() =
      "quadratic twists of elliptic curves: 2-adic lambda transfer, twisted "
      "root numbers, Selmer-corank certificates, census sweeps";
  m.attr("__version__") = "0.1.0";

  py::register_exception<Error>(m, "Error");

  py::class_<CurveProfile>(m, "CurveProfile")
      .def_readonly("label", &CurveProfile::label)
      .def_property_readonly("conductor", &CurveProfile::conductor)
      .def_property_readonly("root_number", &CurveProfile::root_number)
      .def_readonly("ordinary_at_2", &CurveProfile::ordinary_at_2)
      .def_readonly("rational_two_torsion", &CurveProfile::rational_two_torsion)
      .def_property_readonly(
          "mod2_image",
          [](const CurveProfile& p) { return std::string(mod2_image_name(p.image)); })
      .def_property_readonly("mu2",
                             [](const CurveProfile& p) { return p.mu2_opt; })
      .def_property_readonly("lambda2",
                             [](const CurveProfile& p) { return p.lambda2_opt; })
      .def_property_readonly("a_invariants",
                             [](const CurveProfile& p) {
                               return std::vector<i64>{p.curve.a1, p.curve.a2,
                                                       p.curve.a3, p.curve.a4,
                                                       p.curve.a6};
                             })
      .def("__repr__", [](const CurveProfile& p) {
        return "<CurveProfile " + (p.label.empty() ? "?" : p.label) +
               " N=" + std::to_string(p.conductor()) + ">";
      });

  m.def("profile", &profile_from_label, py::arg("label"),
        py::arg("offline") = true,
        "Resolve a curve label through fixtures and cache (and the remote "
        "database when offline=False) into a full profile.");
  m.def("profile_from_a_invariants", &profile_from_ainvs,
        py::arg("a_invariants"), py::arg("mu2") = std::nullopt,
        py::arg("lambda2") = std::nullopt,
        "Profile an explicit [a1, a2, a3, a4, a6]; twist operations need mu2 "
        "and lambda2 supplied here.");
  m.def(
      "classify_prime",
      [](const CurveProfile& E, u64 ell) {
        return class_dict(classify_prime(E, ell));
      },
      py::arg("profile"), py::arg("ell"));
  m.def(
      "matsuno_lambda",
      [](const CurveProfile& E, u64 d) {
        return matsuno_lambda(E, SquarefreeInteger::from_value(d));
      },
      py::arg("profile"), py::arg("d"),
      "lambda2 of the twist by squarefree d coprime to 2N.");
  m.def(
      "twist_root_number",
      [](const CurveProfile& E, u64 d) {
        return twist_root_number(E, SquarefreeInteger::from_value(d));
      },
      py::arg("profile"), py::arg("d"));
  m.def(
      "certify",
      [](const CurveProfile& E, u64 d) {
        return cert_dict(certify(E, SquarefreeInteger::from_value(d)));
      },
      py::arg("profile"), py::arg("d"),
      "Corank certificate for the twist by d: parity, upper bound, conclusion.");
  m.def(
      "construct_d_with_lambda",
      [](const CurveProfile& E, u64 target, u64 pool_limit) {
        return construct_d_with_lambda(E, target, pool_limit).value;
      },
      py::arg("profile"), py::arg("target"), py::arg("pool_limit") = 1000000,
      "Smallest squarefree d whose twist has the prescribed lambda.");
  m.def(
      "prime_census",
      [](const CurveProfile& E, u64 X, unsigned workers) {
        return tally_dict(prime_census(E, X, workers));
      },
      py::arg("profile"), py::arg("x"), py::arg("workers") = 1);
  m.def(
      "census_json",
      [](const CurveProfile& E, u64 squarefree_x, u64 prime_x,
         const std::vector<u64>& targets, unsigned workers) {
        CensusReport r =
            prime_x ? full_census(E, prime_x, squarefree_x, targets, workers)
                    : squarefree_census(E, squarefree_x, targets, workers);
        return census_report_json(r);
      },
      py::arg("profile"), py::arg("squarefree_x"), py::arg("prime_x") = 0,
      py::arg("targets") = std::vector<u64>{}, py::arg("workers") = 1,
      "Full census report as canonical JSON (prime_x=0 skips the prime side).");
  m.def(
      "verify_paper",
      [](unsigned workers) {
        VerifyOptions o;
        o.workers = workers;
        py::list out;
        for (const auto& r : run_all_checks(o)) {
          py::dict d;
          d["id"] = r.id;
          d["name"] = r.name;
          d["passed"] = r.passed;
          d["detail"] = r.detail;
          d["seconds"] = r.seconds;
          out.append(d);
        }
        return out;
      },
      py::arg("workers") = 1, "Run the verification suite; one dict per check.");
}
