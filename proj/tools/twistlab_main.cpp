#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <thread>

#include <json.hpp>

#include "twistlab/census.hpp"
#include "twistlab/verify.hpp"

using namespace twistlab;
namespace fs = std::filesystem;

namespace {

struct RunConfig {
  std::string label, curve_file;
  std::optional<int> mu2, lambda2, omega;
  std::string format = "table";
  std::string out_dir;
  bool offline = false;
  unsigned workers = 0;  // 0 = hardware concurrency

  unsigned effective_workers() const {
    if (workers) return workers;
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
  }
};

enum class Fmt { Table, Csv, Json, Tsv };

Fmt parse_format(const std::string& f) {
  if (f == "table") return Fmt::Table;
  if (f == "csv") return Fmt::Csv;
  if (f == "json") return Fmt::Json;
  if (f == "tsv") return Fmt::Tsv;
  throw Error(ErrorCode::BadInput, "unknown format " + f,
              "format in {table, csv, json, tsv}");
}

std::string scalar_str(const nlohmann::ordered_json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

// Flat key/value report in any of the four formats; JSON keeps the types.
void emit_flat(const nlohmann::ordered_json& doc, Fmt fmt) {
  if (fmt == Fmt::Json) {
    std::printf("%s\n", doc.dump(2).c_str());
    return;
  }
  size_t w = 0;
  for (const auto& [k, v] : doc.items()) w = std::max(w, k.size());
  for (const auto& [k, v] : doc.items()) {
    std::string s = scalar_str(v);
    if (fmt == Fmt::Table)
      std::printf("%-*s  %s\n", (int)w, k.c_str(), s.c_str());
    else if (fmt == Fmt::Csv)
      std::printf("%s,%s\n", k.c_str(), s.c_str());
    else
      std::printf("%s\t%s\n", k.c_str(), s.c_str());
  }
}

const char* conclusion_token(Conclusion c) {
  switch (c) {
    case Conclusion::CorankOneProved: return "CorankOneProved";
    case Conclusion::CorankAtMost: return "CorankAtMost";
    default: return "Indeterminate";
  }
}

CurveRecord load_record(const RunConfig& cfg) {
  if (cfg.label.empty() == cfg.curve_file.empty())
    throw Error(ErrorCode::BadInput,
                "need exactly one of --label or --curve-file",
                "exactly one curve source");
  if (!cfg.label.empty()) {
    FetchOptions f;
    f.offline = cfg.offline;  // TWISTLAB_OFFLINE also forces this inside
    return fetch_curve(cfg.label, f);
  }
  std::ifstream in(cfg.curve_file);
  if (!in)
    throw Error(ErrorCode::NotFound, "cannot read " + cfg.curve_file,
                "curve file readable");
  std::string text{std::istreambuf_iterator<char>(in), {}};
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadInput,
                cfg.curve_file + " is not JSON: " + e.what(),
                "curve file parses as JSON");
  }
  if (!doc.is_object())
    throw Error(ErrorCode::BadInput, cfg.curve_file + " is not a JSON object",
                "curve file holds one record");
  // Bare {a_invariants: [...]} files are welcome: fill in the bookkeeping
  // fields the record schema wants, deriving the conductor from the model.
  if (!doc.contains("schema_version"))
    doc["schema_version"] = kCurveRecordSchemaVersion;
  if (!doc.contains("label") || !doc.contains("conductor")) {
    if (!doc.contains("a_invariants"))
      throw Error(ErrorCode::BadInput, "curve file lacks a_invariants",
                  "a_invariants present");
    std::array<i64, 5> a{};
    try {
      for (size_t i = 0; i < 5; ++i) a[i] = doc["a_invariants"].at(i).get<i64>();
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorCode::BadInput, "a_invariants must be five integers",
                  "a_invariants has 5 integer entries");
    }
    auto E = WeierstrassCurve::from_a_invariants(a[0], a[1], a[2], a[3], a[4]);
    auto cd = conductor_and_root_number(E);
    if (!doc.contains("conductor")) doc["conductor"] = cd.conductor;
    if (!doc.contains("label"))
      doc["label"] = std::to_string(cd.conductor) + "x1";
  }
  return record_from_json(doc.dump(), RecordSource::Fixture);
}

CurveProfile load_profile(const RunConfig& cfg) {
  auto rec = load_record(cfg);
  if (cfg.mu2) rec.mu2 = *cfg.mu2;
  if (cfg.lambda2) rec.lambda2 = *cfg.lambda2;
  if (cfg.omega) rec.root_number = *cfg.omega;
  return rec.profile();
}

int cmd_analyze(const RunConfig& cfg) {
  auto P = load_profile(cfg);
  nlohmann::ordered_json doc;
  doc["label"] = P.label;
  doc["a_invariants"] = {P.curve.a1, P.curve.a2, P.curve.a3, P.curve.a4,
                         P.curve.a6};
  doc["conductor"] = P.conductor();
  doc["root_number"] = P.root_number();
  doc["good_ordinary_at_2"] = P.ordinary_at_2;
  doc["points_f2"] = count_points_f2(P.curve);
  doc["rational_two_torsion"] = P.rational_two_torsion;
  doc["mod2_image"] = mod2_image_name(P.image);
  auto dens = omega_density_prediction(P.image);
  char frac[24];
  std::snprintf(frac, sizeof frac, "%d/%d", dens.num, dens.den);
  doc["omega_density_prediction"] = frac;
  doc["cm"] = P.cm;
  for (const auto& bp : P.cond.bad_primes)
    doc["reduction_at_" + std::to_string(bp.p)] =
        std::string(reduction_type_name(bp.type)) +
        " (ord_disc " + std::to_string(bp.ord_disc) + ", tamagawa " +
        std::to_string(bp.tamagawa) + ")";
  auto g = greenberg_partial(P.curve);
  doc["greenberg.residual_order_odd_at_2"] = g.residual_order_odd_at_2;
  doc["greenberg.tamagawa_all_odd"] = g.tamagawa_all_odd;
  doc["greenberg.irreducibility_checked"] = g.irreducibility_checked;
  doc["mu2"] = P.mu2_opt ? nlohmann::ordered_json(*P.mu2_opt) : nullptr;
  doc["lambda2"] = P.lambda2_opt ? nlohmann::ordered_json(*P.lambda2_opt) : nullptr;
  doc["rank"] = P.rank ? nlohmann::ordered_json(*P.rank) : nullptr;
  doc["torsion_structure"] = P.torsion_structure;
  emit_flat(doc, parse_format(cfg.format));
  return 0;
}

int cmd_classify_prime(const RunConfig& cfg, u64 ell) {
  auto P = load_profile(cfg);
  auto c = classify_prime(P, ell);
  nlohmann::ordered_json doc;
  doc["ell"] = c.ell;
  doc["residue_mod4"] = c.residue_mod4;
  doc["residue_mod8"] = c.residue_mod8;
  doc["chi_minus_N"] = c.chi_minus_N;
  doc["in_omega"] = c.in_omega;
  doc["n_ell"] = c.n_ell;
  doc["splits_fully_F"] = c.splits_fully_F;
  doc["in_M"] = c.in_M;
  doc["in_P"] = c.in_P;
  doc["in_Q_pool"] = c.in_Q_pool;
  emit_flat(doc, parse_format(cfg.format));
  return 0;
}

int cmd_twist(const RunConfig& cfg, u64 d) {
  auto P = load_profile(cfg);
  auto cert = certify(P, SquarefreeInteger::from_value(d));
  nlohmann::ordered_json doc;
  doc["label"] = P.label;
  doc["d"] = cert.d;
  doc["lambda_twist"] = cert.lambda_twist;
  doc["omega_twist"] = cert.omega_twist;
  doc["parity"] = cert.parity;
  doc["corank_upper"] = cert.corank_upper;
  doc["conclusion"] = cert.conclusion_string();
  doc["lambda_equals"] =
      cert.lambda_equals ? nlohmann::ordered_json(*cert.lambda_equals) : nullptr;
  doc["rank_note"] =
      "corank statements translate to Mordell-Weil rank only if "
      "Sha(E^(d))[2^inf] is finite";
  emit_flat(doc, parse_format(cfg.format));
  return 0;
}

int cmd_construct(const RunConfig& cfg, u64 target, u64 pool_limit) {
  auto P = load_profile(cfg);
  auto d = construct_d_with_lambda(P, target, pool_limit);
  nlohmann::ordered_json doc;
  doc["label"] = P.label;
  doc["target_lambda"] = target;
  doc["d"] = d.value;
  std::string facs;
  for (u64 p : d.factors) facs += (facs.empty() ? "" : "*") + std::to_string(p);
  doc["factors"] = facs.empty() ? "1" : facs;
  doc["lambda_check"] = matsuno_lambda(P, d);  // round trip, = target
  emit_flat(doc, parse_format(cfg.format));
  return 0;
}

std::string primes_csv(const CurveProfile& P, u64 X) {
  std::string out = "ell,mod8,chi,in_omega,n_ell,in_M,in_P\n";
  const auto& E = P.curve;
  u64 N = P.conductor();
  for (u64 ell : sieve_primes(X)) {
    if (ell == 2 || N % ell == 0 || mod_red(E.disc, ell) == 0) continue;
    auto c = classify_prime(P, ell);
    out += std::to_string(c.ell) + "," + std::to_string(c.residue_mod8) + "," +
           std::to_string(c.chi_minus_N) + "," + std::to_string(c.in_omega) +
           "," + std::to_string(c.n_ell) + "," + std::to_string(c.in_M) + "," +
           std::to_string(c.in_P) + "\n";
  }
  return out;
}

std::string twists_csv(const CurveProfile& P, u64 X) {
  std::string out = "d,lambda_twist,omega_twist,conclusion\n";
  for_each_twist_row(P, X, [&](const TwistRow& r) {
    out += std::to_string(r.d) + "," + std::to_string(r.lambda_twist) + "," +
           std::to_string(r.omega_twist) + "," + conclusion_token(r.conclusion) +
           "\n";
  });
  return out;
}

std::string ratio_tsv(const CensusReport& rep) {
  std::string out = "# series\tX\tcount\tratio\n";
  for (const auto& s : rep.series) {
    if (!s.fit) continue;
    const auto& f = *s.fit;
    for (size_t i = 0; i < s.samples.size() && i < f.ratio_series.size(); ++i) {
      char line[160];
      std::snprintf(line, sizeof line, "%s\t%llu\t%llu\t%.6f\n",
                    s.name.c_str(), (unsigned long long)s.samples[i].X,
                    (unsigned long long)s.samples[i].count, f.ratio_series[i]);
      out += line;
    }
    out += "\n";  // gnuplot dataset separator
  }
  return out;
}

int cmd_census(const RunConfig& cfg, u64 limit, const std::vector<u64>& targets) {
  auto P = load_profile(cfg);
  unsigned w = cfg.effective_workers();
  // Below the prime-census floor only the squarefree side runs; the report
  // stays well formed with a null prime census.
  CensusReport rep = limit >= 100 ? full_census(P, limit, limit, targets, w)
                                  : squarefree_census(P, limit, targets, w);

  fs::path dir = cfg.out_dir.empty() ? fs::path(".") : fs::path(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw Error(ErrorCode::BadInput, "cannot create " + dir.string(),
                "output directory writable");

  std::string report_body = census_report_json(rep);
  std::string primes_body = limit >= 100 ? primes_csv(P, limit) : "";
  std::string twists_body = twists_csv(P, limit);
  std::string ratio_body = ratio_tsv(rep);

  std::vector<fs::path> written;
  auto write_file = [&](const char* name, const std::string& body) {
    fs::path p = dir / name;
    std::ofstream o(p, std::ios::trunc | std::ios::binary);
    o << body;
    o.flush();
    if (!o)
      throw Error(ErrorCode::BadInput, "write failed: " + p.string(),
                  "artifacts writable");
    written.push_back(p);
  };
  try {
    write_file("report.json", report_body);
    if (!primes_body.empty()) write_file("primes.csv", primes_body);
    write_file("twists.csv", twists_body);
    write_file("ratio_series.tsv", ratio_body);
  } catch (...) {
    for (const auto& p : written) fs::remove(p);
    throw;
  }

  Fmt fmt = parse_format(cfg.format);
  if (fmt == Fmt::Json) {
    std::printf("%s\n", report_body.c_str());
    return 0;
  }
  nlohmann::ordered_json doc;
  doc["label"] = rep.label;
  doc["squarefree_X"] = rep.X;
  doc["squarefree_total"] = rep.squarefree_total;
  doc["n_Omega"] = rep.n_Omega;
  doc["n_E1_lower"] = rep.n_E1_lower;
  if (rep.primes.X) {
    const auto& t = rep.primes;
    doc["prime_X"] = t.X;
    doc["classified_primes"] = t.classified;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", t.density(t.in_omega));
    doc["density.omega"] = buf;
    std::snprintf(buf, sizeof buf, "%.4f", t.density(t.in_M));
    doc["density.M"] = buf;
    std::snprintf(buf, sizeof buf, "%.4f", t.density(t.in_P));
    doc["density.P"] = buf;
  }
  for (const auto& s : rep.series) {
    if (!s.fit) continue;
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "exponent_hat %.4f, c_hat %.4f, r2 %.4f%s", s.fit->exponent_hat,
                  s.fit->c_hat, s.fit->r_squared,
                  s.fit->degenerate ? ", degenerate" : "");
    doc["fit." + s.name] = buf;
  }
  doc["artifacts"] = dir.string();
  emit_flat(doc, fmt);
  return 0;
}

int cmd_verify_paper(const RunConfig& cfg) {
  if (resolve_fixtures_dir().empty())
    throw Error(ErrorCode::NotFound, "no fixtures directory found",
                "fixtures present");
  VerifyOptions vo;
  vo.workers = cfg.effective_workers();
  std::vector<std::string> failed;
  for (const auto& r : run_all_checks(vo)) {
    std::puts(check_summary_line(r).c_str());
    if (!r.passed) failed.push_back(r.name);
  }
  if (failed.empty()) {
    std::printf("all %d checks passed\n", kNumChecks);
    return 0;
  }
  std::string names;
  for (const auto& n : failed) names += (names.empty() ? "" : ", ") + n;
  std::printf("%zu of %d checks failed: %s\n", failed.size(), kNumChecks,
              names.c_str());
  return 1;
}

void print_error_envelope(const char* code, const std::string& message,
                          const std::string& clause) {
  nlohmann::ordered_json env;
  env["code"] = code;
  env["message"] = message;
  env["clause"] = clause;
  std::fprintf(stderr, "%s\n", env.dump().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quadratic twists of elliptic curves: 2-adic lambda transfer, "
               "corank certificates, and census sweeps"};
  app.require_subcommand(1);
  RunConfig cfg;
  app.add_option("--label", cfg.label, "curve label, e.g. 53a1 or 53.a1");
  app.add_option("--curve-file", cfg.curve_file,
                 "JSON file with a_invariants and optional invariants");
  app.add_flag("--offline", cfg.offline, "resolve labels without the network");
  app.add_option("--format", cfg.format, "table, csv, json or tsv");
  app.add_option("--workers", cfg.workers, "sweep workers (0 = hardware)");
  app.add_option("--out", cfg.out_dir, "artifact directory for census");
  app.add_option("--mu2", cfg.mu2, "override mu2 of the base curve");
  app.add_option("--lambda2", cfg.lambda2, "override lambda2 of the base curve");
  app.add_option("--root-number", cfg.omega,
                 "override omega (cross-checked against the computed value)");

  auto* analyze = app.add_subcommand("analyze", "print the curve profile");
  auto* classify =
      app.add_subcommand("classify-prime", "classify one good odd prime");
  u64 ell = 0;
  classify->add_option("--ell", ell, "the prime")->required();
  auto* twist =
      app.add_subcommand("twist", "certificate for the quadratic twist by d");
  u64 dval = 0;
  twist->add_option("--d", dval, "positive squarefree d coprime to 2N")
      ->required();
  auto* census = app.add_subcommand(
      "census", "sweep primes and squarefree twists, write artifacts");
  u64 limit = 0;
  census->add_option("--limit", limit, "sweep bound X")->required();
  std::vector<u64> targets;
  census->add_option("--targets", targets, "lambda values to track as series")
      ->delimiter(',');
  auto* construct = app.add_subcommand(
      "construct", "smallest d whose twist has the prescribed lambda");
  u64 target = 0;
  construct->add_option("--lambda", target, "target lambda")->required();
  u64 pool = 1000000;
  construct->add_option("--pool-limit", pool, "prime pool search bound");
  auto* verify =
      app.add_subcommand("verify-paper", "run the verification suite");
  for (auto* sc : {analyze, classify, twist, census, construct, verify})
    sc->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    print_error_envelope("BadInput", e.what(), "usage");
    return 2;
  }

  try {
    if (*analyze) return cmd_analyze(cfg);
    if (*classify) return cmd_classify_prime(cfg, ell);
    if (*twist) return cmd_twist(cfg, dval);
    if (*census) return cmd_census(cfg, limit, targets);
    if (*construct) return cmd_construct(cfg, target, pool);
    if (*verify) return cmd_verify_paper(cfg);
  } catch (const Error& e) {
    print_error_envelope(error_code_name(e.code()), e.what(), e.clause());
    return 2;
  } catch (const std::exception& e) {
    print_error_envelope("Internal", e.what(), "");
    return 2;
  }
  return 0;
}
