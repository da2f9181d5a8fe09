#include "twistlab/lmfdb.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <regex>
#include <sstream>
#include <thread>

#include <json.hpp>
#ifdef TWISTLAB_HAVE_TLS
#include <httplib.h>
#endif

namespace twistlab {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

// Document-shape problems are corruption when they come from our own cache
// and bad input when they come from anywhere else.
ErrorCode doc_code(RecordSource s) {
  return s == RecordSource::Cache ? ErrorCode::CacheCorrupt
                                  : ErrorCode::BadInput;
}

bool env_truthy(const char* name) {
  const char* v = std::getenv(name);
  return v && *v && std::string(v) != "0";
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::NotFound, "cannot read " + p.string(),
                "file readable");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fnv1a64_hex(const std::string& s) {
  u64 h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return buf;
}

std::optional<ConductorData> try_conductor(const WeierstrassCurve& E) {
  try {
    return conductor_and_root_number(E);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::mutex& label_write_mutex(const std::string& label) {
  static std::mutex table_mu;
  static std::map<std::string, std::mutex> table;
  std::lock_guard<std::mutex> g(table_mu);
  return table[label];
}

void write_atomically(const fs::path& path, const std::string& body) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << body;
    if (!out)
      throw Error(ErrorCode::BadInput, "cannot write " + tmp.string(),
                  "cache directory writable");
  }
  fs::rename(tmp, path);
}

std::optional<CurveRecord> fixture_lookup(const std::string& dir,
                                          const std::string& label) {
  auto matches = [&](const CurveRecord& rec) {
    if (rec.label == label) return true;
    for (const auto& a : rec.aliases)
      if (a == label) return true;
    return false;
  };
  fs::path direct = fs::path(dir) / (label + ".json");
  std::error_code ec;
  if (fs::is_regular_file(direct, ec)) {
    auto rec = record_from_json(read_file(direct), RecordSource::Fixture);
    if (matches(rec)) return rec;
    throw Error(ErrorCode::BadInput,
                "fixture " + direct.string() + " describes " + rec.label,
                "fixture file name matches its label");
  }
  std::vector<fs::path> entries;
  for (const auto& e : fs::directory_iterator(dir, ec))
    if (e.path().extension() == ".json") entries.push_back(e.path());
  std::sort(entries.begin(), entries.end());
  for (const auto& p : entries) {
    auto rec = record_from_json(read_file(p), RecordSource::Fixture);
    if (matches(rec)) return rec;
  }
  return std::nullopt;
}

#ifdef TWISTLAB_HAVE_TLS
CurveRecord record_from_remote_payload(const std::string& label,
                                       const std::string& body);

CurveRecord fetch_remote(const std::string& label, const FetchOptions& opts) {
  httplib::SSLClient cli("www.lmfdb.org");
  cli.set_connection_timeout(0, opts.timeout_ms * 1000);
  cli.set_read_timeout(0, opts.timeout_ms * 1000);
  std::string query =
      label.find('.') != std::string::npos
          ? "/api/ec_curvedata/?lmfdb_label=" + label + "&_format=json"
          : "/api/ec_curvedata/?Clabel=" + label + "&_format=json";
  for (int attempt = 0;; ++attempt) {
    auto res = cli.Get(query.c_str());
    if (res && res->status == 200)
      return record_from_remote_payload(label, res->body);
    if (attempt >= opts.retries)
      throw Error(ErrorCode::NetworkError,
                  "remote lookup for " + label + " failed",
                  "remote database reachable");
    std::this_thread::sleep_for(std::chrono::milliseconds(100 << attempt));
  }
}

CurveRecord record_from_remote_payload(const std::string& label,
                                       const std::string& body) {
  ojson j;
  try {
    j = ojson::parse(body);
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::NetworkError, "remote payload is not JSON",
                "well-formed API response");
  }
  if (!j.contains("data") || !j["data"].is_array() || j["data"].empty())
    throw Error(ErrorCode::NotFound, "no curve named " + label,
                "label known to the remote database");
  const auto& row = j["data"][0];
  CurveRecord rec;
  rec.label = label;
  auto ai = row.value("ainvs", ojson());
  if (ai.is_string()) ai = ojson::parse(ai.get<std::string>());
  if (!ai.is_array() || ai.size() != 5)
    throw Error(ErrorCode::NetworkError, "remote payload lacks a_invariants",
                "ainvs present");
  for (size_t i = 0; i < 5; ++i) rec.a_invariants[i] = ai[i].get<i64>();
  rec.conductor = row.value("conductor", 0ull);
  if (row.contains("rank") && row["rank"].is_number())
    rec.rank = row["rank"].get<i64>();
  if (row.contains("torsion_structure") && row["torsion_structure"].is_array())
    for (const auto& t : row["torsion_structure"])
      rec.torsion_structure.push_back(t.get<i64>());
  // The remote tables do not expose 2-adic Iwasawa data here; mu2/lambda2
  // stay unset and must be supplied via configuration.
  rec.source = RecordSource::Remote;
  // Round-trip through the document validator to apply every check.
  auto validated = record_from_json(record_to_json(rec), RecordSource::Remote);
  validated.source = RecordSource::Remote;
  return validated;
}
#else
CurveRecord fetch_remote(const std::string& label, const FetchOptions&) {
  throw Error(ErrorCode::NetworkError,
              "built without TLS; remote lookup for " + label + " disabled",
              "TLS support compiled in");
}
#endif

}  // namespace

const char* record_source_name(RecordSource s) {
  switch (s) {
    case RecordSource::Remote: return "remote";
    case RecordSource::Cache: return "cache";
    case RecordSource::Fixture: return "fixture";
  }
  return "?";
}

bool valid_label(const std::string& label) {
  static const std::regex re("[0-9]+\\.?[a-z]+[0-9]+");
  return std::regex_match(label, re);
}

WeierstrassCurve CurveRecord::curve() const {
  return WeierstrassCurve::from_a_invariants(a_invariants[0], a_invariants[1],
                                             a_invariants[2], a_invariants[3],
                                             a_invariants[4]);
}

CurveProfile CurveRecord::profile() const {
  ProfileOptions o;
  o.label = label;
  if (mu2) o.mu2 = (int)*mu2;
  if (lambda2) o.lambda2 = (int)*lambda2;
  if (root_number) o.root_number = *root_number;
  if (rank) o.rank = (int)*rank;
  for (i64 t : torsion_structure) o.torsion_structure.push_back((int)t);
  return CurveProfile::analyze(curve(), o);
}

CurveRecord record_from_json(const std::string& text, RecordSource source) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(doc_code(source), std::string("record is not JSON: ") + e.what(),
                "record parses as JSON");
  }
  auto fail = [&](const std::string& msg, const char* clause) -> Error {
    return Error(doc_code(source), msg, clause);
  };
  CurveRecord rec;
  rec.source = source;
  try {
    if (!j.is_object()) throw fail("record is not an object", "record object");
    if (!j.contains("schema_version") ||
        !j["schema_version"].is_number_integer() ||
        j["schema_version"].get<int>() != kCurveRecordSchemaVersion)
      throw fail("unsupported record schema", "schema_version == 1");
    if (!j.contains("label") || !j["label"].is_string())
      throw fail("record lacks a label", "label present");
    rec.label = j["label"].get<std::string>();
    if (!valid_label(rec.label))
      throw fail("label " + rec.label + " is malformed", "label well-formed");
    if (j.contains("aliases"))
      for (const auto& a : j["aliases"])
        rec.aliases.push_back(a.get<std::string>());
    if (!j.contains("a_invariants") || !j["a_invariants"].is_array() ||
        j["a_invariants"].size() != 5)
      throw fail("record needs five a-invariants", "a_invariants has 5 entries");
    for (size_t i = 0; i < 5; ++i)
      rec.a_invariants[i] = j["a_invariants"][i].get<i64>();
    if (!j.contains("conductor") || !j["conductor"].is_number_unsigned() ||
        j["conductor"].get<u64>() == 0)
      throw fail("conductor must be a positive integer", "conductor >= 1");
    rec.conductor = j["conductor"].get<u64>();
    u64 prefix = 0;
    for (char c : rec.label) {
      if (c < '0' || c > '9') break;
      prefix = prefix * 10 + u64(c - '0');
    }
    if (prefix != rec.conductor)
      throw fail("label " + rec.label + " does not start with conductor " +
                     std::to_string(rec.conductor),
                 "label prefix equals the conductor");
    if (j.contains("rank") && !j["rank"].is_null())
      rec.rank = j["rank"].get<i64>();
    if (j.contains("torsion_structure"))
      for (const auto& t : j["torsion_structure"])
        rec.torsion_structure.push_back(t.get<i64>());
    for (const char* key : {"mu2", "lambda2"}) {
      if (!j.contains(key) || j[key].is_null()) continue;
      i64 v = j[key].get<i64>();
      if (v < 0)
        throw fail(std::string(key) + " must be non-negative",
                   "mu2, lambda2 >= 0");
      (std::string(key) == "mu2" ? rec.mu2 : rec.lambda2) = v;
    }
    if (j.contains("root_number") && !j["root_number"].is_null()) {
      int w = j["root_number"].get<int>();
      if (w != 1 && w != -1)
        throw fail("root_number must be +1 or -1", "root_number in {-1, +1}");
      rec.root_number = w;
    }
    if (j.contains("display_model") && !j["display_model"].is_null()) {
      DisplayModel dm;
      dm.A = j["display_model"].at("A").get<i64>();
      dm.B = j["display_model"].at("B").get<i64>();
      rec.display_model = dm;
    }
    if (j.contains("display_transform") && !j["display_transform"].is_null()) {
      ModelTransform tr;
      tr.u = j["display_transform"].at("u").get<i64>();
      tr.r = j["display_transform"].at("r").get<i64>();
      tr.s = j["display_transform"].at("s").get<i64>();
      tr.t = j["display_transform"].at("t").get<i64>();
      rec.display_transform = tr;
    }
  } catch (const nlohmann::json::exception& e) {
    throw fail(std::string("record field has the wrong type: ") + e.what(),
               "record fields typed per schema");
  }

  // The model must be honest before the record is usable.
  WeierstrassCurve E = rec.curve();
  if (auto cd = try_conductor(E); cd && cd->conductor != rec.conductor)
    throw fail("recorded conductor " + std::to_string(rec.conductor) +
                   " disagrees with the recomputed " +
                   std::to_string(cd->conductor),
               "conductor matches the model");
  if (rec.display_model && rec.display_transform) {
    WeierstrassCurve disp = WeierstrassCurve::from_a_invariants(
        0, 0, 0, rec.display_model->A, rec.display_model->B);
    const auto& tr = *rec.display_transform;
    WeierstrassCurve carried = transform_model(disp, tr.u, tr.r, tr.s, tr.t);
    if (carried.a1 != E.a1 || carried.a2 != E.a2 || carried.a3 != E.a3 ||
        carried.a4 != E.a4 || carried.a6 != E.a6)
      throw fail("display transform witness misses the minimal model",
                 "transform carries the display model onto a_invariants");
  }
  return rec;
}

std::string record_to_json(const CurveRecord& rec) {
  ojson j;
  j["schema_version"] = kCurveRecordSchemaVersion;
  j["label"] = rec.label;
  j["aliases"] = rec.aliases;
  j["a_invariants"] = rec.a_invariants;
  j["conductor"] = rec.conductor;
  j["rank"] = rec.rank ? ojson(*rec.rank) : ojson(nullptr);
  j["torsion_structure"] = rec.torsion_structure;
  j["mu2"] = rec.mu2 ? ojson(*rec.mu2) : ojson(nullptr);
  j["lambda2"] = rec.lambda2 ? ojson(*rec.lambda2) : ojson(nullptr);
  j["root_number"] = rec.root_number ? ojson(*rec.root_number) : ojson(nullptr);
  if (rec.display_model) {
    ojson dm;
    dm["A"] = rec.display_model->A;
    dm["B"] = rec.display_model->B;
    j["display_model"] = dm;
  } else {
    j["display_model"] = nullptr;
  }
  if (rec.display_transform) {
    ojson tr;
    tr["u"] = rec.display_transform->u;
    tr["r"] = rec.display_transform->r;
    tr["s"] = rec.display_transform->s;
    tr["t"] = rec.display_transform->t;
    j["display_transform"] = tr;
  } else {
    j["display_transform"] = nullptr;
  }
  return j.dump(2);
}

void cache_store(const std::string& dir, const CurveRecord& rec) {
  std::lock_guard<std::mutex> g(label_write_mutex(rec.label));
  fs::create_directories(dir);
  std::string body = record_to_json(rec);
  ojson envelope;
  envelope["checksum"] = fnv1a64_hex(body);
  envelope["record"] = ojson::parse(body);
  write_atomically(fs::path(dir) / (rec.label + ".json"), envelope.dump(2));
}

std::optional<CurveRecord> cache_load(const std::string& dir,
                                      const std::string& label) {
  fs::path path = fs::path(dir) / (label + ".json");
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) return std::nullopt;
  ojson envelope;
  try {
    envelope = ojson::parse(read_file(path));
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::CacheCorrupt, "cache entry is not JSON",
                "cache entry parses");
  }
  if (!envelope.is_object() || !envelope.contains("checksum") ||
      !envelope.contains("record"))
    throw Error(ErrorCode::CacheCorrupt, "cache envelope incomplete",
                "cache entry has checksum and record");
  std::string body = envelope["record"].dump(2);
  if (fnv1a64_hex(body) != envelope["checksum"].get<std::string>())
    throw Error(ErrorCode::CacheCorrupt,
                "cache checksum mismatch for " + label,
                "checksum matches the stored record");
  auto rec = record_from_json(body, RecordSource::Cache);
  rec.source = RecordSource::Cache;
  return rec;
}

std::string resolve_fixtures_dir(const std::string& override_dir) {
  auto ok = [](const fs::path& p) {
    std::error_code ec;
    return fs::is_directory(p, ec);
  };
  if (!override_dir.empty())
    return ok(override_dir) ? override_dir : std::string();
  if (const char* env = std::getenv("TWISTLAB_FIXTURES_DIR");
      env && *env && ok(env))
    return env;
  if (ok("fixtures")) return "fixtures";
  std::error_code ec;
  fs::path exe = fs::read_symlink("/proc/self/exe", ec);
  if (!ec) {
    fs::path base = exe.parent_path();
    for (const char* rel :
         {"fixtures", "../fixtures", "../../fixtures", "../share/twistlab/fixtures"}) {
      fs::path cand = base / rel;
      if (ok(cand)) return cand.lexically_normal().string();
    }
  }
  return "";
}

CurveRecord fetch_curve(const std::string& label, const FetchOptions& opts) {
  if (!valid_label(label))
    throw Error(ErrorCode::BadInput,
                "label " + label + " is not a Cremona or LMFDB curve label",
                "label like 53a1 or 53.a1");
  bool offline = opts.offline || env_truthy("TWISTLAB_OFFLINE");

  std::string fixdir = resolve_fixtures_dir(opts.fixtures_dir);
  if (!fixdir.empty())
    if (auto rec = fixture_lookup(fixdir, label)) return *rec;

  std::string cdir = opts.cache_dir;
  if (cdir.empty())
    if (const char* env = std::getenv("TWISTLAB_CACHE_DIR"); env && *env)
      cdir = env;
  if (!cdir.empty())
    if (auto rec = cache_load(cdir, label)) return *rec;

  if (offline)
    throw Error(ErrorCode::NotFound,
                "curve " + label + " is not in the fixtures or cache",
                "label resolvable offline");

  CurveRecord rec = fetch_remote(label, opts);
  if (!cdir.empty()) cache_store(cdir, rec);
  return rec;
}

}  // namespace twistlab
